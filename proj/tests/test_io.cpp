#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "hawkes_lab/error.hpp"
#include "hawkes_lab/io.hpp"
#include "hawkes_lab/simulator.hpp"
#include "test_support.hpp"

using namespace hawkes_lab;
using fixtures::fig1_model;

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1000.0), "1000");
  EXPECT_EQ(format_double(-2.5), "-2.5");
  for (double v : {1.0 / 3.0, 6.303030303030303, 1e-300, 123456789.123456789}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(ModelJson, RoundTrip) {
  const HawkesModel m({0.5, 1.0, 0.0}, Matrix{{0.1, 0.2, 0.0}, {0.0, 0.3, 0.1}, {0.2, 0.0, 0.1}}, {1.0, 2.0, 3.0},
                      {MarkDistribution::constant(2.0), MarkDistribution::exponential(0.5),
                       MarkDistribution::gamma(2.0, 3.0)});
  const json j = model_to_json(m);
  EXPECT_EQ(j["d"], 3);
  EXPECT_EQ(j["marks"][2]["kind"], "gamma");
  EXPECT_EQ(model_from_json(j), m);
  EXPECT_EQ(model_from_json(json::parse(j.dump())), m);
}

TEST(ModelJson, BroadcastsScalarsAndSingleMark) {
  const json j = json::parse(R"({"mu": [2, 3], "alpha": [[0.5, 2], [2, 0.5]], "beta": 4,
                                 "marks": {"kind": "exponential", "rate": 1}})");
  EXPECT_EQ(model_from_json(j), fig1_model());
  const json k = json::parse(R"({"mu": 1.5, "alpha": [[0.1]], "beta": [2], "marks": [{"kind": "constant", "value": 1}]})");
  EXPECT_EQ(model_from_json(k).mu(), (Vector{1.5}));
}

TEST(ModelJson, RejectsMalformed) {
  const char* bad[] = {
      R"({"alpha": [[0.5]], "beta": [1], "marks": {"kind": "exponential", "rate": 1}})",
      R"({"mu": [1, 2], "alpha": [[0.5]], "beta": [1], "marks": {"kind": "exponential", "rate": 1}})",
      R"({"d": 2, "mu": [1], "alpha": [[0.5]], "beta": [1], "marks": {"kind": "exponential", "rate": 1}})",
      R"({"mu": [1], "alpha": [[0.5]], "beta": [1], "marks": {"kind": "pareto", "alpha": 1}})",
      R"({"mu": [1], "alpha": [[0.5]], "beta": [1], "marks": {"kind": "exponential"}})",
      R"({"mu": [1], "alpha": [[0.5]], "beta": [0], "marks": {"kind": "exponential", "rate": 1}})",
      R"({"mu": [1], "alpha": [[0.5, 1]], "beta": [1], "marks": {"kind": "exponential", "rate": 1}})",
      R"({"mu": ["x"], "alpha": [[0.5]], "beta": [1], "marks": {"kind": "exponential", "rate": 1}})",
  };
  for (const char* text : bad) EXPECT_THROW(model_from_json(json::parse(text)), ConfigError) << text;
}

TEST(ModelHash, StableAndSensitive) {
  EXPECT_EQ(model_hash(fig1_model()), model_hash(fig1_model()));
  EXPECT_NE(model_hash(fig1_model()), model_hash(fig1_model(6.0)));
  EXPECT_EQ(model_hash(fig1_model()).size(), 16u);
}

TEST(PathExport, CsvAndSidecar) {
  const auto m = fig1_model();
  const auto p = simulate(m, 5.0, 3);
  std::ostringstream os;
  write_path_csv(os, p);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "time,component,mark");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    const auto c1 = line.find(','), c2 = line.rfind(',');
    const double t = std::stod(line.substr(0, c1));
    const int comp = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
    const double mark = std::stod(line.substr(c2 + 1));
    EXPECT_EQ(t, p.events[rows].time);
    EXPECT_EQ(comp, static_cast<int>(p.events[rows].component) + 1);
    EXPECT_EQ(mark, p.events[rows].mark);
    ++rows;
  }
  EXPECT_EQ(rows, p.events.size());
  const json side = path_sidecar_json(p);
  EXPECT_EQ(side["T"], 5.0);
  EXPECT_EQ(side["seed"], 3u);
  EXPECT_EQ(side["H_T"][0].get<std::uint64_t>(), p.H_T[0]);
  EXPECT_EQ(side["int_lambda"][1].get<double>(), p.int_lambda[1]);
  EXPECT_EQ(side["lambda_T"][0].get<double>(), p.lambda_T[0]);
  EXPECT_EQ(side["L_T"][1].get<double>(), p.L_T[1]);
}

TEST(SummaryJson, FieldsAndNoTiming) {
  mc::ExperimentConfig cfg{fig1_model(), {}, {3.0}, 20, 5, mc::TestFunctionSpec{}, std::nullopt, {}, 1, false};
  const auto s = mc::run_experiment(cfg);
  const json j = summary_to_json(s);
  EXPECT_EQ(j["provenance"]["master_seed"], 5u);
  EXPECT_EQ(j["provenance"]["n_paths"], 20u);
  EXPECT_EQ(j["provenance"]["statistic"], "Yprime");
  EXPECT_EQ(j["provenance"]["model_hash"], model_hash(cfg.model));
  const json& r = j["records"][0];
  for (const char* key : {"T", "n", "mean", "mean_se", "empirical_covariance", "covariance_se",
                          "theoretical_covariance", "z_scores", "max_abs_z", "centering_remainder", "total_events",
                          "test_function"})
    EXPECT_TRUE(r.contains(key)) << key;
  EXPECT_FALSE(r.contains("wall_seconds"));
  EXPECT_EQ(r["test_function"]["reference"].get<double>(), *s.records[0].test_reference);

  std::ostringstream csv;
  write_discrepancy_csv(csv, s);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "T,estimate,reference,discrepancy,se");
}

TEST(HistogramCsv, OneRowPerBin) {
  const std::vector<Vector> xs = {{0.1, 0.1}, {0.9, -0.9}};
  const auto h = mc::histogram2d(xs, mc::HistogramSpec{2, 2, -1.0, 1.0, -1.0, 1.0});
  std::ostringstream os;
  write_histogram_csv(os, h);
  EXPECT_EQ(os.str(),
            "x_lo,x_hi,y_lo,y_hi,count\n"
            "-1,0,-1,0,0\n"
            "-1,0,0,1,0\n"
            "0,1,-1,0,1\n"
            "0,1,0,1,1\n");
}

TEST(MomentsJson, ContainsAllFields) {
  const json j = moments_to_json(limit_covariances(fig1_model()));
  for (const char* key : {"V", "J", "lambda_bar", "C", "Ctilde"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(matrix_from_json(j["Ctilde"]), limit_covariances(fig1_model()).Ctilde);
}
