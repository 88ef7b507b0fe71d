#include "hawkes_lab/io.hpp"

#include <charconv>
#include <ostream>

#include "hawkes_lab/error.hpp"

namespace hawkes_lab {
namespace {

json vector_to_json(const Vector& v) { return json(v); }

Vector numbers_from_json(const json& j, const char* field, std::size_t broadcast_to) {
  if (j.is_number()) return Vector(broadcast_to, j.get<double>());
  if (!j.is_array()) throw ConfigError(std::string("model.") + field + " must be a number or an array");
  Vector out;
  for (const auto& e : j) {
    if (!e.is_number()) throw ConfigError(std::string("model.") + field + " must contain numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
    h >>= 4;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(Vector(row.begin(), row.end()));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ConfigError("matrix rows must be arrays of equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ConfigError("matrix entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

json mark_to_json(const MarkDistribution& mark) {
  switch (mark.kind()) {
    case MarkDistribution::Kind::constant:
      return {{"kind", "constant"}, {"value", mark.value()}};
    case MarkDistribution::Kind::exponential:
      return {{"kind", "exponential"}, {"rate", mark.rate()}};
    case MarkDistribution::Kind::gamma:
      return {{"kind", "gamma"}, {"shape", mark.shape()}, {"rate", mark.rate()}};
  }
  return {};
}

MarkDistribution mark_from_json(const json& j) {
  const auto kind = require(j, "kind").get<std::string>();
  try {
    if (kind == "constant") return MarkDistribution::constant(require(j, "value").get<double>());
    if (kind == "exponential") return MarkDistribution::exponential(require(j, "rate").get<double>());
    if (kind == "gamma")
      return MarkDistribution::gamma(require(j, "shape").get<double>(), require(j, "rate").get<double>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("mark: ") + e.what());
  }
  throw ConfigError("unknown mark kind '" + kind + "' (expected constant, exponential or gamma)");
}

json model_to_json(const HawkesModel& model) {
  json marks = json::array();
  for (const auto& m : model.marks()) marks.push_back(mark_to_json(m));
  return {{"d", model.dim()},
          {"mu", vector_to_json(model.mu())},
          {"alpha", matrix_to_json(model.alpha())},
          {"beta", vector_to_json(model.beta())},
          {"marks", marks}};
}

HawkesModel model_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("model must be a JSON object");
  const Matrix alpha = matrix_from_json(require(j, "alpha"));
  std::size_t d = alpha.rows();
  if (j.contains("d")) {
    if (!j.at("d").is_number_unsigned()) throw ConfigError("model.d must be a positive integer");
    if (j.at("d").get<std::size_t>() != d)
      throw ConfigError("model.d = " + std::to_string(j.at("d").get<std::size_t>()) + " but alpha has " +
                        std::to_string(d) + " rows");
  }
  Vector mu = numbers_from_json(require(j, "mu"), "mu", d);
  Vector beta = numbers_from_json(require(j, "beta"), "beta", d);
  std::vector<MarkDistribution> marks;
  const json& mj = require(j, "marks");
  if (mj.is_object()) {
    marks.assign(d, mark_from_json(mj));
  } else if (mj.is_array()) {
    for (const auto& e : mj) marks.push_back(mark_from_json(e));
  } else {
    throw ConfigError("model.marks must be an object or an array");
  }
  try {
    return HawkesModel(std::move(mu), alpha, std::move(beta), std::move(marks));
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
}

std::string model_hash(const HawkesModel& model) { return fnv1a_hex(model_to_json(model).dump()); }

json report_to_json(const StabilityReport& report) {
  json eigs = json::array();
  for (const auto& ev : report.eigs_V) eigs.push_back({{"re", ev.real()}, {"im", ev.imag()}});
  return {{"rho_sub", report.rho_sub},
          {"eigs_V", eigs},
          {"assumption1_ok", report.assumption1_ok},
          {"assumption2_ok", report.assumption2_ok},
          {"assumption3_ok", report.assumption3_ok},
          {"all_ok", report.all_ok()},
          {"warnings", report.warnings}};
}

json moments_to_json(const MomentSet& moments) {
  return {{"V", matrix_to_json(moments.V)},
          {"J", matrix_to_json(moments.J)},
          {"lambda_bar", moments.lambda_bar},
          {"C", matrix_to_json(moments.C)},
          {"Ctilde", matrix_to_json(moments.Ctilde)}};
}

json clt_sample_to_json(const CltSample& sample) {
  json j = {{"T", sample.T}, {"F", sample.F}, {"Y", sample.Y}, {"Yprime", sample.Yprime}, {"R", sample.R}};
  if (sample.Gamma) j["Gamma"] = *sample.Gamma;
  return j;
}

json path_sidecar_json(const SimulatedPath& path) {
  return {{"T", path.horizon},
          {"start_time", path.start_time},
          {"seed", path.seed},
          {"n_events", path.events.size()},
          {"L_T", path.L_T},
          {"H_T", path.H_T},
          {"int_lambda", path.int_lambda},
          {"lambda_T", path.lambda_T}};
}

void write_path_csv(std::ostream& os, const SimulatedPath& path) {
  os << "time,component,mark\n";
  for (const auto& ev : path.events)
    os << format_double(ev.time) << ',' << (ev.component + 1) << ',' << format_double(ev.mark) << '\n';
}

json summary_to_json(const mc::ExperimentSummary& summary) {
  const auto& p = summary.provenance;
  json records = json::array();
  for (const auto& r : summary.records) {
    double max_z = 0.0;
    for (double z : r.z_scores.data()) max_z = std::max(max_z, std::abs(z));
    json rec = {{"T", r.T},
                {"n", r.estimate.n},
                {"mean", r.estimate.mean},
                {"mean_se", r.estimate.mean_se},
                {"empirical_covariance", matrix_to_json(r.estimate.covariance)},
                {"covariance_se", matrix_to_json(r.estimate.covariance_se)},
                {"theoretical_covariance", matrix_to_json(r.theoretical_covariance)},
                {"z_scores", matrix_to_json(r.z_scores)},
                {"max_abs_z", max_z},
                {"centering_remainder", r.centering_remainder},
                {"total_events", r.total_events}};
    if (r.test_estimate)
      rec["test_function"] = {{"estimate", *r.test_estimate},
                              {"se", *r.test_se},
                              {"reference", *r.test_reference},
                              {"discrepancy", *r.discrepancy}};
    records.push_back(std::move(rec));
  }
  return {{"provenance",
           {{"master_seed", p.master_seed},
            {"n_paths", p.n_paths},
            {"model_hash", p.model_hash},
            {"statistic", std::string(mc::to_string(p.statistic.kind))},
            {"v_grid", p.statistic.v_grid},
            {"T_list", p.T_list}}},
          {"records", records}};
}

void write_histogram_csv(std::ostream& os, const mc::Histogram2D& hist) {
  os << "x_lo,x_hi,y_lo,y_hi,count\n";
  for (std::size_t ix = 0; ix < hist.bins_x(); ++ix)
    for (std::size_t iy = 0; iy < hist.bins_y(); ++iy)
      os << format_double(hist.x_edges[ix]) << ',' << format_double(hist.x_edges[ix + 1]) << ','
         << format_double(hist.y_edges[iy]) << ',' << format_double(hist.y_edges[iy + 1]) << ','
         << hist.count(ix, iy) << '\n';
}

void write_discrepancy_csv(std::ostream& os, const mc::ExperimentSummary& summary) {
  os << "T,estimate,reference,discrepancy,se\n";
  for (const auto& r : summary.records) {
    if (!r.test_estimate) continue;
    os << format_double(r.T) << ',' << format_double(*r.test_estimate) << ',' << format_double(*r.test_reference)
       << ',' << format_double(*r.discrepancy) << ',' << format_double(*r.test_se) << '\n';
  }
}

}  // namespace hawkes_lab
