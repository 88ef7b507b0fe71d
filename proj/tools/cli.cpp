#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hawkes_lab/coupling.hpp"
#include "hawkes_lab/error.hpp"
#include "hawkes_lab/io.hpp"
#include "hawkes_lab/mc.hpp"
#include "hawkes_lab/model.hpp"
#include "hawkes_lab/moments.hpp"
#include "hawkes_lab/rng.hpp"
#include "hawkes_lab/simulator.hpp"
#include "hawkes_lab/statistics.hpp"

namespace hawkes_lab::cli {
namespace {

namespace fs = std::filesystem;

struct Invocation {
  std::string subcommand;
  std::string config_path;
  std::string output_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::vector<std::string> overrides;
};

struct Context {
  json config;
  HawkesModel model;
  std::uint64_t master_seed;
  unsigned threads;
  fs::path out_dir;
  json provenance;
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

// key=value with a dotted key; a bare key that is not a top-level entry but
// is a model field is applied to the model.
void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  std::string key = assignment.substr(0, eq);
  const json value = parse_value(assignment.substr(eq + 1));
  if (key.find('.') == std::string::npos && !config.contains(key) && config.contains("model") &&
      config["model"].contains(key))
    key = "model." + key;

  json* node = &config;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    json& child = (*node)[part];
    if (child.is_null()) child = json::object();
    if (!child.is_object()) throw ConfigError("override key '" + key + "' descends into a non-object");
    node = &child;
    start = dot + 1;
  }
}

unsigned resolve_threads(const Invocation& inv, const json& config) {
  if (inv.threads) return *inv.threads;
  if (const char* env = std::getenv("HAWKES_LAB_THREADS")) {
    try {
      return static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      throw ConfigError(std::string("HAWKES_LAB_THREADS='") + env + "' is not a thread count");
    }
  }
  if (config.contains("threads")) return config["threads"].get<unsigned>();
  return 0;
}

Context make_context(const Invocation& inv) {
  json config = load_config(inv.config_path);
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& o : inv.overrides) apply_override(config, o);
  if (inv.seed) config["seed"] = *inv.seed;
  if (!config.contains("model")) throw ConfigError("config has no 'model' section");

  const unsigned threads = resolve_threads(inv, config);
  config.erase("threads");  // execution detail, not part of the experiment
  HawkesModel model = model_from_json(config["model"]);
  const std::uint64_t seed = config.value("seed", std::uint64_t{0});

  fs::path out_dir(inv.output_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + inv.output_dir + "': " + ec.message());

  json provenance = {{"subcommand", inv.subcommand},
                     {"master_seed", seed},
                     {"config_hash", fnv1a_hex(config.dump())},
                     {"model_hash", model_hash(model)},
                     {"overrides", inv.overrides},
                     {"model", model_to_json(model)}};
  return {std::move(config), std::move(model), seed, threads, std::move(out_dir), std::move(provenance)};
}

const json& section(const Context& ctx, const char* name) {
  static const json empty = json::object();
  if (!ctx.config.contains(name)) return empty;
  const json& s = ctx.config.at(name);
  if (!s.is_object()) throw ConfigError(std::string("config section '") + name + "' must be an object");
  return s;
}

template <typename T>
T get_or(const json& s, const char* key, T fallback) {
  if (!s.contains(key)) return fallback;
  try {
    return s.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  os << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string horizon_tag(double T) { return format_double(T); }

void print_report(std::ostream& out, const StabilityReport& r) {
  out << "rho_sub        " << format_double(r.rho_sub) << "\n";
  out << "eigs_V        ";
  for (const auto& ev : r.eigs_V) {
    out << ' ' << format_double(ev.real());
    if (ev.imag() != 0.0) out << (ev.imag() > 0 ? "+" : "") << format_double(ev.imag()) << 'i';
  }
  out << "\nassumption 1   " << (r.assumption1_ok ? "ok" : "FAILED") << "  (branching ratio < 1)\n";
  out << "assumption 2   " << (r.assumption2_ok ? "ok" : "FAILED") << "  (Re eig(V) > 0)\n";
  out << "assumption 3   " << (r.assumption3_ok ? "ok" : "FAILED") << "  (finite third mark moments)\n";
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
}

int cmd_validate(const Context& ctx, std::ostream& out) {
  const auto report = validate(ctx.model);
  print_report(out, report);
  json doc = {{"report", report_to_json(report)}, {"provenance", ctx.provenance}};
  write_json(ctx.out_dir / "report.json", doc);
  return report.all_ok() ? kSuccess : kAssumptionFailure;
}

int cmd_moments(const Context& ctx, std::ostream& out) {
  const auto report = validate(ctx.model);
  if (!report.all_ok()) {
    print_report(out, report);
    return kAssumptionFailure;
  }
  const auto ms = limit_covariances(ctx.model);
  json doc = {{"moments", moments_to_json(ms)}, {"provenance", ctx.provenance}};
  const json& s = section(ctx, "moments");
  if (s.contains("v_grid")) {
    const auto v = get_or<std::vector<double>>(s, "v_grid", {});
    doc["multimarginal_covariance"] = matrix_to_json(multimarginal_covariance(ctx.model, v));
    doc["v_grid"] = v;
  }
  if (s.contains("T_list")) {
    json rows = json::array();
    for (double T : get_or<std::vector<double>>(s, "T_list", {}))
      rows.push_back({{"T", T},
                      {"mean_intensity", mean_intensity(ctx.model, T)},
                      {"integrated_mean_intensity", integrated_mean_intensity(ctx.model, T)},
                      {"centering_remainder", centering_remainder(ctx.model, T)}});
    doc["horizons"] = rows;
  }
  doc["gaussian_test_expectation"] = gaussian_test_expectation(ms.Ctilde);
  write_json(ctx.out_dir / "moments.json", doc);
  out << "moments written to " << (ctx.out_dir / "moments.json").string() << "\n";
  return kSuccess;
}

int cmd_simulate(const Context& ctx, std::ostream& out) {
  const json& s = section(ctx, "simulate");
  const double T = get_or(s, "T", 100.0);
  const auto index = get_or<std::uint64_t>(s, "path_index", 0);
  SimulationOptions opts;
  opts.max_events = get_or<std::size_t>(s, "max_events", opts.max_events);
  const auto path = simulate(ctx.model, T, derive_stream_key(ctx.master_seed, index), opts);

  std::ostringstream csv;
  write_path_csv(csv, path);
  write_text(ctx.out_dir / "path.csv", csv.str());
  json sidecar = path_sidecar_json(path);
  sidecar["path_index"] = index;
  sidecar["provenance"] = ctx.provenance;
  write_json(ctx.out_dir / "path.json", sidecar);
  out << path.events.size() << " events on [0, " << format_double(T) << "] written to "
      << (ctx.out_dir / "path.csv").string() << "\n";
  return kSuccess;
}

mc::ExperimentConfig experiment_from_section(const Context& ctx, const json& s, bool force_test_function) {
  mc::ExperimentConfig cfg{ctx.model, {}, {}, 2, ctx.master_seed, std::nullopt, std::nullopt, {}, ctx.threads, false};
  cfg.statistic.kind = mc::parse_statistic(get_or<std::string>(s, "statistic", "Yprime"));
  cfg.statistic.v_grid = get_or<std::vector<double>>(s, "v_grid", {});
  cfg.T_list = get_or<std::vector<double>>(s, "T_list", {});
  if (cfg.T_list.empty() && s.contains("T")) cfg.T_list = {get_or(s, "T", 1.0)};
  cfg.n_paths = get_or<std::size_t>(s, "n_paths", 1000);
  if (s.contains("test_function")) {
    const json& tf = s.at("test_function");
    const auto kind = get_or<std::string>(tf, "kind", "exp_quadratic");
    if (kind != "exp_quadratic") throw ConfigError("unknown test function '" + kind + "'");
    cfg.test_function = mc::TestFunctionSpec{get_or(tf, "scale", 0.25)};
  } else if (force_test_function) {
    cfg.test_function = mc::TestFunctionSpec{};
  }
  if (s.contains("histogram")) {
    const json& h = s.at("histogram");
    mc::HistogramSpec spec;
    spec.bins_x = get_or(h, "bins_x", spec.bins_x);
    spec.bins_y = get_or(h, "bins_y", spec.bins_y);
    if (h.contains("range")) {
      const auto r = get_or<std::vector<double>>(h, "range", {});
      if (r.size() != 4) throw ConfigError("histogram.range must be [x_min, x_max, y_min, y_max]");
      spec.x_min = r[0];
      spec.x_max = r[1];
      spec.y_min = r[2];
      spec.y_max = r[3];
    }
    cfg.histogram = spec;
  }
  cfg.keep_samples = get_or(s, "write_samples", false);
  return cfg;
}

void write_experiment_outputs(const Context& ctx, const mc::ExperimentConfig& cfg, const mc::ExperimentSummary& sum,
                              const std::string& stem, json extra) {
  json doc = summary_to_json(sum);
  for (auto& [k, v] : ctx.provenance.items()) doc["provenance"][k] = v;
  for (auto& [k, v] : extra.items()) doc[k] = v;
  write_json(ctx.out_dir / (stem + ".json"), doc);

  json timing = json::array();
  for (const auto& r : sum.records) timing.push_back({{"T", r.T}, {"wall_seconds", r.wall_seconds}});
  write_json(ctx.out_dir / (stem + "_timing.json"), {{"records", timing}, {"threads", ctx.threads}});

  if (cfg.test_function) {
    std::ostringstream csv;
    write_discrepancy_csv(csv, sum);
    write_text(ctx.out_dir / "discrepancy.csv", csv.str());
  }
  for (const auto& r : sum.records) {
    if (r.histogram) {
      std::ostringstream a, b;
      write_histogram_csv(a, *r.histogram);
      write_histogram_csv(b, *r.reference_histogram);
      write_text(ctx.out_dir / ("histogram_T" + horizon_tag(r.T) + ".csv"), a.str());
      write_text(ctx.out_dir / ("reference_histogram_T" + horizon_tag(r.T) + ".csv"), b.str());
    }
    if (!r.samples.empty()) {
      std::ostringstream lines;
      for (const auto& smp : r.samples) lines << clt_sample_to_json(smp).dump() << '\n';
      write_text(ctx.out_dir / ("samples_T" + horizon_tag(r.T) + ".jsonl"), lines.str());
    }
  }
}

const char* reference_covariance_name(mc::StatisticKind kind) {
  switch (kind) {
    case mc::StatisticKind::f:
      return "C";
    case mc::StatisticKind::gamma:
      return "Chat";
    default:
      return "Ctilde";
  }
}

int require_valid_model(const Context& ctx, std::ostream& err) {
  const auto report = validate(ctx.model);
  if (report.all_ok()) return kSuccess;
  print_report(err, report);
  return kAssumptionFailure;
}

int cmd_clt(const Context& ctx, std::ostream& out, std::ostream& err) {
  if (int rc = require_valid_model(ctx, err)) return rc;
  const auto cfg = experiment_from_section(ctx, section(ctx, "clt"), false);
  const auto sum = mc::run_experiment(cfg);
  write_experiment_outputs(ctx, cfg, sum, "summary", json::object());
  for (const auto& r : sum.records) {
    double max_z = 0.0;
    for (double z : r.z_scores.data()) max_z = std::max(max_z, std::abs(z));
    out << "T=" << format_double(r.T) << "  n=" << r.estimate.n << "  max|z|=" << std::setprecision(3) << max_z;
    if (r.discrepancy) out << "  discrepancy=" << format_double(*r.discrepancy);
    out << "\n";
  }
  return kSuccess;
}

int cmd_sweep(const Context& ctx, std::ostream& out, std::ostream& err) {
  if (int rc = require_valid_model(ctx, err)) return rc;
  const auto cfg = experiment_from_section(ctx, section(ctx, "sweep"), true);
  const auto sum = mc::run_experiment(cfg);
  const double floor = 3.0 / std::sqrt(static_cast<double>(cfg.n_paths));
  bool monotone = true;
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& r : sum.records) {
    if (previous > floor && !(*r.discrepancy < previous)) monotone = false;
    previous = *r.discrepancy;
  }
  write_experiment_outputs(ctx, cfg, sum, "sweep",
                           {{"noise_floor", floor},
                            {"decreasing_until_noise_floor", monotone},
                            {"reference_covariance", reference_covariance_name(cfg.statistic.kind)}});
  for (const auto& r : sum.records)
    out << "T=" << format_double(r.T) << "  estimate=" << format_double(*r.test_estimate)
        << "  reference=" << format_double(*r.test_reference) << "  discrepancy=" << format_double(*r.discrepancy)
        << "\n";
  out << "noise floor 3/sqrt(n) = " << format_double(floor) << ", decreasing until floor: " << (monotone ? "yes" : "no")
      << "\n";
  return kSuccess;
}

int cmd_tilde(const Context& ctx, std::ostream& out, std::ostream& err) {
  if (int rc = require_valid_model(ctx, err)) return rc;
  const json& s = section(ctx, "tilde");
  const auto j = get_or<std::size_t>(s, "j", 1);
  if (j < 1 || j > ctx.model.dim()) throw ConfigError("tilde.j must lie in [1, d]");
  TildeConfig cfg{ctx.model, j - 1, get_or(s, "t", 0.0), get_or(s, "x", 1.0), get_or(s, "horizon", 20.0)};
  const auto s_grid = get_or<std::vector<double>>(s, "s_grid", {0.5, 1.0, 2.0});
  const auto n = get_or<std::size_t>(s, "n_runs", 50000);
  if (n < 2) throw ConfigError("tilde.n_runs must be at least 2");
  for (double v : s_grid)
    if (!(v >= cfg.t && v <= cfg.horizon)) throw ConfigError("tilde.s_grid must lie in [t, horizon]");

  const std::size_t d = ctx.model.dim();
  const std::size_t width = s_grid.size() * d + 2 * d;
  std::vector<Vector> rows(n);
  mc::parallel_for(n, ctx.threads, [&](std::size_t i) {
    const auto path = simulate_tilde(cfg, derive_stream_key(ctx.master_seed, i));
    Vector row;
    row.reserve(width);
    for (double v : s_grid) {
      const auto lam = intensity_at(path, ctx.model, v);
      row.insert(row.end(), lam.begin(), lam.end());
    }
    for (std::size_t c = 0; c < d; ++c) row.push_back(static_cast<double>(path.H_T[c]));
    row.insert(row.end(), path.int_lambda.begin(), path.int_lambda.end());
    rows[i] = std::move(row);
  });
  const auto est = batch_covariance(rows);

  bool pass = true;
  json grid = json::array();
  for (std::size_t q = 0; q < s_grid.size(); ++q) {
    const auto theory = tilde_mean(cfg, s_grid[q]);
    json entry = {{"s", s_grid[q]}, {"theoretical", theory}};
    Vector mean(d), se(d), z(d);
    for (std::size_t c = 0; c < d; ++c) {
      mean[c] = est.mean[q * d + c];
      se[c] = est.mean_se[q * d + c];
      z[c] = se[c] > 0 ? (mean[c] - theory[c]) / se[c] : (mean[c] == theory[c] ? 0.0 : HUGE_VAL);
      pass = pass && std::abs(z[c]) <= 4.0;
    }
    entry["mc_mean"] = mean;
    entry["se"] = se;
    entry["z"] = z;
    grid.push_back(entry);
  }
  // Compensator identity: E[H~] = E[int lambda~].
  Vector count_gap(d), count_z(d);
  const std::size_t base = s_grid.size() * d;
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<Vector> diff(n, Vector(1));
    for (std::size_t i = 0; i < n; ++i) diff[i][0] = rows[i][base + c] - rows[i][base + d + c];
    const auto e = batch_covariance(diff);
    count_gap[c] = e.mean[0];
    count_z[c] = e.mean_se[0] > 0 ? e.mean[0] / e.mean_se[0] : 0.0;
    pass = pass && std::abs(count_z[c]) <= 4.0;
  }
  json doc = {{"j", j},
              {"t", cfg.t},
              {"x", cfg.x},
              {"horizon", cfg.horizon},
              {"n_runs", n},
              {"intensity_means", grid},
              {"count_minus_compensator", {{"mean", count_gap}, {"z", count_z}}},
              {"pass", pass},
              {"provenance", ctx.provenance}};
  write_json(ctx.out_dir / "tilde.json", doc);
  out << "tilde check over " << n << " runs: " << (pass ? "pass" : "FAIL") << " (|z| <= 4)\n";
  if (!pass) err << "tilde check: some z-scores exceed 4, see tilde.json\n";
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and verification laboratory for multivariate compound Hawkes processes", "hawkes-lab"};
  app.require_subcommand(1);
  Invocation inv;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"validate", "Check the stability assumptions (exit 2 if any fails)"},
      {"simulate", "Simulate one path; write path.csv and path.json"},
      {"moments", "Write the closed-form moment set to moments.json"},
      {"clt", "Run one Monte Carlo CLT experiment"},
      {"sweep", "Run the test-function discrepancy sweep over horizons"},
      {"tilde-check", "Verify the conditional mean of the tilde process"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", inv.config_path, "JSON configuration file")->required();
    sub->add_option("--out", inv.output_dir, "Output directory");
    sub->add_option("--seed", inv.seed, "Override the master seed");
    sub->add_option("--threads", inv.threads, "Worker threads (does not affect results)");
    sub->add_option("--set", inv.overrides, "Override a config entry, key=value (repeatable)")
        ->allow_extra_args(false);
    sub->callback([&inv, name] { inv.subcommand = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kSuccess : kUsageError;
  }

  try {
    const Context ctx = make_context(inv);
    if (inv.subcommand == "validate") return cmd_validate(ctx, out);
    if (inv.subcommand == "moments") return cmd_moments(ctx, out);
    if (inv.subcommand == "simulate") {
      if (int rc = require_valid_model(ctx, err)) return rc;
      return cmd_simulate(ctx, out);
    }
    if (inv.subcommand == "clt") return cmd_clt(ctx, out, err);
    if (inv.subcommand == "sweep") return cmd_sweep(ctx, out, err);
    if (inv.subcommand == "tilde-check") return cmd_tilde(ctx, out, err);
    err << "unknown subcommand\n";
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const AssumptionError& e) {
    err << "assumption failure: " << e.what() << "\n";
    return kAssumptionFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace hawkes_lab::cli
