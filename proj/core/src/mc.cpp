#include "hawkes_lab/mc.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "hawkes_lab/error.hpp"
#include "hawkes_lab/io.hpp"
#include "hawkes_lab/linalg.hpp"
#include "hawkes_lab/moments.hpp"
#include "hawkes_lab/rng.hpp"

namespace hawkes_lab::mc {
namespace {

const Vector& select(const CltSample& s, StatisticKind kind) {
  switch (kind) {
    case StatisticKind::yprime:
      return s.Yprime;
    case StatisticKind::f:
      return s.F;
    case StatisticKind::y:
      return s.Y;
    case StatisticKind::gamma:
      return *s.Gamma;
  }
  return s.Yprime;
}

Matrix theoretical_covariance(const ExperimentConfig& cfg) {
  switch (cfg.statistic.kind) {
    case StatisticKind::f:
      return limit_covariances(cfg.model).C;
    case StatisticKind::y:
    case StatisticKind::yprime:
      return limit_covariances(cfg.model).Ctilde;
    case StatisticKind::gamma:
      return multimarginal_covariance(cfg.model, cfg.statistic.v_grid);
  }
  return {};
}

void check_config(const ExperimentConfig& cfg) {
  if (cfg.n_paths < 2) throw ValidationError("run_experiment: n_paths must be at least 2");
  if (cfg.T_list.empty()) throw ValidationError("run_experiment: T_list is empty");
  for (double T : cfg.T_list)
    if (!(T > 0.0 && std::isfinite(T))) throw ValidationError("run_experiment: horizons must be positive");
  if (cfg.statistic.kind == StatisticKind::gamma) {
    if (cfg.statistic.v_grid.empty()) throw ValidationError("run_experiment: Gamma statistic needs a v grid");
  } else if (!cfg.statistic.v_grid.empty()) {
    throw ValidationError("run_experiment: a v grid is only meaningful for the Gamma statistic");
  }
  if (cfg.test_function && !(cfg.test_function->scale > 0.0))
    throw ValidationError("run_experiment: test function scale must be positive");
  require_stable(cfg.model);
}

double test_function_value(const Vector& x, double scale) {
  double sq = 0.0;
  for (double v : x) sq += v * v;
  return std::exp(-scale * sq);
}

}  // namespace

std::string_view to_string(StatisticKind kind) noexcept {
  switch (kind) {
    case StatisticKind::yprime:
      return "Yprime";
    case StatisticKind::f:
      return "F";
    case StatisticKind::y:
      return "Y";
    case StatisticKind::gamma:
      return "Gamma";
  }
  return "Yprime";
}

StatisticKind parse_statistic(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "yprime" || lower == "y'") return StatisticKind::yprime;
  if (lower == "f") return StatisticKind::f;
  if (lower == "y") return StatisticKind::y;
  if (lower == "gamma") return StatisticKind::gamma;
  throw ConfigError("unknown statistic '" + std::string(name) + "' (expected Yprime, F, Y or Gamma)");
}

std::uint64_t path_seed(std::uint64_t master_seed, std::size_t horizon_index, std::size_t path_index) noexcept {
  return derive_stream_key(derive_stream_key(master_seed, horizon_index), path_index);
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(threads, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  check_config(cfg);
  const Matrix reference_cov = theoretical_covariance(cfg);
  const std::size_t width = reference_cov.rows();
  if (cfg.histogram && width != 2) throw ValidationError("run_experiment: histograms need a two-dimensional statistic");

  ExperimentSummary summary;
  summary.provenance = {cfg.master_seed, cfg.n_paths, model_hash(cfg.model), cfg.statistic, cfg.T_list};

  for (std::size_t k = 0; k < cfg.T_list.size(); ++k) {
    const auto started = std::chrono::steady_clock::now();
    const double T = cfg.T_list[k];
    const CltEvaluator evaluator(cfg.model, T,
                                 cfg.statistic.kind == StatisticKind::gamma ? cfg.statistic.v_grid
                                                                           : std::vector<double>{});

    std::vector<CltSample> per_path(cfg.n_paths);
    std::vector<std::uint64_t> events(cfg.n_paths, 0);
    parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t i) {
      const auto path = simulate(cfg.model, T, path_seed(cfg.master_seed, k, i), cfg.simulation);
      events[i] = path.events.size();
      per_path[i] = evaluator(path);
    });

    ExperimentRecord rec;
    rec.T = T;
    std::vector<Vector> values;
    values.reserve(cfg.n_paths);
    for (const auto& s : per_path) values.push_back(select(s, cfg.statistic.kind));
    rec.estimate = batch_covariance(values);
    rec.theoretical_covariance = reference_cov;
    rec.z_scores = z_scores(rec.estimate.covariance, reference_cov, rec.estimate.covariance_se);
    rec.centering_remainder = centering_remainder(cfg.model, T);
    for (auto e : events) rec.total_events += e;

    if (cfg.test_function) {
      KahanSum sum, sum_sq;
      for (const auto& v : values) {
        const double f = test_function_value(v, cfg.test_function->scale);
        sum.add(f);
        sum_sq.add(f * f);
      }
      const double n = static_cast<double>(values.size());
      const double mean = sum.value() / n;
      const double var = std::max(sum_sq.value() / n - mean * mean, 0.0) * n / (n - 1.0);
      rec.test_estimate = mean;
      rec.test_se = std::sqrt(var / n);
      rec.test_reference = gaussian_test_expectation(reference_cov, cfg.test_function->scale);
      rec.discrepancy = std::abs(mean - *rec.test_reference);
    }

    if (cfg.histogram) {
      rec.histogram = histogram2d(values, *cfg.histogram);
      const auto gaussian = sample_gaussian(reference_cov, cfg.n_paths,
                                            derive_stream_key(derive_stream_key(cfg.master_seed, k), ~0ULL));
      rec.reference_histogram = histogram2d(gaussian, *cfg.histogram);
    }
    if (cfg.keep_samples) rec.samples = std::move(per_path);

    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    summary.records.push_back(std::move(rec));
  }
  return summary;
}

std::vector<Vector> sample_gaussian(const Matrix& sigma, std::size_t n, std::uint64_t seed) {
  const auto factor = linalg::cholesky(sigma);
  const std::size_t d = sigma.rows();
  RandomStream rng(seed);
  std::vector<Vector> out(n, Vector(d, 0.0));
  Vector z(d);
  for (auto& x : out) {
    for (auto& e : z) e = rng.normal();
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += factor.lower(i, j) * z[j];
      x[i] = s;
    }
  }
  return out;
}

Histogram2D histogram2d(std::span<const Vector> samples, const HistogramSpec& spec) {
  if (spec.bins_x == 0 || spec.bins_y == 0) throw ValidationError("histogram2d: bin counts must be positive");
  if (!(spec.x_max > spec.x_min && spec.y_max > spec.y_min))
    throw ValidationError("histogram2d: empty range");
  Histogram2D h;
  h.x_edges.resize(spec.bins_x + 1);
  h.y_edges.resize(spec.bins_y + 1);
  const double dx = (spec.x_max - spec.x_min) / static_cast<double>(spec.bins_x);
  const double dy = (spec.y_max - spec.y_min) / static_cast<double>(spec.bins_y);
  for (std::size_t i = 0; i <= spec.bins_x; ++i) h.x_edges[i] = spec.x_min + dx * static_cast<double>(i);
  for (std::size_t i = 0; i <= spec.bins_y; ++i) h.y_edges[i] = spec.y_min + dy * static_cast<double>(i);
  h.x_edges.back() = spec.x_max;
  h.y_edges.back() = spec.y_max;
  h.counts.assign(spec.bins_x * spec.bins_y, 0);

  auto locate = [](const Vector& edges, double v) -> std::ptrdiff_t {
    if (!(v >= edges.front() && v <= edges.back())) return -1;
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    const auto idx = std::distance(edges.begin(), it) - 1;
    return std::min<std::ptrdiff_t>(idx, static_cast<std::ptrdiff_t>(edges.size()) - 2);
  };

  for (const auto& s : samples) {
    if (s.size() != 2) throw ValidationError("histogram2d: samples must be two-dimensional");
    ++h.total;
    const auto ix = locate(h.x_edges, s[0]);
    const auto iy = locate(h.y_edges, s[1]);
    if (ix < 0 || iy < 0) continue;
    ++h.counts[static_cast<std::size_t>(ix) * spec.bins_y + static_cast<std::size_t>(iy)];
    ++h.in_range;
  }
  return h;
}

}  // namespace hawkes_lab::mc
