#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hawkes_lab/matrix.hpp"
#include "hawkes_lab/model.hpp"
#include "hawkes_lab/simulator.hpp"
#include "hawkes_lab/statistics.hpp"

namespace hawkes_lab::mc {

enum class StatisticKind { yprime, f, y, gamma };

std::string_view to_string(StatisticKind kind) noexcept;
/// Accepts "Yprime", "F", "Y", "Gamma" (case-insensitive).
StatisticKind parse_statistic(std::string_view name);

struct StatisticSpec {
  StatisticKind kind = StatisticKind::yprime;
  std::vector<double> v_grid;  // only for Gamma
};

/// f(x) = exp(-scale |x|^2).
struct TestFunctionSpec {
  double scale = 0.25;
};

struct HistogramSpec {
  std::size_t bins_x = 50;
  std::size_t bins_y = 50;
  double x_min = -25.0;
  double x_max = 25.0;
  double y_min = -25.0;
  double y_max = 25.0;
};

struct Histogram2D {
  Vector x_edges;
  Vector y_edges;
  std::vector<std::uint64_t> counts;  // counts[ix * bins_y + iy]
  std::uint64_t in_range = 0;
  std::uint64_t total = 0;

  std::size_t bins_x() const noexcept { return x_edges.empty() ? 0 : x_edges.size() - 1; }
  std::size_t bins_y() const noexcept { return y_edges.empty() ? 0 : y_edges.size() - 1; }
  std::uint64_t count(std::size_t ix, std::size_t iy) const { return counts.at(ix * bins_y() + iy); }

  friend bool operator==(const Histogram2D&, const Histogram2D&) = default;
};

struct ExperimentConfig {
  HawkesModel model;
  StatisticSpec statistic;
  std::vector<double> T_list;
  std::size_t n_paths = 2;
  std::uint64_t master_seed = 0;
  std::optional<TestFunctionSpec> test_function;
  std::optional<HistogramSpec> histogram;
  SimulationOptions simulation;
  /// Worker threads (0 = hardware concurrency). Never changes results.
  unsigned threads = 1;
  /// Keep every per-path CltSample in the record.
  bool keep_samples = false;
};

struct ExperimentRecord {
  double T = 0.0;
  CovarianceEstimate estimate;
  Matrix theoretical_covariance;
  Matrix z_scores;
  /// Deterministic offset between Y_T and Y'_T at this horizon.
  Vector centering_remainder;
  std::optional<double> test_estimate;
  std::optional<double> test_se;
  std::optional<double> test_reference;
  std::optional<double> discrepancy;
  std::optional<Histogram2D> histogram;
  std::optional<Histogram2D> reference_histogram;
  std::vector<CltSample> samples;
  std::uint64_t total_events = 0;
  /// Excluded from serialised summaries so they stay reproducible.
  double wall_seconds = 0.0;
};

struct Provenance {
  std::uint64_t master_seed = 0;
  std::size_t n_paths = 0;
  std::string model_hash;
  StatisticSpec statistic;
  std::vector<double> T_list;
};

struct ExperimentSummary {
  Provenance provenance;
  std::vector<ExperimentRecord> records;
};

/// Stream key of path `path_index` at horizon number `horizon_index`.
std::uint64_t path_seed(std::uint64_t master_seed, std::size_t horizon_index, std::size_t path_index) noexcept;

/// Runs body(i) for i in [0, n) on `threads` workers with static interleaved
/// sharding. The first exception (lowest worker) is rethrown after joining.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

/// Simulates n_paths paths per horizon, evaluates the chosen statistic and
/// aggregates in path-index order after all workers finish.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

/// n draws of N(0, sigma) as L z with L the Cholesky factor and z from the
/// polar method.
std::vector<Vector> sample_gaussian(const Matrix& sigma, std::size_t n, std::uint64_t seed);

/// Bins two-dimensional samples on a regular grid. The last bin in each
/// direction is closed on the right.
Histogram2D histogram2d(std::span<const Vector> samples, const HistogramSpec& spec);

}  // namespace hawkes_lab::mc
