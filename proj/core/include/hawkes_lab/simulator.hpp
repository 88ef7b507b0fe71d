#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hawkes_lab/matrix.hpp"
#include "hawkes_lab/model.hpp"

namespace hawkes_lab {

struct EventRecord {
  double time = 0.0;
  std::uint32_t component = 0;  // zero-based
  double mark = 0.0;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct SimulationOptions {
  /// A path with more events than this raises RunawayProcessError.
  std::size_t max_events = 10'000'000;
  /// The dominating rate is re-tightened after this much time without an
  /// accepted event.
  double refresh_interval = 1.0;
  /// With a zero baseline, stop once the total intensity falls below this.
  double extinction_threshold = 0.0;
};

/// One realisation on [start_time, horizon]. The terminal quantities are
/// evaluated in closed form from the event list.
struct SimulatedPath {
  double start_time = 0.0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  /// Baseline intensity used for this path (mu, or zero for the tilde process).
  Vector baseline;
  /// lambda(start_time+) - baseline.
  Vector initial_excess;
  std::vector<EventRecord> events;

  /// Right limit of the intensity at the horizon.
  Vector lambda_T;
  /// Cumulative marks per component.
  Vector L_T;
  /// Event counts per component.
  std::vector<std::uint64_t> H_T;
  /// int_{start}^{horizon} lambda_t dt.
  Vector int_lambda;

  friend bool operator==(const SimulatedPath&, const SimulatedPath&) = default;
};

/// Pathwise quantities at a (possibly truncated) horizon.
struct PathFunctionals {
  Vector L;
  std::vector<std::uint64_t> H;
  Vector int_lambda;
  Vector lambda;  // right limit at the horizon
};

/// Exact simulation on [0, T] started from lambda_0 = mu, by thinning a
/// piecewise-constant dominating rate. Requires a model that passes
/// validate(); identical (model, T, seed) give bitwise identical paths.
SimulatedPath simulate(const HawkesModel& model, double T, std::uint64_t seed,
                       const SimulationOptions& options = {});

/// Generalised start: intensity `initial_intensity` at `start_time` relaxing
/// towards `baseline`. simulate() is the special case baseline = mu,
/// initial_intensity = mu, start_time = 0.
SimulatedPath simulate_from_state(const HawkesModel& model, const Vector& baseline, double start_time,
                                  const Vector& initial_intensity, double horizon, std::uint64_t seed,
                                  const SimulationOptions& options = {});

/// Left limit lambda_{t-}: baseline plus the kernels of events strictly
/// before t.
Vector intensity_at(const SimulatedPath& path, const HawkesModel& model, double t);

/// L, H, int lambda and lambda restricted to events with time <= horizon,
/// for start_time <= horizon <= path.horizon.
PathFunctionals path_functionals(const SimulatedPath& path, const HawkesModel& model, double horizon);

}  // namespace hawkes_lab
