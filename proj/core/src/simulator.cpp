#include "hawkes_lab/simulator.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "hawkes_lab/error.hpp"
#include "hawkes_lab/rng.hpp"

namespace hawkes_lab {

SimulatedPath simulate(const HawkesModel& model, double T, std::uint64_t seed, const SimulationOptions& options) {
  return simulate_from_state(model, model.mu(), 0.0, model.mu(), T, seed, options);
}

SimulatedPath simulate_from_state(const HawkesModel& model, const Vector& baseline, double start_time,
                                  const Vector& initial_intensity, double horizon, std::uint64_t seed,
                                  const SimulationOptions& options) {
  const std::size_t d = model.dim();
  if (baseline.size() != d || initial_intensity.size() != d)
    throw ValidationError("simulate: baseline / initial intensity have the wrong dimension");
  if (!(std::isfinite(start_time) && std::isfinite(horizon) && horizon > start_time))
    throw ValidationError("simulate: horizon must be finite and greater than the start time");
  if (!(options.refresh_interval > 0.0)) throw ValidationError("simulate: refresh_interval must be positive");
  for (std::size_t i = 0; i < d; ++i)
    if (!(baseline[i] >= 0.0 && initial_intensity[i] >= baseline[i]))
      throw ValidationError("simulate: initial intensity must dominate a nonnegative baseline");
  require_stable(model);

  SimulatedPath path;
  path.start_time = start_time;
  path.horizon = horizon;
  path.seed = seed;
  path.baseline = baseline;
  path.initial_excess.resize(d);
  for (std::size_t i = 0; i < d; ++i) path.initial_excess[i] = initial_intensity[i] - baseline[i];

  const auto& beta = model.beta();
  const auto& alpha = model.alpha();
  const auto& marks = model.marks();
  const double baseline_total = std::accumulate(baseline.begin(), baseline.end(), 0.0);
  const bool can_die = baseline_total == 0.0;

  RandomStream rng(seed);
  Vector excess = path.initial_excess;  // lambda+ - baseline at state_time
  Vector decayed(d), lambda(d);
  double factor = 1.0;
  Vector integral(d, 0.0);  // int_{start}^{state_time} (lambda - baseline)
  path.L_T.assign(d, 0.0);
  path.H_T.assign(d, 0);
  double state_time = start_time;
  double clock = start_time;

  // Moves the state to time `to`, integrating the relaxation in closed form.
  auto relax_to = [&](double to) {
    for (std::size_t i = 0; i < d; ++i) {
      const double shrink = std::expm1(-beta[i] * (to - state_time));
      integral[i] -= excess[i] * shrink / beta[i];
      excess[i] += excess[i] * shrink;
    }
    state_time = to;
  };
  auto dominating_rate = [&] {
    double s = baseline_total;
    for (double e : excess) s += e;
    return s;
  };
  double bound = dominating_rate();
  double bound_time = start_time;

  for (;;) {
    if (!(bound > 0.0)) break;
    if (can_die && bound < options.extinction_threshold) break;

    const double candidate = clock + rng.exponential() / bound;
    const double refresh_at = bound_time + options.refresh_interval;
    if (candidate > refresh_at && refresh_at < horizon) {
      // No candidate before the refresh point: relax the state there and
      // tighten the bound (memorylessness of the candidate stream).
      relax_to(refresh_at);
      clock = bound_time = refresh_at;
      bound = dominating_rate();
      continue;
    }
    if (candidate > horizon) break;
    clock = candidate;

    double total = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (i == 0 || beta[i] != beta[i - 1]) factor = std::exp(-beta[i] * (candidate - state_time));
      decayed[i] = excess[i] * factor;
      lambda[i] = baseline[i] + decayed[i];
      total += lambda[i];
    }
    const double u = rng.uniform() * bound;
    if (u >= total) continue;

    std::size_t j = 0;
    double cumulative = lambda[0];
    while (u >= cumulative && j + 1 < d) cumulative += lambda[++j];
    const double y = marks[j].sample(rng);

    if (path.events.size() >= options.max_events)
      throw RunawayProcessError("simulate: event cap of " + std::to_string(options.max_events) +
                                " exceeded at t=" + std::to_string(candidate));
    path.events.push_back({candidate, static_cast<std::uint32_t>(j), y});
    path.L_T[j] += y;
    path.H_T[j] += 1;

    for (std::size_t i = 0; i < d; ++i) {
      integral[i] += (excess[i] - decayed[i]) / beta[i];
      excess[i] = decayed[i] + alpha(i, j) * y;
    }
    state_time = candidate;
    bound_time = candidate;
    bound = dominating_rate();
  }

  relax_to(horizon);
  path.lambda_T.resize(d);
  path.int_lambda.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    path.lambda_T[i] = baseline[i] + excess[i];
    path.int_lambda[i] = baseline[i] * (horizon - start_time) + integral[i];
  }
  return path;
}

Vector intensity_at(const SimulatedPath& path, const HawkesModel& model, double t) {
  if (!(t >= path.start_time && t <= path.horizon))
    throw ValidationError("intensity_at: t=" + std::to_string(t) + " outside the simulated window");
  const std::size_t d = model.dim();
  if (path.baseline.size() != d) throw ValidationError("intensity_at: path does not match the model dimension");
  const auto& beta = model.beta();
  Vector lambda(d);
  for (std::size_t i = 0; i < d; ++i)
    lambda[i] = path.baseline[i] + path.initial_excess[i] * std::exp(-beta[i] * (t - path.start_time));
  for (const auto& ev : path.events) {
    if (ev.time >= t) break;
    for (std::size_t i = 0; i < d; ++i)
      lambda[i] += model.alpha()(i, ev.component) * ev.mark * std::exp(-beta[i] * (t - ev.time));
  }
  return lambda;
}

PathFunctionals path_functionals(const SimulatedPath& path, const HawkesModel& model, double horizon) {
  if (!(horizon >= path.start_time && horizon <= path.horizon))
    throw ValidationError("path_functionals: horizon outside the simulated window");
  const std::size_t d = model.dim();
  if (path.baseline.size() != d) throw ValidationError("path_functionals: path does not match the model dimension");
  const auto& beta = model.beta();
  const auto& alpha = model.alpha();

  PathFunctionals out{Vector(d, 0.0), std::vector<std::uint64_t>(d, 0), Vector(d, 0.0), Vector(d, 0.0)};
  const double span = horizon - path.start_time;
  for (std::size_t i = 0; i < d; ++i) {
    const double decay = std::exp(-beta[i] * span);
    out.int_lambda[i] = path.baseline[i] * span + path.initial_excess[i] * (-std::expm1(-beta[i] * span)) / beta[i];
    out.lambda[i] = path.baseline[i] + path.initial_excess[i] * decay;
  }
  for (const auto& ev : path.events) {
    if (ev.time > horizon) break;
    const std::size_t j = ev.component;
    out.L[j] += ev.mark;
    out.H[j] += 1;
    const double age = horizon - ev.time;
    for (std::size_t i = 0; i < d; ++i) {
      const double jump = alpha(i, j) * ev.mark;
      if (jump == 0.0) continue;
      out.int_lambda[i] += jump * (-std::expm1(-beta[i] * age)) / beta[i];
      out.lambda[i] += jump * std::exp(-beta[i] * age);
    }
  }
  return out;
}

}  // namespace hawkes_lab
