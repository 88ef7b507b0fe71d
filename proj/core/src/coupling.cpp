#include "hawkes_lab/coupling.hpp"

#include <cmath>

#include "hawkes_lab/error.hpp"
#include "hawkes_lab/linalg.hpp"

namespace hawkes_lab {
namespace {

void check_config(const TildeConfig& cfg) {
  if (cfg.j >= cfg.model.dim()) throw ValidationError("tilde: component index out of range");
  if (!(cfg.x > 0.0 && std::isfinite(cfg.x))) throw ValidationError("tilde: x must be positive and finite");
  if (!(std::isfinite(cfg.t) && cfg.horizon > cfg.t && std::isfinite(cfg.horizon)))
    throw ValidationError("tilde: horizon must exceed the start time");
}

Vector kick(const TildeConfig& cfg) {
  Vector v = cfg.model.alpha().column(cfg.j);
  for (double& e : v) e *= cfg.x;
  return v;
}

}  // namespace

SimulatedPath simulate_tilde(const TildeConfig& cfg, std::uint64_t seed, SimulationOptions options) {
  check_config(cfg);
  options.extinction_threshold = kTildeExtinctionThreshold;
  const Vector zero(cfg.model.dim(), 0.0);
  return simulate_from_state(cfg.model, zero, cfg.t, kick(cfg), cfg.horizon, seed, options);
}

Vector tilde_mean(const TildeConfig& cfg, double s) {
  check_config(cfg);
  if (!(s >= cfg.t)) throw ValidationError("tilde_mean: s must not precede the start time");
  require_stable(cfg.model);
  const Vector start = kick(cfg);
  return linalg::mat_exp(drift_matrix(cfg.model), -(s - cfg.t)) * std::span<const double>(start);
}

}  // namespace hawkes_lab
