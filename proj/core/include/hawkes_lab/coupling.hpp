#pragma once

#include <cstddef>
#include <cstdint>

#include "hawkes_lab/matrix.hpp"
#include "hawkes_lab/model.hpp"
#include "hawkes_lab/simulator.hpp"

namespace hawkes_lab {

/// The zero-baseline process kicked off by inserting an event of mark x in
/// component j at time t: lambda~_t = x A_{.j}, relaxing to zero with
/// d lambda~ = -B lambda~ ds + A dL~ afterwards. It carries the response of
/// the compound Hawkes process to one extra event and dies out a.s. when
/// the model is subcritical.
struct TildeConfig {
  HawkesModel model;
  std::size_t j = 0;  // zero-based component of the inserted event
  double t = 0.0;
  double x = 1.0;
  double horizon = 1.0;
};

/// Extinction threshold on the total intensity used by simulate_tilde().
inline constexpr double kTildeExtinctionThreshold = 1e-12;

/// Thinning simulation of the tilde process on [t, horizon]. The inserted
/// event itself is not part of the returned event list; the path may be
/// empty.
SimulatedPath simulate_tilde(const TildeConfig& cfg, std::uint64_t seed, SimulationOptions options = {});

/// E[lambda~_s] = x e^{-V (s - t)} A_{.j} for s >= t.
Vector tilde_mean(const TildeConfig& cfg, double s);

}  // namespace hawkes_lab
