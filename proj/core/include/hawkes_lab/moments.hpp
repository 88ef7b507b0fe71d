#pragma once

#include <span>

#include "hawkes_lab/matrix.hpp"
#include "hawkes_lab/model.hpp"

namespace hawkes_lab {

/// Closed-form asymptotic quantities of a stable model.
struct MomentSet {
  Matrix V;           // B - A diag(m)
  Matrix J;           // (I - diag(m) B^-1 A)^-1
  Vector lambda_bar;  // V^-1 B mu, the stationary mean intensity
  Matrix C;           // diag(E[Y_j^2] lambda_bar_j), limit covariance of F_T
  Matrix Ctilde;      // J C J^T, limit covariance of Y_T and Y'_T
};

/// V^-1 B mu, by a linear solve.
Vector stationary_intensity(const HawkesModel& model);

/// E[lambda_t] = V^-1 B mu + e^{-Vt} (I - V^-1 B) mu.
Vector mean_intensity(const HawkesModel& model, double t);

/// int_0^T E[lambda_t] dt = V^-1 B mu T + (I - e^{-VT}) V^-1 (I - V^-1 B) mu.
Vector integrated_mean_intensity(const HawkesModel& model, double T);

MomentSet limit_covariances(const HawkesModel& model);

/// Covariance of Gamma_T = (F^1_{v_1 T}, ..., F^1_{v_p T}, ..., F^d_{v_p T}):
/// block diagonal, block n holding E[(Y^n)^2] lambda_bar_n sqrt(v_min / v_max).
/// `v` must be strictly increasing in (0, 1].
Matrix multimarginal_covariance(const HawkesModel& model, std::span<const double> v);

/// Deterministic gap between Y_T and Y'_T:
///   diag(m) (int_0^T E[lambda_t] dt - lambda_bar T) / sqrt(T).
Vector centering_remainder(const HawkesModel& model, double T);

/// E[exp(-scale |G|^2)] for G ~ N(0, sigma), i.e. det(I + 2 scale sigma)^{-1/2}.
/// The default scale gives the test function exp(-|x|^2 / 4).
double gaussian_test_expectation(const Matrix& sigma, double scale = 0.25);

}  // namespace hawkes_lab
