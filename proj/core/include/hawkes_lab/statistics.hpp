#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hawkes_lab/matrix.hpp"
#include "hawkes_lab/model.hpp"
#include "hawkes_lab/simulator.hpp"

namespace hawkes_lab {

/// Normalised functionals of one path at horizon T.
struct CltSample {
  double T = 0.0;
  Vector F;       // (L_T - diag(m) int_0^T lambda_t dt) / sqrt(T)
  Vector Y;       // (L_T - diag(m) int_0^T E[lambda_t] dt) / sqrt(T)
  Vector Yprime;  // (L_T - diag(m) lambda_bar T) / sqrt(T)
  Vector R;       // diag(m) V^-1 (E[lambda_T] - lambda_T) / sqrt(T); Y = J F + R
  std::optional<Vector> Gamma;  // F^n_{v_q T}, component-major
};

/// Precomputes every deterministic ingredient for one (model, T, v grid) so
/// that evaluating many paths only touches the path itself.
class CltEvaluator {
 public:
  CltEvaluator(HawkesModel model, double T, std::vector<double> v_grid = {});

  CltSample operator()(const SimulatedPath& path) const;

  double horizon() const noexcept { return T_; }
  const Matrix& J() const noexcept { return J_; }
  const std::vector<double>& v_grid() const noexcept { return v_grid_; }

 private:
  HawkesModel model_;
  double T_;
  std::vector<double> v_grid_;
  Matrix J_;
  Matrix m_vinv_;  // diag(m) V^-1
  Vector lambda_bar_;
  Vector mean_lambda_T_;
  Vector integrated_mean_;
};

CltSample compute_clt_sample(const SimulatedPath& path, const HawkesModel& model,
                             std::span<const double> v_grid = {});

/// Neumaier-compensated running sum.
class KahanSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct CovarianceEstimate {
  std::size_t n = 0;
  Vector mean;
  Vector mean_se;
  Matrix covariance;     // unbiased
  Matrix covariance_se;  // from the sample fourth moments
};

/// Sample mean / covariance with standard errors, summed in index order.
/// Requires at least two samples of equal length.
CovarianceEstimate batch_covariance(std::span<const Vector> samples);

/// Elementwise (estimate - reference) / se; 0 where both the gap and the
/// standard error vanish.
Matrix z_scores(const Matrix& estimate, const Matrix& reference, const Matrix& se);

}  // namespace hawkes_lab
