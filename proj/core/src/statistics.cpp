#include "hawkes_lab/statistics.hpp"

#include <cmath>
#include <limits>

#include "hawkes_lab/error.hpp"
#include "hawkes_lab/linalg.hpp"
#include "hawkes_lab/moments.hpp"

namespace hawkes_lab {

CltEvaluator::CltEvaluator(HawkesModel model, double T, std::vector<double> v_grid)
    : model_(std::move(model)), T_(T), v_grid_(std::move(v_grid)) {
  if (!(T_ > 0.0 && std::isfinite(T_))) throw ValidationError("CltEvaluator: T must be positive and finite");
  if (!v_grid_.empty()) (void)multimarginal_covariance(model_, v_grid_);  // validates the grid
  const auto ms = limit_covariances(model_);
  J_ = ms.J;
  lambda_bar_ = ms.lambda_bar;
  m_vinv_ = linalg::inverse(ms.V);
  for (std::size_t i = 0; i < model_.dim(); ++i)
    for (std::size_t j = 0; j < model_.dim(); ++j) m_vinv_(i, j) *= model_.mark_means()[i];
  mean_lambda_T_ = mean_intensity(model_, T_);
  integrated_mean_ = integrated_mean_intensity(model_, T_);
}

CltSample CltEvaluator::operator()(const SimulatedPath& path) const {
  const std::size_t d = model_.dim();
  if (path.L_T.size() != d || path.start_time != 0.0)
    throw ValidationError("compute_clt_sample: path does not belong to this model");
  if (path.horizon != T_) throw ValidationError("compute_clt_sample: path horizon differs from the evaluator's T");

  const auto& m = model_.mark_means();
  const double root_t = std::sqrt(T_);
  CltSample s;
  s.T = T_;
  s.F.resize(d);
  s.Y.resize(d);
  s.Yprime.resize(d);
  Vector gap(d);
  for (std::size_t i = 0; i < d; ++i) {
    s.F[i] = (path.L_T[i] - m[i] * path.int_lambda[i]) / root_t;
    s.Y[i] = (path.L_T[i] - m[i] * integrated_mean_[i]) / root_t;
    s.Yprime[i] = (path.L_T[i] - m[i] * lambda_bar_[i] * T_) / root_t;
    gap[i] = (mean_lambda_T_[i] - path.lambda_T[i]) / root_t;
  }
  s.R = m_vinv_ * std::span<const double>(gap);

  if (!v_grid_.empty()) {
    const std::size_t p = v_grid_.size();
    Vector gamma(p * d);
    for (std::size_t q = 0; q < p; ++q) {
      const double h = v_grid_[q] * T_;
      const auto f = path_functionals(path, model_, h);
      for (std::size_t n = 0; n < d; ++n) gamma[n * p + q] = (f.L[n] - m[n] * f.int_lambda[n]) / std::sqrt(h);
    }
    s.Gamma = std::move(gamma);
  }
  return s;
}

CltSample compute_clt_sample(const SimulatedPath& path, const HawkesModel& model, std::span<const double> v_grid) {
  return CltEvaluator(model, path.horizon, std::vector<double>(v_grid.begin(), v_grid.end()))(path);
}

CovarianceEstimate batch_covariance(std::span<const Vector> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw ValidationError("batch_covariance: need at least two samples");
  const std::size_t k = samples.front().size();
  for (const auto& s : samples)
    if (s.size() != k) throw ValidationError("batch_covariance: samples have inconsistent lengths");

  const double dn = static_cast<double>(n);
  CovarianceEstimate est;
  est.n = n;
  est.mean.assign(k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    KahanSum acc;
    for (const auto& s : samples) acc.add(s[a]);
    est.mean[a] = acc.value() / dn;
  }

  est.covariance = Matrix(k, k);
  est.covariance_se = Matrix(k, k);
  est.mean_se.assign(k, 0.0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      KahanSum second, fourth;
      for (const auto& s : samples) {
        const double prod = (s[a] - est.mean[a]) * (s[b] - est.mean[b]);
        second.add(prod);
        fourth.add(prod * prod);
      }
      const double m2 = second.value() / dn;
      const double m4 = fourth.value() / dn;
      const double cov = second.value() / (dn - 1.0);
      const double se = std::sqrt(std::max(m4 - m2 * m2, 0.0) / dn);
      est.covariance(a, b) = est.covariance(b, a) = cov;
      est.covariance_se(a, b) = est.covariance_se(b, a) = se;
    }
  for (std::size_t a = 0; a < k; ++a) est.mean_se[a] = std::sqrt(est.covariance(a, a) / dn);
  return est;
}

Matrix z_scores(const Matrix& estimate, const Matrix& reference, const Matrix& se) {
  if (estimate.rows() != reference.rows() || estimate.cols() != reference.cols() || se.rows() != estimate.rows() ||
      se.cols() != estimate.cols())
    throw ValidationError("z_scores: shape mismatch");
  Matrix z(estimate.rows(), estimate.cols());
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) {
      const double gap = estimate(i, j) - reference(i, j);
      if (se(i, j) > 0.0)
        z(i, j) = gap / se(i, j);
      else
        z(i, j) = gap == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), gap);
    }
  return z;
}

}  // namespace hawkes_lab
