#include "hawkes_lab/moments.hpp"

#include <cmath>

#include "hawkes_lab/error.hpp"
#include "hawkes_lab/linalg.hpp"

namespace hawkes_lab {
namespace {

Vector b_mu(const HawkesModel& model) {
  Vector out(model.dim());
  for (std::size_t i = 0; i < model.dim(); ++i) out[i] = model.beta()[i] * model.mu()[i];
  return out;
}

// (I - V^-1 B) mu = mu - lambda_bar.
Vector transient_direction(const HawkesModel& model, const Vector& lambda_bar) {
  Vector out(model.dim());
  for (std::size_t i = 0; i < model.dim(); ++i) out[i] = model.mu()[i] - lambda_bar[i];
  return out;
}

}  // namespace

Vector stationary_intensity(const HawkesModel& model) {
  require_stable(model);
  return linalg::solve(drift_matrix(model), b_mu(model));
}

Vector mean_intensity(const HawkesModel& model, double t) {
  if (!(t >= 0.0 && std::isfinite(t))) throw ValidationError("mean_intensity: t must be finite and >= 0");
  const Vector lambda_bar = stationary_intensity(model);
  const Vector transient =
      linalg::mat_exp(drift_matrix(model), -t) * std::span<const double>(transient_direction(model, lambda_bar));
  Vector out(model.dim());
  for (std::size_t i = 0; i < model.dim(); ++i) out[i] = lambda_bar[i] + transient[i];
  return out;
}

Vector integrated_mean_intensity(const HawkesModel& model, double T) {
  if (!(T >= 0.0 && std::isfinite(T)))
    throw ValidationError("integrated_mean_intensity: T must be finite and >= 0");
  const std::size_t d = model.dim();
  const Matrix v = drift_matrix(model);
  const Vector lambda_bar = stationary_intensity(model);
  const Vector w = linalg::solve(v, transient_direction(model, lambda_bar));
  const Matrix decay = linalg::mat_exp(v, -T);
  const Vector decayed = decay * std::span<const double>(w);
  Vector out(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = lambda_bar[i] * T + (w[i] - decayed[i]);
  return out;
}

MomentSet limit_covariances(const HawkesModel& model) {
  require_stable(model);
  const std::size_t d = model.dim();
  MomentSet ms;
  ms.V = drift_matrix(model);
  ms.lambda_bar = linalg::solve(ms.V, b_mu(model));

  Matrix resolvent = Matrix::identity(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      resolvent(i, j) -= model.mark_means()[i] * model.alpha()(i, j) / model.beta()[i];
  ms.J = linalg::inverse(resolvent);

  ms.C = Matrix(d, d);
  for (std::size_t i = 0; i < d; ++i) ms.C(i, i) = model.mark_second_moments()[i] * ms.lambda_bar[i];

  ms.Ctilde = ms.J * ms.C * ms.J.transpose();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double sym = 0.5 * (ms.Ctilde(i, j) + ms.Ctilde(j, i));
      ms.Ctilde(i, j) = ms.Ctilde(j, i) = sym;
    }
  return ms;
}

Matrix multimarginal_covariance(const HawkesModel& model, std::span<const double> v) {
  if (v.empty()) throw ValidationError("multimarginal_covariance: empty v grid");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0 && v[i] <= 1.0)) throw ValidationError("multimarginal_covariance: v must lie in (0, 1]");
    if (i > 0 && !(v[i] > v[i - 1]))
      throw ValidationError("multimarginal_covariance: v must be strictly increasing");
  }
  const std::size_t d = model.dim();
  const std::size_t p = v.size();
  const Vector lambda_bar = stationary_intensity(model);
  Matrix out(p * d, p * d);
  for (std::size_t n = 0; n < d; ++n) {
    const double level = model.mark_second_moments()[n] * lambda_bar[n];
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i; j < p; ++j) {
        const double entry = i == j ? level : level * std::sqrt(v[i] / v[j]);
        out(n * p + i, n * p + j) = entry;
        out(n * p + j, n * p + i) = entry;
      }
  }
  return out;
}

Vector centering_remainder(const HawkesModel& model, double T) {
  if (!(T > 0.0)) throw ValidationError("centering_remainder: T must be positive");
  const Vector integrated = integrated_mean_intensity(model, T);
  const Vector lambda_bar = stationary_intensity(model);
  Vector out(model.dim());
  for (std::size_t i = 0; i < model.dim(); ++i)
    out[i] = model.mark_means()[i] * (integrated[i] - lambda_bar[i] * T) / std::sqrt(T);
  return out;
}

double gaussian_test_expectation(const Matrix& sigma, double scale) {
  if (!sigma.is_square()) throw ValidationError("gaussian_test_expectation: sigma must be square");
  if (!(scale > 0.0)) throw ValidationError("gaussian_test_expectation: scale must be positive");
  // Rejects indefinite input before forming I + 2 scale sigma.
  (void)linalg::cholesky(sigma);
  Matrix shifted = sigma * (2.0 * scale);
  for (std::size_t i = 0; i < sigma.rows(); ++i) shifted(i, i) += 1.0;
  return std::exp(-0.5 * linalg::log_det_spd(shifted));
}

}  // namespace hawkes_lab
