#include "hawkes_lab/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hawkes_lab/error.hpp"
#include "hawkes_lab/linalg.hpp"

namespace hawkes_lab {
namespace {

constexpr double kEigenTolerance = 1e-10;
constexpr double kNearCriticalBand = 1e-6;

void require_positive_finite(double v, const char* what) {
  if (!(std::isfinite(v) && v > 0.0))
    throw ValidationError(std::string("MarkDistribution: ") + what + " must be positive and finite");
}

}  // namespace

MarkDistribution MarkDistribution::constant(double value) {
  require_positive_finite(value, "constant value");
  return {Kind::constant, value, 0.0};
}

MarkDistribution MarkDistribution::exponential(double rate) {
  require_positive_finite(rate, "exponential rate");
  return {Kind::exponential, rate, 0.0};
}

MarkDistribution MarkDistribution::gamma(double shape, double rate) {
  require_positive_finite(shape, "gamma shape");
  require_positive_finite(rate, "gamma rate");
  return {Kind::gamma, rate, shape};
}

MarkMoments MarkDistribution::moments() const noexcept {
  switch (kind_) {
    case Kind::constant:
      return {rate_, rate_ * rate_, rate_ * rate_ * rate_};
    case Kind::exponential:
      return {1.0 / rate_, 2.0 / (rate_ * rate_), 6.0 / (rate_ * rate_ * rate_)};
    case Kind::gamma: {
      const double k = shape_;
      return {k / rate_, k * (k + 1.0) / (rate_ * rate_),
              k * (k + 1.0) * (k + 2.0) / (rate_ * rate_ * rate_)};
    }
  }
  return {};
}

double MarkDistribution::sample(RandomStream& rng) const noexcept {
  switch (kind_) {
    case Kind::constant:
      return rate_;
    case Kind::exponential:
      return rng.exponential() / rate_;
    case Kind::gamma:
      for (;;) {
        const double y = rng.gamma(shape_) / rate_;
        if (y > 0.0) return y;
      }
  }
  return rate_;
}

std::string MarkDistribution::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::constant:
      os << "Constant(" << rate_ << ")";
      break;
    case Kind::exponential:
      os << "Exponential(" << rate_ << ")";
      break;
    case Kind::gamma:
      os << "Gamma(" << shape_ << ", " << rate_ << ")";
      break;
  }
  return os.str();
}

HawkesModel::HawkesModel(Vector mu, Matrix alpha, Vector beta, std::vector<MarkDistribution> marks)
    : mu_(std::move(mu)), alpha_(std::move(alpha)), beta_(std::move(beta)), marks_(std::move(marks)) {
  const std::size_t d = mu_.size();
  if (d == 0) throw ValidationError("HawkesModel: dimension must be positive");
  if (alpha_.rows() != d || alpha_.cols() != d) {
    std::ostringstream os;
    os << "HawkesModel: alpha is " << alpha_.rows() << "x" << alpha_.cols() << ", expected " << d << "x" << d;
    throw ValidationError(os.str());
  }
  if (beta_.size() != d)
    throw ValidationError("HawkesModel: beta has length " + std::to_string(beta_.size()) + ", expected " +
                          std::to_string(d));
  if (marks_.size() != d)
    throw ValidationError("HawkesModel: marks has length " + std::to_string(marks_.size()) + ", expected " +
                          std::to_string(d));
  for (std::size_t i = 0; i < d; ++i) {
    if (!(std::isfinite(mu_[i]) && mu_[i] >= 0.0))
      throw ValidationError("HawkesModel: mu[" + std::to_string(i) + "] must be finite and >= 0");
    if (!(std::isfinite(beta_[i]) && beta_[i] > 0.0))
      throw ValidationError("HawkesModel: beta[" + std::to_string(i) + "] must be finite and > 0");
    for (std::size_t j = 0; j < d; ++j)
      if (!(std::isfinite(alpha_(i, j)) && alpha_(i, j) >= 0.0))
        throw ValidationError("HawkesModel: alpha(" + std::to_string(i) + "," + std::to_string(j) +
                              ") must be finite and >= 0");
  }
  m1_.resize(d);
  m2_.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto mom = marks_[i].moments();
    m1_[i] = mom.m1;
    m2_[i] = mom.m2;
  }
}

Matrix drift_matrix(const HawkesModel& model) {
  const std::size_t d = model.dim();
  Matrix v(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      v(i, j) = (i == j ? model.beta()[i] : 0.0) - model.alpha()(i, j) * model.mark_means()[j];
  return v;
}

Matrix branching_matrix(const HawkesModel& model) {
  const std::size_t d = model.dim();
  Matrix k(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) k(i, j) = model.alpha()(i, j) * model.mark_means()[j] / model.beta()[i];
  return k;
}

StabilityReport validate(const HawkesModel& model) {
  StabilityReport report;
  report.rho_sub = linalg::spectral_radius(branching_matrix(model));
  report.eigs_V = linalg::eigenvalues(drift_matrix(model));
  std::sort(report.eigs_V.begin(), report.eigs_V.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  report.assumption1_ok = report.rho_sub < 1.0;
  report.assumption2_ok = std::all_of(report.eigs_V.begin(), report.eigs_V.end(),
                                      [](const auto& ev) { return ev.real() > kEigenTolerance; });
  // Constant, exponential and gamma marks have moments of every order.
  report.assumption3_ok = true;

  if (std::abs(report.rho_sub - 1.0) < kNearCriticalBand) {
    std::ostringstream os;
    os << "branching ratio " << report.rho_sub << " is within " << kNearCriticalBand << " of criticality";
    report.warnings.push_back(os.str());
  }
  const bool complex_spectrum = std::any_of(report.eigs_V.begin(), report.eigs_V.end(), [](const auto& ev) {
    return std::abs(ev.imag()) > kEigenTolerance * std::max(1.0, std::abs(ev));
  });
  if (complex_spectrum)
    report.warnings.emplace_back("V has complex eigenvalues; stability checked on their real parts");
  if (std::all_of(model.mu().begin(), model.mu().end(), [](double m) { return m == 0.0; }))
    report.warnings.emplace_back("mu is identically zero: the process has no events");
  return report;
}

void require_stable(const HawkesModel& model) {
  const auto report = validate(model);
  if (report.all_ok()) return;
  std::ostringstream os;
  os << "model fails stability assumptions:";
  if (!report.assumption1_ok) os << " branching ratio " << report.rho_sub << " >= 1;";
  if (!report.assumption2_ok) os << " V has an eigenvalue with non-positive real part;";
  if (!report.assumption3_ok) os << " mark law lacks a finite third moment;";
  throw AssumptionError(os.str());
}

}  // namespace hawkes_lab
