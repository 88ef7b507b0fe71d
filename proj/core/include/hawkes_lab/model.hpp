#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "hawkes_lab/matrix.hpp"
#include "hawkes_lab/rng.hpp"

namespace hawkes_lab {

struct MarkMoments {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
};

/// Law of the positive marks (losses) attached to the events of one
/// component. Only families with closed-form moments are supported.
class MarkDistribution {
 public:
  enum class Kind { constant, exponential, gamma };

  static MarkDistribution constant(double value);
  static MarkDistribution exponential(double rate);
  /// Gamma with shape k and rate theta (mean k / theta).
  static MarkDistribution gamma(double shape, double rate);

  Kind kind() const noexcept { return kind_; }
  /// Constant value, or the rate for the exponential and gamma families.
  double rate() const noexcept { return rate_; }
  double value() const noexcept { return rate_; }
  double shape() const noexcept { return shape_; }

  MarkMoments moments() const noexcept;
  double sample(RandomStream& rng) const noexcept;
  std::string describe() const;

  friend bool operator==(const MarkDistribution&, const MarkDistribution&) = default;

 private:
  MarkDistribution(Kind kind, double rate, double shape) : kind_(kind), rate_(rate), shape_(shape) {}

  Kind kind_;
  double rate_;
  double shape_;
};

/// First three raw moments of a mark law.
inline MarkMoments mark_moments(const MarkDistribution& dist) noexcept { return dist.moments(); }

/// Multivariate compound Hawkes process with exponential kernels
///   lambda^j_t = mu^j + sum_k int_{[0,t)} alpha_jk e^{-beta_j (t-s)} dL^k_s.
/// Immutable once constructed; the constructor checks shapes and signs.
class HawkesModel {
 public:
  HawkesModel(Vector mu, Matrix alpha, Vector beta, std::vector<MarkDistribution> marks);

  std::size_t dim() const noexcept { return mu_.size(); }
  const Vector& mu() const noexcept { return mu_; }
  const Matrix& alpha() const noexcept { return alpha_; }
  const Vector& beta() const noexcept { return beta_; }
  const std::vector<MarkDistribution>& marks() const noexcept { return marks_; }

  /// m^j = E[Y^j].
  const Vector& mark_means() const noexcept { return m1_; }
  /// E[(Y^j)^2].
  const Vector& mark_second_moments() const noexcept { return m2_; }

  friend bool operator==(const HawkesModel&, const HawkesModel&) = default;

 private:
  Vector mu_;
  Matrix alpha_;
  Vector beta_;
  std::vector<MarkDistribution> marks_;
  Vector m1_;
  Vector m2_;
};

/// V = B - A diag(m).
Matrix drift_matrix(const HawkesModel& model);

/// B^-1 A diag(m), whose spectral radius is the branching ratio.
Matrix branching_matrix(const HawkesModel& model);

struct StabilityReport {
  double rho_sub = 0.0;
  std::vector<std::complex<double>> eigs_V;
  bool assumption1_ok = false;  // rho(B^-1 A diag(m)) < 1
  bool assumption2_ok = false;  // every eigenvalue of V has positive real part
  bool assumption3_ok = false;  // finite third mark moments
  std::vector<std::string> warnings;

  bool all_ok() const noexcept { return assumption1_ok && assumption2_ok && assumption3_ok; }
};

StabilityReport validate(const HawkesModel& model);

/// Throws AssumptionError naming the failed assumptions.
void require_stable(const HawkesModel& model);

}  // namespace hawkes_lab
