#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <gtest/gtest.h>

#include "hawkes_lab/error.hpp"
#include "hawkes_lab/linalg.hpp"
#include "hawkes_lab/matrix.hpp"
#include "hawkes_lab/model.hpp"
#include "test_support.hpp"

using namespace hawkes_lab;
using namespace hawkes_lab::linalg;

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

Matrix random_matrix(std::mt19937_64& gen, std::size_t n, double norm1) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = u(gen);
  return m * (norm1 / m.norm1());
}

// Truncated Taylor series in long double, summed until the terms vanish.
Matrix series_exp(const Matrix& m) {
  const std::size_t n = m.rows();
  std::vector<long double> sum(n * n, 0.0L), term(n * n, 0.0L), next(n * n);
  for (std::size_t i = 0; i < n; ++i) sum[i * n + i] = term[i * n + i] = 1.0L;
  for (int k = 1; k < 200; ++k) {
    long double biggest = 0.0L;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        long double s = 0.0L;
        for (std::size_t l = 0; l < n; ++l) s += term[i * n + l] * static_cast<long double>(m(l, j));
        next[i * n + j] = s / k;
        biggest = std::max(biggest, std::abs(next[i * n + j]));
      }
    term.swap(next);
    for (std::size_t i = 0; i < n * n; ++i) sum[i] += term[i];
    if (biggest < 1e-30L) break;
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n * n; ++i) out.data()[i] = static_cast<double>(sum[i]);
  return out;
}

std::vector<double> sorted_moduli(const std::vector<std::complex<double>>& z) {
  std::vector<double> r;
  for (auto v : z) r.push_back(std::abs(v));
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace

TEST(SpectralRadius, SymmetricTwoByTwo) {
  EXPECT_NEAR(spectral_radius(Matrix{{0.5, 2.0}, {2.0, 0.5}}), 2.5, 1e-10);
}

TEST(SpectralRadius, IdentityAndZero) {
  EXPECT_NEAR(spectral_radius(Matrix::identity(5)), 1.0, 1e-12);
  EXPECT_EQ(spectral_radius(Matrix(4, 4, 0.0)), 0.0);
}

TEST(SpectralRadius, NonSquareThrows) { EXPECT_THROW(spectral_radius(Matrix(2, 3, 1.0)), ValidationError); }

TEST(Eigenvalues, RotationHasComplexPair) {
  const auto ev = eigenvalues(Matrix{{0.0, -1.0}, {1.0, 0.0}});
  ASSERT_EQ(ev.size(), 2u);
  for (auto z : ev) {
    EXPECT_NEAR(z.real(), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(z.imag()), 1.0, 1e-12);
  }
}

TEST(Eigenvalues, MatchEigenOnRandomMatrices) {
  std::mt19937_64 gen(7);
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 16u, 32u}) {
    for (int rep = 0; rep < 10; ++rep) {
      const Matrix m = random_matrix(gen, n, 3.0 * n);
      const auto ours = sorted_moduli(eigenvalues(m));
      Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(m), false);
      std::vector<std::complex<double>> ref(es.eigenvalues().data(), es.eigenvalues().data() + n);
      const auto theirs = sorted_moduli(ref);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ours[i], theirs[i], 1e-9 * (1.0 + theirs[i])) << n;
      double sum = 0.0, trace = 0.0;
      for (auto z : eigenvalues(m)) sum += z.real();
      for (std::size_t i = 0; i < n; ++i) trace += m(i, i);
      EXPECT_NEAR(sum, trace, 1e-9 * (1.0 + std::abs(trace)));
    }
  }
}

TEST(MatExp, ZeroGivesIdentity) { EXPECT_EQ(mat_exp(Matrix(3, 3, 0.0)), Matrix::identity(3)); }

TEST(MatExp, Diagonal) {
  const Matrix e = mat_exp(Matrix{{1.5, 0.0}, {0.0, -2.0}});
  EXPECT_NEAR(e(0, 0), std::exp(1.5), 1e-12 * std::exp(1.5));
  EXPECT_NEAR(e(1, 1), std::exp(-2.0), 1e-15);
  EXPECT_EQ(e(0, 1), 0.0);
  EXPECT_EQ(e(1, 0), 0.0);
}

TEST(MatExp, Nilpotent) {
  const Matrix e = mat_exp(Matrix{{0.0, 1.0}, {0.0, 0.0}});
  EXPECT_LE(max_abs_diff(e, Matrix{{1.0, 1.0}, {0.0, 1.0}}), 1e-15);
}

TEST(MatExp, TimeArgumentScales) {
  const Matrix m{{-1.0, 0.3}, {0.2, -2.0}};
  EXPECT_LE(max_abs_diff(mat_exp(m, 2.5), mat_exp(m * 2.5)), 1e-15);
}

TEST(MatExp, AgreesWithSeriesOnRandomFourByFour) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> norm(0.0, 5.0);
  for (int rep = 0; rep < 200; ++rep) {
    const Matrix m = random_matrix(gen, 4, norm(gen));
    EXPECT_LE(max_abs_diff(mat_exp(m), series_exp(m)), 1e-10);
  }
}

TEST(MatExp, DecayingPropagatorsAbsoluteError) {
  // e^{-Vt} for stable drifts, where absolute accuracy is what matters.
  const Matrix V = drift_matrix(fixtures::fig1_model());
  for (double t : {0.01, 0.5, 1.0, 3.0, 10.0, 18.0}) {
    const Eigen::MatrixXd ref = (to_eigen(V) * -t).exp();
    const Matrix ours = mat_exp(V, -t);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(ours(i, j), ref(i, j), 1e-12) << t;
  }
}

TEST(MatExp, LargeNormRelativeToEigen) {
  std::mt19937_64 gen(13);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix m = random_matrix(gen, 3, 40.0);
    const Eigen::MatrixXd ref = to_eigen(m).exp();
    const Matrix ours = mat_exp(m);
    const double scale = ref.cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(ours(i, j), ref(i, j), 1e-11 * scale);
  }
}

TEST(MatExp, SemigroupProperty) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  for (int rep = 0; rep < 100; ++rep) {
    const Matrix m = random_matrix(gen, 3, 2.0);
    const double s = u(gen), t = u(gen);
    EXPECT_LE(max_abs_diff(mat_exp(m, s + t), mat_exp(m, s) * mat_exp(m, t)), 1e-9);
  }
}

TEST(MatExp, OverflowThrows) { EXPECT_THROW(mat_exp(Matrix{{1000.0}}), NumericalError); }

TEST(Inverse, DriftOfFigureOneModel) {
  const Matrix inv = inverse(Matrix{{3.5, -2.0}, {-2.0, 3.5}});
  const Matrix expected = Matrix{{3.5, 2.0}, {2.0, 3.5}} * (1.0 / 8.25);
  EXPECT_LE(max_abs_diff(inv, expected), 1e-15);
}

TEST(Inverse, IdentityAndSingular) {
  EXPECT_EQ(inverse(Matrix::identity(3)), Matrix::identity(3));
  try {
    inverse(Matrix{{1.0, 1.0}, {1.0, 1.0}});
    FAIL() << "expected SingularMatrixError";
  } catch (const SingularMatrixError& e) {
    EXPECT_GT(e.condition_estimate(), 1e12);
  }
}

TEST(Inverse, RandomWellConditioned) {
  std::mt19937_64 gen(19);
  for (std::size_t n : {2u, 4u, 7u}) {
    for (int rep = 0; rep < 20; ++rep) {
      Matrix m = random_matrix(gen, n, 1.0);
      m += Matrix::identity(n) * 2.0;
      EXPECT_LE(max_abs_diff(m * inverse(m), Matrix::identity(n)), 1e-10);
      const Vector b(n, 1.0);
      const Vector x = solve(m, b);
      EXPECT_LE(max_abs_diff(m * x, b), 1e-12);
    }
  }
}

TEST(ConditionNumber, IdentityIsOne) { EXPECT_NEAR(condition_number(Matrix::identity(4)), 1.0, 1e-15); }

TEST(Cholesky, Diagonal) {
  const auto f = cholesky(Matrix{{4.0, 0.0}, {0.0, 9.0}});
  EXPECT_FALSE(f.semidefinite);
  EXPECT_LE(max_abs_diff(f.lower, Matrix{{2.0, 0.0}, {0.0, 3.0}}), 1e-15);
}

TEST(Cholesky, HandFactorisation) {
  const auto f = cholesky(Matrix{{2.0, 1.0}, {1.0, 2.0}});
  const Matrix expected{{std::sqrt(2.0), 0.0}, {1.0 / std::sqrt(2.0), std::sqrt(1.5)}};
  EXPECT_LE(max_abs_diff(f.lower, expected), 1e-15);
}

TEST(Cholesky, IndefiniteThrows) {
  EXPECT_THROW(cholesky(Matrix{{1.0, 2.0}, {2.0, 1.0}}), NotPositiveSemidefiniteError);
}

TEST(Cholesky, AsymmetricThrows) { EXPECT_THROW(cholesky(Matrix{{1.0, 0.5}, {0.0, 1.0}}), ValidationError); }

TEST(Cholesky, SingularSemidefiniteFlagged) {
  const auto f = cholesky(Matrix{{1.0, 1.0}, {1.0, 1.0}});
  EXPECT_TRUE(f.semidefinite);
  EXPECT_LE(max_abs_diff(f.lower * f.lower.transpose(), Matrix{{1.0, 1.0}, {1.0, 1.0}}), 1e-12);
  const auto z = cholesky(Matrix(3, 3, 0.0));
  EXPECT_TRUE(z.semidefinite);
  EXPECT_EQ(z.lower, Matrix(3, 3, 0.0));
}

TEST(Cholesky, ReconstructsRandomSpd) {
  std::mt19937_64 gen(23);
  for (std::size_t n : {1u, 2u, 5u, 10u}) {
    for (int rep = 0; rep < 20; ++rep) {
      const Matrix g = random_matrix(gen, n, 3.0);
      Matrix s = g * g.transpose();
      s += Matrix::identity(n) * 0.01;
      const auto f = cholesky(s);
      EXPECT_LE(max_abs_diff(f.lower * f.lower.transpose(), s), 1e-10);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) EXPECT_EQ(f.lower(i, j), 0.0);
    }
  }
}

TEST(LogDet, MatchesEigen) {
  const Matrix s{{3.0, 1.0, 0.5}, {1.0, 2.0, 0.2}, {0.5, 0.2, 1.0}};
  EXPECT_NEAR(log_det_spd(s), std::log(to_eigen(s).determinant()), 1e-13);
}

TEST(OperatorNorm, Examples) {
  EXPECT_NEAR(operator_norm(Matrix{{3.0, 0.0}, {0.0, -5.0}}), 5.0, 5e-8);
  EXPECT_EQ(operator_norm(Matrix(3, 2, 0.0)), 0.0);
  EXPECT_NEAR(operator_norm(Matrix{{0.0, 2.0}, {0.0, 0.0}}), 2.0, 2e-8);
}

TEST(OperatorNorm, MatchesSingularValuesAndBoundsSpectralRadius) {
  std::mt19937_64 gen(29);
  for (std::size_t rows : {1u, 2u, 3u, 6u}) {
    for (std::size_t cols : {1u, 2u, 4u}) {
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      Matrix m(rows, cols);
      for (auto& x : m.data()) x = u(gen);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
      const double top = svd.singularValues()(0);
      EXPECT_NEAR(operator_norm(m), top, 1e-8 * top);
      if (rows == cols) {
        EXPECT_LE(spectral_radius(m), operator_norm(m) * (1 + 1e-12));
      }
    }
  }
}

TEST(OperatorNorm, PropagatorDecaysAfterBurnIn) {
  const Matrix V = drift_matrix(fixtures::fig1_model());
  double previous = operator_norm(mat_exp(V, -1.0));
  for (double t = 1.25; t <= 20.0; t += 0.25) {
    const double current = operator_norm(mat_exp(V, -t));
    EXPECT_LT(current, previous) << t;
    previous = current;
  }
  EXPECT_LT(previous, 1e-12);
}
