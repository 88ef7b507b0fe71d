#pragma once

#include <complex>
#include <span>
#include <vector>

#include "hawkes_lab/matrix.hpp"

namespace hawkes_lab::linalg {

/// Eigenvalues of a real square matrix (Householder reduction to upper
/// Hessenberg form followed by Francis double-shift QR). Complex pairs are
/// returned as conjugates. Intended for small matrices (d <= 32).
std::vector<std::complex<double>> eigenvalues(const Matrix& m);

/// max |eigenvalue|.
double spectral_radius(const Matrix& m);

/// e^{t M} by scaling-and-squaring with a degree-13 Taylor polynomial.
/// Throws NumericalError if the result overflows.
Matrix mat_exp(const Matrix& m, double t = 1.0);

/// Inverse by LU with partial pivoting. Throws SingularMatrixError when the
/// matrix is singular or its 1-norm condition number exceeds 1e12.
Matrix inverse(const Matrix& m);

/// Solves m x = b with the same conditioning policy as inverse().
Vector solve(const Matrix& m, std::span<const double> b);

/// 1-norm condition number ||M||_1 ||M^-1||_1 (infinity when singular).
double condition_number(const Matrix& m);

struct CholeskyFactor {
  Matrix lower;
  /// True when at least one pivot was numerically zero (positive
  /// semidefinite but singular input); that column is set to zero.
  bool semidefinite = false;
};

/// Lower-triangular L with L L^T = S. Accepts singular PSD input (zero
/// pivots give zero columns); throws NotPositiveSemidefiniteError otherwise.
CholeskyFactor cholesky(const Matrix& s);

/// Largest singular value via power iteration on M^T M.
double operator_norm(const Matrix& m);

/// log det S for symmetric positive definite S.
double log_det_spd(const Matrix& s);

}  // namespace hawkes_lab::linalg
