#include "hawkes_lab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hawkes_lab/error.hpp"

namespace hawkes_lab::linalg {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kMaxCondition = 1e12;

void require_square(const Matrix& m, const char* who) {
  if (!m.is_square() || m.empty())
    throw ValidationError(std::string(who) + ": matrix must be square and non-empty");
}

// Householder similarity reduction to upper Hessenberg form, in place.
void reduce_to_hessenberg(Matrix& h) {
  const std::size_t n = h.rows();
  if (n < 3) return;
  std::vector<double> ort(n, 0.0);
  const std::size_t high = n - 1;
  for (std::size_t m = 1; m < high; ++m) {
    double scale = 0.0;
    for (std::size_t i = m; i <= high; ++i) scale += std::abs(h(i, m - 1));
    if (scale == 0.0) continue;

    double sum = 0.0;
    for (std::size_t i = high + 1; i-- > m;) {
      ort[i] = h(i, m - 1) / scale;
      sum += ort[i] * ort[i];
    }
    double g = std::sqrt(sum);
    if (ort[m] > 0) g = -g;
    sum -= ort[m] * g;
    ort[m] -= g;

    for (std::size_t j = m; j < n; ++j) {
      double f = 0.0;
      for (std::size_t i = high + 1; i-- > m;) f += ort[i] * h(i, j);
      f /= sum;
      for (std::size_t i = m; i <= high; ++i) h(i, j) -= f * ort[i];
    }
    for (std::size_t i = 0; i <= high; ++i) {
      double f = 0.0;
      for (std::size_t j = high + 1; j-- > m;) f += ort[j] * h(i, j);
      f /= sum;
      for (std::size_t j = m; j <= high; ++j) h(i, j) -= f * ort[j];
    }
    ort[m] *= scale;
    h(m, m - 1) = scale * g;
  }
}

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
std::vector<std::complex<double>> hessenberg_qr(Matrix& h) {
  const int nn = static_cast<int>(h.rows());
  std::vector<double> re(nn, 0.0), im(nn, 0.0);
  auto H = [&h](int i, int j) -> double& {
    return h(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };

  double norm = 0.0;
  for (int i = 0; i < nn; ++i)
    for (int j = std::max(i - 1, 0); j < nn; ++j) norm += std::abs(H(i, j));

  int n = nn - 1;
  const int low = 0;
  double exshift = 0.0;
  double p = 0, q = 0, r = 0, s = 0, z = 0, w = 0, x = 0, y = 0;
  int iter = 0;
  int total_iter = 0;

  while (n >= low) {
    int l = n;
    while (l > low) {
      s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
      if (s == 0.0) s = norm;
      if (std::abs(H(l, l - 1)) <= kEps * s) break;
      --l;
    }

    if (l == n) {
      re[n] = H(n, n) + exshift;
      im[n] = 0.0;
      --n;
      iter = 0;
    } else if (l == n - 1) {
      w = H(n, n - 1) * H(n - 1, n);
      p = (H(n - 1, n - 1) - H(n, n)) / 2.0;
      q = p * p + w;
      z = std::sqrt(std::abs(q));
      x = H(n, n) + exshift;
      if (q >= 0) {
        z = p >= 0 ? p + z : p - z;
        re[n - 1] = x + z;
        re[n] = z != 0.0 ? x - w / z : x + z;
        im[n - 1] = im[n] = 0.0;
      } else {
        re[n - 1] = re[n] = x + p;
        im[n - 1] = z;
        im[n] = -z;
      }
      n -= 2;
      iter = 0;
    } else {
      x = H(n, n);
      y = 0.0;
      w = 0.0;
      if (l < n) {
        y = H(n - 1, n - 1);
        w = H(n, n - 1) * H(n - 1, n);
      }
      // Exceptional shifts break cycles.
      if (iter == 10) {
        exshift += x;
        for (int i = low; i <= n; ++i) H(i, i) -= x;
        s = std::abs(H(n, n - 1)) + std::abs(H(n - 1, n - 2));
        x = y = 0.75 * s;
        w = -0.4375 * s * s;
      }
      if (iter == 30) {
        s = (y - x) / 2.0;
        s = s * s + w;
        if (s > 0) {
          s = std::sqrt(s);
          if (y < x) s = -s;
          s = x - w / ((y - x) / 2.0 + s);
          for (int i = low; i <= n; ++i) H(i, i) -= s;
          exshift += s;
          x = y = w = 0.964;
        }
      }
      ++iter;
      if (++total_iter > 100 * nn) throw NumericalError("eigenvalues: QR iteration did not converge");

      int m = n - 2;
      while (m >= l) {
        z = H(m, m);
        r = x - z;
        s = y - z;
        p = (r * s - w) / H(m + 1, m) + H(m, m + 1);
        q = H(m + 1, m + 1) - z - r - s;
        r = H(m + 2, m + 1);
        s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        if (std::abs(H(m, m - 1)) * (std::abs(q) + std::abs(r)) <
            kEps * (std::abs(p) * (std::abs(H(m - 1, m - 1)) + std::abs(z) + std::abs(H(m + 1, m + 1)))))
          break;
        --m;
      }
      for (int i = m + 2; i <= n; ++i) {
        H(i, i - 2) = 0.0;
        if (i > m + 2) H(i, i - 3) = 0.0;
      }

      for (int k = m; k <= n - 1; ++k) {
        const bool notlast = k != n - 1;
        if (k != m) {
          p = H(k, k - 1);
          q = H(k + 1, k - 1);
          r = notlast ? H(k + 2, k - 1) : 0.0;
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x == 0.0) continue;
          p /= x;
          q /= x;
          r /= x;
        }
        s = std::sqrt(p * p + q * q + r * r);
        if (p < 0) s = -s;
        if (s != 0) {
          if (k != m)
            H(k, k - 1) = -s * x;
          else if (l != m)
            H(k, k - 1) = -H(k, k - 1);
          p += s;
          x = p / s;
          y = q / s;
          z = r / s;
          q /= p;
          r /= p;
          for (int j = k; j < nn; ++j) {
            p = H(k, j) + q * H(k + 1, j);
            if (notlast) {
              p += r * H(k + 2, j);
              H(k + 2, j) -= p * z;
            }
            H(k, j) -= p * x;
            H(k + 1, j) -= p * y;
          }
          for (int i = 0; i <= std::min(n, k + 3); ++i) {
            p = x * H(i, k) + y * H(i, k + 1);
            if (notlast) {
              p += z * H(i, k + 2);
              H(i, k + 2) -= p * r;
            }
            H(i, k) -= p;
            H(i, k + 1) -= p * q;
          }
        }
      }
    }
  }

  std::vector<std::complex<double>> out(nn);
  for (int i = 0; i < nn; ++i) out[i] = {re[i], im[i]};
  return out;
}

struct LuDecomposition {
  Matrix lu;
  std::vector<std::size_t> perm;
  bool singular = false;
};

LuDecomposition lu_decompose(const Matrix& m) {
  const std::size_t n = m.rows();
  LuDecomposition dec{m, std::vector<std::size_t>(n), false};
  for (std::size_t i = 0; i < n; ++i) dec.perm[i] = i;
  const double scale = std::max(m.max_abs(), std::numeric_limits<double>::min());
  Matrix& a = dec.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) <= kEps * scale * static_cast<double>(n)) {
      dec.singular = true;
      return dec;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(dec.perm[k], dec.perm[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      a(i, k) /= a(k, k);
      const double f = a(i, k);
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return dec;
}

Vector lu_solve(const LuDecomposition& dec, std::span<const double> b) {
  const std::size_t n = dec.lu.rows();
  const Matrix& a = dec.lu;
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[dec.perm[i]];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < i; ++k) x[i] -= a(i, k) * x[k];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) x[i] -= a(i, k) * x[k];
    x[i] /= a(i, i);
  }
  return x;
}

Matrix lu_inverse(const LuDecomposition& dec) {
  const std::size_t n = dec.lu.rows();
  Matrix inv(n, n);
  Vector e(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    const Vector col = lu_solve(dec, e);
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
  }
  return inv;
}

[[noreturn]] void throw_singular(double cond) {
  throw SingularMatrixError("matrix is singular or ill-conditioned (condition estimate " +
                                std::to_string(cond) + ")",
                            cond);
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
  require_square(m, "eigenvalues");
  if (!m.all_finite()) throw ValidationError("eigenvalues: non-finite entries");
  Matrix h = m;
  reduce_to_hessenberg(h);
  return hessenberg_qr(h);
}

double spectral_radius(const Matrix& m) {
  double best = 0.0;
  for (const auto& ev : eigenvalues(m)) best = std::max(best, std::abs(ev));
  return best;
}

Matrix mat_exp(const Matrix& m, double t) {
  require_square(m, "mat_exp");
  if (!std::isfinite(t)) throw ValidationError("mat_exp: t must be finite");
  const std::size_t n = m.rows();
  Matrix x = m * t;
  const double norm = x.norm1();
  if (!std::isfinite(norm)) throw NumericalError("mat_exp: non-finite input");

  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  if (squarings > 0) x *= std::ldexp(1.0, -squarings);

  const Matrix id = Matrix::identity(n);
  Matrix p = id;
  for (int k = 13; k >= 1; --k) {
    p = x * p;
    p *= 1.0 / k;
    p += id;
  }
  for (int i = 0; i < squarings; ++i) p = p * p;
  if (!p.all_finite()) throw NumericalError("mat_exp: result overflowed");
  return p;
}

double condition_number(const Matrix& m) {
  require_square(m, "condition_number");
  const auto dec = lu_decompose(m);
  if (dec.singular) return std::numeric_limits<double>::infinity();
  return m.norm1() * lu_inverse(dec).norm1();
}

Matrix inverse(const Matrix& m) {
  require_square(m, "inverse");
  const auto dec = lu_decompose(m);
  if (dec.singular) throw_singular(std::numeric_limits<double>::infinity());
  Matrix inv = lu_inverse(dec);
  const double cond = m.norm1() * inv.norm1();
  if (!(cond < kMaxCondition)) throw_singular(cond);
  return inv;
}

Vector solve(const Matrix& m, std::span<const double> b) {
  require_square(m, "solve");
  if (b.size() != m.rows()) throw ValidationError("solve: right-hand side has wrong length");
  const auto dec = lu_decompose(m);
  if (dec.singular) throw_singular(std::numeric_limits<double>::infinity());
  const double cond = m.norm1() * lu_inverse(dec).norm1();
  if (!(cond < kMaxCondition)) throw_singular(cond);
  return lu_solve(dec, b);
}

CholeskyFactor cholesky(const Matrix& s) {
  require_square(s, "cholesky");
  const std::size_t n = s.rows();
  const double scale = std::max(1.0, s.max_abs());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(s(i, j) - s(j, i)) > 1e-10 * scale)
        throw ValidationError("cholesky: matrix is not symmetric");

  const double zero_tol = 1e-12 * scale;
  CholeskyFactor out{Matrix(n, n), false};
  Matrix& l = out.lower;
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = s(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (pivot < -zero_tol)
      throw NotPositiveSemidefiniteError("cholesky: matrix is not positive semidefinite (pivot " +
                                         std::to_string(pivot) + ")");
    if (pivot <= zero_tol) {
      // Zero pivot: the remainder of the column must vanish for PSD input.
      out.semidefinite = true;
      for (std::size_t i = j + 1; i < n; ++i) {
        double v = s(i, j);
        for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
        if (std::abs(v) > 1e-10 * scale)
          throw NotPositiveSemidefiniteError("cholesky: matrix is not positive semidefinite");
      }
      continue;
    }
    const double diag = std::sqrt(pivot);
    l(j, j) = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / diag;
    }
  }
  return out;
}

double operator_norm(const Matrix& m) {
  if (m.empty()) return 0.0;
  const double scale = m.max_abs();
  if (scale == 0.0) return 0.0;
  const Matrix mt = m.transpose();
  const Matrix gram = mt * m;
  const std::size_t n = gram.rows();

  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 1e-3 * static_cast<double>(i + 1);
  auto normalize = [](Vector& x) {
    double s = 0.0;
    for (double e : x) s += e * e;
    s = std::sqrt(s);
    if (s > 0.0)
      for (double& e : x) e /= s;
    return s;
  };
  normalize(v);

  double rayleigh = 0.0;
  for (int it = 0; it < 100000; ++it) {
    Vector w = gram * v;
    double next = 0.0;
    for (std::size_t i = 0; i < n; ++i) next += v[i] * w[i];
    if (normalize(w) == 0.0) return 0.0;
    v = std::move(w);
    if (it > 0 && std::abs(next - rayleigh) <= 1e-16 * std::abs(next)) {
      rayleigh = next;
      break;
    }
    rayleigh = next;
  }
  return std::sqrt(std::max(rayleigh, 0.0));
}

double log_det_spd(const Matrix& s) {
  const auto factor = cholesky(s);
  if (factor.semidefinite) throw NotPositiveSemidefiniteError("log_det_spd: matrix is singular");
  double acc = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) acc += std::log(factor.lower(i, i));
  return 2.0 * acc;
}

}  // namespace hawkes_lab::linalg
