#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "nhssh/errors.hpp"

namespace nhssh {

using cplx = std::complex<double>;

/// Chebyshev polynomial of the second kind via U_{n+1} = 2x U_n - U_{n-1},
/// extended downward to U_{-1} = 0, U_{-2} = -1.
template <class T>
T chebyshev_U(int n, T x) {
  if (n < -2) throw Error(Errc::InvalidIndex, "U_n defined for n >= -2");
  if (n == -2) return T(-1);
  if (n == -1) return T(0);
  T a(0), b(1);  // U_{-1}, U_0
  for (int k = 0; k < n; ++k) {
    T c = T(2) * x * b - a;
    a = b;
    b = c;
  }
  return b;
}

/// Chebyshev polynomial of the first kind; T_{-n} = T_n.
template <class T>
T chebyshev_T(int n, T x) {
  n = std::abs(n);
  if (n == 0) return T(1);
  T a(1), b = x;
  for (int k = 1; k < n; ++k) {
    T c = T(2) * x * b - a;
    a = b;
    b = c;
  }
  return b;
}

/// Polynomial in the shifted/scaled variable t = (x - center) / scale,
/// ascending coefficients.  The shift keeps assembled characteristic
/// polynomials well scaled; center = 0, scale = 1 is the plain monomial form.
struct Poly {
  std::vector<cplx> coefficients;
  cplx center = 0.0;
  double scale = 1.0;

  double max_abs() const {
    double m = 0.0;
    for (auto c : coefficients) m = std::max(m, std::abs(c));
    return m;
  }
  /// Degree after trimming coefficients below rel * max|coef|.
  int degree(double rel = 1e-12) const {
    const double thr = rel * max_abs();
    for (int k = static_cast<int>(coefficients.size()) - 1; k >= 0; --k)
      if (std::abs(coefficients[k]) > thr) return k;
    return -1;
  }
  Poly trimmed(double rel = 1e-12) const {
    Poly p = *this;
    p.coefficients.resize(static_cast<std::size_t>(std::max(degree(rel), 0) + 1));
    return p;
  }
  cplx operator()(cplx x) const {
    const cplx t = (x - center) / scale;
    cplx s = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) s = s * t + *it;
    return s;
  }
};

/// Monomial expansion of U_n (exact small integers up to moderate n).
inline Poly chebyshev_U_poly(int n) {
  if (n < -2) throw Error(Errc::InvalidIndex, "U_n defined for n >= -2");
  if (n == -2) return Poly{{-1.0}};
  if (n == -1) return Poly{{0.0}};
  std::vector<double> a{0.0}, b{1.0};
  for (int k = 0; k < n; ++k) {
    std::vector<double> c(b.size() + 1, 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) c[i + 1] += 2.0 * b[i];
    for (std::size_t i = 0; i < a.size(); ++i) c[i] -= a[i];
    a = std::move(b);
    b = std::move(c);
  }
  Poly p;
  p.coefficients.assign(b.begin(), b.end());
  return p;
}

/// Lexicographic "greater": Re first, then Im.
inline bool lex_greater(cplx a, cplx b) {
  return a.real() > b.real() || (a.real() == b.real() && a.imag() > b.imag());
}

namespace detail {
// Parlett-Reinsch balancing by powers of two (a diagonal similarity, so the
// eigenvalues are untouched).  Returns D with A_out = D^{-1} A_in D.
inline Eigen::VectorXd balance(Eigen::MatrixXcd& A) {
  const Eigen::Index n = A.rows();
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  const double radix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(A(j, i));
        r += std::abs(A(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        d(i) *= f;
        A.row(i) /= f;
        A.col(i) *= f;
      }
    }
  }
  return d;
}

inline std::vector<cplx> eigenvalues_of(Eigen::MatrixXcd A) {
  balance(A);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
  if (es.info() != Eigen::Success)
    throw Error(Errc::SolverError, "companion eigenvalue iteration did not converge");
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}
}  // namespace detail

/// Roots of a Poly via the eigenvalues of its balanced companion matrix.
inline std::vector<cplx> companion_roots(const Poly& p, double trim_rel = 1e-12) {
  const int n = p.degree(trim_rel);
  if (n < 1) return {};
  // First row holds -c_{n-1}/c_n ... -c_0/c_n, ones on the subdiagonal.
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  const cplx lead = p.coefficients[n];
  for (int k = 0; k < n; ++k) C(0, k) = -p.coefficients[n - 1 - k] / lead;
  for (int k = 1; k < n; ++k) C(k, k - 1) = 1.0;
  auto t = detail::eigenvalues_of(C);
  for (auto& z : t) z = p.center + p.scale * z;
  return t;
}

/// Coefficients of the Chebyshev-T interpolant of f on [a, b] through n+1
/// first-kind Chebyshev points.
inline std::vector<cplx> chebyshev_interpolate(const std::function<cplx(double)>& f, int n,
                                               double a, double b) {
  const int m = n + 1;
  std::vector<cplx> vals(m);
  std::vector<double> th(m);
  for (int j = 0; j < m; ++j) {
    th[j] = std::numbers::pi * (j + 0.5) / m;
    vals[j] = f(0.5 * (a + b) + 0.5 * (b - a) * std::cos(th[j]));
  }
  std::vector<cplx> c(m, 0.0);
  for (int k = 0; k < m; ++k) {
    cplx s = 0.0;
    for (int j = 0; j < m; ++j) s += vals[j] * std::cos(k * th[j]);
    c[k] = s * (2.0 / m);
  }
  c[0] *= 0.5;
  return c;
}

/// Roots of sum_k c_k T_k(t), t in [-1, 1] mapped to [a, b], via the
/// balanced colleague matrix.
inline std::vector<cplx> colleague_roots(std::vector<cplx> c, double a, double b,
                                         double trim_rel = 1e-13) {
  double m = 0.0;
  for (auto x : c) m = std::max(m, std::abs(x));
  while (c.size() > 1 && std::abs(c.back()) <= trim_rel * m) c.pop_back();
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1) return {};
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  if (n == 1) {
    A(0, 0) = -c[0] / c[1];
  } else {
    A(0, 1) = 1.0;
    for (int k = 1; k < n - 1; ++k) {
      A(k, k - 1) = 0.5;
      A(k, k + 1) = 0.5;
    }
    A(n - 1, n - 2) = 0.5;
    for (int k = 0; k < n; ++k) A(n - 1, k) -= c[k] / (2.0 * c[n]);
  }
  auto t = detail::eigenvalues_of(A);
  for (auto& z : t) z = 0.5 * (a + b) + 0.5 * (b - a) * z;
  return t;
}

/// Coefficients (in t = (x - center)/radius) of the polynomial through f
/// sampled at m equispaced points on |x - center| = radius.  The nodes are
/// rotated by half a step so none lands on the real axis.
inline Poly circle_interpolate(const std::function<cplx(cplx)>& f, int m, cplx center,
                               double radius) {
  std::vector<cplx> vals(m);
  std::vector<cplx> w(m);
  for (int j = 0; j < m; ++j) {
    w[j] = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / m);
    vals[j] = f(center + radius * w[j]);
  }
  Poly p;
  p.center = center;
  p.scale = radius;
  p.coefficients.resize(m);
  for (int k = 0; k < m; ++k) {
    cplx s = 0.0;
    for (int j = 0; j < m; ++j) s += vals[j] * std::pow(std::conj(w[j]), k);
    p.coefficients[k] = s / static_cast<double>(m);
  }
  return p;
}

/// Simultaneous Aberth-Ehrlich refinement of all roots of f (analytic, with
/// as many zeros as seeds).  The derivative is a central difference; the
/// fixed point is still an exact zero of f.
inline std::vector<cplx> aberth_refine(const std::function<cplx(cplx)>& f,
                                       std::vector<cplx> z, int max_iter = 200,
                                       double tol = 1e-14) {
  const std::size_t n = z.size();
  for (int it = 0; it < max_iter; ++it) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(z[i]));
      const cplx fz = f(z[i]);
      if (fz == 0.0) continue;
      const cplx d = (f(z[i] + h) - f(z[i] - h)) / (2.0 * h);
      const cplx ratio = fz / d;
      cplx s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        if (k != i) s += 1.0 / (z[i] - z[k]);
      const cplx step = ratio / (1.0 - ratio * s);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[i] -= step;
      worst = std::max(worst, std::abs(step) / std::max(1.0, std::abs(z[i])));
    }
    if (worst < tol) break;
  }
  return z;
}

}  // namespace nhssh
