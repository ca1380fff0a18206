#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nhssh/model.hpp"
#include "nhssh/poly.hpp"

namespace nhssh {

/// Output of every characteristic-equation solver.
struct CharSpectrum {
  std::string method;
  std::vector<cplx> roots;      // u (SSH), u1 (QH), s-bar_12 (general)
  std::vector<cplx> partners;   // u2 for the QH solvers, s-bar_34 for general
  std::vector<cplx> energies;   // +-E per root (+ the exact zero of odd chains)
  std::vector<double> residuals;  // relative Newton correction per root
  Poly assembled;               // cleared polynomial before removing spurious factors
  Poly quotient;                // after removal
  int assembled_degree = -1;
  int quotient_degree = -1;
  std::vector<cplx> discarded;  // candidates dropped as spurious/unphysical (logged)
};

constexpr int kMaxCells = 60;

namespace detail {

inline void check_cells(int N, int min_cells) {
  if (N < min_cells) throw Error(Errc::ChainTooShort, "N too small for this solver");
  if (N > kMaxCells) throw Error(Errc::InvalidRequest, "N above the interpolation cap of 60");
}

inline void push_pm(std::vector<cplx>& out, cplx e2) {
  const cplx e = std::sqrt(e2);
  out.push_back(e);
  out.push_back(-e);
}

// A few guarded Newton steps on a scalar function; a step is kept only if it
// does not increase |f|.
inline cplx newton_polish(const std::function<cplx(cplx)>& f, cplx x, int steps) {
  cplx fx = f(x);
  for (int k = 0; k < steps && fx != 0.0; ++k) {
    const double h = 1e-7 * std::max(1.0, std::abs(x));
    const cplx d = (f(x + h) - f(x - h)) / (2.0 * h);
    if (d == 0.0) break;
    const cplx y = x - fx / d;
    const cplx fy = f(y);
    if (!(std::abs(fy) <= std::abs(fx))) break;
    x = y;
    fx = fy;
  }
  return x;
}

// Relative Newton correction |f/f'| / max(1, |x|): the residual reported
// for every root (a backward error that is insensitive to the huge dynamic
// range of the Chebyshev terms).
inline double newton_residual(const std::function<cplx(cplx)>& f, cplx x) {
  const double h = 1e-6 * std::max(1.0, std::abs(x));
  const cplx fx = f(x);
  if (fx == 0.0) return 0.0;
  const cplx d = (f(x + h) - f(x - h)) / (2.0 * h);
  if (d == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(fx / d) / std::max(1.0, std::abs(x));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SSH:  tb0 U_N(u) + tb1 U_{N-1}(u) = 0,  E^2 = tb0^2 + tb1^2 + 2 tb0 tb1 u
// ---------------------------------------------------------------------------

/// Roots come from the comrade matrix of the U-series (symmetric tridiagonal
/// with the last diagonal entry -tb1/(2 tb0)), then three Newton steps.
inline CharSpectrum ssh_char_spectrum(const EffectiveParams& e, int N) {
  if (e.kind != ModelKind::SSH) throw Error(Errc::NotApplicable, "SSH parameters expected");
  detail::check_cells(N, 1);
  const double t0 = e.t0(), t1 = e.t1();
  CharSpectrum out;
  out.method = "ssh";

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N);
  for (int k = 0; k + 1 < N; ++k) J(k, k + 1) = J(k + 1, k) = 0.5;
  J(N - 1, N - 1) = -t1 / (2.0 * t0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(Errc::SolverError, "comrade matrix eigensolve failed");

  auto p = [&](cplx u) { return t0 * chebyshev_U(N, u) + t1 * chebyshev_U(N - 1, u); };
  const Poly UN = chebyshev_U_poly(N), UN1 = chebyshev_U_poly(N - 1);
  out.assembled.coefficients.assign(N + 1, 0.0);
  for (int k = 0; k <= N; ++k) {
    if (k < static_cast<int>(UN.coefficients.size())) out.assembled.coefficients[k] += t0 * UN.coefficients[k];
    if (k < static_cast<int>(UN1.coefficients.size())) out.assembled.coefficients[k] += t1 * UN1.coefficients[k];
  }
  out.quotient = out.assembled;
  out.assembled_degree = out.quotient_degree = out.assembled.degree();

  for (int k = 0; k < N; ++k) {
    const cplx u = detail::newton_polish(p, cplx(es.eigenvalues()(k), 0.0), 3);
    out.roots.push_back(u);
    out.residuals.push_back(detail::newton_residual(p, u));
    detail::push_pm(out.energies, t0 * t0 + t1 * t1 + 2.0 * t0 * t1 * u);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quasi-Hermitian extended models.
//
// With u2 = C - u1 the characteristic function is even in y = u1 - C/2 and
// has a spurious double zero at y = 0; E^2 is affine in w = y^2.  The
// physical roots are therefore the zeros of G(lambda) = F / w with
// lambda = E^2, a degree-N polynomial with real roots in [0, (sum tb)^2] that
// is found from its Chebyshev interpolant (colleague matrix).
// ---------------------------------------------------------------------------

enum class QhVariant { Type1, Type2, OddType1, OddType2 };

namespace detail {

struct QhProblem {
  int N = 0;
  double C = 0.0;       // u1 + u2
  double lam0 = 0.0;    // E^2 at y = 0
  double slope = 1.0;   // d(E^2)/dw
  double lam_max = 0.0;
  bool odd = false;
  // characteristic function and the sum of |terms| (cancellation scale)
  std::function<std::pair<cplx, double>(cplx, cplx)> F;
};

// {U_{n+2}(a)U_n(b) - 2U_{n+1}(a)U_{n+1}(b) + U_n(a)U_{n+2}(b) + 2}
inline std::pair<cplx, double> qh_block(int n, cplx a, cplx b) {
  const cplx x = chebyshev_U(n + 2, a) * chebyshev_U(n, b);
  const cplx y = 2.0 * chebyshev_U(n + 1, a) * chebyshev_U(n + 1, b);
  const cplx z = chebyshev_U(n, a) * chebyshev_U(n + 2, b);
  return {x - y + z + 2.0, std::abs(x) + std::abs(y) + std::abs(z) + 2.0};
}

inline QhProblem make_qh(const EffectiveParams& e, int N, QhVariant var) {
  QhProblem q;
  q.N = N;
  const double t0 = e.t0(), t1 = e.t1(), t3 = e.t3();
  const double S = t0 * t0 + t1 * t1 + t3 * t3;
  q.lam_max = (t0 + t1 + t3) * (t0 + t1 + t3);
  const bool type1 = var == QhVariant::Type1 || var == QhVariant::OddType1;
  q.odd = var == QhVariant::OddType1 || var == QhVariant::OddType2;
  // Both types share the form: E^2 = S - 2a(1 + 2 u1 u2)
  const double a = type1 ? t0 * t3 : t1 * t3;
  q.C = type1 ? -t1 * (t0 + t3) / (2.0 * t0 * t3) : -t0 * (t1 + t3) / (2.0 * t1 * t3);
  q.lam0 = S - 2.0 * a - a * q.C * q.C;
  q.slope = 4.0 * a;

  switch (var) {
    case QhVariant::Type1:
      q.F = [=](cplx u1, cplx u2) {
        auto P = [&](cplx u) { return t0 * chebyshev_U(N + 2, u) + t1 * chebyshev_U(N + 1, u) + t3 * chebyshev_U(N, u); };
        auto Q = [&](cplx u) { return t0 * chebyshev_U(N, u) + t1 * chebyshev_U(N - 1, u) + t3 * chebyshev_U(N - 2, u); };
        auto R = [&](cplx u) { return t0 * chebyshev_U(N + 1, u) + t1 * chebyshev_U(N, u) + t3 * chebyshev_U(N - 1, u); };
        const cplx x = P(u1) * Q(u2), y = P(u2) * Q(u1), z = 2.0 * R(u1) * R(u2);
        const cplx w = 2.0 * (S - 2.0 * t0 * t3 * (1.0 + 2.0 * u1 * u2));
        return std::pair<cplx, double>{x + y - z + w,
                                       std::abs(x) + std::abs(y) + std::abs(z) + std::abs(w)};
      };
      break;
    case QhVariant::Type2: {
      const double b = t1 / t3 + t3 / t1;
      q.F = [=](cplx u1, cplx u2) {
        auto [f0, s0] = qh_block(N, u1, u2);
        auto [f1, s1] = qh_block(N - 1, u1, u2);
        auto [f2, s2] = qh_block(N - 2, u1, u2);
        return std::pair<cplx, double>{f0 - b * f1 + f2, s0 + b * s1 + s2};
      };
      break;
    }
    case QhVariant::OddType1:
    case QhVariant::OddType2: {
      // the type-2 odd chain is the type-1 equation under (tb0,tb1,tb2) -> (tb1,tb0,tb-1)
      const double b = type1 ? t3 / t0 : t3 / t1;
      q.F = [=](cplx u1, cplx u2) {
        auto [f0, s0] = qh_block(N, u1, u2);
        auto [f1, s1] = qh_block(N - 1, u1, u2);
        return std::pair<cplx, double>{f0 - b * f1, s0 + b * s1};
      };
      break;
    }
  }
  return q;
}

inline CharSpectrum solve_qh(const QhProblem& q, const char* method) {
  const int N = q.N;
  CharSpectrum out;
  out.method = method;
  auto Fy = [&](cplx y) { return q.F(q.C / 2.0 + y, q.C / 2.0 - y).first; };

  // Assembled polynomial in y (degree 2N+2) and the deflated quotient.
  const double wlo = (-0.05 * q.lam_max - q.lam0) / q.slope;
  const double whi = (1.05 * q.lam_max - q.lam0) / q.slope;
  const double rho = 1.1 * std::sqrt(std::max({std::abs(wlo), std::abs(whi), 1e-2}));
  const int deg = 2 * N + 2;
  out.assembled = circle_interpolate(Fy, deg + 9, 0.0, rho);
  const double cmax = out.assembled.max_abs();
  for (int k = deg + 1; k < static_cast<int>(out.assembled.coefficients.size()); ++k)
    if (std::abs(out.assembled.coefficients[k]) > 1e-8 * cmax)
      throw Error(Errc::SolverError, "interpolation consistency check failed (degree > 2N+2)");
  out.assembled.coefficients.resize(deg + 1);
  out.assembled_degree = out.assembled.degree();
  const double dres =
      std::max(std::abs(out.assembled.coefficients[0]), std::abs(out.assembled.coefficients[1])) / cmax;
  if (dres > 1e-6)
    throw Error(Errc::DeflationError,
                "spurious square factor at u1 = u2 not present (relative residual " + std::to_string(dres) + ")");
  out.quotient = out.assembled;
  out.quotient.coefficients.erase(out.quotient.coefficients.begin(),
                                  out.quotient.coefficients.begin() + 2);
  out.quotient_degree = out.quotient.degree();

  // Physical roots: G(lambda) on the real lambda interval.
  auto G = [&](cplx lam) {
    const cplx w = (lam - q.lam0) / q.slope;
    return Fy(std::sqrt(w)) / w;
  };
  const double a = -0.05 * q.lam_max - 1e-3, b = 1.05 * q.lam_max + 1e-3;
  const int extra = 4;
  auto cheb = chebyshev_interpolate([&](double l) { return G(cplx(l, 0.0)); }, N + extra, a, b);
  double m = 0.0;
  for (auto c : cheb) m = std::max(m, std::abs(c));
  for (int k = N + 1; k <= N + extra; ++k)
    if (std::abs(cheb[k]) > 1e-6 * m)
      throw Error(Errc::SolverError, "quotient is not of degree N in E^2");
  cheb.resize(N + 1);
  auto lams = colleague_roots(cheb, a, b, 0.0);
  if (static_cast<int>(lams.size()) != N) throw Error(Errc::SolverError, "colleague matrix lost roots");
  std::sort(lams.begin(), lams.end(), [](cplx x, cplx y) { return x.real() < y.real(); });

  for (cplx lam : lams) {
    lam = newton_polish(G, lam, 3);
    const cplx y = std::sqrt((lam - q.lam0) / q.slope);
    cplx u1 = q.C / 2.0 + y, u2 = q.C / 2.0 - y;
    if (lex_greater(u2, u1)) std::swap(u1, u2);
    out.roots.push_back(u1);
    out.partners.push_back(u2);
    out.residuals.push_back(newton_residual(G, lam));
    push_pm(out.energies, lam);
  }
  if (q.odd) out.energies.push_back(0.0);
  return out;
}
}  // namespace detail

inline CharSpectrum qh_type1_char_spectrum(const EffectiveParams& e, int N) {
  if (e.kind != ModelKind::Ext1) throw Error(Errc::NotApplicable, "Ext1 parameters expected");
  detail::check_cells(N, 2);
  return detail::solve_qh(detail::make_qh(e, N, QhVariant::Type1), "qh_type1");
}

inline CharSpectrum qh_type2_char_spectrum(const EffectiveParams& e, int N) {
  if (e.kind != ModelKind::Ext2) throw Error(Errc::NotApplicable, "Ext2 parameters expected");
  detail::check_cells(N, 2);
  return detail::solve_qh(detail::make_qh(e, N, QhVariant::Type2), "qh_type2");
}

/// 2N+1-site chains; the energies include the chiral-protected exact zero.
inline CharSpectrum qh_odd_char_spectrum(const EffectiveParams& e, int N) {
  detail::check_cells(N, 2);
  if (e.kind == ModelKind::Ext1)
    return detail::solve_qh(detail::make_qh(e, N, QhVariant::OddType1), "qh_odd_type1");
  if (e.kind == ModelKind::Ext2)
    return detail::solve_qh(detail::make_qh(e, N, QhVariant::OddType2), "qh_odd_type2");
  throw Error(Errc::NotApplicable, "odd-chain solver covers Ext1 and Ext2");
}

// ---------------------------------------------------------------------------
// General (non-QH) extended models.
//
// The four secular roots at energy E are grouped into pairs (s1,s2),(s3,s4)
// with s12 = sqrt(s1 s2) = r x, s34 = r / x, u_ab = (s_a + s_b)/(2 s_ab).  The
// boundary determinant, divided by (s1 - s2)(s3 - s4), is a 4x4 determinant
// of Chebyshev T/U combinations (function `boundary_phi`).  Times
// (x^2 - x^-2)^(2N+2) it is an even, x <-> 1/x symmetric Laurent polynomial,
// i.e. a polynomial of degree 3N+4 in v = (x^2 + x^-2)/2; the N = 0 version
// (degree 4) divides it.  Each physical E^2 appears once per pairing of its
// four roots, so the 3N roots of the quotient are clustered into N energies.
// ---------------------------------------------------------------------------

namespace detail {

struct Term {
  double c;
  int n;
};
using Row = std::vector<Term>;

inline Row shifted(const Row& r, int k) {
  Row o = r;
  for (auto& t : o) t.n += k;
  return o;
}

// U_m extended to all negative m by U_{-m} = -U_{m-2}
inline cplx U_ext(int m, cplx u) { return m >= -1 ? chebyshev_U(m, u) : -chebyshev_U(-m - 2, u); }

struct GeneralProblem {
  ModelKind kind;
  int N;
  HoppingSet h;
  double r = 1.0;
  double A = 0.0, B = 0.0, Dn = 1.0;  // coefficients of the u12/u34 rational map
  double lead = 1.0;                   // leading coefficient of the secular quartic
  double sumLR = 0.0;                  // sum_i t_i^L t_i^R
  std::array<Row, 4> rows;

  explicit GeneralProblem(const HoppingSet& hs, int n) : kind(hs.kind()), N(n), h(hs) {
    for (int c : h.classes()) sumLR += h.bond(c).product();
    if (kind == ModelKind::Ext1) {
      const double t0L = h.left(0), t0R = h.right(0), t1L = h.left(1), t1R = h.right(1),
                   t2L = h.left(2), t2R = h.right(2);
      r = std::pow(t0R * t2R / (t0L * t2L), 0.25);
      A = t0L * t2L * (t0R * t1R + t1L * t2R);
      B = t0R * t2R * (t0L * t1L + t1R * t2L);
      Dn = 2.0 * t0L * t0R * t2L * t2R;
      lead = t0L * t2L;
      const Row q{{t0L, 0}, {t1R, -1}, {t2R, -2}};
      rows = {Row{{1.0, -1}}, Row{{1.0, 0}}, shifted(q, N + 1), shifted(q, N + 2)};
    } else if (kind == ModelKind::Ext2) {
      const double t0L = h.left(0), t0R = h.right(0), t1L = h.left(1), t1R = h.right(1),
                   tmL = h.left(-1), tmR = h.right(-1);
      r = std::pow(t1R * tmR / (t1L * tmL), 0.25);
      A = t1L * tmL * (t0R * t1R + t0L * tmR);
      B = t1R * tmR * (t0L * t1L + t0R * tmL);
      Dn = 2.0 * t1L * t1R * tmL * tmR;
      lead = t1L * tmL;
      const Row q{{t0L, 0}, {t1R, -1}, {tmL, 1}};
      rows = {Row{{1.0, 0}}, q, Row{{1.0, N + 1}}, shifted(q, N + 1)};
    } else {
      throw Error(Errc::NotApplicable, "general solvers cover Ext1 and Ext2");
    }
  }

  struct Pairing {
    cplx x, s12, s34, u12, u34;
  };

  Pairing pairing(cplx x) const {
    Pairing p;
    p.x = x;
    p.s12 = r * x;
    p.s34 = r / x;
    const cplx den = Dn * (p.s12 * p.s12 - p.s34 * p.s34);
    const cplx prod = p.s12 * p.s34;
    p.u12 = prod * (A * p.s34 - B / p.s34) / den;
    p.u34 = -prod * (A * p.s12 - B / p.s12) / den;
    return p;
  }

  // Boundary determinant divided by (s1 - s2)(s3 - s4), for a given pairing:
  // Laplace expansion over the two column pairs.  Each pair minor collapses
  // to single U terms, (g_i(b) g_j(a) - g_i(a) g_j(b)) / (a - b) with
  // s^n, s^m -> -s^(n+m-1) U_{m-n-1}(u), which avoids the cancellation a
  // numerical 4x4 elimination suffers when |s12| and |s34| differ widely.
  cplx phi(const Pairing& p, int n_cells) const {
    const std::array<Row, 4>& rs = n_cells == N ? rows : GeneralProblem(h, n_cells).rows;
    auto minor = [&](const Row& ri, const Row& rj, cplx s, cplx u) {
      cplx acc = 0.0;
      for (const auto& a : ri)
        for (const auto& b : rj) acc -= a.c * b.c * std::pow(s, a.n + b.n - 1) * U_ext(b.n - a.n - 1, u);
      return acc;
    };
    static constexpr int pairs[6][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2},
                                        {1, 2, 0, 3}, {1, 3, 0, 2}, {2, 3, 0, 1}};
    cplx det = 0.0;
    for (const auto& q : pairs) {
      const double sign = ((q[0] + q[1] + 1) % 2 == 0) ? 1.0 : -1.0;
      det += sign * minor(rs[q[0]], rs[q[1]], p.s12, p.u12) * minor(rs[q[2]], rs[q[3]], p.s34, p.u34);
    }
    return det;
  }

  static cplx x_of_v(cplx v) {
    cplx z = v + std::sqrt(v * v - 1.0);
    if (std::abs(z) < 1.0) z = 1.0 / z;
    return std::sqrt(z);
  }

  // Cleared characteristic function; `n_cells` = 0 gives the spurious factor.
  cplx F(cplx v, int n_cells) const {
    const cplx x = x_of_v(v);
    const cplx x2 = x * x;
    const cplx clear = x2 - 1.0 / x2;
    return phi(pairing(x), n_cells) * std::pow(clear, 2 * n_cells + 2);
  }

  cplx lambda_of(const Pairing& p) const {
    const cplx e2 = p.s12 * p.s12 + p.s34 * p.s34 + 4.0 * p.s12 * p.s34 * p.u12 * p.u34;
    return sumLR - lead * e2;
  }

  // Secular quartic in s at E^2 = lam, ascending coefficients.
  std::array<cplx, 5> quartic(cplx lam) const {
    std::array<double, 3> fl{}, fr{};
    if (kind == ModelKind::Ext1) {
      fl = {h.right(0), h.left(1), h.left(2)};   // s^0..s^2 of f_L
      fr = {h.right(2), h.right(1), h.left(0)};  // s^2 f_R
    } else {
      fl = {h.right(-1), h.right(0), h.left(1)};  // s f_L
      fr = {h.right(1), h.left(0), h.left(-1)};   // s f_R
    }
    std::array<cplx, 5> c{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c[i + j] += fl[i] * fr[j];
    c[2] -= lam;
    return c;
  }

  // Raw boundary-condition column for one secular root.
  Eigen::Vector4cd bc_column(cplx s) const {
    Eigen::Vector4cd col;
    if (kind == ModelKind::Ext1) {
      const cplx q = h.left(0) + h.right(1) / s + h.right(2) / (s * s);
      col << 1.0 / s, 1.0, q * std::pow(s, N + 1), q * std::pow(s, N + 2);
    } else {
      const cplx q = h.left(0) + h.right(1) / s + h.left(-1) * s;
      col << 1.0, q, std::pow(s, N + 1), q * std::pow(s, N + 1);
    }
    return col;
  }

  // det / Vandermonde(s1..s4) of the raw boundary conditions: symmetric in
  // the secular roots, hence analytic in lambda, and zero on the spectrum.
  cplx bc(cplx lam) const {
    const auto c = quartic(lam);
    Poly p;
    p.coefficients.assign(c.begin(), c.end());
    const auto s = companion_roots(p, 0.0);
    if (s.size() != 4) return std::numeric_limits<double>::infinity();
    Eigen::Matrix4cd M;
    for (int k = 0; k < 4; ++k) M.col(k) = bc_column(s[k]);
    cplx V = 1.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) V *= s[i] - s[j];
    return Eigen::PartialPivLU<Eigen::Matrix4cd>(M).determinant() / V;
  }
};

// Merge candidates into exactly `k` groups (complete linkage on |d lambda|).
inline std::vector<std::vector<int>> cluster_complete(const std::vector<cplx>& lam, int k) {
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(lam.size()); ++i) groups.push_back({i});
  auto dist = [&](const std::vector<int>& a, const std::vector<int>& b) {
    double d = 0.0;
    for (int i : a)
      for (int j : b) d = std::max(d, std::abs(lam[i] - lam[j]));
    return d;
  };
  while (static_cast<int>(groups.size()) > k) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i < groups.size(); ++i)
      for (std::size_t j = i + 1; j < groups.size(); ++j) {
        const double d = dist(groups[i], groups[j]);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    groups[bi].insert(groups[bi].end(), groups[bj].begin(), groups[bj].end());
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return groups;
}

// Secant iterations on K(lambda); kept only while |K| decreases.
inline cplx polish_lambda(const GeneralProblem& g, cplx lam, int iters, double max_move) {
  const double h = 1e-7 * std::max(1.0, std::abs(lam));
  cplx a = lam, b = lam + h;
  cplx fa = g.bc(a), fb = g.bc(b);
  cplx best = std::abs(fa) <= std::abs(fb) ? a : b;
  double fbest = std::min(std::abs(fa), std::abs(fb));
  for (int k = 0; k < iters; ++k) {
    if (fb == fa) break;
    const cplx c = b - fb * (b - a) / (fb - fa);
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) break;
    a = b;
    fa = fb;
    b = c;
    fb = g.bc(b);
    if (std::abs(fb) < fbest) {
      fbest = std::abs(fb);
      best = b;
    }
  }
  // Never move farther than the first Newton step could justify.
  return std::abs(best - lam) <= max_move ? best : lam;
}

inline CharSpectrum solve_general(const HoppingSet& h, int N, const char* method) {
  check_cells(N, 2);
  for (int c : h.classes())
    if (h.bond(c).product() <= 0.0) throw Error(Errc::InvalidAmplitudes, "bond products must be positive");
  const GeneralProblem g(h, N);
  CharSpectrum out;
  out.method = method;
  const int deg = 3 * N + 4;
  const int qdeg = 3 * N;
  const int m = deg + 9;

  // The radius trades coverage of the roots against the noise floor of the
  // samples; keep the one whose interpolant has the cleanest tail.
  std::function<cplx(cplx)> G = [&](cplx v) { return g.F(v, N) / g.F(v, 0); };
  double best_tail = std::numeric_limits<double>::infinity();
  for (double trial : {2.0, 3.0, 4.5, 6.75, 10.0, 15.0, 22.5}) {
    const double norm = std::pow(2.0 * trial, -deg);  // keeps samples O(1)
    Poly a = circle_interpolate([&](cplx v) { return g.F(v, N) * norm; }, m, 0.0, trial);
    Poly q = circle_interpolate(G, m, 0.0, trial);
    double tail = 0.0;
    for (int k = deg + 1; k < m; ++k) tail = std::max(tail, std::abs(a.coefficients[k]) / a.max_abs());
    for (int k = qdeg + 1; k < m; ++k) tail = std::max(tail, std::abs(q.coefficients[k]) / q.max_abs());
    if (tail < best_tail) {
      best_tail = tail;
      out.assembled = std::move(a);
      out.quotient = std::move(q);
    }
  }
  if (best_tail > 1e-3)
    throw Error(Errc::SolverError, "interpolation conditioning failure: could not assemble the degree-3N quotient");
  out.assembled.coefficients.resize(deg + 1);
  out.quotient.coefficients.resize(qdeg + 1);
  const auto seeds = companion_roots(out.quotient, 0.0);
  if (static_cast<int>(seeds.size()) != qdeg)
    throw Error(Errc::SolverError, "quotient lost its leading coefficient");
  out.assembled_degree = out.assembled.degree();
  out.quotient_degree = out.quotient.degree();

  const auto vs = aberth_refine(G, seeds);

  struct Cand {
    cplx v, lam;
    GeneralProblem::Pairing p;
  };
  std::vector<Cand> cands;
  for (cplx v : vs) {
    // v = +-1 is the degenerate pairing s12 = +-s34 (the rational map for
    // u12/u34 is singular there); it is spurious.
    if (std::abs(v - 1.0) < 1e-6 * std::max(1.0, std::abs(v)) ||
        std::abs(v + 1.0) < 1e-6 * std::max(1.0, std::abs(v))) {
      out.discarded.push_back(v);
      continue;
    }
    const auto p = g.pairing(GeneralProblem::x_of_v(v));
    const cplx lam = g.lambda_of(p);
    cands.push_back({v, lam, p});
  }
  // Boundary-determinant filter: the Newton step of K(lambda) is tiny at a
  // physical candidate and O(lambda) at an artifact of the pairing.
  auto newton_step = [&](cplx lam) {
    return newton_residual([&](cplx l) { return g.bc(l); }, lam) * std::max(1.0, std::abs(lam));
  };
  std::vector<Cand> kept;
  std::vector<double> steps;
  for (const auto& c : cands) {
    const double st = newton_step(c.lam);
    if (st <= 1e-2 * std::max(1.0, std::abs(c.lam))) {
      kept.push_back(c);
      steps.push_back(st);
    } else {
      out.discarded.push_back(c.v);
    }
  }
  if (static_cast<int>(kept.size()) < N)
    throw Error(Errc::SolverError, "fewer physical candidates than unit cells");

  std::vector<cplx> lams;
  for (const auto& c : kept) lams.push_back(c.lam);
  auto groups = cluster_complete(lams, N);
  std::vector<std::pair<cplx, int>> reps;  // (lambda, candidate index)
  for (const auto& grp : groups) {
    int best = grp.front();
    for (int i : grp)
      if (steps[i] < steps[best]) best = i;
    reps.emplace_back(polish_lambda(g, kept[best].lam, 8, 10.0 * steps[best]), best);
  }
  std::sort(reps.begin(), reps.end(), [](const auto& a, const auto& b) {
    return lex_greater(b.first, a.first);
  });
  for (const auto& [lam, i] : reps) {
    const auto& c = kept[i];
    cplx s12 = c.p.s12 / g.r, s34 = c.p.s34 / g.r;
    out.roots.push_back(s12);
    out.partners.push_back(s34);
    out.residuals.push_back(newton_residual([&](cplx l) { return g.bc(l); }, lam));
    push_pm(out.energies, lam);
  }
  return out;
}
}  // namespace detail

inline CharSpectrum general_type1_char_spectrum(const HoppingSet& h, int N) {
  if (h.kind() != ModelKind::Ext1) throw Error(Errc::NotApplicable, "Ext1 amplitudes expected");
  return detail::solve_general(h, N, "general_type1");
}

inline CharSpectrum general_type2_char_spectrum(const HoppingSet& h, int N) {
  if (h.kind() != ModelKind::Ext2) throw Error(Errc::NotApplicable, "Ext2 amplitudes expected");
  return detail::solve_general(h, N, "general_type2");
}

/// CSV: "re_u,im_u,re_E,im_E,residual", one line per energy (each root
/// appears on the lines of its +-E pair).
inline void write_char_csv(std::ostream& os, const CharSpectrum& cs) {
  os << "re_u,im_u,re_E,im_E,residual\n";
  char buf[160];
  for (std::size_t k = 0; k < cs.energies.size(); ++k) {
    const std::size_t r = k / 2;
    const cplx u = r < cs.roots.size() ? cs.roots[r] : cplx(std::nan(""), std::nan(""));
    const double res = r < cs.residuals.size() ? cs.residuals[r] : 0.0;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", u.real(), u.imag(),
                  cs.energies[k].real(), cs.energies[k].imag(), res);
    os << buf;
  }
}

}  // namespace nhssh
