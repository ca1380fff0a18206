#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "nhssh/hamiltonian.hpp"
#include "nhssh/model.hpp"
#include "nhssh/poly.hpp"

namespace nhssh {

// ---------------------------------------------------------------------------
// Laurent factors and their windings
// ---------------------------------------------------------------------------

/// f(z) = sum_k c[k] z^(lo + k).
struct Laurent {
  int lo = 0;
  std::vector<cplx> c;

  cplx operator()(cplx z) const {
    cplx s = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * z + *it;
    return s * std::pow(z, lo);
  }
  std::vector<cplx> zeros() const {
    Poly p;
    p.coefficients = c;
    return companion_roots(p, 0.0);
  }
  double max_abs() const {
    double m = 0.0;
    for (auto x : c) m = std::max(m, std::abs(x));
    return m;
  }
};

inline Laurent make_laurent(const std::vector<std::pair<int, double>>& terms) {
  int lo = terms.front().first, hi = lo;
  for (auto& [n, v] : terms) {
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  Laurent f;
  f.lo = lo;
  f.c.assign(hi - lo + 1, 0.0);
  for (auto& [n, v] : terms) f.c[n - lo] += v;
  return f;
}

/// The two Bloch factors: E^2(p) = f_L(e^{ip}) f_R(e^{ip}).
inline Laurent factor_L(const HoppingSet& h) {
  std::vector<std::pair<int, double>> t;
  for (int c : h.classes()) t.emplace_back(c, detail::coef_in_B_row(h, c));
  return make_laurent(t);
}
inline Laurent factor_R(const HoppingSet& h) {
  std::vector<std::pair<int, double>> t;
  for (int c : h.classes()) t.emplace_back(-c, detail::coef_in_A_row(h, c));
  return make_laurent(t);
}

namespace detail {

// Zeros inside |z| < radius minus the pole order at the origin.  A zero
// within tol (relative) of the circle makes the count meaningless.
inline std::optional<int> count_winding(const Laurent& f, double radius, double tol = 1e-9) {
  int inside = 0;
  for (auto z : f.zeros()) {
    const double m = std::abs(z);
    if (std::abs(m - radius) <= tol * radius) return std::nullopt;
    if (m < radius) ++inside;
  }
  return inside + f.lo;
}

struct ArgWinding {
  double turns = 0.0;
  double min_abs = 0.0;  // min |f| over the samples relative to max |f|
  int samples = 0;
};

// Accumulated argument of f over |z| = radius, p from -pi to pi.  The grid
// is doubled while |f| dips below 1e-6 of its max or a step turns by more
// than pi/4.
inline ArgWinding arg_winding(const std::function<cplx(cplx)>& f, double radius, int resolution,
                              int max_doublings = 6) {
  ArgWinding w;
  int M = resolution;
  for (int d = 0; d <= max_doublings; ++d, M *= 2) {
    std::vector<cplx> v(M + 1);
    double vmin = std::numeric_limits<double>::infinity(), vmax = 0.0;
    for (int k = 0; k <= M; ++k) {
      const double p = -std::numbers::pi + 2.0 * std::numbers::pi * k / M;
      v[k] = f(std::polar(radius, p));
      vmin = std::min(vmin, std::abs(v[k]));
      vmax = std::max(vmax, std::abs(v[k]));
    }
    double acc = 0.0, worst = 0.0;
    for (int k = 0; k < M; ++k) {
      const double dphi = std::arg(v[k + 1] / v[k]);
      worst = std::max(worst, std::abs(dphi));
      acc += dphi;
    }
    w = {acc / (2.0 * std::numbers::pi), vmax > 0.0 ? vmin / vmax : 0.0, M};
    if (w.min_abs >= 1e-6 && worst <= std::numbers::pi / 4) break;
  }
  return w;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Modified winding number
// ---------------------------------------------------------------------------

/// nu-bar from the effective (Hermitian) amplitudes: zeros of the t-bar
/// Bloch polynomial inside the unit disk, minus the pole order for Ext2.
inline int modified_winding(const EffectiveParams& e) {
  Laurent f;
  switch (e.kind) {
    case ModelKind::SSH:
      f = make_laurent({{0, e.t0()}, {1, e.t1()}});
      break;
    case ModelKind::Ext1:
      f = make_laurent({{0, e.t0()}, {1, e.t1()}, {2, e.t3()}});
      break;
    case ModelKind::Ext2:
      f = make_laurent({{0, e.t0()}, {1, e.t1()}, {-1, e.t3()}});
      break;
  }
  const auto w = detail::count_winding(f, 1.0);
  if (!w) throw Error(Errc::CriticalPoint, "a root lies on the unit circle (phase boundary)");
  return *w;
}

// ---------------------------------------------------------------------------
// Spectral windings
// ---------------------------------------------------------------------------

struct WindingPair {
  int left = 0;
  int right = 0;
  int total() const { return left + right; }
};

/// (nu_E^L, nu_E^R) by accumulated argument and by root counting; the two
/// must agree.  nu_E^R is counted in z = e^{ip}, so its e^{-ip} terms give
/// negative values.
inline WindingPair spectral_windings(const HoppingSet& h, int resolution = 4096) {
  if (resolution < 256) throw Error(Errc::InvalidRequest, "resolution must be >= 256");
  WindingPair out;
  int* slot[2] = {&out.left, &out.right};
  const Laurent f[2] = {factor_L(h), factor_R(h)};
  for (int i = 0; i < 2; ++i) {
    const auto a = detail::arg_winding(f[i], 1.0, resolution);
    if (a.min_abs < 1e-12) throw Error(Errc::GaplessFactor, "a Bloch factor vanishes on the Brillouin zone");
    const auto b = detail::count_winding(f[i], 1.0);
    if (!b) throw Error(Errc::GaplessFactor, "a Bloch factor has a zero on the unit circle");
    const int ra = static_cast<int>(std::lround(a.turns));
    if (std::abs(a.turns - ra) > 1e-3 || ra != *b)
      throw Error(Errc::NumericalInconsistency,
                  "argument accumulation and root counting disagree on a spectral winding");
    *slot[i] = ra;
  }
  return out;
}

/// Windings of f_L, f_R and det H on |z| = radius.  At radius = r a
/// quasi-Hermitian model gives (nu-bar, -nu-bar, 0); at radius 1 the total
/// is nu_E.
inline WindingPair winding_on_circle(const HoppingSet& h, double radius, int resolution = 4096) {
  if (!(radius > 0.0)) throw Error(Errc::InvalidRequest, "radius must be positive");
  WindingPair out;
  int* slot[2] = {&out.left, &out.right};
  const Laurent f[2] = {factor_L(h), factor_R(h)};
  for (int i = 0; i < 2; ++i) {
    const auto b = detail::count_winding(f[i], radius);
    if (!b) throw Error(Errc::CriticalPoint, "det H vanishes on the contour");
    const auto a = detail::arg_winding(f[i], radius, resolution);
    if (std::lround(a.turns) != *b)
      throw Error(Errc::NumericalInconsistency, "contour winding methods disagree");
    *slot[i] = *b;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Edge-state location tables
// ---------------------------------------------------------------------------

enum class PredictionStatus { Determinate, Ambiguous, Unclassified };

inline const char* status_name(PredictionStatus s) {
  switch (s) {
    case PredictionStatus::Determinate: return "determinate";
    case PredictionStatus::Ambiguous: return "ambiguous";
    case PredictionStatus::Unclassified: return "unclassified";
  }
  return "?";
}

struct EdgePrediction {
  PredictionStatus status = PredictionStatus::Unclassified;
  // every (n_left, n_right) decomposition the tables allow; one entry when
  // determinate
  std::vector<std::pair<int, int>> candidates;

  int n_left() const { return candidates.size() == 1 ? candidates[0].first : -1; }
  int n_right() const { return candidates.size() == 1 ? candidates[0].second : -1; }
  bool allows(int l, int r) const {
    for (auto& c : candidates)
      if (c.first == l && c.second == r) return true;
    return false;
  }

  static EdgePrediction determinate(int l, int r) {
    return {PredictionStatus::Determinate, {{l, r}}};
  }
  static EdgePrediction ambiguous(std::vector<std::pair<int, int>> c) {
    return {PredictionStatus::Ambiguous, std::move(c)};
  }
  static EdgePrediction unclassified() { return {}; }
};

namespace detail {

using Tuple = std::pair<int, int>;

inline bool in(const Tuple& t, std::initializer_list<Tuple> list) {
  for (auto& x : list)
    if (x == t) return true;
  return false;
}

// One boundary pair of an even chain, straight from the published lists.
inline EdgePrediction lookup_table(ModelKind kind, int nu_bar, int nu_L, int nu_R) {
  const Tuple t{nu_L, nu_R};
  const int nu_E = nu_L + nu_R;
  if (nu_bar == 0) return EdgePrediction::determinate(0, 0);  // any nu_E
  switch (kind) {
    case ModelKind::SSH:
      if (nu_bar != 1) break;
      if (nu_E == 1) return EdgePrediction::determinate(2, 0);
      if (nu_E == 0) return EdgePrediction::determinate(1, 1);
      if (nu_E == -1) return EdgePrediction::determinate(0, 2);
      break;
    case ModelKind::Ext1:
      if (nu_bar == 2) {
        if (nu_E >= -2 && nu_E <= 2) return EdgePrediction::determinate(2 + nu_E, 2 - nu_E);
        break;
      }
      if (nu_bar != 1) break;
      if (t == Tuple{2, -1}) return EdgePrediction::ambiguous({{2, 0}, {1, 1}});
      if (t == Tuple{1, -2}) return EdgePrediction::ambiguous({{1, 1}, {0, 2}});
      if (in(t, {{2, 0}, {1, 0}})) return EdgePrediction::determinate(2, 0);
      if (in(t, {{2, -2}, {1, -1}, {0, 0}})) return EdgePrediction::determinate(1, 1);
      if (in(t, {{0, -1}, {0, -2}})) return EdgePrediction::determinate(0, 2);
      break;
    case ModelKind::Ext2:
      if (nu_bar != 1 && nu_bar != -1) break;
      if (t == Tuple{1, 0}) return EdgePrediction::ambiguous({{2, 0}, {1, 1}});
      if (t == Tuple{0, -1}) return EdgePrediction::ambiguous({{1, 1}, {0, 2}});
      if (in(t, {{1, 1}, {0, 1}})) return EdgePrediction::determinate(2, 0);
      if (in(t, {{1, -1}, {0, 0}, {-1, 1}})) return EdgePrediction::determinate(1, 1);
      if (in(t, {{-1, 0}, {-1, -1}})) return EdgePrediction::determinate(0, 2);
      break;
  }
  return EdgePrediction::unclassified();
}

inline ModelKind dual_kind(ModelKind k) {
  if (k == ModelKind::Ext1) return ModelKind::Ext2;
  if (k == ModelKind::Ext2) return ModelKind::Ext1;
  return ModelKind::SSH;
}

}  // namespace detail

/// Invariants seen from the incomplete cell at the right end of an odd chain.
struct DualInvariants {
  ModelKind kind;
  int nu_bar, nu_L, nu_R;
};

inline DualInvariants odd_chain_right_invariants(ModelKind kind, int nu_bar, int nu_L, int nu_R) {
  return {detail::dual_kind(kind), 1 - nu_bar, nu_R + 1, nu_L - 1};
}

/// Table lookup.  Even chains use the published lists directly.  Odd chains
/// combine two boundaries: the left cell contributes |nu-bar| states and the
/// right (dual) cell |1 - nu-bar|; each boundary's states go to the side its
/// own table favours, capped by its contribution.
inline EdgePrediction predict_edge_distribution(int nu_bar, int nu_L, int nu_R, ModelKind kind,
                                                Parity parity) {
  if (parity == Parity::Even) return detail::lookup_table(kind, nu_bar, nu_L, nu_R);

  const auto d = odd_chain_right_invariants(kind, nu_bar, nu_L, nu_R);
  const auto left = detail::lookup_table(kind, nu_bar, nu_L, nu_R);
  const auto right = detail::lookup_table(d.kind, d.nu_bar, d.nu_L, d.nu_R);
  if (left.status == PredictionStatus::Unclassified || right.status == PredictionStatus::Unclassified)
    return EdgePrediction::unclassified();
  const int nl = std::abs(nu_bar), nr = std::abs(d.nu_bar);
  std::vector<std::pair<int, int>> out;
  for (auto& a : left.candidates)
    for (auto& b : right.candidates) {
      const int on_left = std::min(nl, a.first);
      const int on_right = std::min(nr, b.second);
      const std::pair<int, int> c{on_left + (nr - on_right), (nl - on_left) + on_right};
      bool seen = false;
      for (auto& x : out) seen = seen || x == c;
      if (!seen) out.push_back(c);
    }
  if (out.size() == 1) return EdgePrediction::determinate(out[0].first, out[0].second);
  return EdgePrediction::ambiguous(out);
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct TopologyReport {
  ModelKind kind = ModelKind::SSH;
  Parity parity = Parity::Even;
  int nu_bar = 0;
  int nu_E_L = 0;
  int nu_E_R = 0;
  int nu_E = 0;
  double r = 1.0;
  EdgePrediction predicted;
  // moduli of the zeros of the two Bloch factors, surfaced for inspection of
  // table rows that root counting alone does not explain
  std::vector<double> zeros_L, zeros_R;
};

inline TopologyReport topology_report(const HoppingSet& h, Parity parity = Parity::Even,
                                      int resolution = 4096) {
  TopologyReport t;
  t.kind = h.kind();
  t.parity = parity;
  const auto e = effective_params(h);
  t.r = e.r;
  t.nu_bar = modified_winding(e);
  const auto w = spectral_windings(h, resolution);
  t.nu_E_L = w.left;
  t.nu_E_R = w.right;
  t.nu_E = w.total();
  t.predicted = predict_edge_distribution(t.nu_bar, t.nu_E_L, t.nu_E_R, t.kind, parity);
  for (auto z : factor_L(h).zeros()) t.zeros_L.push_back(std::abs(z));
  for (auto z : factor_R(h).zeros()) t.zeros_R.push_back(std::abs(z));
  std::sort(t.zeros_L.begin(), t.zeros_L.end());
  std::sort(t.zeros_R.begin(), t.zeros_R.end());
  return t;
}

// ---------------------------------------------------------------------------
// Trajectory export
// ---------------------------------------------------------------------------

struct TrajectorySample {
  double p;
  cplx fL, fR, E;
};

/// E(p) over the Brillouin zone; the square-root branch is followed
/// continuously from p = -pi.
inline std::vector<TrajectorySample> bloch_trajectory(const HoppingSet& h, int resolution = 1024) {
  const Laurent L = factor_L(h), R = factor_R(h);
  std::vector<TrajectorySample> out;
  out.reserve(resolution + 1);
  cplx prev = 0.0;
  for (int k = 0; k <= resolution; ++k) {
    const double p = -std::numbers::pi + 2.0 * std::numbers::pi * k / resolution;
    const cplx z = std::polar(1.0, p);
    TrajectorySample s{p, L(z), R(z), 0.0};
    s.E = std::sqrt(s.fL * s.fR);
    if (k > 0 && std::abs(-s.E - prev) < std::abs(s.E - prev)) s.E = -s.E;
    prev = s.E;
    out.push_back(s);
  }
  return out;
}

inline void write_trajectory_csv(std::ostream& os, const std::vector<TrajectorySample>& tr) {
  os << "p,re_fL,im_fL,re_fR,im_fR,re_E,im_E\n";
  char buf[256];
  for (const auto& s : tr) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.p,
                  s.fL.real(), s.fL.imag(), s.fR.real(), s.fR.imag(), s.E.real(), s.E.imag());
    os << buf;
  }
}

}  // namespace nhssh
