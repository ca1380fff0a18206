#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "nhssh/hamiltonian.hpp"
#include "nhssh/poly.hpp"

namespace nhssh {

struct Spectrum {
  std::vector<cplx> eigenvalues;   // sorted by (Re, Im)
  std::vector<CVector> eigenvectors;  // empty unless requested
  std::vector<double> residuals;   // ||M v - lambda v|| per pair
  double matrix_norm = 0.0;        // induced 1-norm of M
  int dimension() const { return static_cast<int>(eigenvalues.size()); }
};

namespace detail {
inline double norm1(const DenseMatrix& M) {
  return M.cwiseAbs().colwise().sum().maxCoeff();
}

// Unit 2-norm with the largest-magnitude entry real and positive.
inline void fix_phase(CVector& v) {
  const double n = v.norm();
  if (n == 0.0) return;
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  const cplx ph = v(k) / std::abs(v(k));
  v *= std::conj(ph) / n;
}

inline bool lex_less(cplx a, cplx b) {
  return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}
// Log-scale gauge D fitted so that |(D^{-1} M D)_ij| ~ |(D^{-1} M D)_ji| on
// every hopping: least squares over the hopping graph (a Laplacian solve).
// Exact when every closed loop has balanced magnitudes (the quasi-Hermitian
// case), the best uniform skin gauge otherwise.  Needs a symmetric sparsity
// pattern.
inline std::optional<Eigen::VectorXd> skin_gauge(const DenseMatrix& M) {
  const Eigen::Index n = M.rows();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double a = std::abs(M(i, j)), b = std::abs(M(j, i));
      if (a == 0.0 && b == 0.0) continue;
      if (a == 0.0 || b == 0.0) return std::nullopt;
      // x_j - x_i = g
      const double g = 0.5 * (std::log(b) - std::log(a));
      L(i, i) += 1;
      L(j, j) += 1;
      L(i, j) -= 1;
      L(j, i) -= 1;
      rhs(j) += g;
      rhs(i) -= g;
    }
  const Eigen::VectorXd x = L.completeOrthogonalDecomposition().solve(rhs);
  if (!x.allFinite() || x.maxCoeff() - x.minCoeff() > 600.0) return std::nullopt;
  return (x.array() - x.mean()).exp().matrix();
}
}  // namespace detail

/// Full eigensystem of a general complex matrix.
inline Spectrum eigendecompose(const DenseMatrix& M, bool want_vectors = true,
                               double residual_tol = 1e-8) {
  Spectrum out;
  const Eigen::Index n = M.rows();
  out.matrix_norm = n ? detail::norm1(M) : 0.0;
  if (n == 0) return out;
  if (!M.allFinite()) throw Error(Errc::SolverError, "matrix has non-finite entries");

  // Skin-effect chains are exponentially non-normal; balancing first keeps
  // strongly skewed spectra accurate.
  DenseMatrix B = M;
  Eigen::VectorXd d;
  if (auto g = detail::skin_gauge(M)) {
    B = g->cwiseInverse().asDiagonal() * M * g->asDiagonal();
    d = g->cwiseProduct(detail::balance(B));
  } else {
    d = detail::balance(B);
  }
  Eigen::ComplexEigenSolver<DenseMatrix> ces(B, true);
  if (ces.info() != Eigen::Success)
    throw Error(Errc::SolverError,
                "complex Schur iteration did not converge (dimension " + std::to_string(n) + ")");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = ces.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return detail::lex_less(ev(a), ev(b)); });

  const double bound = residual_tol * std::max(out.matrix_norm, 1e-300);
  for (int k : order) {
    CVector v = d.asDiagonal() * ces.eigenvectors().col(k);
    detail::fix_phase(v);
    const double res = (M * v - ev(k) * v).norm();
    if (!(res <= bound))
      throw Error(Errc::SolverError, "eigenpair residual " + std::to_string(res) +
                                         " exceeds " + std::to_string(bound));
    out.eigenvalues.push_back(ev(k));
    out.residuals.push_back(res);
    if (want_vectors) out.eigenvectors.push_back(std::move(v));
  }
  return out;
}

/// max |Im E| <= tol * max(1, max |E|).
inline bool reality_check(const Spectrum& s, double tol) {
  double im = 0.0, mag = 1.0;
  for (cplx e : s.eigenvalues) {
    im = std::max(im, std::abs(e.imag()));
    mag = std::max(mag, std::abs(e));
  }
  return im <= tol * mag;
}

enum class Side { Left, Right, Delocalized };

inline const char* side_name(Side s) {
  switch (s) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    default: return "delocalized";
  }
}

struct LocalizationThresholds {
  double left = 0.9;   // weight_left >= left  -> Left
  double right = 0.1;  // weight_left <= right -> Right
};

struct Localization {
  Side side = Side::Delocalized;
  double weight_left = 0.0;
  double weight_A = 0.0;
};

/// Cells j <= N/2 count as the left half; N defaults to dim/2 (odd chains put
/// the dangling A_{N+1} on the right).
inline Localization classify_localization(const CVector& v, int n_cells = -1,
                                          LocalizationThresholds th = {}) {
  if (n_cells < 0) n_cells = static_cast<int>(v.size() / 2);
  const double total = v.squaredNorm();
  Localization loc;
  if (total == 0.0) return loc;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto site = SiteIndex::from_linear(static_cast<int>(i));
    const double w = std::norm(v(i)) / total;
    if (2 * site.cell <= n_cells) loc.weight_left += w;
    if (site.sublattice == Sublattice::A) loc.weight_A += w;
  }
  loc.side = loc.weight_left >= th.left    ? Side::Left
             : loc.weight_left <= th.right ? Side::Right
                                           : Side::Delocalized;
  return loc;
}

/// Fitted |s| of a (nearly) single-sublattice state: least-squares slope of
/// log|amplitude| versus cell index on the dominant sublattice.
inline double fit_decay_factor(const CVector& v) {
  const auto loc = classify_localization(v);
  const int off = loc.weight_A >= 0.5 ? 0 : 1;
  std::vector<double> xs, ys;
  double amax = 0.0;
  for (Eigen::Index i = off; i < v.size(); i += 2) amax = std::max(amax, std::abs(v(i)));
  if (amax == 0.0) return 0.0;
  for (Eigen::Index i = off; i < v.size(); i += 2) {
    const double a = std::abs(v(i));
    if (a > 1e-12 * amax) {
      xs.push_back(static_cast<double>(i / 2 + 1));
      ys.push_back(std::log(a));
    }
  }
  if (xs.size() < 2) return 0.0;
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  return std::exp(sxy / sxx);
}

namespace detail {
inline Eigen::VectorXd sublattice_mask_A(Eigen::Index dim) {
  Eigen::VectorXd m(dim);
  for (Eigen::Index i = 0; i < dim; ++i) m(i) = (i % 2 == 0) ? 1.0 : 0.0;
  return m;
}

inline Eigen::VectorXd left_mask(Eigen::Index dim, int n_cells) {
  Eigen::VectorXd m(dim);
  for (Eigen::Index i = 0; i < dim; ++i) m(i) = (2 * (i / 2 + 1) <= n_cells) ? 1.0 : 0.0;
  return m;
}

// Orthonormal basis of span(cols) (rank-revealing, relative cutoff 1e-10).
inline Eigen::MatrixXcd orthonormal_basis(const Eigen::MatrixXcd& V) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(V);
  qr.setThreshold(1e-10);
  const auto rank = qr.rank();
  Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(V.rows(), rank);
  return Q;
}

// Eigenvectors of Q^H diag(mask) Q, ascending; returns rotated basis Q X.
inline std::pair<Eigen::MatrixXcd, Eigen::VectorXd> diagonalize_weight(
    const Eigen::MatrixXcd& Q, const Eigen::VectorXd& mask) {
  Eigen::MatrixXcd W = Q.adjoint() * mask.asDiagonal() * Q;
  W = 0.5 * (W + W.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(W);
  return {Q * es.eigenvectors(), es.eigenvalues()};
}
}  // namespace detail

struct ChiralPair {
  int i = -1, j = -1;
  CVector minus;  // B-sublattice-dominated combination
  CVector plus;   // A-sublattice-dominated combination
};

/// Recombine a chiral pair (E_i ~ -E_j).  Returns the two combinations of
/// span{psi_i, psi_j} with extremal A-sublattice weight; when psi_j is
/// exactly the chiral image of psi_i these are psi_i +- psi_j (up to phase).
inline ChiralPair chiral_recombine(const Spectrum& s, int i, int j, double pair_tol = 1e-6) {
  const int n = s.dimension();
  if (i < 0 || j < 0 || i >= n || j >= n || i == j)
    throw Error(Errc::InvalidRequest, "chiral pair indices out of range");
  if (s.eigenvectors.empty()) throw Error(Errc::InvalidRequest, "eigenvectors required");
  if (std::abs(s.eigenvalues[i] + s.eigenvalues[j]) > pair_tol * std::max(s.matrix_norm, 1.0))
    throw Error(Errc::NotAChiralPair, "E_i + E_j exceeds the pairing tolerance");

  const Eigen::Index dim = s.eigenvectors[i].size();
  Eigen::MatrixXcd V(dim, 2);
  V.col(0) = s.eigenvectors[i];
  V.col(1) = s.eigenvectors[j];
  ChiralPair out{i, j, {}, {}};
  const auto mA = detail::sublattice_mask_A(dim);
  Eigen::MatrixXcd Q = detail::orthonormal_basis(V);
  if (Q.cols() < 2) {
    // Numerically parallel eigenvectors: split the common vector by sublattice.
    out.plus = mA.asDiagonal() * s.eigenvectors[i];
    out.minus = s.eigenvectors[i] - out.plus;
  } else {
    auto [R, w] = detail::diagonalize_weight(Q, mA);
    out.minus = R.col(0);
    out.plus = R.col(1);
  }
  detail::fix_phase(out.plus);
  detail::fix_phase(out.minus);
  return out;
}

struct EdgeState {
  cplx energy;          // eigenvalue of the raw state with the largest overlap
  Side side = Side::Delocalized;
  double weight_left = 0.0;
  double sublattice_weight_A = 0.0;
  double decay_factor = 0.0;
  CVector vector;       // recombined, unit norm
};

struct EdgeStateReport {
  int count = 0;
  std::vector<EdgeState> states;
  std::vector<int> selected;                 // spectrum indices, ascending |E|
  std::vector<std::pair<int, int>> pairs;    // chiral pairs among `selected`
  double gap_ratio = 0.0;
  bool unreliable = false;

  int n_left() const {
    return static_cast<int>(std::count_if(states.begin(), states.end(),
                                          [](const EdgeState& e) { return e.side == Side::Left; }));
  }
  int n_right() const {
    return static_cast<int>(std::count_if(states.begin(), states.end(),
                                          [](const EdgeState& e) { return e.side == Side::Right; }));
  }
};

struct EdgeOptions {
  double pair_tol = 1e-6;  // relative to ||M||
  LocalizationThresholds thresholds{};
  int n_cells = -1;        // defaults to dim/2
};

/// Pick the `expected` smallest-|E| states and resolve them into
/// single-sublattice, boundary-localized combinations.
///
/// Edge energies can fall below rounding (they decay like (tbar0/tbar1)^N),
/// in which case the solver returns arbitrary mixtures inside the near-zero
/// subspace.  The resolution is therefore done on the whole selected
/// subspace: first split it by sublattice weight, then, inside each
/// sublattice block, by left-half weight.  For a single clean chiral pair
/// this is exactly the psi_i +- psi_j recombination.
inline EdgeStateReport detect_edge_states(const Spectrum& s, int expected,
                                          const EdgeOptions& opt = {}) {
  const int n = s.dimension();
  if (expected < 0 || expected > n)
    throw Error(Errc::InvalidRequest, "expected edge count outside [0, dimension]");
  EdgeStateReport rep;
  if (expected == 0) return rep;
  if (s.eigenvectors.empty()) throw Error(Errc::InvalidRequest, "eigenvectors required");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(s.eigenvalues[a]) < std::abs(s.eigenvalues[b]);
  });
  rep.selected.assign(order.begin(), order.begin() + expected);
  if (expected < n) {
    const double next = std::abs(s.eigenvalues[order[expected]]);
    rep.gap_ratio = next > 0.0 ? std::abs(s.eigenvalues[order[expected - 1]]) / next : 1.0;
  }
  rep.unreliable = rep.gap_ratio > 0.5;

  // Greedy chiral pairing by nearest -E partner.
  const double ptol = opt.pair_tol * std::max(s.matrix_norm, 1.0);
  std::vector<bool> used(expected, false);
  for (int a = 0; a < expected; ++a) {
    if (used[a]) continue;
    int best = -1;
    double bd = ptol;
    for (int b = 0; b < expected; ++b) {
      if (b == a || used[b]) continue;
      const double d = std::abs(s.eigenvalues[rep.selected[a]] + s.eigenvalues[rep.selected[b]]);
      if (d <= bd) {
        bd = d;
        best = b;
      }
    }
    if (best >= 0) {
      used[a] = used[best] = true;
      rep.pairs.emplace_back(rep.selected[a], rep.selected[best]);
    }
  }

  const Eigen::Index dim = s.eigenvectors.front().size();
  const int n_cells = opt.n_cells > 0 ? opt.n_cells : static_cast<int>(dim / 2);
  Eigen::MatrixXcd V(dim, expected);
  for (int k = 0; k < expected; ++k) V.col(k) = s.eigenvectors[rep.selected[k]];

  std::vector<CVector> resolved;
  Eigen::MatrixXcd Q = detail::orthonormal_basis(V);
  auto [R, wA] = detail::diagonalize_weight(Q, detail::sublattice_mask_A(dim));
  const auto mL = detail::left_mask(dim, n_cells);
  for (int block = 0; block < 2; ++block) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index c = 0; c < R.cols(); ++c)
      if ((wA(c) >= 0.5) == (block == 1)) cols.push_back(c);
    if (cols.empty()) continue;
    Eigen::MatrixXcd B(dim, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) B.col(c) = R.col(cols[c]);
    auto [L, wl] = detail::diagonalize_weight(B, mL);
    for (Eigen::Index c = 0; c < L.cols(); ++c) resolved.push_back(L.col(c));
  }
  // Rank deficiency (numerically coincident eigenvectors) leaves fewer
  // resolved vectors; pad with the remaining raw states so count == expected.
  for (int k = static_cast<int>(resolved.size()); k < expected; ++k)
    resolved.push_back(s.eigenvectors[rep.selected[k]]);

  for (auto& v : resolved) {
    detail::fix_phase(v);
    EdgeState e;
    int best = 0;
    double ov = -1.0;
    for (int k = 0; k < expected; ++k) {
      const double o = std::abs(s.eigenvectors[rep.selected[k]].dot(v));
      if (o > ov) {
        ov = o;
        best = k;
      }
    }
    e.energy = s.eigenvalues[rep.selected[best]];
    const auto loc = classify_localization(v, n_cells, opt.thresholds);
    e.side = loc.side;
    e.weight_left = loc.weight_left;
    e.sublattice_weight_A = loc.weight_A;
    e.decay_factor = fit_decay_factor(v);
    e.vector = v;
    rep.states.push_back(std::move(e));
  }
  rep.count = static_cast<int>(rep.states.size());
  return rep;
}

inline void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
  os << "index,re_E,im_E,residual\n";
  char buf[128];
  for (int k = 0; k < s.dimension(); ++k) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", k, s.eigenvalues[k].real(),
                  s.eigenvalues[k].imag(), s.residuals[k]);
    os << buf;
  }
}

inline void write_eigenvector_csv(std::ostream& os, const CVector& v) {
  os << "site,sublattice,re,im\n";
  char buf[128];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto site = SiteIndex::from_linear(static_cast<int>(i));
    std::snprintf(buf, sizeof buf, "%d,%c,%.17g,%.17g\n", site.cell,
                  site.sublattice == Sublattice::A ? 'A' : 'B', v(i).real(), v(i).imag());
    os << buf;
  }
}

}  // namespace nhssh
