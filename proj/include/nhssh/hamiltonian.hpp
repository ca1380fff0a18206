#pragma once

#include <complex>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "nhssh/model.hpp"

namespace nhssh {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

enum class Sublattice { A, B };

struct SiteIndex {
  int cell = 1;  // 1-based; N+1 only for the dangling A site of odd chains
  Sublattice sublattice = Sublattice::A;

  int linear() const { return 2 * (cell - 1) + (sublattice == Sublattice::B ? 1 : 0); }
  static SiteIndex from_linear(int i) {
    return {i / 2 + 1, (i % 2) ? Sublattice::B : Sublattice::A};
  }
};

namespace detail {
// Coefficient of B_j in the A_{j+c} equation and of A_{j+c} in the B_j
// equation for bond class c.
inline double coef_in_A_row(const HoppingSet& h, int c) {
  return (c == 0 || c == -1) ? h.left(c) : h.right(c);
}
inline double coef_in_B_row(const HoppingSet& h, int c) {
  return (c == 0 || c == -1) ? h.right(c) : h.left(c);
}

inline DenseMatrix assemble(const HoppingSet& h, const ChainSpec& chain) {
  const int N = chain.n_cells;
  const int dim = chain.dimension();
  const int nA = chain.parity == Parity::Odd ? N + 1 : N;
  const bool pbc = chain.boundary == Boundary::PBC;
  DenseMatrix M = DenseMatrix::Zero(dim, dim);
  for (int c : h.classes()) {
    const double ca = coef_in_A_row(h, c), cb = coef_in_B_row(h, c);
    for (int j = 1; j <= N; ++j) {
      int k = j + c;
      if (pbc) {
        k = ((k - 1) % N + N) % N + 1;
      } else if (k < 1 || k > nA) {
        continue;  // bond leaves the chain: the open-boundary truncation
      }
      const int a = SiteIndex{k, Sublattice::A}.linear();
      const int b = SiteIndex{j, Sublattice::B}.linear();
      M(a, b) += ca;
      M(b, a) += cb;
    }
  }
  return M;
}
}  // namespace detail

/// Dense OBC Hamiltonian, sites ordered A1,B1,A2,B2,... (plus A_{N+1} for odd
/// chains).  M(A_j, B_k) is the coefficient of B_k in the A_j equation.
inline DenseMatrix build_obc(const HoppingSet& h, const ChainSpec& chain) {
  if (chain.boundary != Boundary::OBC)
    throw Error(Errc::InvalidRequest, "build_obc requires open boundaries");
  chain.validate(h.kind());
  return detail::assemble(h, chain);
}

/// Periodic chain: the open chain plus wrap-around hoppings.
inline DenseMatrix build_pbc(const HoppingSet& h, int n_cells) {
  ChainSpec chain{n_cells, Parity::Even, Boundary::PBC};
  chain.validate(h.kind());
  return detail::assemble(h, chain);
}

/// The two factors of E^2(p) = f_L f_R, evaluated at z = e^{ip} (or any
/// complex z, which the circle windings use).
struct BlochFactors {
  HoppingSet h;

  // f_L(z) = sum_c (B-row coefficient) z^c ; f_R(z) = sum_c (A-row coefficient) z^{-c}
  cplx f_L_z(cplx z) const {
    cplx s = 0.0;
    for (int c : h.classes()) s += detail::coef_in_B_row(h, c) * std::pow(z, c);
    return s;
  }
  cplx f_R_z(cplx z) const {
    cplx s = 0.0;
    for (int c : h.classes()) s += detail::coef_in_A_row(h, c) * std::pow(z, -c);
    return s;
  }
  cplx f_L(double p) const { return f_L_z(std::polar(1.0, p)); }
  cplx f_R(double p) const { return f_R_z(std::polar(1.0, p)); }
  cplx E2(double p) const { return f_L(p) * f_R(p); }
};

inline BlochFactors bloch_factors(const HoppingSet& h) { return BlochFactors{h}; }

/// 2x2 Bloch Hamiltonian in the (A, B) basis: [[0, f_R], [f_L, 0]].  Its
/// determinant is -f_L f_R, i.e. the eigenvalues satisfy E^2 = f_L f_R.
inline Eigen::Matrix2cd bloch_matrix(const HoppingSet& h, double p) {
  const auto bf = bloch_factors(h);
  Eigen::Matrix2cd m;
  m << 0.0, bf.f_R(p), bf.f_L(p), 0.0;
  return m;
}

/// Both branches of +-sqrt(f_L f_R) at p_k = 2 pi k / N, k = 0..N-1.
inline std::vector<cplx> pbc_spectrum(const HoppingSet& h, int N) {
  if (N < 1) throw Error(Errc::ChainTooShort, "pbc_spectrum needs N >= 1");
  const auto bf = bloch_factors(h);
  std::vector<cplx> out;
  out.reserve(2 * N);
  for (int k = 0; k < N; ++k) {
    const cplx e = std::sqrt(bf.E2(2.0 * std::numbers::pi * k / N));
    out.push_back(e);
    out.push_back(-e);
  }
  return out;
}

/// Plain-text dump: "dim" then one "row col re im" line per nonzero entry.
inline void write_matrix_text(std::ostream& os, const DenseMatrix& M) {
  os << M.rows() << '\n';
  char buf[96];
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      if (M(i, j) != 0.0) {
        std::snprintf(buf, sizeof buf, "%ld %ld %.17g %.17g\n", static_cast<long>(i),
                      static_cast<long>(j), M(i, j).real(), M(i, j).imag());
        os << buf;
      }
}

}  // namespace nhssh
