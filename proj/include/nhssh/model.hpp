#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "nhssh/errors.hpp"

namespace nhssh {

enum class ModelKind { SSH, Ext1, Ext2 };

inline const char* kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::SSH: return "ssh";
    case ModelKind::Ext1: return "ext1";
    case ModelKind::Ext2: return "ext2";
  }
  return "?";
}

/// One bond class: the amplitude appearing in the A-row equation ("left")
/// and its partner ("right").  Only the product enters t-bar.
struct Bond {
  double left = 1.0;
  double right = 1.0;
  double product() const { return left * right; }
  double mean() const { return std::sqrt(left * right); }
};

/// Real left/right hopping amplitudes per bond class.
///
/// Bond classes are {0,1} for SSH, {0,1,2} for Ext1 and {0,1,-1} for Ext2;
/// the class index doubles as the cell offset of the A site the bond reaches.
class HoppingSet {
 public:
  static HoppingSet ssh(double t0L, double t0R, double t1L, double t1R) {
    return HoppingSet(ModelKind::SSH, {Bond{t0L, t0R}, Bond{t1L, t1R}, Bond{}});
  }
  static HoppingSet ext1(double t0L, double t0R, double t1L, double t1R, double t2L, double t2R) {
    return HoppingSet(ModelKind::Ext1, {Bond{t0L, t0R}, Bond{t1L, t1R}, Bond{t2L, t2R}});
  }
  static HoppingSet ext2(double t0L, double t0R, double t1L, double t1R, double tmL, double tmR) {
    return HoppingSet(ModelKind::Ext2, {Bond{t0L, t0R}, Bond{t1L, t1R}, Bond{tmL, tmR}});
  }
  /// Flat form (t0L, t0R, t1L, t1R[, t3L, t3R]) in the class order of `classes()`.
  static HoppingSet from_flat(ModelKind kind, std::span<const double> v) {
    const std::size_t want = kind == ModelKind::SSH ? 4 : 6;
    if (v.size() != want)
      throw Error(Errc::InvalidAmplitudes, "expected " + std::to_string(want) + " amplitudes");
    std::array<Bond, 3> b{Bond{v[0], v[1]}, Bond{v[2], v[3]}, Bond{}};
    if (want == 6) b[2] = Bond{v[4], v[5]};
    return HoppingSet(kind, b);
  }

  ModelKind kind() const { return kind_; }

  std::span<const int> classes() const {
    static constexpr int ssh[] = {0, 1};
    static constexpr int e1[] = {0, 1, 2};
    static constexpr int e2[] = {0, 1, -1};
    switch (kind_) {
      case ModelKind::SSH: return ssh;
      case ModelKind::Ext1: return e1;
      default: return e2;
    }
  }

  bool has(int cls) const {
    for (int c : classes())
      if (c == cls) return true;
    return false;
  }

  const Bond& bond(int cls) const { return b_[slot(cls)]; }
  double left(int cls) const { return bond(cls).left; }
  double right(int cls) const { return bond(cls).right; }

  HoppingSet with_bond(int cls, Bond b) const {
    auto copy = b_;
    copy[slot(cls)] = b;
    return HoppingSet(kind_, copy);
  }

  std::vector<double> flat() const {
    std::vector<double> out;
    for (int c : classes()) {
      out.push_back(bond(c).left);
      out.push_back(bond(c).right);
    }
    return out;
  }

  bool operator==(const HoppingSet& o) const {
    return kind_ == o.kind_ && flat() == o.flat();
  }

 private:
  HoppingSet(ModelKind kind, std::array<Bond, 3> b) : kind_(kind), b_(b) {
    for (int c : classes()) {
      const Bond& x = b_[slot(c)];
      if (!std::isfinite(x.left) || !std::isfinite(x.right) || x.left == 0.0 || x.right == 0.0)
        throw Error(Errc::InvalidAmplitudes,
                    "bond class " + std::to_string(c) + ": amplitudes must be finite and nonzero");
      if (x.product() <= 0.0)
        throw Error(Errc::InvalidAmplitudes,
                    "bond class " + std::to_string(c) + ": t^L t^R must be positive");
    }
  }

  std::size_t slot(int cls) const {
    if (cls == 0 || cls == 1) return static_cast<std::size_t>(cls);
    if ((cls == 2 && kind_ == ModelKind::Ext1) || (cls == -1 && kind_ == ModelKind::Ext2)) return 2;
    throw Error(Errc::InvalidIndex, std::string("bond class ") + std::to_string(cls) +
                                        " does not exist for " + kind_name(kind_));
  }

  ModelKind kind_;
  std::array<Bond, 3> b_;
};

enum class Parity { Even, Odd };
enum class Boundary { OBC, PBC };

struct ChainSpec {
  int n_cells = 20;
  Parity parity = Parity::Even;
  Boundary boundary = Boundary::OBC;

  int dimension() const { return 2 * n_cells + (parity == Parity::Odd ? 1 : 0); }

  void validate(ModelKind kind) const {
    if (n_cells < 1) throw Error(Errc::ChainTooShort, "need at least one unit cell");
    if (kind != ModelKind::SSH && n_cells < 2 && boundary == Boundary::OBC)
      throw Error(Errc::ChainTooShort, "extended models need N >= 2 under OBC");
    if (parity == Parity::Odd && boundary == Boundary::PBC)
      throw Error(Errc::InvalidRequest, "odd parity is only defined with open boundaries");
  }
};

/// t-bar per class plus the skin factor r.
struct EffectiveParams {
  ModelKind kind = ModelKind::SSH;
  std::array<double, 3> tb{};  // t-bar for classes 0, 1 and the third class (2 or -1)
  double r = 1.0;

  double t0() const { return tb[0]; }
  double t1() const { return tb[1]; }
  double t3() const { return tb[2]; }  // t-bar_2 (Ext1) or t-bar_{-1} (Ext2)

  static EffectiveParams ssh(double t0, double t1, double r = 1.0) {
    return {ModelKind::SSH, {t0, t1, 0.0}, r};
  }
  static EffectiveParams ext1(double t0, double t1, double t2, double r = 1.0) {
    return {ModelKind::Ext1, {t0, t1, t2}, r};
  }
  static EffectiveParams ext2(double t0, double t1, double tm, double r = 1.0) {
    return {ModelKind::Ext2, {t0, t1, tm}, r};
  }
};

enum class Phase { Trivial, Topological };

struct PhaseLabel {
  int nu_bar = 0;
  Phase description = Phase::Trivial;
};

inline EffectiveParams effective_params(const HoppingSet& h) {
  EffectiveParams e;
  e.kind = h.kind();
  e.tb[0] = h.bond(0).mean();
  e.tb[1] = h.bond(1).mean();
  switch (h.kind()) {
    case ModelKind::SSH:
      e.r = std::sqrt(h.right(0) * h.right(1) / (h.left(0) * h.left(1)));
      break;
    case ModelKind::Ext1:
      e.tb[2] = h.bond(2).mean();
      e.r = std::pow(h.right(0) * h.right(2) / (h.left(0) * h.left(2)), 0.25);
      break;
    case ModelKind::Ext2:
      e.tb[2] = h.bond(-1).mean();
      e.r = std::pow(h.right(1) * h.right(-1) / (h.left(1) * h.left(-1)), 0.25);
      break;
  }
  return e;
}

namespace detail {
// lhs/rhs of the quasi-Hermiticity condition: the amplitude it pins and the
// value it must take.
struct QhcSides {
  double lhs, rhs;
};

inline QhcSides qhc_sides(const HoppingSet& h) {
  double radicand = 0.0;
  QhcSides s{};
  if (h.kind() == ModelKind::Ext1) {
    radicand = h.right(0) * h.left(2) / (h.left(0) * h.right(2));
    s.lhs = h.left(1);
    s.rhs = h.right(1);
  } else if (h.kind() == ModelKind::Ext2) {
    radicand = h.right(1) * h.left(-1) / (h.left(1) * h.right(-1));
    s.lhs = h.left(0);
    s.rhs = h.right(0);
  } else {
    throw Error(Errc::NotApplicable, "the SSH model has no quasi-Hermiticity condition");
  }
  if (!(radicand > 0.0)) throw Error(Errc::InvalidAmplitudes, "negative QHC radicand");
  s.rhs *= std::sqrt(radicand);
  return s;
}
}  // namespace detail

/// Relative residual |lhs - rhs| / max(|lhs|, |rhs|) of the QHC; 0 means
/// the model maps exactly onto a Hermitian one.
inline double qhc_residual(const HoppingSet& h) {
  const auto s = detail::qhc_sides(h);
  return std::abs(s.lhs - s.rhs) / std::max(std::abs(s.lhs), std::abs(s.rhs));
}

/// SSH counts as quasi-Hermitian by convention (no extra condition needed).
inline bool is_quasi_hermitian(const HoppingSet& h, double tol = 1e-9) {
  if (h.kind() == ModelKind::SSH) return true;
  return qhc_residual(h) <= tol;
}

/// Overwrite t1^L (Ext1) or t0^L (Ext2) so the QHC holds exactly.
inline HoppingSet qhc_enforce(const HoppingSet& h) {
  const auto s = detail::qhc_sides(h);
  if (h.kind() == ModelKind::Ext1) return h.with_bond(1, Bond{s.rhs, h.right(1)});
  return h.with_bond(0, Bond{s.rhs, h.right(0)});
}

/// Ext1 -> Ext2 bulk relabeling (B_j, A_{j+1}) as the new unit cell.
inline HoppingSet duality_map(const HoppingSet& h) {
  if (h.kind() != ModelKind::Ext1) throw Error(Errc::NotApplicable, "duality_map expects Ext1");
  return HoppingSet::ext2(h.left(1), h.right(1), h.left(0), h.right(0), h.left(2), h.right(2));
}

inline HoppingSet inverse_duality_map(const HoppingSet& h) {
  if (h.kind() != ModelKind::Ext2)
    throw Error(Errc::NotApplicable, "inverse_duality_map expects Ext2");
  return HoppingSet::ext1(h.left(1), h.right(1), h.left(0), h.right(0), h.left(-1), h.right(-1));
}

/// Similarity transform A_j -> rt^j A_j, B_j -> rt^{j+1} B_j.  Every t-bar is
/// unchanged and r is multiplied by rt.  For Ext1 this is exactly
/// (t0L, t1R, t2R) -> (t0L/rt, t1R, rt t2R), (t0R, t1L, t2L) -> (rt t0R, t1L, t2L/rt);
/// the same gauge is applied to SSH and Ext2.
inline HoppingSet scaling_transform(const HoppingSet& h, double rt) {
  if (!(rt > 0.0) || !std::isfinite(rt))
    throw Error(Errc::InvalidAmplitudes, "scaling factor must be positive");
  std::array<double, 6> v{};
  std::size_t i = 0;
  for (int c : h.classes()) {
    // Coefficient of the bond in the A-row equation scales as rt^{c-1}, in the
    // B-row as rt^{1-c}.  For c = 0, -1 the A-row amplitude is t^L; for
    // c = 1, 2 it is t^R.
    const double a = std::pow(rt, c - 1);
    const Bond& b = h.bond(c);
    if (c == 0 || c == -1) {
      v[i++] = b.left * a;
      v[i++] = b.right / a;
    } else {
      v[i++] = b.left / a;
      v[i++] = b.right * a;
    }
  }
  return HoppingSet::from_flat(h.kind(), std::span<const double>(v.data(), i));
}

}  // namespace nhssh
