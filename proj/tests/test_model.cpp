#include <gtest/gtest.h>

#include <random>

#include "nhssh/model.hpp"

using namespace nhssh;

// --- hand-evaluated oracles ---------------------------------------------

TEST(EffectiveParams, SshHandValues) {
  const auto e = effective_params(HoppingSet::ssh(1, 4, 3, 3));
  EXPECT_DOUBLE_EQ(e.t0(), 2.0);
  EXPECT_DOUBLE_EQ(e.t1(), 3.0);
  EXPECT_DOUBLE_EQ(e.r, 2.0);
}

TEST(EffectiveParams, Ext1HandValues) {
  const auto e = effective_params(HoppingSet::ext1(0.5, 0.125, 2, 2, 4, 1));
  EXPECT_DOUBLE_EQ(e.t0(), 0.25);
  EXPECT_DOUBLE_EQ(e.t1(), 2.0);
  EXPECT_DOUBLE_EQ(e.t3(), 2.0);
  EXPECT_DOUBLE_EQ(e.r, 0.5);
}

TEST(EffectiveParams, Ext2HandValues) {
  const auto e = effective_params(HoppingSet::ext2(4, 4, 1, 0.25, 10, 2.5));
  EXPECT_DOUBLE_EQ(e.t0(), 4.0);
  EXPECT_DOUBLE_EQ(e.t1(), 0.5);
  EXPECT_DOUBLE_EQ(e.t3(), 5.0);
  EXPECT_DOUBLE_EQ(e.r, 0.5);
}

TEST(EffectiveParams, HermitianHasNoSkin) {
  EXPECT_DOUBLE_EQ(effective_params(HoppingSet::ext1(1.5, 1.5, 2, 2, 0.3, 0.3)).r, 1.0);
  EXPECT_DOUBLE_EQ(effective_params(HoppingSet::ext2(-1, -1, 2, 2, 0.3, 0.3)).r, 1.0);
}

TEST(Qhc, ResidualHandValues) {
  EXPECT_NEAR(qhc_residual(HoppingSet::ext1(0.5, 0.125, 2, 2, 4, 1)), 0.0, 1e-15);
  EXPECT_NEAR(qhc_residual(HoppingSet::ext2(4, 4, 1, 0.25, 10, 2.5)), 0.0, 1e-15);
  // 10/3 against (10/3)/2: |a - a/2| / a = 1/2
  EXPECT_NEAR(qhc_residual(HoppingSet::ext1(1, 1, 10.0 / 3, 10.0 / 3, 0.75, 3)), 0.5, 1e-15);
  EXPECT_THROW(qhc_residual(HoppingSet::ssh(1, 2, 3, 4)), Error);
}

TEST(Duality, Fig4ToFig9) {
  const auto d = duality_map(HoppingSet::ext1(4.5, 2, 2, 2, 1, 2.25));
  EXPECT_EQ(d, HoppingSet::ext2(2, 2, 4.5, 2, 1, 2.25));
}

TEST(Scaling, HandValues) {
  const auto h = HoppingSet::ext1(0.5, 0.125, 2, 2, 4, 1);
  const auto s = scaling_transform(h, 2.0);
  const std::vector<double> want{0.25, 0.25, 2, 2, 2, 2};
  const auto got = s.flat();
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_DOUBLE_EQ(got[i], want[i]) << i;
  EXPECT_DOUBLE_EQ(effective_params(s).r, 1.0);
  EXPECT_EQ(scaling_transform(h, 1.0), h);
}

// --- invariants and errors ------------------------------------------------

TEST(HoppingSet, RejectsBadAmplitudes) {
  EXPECT_THROW(HoppingSet::ssh(1, -1, 1, 1), Error);
  EXPECT_THROW(HoppingSet::ssh(0, 1, 1, 1), Error);
  EXPECT_THROW(HoppingSet::ext1(1, 1, 1, 1, NAN, 1), Error);
  EXPECT_NO_THROW(HoppingSet::ext2(-1, -2, 1, 1, 1, 1));
  try {
    HoppingSet::ssh(1, -1, 1, 1);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidAmplitudes);
  }
}

TEST(HoppingSet, BondClassesPerKind) {
  const auto h = HoppingSet::ext2(1, 2, 3, 4, 5, 6);
  EXPECT_DOUBLE_EQ(h.left(-1), 5);
  EXPECT_DOUBLE_EQ(h.right(-1), 6);
  EXPECT_THROW(h.bond(2), Error);
  EXPECT_THROW(HoppingSet::ssh(1, 1, 1, 1).bond(-1), Error);
}

TEST(ChainSpec, Validation) {
  EXPECT_NO_THROW((ChainSpec{1, Parity::Even, Boundary::OBC}.validate(ModelKind::SSH)));
  EXPECT_THROW((ChainSpec{1, Parity::Even, Boundary::OBC}.validate(ModelKind::Ext1)), Error);
  EXPECT_THROW((ChainSpec{4, Parity::Odd, Boundary::PBC}.validate(ModelKind::Ext1)), Error);
  EXPECT_EQ((ChainSpec{20, Parity::Odd, Boundary::OBC}.dimension()), 41);
}

TEST(Qhc, EnforceGivesZeroResidual) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int k = 0; k < 50; ++k) {
    const auto h1 = qhc_enforce(HoppingSet::ext1(u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)));
    const auto h2 = qhc_enforce(HoppingSet::ext2(u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)));
    EXPECT_LT(qhc_residual(h1), 1e-14);
    EXPECT_LT(qhc_residual(h2), 1e-14);
  }
}

TEST(Duality, RoundTrip) {
  const auto h = HoppingSet::ext1(0.7, 1.3, -2, -0.4, 5, 0.1);
  EXPECT_EQ(inverse_duality_map(duality_map(h)), h);
  EXPECT_THROW(duality_map(HoppingSet::ssh(1, 1, 1, 1)), Error);
}

TEST(Scaling, KeepsTbarScalesR) {
  const auto h = HoppingSet::ext2(4, 4, 1, 0.25, 10, 2.5);
  const auto e = effective_params(h), s = effective_params(scaling_transform(h, 3.0));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(e.tb[i], s.tb[i], 1e-14);
  EXPECT_NEAR(s.r, 3.0 * e.r, 1e-14);
  EXPECT_THROW(scaling_transform(h, 0.0), Error);
}
