#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "symflow/symplectic.hpp"

using namespace symflow;

namespace {

Mat e(int dim, std::initializer_list<int> idx) {
  Mat F = Mat::Zero(dim, static_cast<int>(idx.size()));
  int c = 0;
  for (int i : idx) F(i, c++) = 1.0;
  return F;
}

Vec unit(int dim, int i) {
  Vec v = Vec::Zero(dim);
  v(i) = 1.0;
  return v;
}

}  // namespace

TEST(Omega, Examples) {
  EXPECT_DOUBLE_EQ(omega(unit(2, 0), unit(2, 1)), 1.0);
  EXPECT_DOUBLE_EQ(omega(unit(4, 0), unit(4, 1)), 0.0);
  Vec u = Vec::Random(6);
  EXPECT_NEAR(omega(u, u), 0.0, 1e-15);
  EXPECT_THROW(omega(unit(2, 0), unit(4, 0)), DimensionMismatch);
}

TEST(Omega, AntisymmetricAndMatchesJ) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    Vec u(6), v(6);
    for (int i = 0; i < 6; ++i) { u(i) = g(rng); v(i) = g(rng); }
    EXPECT_NEAR(omega(u, v), -omega(v, u), 1e-13);
    EXPECT_NEAR(omega(u, v), (standard_j(3) * u).dot(v), 1e-13);
  }
}

TEST(IsLagrangian, Examples) {
  EXPECT_TRUE(is_lagrangian(e(4, {0, 1})).lagrangian);
  Mat A = Mat::Random(3, 3);
  Mat G(6, 3);
  G << Mat::Identity(3, 3), A + A.transpose();
  EXPECT_TRUE(is_lagrangian(G).lagrangian);
  auto bad = is_lagrangian(e(4, {0, 2}));
  EXPECT_FALSE(bad.lagrangian);
  EXPECT_NEAR(bad.defect, 1.0, 1e-14);
  Mat rank1(4, 2);
  rank1 << 1, 2, 0, 0, 0, 0, 0, 0;
  EXPECT_THROW(is_lagrangian(rank1), RankDeficient);
  EXPECT_THROW(LagrangianFrame{e(4, {0, 2})}, NotLagrangian);
}

TEST(Intersection, Examples) {
  LagrangianFrame h(e(4, {0, 1}));
  EXPECT_EQ(intersection_dim(h, h), 2);
  EXPECT_EQ(intersection_dim(LagrangianFrame(e(2, {0})), LagrangianFrame(e(2, {1}))), 0);
  LagrangianFrame m(e(4, {0, 3}));
  EXPECT_EQ(intersection_dim(h, m), 1);
  Mat V = intersection_basis(h, m);
  ASSERT_EQ(V.cols(), 1);
  EXPECT_NEAR(std::abs(V(0, 0)), 1.0, 1e-12);
}

TEST(Intersection, SymmetricAndFrameInvariant) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Mat A = Mat::Random(2, 2), B = Mat::Random(2, 2);
    A = (A + A.transpose()).eval();
    B = (B + B.transpose()).eval();
    // force a one-dimensional intersection through a shared direction
    Vec d = Vec::Random(2).normalized();
    B = B - (d.transpose() * (B - A) * d)(0) * d * d.transpose();
    Mat F1(4, 2), F2(4, 2);
    F1 << Mat::Identity(2, 2), A;
    F2 << Mat::Identity(2, 2), B;
    LagrangianFrame L1(F1), L2(F2);
    int k = intersection_dim(L1, L2, 1e-7);
    EXPECT_EQ(k, intersection_dim(L2, L1, 1e-7));
    Mat C = Mat::Random(2, 2) + 3 * Mat::Identity(2, 2);
    EXPECT_EQ(k, intersection_dim(LagrangianFrame(F1 * C), L2, 1e-7));
  }
}

TEST(Gap, Examples) {
  LagrangianFrame a(e(2, {0})), b(e(2, {1}));
  EXPECT_NEAR(gap_distance(a, a), 0.0, 1e-15);
  EXPECT_NEAR(gap_distance(a, b), 1.0, 1e-15);
  for (double th : {0.1, 0.7, 2.0, 3.0})
    EXPECT_NEAR(gap_distance(a, line(th)), std::abs(std::sin(th)), 1e-13);
}

TEST(Gap, TriangleAndZeroIffEqual) {
  std::mt19937_64 rng(3);
  auto rnd = [&]() {
    Mat A = Mat::Random(2, 2);
    Mat F(4, 2);
    F << Mat::Identity(2, 2), A + A.transpose();
    return LagrangianFrame(F * Mat::Random(2, 2).cwiseAbs().unaryExpr([](double x) { return x + 1; }));
  };
  for (int trial = 0; trial < 50; ++trial) {
    LagrangianFrame x = rnd(), y = rnd(), z = rnd();
    EXPECT_LE(gap_distance(x, z), gap_distance(x, y) + gap_distance(y, z) + 1e-13);
    EXPECT_NEAR(gap_distance(x, y), gap_distance(y, x), 1e-13);
    LagrangianFrame x2(x.basis() * (Mat::Random(2, 2) + 3 * Mat::Identity(2, 2)));
    EXPECT_NEAR(gap_distance(x, x2), 0.0, 1e-12);
    EXPECT_EQ(intersection_dim(x, x2), 2);
  }
}

TEST(Splitting, Examples) {
  Mat D = Mat::Zero(2, 2);
  D.diagonal() << -2, 3;
  auto s = hyperbolic_splitting(D);
  EXPECT_NEAR(std::abs(s.v_minus(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(s.v_plus(1, 0)), 1.0, 1e-14);

  Mat B = Mat::Zero(2, 2);
  B.diagonal() << 1, -1;
  Mat T = standard_j(1) * B;
  Mat expected(2, 2);
  expected << 0, 1, 1, 0;
  EXPECT_TRUE(T.isApprox(expected));
  auto h = hyperbolic_splitting(T);
  Mat vm(2, 1), vp(2, 1);
  vm << 1, -1;
  vp << 1, 1;
  EXPECT_NEAR(gap_distance(LagrangianFrame(h.v_minus), LagrangianFrame(vm)), 0.0, 1e-13);
  EXPECT_NEAR(gap_distance(LagrangianFrame(h.v_plus), LagrangianFrame(vp)), 0.0, 1e-13);

  EXPECT_THROW(hyperbolic_splitting(standard_j(1)), NotHyperbolic);
}

TEST(Splitting, HamiltonianSubspacesAreLagrangianAndInvariant) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Mat A = Mat::Random(4, 4);
    Mat B = A + A.transpose();
    B.diagonal().head(2).array() += 4.0;
    B.diagonal().tail(2).array() -= 4.0;
    Mat T = standard_j(2) * B;
    HyperbolicSplitting s;
    try {
      s = hyperbolic_splitting(T, 1e-6);
    } catch (const NotHyperbolic&) {
      continue;
    }
    EXPECT_TRUE(is_lagrangian(s.v_minus).lagrangian);
    EXPECT_TRUE(is_lagrangian(s.v_plus).lagrangian);
    Mat Pm = s.v_minus * s.v_minus.transpose();
    EXPECT_LT(((Mat::Identity(4, 4) - Pm) * T * s.v_minus).norm(), 1e-10);
    EXPECT_LT((s.p_minus + s.p_plus - Mat::Identity(4, 4)).norm(), 1e-12);
    EXPECT_LT((s.p_minus * s.p_plus).norm(), 1e-9);
  }
}

TEST(Splitting, DefectiveMatrix) {
  Mat T(3, 3);
  T << -1, 1, 0, 0, -1, 0, 0, 0, 2;
  auto s = hyperbolic_splitting(T);
  EXPECT_EQ(s.v_minus.cols(), 2);
  EXPECT_EQ(s.v_plus.cols(), 1);
  EXPECT_LT((s.p_minus * T - T * s.p_minus).norm(), 1e-12);
}

TEST(Realify, UnitaryIsSymplecticOrthogonal) {
  std::mt19937_64 rng(1);
  CMat Z = CMat::Random(3, 3);
  Eigen::HouseholderQR<CMat> qr(Z);
  CMat U = qr.householderQ() * CMat::Identity(3, 3);
  Mat R = realify(U);
  EXPECT_LT(symplectic_defect(R), 1e-13);
  EXPECT_LT((R.transpose() * R - Mat::Identity(6, 6)).norm(), 1e-13);
  EXPECT_LT(symplectic_defect(rotation(3, 0.4)), 1e-15);
}

TEST(InvariantMonitor, TracksWorstDefects) {
  reset_invariant_stats();
  (void)line(0.3);
  (void)line(1.1);
  record_symplectic_defect(1e-13);
  record_symplectic_defect(1e-15);
  InvariantStats s = invariant_stats();
  EXPECT_EQ(s.frames, 2u);
  EXPECT_EQ(s.fundamentals, 2u);
  EXPECT_DOUBLE_EQ(s.max_symplectic_defect, 1e-13);
  EXPECT_LT(s.max_isotropy_defect, 1e-15);
  reset_invariant_stats();
  EXPECT_EQ(invariant_stats().frames, 0u);
}
