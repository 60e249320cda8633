#include <gtest/gtest.h>

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "symflow/families.hpp"
#include "symflow/ham_flow.hpp"

using namespace symflow;

namespace {

Mat col(double a, double b) {
  Mat F(2, 1);
  F << a, b;
  return F;
}

HamiltonianFamily constant_family(const Mat& B) {
  HamiltonianFamily f;
  f.n = static_cast<int>(B.rows() / 2);
  f.b = [B](double, double) { return B; };
  f.b_plus = [B](double) { return B; };
  f.b_minus = [B](double) { return B; };
  return f;
}

// direction of w'(tau) for w = (sech, -sech'), the homoclinic of the catalog system
LagrangianFrame sech_tangent(double tau) {
  double th = std::tanh(tau);
  return LagrangianFrame(col(-th, 1.0 - 2.0 * th * th));
}

}  // namespace

TEST(Fundamental, ZeroFamilyIsIdentity) {
  Mat G = integrate_fundamental(zero_family(2), 0.0, 0.0, 3.7);
  EXPECT_LT((G - Mat::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Fundamental, ConstantMatchesExponential) {
  Mat B(4, 4);
  B << 2, 0.3, -0.1, 0.5, 0.3, -1, 0.2, 0, -0.1, 0.2, 0.5, 0.4, 0.5, 0, 0.4, 1.5;
  auto fam = constant_family(B);
  for (double t : {-2.0, 0.5, 3.0}) {
    Mat G = integrate_fundamental(fam, 0.0, 0.25, t);
    Mat E = (Mat((t - 0.25) * standard_j(2) * B)).exp();
    EXPECT_LT((G - E).cwiseAbs().maxCoeff() / E.cwiseAbs().maxCoeff(), 1e-9) << "t = " << t;
  }
}

TEST(Fundamental, SechSymplecticCocycle) {
  auto fam = sech_family();
  FlowStats st;
  Mat G = integrate_fundamental(fam, 1.0, -10.0, 10.0, {}, &st);
  EXPECT_LT(st.symplectic_defect, 1e-8);
  EXPECT_GT(st.steps, 0);
  Mat A = integrate_fundamental(fam, 1.0, -10.0, 1.3);
  Mat B = integrate_fundamental(fam, 1.0, 1.3, 10.0);
  // the product cancels growth of size |A| |B|, so compare on that scale
  double scale = A.cwiseAbs().maxCoeff() * B.cwiseAbs().maxCoeff();
  EXPECT_LT((B * A - G).cwiseAbs().maxCoeff() / scale, 1e-9);
  EXPECT_LT((integrate_fundamental(fam, 0.4, 2.0, 2.0) - Mat::Identity(2, 2)).norm(), 1e-15);
}

TEST(Fundamental, DefectStaysSmallOverLongRuns) {
  auto fam = sech_family();
  for (double T : {5.0, 20.0, 40.0}) {
    FlowStats st;
    integrate_fundamental(fam, 0.7, 0.0, T, {}, &st);
    EXPECT_LT(st.symplectic_defect, 1e-8) << "T = " << T;
  }
}

TEST(Asymptotic, Examples) {
  auto fam = constant_hyperbolic_family();
  auto as = asymptotic_subspaces(fam, 0.0);
  EXPECT_NEAR(gap_distance(as.es_plus, LagrangianFrame(col(1, -1))), 0.0, 1e-12);
  EXPECT_NEAR(gap_distance(as.eu_minus, LagrangianFrame(col(1, 1))), 0.0, 1e-12);
  EXPECT_EQ(intersection_dim(as.es_plus, as.eu_minus), 0);
  EXPECT_TRUE(is_lagrangian(as.eu_plus.basis()).lagrangian);
  EXPECT_TRUE(is_lagrangian(as.es_minus.basis()).lagrangian);

  Mat I = Mat::Identity(2, 2);
  EXPECT_THROW(asymptotic_subspaces(constant_family(I), 0.0), NotHyperbolic);
  EXPECT_THROW(validate_family(constant_family(I)), NotHyperbolic);
  EXPECT_NO_THROW(validate_family(sech_family()));
}

TEST(SubspacePath, ConstantFamily) {
  auto fam = constant_hyperbolic_family();
  auto es = stable_subspace_path(fam, 0.0, -5.0, 5.0, 30.0);
  auto eu = unstable_subspace_path(fam, 0.0, -5.0, 5.0, 30.0);
  for (double tau : {-5.0, -1.0, 0.0, 2.5, 5.0}) {
    EXPECT_NEAR(gap_distance(es.eval(tau), LagrangianFrame(col(1, -1))), 0.0, 1e-10);
    EXPECT_NEAR(gap_distance(eu.eval(tau), LagrangianFrame(col(1, 1))), 0.0, 1e-10);
  }
}

TEST(SubspacePath, SechMatchesTangentOfHomoclinic) {
  auto fam = sech_family();
  // E^s is well conditioned for tau >= 0 and E^u for tau <= 0; beyond that the
  // tangent direction is the repelling one of the propagation
  auto es = stable_subspace_path(fam, 1.0, -2.0, 8.0, 30.0);
  auto eu = unstable_subspace_path(fam, 1.0, -8.0, 2.0, 30.0);
  for (double tau = -2.0; tau <= 8.0; tau += 0.5) {
    EXPECT_LT(gap_distance(es.eval(tau), sech_tangent(tau)), 1e-8) << tau;
    EXPECT_LT(gap_distance(eu.eval(-tau), sech_tangent(-tau)), 1e-8) << -tau;
    EXPECT_LT(es.eval(tau).isotropy_defect(), 1e-10);
  }
}

TEST(SubspacePath, GapDecayRateMatchesSpectralGap) {
  auto fam = sech_family();
  for (double lambda : {0.3, 1.0}) {
    auto es = stable_subspace_path(fam, lambda, 0.0, 10.0, 30.0);
    auto asym = asymptotic_subspaces(fam, lambda).es_plus;
    // least-squares slope of log gap over [3, 8]
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    double prev = 1.0;
    for (double tau = 3.0; tau <= 8.0; tau += 0.25, ++m) {
      double g = gap_distance(es.eval(tau), asym);
      EXPECT_LT(g, prev);
      prev = g;
      double y = std::log(g);
      sx += tau; sy += y; sxx += tau * tau; sxy += tau * y;
    }
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    EXPECT_NEAR(-slope, 2.0, 0.4) << "lambda = " << lambda;
    EXPECT_LT(gap_distance(es.eval(10.0), asym), gap_distance(es.eval(5.0), asym));
  }
}

TEST(SubspacePath, EquivarianceAndTimeReversal) {
  auto fam = sech_family();
  const double lambda = 0.6;
  auto eu = unstable_subspace_path(fam, lambda, -6.0, 6.0, 30.0);
  Mat G = integrate_fundamental(fam, lambda, -1.0, 2.0);
  LagrangianFrame moved(G * eu.eval(-1.0).basis());
  EXPECT_LT(gap_distance(moved, eu.eval(2.0)), 1e-9);

  auto rev = time_reversed(fam);
  auto es_rev = stable_subspace_path(rev, lambda, -6.0, 6.0, 30.0);
  for (double tau : {-4.0, 0.0, 1.5})
    EXPECT_LT(gap_distance(es_rev.eval(tau), eu.eval(-tau)), 1e-9);
}

TEST(SubspacePath, IntersectionDimensionIndependentOfTau) {
  auto fam = sech_family();
  for (auto [lambda, expected] : {std::pair{1.0, 1}, std::pair{0.5, 0}, std::pair{1.0 / 3.0, 1}}) {
    auto es = stable_subspace_path(fam, lambda, -5.0, 5.0, 30.0);
    auto eu = unstable_subspace_path(fam, lambda, -5.0, 5.0, 30.0);
    for (int k = 0; k < 10; ++k) {
      double tau = -5.0 + k * 10.0 / 9.0;
      EXPECT_EQ(intersection_dim(es.eval(tau), eu.eval(tau), 1e-6), expected)
          << "lambda " << lambda << " tau " << tau;
    }
  }
}

TEST(SubspacePath, RangeIsEnforced) {
  auto fam = sech_family();
  EXPECT_THROW(stable_subspace_path(fam, 1.0, 0.0, 40.0, 30.0), ConfigError);
  auto es = stable_subspace_path(fam, 1.0, 0.0, 5.0, 30.0);
  EXPECT_THROW(es.eval(-1.0), ConfigError);
}
