#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "symflow/families.hpp"
#include "symflow/spectral_flow.hpp"

using namespace symflow;

namespace {

BoundaryConditions lines(double left, double right) {
  return {LagrangianFrame(line(left)), LagrangianFrame(line(right))};
}

// eigenvalues nearest zero, sorted by |mu| then sign
Vec nearest(const SymBand& A, int k) {
  int neg = A.count_below(0.0);
  Vec mu = A.eigenvalues_by_index(neg - k, neg + k - 1);
  std::vector<double> v(mu.data(), mu.data() + mu.size());
  std::sort(v.begin(), v.end(), [](double x, double y) {
    return std::abs(x) != std::abs(y) ? std::abs(x) < std::abs(y) : x < y;
  });
  return Eigen::Map<Vec>(v.data(), k);
}

Mat diag2(double x, double y) {
  Mat D = Mat::Zero(2, 2);
  D(0, 0) = x;
  D(1, 1) = y;
  return D;
}

struct RandomPath {
  Mat S0, S1, S2, S3;
  double w;
  Mat operator()(double s) const {
    return S0 + s * S1 + std::sin(w * s) * S2 + std::cos(1.7 * w * s) * S3;
  }
};

RandomPath random_path(int n, std::mt19937_64& rng) {
  auto sym = [&](double scale) { return oracle::random_symmetric(n, scale, rng); };
  std::uniform_real_distribution<double> U(1.0, 6.0);
  return {sym(1.0), sym(2.0), sym(1.0), sym(0.5), U(rng)};
}

}  // namespace

TEST(SymBand, MatchesDenseEigensolver) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 5 + 7 * trial, kd = 1 + trial % 4;
    Mat A = oracle::random_symmetric(n, 1.0, rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (std::abs(i - j) > kd) A(i, j) = 0.0;
    SymBand B = SymBand::from_dense(A);
    EXPECT_EQ(B.kd(), kd);
    Vec ref = Eigen::SelfAdjointEigenSolver<Mat>(A).eigenvalues();
    Vec all = B.eigenvalues_by_index(0, n - 1);
    EXPECT_LT((all - ref).cwiseAbs().maxCoeff(), 1e-12);
    for (double x : {-0.7, 0.0, 0.3}) EXPECT_EQ(B.count_below(x), (ref.array() < x).count());
    Eigenpairs ep = B.eigenpairs_between(-0.5, 0.5);
    EXPECT_EQ(ep.values.size(), ((ref.array() > -0.5) && (ref.array() <= 0.5)).count());
    for (Eigen::Index c = 0; c < ep.values.size(); ++c)
      EXPECT_LT((A * ep.vectors.col(c) - ep.values(c) * ep.vectors.col(c)).norm(), 1e-10);
    Vec x = Vec::Random(n);
    EXPECT_LT((B.apply(x) - A * x).norm(), 1e-12);
  }
}

TEST(Discretize, FreeOperatorConvergesToMultiplesOfPi) {
  const double expected[5] = {0.0, -M_PI, M_PI, -2 * M_PI, 2 * M_PI};
  std::vector<double> err;
  for (int N : {64, 128, 256, 512}) {
    auto op = discretize(zero_family(1), 0.0, 0.0, 1.0, lines(0, 0), N);
    Vec mu = nearest(op.matrix, 5);
    double e = 0;
    for (double x : expected) e = std::max(e, (mu.array() - x).abs().minCoeff());
    err.push_back(e);
    if (N == 64) {
      // the band solver agrees with a dense solve of the same matrix
      Vec ref = Eigen::SelfAdjointEigenSolver<Mat>(op.matrix.dense()).eigenvalues();
      Vec all = op.matrix.eigenvalues_by_index(0, op.matrix.size() - 1);
      EXPECT_LT((all - ref).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
  for (size_t i = 0; i + 1 < err.size(); ++i) EXPECT_GE(std::log2(err[i] / err[i + 1]), 1.8);
}

TEST(Discretize, RotatedBoundaryShiftsSpectrum) {
  // u' = mu J u rotates u by mu t; u(0) on the q-axis, u(1) on line(theta) gives theta + k pi
  const double theta = 0.4;
  auto op = discretize(zero_family(1), 0.0, 0.0, 1.0, lines(0, theta), 400);
  Vec mu = nearest(op.matrix, 3);
  std::vector<double> want{theta, theta - M_PI, theta + M_PI};
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(mu(k), want[k], 1e-3);
}

TEST(Discretize, ScalarShift) {
  HamiltonianFamily fam = sech_family();
  HamiltonianFamily shifted = fam;
  shifted.b = [fam](double l, double t) { return Mat(fam.b(l, t) + 0.3 * Mat::Identity(2, 2)); };
  BoundaryConditions bc = lines(0.2, 1.1);
  auto A = discretize(fam, 0.7, -3, 3, bc, 200);
  auto B = discretize(shifted, 0.7, -3, 3, bc, 200);
  Vec ea = A.matrix.eigenvalues_by_index(0, A.matrix.size() - 1);
  Vec eb = B.matrix.eigenvalues_by_index(0, B.matrix.size() - 1);
  EXPECT_LT((eb - (ea.array() - 0.3).matrix()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Discretize, FrameChoiceDoesNotChangeSpectrum) {
  std::mt19937_64 rng(5);
  HamiltonianFamily fam = random_bounded_family(2, 9);
  LagrangianFrame L(oracle::frame_of(oracle::random_unitary(2, rng)));
  LagrangianFrame M(oracle::frame_of(oracle::random_unitary(2, rng)));
  Mat O = Eigen::HouseholderQR<Mat>(Mat::Random(2, 2)).householderQ();
  Mat S = Mat::Random(2, 2) + 3 * Mat::Identity(2, 2);
  // W W^T only sees the subspaces, so the matrices are orthogonally similar
  auto A = discretize(fam, 0.5, 0, 1, {L, M}, 128);
  auto B = discretize(fam, 0.5, 0, 1, {LagrangianFrame(L.basis() * O), LagrangianFrame(M.basis() * S)}, 128);
  Vec ea = A.matrix.eigenvalues_by_index(0, A.matrix.size() - 1);
  Vec eb = B.matrix.eigenvalues_by_index(0, B.matrix.size() - 1);
  EXPECT_LT((ea - eb).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Discretize, RejectsCoarseGrid) {
  EXPECT_THROW(discretize(zero_family(1), 0, 0, 1, lines(0, 0), 8), ConfigError);
}

TEST(SpectralFlow, HandComputedPath) {
  OperatorPath P = matrix_path([](double s) { return diag2(-1, -1 + 2 * s); }, 0, 1, 16);
  EXPECT_EQ(spectral_flow_windows(P), 1);
  EXPECT_EQ(spectral_flow_windows(P.reversed()), -1);
  SpectralCrossings c = spectral_crossings(P);
  ASSERT_EQ(c.interior.size(), 1u);
  EXPECT_NEAR(c.interior[0].instant, 0.5, 1e-9);
  ASSERT_EQ(c.interior[0].gamma.rows(), 1);
  EXPECT_NEAR(c.interior[0].gamma(0, 0), 2.0, 1e-6);
  EXPECT_TRUE(c.ends.empty());
  EXPECT_EQ(c.flow, 1);
  EXPECT_EQ(spectral_flow_via_epsilon(P), 1);
}

TEST(SpectralFlow, ConstantInvertibleIsZero) {
  OperatorPath P = matrix_path([](double) { return diag2(-2, 3); }, 0, 1);
  EXPECT_EQ(spectral_flow_windows(P), 0);
  EXPECT_EQ(spectral_flow_crossings(P), 0);
}

TEST(SpectralFlow, EndpointKernel) {
  OperatorPath P = matrix_path([](double s) { return Mat::Constant(1, 1, s - 1); }, 0, 1);
  EXPECT_EQ(spectral_flow_windows(P), 1);
  SpectralCrossings c = spectral_crossings(P);
  EXPECT_TRUE(c.interior.empty());
  ASSERT_EQ(c.ends.size(), 1u);
  EXPECT_EQ(c.ends[0].sig.plus, 1);
  EXPECT_EQ(c.flow, 1);
  EXPECT_EQ(epsilon_spectral_flow(P, 0.1), 0);
  EXPECT_EQ(epsilon_spectral_flow(P, 0.01), 0);
  EXPECT_EQ(spectral_flow_via_epsilon(P), 1);
  EXPECT_THROW(epsilon_spectral_flow(P, 2.0), ConfigError);
  // starting at a kernel and moving up contributes nothing
  OperatorPath Q = matrix_path([](double s) { return Mat::Constant(1, 1, s); }, 0, 1);
  EXPECT_EQ(spectral_flow_windows(Q), 0);
  EXPECT_EQ(spectral_flow_crossings(Q), 0);
  EXPECT_EQ(spectral_flow_via_epsilon(Q), 0);
}

TEST(SpectralFlow, TangentialCrossingIsDegenerate) {
  OperatorPath P = matrix_path([](double s) { return Mat::Constant(1, 1, s * s); }, -1, 1);
  EXPECT_EQ(spectral_flow_windows(P), 0);
  EXPECT_THROW(spectral_crossings(P), DegenerateCrossing);
}

TEST(SpectralFlow, RandomPathsTripleAgreement) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(2, 40);
  auto start = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 50; ++trial) {
    RandomPath R = random_path(dim(rng), rng);
    OperatorPath P = matrix_path(R, 0, 1, 64);
    const int oracle_sf = oracle::dense_spectral_flow(R, 0, 1, P.kernel_tol);
    const int w = spectral_flow_windows(P);
    EXPECT_EQ(w, oracle_sf) << "trial " << trial;
    EXPECT_EQ(spectral_flow_crossings(P), w) << "trial " << trial;
    EXPECT_EQ(spectral_flow_via_epsilon(P), w) << "trial " << trial;
    // additivity
    EXPECT_EQ(spectral_flow_windows(P.restricted(0, 0.37)) +
                  spectral_flow_windows(P.restricted(0.37, 1)),
              w);
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 60);
}

TEST(SpectralFlow, CrossingsMatchDenseEigenvalueTracking) {
  std::mt19937_64 rng(77);
  RandomPath R = random_path(6, rng);
  OperatorPath P = matrix_path(R, 0, 1, 64);
  SpectralCrossings c = spectral_crossings(P);
  for (const auto& x : c.interior) {
    Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(R(x.instant)).eigenvalues();
    EXPECT_LT(ev.cwiseAbs().minCoeff(), 1e-8);
  }
}

TEST(RelativeMorse, IdentityIsZero) {
  auto A = discretize(sech_family(), 0.5, -5, 5, lines(0, 0), 100);
  EXPECT_EQ(relative_morse_index(A, A), 0);
}

TEST(RelativeMorse, SechMatchesPoschlTeller) {
  HamiltonianFamily fam = sech_family();
  AsymptoticSubspaces as = asymptotic_subspaces(fam, 0.0);
  BoundaryConditions bc{as.eu_minus, as.es_plus};
  const double T = 15;
  for (int N : {300, 600}) {
    auto ref = discretize(fam, 0.0, -T, T, bc, N);
    auto op = discretize(fam, 1.0, -T, T, bc, N);
    const int oracle_count = oracle::dirichlet_negative_count(
        [](double t) { return 1.0 - 6.0 / std::pow(std::cosh(t), 2); }, -T, T, 2000);
    EXPECT_EQ(oracle_count, 1);
    EXPECT_EQ(relative_morse_index(ref, op), oracle_count) << "N = " << N;
  }
}

TEST(RelativeMorse, NonlinearInterpolationAgrees) {
  HamiltonianFamily fam = sech_family();
  AsymptoticSubspaces as = asymptotic_subspaces(fam, 0.0);
  BoundaryConditions bc{as.eu_minus, as.es_plus};
  auto ref = discretize(fam, 0.0, -10, 10, bc, 400);
  auto op = discretize(fam, 1.0, -10, 10, bc, 400);
  HamiltonianFamily bump = fam;
  bump.b = [](double, double t) {
    Mat B = Mat::Zero(2, 2);
    B(0, 0) = 2.0 * std::exp(-t * t);
    return B;
  };
  auto C = discretize(bump, 0.0, -10, 10, {LagrangianFrame(line(0)), LagrangianFrame(line(0))}, 400);
  // C - Z is a bounded symmetric perturbation; switching it on and off fixes the ends
  auto Z = discretize(zero_family(1), 0.0, -10, 10, {LagrangianFrame(line(0)), LagrangianFrame(line(0))}, 400);
  SymBand A = ref.matrix, B = op.matrix;
  SymBand D = SymBand::combine(1.0, C.matrix, -1.0, Z.matrix);
  OperatorPath P;
  P.at = [A, B, D](double l, double) {
    return SymBand::combine(1.0, SymBand::blend(A, B, l * l), 4 * l * (1 - l), D);
  };
  P.kernel_tol = ref.kernel_tol();
  EXPECT_EQ(-spectral_flow_windows(P), relative_morse_index(ref, op));
}

namespace {

OperatorPath sech_operator_path(double T, int N, int samples = 64) {
  HamiltonianFamily fam = sech_family();
  return discretized_path(fam, -T, T, unstable_frame(fam, -T, 2 * T), stable_frame(fam, T, 2 * T),
                          N, 0.0, 1.0, samples);
}

}  // namespace

TEST(ClinicOperator, SechFlowAllAlgorithms) {
  OperatorPath P = sech_operator_path(15, 600);
  EXPECT_EQ(kernel_dim(P(0.0), P.kernel_tol), 0);
  EXPECT_EQ(kernel_dim(P(1.0), P.kernel_tol), 1);
  EXPECT_EQ(kernel_dim(P(0.5), P.kernel_tol), 0);
  EXPECT_EQ(spectral_flow_windows(P), -1);
  SpectralCrossings c = spectral_crossings(P);
  ASSERT_EQ(c.interior.size(), 1u);
  EXPECT_NEAR(c.interior[0].instant, 1.0 / 3.0, 2e-3);
  EXPECT_EQ(c.interior[0].sig.value(), -1);
  ASSERT_EQ(c.ends.size(), 1u);
  EXPECT_EQ(c.ends[0].sig.minus, 1);
  EXPECT_EQ(c.flow, -1);
  EXPECT_EQ(spectral_flow_via_epsilon(P), -1);
}

TEST(ClinicOperator, SechFlowStableUnderRefinement) {
  EXPECT_EQ(spectral_flow_windows(sech_operator_path(30, 1200, 32)), -1);
  EXPECT_EQ(spectral_flow_windows(sech_operator_path(15, 1200, 32)), -1);
}

TEST(Equivalence, ConstantHyperbolicIsTrivial) {
  EquivalenceOptions o;
  o.samples = 8;
  EquivalenceReport r = restricted_operator_equivalence(constant_hyperbolic_family(), 0, 1, -2, 2, o);
  EXPECT_TRUE(r.consistent());
  EXPECT_EQ(r.sf_full, 0);
  for (const auto& row : r.rows) EXPECT_EQ(row.ker_full, 0);
}

TEST(Equivalence, SechOperatorsAgree) {
  EquivalenceOptions o;
  o.samples = 24;
  EquivalenceReport r = restricted_operator_equivalence(sech_family(), 0, 1, -3, 3, o);
  EXPECT_TRUE(r.consistent());
  EXPECT_EQ(r.sf_full, -1);
  EXPECT_EQ(r.rows.back().ker_full, 1);
  // shrinking the interval toward the frozen time keeps the flow
  for (double w : {1.0, 0.25}) {
    EquivalenceReport s = restricted_operator_equivalence(sech_family(), 0, 1, -w, w, o);
    EXPECT_EQ(s.sf_restricted, s.sf_frozen) << "half-width " << w;
  }
}
