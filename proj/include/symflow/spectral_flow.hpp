#pragma once

#include <functional>
#include <vector>

#include "symflow/band.hpp"
#include "symflow/ham_flow.hpp"
#include "symflow/maslov.hpp"

namespace symflow {

struct BoundaryConditions {
  LagrangianFrame left;
  LagrangianFrame right;
};

/// Frames of bc re-expressed as the orthonormalized projections of the reference frames.
/// Smooth in bc near ref and exact at bc == ref; used to keep a gauge continuous in lambda.
BoundaryConditions aligned_to(const BoundaryConditions& bc, const BoundaryConditions& ref);

/// Kernel threshold is kKernelConstant * h^2.
inline constexpr double kKernelConstant = 2.0;

/// -J d/dt - B(lambda, t) on [t1, t2] with u(t1) in bc.left, u(t2) in bc.right.
///
/// The boundary Lagrangians are moved to span{e_1, ..., e_n} by a unitary gauge
/// R(t) = realify(U_left exp(i s(t) H)) with exp(2 i H) = W W^T and W = U_left^* U_right,
/// which turns the conditions into p(t1) = p(t2) = 0.
/// The gauged operator is then discretized on a staggered grid: q at the nodes t_j,
/// p at the midpoints. The matrix is W^{-1/2} F W^{-1/2} where F is the symmetric
/// quadratic form and W the quadrature weights, so it is symmetric by construction.
struct DiscretizedOperator {
  SymBand matrix;
  Vec grid;
  BoundaryConditions bc;
  int n = 1;
  double h = 0.0;
  double asymmetry_defect = 0.0;
  double kernel_tol() const { return kKernelConstant * h * h; }  ///< for slowly turning gauges
};

/// With a reference, each gauge angle takes the branch nearest to it; this keeps the matrix
/// continuous along a parameter path. Without one the principal branch (-pi/2, pi/2] is used.
DiscretizedOperator discretize(const HamiltonianFamily& fam, double lambda, double t1, double t2,
                               const BoundaryConditions& bc, int N,
                               const Vec* reference = nullptr);

/// Sorted gauge angles phi with exp(2 i phi) the eigenvalues of W W^T.
Vec gauge_angles(const BoundaryConditions& bc, const Vec* reference = nullptr);

/// lambda -> symmetric matrix. at(lambda, anchor) may pick a basis gauge that depends on
/// anchor; the spectrum must not. Derivatives in lambda are taken with a fixed anchor.
struct OperatorPath {
  std::function<SymBand(double, double)> at;
  double a = 0.0, b = 1.0;
  int samples = 64;
  double kernel_tol = 1e-10;

  SymBand operator()(double lambda) const { return at(lambda, lambda); }
  OperatorPath reversed() const;
  OperatorPath restricted(double a1, double b1) const;
  OperatorPath shifted(double eps) const;  ///< A - eps I
};

OperatorPath matrix_path(std::function<Mat(double)> f, double a, double b, int samples = 64,
                         double kernel_tol = 1e-9);

using FrameFn = std::function<LagrangianFrame(double)>;

/// Caches evaluations (boundary frames from flows are expensive and are asked for repeatedly).
FrameFn memoized(FrameFn f);

/// lambda -> discretize(fam, lambda, [t1, t2], (left(lambda), right(lambda)), N).
/// The kernel threshold is kKernelConstant h^2 max(1, w)^3, w the largest gauge rotation rate.
OperatorPath discretized_path(const HamiltonianFamily& fam, double t1, double t2, FrameFn left,
                              FrameFn right, int N, double l0 = 0.0, double l1 = 1.0,
                              int samples = 64);

int kernel_dim(const SymBand& A, double tol);
/// Smallest |mu| among eigenvalues with |mu| > tol (infinity if none).
double smallest_nonzero_abs(const SymBand& A, double tol);

int spectral_flow_windows(const OperatorPath& path);

struct CrossingOperatorData {
  double instant = 0.0;
  Mat kernel;
  Mat gamma;
  Signature sig;
};

struct SpectralCrossings {
  std::vector<CrossingOperatorData> interior;
  std::vector<CrossingOperatorData> ends;  ///< zero, one or two entries at a and b
  int flow = 0;
};

struct CrossingOptions {
  double gamma_tol = 1e-6;      ///< |eigenvalue of Gamma| below this is degenerate
  double locate_tol = 1e-10;    ///< relative to b - a
  double deriv_step = 1e-4;     ///< relative to b - a
};

SpectralCrossings spectral_crossings(const OperatorPath& path, const CrossingOptions& opts = {});
int spectral_flow_crossings(const OperatorPath& path, const CrossingOptions& opts = {});

/// sf of A - eps I; eps must lie above the kernel threshold and below every nonzero
/// |eigenvalue| at both ends.
int epsilon_spectral_flow(const OperatorPath& path, double eps);

/// sf_eps - dim ker A_a + dim ker A_b, checked to be constant over a decade of eps.
int spectral_flow_via_epsilon(const OperatorPath& path);

inline int spectral_flow(const OperatorPath& path) { return spectral_flow_windows(path); }

/// -sf of lambda -> (1 - lambda) ref + lambda op.
int relative_morse_index(const DiscretizedOperator& ref, const DiscretizedOperator& op,
                         int samples = 64);

/// Boundary frame providers for clinic problems: E^u_lambda(tau) and E^s_lambda(tau).
FrameFn unstable_frame(const HamiltonianFamily& fam, double tau, double horizon,
                       const SubspaceOptions& opts = {});
FrameFn stable_frame(const HamiltonianFamily& fam, double tau, double horizon,
                     const SubspaceOptions& opts = {});

struct EquivalenceOptions {
  double full_horizon = 15.0;  ///< truncation of the full line
  int full_n = 600;
  int restricted_n = 200;
  int frozen_n = 200;
  double frozen_length = 4.0;
  double frozen_time = 0.0;
  double subspace_horizon = 30.0;
  int samples = 32;
  SubspaceOptions subspace;
};

struct EquivalenceRow {
  double lambda = 0.0;
  int ker_full = 0, ker_restricted = 0, ker_frozen = 0;
};

struct EquivalenceReport {
  std::vector<EquivalenceRow> rows;
  int sf_full = 0, sf_restricted = 0, sf_frozen = 0;
  bool consistent() const;
};

/// Kernel dimensions and spectral flows of the full-horizon operator, the operator on
/// [t1, t2] with invariant-subspace conditions, and the frozen operator -J d/dt with
/// conditions (E^u(t0), E^s(t0)).
EquivalenceReport restricted_operator_equivalence(const HamiltonianFamily& fam, double l0,
                                                  double l1, double t1, double t2,
                                                  const EquivalenceOptions& opts = {});

}  // namespace symflow
