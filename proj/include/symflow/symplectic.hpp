#pragma once

#include <Eigen/Dense>
#include <complex>

#include "symflow/errors.hpp"

namespace symflow {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kRankTol = 1e-8;
inline constexpr double kIsotropyTol = 1e-10;
inline constexpr double kIntersectionTol = 1e-8;

/// J = [[0, -I], [I, 0]] on R^{2n}.
Mat standard_j(int n);

/// omega(u, v) = <Ju, v>.
double omega(const Vec& u, const Vec& v);

/// Thin QR with a positive R diagonal, so the result depends continuously on the input.
/// Throws RankDeficient if the smallest singular value falls below rank_tol (relative).
Mat orthonormalize(const Mat& F, double rank_tol = kRankTol);

struct LagrangianCheck {
  bool lagrangian;
  double defect;  ///< max-abs entry of F^T J F after orthonormalization
};

LagrangianCheck is_lagrangian(const Mat& F, double tol = kIsotropyTol);

/// Orthonormal frame of a Lagrangian subspace of R^{2n}.
class LagrangianFrame {
 public:
  LagrangianFrame() = default;
  /// Orthonormalizes F; throws NotLagrangian if the isotropy defect exceeds tol.
  explicit LagrangianFrame(const Mat& F, double tol = kIsotropyTol);

  const Mat& basis() const { return basis_; }
  int n() const { return static_cast<int>(basis_.cols()); }
  double isotropy_defect() const { return defect_; }
  /// Orthogonal projector onto the subspace.
  Mat projector() const { return basis_ * basis_.transpose(); }
  /// U = Q + iP for the orthonormal frame (Q; P).
  CMat unitary() const;

 private:
  Mat basis_;
  double defect_ = 0.0;
};

/// Real 2n x 2n representation [[Re, -Im], [Im, Re]] of an n x n complex matrix.
Mat realify(const CMat& U);

/// e^{theta J}; rotates every Lagrangian unitary by e^{i theta}.
Mat rotation(int n, double theta);

/// The span of (cos theta, sin theta) in R^2.
LagrangianFrame line(double theta);

/// Singular values (ascending) of X1^T J X2; the zeros count the intersection.
Vec transversality_values(const LagrangianFrame& L1, const LagrangianFrame& L2);

int intersection_dim(const LagrangianFrame& L1, const LagrangianFrame& L2,
                     double tol = kIntersectionTol);

/// Orthonormal basis (2n x k) of L1 ∩ L2, with k = intersection_dim.
Mat intersection_basis(const LagrangianFrame& L1, const LagrangianFrame& L2,
                       double tol = kIntersectionTol);

/// Operator norm of the difference of orthogonal projectors.
double gap_distance(const LagrangianFrame& L1, const LagrangianFrame& L2);

struct HyperbolicSplitting {
  Mat v_minus;  ///< orthonormal basis, Re < 0 part
  Mat v_plus;   ///< orthonormal basis, Re > 0 part
  Mat p_minus;
  Mat p_plus;
};

/// Spectral splitting by reordered real Schur forms. Throws NotHyperbolic.
HyperbolicSplitting hyperbolic_splitting(const Mat& T, double spectral_tol = 1e-9);

/// Max-abs entry of S^T J S - J.
double symplectic_defect(const Mat& S);

/// Worst invariant defects seen in this process. Every accepted LagrangianFrame and every
/// fundamental matrix from integrate_fundamental reports here.
struct InvariantStats {
  double max_isotropy_defect = 0.0;
  double max_symplectic_defect = 0.0;  ///< relative, as in relative_symplectic_defect
  long frames = 0;
  long fundamentals = 0;
};

InvariantStats invariant_stats();
void reset_invariant_stats();
void record_symplectic_defect(double relative_defect);

}  // namespace symflow
