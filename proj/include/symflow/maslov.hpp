#pragma once

#include <functional>
#include <vector>

#include "symflow/symplectic.hpp"

namespace symflow {

/// Continuous map t -> Lagrangian subspace on [a, b]. The callable may return any
/// full-rank 2n x n frame; it is orthonormalized on evaluation.
class LagrangianPath {
 public:
  using Fn = std::function<Mat(double)>;

  LagrangianPath() = default;
  LagrangianPath(Fn f, double a, double b);
  static LagrangianPath constant(const LagrangianFrame& L, double a, double b);

  LagrangianFrame eval(double t) const { return LagrangianFrame(f_(t)); }
  Mat raw(double t) const { return f_(t); }
  double a() const { return a_; }
  double b() const { return b_; }
  int n() const { return n_; }

  /// t -> L(-t) on [-b, -a].
  LagrangianPath reversed() const;
  LagrangianPath restricted(double a, double b) const;
  /// t -> L(phi(t)); phi must map [a', b'] onto [a, b] monotonically.
  LagrangianPath reparametrized(std::function<double(double)> phi, double a, double b) const;
  /// t -> G L(t) for a fixed symplectic G.
  LagrangianPath transformed(const Mat& G) const;

 private:
  Fn f_;
  double a_ = 0.0, b_ = 1.0;
  int n_ = 0;
};

struct LagrangianPairPath {
  LagrangianPath first;
  LagrangianPath second;

  LagrangianPairPath() = default;
  LagrangianPairPath(LagrangianPath l1, LagrangianPath l2);
  double a() const { return first.a(); }
  double b() const { return first.b(); }
  LagrangianPairPath reversed() const { return {first.reversed(), second.reversed()}; }
  LagrangianPairPath swapped() const { return {second, first}; }
  LagrangianPairPath restricted(double a, double b) const {
    return {first.restricted(a, b), second.restricted(a, b)};
  }
};

struct Signature {
  int plus = 0, zero = 0, minus = 0;
  int value() const { return plus - minus; }
};

Signature signature(const Mat& Q, double zero_tol);

struct Crossing {
  double instant = 0.0;
  int dim = 0;
  Mat form;  ///< matrix of q1 - q2 on an orthonormal basis of the intersection
  Signature sig;
  bool regular() const { return sig.zero == 0; }
};

struct MaslovOptions {
  double intersection_tol = 1e-7;  ///< singular value below which the pair intersects
  double locate_tol = 1e-13;       ///< relative t-accuracy of crossing localization
  double deriv_step = 1e-5;        ///< relative to b - a
  double max_gap = 0.1;            ///< per-sample gap bound for both paths
  int min_samples = 64;
  int max_samples = 1 << 16;
  double form_zero_tol = 1e-6;     ///< eigenvalues of the form below this are "zero"
  std::vector<double> epsilons{1e-5, 3e-5, 1e-4};  ///< rotation plateau
};

/// Sample grid on [a, b] with per-step gap below opts.max_gap for both paths.
std::vector<double> adaptive_grid(const LagrangianPairPath& pair, const MaslovOptions& opts);

std::vector<Crossing> find_crossings(const LagrangianPairPath& pair,
                                     const MaslovOptions& opts = {});

Mat crossing_form(const LagrangianPairPath& pair, double t0, const MaslovOptions& opts = {});

/// Form of a single path: Q(v) = d/dt omega(v, w(t)) on the basis V of a subspace of L(t0).
Mat path_form(const LagrangianPath& L, double t0, const Mat& V, const MaslovOptions& opts = {});

/// Crossing-form sum for regular pairs; throws DegenerateCrossing / UnresolvedCrossing.
int clm_index_regular(const LagrangianPairPath& pair, const MaslovOptions& opts = {});

/// CLM index; degenerate pairs go through the e^{eps J} rotation plateau.
int clm_index(const LagrangianPairPath& pair, const MaslovOptions& opts = {});

/// RS index of the pair as a doubled integer (2 * iRS) so half-integers stay exact.
int rs_index_twice(const LagrangianPairPath& pair, const MaslovOptions& opts = {});
double rs_index(const LagrangianPairPath& pair, const MaslovOptions& opts = {});

}  // namespace symflow
