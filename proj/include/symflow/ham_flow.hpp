#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "symflow/maslov.hpp"
#include "symflow/symplectic.hpp"

namespace symflow {

/// Symmetric coefficients B(lambda, t) of z' = J B z, with their limits at t = +-inf.
struct HamiltonianFamily {
  int n = 1;
  std::function<Mat(double, double)> b;
  std::function<Mat(double)> b_plus;
  std::function<Mat(double)> b_minus;
  double decay_scale = 1.0;
};

/// s -> -B(lambda, -s); swaps the roles of stable and unstable subspaces.
HamiltonianFamily time_reversed(const HamiltonianFamily& fam);

/// Restricts lambda in [0, 1] to the affine image [l0, l1].
HamiltonianFamily reparametrized(const HamiltonianFamily& fam, double l0, double l1);

/// Checks symmetry, hyperbolicity of the limits and convergence on a sample grid.
void validate_family(const HamiltonianFamily& fam, int lambda_samples = 9, double horizon = 0.0);

struct StepControl {
  double tol = 1e-12;    ///< local error per step, relative to the solution size
  double h_max = 0.0;    ///< 0 means decay_scale / 10
  double h_min = 1e-12;  ///< relative to max(1, |t|)
  long max_steps = 50'000'000;
};

struct FlowStats {
  long steps = 0;
  long rejected = 0;
  double max_entry = 0.0;          ///< largest entry of the propagated matrix along the way
  /// |G^T J G - J|_max / max(1, m^2), m the largest entry seen while propagating. Roundoff
  /// is amplified by the intermediate growth, not by the (possibly cancelled) final size.
  double symplectic_defect = 0.0;
};

/// One step of the fourth-order composition of implicit midpoint steps.
Mat symplectic_step(const HamiltonianFamily& fam, double lambda, double t, double h, const Mat& z);

/// Integrates Z' = J B Z from t0 to t1. With reortho > 0 the columns are
/// re-orthonormalized every reortho accepted steps (the span is what matters then).
Mat propagate(const HamiltonianFamily& fam, double lambda, double t0, double t1, const Mat& z0,
              const StepControl& ctrl = {}, FlowStats* stats = nullptr, int reortho = 0);

/// gamma(t) with gamma(tau) = I.
Mat integrate_fundamental(const HamiltonianFamily& fam, double lambda, double tau, double t,
                          const StepControl& ctrl = {}, FlowStats* stats = nullptr);

double relative_symplectic_defect(const Mat& G, double scale = 0.0);

struct AsymptoticSubspaces {
  LagrangianFrame es_plus;   ///< E^s(+inf) = V^-(J B(+inf))
  LagrangianFrame eu_minus;  ///< E^u(-inf) = V^+(J B(-inf))
  LagrangianFrame eu_plus;   ///< V^+(J B(+inf))
  LagrangianFrame es_minus;  ///< V^-(J B(-inf))
};

AsymptoticSubspaces asymptotic_subspaces(const HamiltonianFamily& fam, double lambda,
                                         double spectral_tol = 1e-9);

/// The subspace t -> Phi(t, t0) F0 on an interval, stored as integration nodes.
/// Evaluation integrates one step from the nearest upstream node, so it is smooth in t.
class FlowedSubspace {
 public:
  FlowedSubspace() = default;
  FlowedSubspace(const HamiltonianFamily& fam, double lambda, double t0, const Mat& f0,
                 double t_end, const StepControl& ctrl = {});

  Mat raw(double t) const;
  LagrangianFrame eval(double t) const { return LagrangianFrame(raw(t)); }
  double lo() const { return std::min(t0_, t_end_); }
  double hi() const { return std::max(t0_, t_end_); }
  const FlowStats& stats() const { return stats_; }
  /// Lagrangian path on [a, b] within the stored range.
  LagrangianPath path(double a, double b) const;
  /// Lagrangian path tau -> raw(phi(tau)) on [a, b].
  LagrangianPath path(std::function<double(double)> phi, double a, double b) const;

 private:
  struct Node {
    double t;
    double h;  ///< accepted step leaving this node
    Mat z;
  };
  std::shared_ptr<const HamiltonianFamily> fam_;
  double lambda_ = 0.0;
  double t0_ = 0.0, t_end_ = 0.0;
  std::vector<Node> nodes_;  ///< ordered along the integration direction
  FlowStats stats_;
};

enum class SubspaceKind { Stable, Unstable };

struct SubspaceOptions {
  StepControl ctrl;
  double horizon_tol = 1e-8;  ///< allowed gap change under T -> 2T
  int max_doublings = 4;
};

/// E^s(tau) (or E^u(tau)) on [tau_lo, tau_hi], started from the asymptotic subspace at the
/// truncation time +T (or -T) and propagated toward the range.
class InvariantSubspacePath {
 public:
  InvariantSubspacePath() = default;
  InvariantSubspacePath(SubspaceKind kind, FlowedSubspace flow, LagrangianFrame asymptote,
                        double horizon, double horizon_gap)
      : kind_(kind), flow_(std::move(flow)), asymptote_(std::move(asymptote)),
        horizon_(horizon), horizon_gap_(horizon_gap) {}

  SubspaceKind kind() const { return kind_; }
  LagrangianFrame eval(double tau) const { return flow_.eval(tau); }
  Mat raw(double tau) const { return flow_.raw(tau); }
  const LagrangianFrame& asymptote() const { return asymptote_; }
  double horizon() const { return horizon_; }
  /// gap between the answers for horizons T/2 and T at the end of the range nearest T
  double horizon_gap() const { return horizon_gap_; }
  const FlowedSubspace& flow() const { return flow_; }
  LagrangianPath path(double a, double b) const { return flow_.path(a, b); }
  LagrangianPath path(std::function<double(double)> phi, double a, double b) const {
    return flow_.path(std::move(phi), a, b);
  }

 private:
  SubspaceKind kind_ = SubspaceKind::Stable;
  FlowedSubspace flow_;
  LagrangianFrame asymptote_;
  double horizon_ = 0.0;
  double horizon_gap_ = 0.0;
};

InvariantSubspacePath stable_subspace_path(const HamiltonianFamily& fam, double lambda,
                                           double tau_lo, double tau_hi, double horizon,
                                           const SubspaceOptions& opts = {});

InvariantSubspacePath unstable_subspace_path(const HamiltonianFamily& fam, double lambda,
                                             double tau_lo, double tau_hi, double horizon,
                                             const SubspaceOptions& opts = {});

}  // namespace symflow
