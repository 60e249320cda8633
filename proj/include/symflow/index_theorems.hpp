#pragma once

#include <map>
#include <string>
#include <vector>

#include "symflow/ham_flow.hpp"
#include "symflow/maslov.hpp"
#include "symflow/spectral_flow.hpp"

namespace symflow {

enum class ClinicKind { Heteroclinic, Homoclinic, FutureHalf, PastHalf };

const char* to_string(ClinicKind kind);
ClinicKind clinic_kind_from_string(const std::string& s);

struct ClinicOptions {
  double horizon = 30.0;           ///< truncation time of the invariant subspaces
  double geo_horizon = 8.0;        ///< tau range [0, T] of the geometrical index, checked at 2T
  double operator_horizon = 15.0;  ///< the line is cut to [-T, T] (half lines to [0, T])
  int grid_n = 600;                ///< grid intervals on the full line; half lines use half
  int lambda_samples = 64;
  int max_doublings = 2;
  SubspaceOptions subspace;
  MaslovOptions maslov;
};

struct ClinicProblem {
  ClinicKind kind = ClinicKind::Homoclinic;
  HamiltonianFamily family;
  FrameFn boundary;  ///< L_lambda, half kinds only
  ClinicOptions opts;
};

struct BoundedOptions {
  int grid_n = 400;
  int lambda_samples = 64;
  StepControl ctrl;
  MaslovOptions maslov;
};

struct BoundedProblem {
  HamiltonianFamily family;
  double a = 0.0, b = 1.0;
  FrameFn left;   ///< L_lambda at t = a
  FrameFn right;  ///< M_lambda at t = b
  double c = 0.5;
  BoundedOptions opts;
};

struct IndexTerm {
  std::string name;
  int value = 0;
  int sign = 1;  ///< contribution is sign * value
};

struct IndexReport {
  std::string identity;
  std::string lhs_name;
  int lhs = 0;
  std::vector<IndexTerm> rhs;
  bool equal = false;
  std::vector<std::string> notes;
  std::map<std::string, double> parameters;  ///< tolerances and horizons used

  int rhs_total() const;
  /// Recomputes equal and throws IdentityMismatch when it fails.
  void require() const;
};

/// Horizons, grid sizes and tolerances a computation on the problem uses.
std::map<std::string, double> report_parameters(const ClinicProblem& p);
std::map<std::string, double> report_parameters(const BoundedProblem& p);

// ---- h-clinic problems ------------------------------------------------------------------------

/// The kind-appropriate pair over tau in [0, T]: (E^s(tau), E^u(-tau)), (E^s(tau), L) or
/// (L, E^u(-tau)).
LagrangianPairPath geometrical_pair(const ClinicProblem& p, double lambda, double T);

/// -iCLM of the geometrical pair on [0, T], with T doubled until the value is stable.
int geometrical_index(const ClinicProblem& p, double lambda);

/// The discretized operator path of the problem on its truncated interval.
OperatorPath clinic_operator_path(const ClinicProblem& p);

/// -sf of the operator path.
int spectral_index(const ClinicProblem& p);

/// The lambda pair at infinity: (E^s(+inf), E^u(-inf)), (E^s(+inf), L) or (L, E^u(-inf)).
LagrangianPairPath asymptotic_pair(const ClinicProblem& p);
int asymptotic_term(const ClinicProblem& p);

/// The lambda pair at tau = 0: (E^s(0), E^u(0)), (E^s(0), L) or (L, E^u(0)).
LagrangianPairPath zero_section_pair(const ClinicProblem& p);

IndexReport verify_theorem1(const ClinicProblem& p);

/// Homotopy family with lambda-independent limits: irel(-Jd/dt - B_0, -Jd/dt - B_1) = igeo(w_1).
IndexReport verify_corollaries(const ClinicProblem& p);

/// iCLM of the zero-section pair against -sf of the operator path.
IndexReport verify_zero_section(const ClinicProblem& p);

/// iCLM of the zero-section pair against the other three sides of the (lambda, tau) rectangle.
IndexReport verify_rectangle(const ClinicProblem& p);

// ---- bounded problems -------------------------------------------------------------------------

/// -iCLM(W(alpha(tau)), V(beta(tau)); tau in [a, b]) with W(s) = Phi(s, b) M, V(s) = Phi(s, a) L,
/// alpha running from c to b and beta from c to a.
int bounded_geometrical_index(const BoundedProblem& p, double lambda);
int bounded_geometrical_index(const BoundedProblem& p, double lambda, double c);

/// iCLM(M, Phi(t, a) L; t in [a, b]).
int classical_bounded_index(const BoundedProblem& p, double lambda);

OperatorPath bounded_operator_path(const BoundedProblem& p);
int bounded_spectral_index(const BoundedProblem& p);

/// iCLM(M_lambda, L_lambda; lambda in [0, 1]).
int boundary_term(const BoundedProblem& p);

IndexReport verify_theorem2(const BoundedProblem& p);

/// bounded_geometrical_index against classical_bounded_index at lambda, and at three split points.
IndexReport verify_classical_comparison(const BoundedProblem& p, double lambda);

}  // namespace symflow
