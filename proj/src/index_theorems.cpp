#include "symflow/index_theorems.hpp"

#include <cmath>
#include <sstream>

namespace symflow {

const char* to_string(ClinicKind kind) {
  switch (kind) {
    case ClinicKind::Heteroclinic: return "heteroclinic";
    case ClinicKind::Homoclinic: return "homoclinic";
    case ClinicKind::FutureHalf: return "future_half";
    case ClinicKind::PastHalf: return "past_half";
  }
  return "?";
}

ClinicKind clinic_kind_from_string(const std::string& s) {
  for (ClinicKind k : {ClinicKind::Heteroclinic, ClinicKind::Homoclinic, ClinicKind::FutureHalf,
                       ClinicKind::PastHalf})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown clinic kind '" + s + "'");
}

int IndexReport::rhs_total() const {
  int total = 0;
  for (const auto& t : rhs) total += t.sign * t.value;
  return total;
}

void IndexReport::require() const {
  if (lhs == rhs_total()) return;
  std::ostringstream os;
  os << identity << ": " << lhs_name << " = " << lhs << " but the right-hand side is "
     << rhs_total();
  throw IdentityMismatch(os.str());
}

namespace {

bool is_half(const ClinicProblem& p) {
  return p.kind == ClinicKind::FutureHalf || p.kind == ClinicKind::PastHalf;
}

void check_problem(const ClinicProblem& p) {
  if (is_half(p) && !p.boundary) throw ConfigError("half-clinic problems need a boundary Lagrangian");
  if (!p.family.b || !p.family.b_plus || !p.family.b_minus)
    throw ConfigError("clinic problems need the limits of B at +-infinity");
}

LagrangianPath boundary_path(const FrameFn& L, double lambda, double a, double b) {
  return LagrangianPath::constant(L(lambda), a, b);
}

IndexReport finish(IndexReport r) {
  r.equal = r.lhs == r.rhs_total();
  return r;
}

}  // namespace

std::map<std::string, double> report_parameters(const ClinicProblem& p) {
  return {{"subspace_horizon", p.opts.horizon},
          {"geo_horizon", p.opts.geo_horizon},
          {"operator_horizon", p.opts.operator_horizon},
          {"grid_n", p.opts.grid_n},
          {"lambda_samples", p.opts.lambda_samples},
          {"horizon_tol", p.opts.subspace.horizon_tol},
          {"step_tol", p.opts.subspace.ctrl.tol},
          {"intersection_tol", p.opts.maslov.intersection_tol},
          {"form_zero_tol", p.opts.maslov.form_zero_tol}};
}

std::map<std::string, double> report_parameters(const BoundedProblem& p) {
  return {{"a", p.a},
          {"b", p.b},
          {"c", p.c},
          {"grid_n", p.opts.grid_n},
          {"lambda_samples", p.opts.lambda_samples},
          {"step_tol", p.opts.ctrl.tol},
          {"intersection_tol", p.opts.maslov.intersection_tol},
          {"form_zero_tol", p.opts.maslov.form_zero_tol}};
}

// ---- h-clinic problems ------------------------------------------------------------------------

LagrangianPairPath geometrical_pair(const ClinicProblem& p, double lambda, double T) {
  check_problem(p);
  const double H = std::max(p.opts.horizon, 2 * T);
  const auto& fam = p.family;
  auto stable = [&] {
    return stable_subspace_path(fam, lambda, 0.0, T, H, p.opts.subspace).path(0.0, T);
  };
  auto unstable = [&] {
    InvariantSubspacePath u = unstable_subspace_path(fam, lambda, -T, 0.0, H, p.opts.subspace);
    return u.path([](double tau) { return -tau; }, 0.0, T);
  };
  switch (p.kind) {
    case ClinicKind::Heteroclinic:
    case ClinicKind::Homoclinic: return {stable(), unstable()};
    case ClinicKind::FutureHalf: return {stable(), boundary_path(p.boundary, lambda, 0.0, T)};
    case ClinicKind::PastHalf: return {boundary_path(p.boundary, lambda, 0.0, T), unstable()};
  }
  throw ConfigError("unknown clinic kind");
}

int geometrical_index(const ClinicProblem& p, double lambda) {
  double T = p.opts.geo_horizon;
  int value = -clm_index(geometrical_pair(p, lambda, T), p.opts.maslov);
  for (int d = 0; d <= p.opts.max_doublings; ++d) {
    const int next = -clm_index(geometrical_pair(p, lambda, 2 * T), p.opts.maslov);
    if (next == value) return value;
    value = next;
    T *= 2;
  }
  throw HorizonTooSmall("geometrical index still changes at tau = " + std::to_string(T));
}

OperatorPath clinic_operator_path(const ClinicProblem& p) {
  check_problem(p);
  const auto& o = p.opts;
  const double T = o.operator_horizon;
  if (!(o.horizon > T)) throw ConfigError("subspace horizon must exceed the operator horizon");
  const auto& fam = p.family;
  switch (p.kind) {
    case ClinicKind::Heteroclinic:
    case ClinicKind::Homoclinic:
      return discretized_path(fam, -T, T, unstable_frame(fam, -T, o.horizon, o.subspace),
                              stable_frame(fam, T, o.horizon, o.subspace), o.grid_n, 0.0, 1.0,
                              o.lambda_samples);
    case ClinicKind::FutureHalf:
      return discretized_path(fam, 0.0, T, p.boundary, stable_frame(fam, T, o.horizon, o.subspace),
                              std::max(16, o.grid_n / 2), 0.0, 1.0, o.lambda_samples);
    case ClinicKind::PastHalf:
      return discretized_path(fam, -T, 0.0, unstable_frame(fam, -T, o.horizon, o.subspace),
                              p.boundary, std::max(16, o.grid_n / 2), 0.0, 1.0, o.lambda_samples);
  }
  throw ConfigError("unknown clinic kind");
}

int spectral_index(const ClinicProblem& p) { return -spectral_flow(clinic_operator_path(p)); }

LagrangianPairPath asymptotic_pair(const ClinicProblem& p) {
  check_problem(p);
  const auto fam = p.family;
  LagrangianPath es([fam](double l) { return asymptotic_subspaces(fam, l).es_plus.basis(); }, 0, 1);
  LagrangianPath eu([fam](double l) { return asymptotic_subspaces(fam, l).eu_minus.basis(); }, 0, 1);
  LagrangianPath L;
  if (is_half(p)) L = LagrangianPath([b = p.boundary](double l) { return b(l).basis(); }, 0, 1);
  switch (p.kind) {
    case ClinicKind::Heteroclinic:
    case ClinicKind::Homoclinic: return {es, eu};
    case ClinicKind::FutureHalf: return {es, L};
    case ClinicKind::PastHalf: return {L, eu};
  }
  throw ConfigError("unknown clinic kind");
}

int asymptotic_term(const ClinicProblem& p) { return clm_index(asymptotic_pair(p), p.opts.maslov); }

LagrangianPairPath zero_section_pair(const ClinicProblem& p) {
  check_problem(p);
  const auto& o = p.opts;
  FrameFn es = memoized(stable_frame(p.family, 0.0, o.horizon, o.subspace));
  FrameFn eu = memoized(unstable_frame(p.family, 0.0, o.horizon, o.subspace));
  auto path = [](FrameFn f) { return LagrangianPath([f](double l) { return f(l).basis(); }, 0, 1); };
  switch (p.kind) {
    case ClinicKind::Heteroclinic:
    case ClinicKind::Homoclinic: return {path(es), path(eu)};
    case ClinicKind::FutureHalf: return {path(es), path(p.boundary)};
    case ClinicKind::PastHalf: return {path(p.boundary), path(eu)};
  }
  throw ConfigError("unknown clinic kind");
}

namespace {

void add_clinic_parameters(IndexReport& r, const ClinicProblem& p) {
  for (const auto& [k, v] : report_parameters(p)) r.parameters[k] = v;
}

}  // namespace

IndexReport verify_theorem1(const ClinicProblem& p) {
  IndexReport r;
  r.identity = "theorem1";
  r.lhs_name = "ispec";
  OperatorPath A = clinic_operator_path(p);
  r.lhs = -spectral_flow(A);
  r.parameters["kernel_tol"] = A.kernel_tol;
  r.rhs.push_back({"igeo_w1", geometrical_index(p, 1.0), +1});
  r.rhs.push_back({"igeo_w0", geometrical_index(p, 0.0), -1});
  r.rhs.push_back({"asymptotic_clm", asymptotic_term(p), +1});
  add_clinic_parameters(r, p);
  r.notes.push_back(std::string("kind = ") + to_string(p.kind));
  return finish(r);
}

IndexReport verify_corollaries(const ClinicProblem& p) {
  check_problem(p);
  if (p.kind == ClinicKind::Heteroclinic)
    throw ConfigError("the corollaries concern homoclinic and half-clinic orbits");
  const auto& fam = p.family;
  // lambda-independent limits (and boundary Lagrangian) are hypotheses of the corollaries
  for (double l : {0.25, 0.5, 0.75, 1.0}) {
    if ((fam.b_plus(l) - fam.b_plus(0.0)).cwiseAbs().maxCoeff() > 1e-12 ||
        (fam.b_minus(l) - fam.b_minus(0.0)).cwiseAbs().maxCoeff() > 1e-12)
      throw HypothesisViolation("the limits of B depend on lambda");
    if (is_half(p) && gap_distance(p.boundary(l), p.boundary(0.0)) > 1e-12)
      throw HypothesisViolation("the boundary Lagrangian depends on lambda");
  }
  const auto& o = p.opts;
  const double T = o.operator_horizon;
  AsymptoticSubspaces as = asymptotic_subspaces(fam, 0.0);
  double t1 = -T, t2 = T;
  int N = o.grid_n;
  BoundaryConditions bc{as.eu_minus, as.es_plus};
  if (p.kind == ClinicKind::FutureHalf) {
    t1 = 0.0;
    N = std::max(16, N / 2);
    bc.left = p.boundary(0.0);
  } else if (p.kind == ClinicKind::PastHalf) {
    t2 = 0.0;
    N = std::max(16, N / 2);
    bc.right = p.boundary(0.0);
  }
  DiscretizedOperator ref = discretize(fam, 0.0, t1, t2, bc, N);
  DiscretizedOperator op = discretize(fam, 1.0, t1, t2, bc, N);

  IndexReport r;
  r.identity = "corollary";
  r.lhs_name = "irel";
  r.lhs = relative_morse_index(ref, op, o.lambda_samples);
  r.parameters["kernel_tol"] = ref.kernel_tol();
  const int g0 = geometrical_index(p, 0.0);
  const int asym = asymptotic_term(p);
  r.rhs.push_back({"igeo_w1", geometrical_index(p, 1.0), +1});
  r.rhs.push_back({"igeo_w0", g0, -1});
  r.rhs.push_back({"asymptotic_clm", asym, +1});
  if (g0 != 0) r.notes.push_back("igeo(w0) is not 0 (stable/unstable splitting of B_0 not transversal?)");
  if (asym != 0) r.notes.push_back("asymptotic term is not 0 although the limits are constant");
  add_clinic_parameters(r, p);
  return finish(r);
}

IndexReport verify_zero_section(const ClinicProblem& p) {
  IndexReport r;
  r.identity = "zero_section";
  r.lhs_name = "iclm_zero_section";
  r.lhs = clm_index(zero_section_pair(p), p.opts.maslov);
  r.rhs.push_back({"ispec", spectral_index(p), +1});
  add_clinic_parameters(r, p);
  return finish(r);
}

IndexReport verify_rectangle(const ClinicProblem& p) {
  IndexReport r;
  r.identity = "rectangle";
  r.lhs_name = "iclm_zero_section";
  r.lhs = clm_index(zero_section_pair(p), p.opts.maslov);
  r.rhs.push_back({"igeo_w1", geometrical_index(p, 1.0), +1});
  r.rhs.push_back({"igeo_w0", geometrical_index(p, 0.0), -1});
  r.rhs.push_back({"asymptotic_clm", asymptotic_term(p), +1});
  add_clinic_parameters(r, p);
  return finish(r);
}

// ---- bounded problems -------------------------------------------------------------------------

namespace {

void check_problem(const BoundedProblem& p) {
  if (!p.left || !p.right) throw ConfigError("bounded problems need both boundary Lagrangians");
  if (!(p.a < p.c && p.c < p.b)) throw ConfigError("split point must lie inside (a, b)");
}

}  // namespace

int bounded_geometrical_index(const BoundedProblem& p, double lambda) {
  return bounded_geometrical_index(p, lambda, p.c);
}

int bounded_geometrical_index(const BoundedProblem& p, double lambda, double c) {
  check_problem(p);
  if (!(p.a < c && c < p.b)) throw ConfigError("split point must lie inside (a, b)");
  const double a = p.a, b = p.b;
  FlowedSubspace W(p.family, lambda, b, p.right(lambda).basis(), a, p.opts.ctrl);
  FlowedSubspace V(p.family, lambda, a, p.left(lambda).basis(), b, p.opts.ctrl);
  auto alpha = [=](double tau) { return std::min(b, c + (tau - a) * (b - c) / (b - a)); };
  auto beta = [=](double tau) { return std::max(a, c - (tau - a) * (c - a) / (b - a)); };
  LagrangianPairPath pair(W.path(alpha, a, b), V.path(beta, a, b));
  return -clm_index(pair, p.opts.maslov);
}

int classical_bounded_index(const BoundedProblem& p, double lambda) {
  check_problem(p);
  FlowedSubspace V(p.family, lambda, p.a, p.left(lambda).basis(), p.b, p.opts.ctrl);
  LagrangianPairPath pair(LagrangianPath::constant(p.right(lambda), p.a, p.b), V.path(p.a, p.b));
  return clm_index(pair, p.opts.maslov);
}

OperatorPath bounded_operator_path(const BoundedProblem& p) {
  check_problem(p);
  return discretized_path(p.family, p.a, p.b, p.left, p.right, p.opts.grid_n, 0.0, 1.0,
                          p.opts.lambda_samples);
}

int bounded_spectral_index(const BoundedProblem& p) {
  return -spectral_flow(bounded_operator_path(p));
}

int boundary_term(const BoundedProblem& p) {
  check_problem(p);
  LagrangianPath M([f = p.right](double l) { return f(l).basis(); }, 0, 1);
  LagrangianPath L([f = p.left](double l) { return f(l).basis(); }, 0, 1);
  return clm_index({M, L}, p.opts.maslov);
}

namespace {

bool constant_frames(const FrameFn& f) {
  for (double l : {0.25, 0.5, 0.75, 1.0})
    if (gap_distance(f(l), f(0.0)) > 1e-12) return false;
  return true;
}

void add_bounded_parameters(IndexReport& r, const BoundedProblem& p) {
  for (const auto& [k, v] : report_parameters(p)) r.parameters[k] = v;
}

}  // namespace

IndexReport verify_theorem2(const BoundedProblem& p) {
  IndexReport r;
  r.identity = "theorem2";
  r.lhs_name = "ispec";
  OperatorPath T = bounded_operator_path(p);
  r.lhs = -spectral_flow(T);
  r.parameters["kernel_tol"] = T.kernel_tol;
  r.rhs.push_back({"igeob_w1", bounded_geometrical_index(p, 1.0), +1});
  r.rhs.push_back({"igeob_w0", bounded_geometrical_index(p, 0.0), -1});
  const int bt = boundary_term(p);
  r.rhs.push_back({"boundary_clm", bt, +1});
  const bool fixed = constant_frames(p.left) && constant_frames(p.right);
  if (fixed) r.notes.push_back("boundary Lagrangians are constant; the boundary term must vanish");
  add_bounded_parameters(r, p);
  r = finish(r);
  if (fixed && bt != 0) r.equal = false;
  return r;
}

IndexReport verify_classical_comparison(const BoundedProblem& p, double lambda) {
  IndexReport r;
  r.identity = "classical_comparison";
  r.lhs_name = "igeob";
  r.lhs = bounded_geometrical_index(p, lambda);
  r.rhs.push_back({"iclm_classical", classical_bounded_index(p, lambda), +1});
  r.parameters["lambda"] = lambda;
  add_bounded_parameters(r, p);
  r = finish(r);
  for (double f : {0.3, 0.5, 0.7}) {
    const double c = p.a + f * (p.b - p.a);
    const int v = bounded_geometrical_index(p, lambda, c);
    r.notes.push_back("igeob at c = " + std::to_string(c) + ": " + std::to_string(v));
    if (v != r.lhs) r.equal = false;
  }
  return r;
}

}  // namespace symflow
