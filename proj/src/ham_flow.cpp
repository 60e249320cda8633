#include "symflow/ham_flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace symflow {

namespace {

Mat midpoint_step(const HamiltonianFamily& fam, double lambda, double t, double h, const Mat& z) {
  const int m = 2 * fam.n;
  Mat S = standard_j(fam.n) * fam.b(lambda, t + 0.5 * h);
  Mat I = Mat::Identity(m, m);
  Mat lhs = I - 0.5 * h * S;
  return lhs.partialPivLu().solve(z + 0.5 * h * (S * z));
}

double max_abs(const Mat& z) { return z.cwiseAbs().maxCoeff(); }

using AcceptFn = std::function<void(double t, double h, const Mat& z)>;

/// Step-doubling control around symplectic_step. on_accept sees the state before each step.
Mat integrate(const HamiltonianFamily& fam, double lambda, double t0, double t1, Mat z,
              const StepControl& ctrl, FlowStats* stats, int reortho, const AcceptFn& on_accept) {
  FlowStats local;
  FlowStats& st = stats ? *stats : local;
  if (t0 == t1) return z;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double h_max = ctrl.h_max > 0 ? ctrl.h_max : fam.decay_scale / 10.0;
  double t = t0;
  double h = dir * std::min(h_max, std::abs(t1 - t0));
  long since_qr = 0;
  while (dir * (t1 - t) > 0) {
    bool last = std::abs(t1 - t) <= std::abs(h);
    double hs = last ? t1 - t : h;
    Mat big = symplectic_step(fam, lambda, t, hs, z);
    Mat half = symplectic_step(fam, lambda, t, 0.5 * hs, z);
    Mat two = symplectic_step(fam, lambda, t + 0.5 * hs, 0.5 * hs, half);
    double err = max_abs(two - big) / (15.0 * std::max(1.0, max_abs(two)));
    double factor = err == 0.0 ? 2.0 : 0.9 * std::pow(ctrl.tol / err, 0.2);
    if (err <= ctrl.tol) {
      if (on_accept) on_accept(t, hs, z);
      z = std::move(two);
      t = last ? t1 : t + hs;
      ++st.steps;
      st.max_entry = std::max(st.max_entry, max_abs(z));
      if (reortho > 0 && ++since_qr == reortho) {
        z = orthonormalize(z);
        since_qr = 0;
      }
      if (!last) h = dir * std::min(h_max, std::abs(hs) * std::min(2.0, factor));
    } else {
      ++st.rejected;
      h = dir * std::abs(hs) * std::max(0.2, factor);
    }
    if (std::abs(h) < ctrl.h_min * std::max(1.0, std::abs(t))) {
      std::ostringstream os;
      os << "step size underflow at t = " << t;
      throw StepUnderflow(os.str());
    }
    if (st.steps + st.rejected > ctrl.max_steps) throw StepUnderflow("step budget exhausted");
  }
  return z;
}

}  // namespace

HamiltonianFamily time_reversed(const HamiltonianFamily& fam) {
  HamiltonianFamily r = fam;
  auto b = fam.b;
  auto bp = fam.b_plus, bm = fam.b_minus;
  r.b = [b](double l, double s) { return Mat(-b(l, -s)); };
  if (bm) r.b_plus = [bm](double l) { return Mat(-bm(l)); };
  if (bp) r.b_minus = [bp](double l) { return Mat(-bp(l)); };
  return r;
}

HamiltonianFamily reparametrized(const HamiltonianFamily& fam, double l0, double l1) {
  HamiltonianFamily r = fam;
  auto map = [l0, l1](double l) { return l0 + (l1 - l0) * l; };
  auto b = fam.b;
  r.b = [b, map](double l, double t) { return b(map(l), t); };
  if (fam.b_plus) {
    auto bp = fam.b_plus;
    r.b_plus = [bp, map](double l) { return bp(map(l)); };
  }
  if (fam.b_minus) {
    auto bm = fam.b_minus;
    r.b_minus = [bm, map](double l) { return bm(map(l)); };
  }
  return r;
}

void validate_family(const HamiltonianFamily& fam, int lambda_samples, double horizon) {
  if (fam.n < 1) throw ConfigError("family dimension must be positive");
  if (!fam.b) throw ConfigError("family has no coefficient function");
  if (!(fam.decay_scale > 0)) throw ConfigError("decay_scale must be positive");
  if (horizon <= 0) horizon = 30.0 * fam.decay_scale;
  const int m = 2 * fam.n;
  for (int k = 0; k < lambda_samples; ++k) {
    double l = lambda_samples == 1 ? 0.0 : double(k) / (lambda_samples - 1);
    for (double t : {-horizon, -1.0, 0.0, 0.5, horizon}) {
      Mat B = fam.b(l, t);
      if (B.rows() != m || B.cols() != m) throw DimensionMismatch("B has the wrong size");
      if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, max_abs(B)))
        throw ConfigError("B(lambda, t) is not symmetric");
    }
    if (!fam.b_plus || !fam.b_minus) continue;
    for (auto [lim, t] : {std::pair{fam.b_plus(l), horizon}, std::pair{fam.b_minus(l), -horizon}}) {
      hyperbolic_splitting(standard_j(fam.n) * lim);
      double d = max_abs(fam.b(l, t) - lim);
      if (d > 1e-6 * std::max(1.0, max_abs(lim))) {
        std::ostringstream os;
        os << "B(" << l << ", " << t << ") is " << d << " away from its limit";
        throw ConfigError(os.str());
      }
    }
  }
}

Mat symplectic_step(const HamiltonianFamily& fam, double lambda, double t, double h, const Mat& z) {
  static const double c = std::cbrt(2.0);
  static const double w1 = 1.0 / (2.0 - c);
  static const double w0 = -c / (2.0 - c);
  Mat y = midpoint_step(fam, lambda, t, w1 * h, z);
  y = midpoint_step(fam, lambda, t + w1 * h, w0 * h, y);
  return midpoint_step(fam, lambda, t + (w1 + w0) * h, w1 * h, y);
}

Mat propagate(const HamiltonianFamily& fam, double lambda, double t0, double t1, const Mat& z0,
              const StepControl& ctrl, FlowStats* stats, int reortho) {
  return integrate(fam, lambda, t0, t1, z0, ctrl, stats, reortho, nullptr);
}

double relative_symplectic_defect(const Mat& G, double scale) {
  double s = std::max(max_abs(G), scale);
  return symplectic_defect(G) / std::max(1.0, s * s);
}

Mat integrate_fundamental(const HamiltonianFamily& fam, double lambda, double tau, double t,
                          const StepControl& ctrl, FlowStats* stats) {
  const int m = 2 * fam.n;
  FlowStats local;
  FlowStats& st = stats ? *stats : local;
  Mat G = propagate(fam, lambda, tau, t, Mat::Identity(m, m), ctrl, &st, 0);
  st.symplectic_defect = relative_symplectic_defect(G, st.max_entry);
  record_symplectic_defect(st.symplectic_defect);
  return G;
}

AsymptoticSubspaces asymptotic_subspaces(const HamiltonianFamily& fam, double lambda,
                                         double spectral_tol) {
  if (!fam.b_plus || !fam.b_minus) throw ConfigError("family has no asymptotic limits");
  Mat J = standard_j(fam.n);
  HyperbolicSplitting sp = hyperbolic_splitting(J * fam.b_plus(lambda), spectral_tol);
  HyperbolicSplitting sm = hyperbolic_splitting(J * fam.b_minus(lambda), spectral_tol);
  if (sp.v_minus.cols() != fam.n || sm.v_plus.cols() != fam.n)
    throw NotHyperbolic("stable and unstable dimensions differ from n");
  return {LagrangianFrame(sp.v_minus, 1e-8), LagrangianFrame(sm.v_plus, 1e-8),
          LagrangianFrame(sp.v_plus, 1e-8), LagrangianFrame(sm.v_minus, 1e-8)};
}

FlowedSubspace::FlowedSubspace(const HamiltonianFamily& fam, double lambda, double t0,
                               const Mat& f0, double t_end, const StepControl& ctrl)
    : fam_(std::make_shared<const HamiltonianFamily>(fam)), lambda_(lambda), t0_(t0),
      t_end_(t_end) {
  Mat z = integrate(fam, lambda, t0, t_end, orthonormalize(f0), ctrl, &stats_, 10,
                    [this](double t, double h, const Mat& zt) { nodes_.push_back({t, h, zt}); });
  nodes_.push_back({t_end, 0.0, z});
  Mat zn = orthonormalize(z);
  stats_.symplectic_defect = (zn.transpose() * standard_j(fam.n) * zn).cwiseAbs().maxCoeff();
}

Mat FlowedSubspace::raw(double t) const {
  if (nodes_.empty()) throw ConfigError("empty subspace path");
  const double span = std::abs(t_end_ - t0_);
  const double slack = 1e-12 * std::max(1.0, span);
  if (t < lo() - slack || t > hi() + slack) {
    std::ostringstream os;
    os << "time " << t << " outside the stored range [" << lo() << ", " << hi() << "]";
    throw ConfigError(os.str());
  }
  const double dir = t_end_ >= t0_ ? 1.0 : -1.0;
  // last node whose position along the direction does not exceed t
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), dir * t,
                             [dir](double x, const Node& nd) { return x < dir * nd.t; });
  if (it == nodes_.begin()) return nodes_.front().z;
  const Node& nd = *std::prev(it);
  if (nd.t == t || nd.h == 0.0) return nd.z;
  return symplectic_step(*fam_, lambda_, nd.t, t - nd.t, nd.z);
}

LagrangianPath FlowedSubspace::path(double a, double b) const {
  FlowedSubspace self = *this;
  return LagrangianPath([self](double t) { return self.raw(t); }, a, b);
}

LagrangianPath FlowedSubspace::path(std::function<double(double)> phi, double a, double b) const {
  FlowedSubspace self = *this;
  return LagrangianPath([self, phi](double t) { return self.raw(phi(t)); }, a, b);
}

namespace {

InvariantSubspacePath subspace_path(SubspaceKind kind, const HamiltonianFamily& fam, double lambda,
                                    double tau_lo, double tau_hi, double horizon,
                                    const SubspaceOptions& opts) {
  if (!(tau_lo <= tau_hi)) throw ConfigError("subspace range must be ordered");
  AsymptoticSubspaces as = asymptotic_subspaces(fam, lambda);
  const bool stable = kind == SubspaceKind::Stable;
  const LagrangianFrame& asym = stable ? as.es_plus : as.eu_minus;
  const double probe = stable ? tau_hi : tau_lo;
  if (stable ? horizon <= tau_hi : -horizon >= tau_lo)
    throw ConfigError("truncation horizon does not cover the requested range");
  auto build = [&](double T) {
    double start = stable ? T : -T;
    double end = stable ? tau_lo : tau_hi;
    return FlowedSubspace(fam, lambda, start, asym.basis(), end, opts.ctrl);
  };
  double T = horizon;
  FlowedSubspace coarse = build(T);
  for (int k = 0; k <= opts.max_doublings; ++k) {
    FlowedSubspace fine = build(2 * T);
    double g = gap_distance(coarse.eval(probe), fine.eval(probe));
    if (g <= opts.horizon_tol) return InvariantSubspacePath(kind, std::move(fine), asym, 2 * T, g);
    coarse = std::move(fine);
    T *= 2;
  }
  std::ostringstream os;
  os << "horizon " << T << " still moves the subspace at tau = " << probe;
  throw HorizonTooSmall(os.str());
}

}  // namespace

InvariantSubspacePath stable_subspace_path(const HamiltonianFamily& fam, double lambda,
                                           double tau_lo, double tau_hi, double horizon,
                                           const SubspaceOptions& opts) {
  return subspace_path(SubspaceKind::Stable, fam, lambda, tau_lo, tau_hi, horizon, opts);
}

InvariantSubspacePath unstable_subspace_path(const HamiltonianFamily& fam, double lambda,
                                             double tau_lo, double tau_hi, double horizon,
                                             const SubspaceOptions& opts) {
  return subspace_path(SubspaceKind::Unstable, fam, lambda, tau_lo, tau_hi, horizon, opts);
}

}  // namespace symflow
