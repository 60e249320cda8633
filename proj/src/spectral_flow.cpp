#include "symflow/spectral_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <unsupported/Eigen/MatrixFunctions>

namespace symflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LagrangianFrame project_onto(const LagrangianFrame& target, const LagrangianFrame& ref) {
  Mat X = target.basis() * (target.basis().transpose() * ref.basis());
  Eigen::JacobiSVD<Mat> svd(target.basis().transpose() * ref.basis());
  // A reference at right angles to the target has no usable projection.
  if (svd.singularValues().minCoeff() < 1e-3) return target;
  return LagrangianFrame(X, 1e-8);
}

}  // namespace

BoundaryConditions aligned_to(const BoundaryConditions& bc, const BoundaryConditions& ref) {
  return {project_onto(bc.left, ref.left), project_onto(bc.right, ref.right)};
}

namespace {

struct Gauge {
  CMat UL;
  CMat Z;
  Vec phi;  ///< exp(2 i phi_k) are the eigenvalues of W W^T
};

Gauge make_gauge(const BoundaryConditions& bc, const Vec* reference) {
  const int n = bc.left.n();
  Gauge g;
  g.UL = bc.left.unitary();
  const CMat W = g.UL.adjoint() * bc.right.unitary();
  Eigen::ComplexSchur<CMat> schur(W * W.transpose());
  g.Z = schur.matrixU();
  g.phi.resize(n);
  for (int k = 0; k < n; ++k) {
    const double half = 0.5 * std::arg(schur.matrixT()(k, k));
    if (!reference || reference->size() != n) {
      g.phi(k) = half;
      continue;
    }
    // the branch half + m pi nearest to some reference angle
    double best = kInf;
    for (int j = 0; j < n; ++j) {
      const double cand = half + M_PI * std::round(((*reference)(j) - half) / M_PI);
      if (std::abs(cand - (*reference)(j)) < best) {
        best = std::abs(cand - (*reference)(j));
        g.phi(k) = cand;
      }
    }
  }
  return g;
}

}  // namespace

Vec gauge_angles(const BoundaryConditions& bc, const Vec* reference) {
  Vec phi = make_gauge(bc, reference).phi;
  std::sort(phi.data(), phi.data() + phi.size());
  return phi;
}

DiscretizedOperator discretize(const HamiltonianFamily& fam, double lambda, double t1, double t2,
                               const BoundaryConditions& bc, int N, const Vec* reference) {
  const int n = fam.n;
  if (N < 16) throw ConfigError("discretize: N must be at least 16");
  if (!(t2 > t1)) throw ConfigError("discretize: empty interval");
  if (bc.left.n() != n || bc.right.n() != n)
    throw DimensionMismatch("discretize: boundary frames do not match the family");

  // Gauge: U(s) = U_L exp(i s H) with exp(2 i H) = W W^T, W = U_L^* U_M. W W^T does not
  // depend on the frames chosen; the branch of the half logarithm follows the reference.
  const Gauge g = make_gauge(bc, reference);
  const CMat& UL = g.UL;
  const CMat& Z = g.Z;
  const Vec& theta = g.phi;
  CMat H = Z * theta.cast<std::complex<double>>().asDiagonal() * Z.adjoint();
  H = (0.5 * (H + H.adjoint())).eval();
  const double len = t2 - t1;
  const Mat K = -realify(H) / len;
  auto gauged = [&](double t) {
    const double s = (t - t1) / len;
    Eigen::VectorXcd phase(n);
    for (int k = 0; k < n; ++k) phase(k) = std::polar(1.0, s * theta(k));
    const Mat R = realify(UL * Z * phase.asDiagonal() * Z.adjoint());
    Mat Bt = R.transpose() * fam.b(lambda, t) * R + K;
    return Mat(0.5 * (Bt + Bt.transpose()));
  };

  const double h = len / N;
  const int size = (2 * N + 1) * n;
  SymBand F(size, 2 * n - 1);
  auto q = [&](int j, int c) { return (2 * j) * n + c; };
  auto p = [&](int j, int c) { return (2 * j + 1) * n + c; };  // p at t_j + h/2

  Vec grid(N + 1);
  for (int j = 0; j <= N; ++j) grid(j) = t1 + j * h;
  Vec weight(size);
  for (int j = 0; j <= N; ++j) {
    const double w = (j == 0 || j == N) ? h / 2 : h;
    Mat Bt = gauged(grid(j));
    for (int r = 0; r < n; ++r) {
      weight(q(j, r)) = w;
      for (int c = r; c < n; ++c) F.add(q(j, r), q(j, c), -w * Bt(r, c));
    }
  }
  for (int j = 0; j < N; ++j) {
    Mat Bt = gauged(t1 + (j + 0.5) * h);
    for (int r = 0; r < n; ++r) {
      weight(p(j, r)) = h;
      for (int c = r; c < n; ++c) F.add(p(j, r), p(j, c), -h * Bt(n + r, n + c));
      F.add(q(j, r), p(j, r), 1.0);
      F.add(q(j + 1, r), p(j, r), -1.0);
      for (int c = 0; c < n; ++c) {
        F.add(q(j, r), p(j, c), -0.5 * h * Bt(r, n + c));
        F.add(q(j + 1, r), p(j, c), -0.5 * h * Bt(r, n + c));
      }
    }
  }
  F.scale(weight.cwiseSqrt().cwiseInverse());

  DiscretizedOperator op;
  op.matrix = std::move(F);
  op.grid = std::move(grid);
  op.bc = bc;
  op.n = n;
  op.h = h;
  return op;
}

OperatorPath OperatorPath::reversed() const {
  OperatorPath r = *this;
  auto f = at;
  const double s = a + b;
  r.at = [f, s](double l, double anchor) { return f(s - l, s - anchor); };
  return r;
}

OperatorPath OperatorPath::restricted(double a1, double b1) const {
  if (!(a <= a1 && a1 < b1 && b1 <= b)) throw ConfigError("restricted: bad subinterval");
  OperatorPath r = *this;
  r.a = a1;
  r.b = b1;
  r.samples = std::max(8, static_cast<int>(std::ceil(samples * (b1 - a1) / (b - a))));
  return r;
}

OperatorPath OperatorPath::shifted(double eps) const {
  OperatorPath r = *this;
  auto f = at;
  r.at = [f, eps](double l, double anchor) { return f(l, anchor).shifted(eps); };
  return r;
}

OperatorPath matrix_path(std::function<Mat(double)> f, double a, double b, int samples,
                         double kernel_tol) {
  OperatorPath P;
  P.at = [f = std::move(f)](double l, double) { return SymBand::from_dense(f(l)); };
  P.a = a;
  P.b = b;
  P.samples = samples;
  P.kernel_tol = kernel_tol;
  return P;
}

FrameFn memoized(FrameFn f) {
  auto cache = std::make_shared<std::map<double, LagrangianFrame>>();
  return [f = std::move(f), cache](double l) {
    auto it = cache->find(l);
    if (it != cache->end()) return it->second;
    LagrangianFrame F = f(l);
    cache->emplace(l, F);
    return F;
  };
}

OperatorPath discretized_path(const HamiltonianFamily& fam, double t1, double t2, FrameFn left,
                              FrameFn right, int N, double l0, double l1, int samples) {
  auto L = memoized(std::move(left));
  auto M = memoized(std::move(right));
  // Gauge angles lifted continuously along the sample grid; evaluations between grid points
  // take the branch nearest to the closest grid point.
  auto lift = std::make_shared<std::vector<Vec>>();
  const int m = std::max(samples, 1);
  for (int i = 0; i <= m; ++i) {
    const double l = l0 + (l1 - l0) * i / m;
    lift->push_back(gauge_angles({L(l), M(l)}, lift->empty() ? nullptr : &lift->back()));
  }
  OperatorPath P;
  P.at = [fam, t1, t2, L, M, N, lift, l0, l1, m](double l, double anchor) {
    BoundaryConditions bc{L(l), M(l)};
    if (anchor != l) bc = aligned_to(bc, {L(anchor), M(anchor)});
    const double x = (anchor - l0) / (l1 - l0) * m;
    const int i = std::clamp(static_cast<int>(std::lround(x)), 0, m);
    return discretize(fam, l, t1, t2, bc, N, &(*lift)[i]).matrix;
  };
  P.a = l0;
  P.b = l1;
  P.samples = samples;
  // The gauge rotates the solution at rate |phi| / (t2 - t1), which enters the discretization
  // error of a zero mode like a frequency.
  double rate = 0.0;
  for (const Vec& phi : *lift) rate = std::max(rate, phi.cwiseAbs().maxCoeff() / (t2 - t1));
  P.kernel_tol = kKernelConstant * std::pow((t2 - t1) / N, 2) * std::pow(std::max(1.0, rate), 3);
  return P;
}

int kernel_dim(const SymBand& A, double tol) {
  return A.count_below(tol) - A.count_below(-tol);
}

double smallest_nonzero_abs(const SymBand& A, double tol) {
  const int below = A.count_below(-tol);
  const int upto = A.count_below(tol);
  double best = kInf;
  if (below > 0) best = std::abs(A.eigenvalues_by_index(below - 1, below - 1)(0));
  if (upto < A.size()) best = std::min(best, std::abs(A.eigenvalues_by_index(upto, upto)(0)));
  return best;
}

// ---------------------------------------------------------------------------------------------
// Spectral windows

namespace {

struct Sample {
  double lambda;
  SymBand A;
  Vec near;       ///< eigenvalues closest to 0, ascending
  double radius;  ///< every eigenvalue with |mu| < radius is in near
};

Sample sample_at(const OperatorPath& P, double l, int k = 6) {
  Sample s{l, P(l), Vec(), kInf};
  const int neg = s.A.count_below(0.0);
  const int lo = std::max(neg - k, 0), hi = std::min(neg + k - 1, s.A.size() - 1);
  s.near = s.A.eigenvalues_by_index(lo, hi);
  if (lo > 0) s.radius = std::min(s.radius, std::abs(s.near(0)));
  if (hi < s.A.size() - 1) s.radius = std::min(s.radius, std::abs(s.near(s.near.size() - 1)));
  return s;
}

/// A window half-width a in the widest gap of the pooled |eigenvalues| of the samples.
double choose_window(const std::vector<const Sample*>& ss, double floor) {
  double radius = kInf;
  for (auto* s : ss) radius = std::min(radius, s->radius);
  std::vector<double> xs{0.0};
  for (auto* s : ss)
    for (Eigen::Index i = 0; i < s->near.size(); ++i)
      if (std::abs(s->near(i)) < radius) xs.push_back(std::abs(s->near(i)));
  std::sort(xs.begin(), xs.end());
  double best = -1.0, a = -1.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double lo = xs[i];
    double hi = i + 1 < xs.size() ? xs[i + 1] : radius;
    if (hi <= 2 * floor) continue;
    double width, mid;
    if (std::isinf(hi)) {
      mid = 2 * lo + 1.0;
      width = kInf;
    } else {
      mid = 0.5 * (std::max(lo, 2 * floor) + hi);
      width = hi - std::max(lo, 2 * floor);
    }
    if (width > best) {
      best = width;
      a = mid;
    }
  }
  return a;
}

int window_flow(const OperatorPath& P, const Sample& l, const Sample& r, int depth) {
  const double floor = std::max(P.kernel_tol, 1e-9);
  Sample m = sample_at(P, 0.5 * (l.lambda + r.lambda));
  const double a = choose_window({&l, &m, &r}, floor);
  bool valid = a > 0;
  if (valid) {
    auto inside = [a](const Sample& s) { return s.A.count_below(a) - s.A.count_below(-a); };
    const int k = inside(l);
    if (inside(m) != k || inside(r) != k) valid = false;
  }
  if (valid) {
    auto dim = [&](const Sample& s) {
      return s.A.count_below(a) - s.A.count_below(-P.kernel_tol);
    };
    return dim(r) - dim(l);
  }
  if (depth >= 40 || r.lambda - l.lambda < 1e-12 * (P.b - P.a))
    throw WindowSearchFailure("no valid spectral window near lambda = " +
                              std::to_string(m.lambda));
  return window_flow(P, l, m, depth + 1) + window_flow(P, m, r, depth + 1);
}

}  // namespace

int spectral_flow_windows(const OperatorPath& P) {
  if (!(P.b > P.a)) throw ConfigError("operator path: empty parameter interval");
  const int m = std::max(P.samples, 1);
  Sample prev = sample_at(P, P.a);
  int total = 0;
  for (int i = 1; i <= m; ++i) {
    Sample next = sample_at(P, i == m ? P.b : P.a + (P.b - P.a) * i / m);
    total += window_flow(P, prev, next, 0);
    prev = std::move(next);
  }
  return total;
}

// ---------------------------------------------------------------------------------------------
// Crossing operators

namespace {

Mat times(const SymBand& A, const Mat& V) {
  Mat out(V.rows(), V.cols());
  for (Eigen::Index c = 0; c < V.cols(); ++c) out.col(c) = A.apply(V.col(c));
  return out;
}

/// V^T A'(lambda) V; side = 0 central, +1 forward, -1 backward.
Mat gamma_at(const OperatorPath& P, double l, const Mat& V, double d, int side) {
  auto AV = [&](double x) { return times(P.at(x, l), V); };
  Mat D;
  if (side == 0) {
    D = (AV(l + d) - AV(l - d)) / (2 * d);
  } else {
    const double s = side;
    D = s * (-3 * AV(l) + 4 * AV(l + s * d) - AV(l + 2 * s * d)) / (2 * d);
  }
  Mat G = V.transpose() * D;
  return 0.5 * (G + G.transpose());
}

CrossingOperatorData crossing_data(const OperatorPath& P, double l, int side,
                                   const CrossingOptions& opts) {
  SymBand A = P(l);
  Eigenpairs ep = A.eigenpairs_between(-P.kernel_tol, P.kernel_tol);
  CrossingOperatorData c;
  c.instant = l;
  c.kernel = ep.vectors;
  const double d = opts.deriv_step * (P.b - P.a);
  c.gamma = gamma_at(P, l, ep.vectors, d, side);
  c.sig = signature(c.gamma, opts.gamma_tol);
  if (c.sig.zero > 0)
    throw DegenerateCrossing("degenerate crossing operator at lambda = " + std::to_string(l));
  return c;
}

/// Smallest |eigenvalue| of a symmetric matrix.
double min_abs_eig(const Mat& G) {
  if (G.size() == 0) return kInf;
  return Eigen::SelfAdjointEigenSolver<Mat>(G).eigenvalues().cwiseAbs().minCoeff();
}

void locate(const OperatorPath& P, double lo, int clo, double hi, int chi,
            const CrossingOptions& opts, std::vector<CrossingOperatorData>& out) {
  if (clo == chi) return;
  if (hi - lo <= opts.locate_tol * (P.b - P.a)) {
    CrossingOperatorData c = crossing_data(P, 0.5 * (lo + hi), 0, opts);
    if (c.sig.value() != clo - chi || c.sig.plus + c.sig.minus != c.kernel.cols())
      throw DegenerateCrossing("crossing operator disagrees with the eigenvalue count at lambda = " +
                               std::to_string(c.instant));
    out.push_back(std::move(c));
    return;
  }
  const double mid = 0.5 * (lo + hi);
  const int cm = P(mid).count_below(0.0);
  locate(P, lo, clo, mid, cm, opts, out);
  locate(P, mid, cm, hi, chi, opts, out);
}

}  // namespace

SpectralCrossings spectral_crossings(const OperatorPath& P, const CrossingOptions& opts) {
  if (!(P.b > P.a)) throw ConfigError("operator path: empty parameter interval");
  const int m = std::max(P.samples, 1);
  const double spacing = (P.b - P.a) / m;
  SpectralCrossings res;

  // Endpoint kernels move off zero at rates given by Gamma; step past the tolerance band.
  double inner[2] = {P.a, P.b};
  int inner_count[2];
  for (int e = 0; e < 2; ++e) {
    const double l = e == 0 ? P.a : P.b;
    SymBand A = P(l);
    const int strict = A.count_below(-P.kernel_tol);
    if (kernel_dim(A, P.kernel_tol) == 0) {
      inner_count[e] = strict;
      continue;
    }
    CrossingOperatorData c = crossing_data(P, l, e == 0 ? 1 : -1, opts);
    const double rho = 2 * P.kernel_tol / min_abs_eig(c.gamma) + opts.locate_tol * (P.b - P.a);
    if (rho > 0.1 * (P.b - P.a))
      throw DegenerateCrossing("endpoint kernel leaves zero too slowly at lambda = " +
                               std::to_string(l));
    inner[e] = e == 0 ? P.a + rho : P.b - rho;
    inner_count[e] = strict + (e == 0 ? c.sig.minus : c.sig.plus);
    if (P(inner[e]).count_below(0.0) != inner_count[e])
      throw DegenerateCrossing("eigenvalue crossing next to an endpoint kernel at lambda = " +
                               std::to_string(l));
    res.ends.push_back(std::move(c));
  }

  std::vector<double> ls{inner[0]};
  for (int i = 1; i < m; ++i) {
    double l = P.a + spacing * i;
    if (l > inner[0] && l < inner[1]) ls.push_back(l);
  }
  ls.push_back(inner[1]);
  std::vector<int> counts(ls.size());
  counts.front() = inner_count[0];
  counts.back() = inner_count[1];
  for (size_t i = 1; i + 1 < ls.size(); ++i) counts[i] = P(ls[i]).count_below(0.0);
  for (size_t i = 0; i + 1 < ls.size(); ++i)
    locate(P, ls[i], counts[i], ls[i + 1], counts[i + 1], opts, res.interior);

  for (const auto& c : res.interior) res.flow += c.sig.value();
  for (const auto& c : res.ends)
    res.flow += c.instant == P.a ? -c.sig.minus : c.sig.plus;
  return res;
}

int spectral_flow_crossings(const OperatorPath& P, const CrossingOptions& opts) {
  return spectral_crossings(P, opts).flow;
}

// ---------------------------------------------------------------------------------------------
// Shifted flows and relative Morse index

int epsilon_spectral_flow(const OperatorPath& P, double eps) {
  const SymBand A = P(P.a), B = P(P.b);
  const double gap = std::min(smallest_nonzero_abs(A, P.kernel_tol),
                              smallest_nonzero_abs(B, P.kernel_tol));
  if (!(eps > P.kernel_tol)) throw ConfigError("epsilon must exceed the kernel threshold");
  if (!(eps < gap)) throw ConfigError("epsilon must be below the endpoint eigenvalue gap");
  OperatorPath S = P.shifted(eps);
  S.kernel_tol = 0.0;
  return spectral_flow_windows(S);
}

int spectral_flow_via_epsilon(const OperatorPath& P) {
  const SymBand A = P(P.a), B = P(P.b);
  const double gap = std::min(smallest_nonzero_abs(A, P.kernel_tol),
                              smallest_nonzero_abs(B, P.kernel_tol));
  const double hi = std::isinf(gap) ? 1.0 : gap / 3;
  const double lo = std::max(hi / 10, 1.5 * P.kernel_tol);
  if (!(lo < hi)) throw NumericalFailure("no room for epsilon between the kernel threshold and the gap");
  const int f_hi = epsilon_spectral_flow(P, hi);
  const int f_lo = epsilon_spectral_flow(P, lo);
  if (f_hi != f_lo) throw NumericalFailure("epsilon spectral flow not constant over a decade");
  return f_lo - kernel_dim(A, P.kernel_tol) + kernel_dim(B, P.kernel_tol);
}

int relative_morse_index(const DiscretizedOperator& ref, const DiscretizedOperator& op,
                         int samples) {
  if (ref.matrix.size() != op.matrix.size() || ref.grid.size() != op.grid.size() ||
      (ref.grid - op.grid).cwiseAbs().maxCoeff() > 1e-12)
    throw DimensionMismatch("relative_morse_index: operators live on different grids");
  OperatorPath P;
  SymBand A = ref.matrix, B = op.matrix;
  P.at = [A, B](double l, double) { return SymBand::blend(A, B, l); };
  P.samples = samples;
  P.kernel_tol = std::max(ref.kernel_tol(), op.kernel_tol());
  return -spectral_flow_windows(P);
}

// ---------------------------------------------------------------------------------------------
// Invariant-subspace boundary conditions

FrameFn unstable_frame(const HamiltonianFamily& fam, double tau, double horizon,
                       const SubspaceOptions& opts) {
  return [fam, tau, horizon, opts](double l) {
    return unstable_subspace_path(fam, l, tau, tau, horizon, opts).eval(tau);
  };
}

FrameFn stable_frame(const HamiltonianFamily& fam, double tau, double horizon,
                     const SubspaceOptions& opts) {
  return [fam, tau, horizon, opts](double l) {
    return stable_subspace_path(fam, l, tau, tau, horizon, opts).eval(tau);
  };
}

bool EquivalenceReport::consistent() const {
  for (const auto& r : rows)
    if (r.ker_full != r.ker_restricted || r.ker_full != r.ker_frozen) return false;
  return sf_full == sf_restricted && sf_full == sf_frozen;
}

EquivalenceReport restricted_operator_equivalence(const HamiltonianFamily& fam, double l0,
                                                  double l1, double t1, double t2,
                                                  const EquivalenceOptions& opts) {
  const double T = opts.full_horizon;
  if (!(t1 < t2) || t1 < -T || t2 > T) throw ConfigError("restricted interval must lie inside the horizon");
  HamiltonianFamily frozen;
  frozen.n = fam.n;
  frozen.b = [n = fam.n](double, double) { return Mat(Mat::Zero(2 * n, 2 * n)); };
  frozen.decay_scale = fam.decay_scale;

  const double H = opts.subspace_horizon;
  const double t0 = opts.frozen_time;
  FrameFn eu_t0 = memoized(unstable_frame(fam, t0, H, opts.subspace));
  FrameFn es_t0 = memoized(stable_frame(fam, t0, H, opts.subspace));
  OperatorPath full = discretized_path(fam, -T, T, unstable_frame(fam, -T, H, opts.subspace),
                                       stable_frame(fam, T, H, opts.subspace), opts.full_n, l0,
                                       l1, opts.samples);
  OperatorPath restricted = discretized_path(fam, t1, t2, unstable_frame(fam, t1, H, opts.subspace),
                                             stable_frame(fam, t2, H, opts.subspace),
                                             opts.restricted_n, l0, l1, opts.samples);
  OperatorPath frozen_path =
      discretized_path(frozen, 0.0, opts.frozen_length, eu_t0, es_t0, opts.frozen_n, l0, l1,
                       opts.samples);

  EquivalenceReport rep;
  for (int i = 0; i <= opts.samples; ++i) {
    const double l = l0 + (l1 - l0) * i / opts.samples;
    EquivalenceRow row;
    row.lambda = l;
    row.ker_full = kernel_dim(full(l), full.kernel_tol);
    row.ker_restricted = kernel_dim(restricted(l), restricted.kernel_tol);
    row.ker_frozen = kernel_dim(frozen_path(l), frozen_path.kernel_tol);
    rep.rows.push_back(row);
  }
  rep.sf_full = spectral_flow_windows(full);
  rep.sf_restricted = spectral_flow_windows(restricted);
  rep.sf_frozen = spectral_flow_windows(frozen_path);
  return rep;
}

}  // namespace symflow
