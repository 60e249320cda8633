#include "symflow/maslov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace symflow {

LagrangianPath::LagrangianPath(Fn f, double a, double b) : f_(std::move(f)), a_(a), b_(b) {
  if (!(a < b)) throw ConfigError("LagrangianPath: need a < b");
  n_ = static_cast<int>(f_(a).cols());
}

LagrangianPath LagrangianPath::constant(const LagrangianFrame& L, double a, double b) {
  Mat F = L.basis();
  return LagrangianPath([F](double) { return F; }, a, b);
}

LagrangianPath LagrangianPath::reversed() const {
  Fn f = f_;
  return LagrangianPath([f](double t) { return f(-t); }, -b_, -a_);
}

LagrangianPath LagrangianPath::restricted(double a, double b) const {
  return LagrangianPath(f_, a, b);
}

LagrangianPath LagrangianPath::reparametrized(std::function<double(double)> phi, double a,
                                              double b) const {
  Fn f = f_;
  return LagrangianPath([f, phi](double t) { return f(phi(t)); }, a, b);
}

LagrangianPath LagrangianPath::transformed(const Mat& G) const {
  Fn f = f_;
  return LagrangianPath([f, G](double t) { return Mat(G * f(t)); }, a_, b_);
}

LagrangianPairPath::LagrangianPairPath(LagrangianPath l1, LagrangianPath l2)
    : first(std::move(l1)), second(std::move(l2)) {
  if (first.a() != second.a() || first.b() != second.b())
    throw ConfigError("pair paths must share their interval");
  if (first.n() != second.n()) throw DimensionMismatch("pair paths of different dimension");
}

Signature signature(const Mat& Q, double zero_tol) {
  Signature s;
  if (Q.size() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (Q + Q.transpose()), Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double x = es.eigenvalues()(i);
    if (x > zero_tol) ++s.plus;
    else if (x < -zero_tol) ++s.minus;
    else ++s.zero;
  }
  return s;
}

namespace {

struct Sample {
  double t;
  LagrangianFrame l1, l2;
  Eigen::VectorXcd spec;  ///< eigenvalues of conj(U2 U2^T) U1 U1^T
  double smin;
};

double smallest_value(const LagrangianFrame& L1, const LagrangianFrame& L2) {
  return transversality_values(L1, L2)(0);
}

Sample sample_at(const LagrangianPairPath& pair, double t) {
  LagrangianFrame l1 = pair.first.eval(t);
  LagrangianFrame l2 = pair.second.eval(t);
  double s = smallest_value(l1, l2);
  CMat u1 = l1.unitary(), u2 = l2.unitary();
  CMat w = (u2 * u2.transpose()).conjugate() * (u1 * u1.transpose());
  Eigen::VectorXcd spec = Eigen::ComplexEigenSolver<CMat>(w, false).eigenvalues();
  return {t, std::move(l1), std::move(l2), std::move(spec), s};
}

/// The pair intersects where an eigenvalue of conj(U2 U2^T) U1 U1^T equals 1. With the
/// eigenvalues matched between two samples, a passage through 1 can only hide between
/// them if each eigenvalue's distances to 1 are small compared with its own motion.
bool may_hide_crossing(const Eigen::VectorXcd& p, const Eigen::VectorXcd& q) {
  const Eigen::Index n = p.size();
  std::vector<bool> used(n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!used[j] && (best < 0 || std::abs(q(j) - p(i)) < std::abs(q(best) - p(i)))) best = j;
    used[best] = true;
    double move = std::abs(q(best) - p(i));
    if (std::abs(p(i) - 1.0) + std::abs(q(best) - 1.0) < 1.5 * move) return true;
  }
  return false;
}

std::vector<Sample> adaptive_samples(const LagrangianPairPath& pair, const MaslovOptions& opts) {
  const double a = pair.a(), b = pair.b();
  const int m = std::max(opts.min_samples, 2);
  const double min_len = 1e-4 * (b - a);
  std::vector<Sample> out;
  out.reserve(m + 1);
  for (int i = 0; i <= m; ++i) {
    double t = (i == m) ? b : a + (b - a) * i / m;
    out.push_back(sample_at(pair, t));
  }
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<Sample> next;
    next.reserve(out.size() * 2);
    for (size_t i = 0; i + 1 < out.size(); ++i) {
      next.push_back(out[i]);
      const Sample& p = out[i];
      const Sample& q = out[i + 1];
      double g1 = gap_distance(p.l1, q.l1), g2 = gap_distance(p.l2, q.l2);
      bool may_hide = q.t - p.t > min_len && may_hide_crossing(p.spec, q.spec);
      if (p.smin < opts.intersection_tol && q.smin < opts.intersection_tol) {
        std::ostringstream os;
        os << "paths intersect on the whole interval [" << p.t << ", " << q.t << "]";
        throw UnresolvedCrossing(os.str());
      }
      if (g1 >= opts.max_gap || g2 >= opts.max_gap || may_hide) {
        next.push_back(sample_at(pair, 0.5 * (p.t + q.t)));
        changed = true;
      }
    }
    next.push_back(out.back());
    out.swap(next);
    if (static_cast<int>(out.size()) > opts.max_samples)
      throw NumericalFailure("path sampling exceeded the sample budget (discontinuous path?)");
  }
  return out;
}

/// Golden-section minimization of the smallest transversality value on [lo, hi].
double locate_minimum(const LagrangianPairPath& pair, double lo, double hi, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double t) {
    return smallest_value(pair.first.eval(t), pair.second.eval(t));
  };
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - g * (hi - lo); f1 = f(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + g * (hi - lo); f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

/// Refines every local minimum of the sampled transversality values. Around each
/// located crossing the two flanks are rescanned on a grid that is geometric away from
/// the crossing, so a second crossing arbitrarily close to the first is still bracketed.
/// skip_front / skip_back drop an endpoint minimum that is just the known crossing.
void scan_minima(const LagrangianPairPath& pair, const std::vector<std::pair<double, double>>& pts,
                 const MaslovOptions& opts, int depth, std::vector<double>& out,
                 bool skip_front = false, bool skip_back = false) {
  const double L = pair.b() - pair.a();
  const double ttol = opts.locate_tol * L;
  const double flank = 1e-6 * L;
  const size_t m = pts.size();
  auto value = [&](double t) { return smallest_value(pair.first.eval(t), pair.second.eval(t)); };
  auto sample = [&](std::vector<double> ts, bool front, bool back) {
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    std::vector<std::pair<double, double>> sub;
    for (double t : ts) sub.emplace_back(t, value(t));
    scan_minima(pair, sub, opts, depth + 1, out, front, back);
  };
  auto uniform = [](double lo, double hi) {
    std::vector<double> ts;
    for (int j = 0; j <= 16; ++j) ts.push_back(lo + (hi - lo) * j / 16);
    return ts;
  };
  auto rescan = [&](double lo, double hi) {
    if (depth >= 4 || hi - lo <= 2 * flank) return;
    sample(uniform(lo, hi), false, false);
  };
  // flank of a crossing at t towards `end`
  auto rescan_flank = [&](double t, double end) {
    const double len = std::abs(end - t), dir = end > t ? 1.0 : -1.0;
    if (depth >= 4 || len <= 2 * flank) return;
    std::vector<double> ts = uniform(std::min(t + dir * flank, end), std::max(t + dir * flank, end));
    for (double d = 2 * flank; d < len; d *= 1.5) ts.push_back(t + dir * d);
    sample(ts, dir > 0, dir < 0);
  };
  for (size_t i = 0; i < m; ++i) {
    if ((i == 0 && skip_front) || (i + 1 == m && skip_back)) continue;
    bool left_ok = (i == 0) || pts[i].second <= pts[i - 1].second;
    bool right_ok = (i + 1 == m) || pts[i].second <= pts[i + 1].second;
    if (!(left_ok && right_ok)) continue;
    double lo = pts[i == 0 ? 0 : i - 1].first;
    double hi = pts[i + 1 == m ? m - 1 : i + 1].first;
    double t = locate_minimum(pair, lo, hi, ttol);
    double v = value(t);
    if (v < opts.intersection_tol) {
      out.push_back(t);
      rescan_flank(t, lo);
      rescan_flank(t, hi);
    } else if (v < 0.05 && v < 0.5 * std::min(pts[i == 0 ? 0 : i - 1].second,
                                              pts[i + 1 == m ? m - 1 : i + 1].second)) {
      // a shallow dip may hide a crossing pair
      rescan(lo, hi);
    }
  }
}

Mat frame_derivative(const LagrangianPath& L, double t0, const Mat& X0, double h) {
  auto Y = [&](double t) -> Mat {
    Mat X = L.raw(t);
    return X * (X0.transpose() * X).inverse();
  };
  const double a = L.a(), b = L.b();
  if (t0 - h >= a && t0 + h <= b) {
    auto D = [&](double s) -> Mat { return (Y(t0 + s) - Y(t0 - s)) / (2 * s); };
    return (4.0 * D(0.5 * h) - D(h)) / 3.0;
  }
  const double dir = (t0 + 2 * h <= b) ? 1.0 : -1.0;
  Mat Y0 = Y(t0);
  auto D = [&](double s) -> Mat {
    double hs = dir * s;
    return (-3.0 * Y0 + 4.0 * Y(t0 + hs) - Y(t0 + 2 * hs)) / (2 * hs);
  };
  return (4.0 * D(0.5 * h) - D(h)) / 3.0;
}

}  // namespace

std::vector<double> adaptive_grid(const LagrangianPairPath& pair, const MaslovOptions& opts) {
  std::vector<double> ts;
  for (const Sample& s : adaptive_samples(pair, opts)) ts.push_back(s.t);
  return ts;
}

Mat path_form(const LagrangianPath& L, double t0, const Mat& V, const MaslovOptions& opts) {
  const int n = L.n();
  Mat X0 = orthonormalize(L.raw(t0));
  double h = opts.deriv_step * (L.b() - L.a());
  Mat dY = frame_derivative(L, t0, X0, h);
  Mat Q = V.transpose() * standard_j(n).transpose() * dY * X0.transpose() * V;
  return 0.5 * (Q + Q.transpose());
}

Mat crossing_form(const LagrangianPairPath& pair, double t0, const MaslovOptions& opts) {
  LagrangianFrame l1 = pair.first.eval(t0);
  LagrangianFrame l2 = pair.second.eval(t0);
  Mat V = intersection_basis(l1, l2, opts.intersection_tol);
  if (V.cols() == 0) return Mat(0, 0);
  return path_form(pair.first, t0, V, opts) - path_form(pair.second, t0, V, opts);
}

std::vector<Crossing> find_crossings(const LagrangianPairPath& pair, const MaslovOptions& opts) {
  std::vector<Sample> s = adaptive_samples(pair, opts);
  const double a = pair.a(), b = pair.b();
  const double tol = opts.intersection_tol;
  const double ttol = opts.locate_tol * (b - a);

  std::vector<double> instants;
  if (s.front().smin < tol) instants.push_back(a);
  if (s.back().smin < tol) instants.push_back(b);
  std::vector<std::pair<double, double>> pts;
  for (const Sample& x : s) pts.emplace_back(x.t, x.smin);
  scan_minima(pair, pts, opts, 0, instants);
  instants.erase(std::remove_if(instants.begin(), instants.end(),
                                [&](double t) {
                                  return (t != a && t - a < 1e3 * ttol && s.front().smin < tol) ||
                                         (t != b && b - t < 1e3 * ttol && s.back().smin < tol);
                                }),
                 instants.end());
  std::sort(instants.begin(), instants.end());
  std::vector<double> uniq;
  for (double t : instants)
    if (uniq.empty() || t - uniq.back() > 1e3 * ttol) uniq.push_back(t);

  std::vector<Crossing> out;
  for (double t : uniq) {
    Crossing c;
    c.instant = t;
    LagrangianFrame l1 = pair.first.eval(t), l2 = pair.second.eval(t);
    c.dim = intersection_dim(l1, l2, tol);
    c.form = crossing_form(pair, t, opts);
    c.sig = signature(c.form, opts.form_zero_tol);
    out.push_back(std::move(c));
  }
  return out;
}

int clm_index_regular(const LagrangianPairPath& pair, const MaslovOptions& opts) {
  int total = 0;
  for (const Crossing& c : find_crossings(pair, opts)) {
    if (!c.regular()) {
      std::ostringstream os;
      os << "degenerate crossing at t = " << c.instant;
      throw DegenerateCrossing(os.str());
    }
    if (c.instant == pair.a()) total += c.sig.minus;
    else if (c.instant == pair.b()) total -= c.sig.plus;
    else total -= c.sig.value();
  }
  return total;
}

int clm_index(const LagrangianPairPath& pair, const MaslovOptions& opts) {
  try {
    return clm_index_regular(pair, opts);
  } catch (const NumericalFailure& e) {
    if (!dynamic_cast<const DegenerateCrossing*>(&e) && !dynamic_cast<const UnresolvedCrossing*>(&e))
      throw;
  }
  const int n = pair.first.n();
  for (double scale : {1.0, 0.1, 10.0}) {
    std::vector<int> vals;
    for (double eps : opts.epsilons) {
      LagrangianPairPath rotated(pair.first.transformed(rotation(n, eps * scale)), pair.second);
      try {
        vals.push_back(clm_index_regular(rotated, opts));
      } catch (const DegenerateCrossing&) {
        break;
      } catch (const UnresolvedCrossing&) {
        break;
      }
    }
    if (vals.size() == opts.epsilons.size() &&
        std::all_of(vals.begin(), vals.end(), [&](int v) { return v == vals.front(); }))
      return vals.front();
  }
  throw UnresolvedCrossing("no stable rotation plateau for a degenerate pair");
}

int rs_index_twice(const LagrangianPairPath& pair, const MaslovOptions& opts) {
  int total = 0;
  for (const Crossing& c : find_crossings(pair, opts)) {
    if (!c.regular()) throw DegenerateCrossing("rs_index needs regular crossings");
    bool end = (c.instant == pair.a() || c.instant == pair.b());
    total += (end ? 1 : 2) * c.sig.value();
  }
  return total;
}

double rs_index(const LagrangianPairPath& pair, const MaslovOptions& opts) {
  return 0.5 * rs_index_twice(pair, opts);
}

}  // namespace symflow
