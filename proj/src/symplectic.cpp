#include "symflow/symplectic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "lapack.hpp"

namespace symflow {

namespace {

void require_even(const Mat& F, const char* what) {
  if (F.rows() % 2 != 0 || F.rows() == 0)
    throw DimensionMismatch(std::string(what) + ": row count must be 2n");
}

struct Monitor {
  std::atomic<double> isotropy{0.0}, symplectic{0.0};
  std::atomic<long> frames{0}, fundamentals{0};
};

Monitor& monitor() {
  static Monitor m;
  return m;
}

void raise_to(std::atomic<double>& a, double v) {
  double cur = a.load(std::memory_order_relaxed);
  while (v > cur && !a.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
  }
}

lapack_logical select_negative(const double* wr, const double*) { return *wr < 0.0; }
lapack_logical select_positive(const double* wr, const double*) { return *wr > 0.0; }

Mat schur_block(const Mat& T, LAPACK_D_SELECT2 select, int* sdim_out) {
  const int m = static_cast<int>(T.rows());
  Mat a = T;
  Mat vs(m, m);
  Vec wr(m), wi(m);
  lapack_int sdim = 0;
  lapack_int info = LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'S', select, m, a.data(), m, &sdim,
                                  wr.data(), wi.data(), vs.data(), m);
  if (info != 0) throw NumericalFailure("dgees failed, info = " + std::to_string(info));
  *sdim_out = static_cast<int>(sdim);
  return vs.leftCols(sdim);
}

}  // namespace

Mat standard_j(int n) {
  Mat J = Mat::Zero(2 * n, 2 * n);
  J.block(0, n, n, n) = -Mat::Identity(n, n);
  J.block(n, 0, n, n) = Mat::Identity(n, n);
  return J;
}

double omega(const Vec& u, const Vec& v) {
  if (u.size() != v.size() || u.size() % 2 != 0 || u.size() == 0)
    throw DimensionMismatch("omega: vectors must share an even length");
  const Eigen::Index n = u.size() / 2;
  // <Ju, v> with Ju = (-u_p, u_q)
  return -u.tail(n).dot(v.head(n)) + u.head(n).dot(v.tail(n));
}

Mat orthonormalize(const Mat& F, double rank_tol) {
  Eigen::JacobiSVD<Mat> svd(F);
  const Vec& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0 || s(s.size() - 1) < rank_tol * s(0))
    throw RankDeficient("frame is rank deficient");
  Eigen::HouseholderQR<Mat> qr(F);
  Mat Q = qr.householderQ() * Mat::Identity(F.rows(), F.cols());
  Mat R = qr.matrixQR().topRows(F.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < F.cols(); ++j)
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  return Q;
}

LagrangianCheck is_lagrangian(const Mat& F, double tol) {
  require_even(F, "is_lagrangian");
  if (F.cols() * 2 != F.rows()) throw DimensionMismatch("is_lagrangian: frame must be 2n x n");
  Mat Q = orthonormalize(F);
  const int n = static_cast<int>(F.cols());
  double defect = (Q.transpose() * standard_j(n) * Q).cwiseAbs().maxCoeff();
  return {defect <= tol, defect};
}

LagrangianFrame::LagrangianFrame(const Mat& F, double tol) {
  require_even(F, "LagrangianFrame");
  if (F.cols() * 2 != F.rows()) throw DimensionMismatch("LagrangianFrame: frame must be 2n x n");
  basis_ = orthonormalize(F);
  const int n = static_cast<int>(F.cols());
  defect_ = (basis_.transpose() * standard_j(n) * basis_).cwiseAbs().maxCoeff();
  if (defect_ > tol) {
    std::ostringstream os;
    os << "frame is not Lagrangian (isotropy defect " << defect_ << ")";
    throw NotLagrangian(os.str());
  }
  raise_to(monitor().isotropy, defect_);
  monitor().frames.fetch_add(1, std::memory_order_relaxed);
}

CMat LagrangianFrame::unitary() const {
  const int k = n();
  CMat U(k, k);
  U.real() = basis_.topRows(k);
  U.imag() = basis_.bottomRows(k);
  return U;
}

Mat realify(const CMat& U) {
  const Eigen::Index n = U.rows();
  Mat R(2 * n, 2 * n);
  R << U.real(), -U.imag(), U.imag(), U.real();
  return R;
}

Mat rotation(int n, double theta) {
  return std::cos(theta) * Mat::Identity(2 * n, 2 * n) + std::sin(theta) * standard_j(n);
}

LagrangianFrame line(double theta) {
  Mat F(2, 1);
  F << std::cos(theta), std::sin(theta);
  return LagrangianFrame(F);
}

Vec transversality_values(const LagrangianFrame& L1, const LagrangianFrame& L2) {
  if (L1.n() != L2.n()) throw DimensionMismatch("frames of different dimension");
  Mat C = L1.basis().transpose() * standard_j(L1.n()) * L2.basis();
  Vec s = Eigen::JacobiSVD<Mat>(C).singularValues();
  std::sort(s.data(), s.data() + s.size());
  return s;
}

int intersection_dim(const LagrangianFrame& L1, const LagrangianFrame& L2, double tol) {
  Vec s = transversality_values(L1, L2);
  return static_cast<int>(std::count_if(s.data(), s.data() + s.size(),
                                        [tol](double x) { return x < tol; }));
}

Mat intersection_basis(const LagrangianFrame& L1, const LagrangianFrame& L2, double tol) {
  if (L1.n() != L2.n()) throw DimensionMismatch("frames of different dimension");
  const int n = L1.n();
  // ker of X2^T J X1 inside the coordinates of L1
  Mat C = L2.basis().transpose() * standard_j(n) * L1.basis();
  Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  int k = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) < tol) ++k;
  Mat V = svd.matrixV().rightCols(k);
  return L1.basis() * V;
}

double gap_distance(const LagrangianFrame& L1, const LagrangianFrame& L2) {
  if (L1.basis().rows() != L2.basis().rows()) throw DimensionMismatch("frames of different size");
  Mat D = L1.projector() - L2.projector();
  Eigen::SelfAdjointEigenSolver<Mat> es(D, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

HyperbolicSplitting hyperbolic_splitting(const Mat& T, double spectral_tol) {
  if (T.rows() != T.cols() || T.rows() == 0) throw DimensionMismatch("splitting needs a square matrix");
  Eigen::EigenSolver<Mat> es(T, false);
  for (Eigen::Index i = 0; i < T.rows(); ++i) {
    if (std::abs(es.eigenvalues()(i).real()) <= spectral_tol) {
      std::ostringstream os;
      os << "eigenvalue " << es.eigenvalues()(i) << " lies on the imaginary axis";
      throw NotHyperbolic(os.str());
    }
  }
  HyperbolicSplitting out;
  int km = 0, kp = 0;
  out.v_minus = schur_block(T, select_negative, &km);
  out.v_plus = schur_block(T, select_positive, &kp);
  const Eigen::Index m = T.rows();
  if (km + kp != m) throw NumericalFailure("Schur reordering lost eigenvalues");
  Mat X(m, m);
  X << out.v_minus, out.v_plus;
  Mat D = Mat::Zero(m, m);
  D.topLeftCorner(km, km).setIdentity();
  Eigen::PartialPivLU<Mat> lu(X);
  out.p_minus = X * D * lu.inverse();
  out.p_plus = Mat::Identity(m, m) - out.p_minus;
  return out;
}

double symplectic_defect(const Mat& S) {
  if (S.rows() != S.cols() || S.rows() % 2 != 0) throw DimensionMismatch("symplectic_defect");
  Mat J = standard_j(static_cast<int>(S.rows() / 2));
  return (S.transpose() * J * S - J).cwiseAbs().maxCoeff();
}

InvariantStats invariant_stats() {
  const Monitor& m = monitor();
  return {m.isotropy.load(), m.symplectic.load(), m.frames.load(), m.fundamentals.load()};
}

void reset_invariant_stats() {
  Monitor& m = monitor();
  m.isotropy = 0.0;
  m.symplectic = 0.0;
  m.frames = 0;
  m.fundamentals = 0;
}

void record_symplectic_defect(double relative_defect) {
  raise_to(monitor().symplectic, relative_defect);
  monitor().fundamentals.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace symflow
