#include "symflow/band.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lapack.hpp"

namespace symflow {

SymBand::SymBand(int size, int kd) : n_(size), kd_(std::min(kd, std::max(size - 1, 0))) {
  if (size < 1 || kd < 0) throw DimensionMismatch("SymBand: bad size");
  ab_.assign(static_cast<size_t>(kd_ + 1) * n_, 0.0);
}

SymBand SymBand::from_dense(const Mat& A) {
  if (A.rows() != A.cols()) throw DimensionMismatch("SymBand: matrix must be square");
  const int n = static_cast<int>(A.rows());
  int kd = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (A(i, j) != 0.0 || A(j, i) != 0.0) kd = std::max(kd, j - i);
  SymBand B(n, kd);
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - kd); i <= j; ++i) B.ab_[(kd + i - j) + j * (kd + 1)] = 0.5 * (A(i, j) + A(j, i));
  return B;
}

double SymBand::get(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (j - i > kd_) return 0.0;
  return ab_[(kd_ + i - j) + static_cast<size_t>(j) * (kd_ + 1)];
}

void SymBand::add(int i, int j, double v) {
  if (i > j) std::swap(i, j);
  if (j - i > kd_) throw DimensionMismatch("SymBand: entry outside the band");
  ab_[(kd_ + i - j) + static_cast<size_t>(j) * (kd_ + 1)] += v;
  tri_.reset();
}

void SymBand::scale(const Vec& d) {
  for (int j = 0; j < n_; ++j)
    for (int i = std::max(0, j - kd_); i <= j; ++i)
      ab_[(kd_ + i - j) + static_cast<size_t>(j) * (kd_ + 1)] *= d(i) * d(j);
  tri_.reset();
}

Mat SymBand::dense() const {
  Mat A = Mat::Zero(n_, n_);
  for (int j = 0; j < n_; ++j)
    for (int i = std::max(0, j - kd_); i <= j; ++i) A(i, j) = A(j, i) = get(i, j);
  return A;
}

Vec SymBand::apply(const Vec& x) const {
  Vec y = Vec::Zero(n_);
  for (int j = 0; j < n_; ++j) {
    for (int i = std::max(0, j - kd_); i < j; ++i) {
      double a = get(i, j);
      y(i) += a * x(j);
      y(j) += a * x(i);
    }
    y(j) += get(j, j) * x(j);
  }
  return y;
}

SymBand SymBand::shifted(double s) const {
  SymBand B = *this;
  for (int j = 0; j < n_; ++j) B.ab_[kd_ + static_cast<size_t>(j) * (kd_ + 1)] -= s;
  B.tri_.reset();
  return B;
}

SymBand SymBand::combine(double alpha, const SymBand& A, double beta, const SymBand& B) {
  if (A.n_ != B.n_) throw DimensionMismatch("SymBand::combine: size mismatch");
  SymBand C(A.n_, std::max(A.kd_, B.kd_));
  for (int j = 0; j < C.n_; ++j)
    for (int i = std::max(0, j - C.kd_); i <= j; ++i)
      C.ab_[(C.kd_ + i - j) + static_cast<size_t>(j) * (C.kd_ + 1)] =
          alpha * A.get(i, j) + beta * B.get(i, j);
  return C;
}

double SymBand::max_abs() const {
  double m = 0.0;
  for (double v : ab_) m = std::max(m, std::abs(v));
  return m;
}

const SymBand::Tridiagonal& SymBand::tridiagonal() const {
  if (tri_) return *tri_;
  auto t = std::make_shared<Tridiagonal>();
  t->d.resize(n_);
  t->e.resize(std::max(n_ - 1, 1));
  if (n_ == 1) {
    t->d(0) = ab_[0];
  } else {
    std::vector<double> work = ab_;
    double dummy = 0.0;
    lapack_int info = LAPACKE_dsbtrd(LAPACK_COL_MAJOR, 'N', 'U', n_, kd_, work.data(), kd_ + 1,
                                     t->d.data(), t->e.data(), &dummy, 1);
    if (info != 0) throw NumericalFailure("dsbtrd failed");
  }
  tri_ = t;
  return *tri_;
}

int SymBand::count_below(double x) const {
  const Tridiagonal& t = tridiagonal();
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  int count = 0;
  double q = t.d(0) - x;
  for (int i = 0;; ++i) {
    if (std::abs(q) < tiny) q = -tiny;
    if (q < 0) ++count;
    if (i + 1 == n_) break;
    q = t.d(i + 1) - x - t.e(i) * t.e(i) / q;
  }
  return count;
}

Vec SymBand::eigenvalues_between(double lo, double hi) const {
  const Tridiagonal& t = tridiagonal();
  std::vector<double> w(n_);
  std::vector<lapack_int> iblock(n_), isplit(n_);
  lapack_int m = 0, nsplit = 0;
  lapack_int info = LAPACKE_dstebz('V', 'E', n_, lo, hi, 0, 0, 0.0, t.d.data(), t.e.data(), &m,
                                   &nsplit, w.data(), iblock.data(), isplit.data());
  if (info != 0) throw NumericalFailure("dstebz failed");
  return Eigen::Map<Vec>(w.data(), m);
}

Vec SymBand::eigenvalues_by_index(int il, int iu) const {
  il = std::max(il, 0);
  iu = std::min(iu, n_ - 1);
  if (iu < il) return Vec(0);
  const Tridiagonal& t = tridiagonal();
  std::vector<double> w(n_);
  std::vector<lapack_int> iblock(n_), isplit(n_);
  lapack_int m = 0, nsplit = 0;
  lapack_int info = LAPACKE_dstebz('I', 'E', n_, 0.0, 0.0, il + 1, iu + 1, 0.0, t.d.data(),
                                   t.e.data(), &m, &nsplit, w.data(), iblock.data(), isplit.data());
  if (info != 0) throw NumericalFailure("dstebz failed");
  return Eigen::Map<Vec>(w.data(), m);
}

Eigenpairs SymBand::eigenpairs_between(double lo, double hi) const {
  std::vector<double> work = ab_;
  Mat q(n_, n_);
  Vec w(n_);
  int expected = count_below(hi) - count_below(lo);
  Mat z(n_, std::clamp(expected + 4, 1, n_));
  std::vector<lapack_int> ifail(n_);
  lapack_int m = 0;
  lapack_int info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'V', 'V', 'U', n_, kd_, work.data(), kd_ + 1,
                                   q.data(), n_, lo, hi, 0, 0, 0.0, &m, w.data(), z.data(), n_,
                                   ifail.data());
  if (info != 0) throw NumericalFailure("dsbevx failed");
  return {w.head(m), z.leftCols(m)};
}

}  // namespace symflow
