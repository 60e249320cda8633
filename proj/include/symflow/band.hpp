#pragma once

#include <memory>
#include <vector>

#include "symflow/symplectic.hpp"

namespace symflow {

struct Eigenpairs {
  Vec values;
  Mat vectors;
};

/// Real symmetric band matrix (upper LAPACK band storage) with spectral queries.
/// The tridiagonal reduction is computed once and cached.
class SymBand {
 public:
  SymBand() = default;
  SymBand(int size, int kd);
  static SymBand from_dense(const Mat& A);

  int size() const { return n_; }
  int kd() const { return kd_; }
  double get(int i, int j) const;
  /// Adds v to A(i, j) (and so to A(j, i)); |i - j| <= kd.
  void add(int i, int j, double v);
  void scale(const Vec& d);  ///< A <- D A D
  Mat dense() const;
  Vec apply(const Vec& x) const;
  SymBand shifted(double s) const;  ///< A - s I
  /// alpha A + beta B with the larger bandwidth.
  static SymBand combine(double alpha, const SymBand& A, double beta, const SymBand& B);
  static SymBand blend(const SymBand& A, const SymBand& B, double w) {
    return combine(1 - w, A, w, B);
  }
  double max_abs() const;

  /// Number of eigenvalues strictly below x (Sturm count).
  int count_below(double x) const;
  /// Eigenvalues in (lo, hi], ascending.
  Vec eigenvalues_between(double lo, double hi) const;
  /// Eigenvalues with 0-based ascending indices il..iu.
  Vec eigenvalues_by_index(int il, int iu) const;
  Eigenpairs eigenpairs_between(double lo, double hi) const;

 private:
  struct Tridiagonal {
    Vec d, e;
  };
  const Tridiagonal& tridiagonal() const;

  int n_ = 0, kd_ = 0;
  std::vector<double> ab_;
  mutable std::shared_ptr<Tridiagonal> tri_;
};

}  // namespace symflow
