#include "symflow/families.hpp"

#include <cmath>
#include <random>

namespace symflow {

HamiltonianFamily constant_hyperbolic_family() {
  Mat B = Mat::Zero(2, 2);
  B.diagonal() << 1.0, -1.0;
  HamiltonianFamily f;
  f.n = 1;
  f.b = [B](double, double) { return B; };
  f.b_plus = [B](double) { return B; };
  f.b_minus = [B](double) { return B; };
  return f;
}

HamiltonianFamily sech_family() {
  Mat Bs = Mat::Zero(2, 2);
  Bs.diagonal() << -1.0, 1.0;
  HamiltonianFamily f;
  f.n = 1;
  f.b = [](double l, double t) {
    double s = 1.0 / std::cosh(t);
    Mat B = Mat::Zero(2, 2);
    B(0, 0) = 6.0 * l * s * s - 1.0;
    B(1, 1) = 1.0;
    return B;
  };
  f.b_plus = [Bs](double) { return Bs; };
  f.b_minus = [Bs](double) { return Bs; };
  f.decay_scale = 1.0;
  return f;
}

HamiltonianFamily harmonic_family(double K) {
  HamiltonianFamily f;
  f.n = 1;
  f.b = [K](double l, double) {
    Mat B = Mat::Zero(2, 2);
    B(0, 0) = l * K;
    B(1, 1) = 1.0;
    return B;
  };
  return f;
}

HamiltonianFamily zero_family(int n) {
  HamiltonianFamily f;
  f.n = n;
  f.b = [n](double, double) { return Mat(Mat::Zero(2 * n, 2 * n)); };
  return f;
}

HamiltonianFamily random_bounded_family(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const int m = 2 * n;
  auto sym = [&]() {
    Mat A(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) A(i, j) = g(rng);
    return Mat(0.5 * (A + A.transpose()));
  };
  // B(lambda, t) = B0 + lambda (B1 + cos(w t) B2 + sin(w t) B3)
  Mat B0 = sym(), B1 = 2.0 * sym(), B2 = sym(), B3 = sym();
  double w = 2.0 + std::abs(g(rng));
  HamiltonianFamily f;
  f.n = n;
  f.b = [=](double l, double t) {
    return Mat(B0 + l * (B1 + std::cos(w * t) * B2 + std::sin(w * t) * B3));
  };
  return f;
}

}  // namespace symflow
