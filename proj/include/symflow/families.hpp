#pragma once

#include <cstdint>

#include "symflow/ham_flow.hpp"

namespace symflow {

/// B = diag(1, -1) for every lambda and t.
HamiltonianFamily constant_hyperbolic_family();

/// Linearization of H = p^2/2 - q^2/2 + q^4/2 along q = sech t, deformed from
/// B* = diag(-1, 1): B_lambda(t) = diag(6 lambda sech^2 t - 1, 1).
HamiltonianFamily sech_family();

/// B_lambda = diag(lambda K, 1); no limits (bounded intervals only).
HamiltonianFamily harmonic_family(double K);

/// B = 0 in dimension n.
HamiltonianFamily zero_family(int n);

/// Smooth random symmetric coefficients on [0, 1] for property tests.
HamiltonianFamily random_bounded_family(int n, std::uint64_t seed);

}  // namespace symflow
