#pragma once

#include "tmach/opalg.h"

namespace tmach::wick {

// Reference route to normal ordering: enumerates every set of disjoint contractions
// (annihilator paired with a creator standing to its right) instead of rewriting
// adjacent pairs. Shares only the two-point contraction rule with normal_order.

/// Normal-ordered form of a single product.
OperatorSum expand_product(const OperatorTerm& t, const Algebra& alg);

OperatorSum normal_order(const OperatorSum& s, const Algebra& alg);

/// H^k built from every raw k-fold product of Hamiltonian terms, each expanded by
/// contraction enumeration. Exponential in k; meant for k <= 4.
OperatorSum hamiltonian_power(const Hamiltonian& h, int k, DeltaMode deltas = DeltaMode::symbolic);

}  // namespace tmach::wick
