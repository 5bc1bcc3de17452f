#pragma once

#include <random>

#include "tmach/opalg.h"

namespace tmach::testing {

/// Random product of 1..max_factors mode operators with regions in [1, max_region]
/// and shifts in [-max_shift, max_shift], coefficient in {1, ..., 5} / {1, 2, 3}.
inline OperatorSum random_product(std::mt19937& rng, int max_factors, int max_region, int max_shift) {
  std::uniform_int_distribution<int> len(1, max_factors);
  std::uniform_int_distribution<int> region(1, max_region);
  std::uniform_int_distribution<int> shift(-max_shift, max_shift);
  std::bernoulli_distribution dagger(0.5);
  std::uniform_int_distribution<int> num(1, 5);
  std::uniform_int_distribution<int> den(1, 3);

  OperatorTerm t;
  t.coeff = Scalar(ComplexRational(Rational(num(rng), den(rng))));
  const int n = len(rng);
  for (int i = 0; i < n; ++i) t.factors.push_back(ModeOp{region(rng), dagger(rng), shift(rng)});
  return OperatorSum(std::move(t));
}

}  // namespace tmach::testing
