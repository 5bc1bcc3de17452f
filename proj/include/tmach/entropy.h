#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tmach/hammat.h"
#include "tmach/json_io.h"

namespace tmach {

/// B_0..B_n with B_1 = -1/2.
std::vector<Rational> bernoulli_numbers(int n);
Rational bernoulli_polynomial(int n, const Rational& x);

/// zeta(-n, a) = -B_{n+1}(a)/(n+1). Throws for n < 0 or a <= 0.
Rational hurwitz_zeta_neg(int n, const Rational& a);
inline Rational riemann_zeta_neg(int n) { return hurwitz_zeta_neg(n, Rational(1)); }

/// (n_index + shift)^power
struct IndexFactor {
  int index = 1;
  Rational shift{0};
  int power = 1;
};

struct ProductTerm {
  Rational coeff{1};
  std::vector<IndexFactor> factors;  // at most one per index
};

/// Sum over n_i >= 0 for every i in `indices` of a sum of factored products.
struct ProductSum {
  std::vector<int> indices;
  std::vector<ProductTerm> terms;
};

/// Parses "n2*(n1+1) + n1*n2", "2*(n1-1/2)^2*n2", "1". Factors of the same index
/// must share one shift (their powers add); "(n1+n2)" and the like are rejected.
/// An empty `indices` means the indices that appear in the text.
ProductSum parse_product_sum(const std::string& text, std::vector<int> indices = {});
std::string to_string(const ProductSum& s);

/// Sum_{n>=0} (n+a)^k. Power 0 gives zeta(0,1) = -1/2. For a > 0 this is zeta(-k, a);
/// for a <= 0 the terms with n + a <= 0 are split off and summed directly.
Rational regularize_index_sum(const IndexFactor& f);

/// Index sums missing from a term count as Sum 1 = -1/2.
Rational regularize_product_sum(const ProductSum& s);
Rational regularize_product_sum(const std::string& text, std::vector<int> indices = {});

/// Exact sum over 0 <= n_i <= cutoff.
Rational partial_sum(const ProductSum& s, long cutoff);

struct EntropyParams {
  Rational alpha{3, 10};
  Rational beta{3, 10};
  Rational g{1};
  Rational T{1};
  int offset = 1;  // delta argument |dt| - offset*T
  DeltaProfile delta;
};

/// Delta value; exact under the Kronecker profile.
struct DeltaValue {
  std::optional<Rational> exact;
  double value = 0.0;
};
DeltaValue delta_at(const DeltaProfile& p, const Rational& x);

struct PartialSum {
  long cutoff = 0;
  Rational value;
};

struct EntropyReport {
  EntropyParams params;
  Rational dt;
  std::string sum_expression;
  std::vector<PartialSum> partial_sums;
  Rational regularized_sum;
  DeltaValue delta;
  std::optional<Rational> exact;
  double value = 0.0;
  [[nodiscard]] bool positive() const { return value > 0.0; }
};

/// (1/72) dt alpha beta Delta(|dt| - offset*T).
EntropyReport entropy_first_order(const EntropyParams& p, const Rational& dt,
                                  const std::vector<long>& cutoffs = {10, 100, 1000});

struct TraceTerm {
  std::string name;  // "g", "g^2", "alpha*beta"
  std::string prefactor;
  std::string delta_argument;
  ProductSum occupation_sum;
  Rational regularized_sum;
  DeltaValue delta;
  std::optional<Rational> exact;  // prefactor * delta * regularized sum
  double value = 0.0;
  bool in_entropy = false;
};

/// First terms of Tr UH up to second order in the couplings. The g-terms are
/// listed but do not enter the entropy.
std::vector<TraceTerm> trace_UH_first_terms(const EntropyParams& p, const Rational& dt);

ojson to_json(const EntropyParams& p);
ojson to_json(const EntropyReport& r);
ojson to_json(const std::vector<TraceTerm>& terms);

/// Text walk from Tr UH to the entropy value.
std::string derivation_text(const EntropyReport& r, const std::vector<TraceTerm>& terms);

}  // namespace tmach
