#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tmach/scalar.h"

namespace tmach {

/// a_region(t + shift*T), or its adjoint when dagger is set. Regions are 1-based.
struct ModeOp {
  int region = 1;
  bool dagger = false;
  int shift = 0;

  friend auto operator<=>(const ModeOp&, const ModeOp&) = default;
};

inline ModeOp creator(int region, int shift = 0) { return {region, true, shift}; }
inline ModeOp annihilator(int region, int shift = 0) { return {region, false, shift}; }

/// Order used inside a normal-ordered product: creators first, then (region, shift).
bool normal_less(const ModeOp& a, const ModeOp& b);

std::string to_string(const ModeOp& op);

/// Smeared delta factors.
///   literal(x):  Delta(x*T), a constant produced by a contraction
///   signed(m):   Delta(t' - t - m*T)
///   absolute(m): Delta(|t - t'| - m*T)
/// The profile is even, so literal arguments are stored as |x|.
struct DeltaFactor {
  enum class Kind { literal, signed_offset, absolute_offset };
  Kind kind = Kind::literal;
  int m = 0;

  static DeltaFactor literal(int x) { return {Kind::literal, x < 0 ? -x : x}; }
  static DeltaFactor signed_offset(int m) { return {Kind::signed_offset, m}; }
  static DeltaFactor absolute_offset(int m) { return {Kind::absolute_offset, m}; }

  friend auto operator<=>(const DeltaFactor&, const DeltaFactor&) = default;
};

std::string to_string(const DeltaFactor& d);
std::string kind_name(DeltaFactor::Kind k);

/// coeff * deltas * factors. In normal form the factors satisfy normal_less ordering
/// and deltas are sorted.
struct OperatorTerm {
  Scalar coeff;
  std::vector<DeltaFactor> deltas;
  std::vector<ModeOp> factors;

  [[nodiscard]] bool is_normal_ordered() const;
};

std::string to_string(const OperatorTerm& t);

/// Canonical sum of terms merged on (factors, deltas).
class OperatorSum {
 public:
  struct Key {
    std::vector<ModeOp> factors;
    std::vector<DeltaFactor> deltas;
    friend auto operator<=>(const Key&, const Key&) = default;
  };
  using container_type = std::map<Key, Scalar>;

  OperatorSum() = default;
  OperatorSum(OperatorTerm t) { add(std::move(t)); }
  static OperatorSum scalar(Scalar s) { return OperatorSum(OperatorTerm{std::move(s), {}, {}}); }

  /// Deltas are sorted on insertion; factor order is preserved.
  void add(OperatorTerm t);
  void add(const Key& key, const Scalar& coeff);

  [[nodiscard]] bool empty() const { return terms_.empty(); }
  [[nodiscard]] std::size_t size() const { return terms_.size(); }
  [[nodiscard]] const container_type& terms() const { return terms_; }
  [[nodiscard]] std::vector<OperatorTerm> term_list() const;
  [[nodiscard]] Scalar coeff(const std::vector<ModeOp>& factors,
                             const std::vector<DeltaFactor>& deltas = {}) const;

  OperatorSum& operator+=(const OperatorSum& o);
  OperatorSum& operator-=(const OperatorSum& o);
  OperatorSum& operator*=(const Scalar& s);
  friend OperatorSum operator+(OperatorSum a, const OperatorSum& b) { return a += b; }
  friend OperatorSum operator-(OperatorSum a, const OperatorSum& b) { return a -= b; }
  friend bool operator==(const OperatorSum&, const OperatorSum&) = default;

 private:
  container_type terms_;
};

std::string to_string(const OperatorSum& s);

/// Which cross-region rules of the modified commutator are active. Same-region
/// contractions are always on.
///   cross_12: [a_1(t), a_2^+(t')] = Delta(t' - t + T)
///   cross_21: [a_2(t), a_1^+(t')] = Delta(t' - t - T)
struct Algebra {
  bool cross_12 = true;
  bool cross_21 = true;
};

enum class ContractionRule { same_region, cross_12, cross_21 };

struct ContractionStats {
  long same_region = 0;
  long cross_12 = 0;
  long cross_21 = 0;
  void record(ContractionRule r);
};

/// c-number [a, b] for an annihilator a and a creator b, as a single literal delta
/// (or nothing when the pair commutes). Throws std::invalid_argument otherwise.
std::optional<DeltaFactor> contraction(const ModeOp& a, const ModeOp& b, const Algebra& alg,
                                       ContractionRule* rule = nullptr);

OperatorSum commutator(const ModeOp& a, const ModeOp& b, const Algebra& alg = {});

/// Concatenates factor sequences. Result is not normal-ordered.
OperatorSum multiply(const OperatorSum& x, const OperatorSum& y);
inline OperatorSum operator*(const OperatorSum& x, const OperatorSum& y) { return multiply(x, y); }

OperatorSum normal_order(const OperatorSum& s, const Algebra& alg = {},
                         ContractionStats* stats = nullptr);

/// Evaluates literal deltas under the lattice Kronecker profile: Delta(0) -> 1,
/// Delta(xT) -> 0 for x != 0. Offset deltas are kept.
OperatorSum apply_kronecker(const OperatorSum& s);

/// Splits a sum into its parameter-monomial groups. Each group carries plain rational
/// coefficients (the monomial is factored out).
std::map<Monomial, OperatorSum> group_by_monomial(const OperatorSum& s);

/// Keeps only the terms of one monomial group, with the monomial retained.
OperatorSum monomial_part(const OperatorSum& s, const Monomial& m);

struct HamiltonianFlags {
  bool alpha = true;
  bool beta = true;
  bool g = true;
};

/// Time-machine Hamiltonian on `regions` regions together with the algebra it implies.
/// Switching alpha off removes the cross_12 rule; switching beta off removes cross_21.
struct Hamiltonian {
  int regions = 3;
  HamiltonianFlags flags;
  Algebra algebra;
  OperatorSum op;
};

Hamiltonian build_hamiltonian(int regions, HamiltonianFlags flags = {});

enum class DeltaMode { symbolic, kronecker };

struct ExpansionOptions {
  int max_power = 4;
  int shift_window = 8;
  DeltaMode deltas = DeltaMode::symbolic;
};

/// Normal-ordered H^k.
OperatorSum hamiltonian_power(const Hamiltonian& h, int k, const ExpansionOptions& opts = {},
                              ContractionStats* stats = nullptr);

/// All powers H^1..H^k, computed incrementally.
std::vector<OperatorSum> hamiltonian_powers(const Hamiltonian& h, int k,
                                            const ExpansionOptions& opts = {},
                                            ContractionStats* stats = nullptr);

/// h_commutator: i d/dt a = [H, a]; standard: i d/dt a = [a, H].
enum class EomConvention { h_commutator, standard };

/// Right-hand side of i d/dt op for a region-1 or region-2 mode.
OperatorSum heisenberg_eom(const ModeOp& op, const Hamiltonian& h,
                           EomConvention convention = EomConvention::h_commutator,
                           DeltaMode deltas = DeltaMode::kronecker);

}  // namespace tmach
