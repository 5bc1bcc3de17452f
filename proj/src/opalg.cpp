#include "tmach/opalg.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace tmach {

bool normal_less(const ModeOp& a, const ModeOp& b) {
  if (a.dagger != b.dagger) return a.dagger;
  if (a.region != b.region) return a.region < b.region;
  return a.shift < b.shift;
}

namespace {

std::string time_label(int shift) {
  if (shift == 0) return "t";
  std::string mag = (shift == 1 || shift == -1) ? "T" : std::to_string(shift < 0 ? -shift : shift) + "T";
  return std::string("t") + (shift > 0 ? "+" : "-") + mag;
}

std::string offset_label(const std::string& head, int m) {
  if (m == 0) return head;
  std::string mag = (m == 1 || m == -1) ? "T" : std::to_string(m < 0 ? -m : m) + "T";
  return head + (m > 0 ? "-" : "+") + mag;
}

}  // namespace

std::string to_string(const ModeOp& op) {
  return "a" + std::to_string(op.region) + (op.dagger ? "†" : "") + "(" + time_label(op.shift) + ")";
}

std::string kind_name(DeltaFactor::Kind k) {
  switch (k) {
    case DeltaFactor::Kind::literal: return "literal";
    case DeltaFactor::Kind::signed_offset: return "signed";
    case DeltaFactor::Kind::absolute_offset: return "absolute";
  }
  return "?";
}

std::string to_string(const DeltaFactor& d) {
  switch (d.kind) {
    case DeltaFactor::Kind::literal:
      if (d.m == 0) return "Δ(0)";
      return "Δ(" + (d.m == 1 ? std::string("T") : std::to_string(d.m) + "T") + ")";
    case DeltaFactor::Kind::signed_offset: return "Δ(" + offset_label("t'-t", d.m) + ")";
    case DeltaFactor::Kind::absolute_offset: return "Δ(" + offset_label("|t-t'|", d.m) + ")";
  }
  return "Δ(?)";
}

bool OperatorTerm::is_normal_ordered() const {
  return std::is_sorted(factors.begin(), factors.end(), normal_less) &&
         std::is_sorted(deltas.begin(), deltas.end());
}

std::string to_string(const OperatorTerm& t) {
  std::ostringstream os;
  os << to_string(t.coeff);
  for (const auto& d : t.deltas) os << " " << to_string(d);
  for (const auto& f : t.factors) os << " " << to_string(f);
  return os.str();
}

void OperatorSum::add(OperatorTerm t) {
  std::sort(t.deltas.begin(), t.deltas.end());
  add(Key{std::move(t.factors), std::move(t.deltas)}, t.coeff);
}

void OperatorSum::add(const Key& key, const Scalar& coeff) {
  if (coeff.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(key, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

std::vector<OperatorTerm> OperatorSum::term_list() const {
  std::vector<OperatorTerm> out;
  out.reserve(terms_.size());
  for (const auto& [key, c] : terms_) out.push_back(OperatorTerm{c, key.deltas, key.factors});
  return out;
}

Scalar OperatorSum::coeff(const std::vector<ModeOp>& factors,
                          const std::vector<DeltaFactor>& deltas) const {
  Key key{factors, deltas};
  std::sort(key.deltas.begin(), key.deltas.end());
  auto it = terms_.find(key);
  return it == terms_.end() ? Scalar{} : it->second;
}

OperatorSum& OperatorSum::operator+=(const OperatorSum& o) {
  for (const auto& [key, c] : o.terms_) add(key, c);
  return *this;
}

OperatorSum& OperatorSum::operator-=(const OperatorSum& o) {
  for (const auto& [key, c] : o.terms_) add(key, -c);
  return *this;
}

OperatorSum& OperatorSum::operator*=(const Scalar& s) {
  container_type out;
  for (auto& [key, c] : terms_) {
    Scalar p = c * s;
    if (!p.is_zero()) out.emplace(key, std::move(p));
  }
  terms_ = std::move(out);
  return *this;
}

std::string to_string(const OperatorSum& s) {
  if (s.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : s.term_list()) {
    if (!first) os << "\n";
    first = false;
    os << to_string(t);
  }
  return os.str();
}

void ContractionStats::record(ContractionRule r) {
  switch (r) {
    case ContractionRule::same_region: ++same_region; break;
    case ContractionRule::cross_12: ++cross_12; break;
    case ContractionRule::cross_21: ++cross_21; break;
  }
}

std::optional<DeltaFactor> contraction(const ModeOp& a, const ModeOp& b, const Algebra& alg,
                                       ContractionRule* rule) {
  if (a.dagger || !b.dagger) {
    throw std::invalid_argument("contraction expects [annihilator, creator], got [" + to_string(a) +
                                ", " + to_string(b) + "]");
  }
  // With t = t0 + a.shift*T and t' = t0 + b.shift*T.
  const int t_minus_tp = a.shift - b.shift;
  if (a.region == b.region) {
    if (rule) *rule = ContractionRule::same_region;
    return DeltaFactor::literal(t_minus_tp);
  }
  if (a.region == 1 && b.region == 2 && alg.cross_12) {
    if (rule) *rule = ContractionRule::cross_12;
    return DeltaFactor::literal(-t_minus_tp + 1);
  }
  if (a.region == 2 && b.region == 1 && alg.cross_21) {
    if (rule) *rule = ContractionRule::cross_21;
    return DeltaFactor::literal(-t_minus_tp - 1);
  }
  return std::nullopt;
}

OperatorSum commutator(const ModeOp& a, const ModeOp& b, const Algebra& alg) {
  auto d = contraction(a, b, alg);
  if (!d) return {};
  return OperatorSum(OperatorTerm{Scalar(1), {*d}, {}});
}

OperatorSum multiply(const OperatorSum& x, const OperatorSum& y) {
  OperatorSum out;
  for (const auto& [kx, cx] : x.terms()) {
    for (const auto& [ky, cy] : y.terms()) {
      OperatorTerm t;
      t.coeff = cx * cy;
      t.factors = kx.factors;
      t.factors.insert(t.factors.end(), ky.factors.begin(), ky.factors.end());
      t.deltas = kx.deltas;
      t.deltas.insert(t.deltas.end(), ky.deltas.begin(), ky.deltas.end());
      out.add(std::move(t));
    }
  }
  return out;
}

namespace {

struct Pending {
  Scalar coeff;
  std::vector<DeltaFactor> deltas;
  std::vector<ModeOp> factors;
};

}  // namespace

OperatorSum normal_order(const OperatorSum& s, const Algebra& alg, ContractionStats* stats) {
  OperatorSum out;
  std::vector<Pending> work;
  for (const auto& [key, c] : s.terms()) work.push_back({c, key.deltas, key.factors});

  while (!work.empty()) {
    Pending p = std::move(work.back());
    work.pop_back();

    auto& f = p.factors;
    std::size_t pos = f.size();
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
      if (!f[i].dagger && f[i + 1].dagger) {
        pos = i;
        break;
      }
    }
    if (pos == f.size()) {
      // Creators already precede annihilators; each group commutes internally.
      std::sort(f.begin(), f.end(), normal_less);
      out.add(OperatorTerm{std::move(p.coeff), std::move(p.deltas), std::move(f)});
      continue;
    }

    // a b+ = b+ a + [a, b+]
    ContractionRule rule{};
    if (auto d = contraction(f[pos], f[pos + 1], alg, &rule)) {
      if (stats) stats->record(rule);
      Pending c{p.coeff, p.deltas, {}};
      c.deltas.push_back(*d);
      std::sort(c.deltas.begin(), c.deltas.end());
      c.factors.reserve(f.size() - 2);
      c.factors.insert(c.factors.end(), f.begin(), f.begin() + static_cast<std::ptrdiff_t>(pos));
      c.factors.insert(c.factors.end(), f.begin() + static_cast<std::ptrdiff_t>(pos) + 2, f.end());
      work.push_back(std::move(c));
    }
    std::swap(f[pos], f[pos + 1]);
    work.push_back(std::move(p));
  }
  return out;
}

OperatorSum apply_kronecker(const OperatorSum& s) {
  OperatorSum out;
  for (const auto& [key, c] : s.terms()) {
    OperatorSum::Key k{key.factors, {}};
    bool vanishes = false;
    for (const auto& d : key.deltas) {
      if (d.kind != DeltaFactor::Kind::literal) {
        k.deltas.push_back(d);
      } else if (d.m != 0) {
        vanishes = true;
        break;
      }
    }
    if (!vanishes) out.add(k, c);
  }
  return out;
}

std::map<Monomial, OperatorSum> group_by_monomial(const OperatorSum& s) {
  std::map<Monomial, OperatorSum> out;
  for (const auto& [key, c] : s.terms()) {
    for (const auto& [m, z] : c.terms()) out[m].add(key, Scalar(z));
  }
  return out;
}

OperatorSum monomial_part(const OperatorSum& s, const Monomial& m) {
  OperatorSum out;
  for (const auto& [key, c] : s.terms()) {
    ComplexRational z = c.coeff(m);
    if (!z.is_zero()) out.add(key, Scalar(z, m));
  }
  return out;
}

Hamiltonian build_hamiltonian(int regions, HamiltonianFlags flags) {
  if (regions < 3) {
    throw std::invalid_argument("the Hamiltonian needs at least 3 regions (two mouths and the rest), got " +
                                std::to_string(regions));
  }
  Hamiltonian h;
  h.regions = regions;
  h.flags = flags;
  h.algebra.cross_12 = flags.alpha;
  h.algebra.cross_21 = flags.beta;
  if (flags.alpha) {
    h.op.add(OperatorTerm{Scalar::param(Param::alpha), {}, {creator(1, +1), annihilator(2, 0)}});
  }
  if (flags.beta) {
    h.op.add(OperatorTerm{Scalar::param(Param::beta), {}, {creator(2, -1), annihilator(1, 0)}});
  }
  if (flags.g) {
    for (int i = 1; i <= regions; ++i) {
      h.op.add(OperatorTerm{Scalar::param(Param::g), {}, {creator(i, 0), annihilator(i, 0)}});
    }
  }
  return h;
}

namespace {

void check_window(const OperatorSum& s, int window) {
  for (const auto& [key, c] : s.terms()) {
    for (const auto& f : key.factors) {
      if (f.shift > window || f.shift < -window) {
        throw std::overflow_error("operator " + to_string(f) + " leaves the shift window |k| <= " +
                                  std::to_string(window));
      }
    }
  }
}

}  // namespace

std::vector<OperatorSum> hamiltonian_powers(const Hamiltonian& h, int k, const ExpansionOptions& opts,
                                            ContractionStats* stats) {
  if (k < 1 || k > opts.max_power) {
    throw std::invalid_argument("power must lie in [1, " + std::to_string(opts.max_power) + "], got " +
                                std::to_string(k));
  }
  auto finish = [&](OperatorSum s) {
    if (opts.deltas == DeltaMode::kronecker) s = apply_kronecker(s);
    check_window(s, opts.shift_window);
    return s;
  };
  std::vector<OperatorSum> powers;
  powers.reserve(static_cast<std::size_t>(k));
  powers.push_back(finish(normal_order(h.op, h.algebra, stats)));
  for (int j = 2; j <= k; ++j) {
    powers.push_back(finish(normal_order(multiply(powers.back(), h.op), h.algebra, stats)));
  }
  return powers;
}

OperatorSum hamiltonian_power(const Hamiltonian& h, int k, const ExpansionOptions& opts,
                              ContractionStats* stats) {
  return std::move(hamiltonian_powers(h, k, opts, stats).back());
}

OperatorSum heisenberg_eom(const ModeOp& op, const Hamiltonian& h, EomConvention convention,
                           DeltaMode deltas) {
  if (op.region != 1 && op.region != 2) {
    throw std::invalid_argument("equations of motion are derived for the mouth regions 1 and 2 only");
  }
  OperatorSum a(OperatorTerm{Scalar(1), {}, {op}});
  OperatorSum comm = normal_order(multiply(h.op, a) - multiply(a, h.op), h.algebra);
  if (convention == EomConvention::standard) comm *= Scalar(-1);
  return deltas == DeltaMode::kronecker ? apply_kronecker(comm) : comm;
}

}  // namespace tmach
