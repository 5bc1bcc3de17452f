#include "tmach/wick.h"

#include <algorithm>
#include <stdexcept>

namespace tmach::wick {

namespace {

struct Enumerator {
  const std::vector<ModeOp>& ops;
  const Algebra& alg;
  bool kronecker;
  const Scalar& coeff;
  const std::vector<DeltaFactor>& base_deltas;
  OperatorSum& out;

  std::vector<bool> used;
  std::vector<DeltaFactor> deltas;

  void emit() {
    std::vector<ModeOp> rest;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      if (!used[i]) rest.push_back(ops[i]);
    }
    std::sort(rest.begin(), rest.end(), normal_less);
    std::vector<DeltaFactor> all = base_deltas;
    all.insert(all.end(), deltas.begin(), deltas.end());
    out.add(OperatorTerm{coeff, std::move(all), std::move(rest)});
  }

  // Decide the fate of every annihilator from position `from` onwards.
  void run(std::size_t from) {
    std::size_t i = from;
    while (i < ops.size() && (used[i] || ops[i].dagger)) ++i;
    if (i == ops.size()) {
      emit();
      return;
    }
    // Left uncontracted.
    run(i + 1);
    used[i] = true;
    for (std::size_t j = i + 1; j < ops.size(); ++j) {
      if (used[j] || !ops[j].dagger) continue;
      auto d = contraction(ops[i], ops[j], alg);
      if (!d) continue;
      if (kronecker && d->kind == DeltaFactor::Kind::literal && d->m != 0) continue;
      used[j] = true;
      if (!kronecker) deltas.push_back(*d);
      run(i + 1);
      if (!kronecker) deltas.pop_back();
      used[j] = false;
    }
    used[i] = false;
  }
};

void expand_into(const std::vector<ModeOp>& ops, const Scalar& coeff, const std::vector<DeltaFactor>& deltas,
                 const Algebra& alg, bool kronecker, OperatorSum& out) {
  Enumerator e{ops, alg, kronecker, coeff, deltas, out, std::vector<bool>(ops.size(), false), {}};
  e.run(0);
}

}  // namespace

OperatorSum expand_product(const OperatorTerm& t, const Algebra& alg) {
  OperatorSum out;
  expand_into(t.factors, t.coeff, t.deltas, alg, false, out);
  return out;
}

OperatorSum normal_order(const OperatorSum& s, const Algebra& alg) {
  OperatorSum out;
  for (const auto& [key, c] : s.terms()) expand_into(key.factors, c, key.deltas, alg, false, out);
  return out;
}

OperatorSum hamiltonian_power(const Hamiltonian& h, int k, DeltaMode deltas) {
  if (k < 1) throw std::invalid_argument("power must be positive");
  const auto terms = h.op.term_list();
  const std::size_t n = terms.size();
  OperatorSum out;
  if (n == 0) return out;

  const bool kronecker = deltas == DeltaMode::kronecker;
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    Scalar coeff(1);
    std::vector<ModeOp> ops;
    std::vector<DeltaFactor> ds;
    for (std::size_t pick : idx) {
      coeff *= terms[pick].coeff;
      ops.insert(ops.end(), terms[pick].factors.begin(), terms[pick].factors.end());
      ds.insert(ds.end(), terms[pick].deltas.begin(), terms[pick].deltas.end());
    }
    expand_into(ops, coeff, ds, h.algebra, kronecker, out);

    std::size_t pos = 0;
    while (pos < idx.size() && ++idx[pos] == n) idx[pos++] = 0;
    if (pos == idx.size()) break;
  }
  return kronecker ? apply_kronecker(out) : out;
}

}  // namespace tmach::wick
