#include "tmach/audit.h"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tmach/wick.h"

namespace tmach {

namespace {

int total(const FockIndex& f) { return std::accumulate(f.n.begin(), f.n.end(), 0); }

Scalar mono(int a, int b, int g, long c = 1) { return Scalar(ComplexRational(c), Monomial{{a, b, g}}); }

// Adds c * sqrt(r) at (bra = to, ket = from, m); a negative radicand becomes i*sqrt(|r|).
void put(ExactKernel& k, const Basis& basis, const FockIndex& from, const FockIndex& to, int m, Scalar c,
         long long r) {
  if (r == 0 || c.is_zero()) return;
  if (r < 0) {
    c *= Scalar(ComplexRational(Rational(0), Rational(1)));
    r = -r;
  }
  auto& cell = k[{basis.index_of(to), basis.index_of(from), m}];
  cell.add(c, static_cast<std::uint64_t>(r));
  if (cell.is_zero()) k.erase({basis.index_of(to), basis.index_of(from), m});
}

FockIndex moved(FockIndex n, int d1, int d2) {
  n.n[0] += d1;
  n.n[1] += d2;
  return n;
}

// Splits every cell by parameter monomial, factoring the monomial out.
std::map<Monomial, ExactKernel> split(const ExactKernel& k) {
  std::map<Monomial, ExactKernel> out;
  for (const auto& [key, s] : k) {
    for (const auto& [radicand, scalar] : s.parts()) {
      for (const auto& [m, c] : scalar.terms()) out[m][key].add(Scalar(c), radicand);
    }
  }
  return out;
}

}  // namespace

ExactKernel printed_kernel(int k, const Basis& basis, int max_total) {
  if (k != 1 && k != 2) throw std::invalid_argument("printed formulas exist for k = 1 and k = 2 only");
  if (basis.regions() < 2) throw std::invalid_argument("printed formulas need regions 1 and 2");
  ExactKernel out;
  for (const auto& n : basis.states()) {
    if (total(n) > max_total) continue;
    const long long n1 = n.n[0];
    const long long n2 = n.n[1];
    long long sum = total(n);
    if (k == 1) {
      if (n2 >= 1) put(out, basis, n, moved(n, 1, -1), 1, mono(1, 0, 0), n2 * (n1 + 1));
      if (n1 >= 1) put(out, basis, n, moved(n, -1, 1), -1, mono(0, 1, 0), n1 * n2);
      put(out, basis, n, n, 0, mono(0, 0, 1, sum), 1);
      continue;
    }
    if (n1 >= 2) put(out, basis, n, moved(n, -2, 2), -1, mono(2, 0, 0), (n1 - 2) * (n1 - 3) * (n2 + 1) * (n2 + 2));
    if (n1 >= 1) put(out, basis, n, moved(n, -1, 1), -1, mono(2, 0, 0), (n1 - 1) * (n2 + 1));
    if (n2 >= 2) put(out, basis, n, moved(n, 2, -2), 1, mono(0, 2, 0), (n1 + 3) * (n1 + 4) * n2 * (n2 - 1));
    if (n2 >= 1) put(out, basis, n, moved(n, 1, -1), 1, mono(0, 2, 0), (n1 - 1) * (n2 + 1));
    long long cross = 0;
    long long self = 0;
    for (std::size_t i = 0; i < n.n.size(); ++i) {
      self += static_cast<long long>(n.n[i]) * (n.n[i] + 1);
      for (std::size_t j = 0; j < n.n.size(); ++j) {
        if (i != j) cross += static_cast<long long>(n.n[i]) * n.n[j];
      }
    }
    put(out, basis, n, n, 0, mono(0, 0, 2, cross + self), 1);
    for (int m : {-1, 1}) put(out, basis, n, n, m, mono(1, 1, 0, n2 * (n1 + 1) + n1 * n2), 1);
    if (n1 >= 1) put(out, basis, n, moved(n, -1, 1), -1, mono(1, 0, 1, sum), (n1 - 1) * (n2 + 1));
    put(out, basis, n, n, 0, mono(1, 0, 1, sum), 1);
    if (n2 >= 1) put(out, basis, n, moved(n, 1, -1), 1, mono(0, 1, 1, sum), (n2 - 1) * (n1 + 1));
    put(out, basis, n, n, 0, mono(0, 1, 1, sum), 1);
  }
  return out;
}

const FormulaGroupSummary& FormulaAudit::group(const Monomial& m) const {
  for (const auto& g : groups) {
    if (g.group == m) return g;
  }
  throw std::out_of_range("no audit group " + to_string(m));
}

FormulaAudit audit_printed_formulas(int k, int regions, int max_total) {
  if (k != 1 && k != 2) throw std::invalid_argument("printed formulas exist for k = 1 and k = 2 only");
  if (max_total < 1) throw std::invalid_argument("max_total must be positive");
  // The printed formulas conserve the total, so a cap of max_total never truncates.
  const Basis basis(regions, max_total);
  const Hamiltonian h = build_hamiltonian(regions);
  const auto engine_sum = hamiltonian_power(h, k, {.max_power = std::max(k, 4), .shift_window = 8,
                                                   .deltas = DeltaMode::kronecker});
  const auto oracle_sum = wick::hamiltonian_power(h, k, DeltaMode::kronecker);

  auto restrict = [&](ExactKernel kern) {
    std::erase_if(kern, [&](const auto& kv) { return total(basis[std::get<1>(kv.first)]) > max_total; });
    return kern;
  };
  auto engine = split(restrict(exact_kernel_of(engine_sum, basis)));
  auto oracle = split(restrict(exact_kernel_of(oracle_sum, basis)));
  auto printed = split(printed_kernel(k, basis, max_total));

  std::set<Monomial> monomials;
  for (const auto* src : {&engine, &oracle, &printed}) {
    for (const auto& [m, kern] : *src) monomials.insert(m);
  }

  FormulaAudit audit{k, regions, max_total, {}, {}};
  for (const auto& m : monomials) {
    FormulaGroupSummary summary{m, 0, 0, 0};
    std::set<std::tuple<std::size_t, std::size_t, int>> cells;
    for (const auto* src : {&engine, &oracle, &printed}) {
      if (auto it = src->find(m); it != src->end()) {
        for (const auto& [key, v] : it->second) cells.insert(key);
      }
    }
    auto lookup = [&](const std::map<Monomial, ExactKernel>& src, const auto& key) {
      auto it = src.find(m);
      if (it == src.end()) return SurdScalar{};
      auto jt = it->second.find(key);
      return jt == it->second.end() ? SurdScalar{} : jt->second;
    };
    for (const auto& key : cells) {
      const auto [bra, ket, off] = key;
      FormulaAuditEntry e{m, basis[ket], basis[bra], off, lookup(engine, key), lookup(printed, key),
                          lookup(oracle, key)};
      ++summary.cells;
      if (!e.printed_match()) ++summary.printed_mismatches;
      if (!e.oracle_match()) ++summary.oracle_mismatches;
      audit.entries.push_back(std::move(e));
    }
    audit.groups.push_back(summary);
  }
  return audit;
}

ojson to_json(const SurdScalar& s) {
  ojson parts = ojson::array();
  for (const auto& [radicand, c] : s.parts()) parts.push_back({{"radicand", radicand}, {"coeff", to_json(c)}});
  return {{"text", to_string(s)}, {"parts", parts}};
}

ojson to_json(const FormulaAudit& a) {
  ojson j;
  j["k"] = a.k;
  j["regions"] = a.regions;
  j["max_total"] = a.max_total;
  ojson groups = ojson::array();
  for (const auto& g : a.groups) {
    groups.push_back({{"monomial", to_string(g.group)},
                      {"cells", g.cells},
                      {"printed_mismatches", g.printed_mismatches},
                      {"oracle_mismatches", g.oracle_mismatches}});
  }
  j["groups"] = groups;
  ojson entries = ojson::array();
  for (const auto& e : a.entries) {
    entries.push_back({{"monomial", to_string(e.group)},
                       {"from", e.from.n},
                       {"to", e.to.n},
                       {"offset", e.offset},
                       {"engine", to_string(e.engine)},
                       {"printed", to_string(e.printed)},
                       {"oracle", to_string(e.oracle)},
                       {"printed_match", e.printed_match()},
                       {"oracle_match", e.oracle_match()}});
  }
  j["entries"] = entries;
  return j;
}

namespace {

struct FactorToken {
  bool dagger;
  char region;  // digit or index letter
  int shift;
};

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  return {std::istream_iterator<std::string>(in), std::istream_iterator<std::string>()};
}

bool is_integer(const std::string& w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::vector<FactorToken> parse_factor(const std::string& w) {
  auto bad = [&] { return std::invalid_argument("unrecognised table factor '" + w + "'"); };
  if (w.size() < 2 || w.size() > 3) throw bad();
  const char kind = w[0];
  const char region = w[1];
  if (!std::isalnum(static_cast<unsigned char>(region))) throw bad();
  int shift = 0;
  if (w.size() == 3) {
    if (w[2] == '+') shift = 1;
    else if (w[2] == '-') shift = -1;
    else throw bad();
  }
  if (kind == 'c') return {{true, region, shift}};
  if (kind == 'a') return {{false, region, shift}};
  if (kind == 'n' && shift == 0) return {{true, region, 0}, {false, region, 0}};
  throw bad();
}

}  // namespace

OperatorSum parse_table_row(const std::string& text, int regions, const Scalar& monomial) {
  OperatorSum out;
  const auto words = split_words(text);
  std::size_t i = 0;
  bool first = true;
  while (i < words.size()) {
    long sign = 1;
    if (words[i] == "+" || words[i] == "-") {
      sign = words[i] == "-" ? -1 : 1;
      ++i;
    } else if (!first) {
      throw std::invalid_argument("expected '+' or '-' before '" + words[i] + "'");
    }
    first = false;
    if (i >= words.size()) throw std::invalid_argument("dangling sign in table row");

    long coeff = 1;
    bool has_coeff = false;
    if (is_integer(words[i])) {
      coeff = std::stol(words[i]);
      has_coeff = true;
      ++i;
    }
    std::string letters;
    if (i < words.size() && words[i].rfind("sum_", 0) == 0) {
      letters = words[i].substr(4);
      if (letters.empty()) throw std::invalid_argument("empty summation index list");
      ++i;
    }
    std::vector<FactorToken> factors;
    while (i < words.size() && words[i] != "+" && words[i] != "-") {
      auto f = parse_factor(words[i]);
      factors.insert(factors.end(), f.begin(), f.end());
      ++i;
    }
    if (!has_coeff && factors.empty()) throw std::invalid_argument("empty term in table row");
    for (const auto& f : factors) {
      if (std::isalpha(static_cast<unsigned char>(f.region)) && letters.find(f.region) == std::string::npos) {
        throw std::invalid_argument(std::string("unbound index '") + f.region + "'");
      }
    }

    std::vector<int> value(letters.size(), 1);
    const Scalar c = monomial * Scalar(sign * coeff);
    while (true) {
      OperatorTerm t;
      t.coeff = c;
      for (const auto& f : factors) {
        int r = 0;
        if (std::isdigit(static_cast<unsigned char>(f.region))) r = f.region - '0';
        else r = value[letters.find(f.region)];
        if (r < 1 || r > regions) throw std::invalid_argument("table region outside the model");
        t.factors.push_back(ModeOp{r, f.dagger, f.shift});
      }
      std::sort(t.factors.begin(), t.factors.end(), normal_less);
      out.add(std::move(t));
      std::size_t d = 0;
      while (d < value.size() && ++value[d] > regions) value[d++] = 1;
      if (d == value.size()) break;
    }
  }
  return out;
}

const std::vector<TableRow>& printed_h3_table() {
  static const std::vector<TableRow> rows = {
      {Monomial{{3, 0, 0}}, "c1+ c1+ c1+ a2 a2 a2 + 3 c1+ c1+ a2 a2 + c1+ a2", ""},
      {Monomial{{0, 3, 0}}, "a1 a1 a1 c2- c2- c2- - 6 a1 a1 c2- c2- + 7 a1 c2-", ""},
      {Monomial{{0, 0, 3}}, "sum_ijk ci cj ck ai aj ak + 3 sum_ij ci cj ai aj + sum_i ni", ""},
      {Monomial{{2, 1, 0}}, "3 c1+ c1+ a2 a2 a1 c2- - 3 c1+ c1+ a2 a2 + c1+ a2 a1 c2- - c1+ a2", ""},
      {Monomial{{1, 2, 0}}, "3 c1+ a2 a1 a1 c2- c2- - 9 c1+ a2 a1 c2- + 3 c1+ a2", ""},
      {Monomial{{2, 0, 1}},
       "3 sum_j c1+ c1+ cj a2 a2 aj + 3 c1+ c1+ a2 a2 + 2 sum_j c1+ cj aj a2 + 3 c1+ c2 a2 a2 + c1+ a2 + n2", ""},
      {Monomial{{1, 0, 2}}, "3 sum_jk c1+ cj ck a2 ak + 6 sum_j c1+ cj a2 aj + c1+ a2 + 3 sum_j c2 cj aj a2 + 2 n2",
       "first term has three creators and two annihilators as printed"},
      {Monomial{{1, 1, 1}},
       "8 sum_j c1+ cj a2 a1 aj c2- - 9 c1+ a2 - 2 c2 a1 - n2 - 9 c1+ a2 a1 c2- - 3 c1+ c1 a2 a2"
       " + c2 a2 a2 c2- - sum_j c1+ cj aj a1 + 2 c2 a2 a1 c2- - sum_j c1 cj aj a2",
       ""},
      {Monomial{{0, 2, 1}},
       "3 sum_j cj a1 aj a1 c2- c2- - 2 c1 a1 a2 c2- - 9 sum_j cj a1 aj c2- + 3 a1 a1 c2- c2- - 10 a1 c2-"
       " + 4 n1 + 3 sum_j nj + 3",
       "printed 'a_i' under sum_j read as a1; printed 'a_a a_1' read as a1 a1"},
      {Monomial{{0, 1, 2}},
       "2 sum_jk cj ck a1 aj ak c2- - 2 sum_j cj c1 a1 aj + 5 sum_j cj a1 aj c2- - sum_jk cj ck aj ak"
       " - 4 sum_j nj - 3 n1 + a1 c2- - 1",
       ""},
  };
  return rows;
}

int TableAudit::oracle_mismatches() const {
  int n = 0;
  for (const auto& r : rows) n += r.oracle_mismatches;
  return n;
}

int TableAudit::printed_mismatch_rows() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.matches_printed(); }));
}

namespace {

Rational real_coeff(const Scalar& s) {
  const ComplexRational c = s.coeff(Monomial{});
  if (c.im != 0 || s.terms().size() > 1) throw std::logic_error("table coefficients must be real rationals");
  return c.re;
}

}  // namespace

TableAudit audit_h3_table(int regions) {
  const Hamiltonian h = build_hamiltonian(regions);
  const auto engine = group_by_monomial(
      hamiltonian_power(h, 3, {.max_power = 4, .shift_window = 8, .deltas = DeltaMode::kronecker}));
  const auto oracle = group_by_monomial(wick::hamiltonian_power(h, 3, DeltaMode::kronecker));

  TableAudit audit{regions, {}};
  for (const auto& row : printed_h3_table()) {
    TableRowAudit r{row.monomial, row.text, row.note, {}, {}, {}, {}, {}, 0};
    const OperatorSum printed = parse_table_row(row.text, regions, Scalar(1));
    const OperatorSum eng = engine.contains(row.monomial) ? engine.at(row.monomial) : OperatorSum{};
    const OperatorSum orc = oracle.contains(row.monomial) ? oracle.at(row.monomial) : OperatorSum{};

    for (const auto& t : eng.term_list()) r.engine_coefficients.push_back(real_coeff(t.coeff));
    for (const auto& t : printed.term_list()) r.printed_coefficients.push_back(real_coeff(t.coeff));
    std::sort(r.engine_coefficients.begin(), r.engine_coefficients.end());
    std::sort(r.printed_coefficients.begin(), r.printed_coefficients.end());

    for (const auto& t : eng.term_list()) {
      const Scalar p = printed.coeff(t.factors, t.deltas);
      if (p.is_zero()) r.engine_only.push_back(t);
      else if (!(p == t.coeff)) r.coefficient_mismatches.emplace_back(t, real_coeff(t.coeff), real_coeff(p));
    }
    for (const auto& t : printed.term_list()) {
      if (eng.coeff(t.factors, t.deltas).is_zero()) r.printed_only.push_back(t);
    }
    OperatorSum diff = eng;
    diff -= orc;
    r.oracle_mismatches = static_cast<int>(diff.size());
    audit.rows.push_back(std::move(r));
  }
  return audit;
}

ojson to_json(const TableAudit& a) {
  auto term_text = [](const OperatorTerm& t) {
    OperatorTerm bare = t;
    bare.coeff = Scalar(1);
    return to_string(bare);
  };
  ojson rows = ojson::array();
  for (const auto& r : a.rows) {
    ojson row;
    row["monomial"] = to_string(r.monomial);
    row["printed_row"] = r.text;
    if (!r.note.empty()) row["transcription_note"] = r.note;
    ojson ec = ojson::array();
    for (const auto& q : r.engine_coefficients) ec.push_back(to_string(q));
    ojson pc = ojson::array();
    for (const auto& q : r.printed_coefficients) pc.push_back(to_string(q));
    row["engine_coefficients"] = ec;
    row["printed_coefficients"] = pc;
    row["matches_printed"] = r.matches_printed();
    ojson eo = ojson::array();
    for (const auto& t : r.engine_only) eo.push_back({{"term", term_text(t)}, {"coeff", to_string(real_coeff(t.coeff))}});
    ojson po = ojson::array();
    for (const auto& t : r.printed_only) po.push_back({{"term", term_text(t)}, {"coeff", to_string(real_coeff(t.coeff))}});
    ojson cm = ojson::array();
    for (const auto& [t, e, p] : r.coefficient_mismatches) {
      cm.push_back({{"term", term_text(t)}, {"engine", to_string(e)}, {"printed", to_string(p)}});
    }
    row["engine_only"] = eo;
    row["printed_only"] = po;
    row["coefficient_mismatches"] = cm;
    row["oracle_mismatches"] = r.oracle_mismatches;
    rows.push_back(std::move(row));
  }
  ojson j;
  j["regions"] = a.regions;
  j["delta"] = "kronecker";
  j["summary"] = {{"rows", a.rows.size()},
                  {"rows_differing_from_printed", a.printed_mismatch_rows()},
                  {"engine_vs_oracle_mismatches", a.oracle_mismatches()}};
  j["rows"] = rows;
  return j;
}

}  // namespace tmach
