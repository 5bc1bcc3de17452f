#include "tmach/entropy.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tmach {

namespace {

mpz_class binomial(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

Rational power(const Rational& x, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

std::vector<Rational> bernoulli_numbers(int n) {
  if (n < 0) throw std::invalid_argument("bernoulli_numbers: negative order");
  std::vector<Rational> b(static_cast<std::size_t>(n) + 1);
  b[0] = 1;
  for (int m = 1; m <= n; ++m) {
    Rational s = 0;
    for (int k = 0; k < m; ++k) s += Rational(binomial(m + 1, k)) * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(m)] = -s / (m + 1);
    b[static_cast<std::size_t>(m)].canonicalize();
  }
  return b;
}

Rational bernoulli_polynomial(int n, const Rational& x) {
  const auto b = bernoulli_numbers(n);
  Rational r = 0;
  for (int k = 0; k <= n; ++k) r += Rational(binomial(n, k)) * b[static_cast<std::size_t>(k)] * power(x, n - k);
  r.canonicalize();
  return r;
}

Rational hurwitz_zeta_neg(int n, const Rational& a) {
  if (n < 0) throw std::invalid_argument("hurwitz_zeta_neg: n must be non-negative");
  if (a <= 0) throw std::invalid_argument("hurwitz_zeta_neg: a must be positive, got " + to_string(a));
  Rational r = -bernoulli_polynomial(n + 1, a) / (n + 1);
  r.canonicalize();
  return r;
}

// ---------------------------------------------------------------------------
// Product-sum parser

namespace {

class ProductParser {
 public:
  explicit ProductParser(const std::string& text) {
    for (char c : text) {
      if (!std::isspace(static_cast<unsigned char>(c))) s_ += c;
    }
  }

  std::vector<ProductTerm> parse() {
    std::vector<ProductTerm> terms;
    if (s_.empty()) throw error("empty expression");
    while (pos_ < s_.size()) {
      bool negative = false;
      if (peek() == '+' || peek() == '-') {
        negative = peek() == '-';
        ++pos_;
      } else if (!terms.empty()) {
        throw error("expected '+' or '-'");
      }
      ProductTerm t = term();
      if (negative) t.coeff = -t.coeff;
      terms.push_back(std::move(t));
    }
    return terms;
  }

 private:
  std::string s_;
  std::size_t pos_ = 0;

  [[nodiscard]] char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  std::invalid_argument error(const std::string& what) const {
    return std::invalid_argument("product sum: " + what + " at position " + std::to_string(pos_) + " in '" + s_ +
                                 "'");
  }

  Rational number() {
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' || peek() == '/') ++pos_;
    if (start == pos_) throw error("expected a number");
    return parse_rational(s_.substr(start, pos_ - start));
  }

  int index() {
    if (peek() != 'n') throw error("expected n<index>");
    ++pos_;
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) throw error("missing index after 'n'");
    return std::stoi(s_.substr(start, pos_ - start));
  }

  int exponent() {
    if (peek() != '^') return 1;
    ++pos_;
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) throw error("expected an exponent");
    return std::stoi(s_.substr(start, pos_ - start));
  }

  // (n_i + c) or (n_i - c), or n_i, each with an optional power.
  IndexFactor factor() {
    IndexFactor f;
    if (peek() == '(') {
      ++pos_;
      f.index = index();
      if (peek() == '+' || peek() == '-') {
        const bool neg = peek() == '-';
        ++pos_;
        if (peek() == 'n') throw error("a factor may involve only one index");
        f.shift = number();
        if (neg) f.shift = -f.shift;
      }
      if (peek() == 'n') throw error("a factor may involve only one index");
      if (peek() != ')') throw error("expected ')'");
      ++pos_;
    } else {
      f.index = index();
    }
    f.power = exponent();
    return f;
  }

  ProductTerm term() {
    ProductTerm t;
    bool first = true;
    while (pos_ < s_.size() && peek() != '+' && peek() != '-') {
      if (!first && peek() == '*') ++pos_;
      first = false;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        t.coeff *= number();
        continue;
      }
      IndexFactor f = factor();
      auto same = std::find_if(t.factors.begin(), t.factors.end(),
                               [&](const IndexFactor& g) { return g.index == f.index; });
      if (same == t.factors.end()) {
        t.factors.push_back(f);
      } else if (same->shift == f.shift) {
        same->power += f.power;
      } else {
        throw error("n" + std::to_string(f.index) + " appears with two different shifts; not a factored product");
      }
    }
    if (first) throw error("empty term");
    std::erase_if(t.factors, [](const IndexFactor& f) { return f.power == 0; });
    std::sort(t.factors.begin(), t.factors.end(),
              [](const IndexFactor& a, const IndexFactor& b) { return a.index < b.index; });
    return t;
  }
};

}  // namespace

ProductSum parse_product_sum(const std::string& text, std::vector<int> indices) {
  ProductSum s;
  s.terms = ProductParser(text).parse();
  std::set<int> used;
  for (const auto& t : s.terms) {
    for (const auto& f : t.factors) used.insert(f.index);
  }
  if (indices.empty()) {
    indices.assign(used.begin(), used.end());
  } else {
    for (int i : used) {
      if (std::find(indices.begin(), indices.end(), i) == indices.end()) {
        throw std::invalid_argument("product sum: n" + std::to_string(i) + " is not a summation index");
      }
    }
  }
  std::sort(indices.begin(), indices.end());
  s.indices = std::move(indices);
  std::erase_if(s.terms, [](const ProductTerm& t) { return t.coeff == 0; });
  return s;
}

std::string to_string(const ProductSum& s) {
  if (s.terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : s.terms) {
    Rational c = t.coeff;
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    if (c < 0) c = -c;
    first = false;
    bool need_star = false;
    if (c != 1 || t.factors.empty()) {
      os << to_string(c);
      need_star = true;
    }
    for (const auto& f : t.factors) {
      if (need_star) os << "*";
      need_star = true;
      if (f.shift == 0) {
        os << "n" << f.index;
      } else {
        os << "(n" << f.index << (f.shift > 0 ? "+" : "-") << to_string(f.shift > 0 ? f.shift : Rational(-f.shift))
           << ")";
      }
      if (f.power != 1) os << "^" << f.power;
    }
  }
  return os.str();
}

Rational regularize_index_sum(const IndexFactor& f) {
  if (f.power < 0) throw std::invalid_argument("regularize_index_sum: negative power");
  if (f.power == 0) return hurwitz_zeta_neg(0, Rational(1));
  if (f.shift > 0) return hurwitz_zeta_neg(f.power, f.shift);
  // Split off n + a <= 0 and shift the rest to a positive offset.
  Rational finite = 0;
  Rational a = f.shift;
  while (a <= 0) {
    finite += power(a, f.power);
    a += 1;
  }
  return finite + hurwitz_zeta_neg(f.power, a);
}

namespace {

const IndexFactor* factor_for(const ProductTerm& t, int index) {
  for (const auto& f : t.factors) {
    if (f.index == index) return &f;
  }
  return nullptr;
}

}  // namespace

Rational regularize_product_sum(const ProductSum& s) {
  Rational total = 0;
  for (const auto& t : s.terms) {
    Rational v = t.coeff;
    for (int i : s.indices) {
      const IndexFactor* f = factor_for(t, i);
      v *= regularize_index_sum(f ? *f : IndexFactor{i, 0, 0});
    }
    total += v;
  }
  total.canonicalize();
  return total;
}

Rational regularize_product_sum(const std::string& text, std::vector<int> indices) {
  return regularize_product_sum(parse_product_sum(text, std::move(indices)));
}

Rational partial_sum(const ProductSum& s, long cutoff) {
  if (cutoff < 0) throw std::invalid_argument("partial_sum: negative cutoff");
  Rational total = 0;
  for (const auto& t : s.terms) {
    Rational v = t.coeff;
    for (int i : s.indices) {
      const IndexFactor* f = factor_for(t, i);
      Rational one = 0;
      for (long n = 0; n <= cutoff; ++n) one += f ? power(Rational(n) + f->shift, f->power) : Rational(1);
      v *= one;
    }
    total += v;
  }
  total.canonicalize();
  return total;
}

// ---------------------------------------------------------------------------
// Entropy

DeltaValue delta_at(const DeltaProfile& p, const Rational& x) {
  DeltaValue d;
  if (p.kind == DeltaProfile::Kind::kronecker) {
    d.exact = Rational(x == 0 ? 1 : 0);
    d.value = d.exact->get_d();
  } else {
    d.value = p(x.get_d());
  }
  return d;
}

namespace {

const char* const kAlphaBetaSum = "n2*(n1+1) + n1*n2";

Rational abs_q(const Rational& q) { return q < 0 ? Rational(-q) : q; }

// prefactor * delta * sum, exact when the delta is.
void finish(const Rational& rational_part, const DeltaValue& d, std::optional<Rational>& exact, double& value) {
  if (d.exact) {
    exact = rational_part * *d.exact;
    exact->canonicalize();
    value = exact->get_d();
  } else {
    exact.reset();
    value = rational_part.get_d() * d.value;
  }
}

}  // namespace

EntropyReport entropy_first_order(const EntropyParams& p, const Rational& dt, const std::vector<long>& cutoffs) {
  EntropyReport r;
  r.params = p;
  r.dt = dt;
  const ProductSum sum = parse_product_sum(kAlphaBetaSum);
  r.sum_expression = to_string(sum);
  for (long c : cutoffs) r.partial_sums.push_back({c, partial_sum(sum, c)});
  r.regularized_sum = regularize_product_sum(sum);
  r.delta = delta_at(p.delta, abs_q(dt) - p.offset * p.T);
  finish(r.regularized_sum * dt * p.alpha * p.beta, r.delta, r.exact, r.value);
  return r;
}

std::vector<TraceTerm> trace_UH_first_terms(const EntropyParams& p, const Rational& dt) {
  std::vector<TraceTerm> out;

  TraceTerm g;
  g.name = "g";
  g.prefactor = "g";
  g.delta_argument = "t-t'";
  g.occupation_sum = parse_product_sum("n1");
  g.regularized_sum = regularize_product_sum(g.occupation_sum);
  g.delta = delta_at(p.delta, dt);
  finish(p.g * g.regularized_sum, g.delta, g.exact, g.value);
  out.push_back(std::move(g));

  TraceTerm g2;
  g2.name = "g^2";
  g2.prefactor = "-(t-t') g^2";
  g2.delta_argument = "t-t'";
  g2.occupation_sum = parse_product_sum("n1*n2");
  g2.regularized_sum = regularize_product_sum(g2.occupation_sum);
  g2.delta = delta_at(p.delta, dt);
  finish(-dt * p.g * p.g * g2.regularized_sum, g2.delta, g2.exact, g2.value);
  out.push_back(std::move(g2));

  TraceTerm ab;
  ab.name = "alpha*beta";
  ab.prefactor = "-(t-t') alpha beta";
  ab.delta_argument = p.offset == 1 ? "|t-t'|-T" : "|t-t'|-" + std::to_string(p.offset) + "T";
  ab.occupation_sum = parse_product_sum(kAlphaBetaSum);
  ab.regularized_sum = regularize_product_sum(ab.occupation_sum);
  ab.delta = delta_at(p.delta, abs_q(dt) - p.offset * p.T);
  finish(-dt * p.alpha * p.beta * ab.regularized_sum, ab.delta, ab.exact, ab.value);
  ab.in_entropy = true;
  out.push_back(std::move(ab));
  return out;
}

// ---------------------------------------------------------------------------
// Export

namespace {

ojson delta_json(const DeltaValue& d) {
  ojson j;
  j["exact"] = d.exact ? ojson(to_string(*d.exact)) : ojson(nullptr);
  j["value"] = d.value;
  return j;
}

}  // namespace

ojson to_json(const EntropyParams& p) {
  ojson j;
  j["alpha"] = to_string(p.alpha);
  j["beta"] = to_string(p.beta);
  j["g"] = to_string(p.g);
  j["T"] = to_string(p.T);
  j["offset"] = p.offset;
  j["delta"] = p.delta.name();
  return j;
}

ojson to_json(const EntropyReport& r) {
  ojson j;
  j["params"] = to_json(r.params);
  j["dt"] = to_string(r.dt);
  j["sum_expression"] = r.sum_expression;
  ojson partial = ojson::array();
  for (const auto& s : r.partial_sums) {
    partial.push_back({{"cutoff", s.cutoff}, {"value", to_string(s.value)}});
  }
  j["partial_sums"] = partial;
  j["regularized_sum"] = to_string(r.regularized_sum);
  j["delta"] = delta_json(r.delta);
  j["entropy_exact"] = r.exact ? ojson(to_string(*r.exact)) : ojson(nullptr);
  j["entropy"] = r.value;
  j["positive"] = r.positive();
  return j;
}

ojson to_json(const std::vector<TraceTerm>& terms) {
  ojson a = ojson::array();
  for (const auto& t : terms) {
    ojson j;
    j["term"] = t.name;
    j["prefactor"] = t.prefactor;
    j["delta_argument"] = t.delta_argument;
    j["occupation_sum"] = to_string(t.occupation_sum);
    ojson idx = ojson::array();
    for (int i : t.occupation_sum.indices) idx.push_back("n" + std::to_string(i));
    j["summed_over"] = idx;
    j["regularized_sum"] = to_string(t.regularized_sum);
    j["delta"] = delta_json(t.delta);
    j["exact"] = t.exact ? ojson(to_string(*t.exact)) : ojson(nullptr);
    j["value"] = t.value;
    j["in_entropy"] = t.in_entropy;
    a.push_back(j);
  }
  return a;
}

std::string derivation_text(const EntropyReport& r, const std::vector<TraceTerm>& terms) {
  auto num = [](const std::optional<Rational>& q, double v) {
    std::ostringstream os;
    if (q) os << to_string(*q);
    else os << v;
    return os.str();
  };
  std::ostringstream os;
  const auto& p = r.params;
  os << "parameters: alpha=" << to_string(p.alpha) << " beta=" << to_string(p.beta) << " g=" << to_string(p.g)
     << " T=" << to_string(p.T) << " t-t'=" << to_string(r.dt) << " delta=" << p.delta.name() << "\n";
  os << "Tr UH, first terms:\n";
  for (const auto& t : terms) {
    os << "  " << t.name << ": " << t.prefactor << " D(" << t.delta_argument << ") sum[" << to_string(t.occupation_sum)
       << "]\n";
    os << "    D = " << num(t.delta.exact, t.delta.value) << ", regularized sum = " << to_string(t.regularized_sum)
       << ", term = " << num(t.exact, t.value) << (t.in_entropy ? "" : "  (g-term, not in the entropy)") << "\n";
  }
  os << "index sums:\n";
  std::set<std::pair<Rational, int>> seen;
  for (const auto& t : terms) {
    for (const auto& term : t.occupation_sum.terms) {
      for (const auto& f : term.factors) {
        if (!seen.insert({f.shift, f.power}).second) continue;
        std::string base = "n";
        if (f.shift != 0) base = "(n" + std::string(f.shift > 0 ? "+" : "-") + to_string(abs_q(f.shift)) + ")";
        if (f.power != 1) base += "^" + std::to_string(f.power);
        os << "  sum_n " << base << " = " << to_string(regularize_index_sum(f)) << "\n";
      }
    }
  }
  os << "partial sums of " << r.sum_expression << ":";
  for (const auto& s : r.partial_sums) os << " L=" << s.cutoff << ": " << to_string(s.value) << ";";
  os << "\n";
  os << "regularized: " << to_string(r.regularized_sum) << "\n";
  os << "S = -(alpha*beta term) = (" << to_string(r.regularized_sum) << ") (t-t') alpha beta D(|t-t'|-T) = "
     << num(r.exact, r.value) << "\n";
  os << "positive: " << (r.positive() ? "yes" : "no") << "\n";
  return os.str();
}

}  // namespace tmach
