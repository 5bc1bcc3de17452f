#include "tmach/scalar.h"

#include <regex>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tmach {

namespace {

// Exact value of a decimal literal such as "-0.25" or "1.5e-3".
Rational parse_decimal(const std::string& text) {
  static const std::regex pattern(R"(([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern) || (m[2].length() == 0 && m[3].length() == 0)) {
    throw std::invalid_argument("not a rational number: '" + text + "'");
  }
  const std::string digits = m[2].str() + m[3].str();
  long exponent = m[4].matched ? std::stol(m[4].str()) : 0;
  exponent -= static_cast<long>(m[3].length());
  if (std::labs(exponent) > 4096) throw std::invalid_argument("exponent out of range: '" + text + "'");
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rational q{mpz_class(digits, 10)};
  if (exponent >= 0) q *= scale;
  else q /= scale;
  if (m[1] == "-") q = -q;
  q.canonicalize();
  return q;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  if (text.find_first_of(".eE") != std::string::npos) return parse_decimal(text);
  Rational q;
  if (text.empty() || q.set_str(text, 10) != 0) {
    throw std::invalid_argument("not a rational number: '" + text + "'");
  }
  if (q.get_den() == 0) {
    throw std::invalid_argument("zero denominator: '" + text + "'");
  }
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

ComplexRational& ComplexRational::operator+=(const ComplexRational& o) {
  re += o.re;
  im += o.im;
  return *this;
}

ComplexRational& ComplexRational::operator-=(const ComplexRational& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

ComplexRational& ComplexRational::operator*=(const ComplexRational& o) {
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

std::string to_string(const ComplexRational& z) {
  if (z.im == 0) return to_string(z.re);
  if (z.re == 0) return to_string(z.im) + "i";
  std::string im = to_string(z.im);
  return "(" + to_string(z.re) + (z.im > 0 ? "+" : "") + im + "i)";
}

std::string to_string(const Monomial& m) {
  static const char* names[] = {"alpha", "beta", "g"};
  std::string out;
  for (int k = 0; k < 3; ++k) {
    if (m.exp[k] == 0) continue;
    if (!out.empty()) out += "*";
    out += names[k];
    if (m.exp[k] != 1) out += "^" + std::to_string(m.exp[k]);
  }
  return out.empty() ? "1" : out;
}

Scalar::Scalar(ComplexRational c, Monomial m) { add_term(m, c); }

void Scalar::add_term(const Monomial& m, const ComplexRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

ComplexRational Scalar::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? ComplexRational{} : it->second;
}

std::complex<double> Scalar::evaluate(const ParamValues& v) const {
  std::complex<double> sum{0.0, 0.0};
  for (const auto& [m, c] : terms_) {
    double w = std::pow(v.alpha, m.exp[0]) * std::pow(v.beta, m.exp[1]) * std::pow(v.g, m.exp[2]);
    sum += c.to_complex() * w;
  }
  return sum;
}

Scalar& Scalar::operator+=(const Scalar& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  Scalar out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  }
  return out;
}

Scalar& Scalar::operator*=(const Scalar& o) { return *this = *this * o; }

Scalar operator-(Scalar a) {
  for (auto& [m, c] : a.terms_) c = -c;
  return a;
}

std::string to_string(const Scalar& s) {
  if (s.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : s.terms()) {
    if (!first) os << " + ";
    first = false;
    os << to_string(c);
    if (m.degree() > 0) os << "*" << to_string(m);
  }
  return os.str();
}

}  // namespace tmach
