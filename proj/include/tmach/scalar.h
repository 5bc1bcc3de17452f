#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>

#include <gmpxx.h>

namespace tmach {

using Rational = mpq_class;

/// Parses "p", "-p/q" or an exact decimal ("0.3", "1e-2") into a canonical rational.
/// Throws std::invalid_argument.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

/// Exact complex rational re + i*im.
struct ComplexRational {
  Rational re{0};
  Rational im{0};

  ComplexRational() = default;
  ComplexRational(Rational r) : re(std::move(r)) { re.canonicalize(); }
  ComplexRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {
    re.canonicalize();
    im.canonicalize();
  }
  ComplexRational(long r) : re(r) {}

  [[nodiscard]] bool is_zero() const { return re == 0 && im == 0; }
  [[nodiscard]] std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }

  ComplexRational& operator+=(const ComplexRational& o);
  ComplexRational& operator-=(const ComplexRational& o);
  ComplexRational& operator*=(const ComplexRational& o);
  friend ComplexRational operator+(ComplexRational a, const ComplexRational& b) { return a += b; }
  friend ComplexRational operator-(ComplexRational a, const ComplexRational& b) { return a -= b; }
  friend ComplexRational operator*(ComplexRational a, const ComplexRational& b) { return a *= b; }
  friend ComplexRational operator-(ComplexRational a) {
    a.re = -a.re;
    a.im = -a.im;
    return a;
  }
  friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

std::string to_string(const ComplexRational& z);

/// The three model parameters a scalar may carry symbolically.
enum class Param : int { alpha = 0, beta = 1, g = 2 };

/// Exponent vector over (alpha, beta, g).
struct Monomial {
  std::array<int, 3> exp{0, 0, 0};

  static Monomial of(Param p, int power = 1) {
    Monomial m;
    m.exp[static_cast<int>(p)] = power;
    return m;
  }
  [[nodiscard]] int degree() const { return exp[0] + exp[1] + exp[2]; }
  [[nodiscard]] int operator[](Param p) const { return exp[static_cast<int>(p)]; }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    return Monomial{{a.exp[0] + b.exp[0], a.exp[1] + b.exp[1], a.exp[2] + b.exp[2]}};
  }
  friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

/// "alpha^2*beta", "g", or "1".
std::string to_string(const Monomial& m);

/// Numeric values substituted for alpha, beta, g.
struct ParamValues {
  double alpha = 0.0;
  double beta = 0.0;
  double g = 0.0;
};

/// Sparse polynomial in (alpha, beta, g) with exact complex rational coefficients.
/// Zero coefficients are never stored, so the empty map is zero.
class Scalar {
 public:
  using container_type = std::map<Monomial, ComplexRational>;

  Scalar() = default;
  Scalar(ComplexRational c, Monomial m = {});
  Scalar(long c) : Scalar(ComplexRational(c)) {}
  static Scalar param(Param p) { return Scalar(ComplexRational(1), Monomial::of(p)); }

  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] const container_type& terms() const { return terms_; }
  /// Coefficient of one monomial (zero if absent).
  [[nodiscard]] ComplexRational coeff(const Monomial& m) const;
  [[nodiscard]] std::complex<double> evaluate(const ParamValues& v) const;

  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator-(Scalar a);
  friend bool operator==(const Scalar& a, const Scalar& b) = default;

 private:
  void add_term(const Monomial& m, const ComplexRational& c);
  container_type terms_;
};

std::string to_string(const Scalar& s);

}  // namespace tmach
