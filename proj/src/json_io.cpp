#include "tmach/json_io.h"

#include <stdexcept>

namespace tmach {

namespace {

ojson integer_json(const mpz_class& z) {
  if (z.fits_slong_p()) return z.get_si();
  return z.get_str();
}

mpz_class integer_from_json(const ojson& j) {
  if (j.is_number_integer()) return mpz_class(j.get<long>());
  if (j.is_string()) return mpz_class(j.get<std::string>());
  throw std::invalid_argument("expected an integer, got " + j.dump());
}

DeltaFactor::Kind kind_from_name(const std::string& s) {
  if (s == "literal") return DeltaFactor::Kind::literal;
  if (s == "signed") return DeltaFactor::Kind::signed_offset;
  if (s == "absolute") return DeltaFactor::Kind::absolute_offset;
  throw std::invalid_argument("unknown delta kind '" + s + "'");
}

}  // namespace

ojson to_json(const Rational& q) {
  ojson j;
  j["num"] = integer_json(q.get_num());
  j["den"] = integer_json(q.get_den());
  return j;
}

Rational rational_from_json(const ojson& j) {
  Rational q(integer_from_json(j.at("num")), integer_from_json(j.at("den")));
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator");
  q.canonicalize();
  return q;
}

ojson to_json(const Scalar& s) {
  ojson arr = ojson::array();
  for (const auto& [m, c] : s.terms()) {
    ojson e;
    e["monomial"] = {{"alpha", m.exp[0]}, {"beta", m.exp[1]}, {"g", m.exp[2]}};
    e["re"] = to_json(c.re);
    e["im"] = to_json(c.im);
    arr.push_back(std::move(e));
  }
  return arr;
}

Scalar scalar_from_json(const ojson& j) {
  Scalar s;
  for (const auto& e : j) {
    const auto& mj = e.at("monomial");
    Monomial m{{mj.at("alpha").get<int>(), mj.at("beta").get<int>(), mj.at("g").get<int>()}};
    s += Scalar(ComplexRational(rational_from_json(e.at("re")), rational_from_json(e.at("im"))), m);
  }
  return s;
}

ojson to_json(const OperatorTerm& t) {
  ojson j;
  j["coeff"] = to_json(t.coeff);
  ojson ds = ojson::array();
  for (const auto& d : t.deltas) ds.push_back({{"kind", kind_name(d.kind)}, {"m", d.m}});
  j["deltas"] = std::move(ds);
  ojson fs = ojson::array();
  for (const auto& f : t.factors) fs.push_back({{"region", f.region}, {"dagger", f.dagger}, {"shift", f.shift}});
  j["factors"] = std::move(fs);
  return j;
}

OperatorTerm term_from_json(const ojson& j) {
  OperatorTerm t;
  t.coeff = scalar_from_json(j.at("coeff"));
  for (const auto& d : j.at("deltas")) {
    DeltaFactor f{kind_from_name(d.at("kind").get<std::string>()), d.at("m").get<int>()};
    t.deltas.push_back(f.kind == DeltaFactor::Kind::literal ? DeltaFactor::literal(f.m) : f);
  }
  for (const auto& f : j.at("factors")) {
    t.factors.push_back(ModeOp{f.at("region").get<int>(), f.at("dagger").get<bool>(), f.at("shift").get<int>()});
  }
  return t;
}

ojson to_json(const OperatorSum& s) {
  ojson arr = ojson::array();
  for (const auto& t : s.term_list()) arr.push_back(to_json(t));
  return arr;
}

OperatorSum sum_from_json(const ojson& j) {
  OperatorSum s;
  for (const auto& t : j) s.add(term_from_json(t));
  return s;
}

}  // namespace tmach
