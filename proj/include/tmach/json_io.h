#pragma once

#include <json.hpp>

#include "tmach/opalg.h"

namespace tmach {

using ojson = nlohmann::ordered_json;

ojson to_json(const Rational& q);
Rational rational_from_json(const ojson& j);

/// {"monomial": {"alpha", "beta", "g"}, "re": {num, den}, "im": {num, den}} per monomial.
ojson to_json(const Scalar& s);
Scalar scalar_from_json(const ojson& j);

/// {"coeff": [...], "deltas": [{kind, m}], "factors": [{region, dagger, shift}]}
ojson to_json(const OperatorTerm& t);
OperatorTerm term_from_json(const ojson& j);

ojson to_json(const OperatorSum& s);
OperatorSum sum_from_json(const ojson& j);

}  // namespace tmach
