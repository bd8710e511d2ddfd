#pragma once

#include "json.hpp"
#include "weylsys/counting.hpp"
#include "weylsys/expsum.hpp"
#include "weylsys/hardy_littlewood.hpp"
#include "weylsys/multilinear.hpp"
#include "weylsys/pencil.hpp"

namespace weylsys {

using Json = nlohmann::ordered_json;

/// Numbers when they fit in 64 bits, decimal strings otherwise.
Json json_count(u128 v);
Json json_count(const Integer& v);
Json json_rational(const Rational& q);
/// Non-finite doubles become null.
Json json_real(double v);

// Wall-clock fields are left out so that documents are reproducible.
Json to_json(const CountResult& r);
Json to_json(const NCountResult& r);
Json to_json(const WeylSumResult& r);
Json to_json(const RationalApprox& r);
Json to_json(const DichotomyReport& r);
Json to_json(const BinaryForm& f);
Json to_json(const DiscriminantResult& r);
Json to_json(const PencilRankReport& r);
Json to_json(const VStarEstimate& r);
Json to_json(const HInvariantBounds& r);
Json to_json(const DichotomyConstants& c);
Json to_json(const GrowthFit& g);
Json to_json(const SingularSeriesEstimate& r);
Json to_json(const SingularIntegralEstimate& r);
Json to_json(const AsymptoticReport& r);

}  // namespace weylsys
