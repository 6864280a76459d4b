#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cycleweights/exact.hpp"
#include "cycleweights/limits.hpp"
#include "cycleweights/montecarlo.hpp"
#include "cycleweights/weights.hpp"

namespace cycleweights::io {

using nlohmann::json;

/// "%.17g": enough digits to round-trip a double.
std::string format_double(double v);

/// Non-finite doubles become null (JSON has no infinities).
json number_or_null(double v);

json to_json(const FamilyParams& p);
/// Unknown keys are rejected; missing theta/gamma take the family defaults.
FamilyParams family_from_json(const json& j);

json to_json(const Pmf& pmf);
json to_json(const BatchStats& st);
json to_json(const LimitLaw& law);

/// Header "k,probability,log_probability", one row per support point.
std::string pmf_csv(const Pmf& pmf);

/// Header "sample_index,K,L1,sorted_lengths" with lengths joined by ';'.
std::string samples_csv(const std::vector<SampleRecord>& samples);

}  // namespace cycleweights::io
