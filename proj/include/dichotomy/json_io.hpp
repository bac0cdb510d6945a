#pragma once

// JSON encodings of report types, shared by the criteria, applications and
// CLI layers.

#include "dichotomy/criteria.hpp"
#include "dichotomy/matrix.hpp"
#include "json.hpp"

namespace dichotomy {

nlohmann::json to_json_value(const Matrix& m);
nlohmann::json to_json_value(const SeriesClassification& s);
nlohmann::json to_json_value(const ClassMembership& c);
nlohmann::json to_json_value(const DecisionReport& r);

}  // namespace dichotomy
