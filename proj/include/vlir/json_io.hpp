#pragma once

#include <string>

#include <json.hpp>

#include "vlir/construction.hpp"
#include "vlir/distribution.hpp"
#include "vlir/mapping.hpp"
#include "vlir/oracles.hpp"
#include "vlir/quantities.hpp"
#include "vlir/source.hpp"

namespace vlir {

// On-disk formats. All loaders throw ConfigError with a pointed message on
// malformed input; probabilities must sum to 1 within 1e-9 and are then
// normalized exactly.
//
//   distribution  {"K": 2, "atoms": {"a": 0.5, "b": 0.5}}
//   map           {"K": 2, "assign": {"a": [1, 0], "b": [1, 1]}}   (atom -> [length, index])
//   source        {"kind": "iid", "K": 2, "symbols": {"0": 0.7, "1": 0.3}}
//                 {"kind": "mixture", "K": 2, "alpha": 0.5,
//                  "components": [{"0": ..., ...}, {...}]}
//                 {"kind": "explicit", "K": 2, "tables": {"1": {...}, "2": {...}}}

nlohmann::json to_json(const FiniteDistribution& dist);
FiniteDistribution distribution_from_json(const nlohmann::json& j);

nlohmann::json to_json(const VariableLengthMap& map);
VariableLengthMap map_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SourceModel& src);
SourceModel source_from_json(const nlohmann::json& j);

// Scalar reports. Infinite values serialize as the string "inf".
nlohmann::json to_json(const ExtendedReal& v);
nlohmann::json to_json(const QuantityReport& rep);
nlohmann::json to_json(const OracleReport& rep);
nlohmann::json to_json(const ConstructGuarantees& g);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

} // namespace vlir
