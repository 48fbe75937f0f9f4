#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "flexfn/flex_model.hpp"

namespace flexfn {

// JSON layout:
// {"C":2.97,"lambda":1,"k":6,"alpha":[..4],"beta":[..],"g0":1,"sigma_x":0.1,
//  "basis":{"order":3,"knots":[...]}}
// Missing keys keep their reference values; unknown keys are rejected.
nlohmann::json to_json(const FlexParams& p);
FlexParams params_from_json(const nlohmann::json& j);

// Overlay the keys present in `j` onto `base`.
FlexParams params_from_json(const nlohmann::json& j, FlexParams base);

// Stable 64-bit FNV-1a hash of the canonical JSON form, as 16 hex digits.
std::string params_hash(const FlexParams& p);

}  // namespace flexfn
