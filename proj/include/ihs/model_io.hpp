#pragma once

// Model files (JSON) and the built-in model registry.
//
//   {
//     "name": "...",
//     "coordinates": ["R1", ...],
//     "parameters": {"g": 0.5},
//     "poisson": "canonical" | [["R1", "S2", "R3"], ...],   // upper entries {a, b}
//     "casimirs": [{"expr": "R1^2+R2^2+R3^2", "value": "1"}, ...],
//     "momentum": [{"name": "h", "expr": "..."}, ...]
//   }
//
// or the shorthand {"canonical": {"r": 1, "ke": 0, "kh": 1, "kf": 0}}.

#include <optional>
#include <string>

#include "ihs/phase_space.hpp"

namespace ihs {

IntegrableModel parse_model(const std::string& json_text);
IntegrableModel load_model_file(const std::string& path);

/// Inverse of parse_model; parse_model(serialize_model(m)) serializes to
/// the same bytes.
std::string serialize_model(const IntegrableModel& model);

/// "kovalevskaya" (parameter g, default 0) or "canonical:r,ke,kh,kf".
std::optional<IntegrableModel> builtin_model(const std::string& name, std::optional<double> g = std::nullopt);

/// Built-in name first, then a file path. A given g overrides the model's
/// parameter of that name.
IntegrableModel resolve_model(const std::string& reference, std::optional<double> g = std::nullopt);

}  // namespace ihs
