#pragma once

#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

namespace graphblocks {

// A runtime value: the only data that flows through value ports, constants
// and sprite variables.  Strings must be constructed explicitly (std::string)
// to avoid the const char* -> bool variant pitfall.
using Scalar = std::variant<double, std::string, bool>;

inline bool is_number(const Scalar& s) { return std::holds_alternative<double>(s); }
inline bool is_string(const Scalar& s) { return std::holds_alternative<std::string>(s); }
inline bool is_boolean(const Scalar& s) { return std::holds_alternative<bool>(s); }

// Minimal-decimal rendering: integral doubles print without a fractional
// part, everything else prints the shortest round-trippable form.
std::string format_number(double v);

// Display form used by Say/Join/logs: numbers minimal-decimal, booleans
// "true"/"false", strings verbatim.
std::string format_scalar(const Scalar& s);

// Full-string numeric parse with surrounding whitespace allowed.  Returns
// nullopt for anything that is not a complete number ("12abc", "").
std::optional<double> parse_number(const std::string& text);

// Lenient numeric coercion: numbers pass through, booleans map to
// 1/0, numeric strings parse.  Nullopt means the coercion failed.
std::optional<double> to_number(const Scalar& s);

// Scalar <-> JSON (numbers always carried as double).
Scalar scalar_from_json(const nlohmann::json& j);
nlohmann::json scalar_to_json(const Scalar& s);

// Case-insensitive ASCII helpers (Equals / Contains semantics).
std::string ascii_lower(const std::string& s);

}  // namespace graphblocks
