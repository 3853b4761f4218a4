#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

namespace fedlinucb {

/// Fixed-notation rendering with exactly 12 significant digits, independent
/// of the platform's printf for large magnitudes ("0" for zero).
std::string format_number(double v);

/// JSON serializer that renders floating-point values with format_number so
/// that output files are byte-stable. Integers and strings render as usual.
void write_json(std::ostream& os, const nlohmann::ordered_json& value, int indent = 2);
std::string to_json_string(const nlohmann::ordered_json& value, int indent = 2);

}  // namespace fedlinucb
