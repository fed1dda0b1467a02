#pragma once

#include <string>

namespace rdelab::text {

// 17 significant digits: enough for a lossless decimal round trip of a double.
std::string format_double(double value);

// Strict decimal parse; throws std::invalid_argument on trailing garbage.
double parse_double(const std::string& token);

}  // namespace rdelab::text
