#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wrsn {

// Shortest decimal form that round-trips to the same double.
std::string fmt_double(double v);

// Strict: the whole string must be a number. Accepts inf/-inf.
double parse_double(std::string_view s);

std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string trim(std::string_view s);

}  // namespace wrsn
