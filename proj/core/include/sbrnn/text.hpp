#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sbrnn {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);
long long parse_integer(std::string_view s);
std::uint64_t parse_unsigned(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

}  // namespace sbrnn
