#include "sbrnn/text.hpp"

#include <charconv>
#include <cmath>

#include "sbrnn/error.hpp"

namespace sbrnn {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

double parse_double(std::string_view s) {
  s = trim(s);
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc{} && res.ptr == s.data() + s.size(), "not a number: '" + std::string(s) + "'");
  return v;
}

long long parse_integer(std::string_view s) {
  s = trim(s);
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc{} && res.ptr == s.data() + s.size(), "not an integer: '" + std::string(s) + "'");
  return v;
}

std::uint64_t parse_unsigned(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc{} && res.ptr == s.data() + s.size(), "not an unsigned integer: '" + std::string(s) + "'");
  return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace sbrnn
