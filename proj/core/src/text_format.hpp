#pragma once

// Internal locale-independent number formatting/parsing helpers shared by the
// serialization code. Not installed; std::to_chars / std::from_chars keep the
// output byte-stable across platforms and locales.

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

#include "qcr/errors.hpp"

namespace qcr::detail {

// Shortest representation that round-trips exactly.
inline std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

// General format with a fixed number of significant digits.
inline std::string format_double(double value, int significant_digits) {
  char buf[48];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general,
                                 significant_digits);
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  // Tolerate surrounding spaces produced by hand-edited files.
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  while (ptr != end && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
  if (ec != std::errc() || ptr != end) {
    throw MalformedCsvError("failed to parse number from '" +
                            std::string(text) + "' (" + std::string(what) +
                            ")");
  }
  return value;
}

}  // namespace qcr::detail
