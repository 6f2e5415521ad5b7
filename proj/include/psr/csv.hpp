#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace psr {

/// Locale-independent %.12g; infinities print as "inf" / "-inf".
inline std::string fmt12(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

}  // namespace psr
