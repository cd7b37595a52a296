#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace bkvem {

// Round-trip precision; NaN prints as "*".
inline std::string csv_number(double v) {
  if (std::isnan(v)) return "*";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace bkvem
