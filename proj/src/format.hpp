#pragma once

#include <cstdio>
#include <string>

namespace cbir::detail {

inline std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

}  // namespace cbir::detail
