#pragma once

#include <cstdio>
#include <string>

namespace walkgnn {

// 17 significant digits: enough for exact double round-trips, used by every
// CSV export.
inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace walkgnn
