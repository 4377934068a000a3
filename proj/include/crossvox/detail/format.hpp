#ifndef CROSSVOX_DETAIL_FORMAT_HPP
#define CROSSVOX_DETAIL_FORMAT_HPP

#include <cstdio>
#include <string>

namespace crossvox::detail {

// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double x) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    double parsed = 0.0;
    std::sscanf(buf, "%lf", &parsed);
    if (parsed == x) break;
  }
  return buf;
}

}  // namespace crossvox::detail

#endif  // CROSSVOX_DETAIL_FORMAT_HPP
