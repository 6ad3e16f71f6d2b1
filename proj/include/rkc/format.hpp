#pragma once

#include <cstdio>
#include <string>

namespace rkc {

/// Decimal rendering with 17 significant digits: enough to round-trip a
/// double, so repeated runs emit byte-identical artifacts.
inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace rkc
