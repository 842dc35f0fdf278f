#pragma once

#include <cstdio>
#include <string>

namespace ddlab {

/// Shortest round-trippable decimal form with at least `digits` significant
/// digits; deterministic across reruns on one platform.
inline std::string fmt_sig(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

}  // namespace ddlab
