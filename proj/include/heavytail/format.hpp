#ifndef HEAVYTAIL_FORMAT_HPP_
#define HEAVYTAIL_FORMAT_HPP_

#include <cstdio>
#include <cstdlib>
#include <string>

namespace heavytail {

// Shortest decimal text that parses back to exactly the same double.
inline std::string format_double(double v) {
    char buf[48];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Full-precision rendering used by CSV artifacts (17 significant digits),
// so determinism is byte-testable.
inline std::string format_double_full(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace heavytail

#endif  // HEAVYTAIL_FORMAT_HPP_
