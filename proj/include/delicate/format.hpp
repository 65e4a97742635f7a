#pragma once

#include <gmpxx.h>

#include <cstdio>
#include <string>

namespace delicate::fmt {

// Locale-independent shortest-ish decimal for doubles; same bytes on every
// run for the same value.
inline std::string to_sig15(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", x);
    return buf;
}

// Fixed 'digits' significant decimal digits of a high-precision float,
// rendered as d.ddd...e±k.
inline std::string to_decimal(const mpf_class& x, size_t digits = 30) {
    if (x == 0) return "0";
    mp_exp_t exp;
    std::string mant = x.get_str(exp, 10, digits);
    bool neg = !mant.empty() && mant[0] == '-';
    std::string core = neg ? mant.substr(1) : mant;
    if (core.empty()) return "0";
    std::string out = neg ? "-" : "";
    out += core.substr(0, 1);
    if (core.size() > 1) {
        out += '.';
        out += core.substr(1);
    }
    out += 'e';
    long e10 = static_cast<long>(exp) - 1;
    if (e10 >= 0) out += '+';
    out += std::to_string(e10);
    return out;
}

}   // namespace delicate::fmt
