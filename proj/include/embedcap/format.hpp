#pragma once

#include <charconv>
#include <string>

namespace embedcap {

// Shortest round-trip decimal form; integral values keep one decimal place
// ("1.0" rather than "1") so CSV numbers are unambiguous.
inline std::string format_csv_number(double v) {
    char buf[40];
    v += 0.0;  // -0.0 prints as 0.0
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, res.ptr);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

}  // namespace embedcap
