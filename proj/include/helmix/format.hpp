#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

namespace helmix {

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Strict parse: the whole (trimmed) text must be a number. Accepts inf/-inf.
inline bool parse_double(std::string_view text, double& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) return false;
    if (text == "inf" || text == "+inf") { out = INFINITY; return true; }
    if (text == "-inf") { out = -INFINITY; return true; }
    if (text.front() == '+') text.remove_prefix(1);
    auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

}  // namespace helmix
