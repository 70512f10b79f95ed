#pragma once

// Minimal helpers for the comma-separated formats used by datasets and
// experiment outputs. Fields never contain quotes or embedded commas.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

namespace rambig::csv {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::uint64_t parse_index(const std::string& field) {
    if (field.empty() || field.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("'" + field + "' is not a nonnegative integer");
    return std::stoull(field);
}

inline double parse_double(const std::string& field) {
    std::size_t used = 0;
    double value;
    try {
        value = std::stod(field, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("'" + field + "' is not a number");
    }
    if (used != field.size()) throw std::invalid_argument("'" + field + "' is not a number");
    return value;
}

/// Shortest representation that round-trips exactly.
inline std::string format_double(double x) { return fmt::format("{}", x); }

} // namespace rambig::csv
