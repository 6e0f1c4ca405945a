#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "counterfair/errors.hpp"

namespace counterfair {

/// Fixed 6-decimal rendering used by every CSV real; NaN renders as "nan".
inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

/// Signed fixed-decimal rendering for report tables ("+0.30", "-0.03").
inline std::string format_signed(double v, int decimals) {
    if (std::isnan(v)) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%+.*f", decimals, v);
    return buf;
}

inline std::string format_fixed(double v, int decimals) {
    if (std::isnan(v)) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

/// Quote a CSV field only when it needs quoting.
inline std::string csv_field(std::string_view s) {
    bool needs = s.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

inline std::string csv_row(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line.push_back(',');
        line += csv_field(fields[i]);
    }
    line.push_back('\n');
    return line;
}

/// Split one CSV line, honoring double-quote escaping. Raises parse_error on
/// an unterminated quote.
std::vector<std::string> csv_split(std::string_view line, std::size_t line_no = 0);

/// Write a whole file atomically: write to <path>.tmp, then rename over path.
/// A crashed or failed run never leaves a half-written artifact behind.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

/// Read a whole file; raises io_error naming the path when unreadable.
std::string read_file(const std::filesystem::path& path);

}  // namespace counterfair
