#pragma once

// Signal files: plain text with one sample per line and an optional
// "# sample_rate=<Hz>" comment, or CSV with a header row naming the columns.

#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fundfreq/signal.hpp"

namespace fundfreq {

/// Malformed or unreadable signal file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline double parse_number(std::string_view text, std::size_t line) {
    const std::string s(trim(text));
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size())
        throw FormatError("line " + std::to_string(line) + ": not a number: '" + s + "'");
    return v;
}

inline std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.emplace_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

}  // namespace detail

inline Signal read_signal_text(std::istream& in) {
    std::vector<double> samples;
    std::optional<double> rate;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        const auto body = detail::trim(line);
        if (body.empty()) continue;
        if (body.front() == '#') {
            constexpr std::string_view key = "sample_rate=";
            const auto rest = detail::trim(body.substr(1));
            if (rest.starts_with(key)) rate = detail::parse_number(rest.substr(key.size()), lineno);
            continue;
        }
        samples.push_back(detail::parse_number(body, lineno));
    }
    if (samples.empty()) throw FormatError("signal file contains no samples");
    return Signal(std::move(samples), rate);
}

/// CSV with a header row; `column` selects the sample column by name.
inline Signal read_signal_csv(std::istream& in, std::string_view column) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> index;
    std::vector<double> samples;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto fields = detail::split_csv(body);
        if (!index) {
            for (std::size_t i = 0; i < fields.size(); ++i)
                if (fields[i] == column) index = i;
            if (!index) throw FormatError("CSV header has no column '" + std::string(column) + "'");
            continue;
        }
        if (*index >= fields.size())
            throw FormatError("line " + std::to_string(lineno) + ": missing column");
        samples.push_back(detail::parse_number(fields[*index], lineno));
    }
    if (samples.empty()) throw FormatError("CSV file contains no samples");
    return Signal(std::move(samples));
}

/// Reads `path` as CSV when `column` is given or the extension is .csv (column "y"), else as text.
inline Signal read_signal(const std::string& path, std::optional<std::string> column = {}) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open signal file '" + path + "'");
    const bool csv = column.has_value() || (path.size() >= 4 && path.ends_with(".csv"));
    return csv ? read_signal_csv(in, column.value_or("y")) : read_signal_text(in);
}

/// One sample per line at full round-trip precision.
inline void write_signal_text(std::ostream& out, const Signal& signal) {
    char buf[64];
    if (auto rate = signal.sample_rate()) {
        std::snprintf(buf, sizeof buf, "%.17g", *rate);
        out << "# sample_rate=" << buf << '\n';
    }
    for (double v : signal.samples()) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << '\n';
    }
}

inline void write_values(std::ostream& out, std::span<const double> values) {
    char buf[64];
    for (double v : values) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << '\n';
    }
}

}  // namespace fundfreq
