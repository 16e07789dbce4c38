#pragma once

// Row tables and their CSV / JSON serializations. Numbers are printed with 12
// significant digits; NaN prints as the lowercase token "nan".

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace kerrpb::cli {

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size()) {
            throw std::logic_error("Table: row has " + std::to_string(row.size()) +
                                   " cells, expected " + std::to_string(columns.size()));
        }
        rows.push_back(std::move(row));
    }
};

enum class Format { csv, json };

inline std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    if (v == 0.0) {
        return "0";  // folds -0
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + '"';
}

inline std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out + '"';
}

}  // namespace detail

inline void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
        os << (j ? "," : "") << detail::csv_field(t.columns[j]);
    }
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            os << (j ? "," : "");
            if (const double* d = std::get_if<double>(&row[j])) {
                os << format_number(*d);
            } else {
                os << detail::csv_field(std::get<std::string>(row[j]));
            }
        }
        os << '\n';
    }
}

/// JSON array of records. Non-finite numbers become the strings "nan",
/// "inf", "-inf" so the document stays valid JSON.
inline void write_json(std::ostream& os, const Table& t) {
    os << "[";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        os << (i ? ",\n " : "\n ") << "{";
        const auto& row = t.rows[i];
        for (std::size_t j = 0; j < row.size(); ++j) {
            os << (j ? ", " : "") << detail::json_string(t.columns[j]) << ": ";
            if (const double* d = std::get_if<double>(&row[j])) {
                if (std::isfinite(*d)) {
                    os << format_number(*d);
                } else {
                    os << detail::json_string(format_number(*d));
                }
            } else {
                os << detail::json_string(std::get<std::string>(row[j]));
            }
        }
        os << "}";
    }
    os << (t.rows.empty() ? "]\n" : "\n]\n");
}

inline void write_table(std::ostream& os, const Table& t, Format f) {
    if (f == Format::csv) {
        write_csv(os, t);
    } else {
        write_json(os, t);
    }
}

}  // namespace kerrpb::cli
