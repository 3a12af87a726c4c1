#pragma once

// RFC-4180 style CSV: comma separated, fields containing a comma, quote or
// line break are quoted with doubled quotes, '\n' line ends.

#include <fstream>
#include <sstream>
#include <ostream>
#include <string>
#include <vector>

#include "frnse/error.hpp"
#include "frnse/report.hpp"

namespace frnse::io {

inline std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\n\r") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& row)
{
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i)
            out << ',';
        out << csv_escape(row[i]);
    }
    out << '\n';
}

inline void write_csv(std::ostream& out, const Table& t)
{
    write_csv_row(out, t.header);
    for (const auto& r : t.rows)
        write_csv_row(out, r);
    if (!out)
        throw IoError("failed to write CSV table " + t.name);
}

inline std::string to_csv(const Table& t)
{
    std::ostringstream out;
    write_csv(out, t);
    return out.str();
}

/// Parses CSV text into rows (header included).
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
                ++i;
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            row.clear();
            field.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (quoted)
        throw IoError("unterminated quoted CSV field");
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace frnse::io
