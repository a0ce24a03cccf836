// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hiercpt/common.hpp"

namespace hiercpt {

// Splits one CSV record. Double-quoted fields may contain commas and
// doubled quotes ("" -> ").
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c == '\r' && i + 1 == line.size()) {
            // tolerate CRLF input
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

// Reads a whole CSV file into rows of string fields. Blank lines are
// skipped; ragged rows are an error.
inline std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open file: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t width = 0;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (width == 0) width = fields.size();
        if (fields.size() != width) {
            throw data_error(path + ": ragged row at line " + std::to_string(lineno) + " (" +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(width) + ")");
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

inline std::string csv_escape(const std::string& s) {
    bool needs = s.find_first_of(",\"\n") != std::string::npos;
    if (!needs) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << csv_escape(fields[i]);
    }
    out << '\n';
}

}  // namespace hiercpt
