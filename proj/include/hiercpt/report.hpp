// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <fstream>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "hiercpt/common.hpp"
#include "hiercpt/csv.hpp"

namespace hiercpt {

using Cell = std::variant<long long, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw data_error("table: row arity mismatch");
        rows.push_back(std::move(row));
    }
};

inline std::string cell_to_string(const Cell& cell) {
    if (std::holds_alternative<long long>(cell))
        return std::to_string(std::get<long long>(cell));
    if (std::holds_alternative<double>(cell)) return format_double(std::get<double>(cell));
    return std::get<std::string>(cell);
}

enum class ReportFormat { csv, json };

// Writes a result table with a stable column order. Floats carry 17
// significant digits so a parse-back reproduces them exactly.
inline void emit_report(const Table& table, ReportFormat format, std::ostream& out) {
    if (table.rows.empty()) throw data_error("emit_report: empty results");
    if (format == ReportFormat::csv) {
        write_csv_row(out, table.columns);
        for (const auto& row : table.rows) {
            std::vector<std::string> fields;
            fields.reserve(row.size());
            for (const auto& cell : row) fields.push_back(cell_to_string(cell));
            write_csv_row(out, fields);
        }
        return;
    }
    // json: array of objects mirroring the CSV schema
    out << "[\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out << "  {";
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) out << ", ";
            out << '"' << table.columns[c] << "\": ";
            const Cell& cell = table.rows[r][c];
            if (std::holds_alternative<std::string>(cell)) {
                out << '"';
                for (char ch : std::get<std::string>(cell)) {
                    if (ch == '"' || ch == '\\') out << '\\';
                    out << ch;
                }
                out << '"';
            } else {
                out << cell_to_string(cell);
            }
        }
        out << (r + 1 < table.rows.size() ? "},\n" : "}\n");
    }
    out << "]\n";
}

inline void emit_report_file(const Table& table, ReportFormat format, const std::string& path) {
    if (table.rows.empty()) throw data_error("emit_report: empty results");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("emit_report: cannot write " + path);
    emit_report(table, format, out);
}

}  // namespace hiercpt
