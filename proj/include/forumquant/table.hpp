#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace fq {

// Empty cell, text, real (NaN prints empty) or integer.
using Cell = std::variant<std::monostate, std::string, double, std::int64_t>;
using Row = std::vector<Cell>;

struct Table {
    std::vector<std::string> columns;
    std::vector<Row> rows;

    void add(Row row);
};

// 6 significant digits, "-0" folded to "0", undefined as "".
std::string format_real(double value);
std::string format_cell(const Cell& cell);

// RFC 4180: CRLF line ends, fields quoted when they hold a comma, quote or
// line break.
std::string to_csv(const Table& table);
void write_table(const Table& table, const std::filesystem::path& path);

}  // namespace fq
