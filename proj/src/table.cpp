#include "forumquant/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "forumquant/errors.hpp"

namespace fq {

void Table::add(Row row) {
    if (row.size() != columns.size()) {
        throw Error(ErrorKind::kValidation, "row has " + std::to_string(row.size()) + " cells, table has " +
                                                std::to_string(columns.size()) + " columns");
    }
    rows.push_back(std::move(row));
}

std::string format_real(double value) {
    if (!std::isfinite(value)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    std::string s(buf);
    if (s == "-0") s = "0";
    return s;
}

std::string format_cell(const Cell& cell) {
    if (std::holds_alternative<std::string>(cell)) return std::get<std::string>(cell);
    if (std::holds_alternative<double>(cell)) return format_real(std::get<double>(cell));
    if (std::holds_alternative<std::int64_t>(cell)) return std::to_string(std::get<std::int64_t>(cell));
    return "";
}

namespace {

void append_field(std::string& out, const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        out += field;
        return;
    }
    out += '"';
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

}  // namespace

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        append_field(out, table.columns[i]);
    }
    out += "\r\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) throw Error(ErrorKind::kValidation, "row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            append_field(out, format_cell(row[i]));
        }
        out += "\r\n";
    }
    return out;
}

void write_table(const Table& table, const std::filesystem::path& path) {
    const std::string text = to_csv(table);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

}  // namespace fq
