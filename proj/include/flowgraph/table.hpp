#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flowgraph {

/// A delimited text table held as strings. Cells are kept verbatim so that
/// pass-through columns survive a read/write cycle unchanged.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    /// 1-based source line of each row (the header is line 1). Empty for
    /// tables that were not read from text.
    std::vector<std::size_t> lines;

    std::optional<std::size_t> find(std::string_view column) const;
    /// Index of `column`; throws SchemaError when absent.
    std::size_t require(std::string_view column) const;
    std::size_t line_of(std::size_t row) const;
};

Table parse_table(std::string_view text, char delimiter = ',');
Table read_table(const std::filesystem::path& path, char delimiter = ',');

/// Header first, then rows. Fields containing the delimiter, quotes or line
/// breaks are double-quoted.
std::string format_table(const Table& table, char delimiter = ',');
void write_table(const Table& table, const std::filesystem::path& path, char delimiter = ',');

/// Shortest representation that parses back to the same double. Integral
/// values print without a decimal point ("-2", "8").
std::string format_number(double value);

/// Strict full-field numeric parse.
std::optional<double> parse_number(std::string_view text);

} // namespace flowgraph
