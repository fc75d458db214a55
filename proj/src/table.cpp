#include "flowgraph/table.hpp"

#include "flowgraph/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace flowgraph {

std::optional<std::size_t> Table::find(std::string_view column) const
{
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == column)
            return i;
    return std::nullopt;
}

std::size_t Table::require(std::string_view column) const
{
    if (auto idx = find(column))
        return *idx;
    throw SchemaError("column '" + std::string(column) + "' not found in header");
}

std::size_t Table::line_of(std::size_t row) const
{
    return row < lines.size() ? lines[row] : row + 2;
}

namespace {

// Splits one logical record starting at `pos`. Quoted fields may span lines.
// Returns false at end of input.
bool next_record(std::string_view text, std::size_t& pos, std::size_t& line, char delim,
                 std::vector<std::string>& fields)
{
    fields.clear();
    if (pos >= text.size())
        return false;

    std::string field;
    bool quoted = false;
    bool any = false;
    while (pos < text.size()) {
        const char c = text[pos];
        if (quoted) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field.push_back('"');
                    pos += 2;
                    continue;
                }
                quoted = false;
                ++pos;
                continue;
            }
            if (c == '\n')
                ++line;
            field.push_back(c);
            ++pos;
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
            any = true;
            ++pos;
            continue;
        }
        if (c == delim) {
            fields.push_back(std::move(field));
            field.clear();
            any = true;
            ++pos;
            continue;
        }
        if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') {
            ++pos;
            continue;
        }
        if (c == '\n') {
            ++pos;
            ++line;
            break;
        }
        field.push_back(c);
        any = true;
        ++pos;
    }
    if (any || !field.empty())
        fields.push_back(std::move(field));
    return true;
}

bool needs_quotes(std::string_view s, char delim)
{
    for (char c : s)
        if (c == delim || c == '"' || c == '\n' || c == '\r')
            return true;
    return false;
}

void append_field(std::string& out, std::string_view s, char delim)
{
    if (!needs_quotes(s, delim)) {
        out.append(s);
        return;
    }
    out.push_back('"');
    for (char c : s) {
        if (c == '"')
            out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

} // namespace

Table parse_table(std::string_view text, char delimiter)
{
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF")
        text.remove_prefix(3);

    Table table;
    std::size_t pos = 0;
    std::size_t line = 1;
    std::vector<std::string> fields;

    // header: first non-blank line
    while (true) {
        if (!next_record(text, pos, line, delimiter, fields))
            throw SchemaError("input has no header row");
        if (!fields.empty())
            break;
    }
    table.columns = fields;

    while (true) {
        const std::size_t start_line = line;
        if (!next_record(text, pos, line, delimiter, fields))
            break;
        if (fields.empty())
            continue;
        if (fields.size() != table.columns.size())
            throw DataError("line " + std::to_string(start_line) + ": expected " +
                            std::to_string(table.columns.size()) + " fields, found " +
                            std::to_string(fields.size()));
        table.rows.push_back(fields);
        table.lines.push_back(start_line);
    }
    return table;
}

Table read_table(const std::filesystem::path& path, char delimiter)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open input file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_table(buf.str(), delimiter);
}

std::string format_table(const Table& table, char delimiter)
{
    std::string out;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out.push_back(delimiter);
            append_field(out, row[i], delimiter);
        }
        out.push_back('\n');
    };
    emit(table.columns);
    for (const auto& row : table.rows)
        emit(row);
    return out;
}

void write_table(const Table& table, const std::filesystem::path& path, char delimiter)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DataError("cannot open output file '" + path.string() + "'");
    const std::string text = format_table(table, delimiter);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw DataError("write failed for '" + path.string() + "'");
}

std::string format_number(double value)
{
    if (value == 0.0)
        return "0";
    if (std::isnan(value))
        return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

std::optional<double> parse_number(std::string_view text)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t'))
        text.remove_suffix(1);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    if (text.empty())
        return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        return std::nullopt;
    return value;
}

} // namespace flowgraph
