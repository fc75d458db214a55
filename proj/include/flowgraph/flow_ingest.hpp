#pragma once

#include "flowgraph/table.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace flowgraph {

enum class TimeFormat { epoch_seconds, epoch_millis, datetime };

/// How the time column is encoded. `pattern` is a strptime/strftime pattern
/// used only for TimeFormat::datetime; datetimes are interpreted as UTC and
/// may carry a fractional-seconds suffix (".123").
struct TimeSpec {
    TimeFormat format = TimeFormat::epoch_seconds;
    std::string pattern;
};

/// Accepts "epoch_seconds", "epoch_millis" or anything containing '%' (a
/// datetime pattern). Throws ConfigError otherwise.
TimeSpec parse_time_spec(std::string_view text);

std::optional<double> parse_timestamp(std::string_view text, const TimeSpec& spec);
std::string format_timestamp(double seconds, const TimeSpec& spec);

struct SchemaMapping {
    std::string time_column = "stime";
    TimeSpec time;
    std::vector<std::string> src_columns{"saddr"};
    std::vector<std::string> dst_columns{"daddr"};
    std::optional<std::string> pkts_column;
    std::optional<std::string> bytes_column;
    std::optional<std::string> rate_column;
    std::string label_column = "category";

    /// Every named column must be in the header; throws SchemaError.
    void validate(const Table& header) const;
};

struct FlowRecord {
    double timestamp = 0.0;
    std::vector<std::string> src_keys;
    std::vector<std::string> dst_keys;
    double pkts = 0.0;
    double bytes = 0.0;
    double rate = 0.0;
    std::string label;
    std::map<std::string, std::string> extras;
    /// Row index in the table this record was parsed from.
    std::size_t row = 0;

    /// Endpoint keys joined with '|'.
    std::string src_node() const;
    std::string dst_node() const;
};

struct RowError {
    std::size_t line = 0;
    std::string column;
    std::string message;
};

struct ParseOptions {
    char delimiter = ',';
    /// Skip bad rows (reported in FlowLog::skipped) instead of failing.
    bool lenient = false;
};

/// A parsed log: the raw table plus one record per accepted row.
struct FlowLog {
    Table table;
    std::vector<FlowRecord> records;
    std::vector<RowError> skipped;
};

FlowLog parse_log(const std::filesystem::path& path, const SchemaMapping& schema,
                  const ParseOptions& options = {});
FlowLog parse_log(Table table, const SchemaMapping& schema, const ParseOptions& options = {});

/// True when records are in non-decreasing timestamp order.
bool is_time_sorted(const std::vector<FlowRecord>& records);

enum class Aggregation { sum, mean, min, max, first };

Aggregation parse_aggregation(std::string_view name);
std::string_view to_string(Aggregation agg);

struct AggregationSpec {
    std::vector<std::string> sort_by;
    std::vector<std::string> group_by;
    /// Output order of the aggregated columns follows this order.
    std::vector<std::pair<std::string, Aggregation>> aggregations;
};

/// Buckets rows by floor(time / resolution), sorts each bucket by
/// `spec.sort_by`, groups by `spec.group_by` and reduces the remaining
/// columns. The time column must be one of the group_by columns; its output
/// value is the bucket start. Output columns: group_by, then aggregations.
Table extract_time_series(const Table& table, const std::string& time_column,
                          const TimeSpec& time, double resolution, const AggregationSpec& spec);

} // namespace flowgraph
