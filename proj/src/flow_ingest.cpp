#include "flowgraph/flow_ingest.hpp"

#include "flowgraph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <numeric>
#include <unordered_map>

namespace flowgraph {

TimeSpec parse_time_spec(std::string_view text)
{
    if (text == "epoch_seconds" || text == "s")
        return {TimeFormat::epoch_seconds, {}};
    if (text == "epoch_millis" || text == "ms")
        return {TimeFormat::epoch_millis, {}};
    if (text.find('%') != std::string_view::npos)
        return {TimeFormat::datetime, std::string(text)};
    throw ConfigError("unknown time format '" + std::string(text) +
                      "' (expected epoch_seconds, epoch_millis or a strptime pattern)");
}

std::optional<double> parse_timestamp(std::string_view text, const TimeSpec& spec)
{
    std::optional<double> value;
    switch (spec.format) {
    case TimeFormat::epoch_seconds:
        value = parse_number(text);
        break;
    case TimeFormat::epoch_millis:
        if (auto ms = parse_number(text))
            value = *ms / 1000.0;
        break;
    case TimeFormat::datetime: {
        const std::string buf(text);
        std::tm tm{};
        const char* rest = ::strptime(buf.c_str(), spec.pattern.c_str(), &tm);
        if (rest == nullptr)
            return std::nullopt;
        double fraction = 0.0;
        if (*rest == '.') {
            auto frac = parse_number(std::string("0") + rest);
            if (!frac)
                return std::nullopt;
            fraction = *frac;
        } else if (*rest != '\0') {
            return std::nullopt;
        }
        value = static_cast<double>(::timegm(&tm)) + fraction;
        break;
    }
    }
    if (!value || !std::isfinite(*value) || *value < 0.0)
        return std::nullopt;
    return value;
}

std::string format_timestamp(double seconds, const TimeSpec& spec)
{
    switch (spec.format) {
    case TimeFormat::epoch_seconds:
        return format_number(seconds);
    case TimeFormat::epoch_millis:
        return format_number(std::round(seconds * 1000.0 * 1e6) / 1e6);
    case TimeFormat::datetime: {
        const double whole = std::floor(seconds);
        const auto t = static_cast<std::time_t>(whole);
        std::tm tm{};
        ::gmtime_r(&t, &tm);
        char buf[128];
        const std::size_t n = std::strftime(buf, sizeof(buf), spec.pattern.c_str(), &tm);
        std::string out(buf, n);
        const double frac = seconds - whole;
        if (frac > 0.0) {
            std::string f = format_number(frac);
            out += f.substr(1); // drop leading "0"
        }
        return out;
    }
    }
    return {};
}

void SchemaMapping::validate(const Table& header) const
{
    std::vector<std::string> missing;
    auto check = [&](const std::string& name) {
        if (!header.find(name))
            missing.push_back(name);
    };
    check(time_column);
    if (src_columns.empty())
        throw SchemaError("schema needs at least one source column");
    if (dst_columns.empty())
        throw SchemaError("schema needs at least one destination column");
    for (const auto& c : src_columns)
        check(c);
    for (const auto& c : dst_columns)
        check(c);
    for (const auto* c : {&pkts_column, &bytes_column, &rate_column})
        if (*c)
            check(**c);
    check(label_column);
    if (!missing.empty()) {
        std::string msg = "schema columns missing from header:";
        for (const auto& m : missing)
            msg += " '" + m + "'";
        throw SchemaError(msg);
    }
}

namespace {

std::string join_keys(const std::vector<std::string>& keys)
{
    std::string out;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (i)
            out.push_back('|');
        out += keys[i];
    }
    return out;
}

} // namespace

std::string FlowRecord::src_node() const { return join_keys(src_keys); }
std::string FlowRecord::dst_node() const { return join_keys(dst_keys); }

FlowLog parse_log(const std::filesystem::path& path, const SchemaMapping& schema,
                  const ParseOptions& options)
{
    return parse_log(read_table(path, options.delimiter), schema, options);
}

FlowLog parse_log(Table table, const SchemaMapping& schema, const ParseOptions& options)
{
    schema.validate(table);

    FlowLog log;
    const std::size_t time_idx = table.require(schema.time_column);
    const std::size_t label_idx = table.require(schema.label_column);
    std::vector<std::size_t> src_idx, dst_idx;
    for (const auto& c : schema.src_columns)
        src_idx.push_back(table.require(c));
    for (const auto& c : schema.dst_columns)
        dst_idx.push_back(table.require(c));
    auto opt_idx = [&](const std::optional<std::string>& c) -> std::optional<std::size_t> {
        if (!c)
            return std::nullopt;
        return table.require(*c);
    };
    const auto pkts_idx = opt_idx(schema.pkts_column);
    const auto bytes_idx = opt_idx(schema.bytes_column);
    const auto rate_idx = opt_idx(schema.rate_column);

    std::vector<bool> mapped(table.columns.size(), false);
    mapped[time_idx] = mapped[label_idx] = true;
    for (auto i : src_idx)
        mapped[i] = true;
    for (auto i : dst_idx)
        mapped[i] = true;
    for (auto i : {pkts_idx, bytes_idx, rate_idx})
        if (i)
            mapped[*i] = true;

    std::vector<RowError> errors;
    log.records.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.line_of(r);
        std::optional<RowError> err;

        FlowRecord rec;
        rec.row = r;
        if (auto ts = parse_timestamp(row[time_idx], schema.time))
            rec.timestamp = *ts;
        else
            err = RowError{line, schema.time_column, "unparseable timestamp '" + row[time_idx] + "'"};

        auto measure = [&](std::optional<std::size_t> idx, double& out) {
            if (!idx || err)
                return;
            auto v = parse_number(row[*idx]);
            if (!v || !std::isfinite(*v) || *v < 0.0)
                err = RowError{line, table.columns[*idx],
                               "expected non-negative number, got '" + row[*idx] + "'"};
            else
                out = *v;
        };
        measure(pkts_idx, rec.pkts);
        measure(bytes_idx, rec.bytes);
        measure(rate_idx, rec.rate);

        auto endpoint = [&](const std::vector<std::size_t>& idx, std::vector<std::string>& out) {
            bool any = false;
            for (auto i : idx) {
                out.push_back(row[i]);
                any = any || !row[i].empty();
            }
            if (!any && !err)
                err = RowError{line, table.columns[idx.front()], "empty endpoint"};
        };
        endpoint(src_idx, rec.src_keys);
        endpoint(dst_idx, rec.dst_keys);
        rec.label = row[label_idx];

        if (err) {
            errors.push_back(*err);
            continue;
        }
        for (std::size_t c = 0; c < row.size(); ++c)
            if (!mapped[c])
                rec.extras.emplace(table.columns[c], row[c]);
        log.records.push_back(std::move(rec));
    }

    if (!errors.empty() && !options.lenient) {
        std::string msg = std::to_string(errors.size()) + " malformed row(s):";
        const std::size_t shown = std::min<std::size_t>(errors.size(), 10);
        for (std::size_t i = 0; i < shown; ++i)
            msg += "\n  line " + std::to_string(errors[i].line) + " [" + errors[i].column +
                   "]: " + errors[i].message;
        if (shown < errors.size())
            msg += "\n  ...";
        throw DataError(msg);
    }
    log.skipped = std::move(errors);
    log.table = std::move(table);
    return log;
}

bool is_time_sorted(const std::vector<FlowRecord>& records)
{
    return std::is_sorted(records.begin(), records.end(),
                          [](const FlowRecord& a, const FlowRecord& b) {
                              return a.timestamp < b.timestamp;
                          });
}

Aggregation parse_aggregation(std::string_view name)
{
    if (name == "sum")
        return Aggregation::sum;
    if (name == "mean" || name == "avg")
        return Aggregation::mean;
    if (name == "min")
        return Aggregation::min;
    if (name == "max")
        return Aggregation::max;
    if (name == "first")
        return Aggregation::first;
    throw ConfigError("unknown aggregation '" + std::string(name) + "'");
}

std::string_view to_string(Aggregation agg)
{
    switch (agg) {
    case Aggregation::sum: return "sum";
    case Aggregation::mean: return "mean";
    case Aggregation::min: return "min";
    case Aggregation::max: return "max";
    case Aggregation::first: return "first";
    }
    return "?";
}

namespace {

// Numbers compare numerically and before non-numbers; others lexicographically.
bool cell_less(const std::string& a, const std::string& b)
{
    const auto na = parse_number(a);
    const auto nb = parse_number(b);
    if (na && nb)
        return *na < *nb;
    if (na != nb)
        return na.has_value();
    return a < b;
}

struct KeyHash {
    std::size_t operator()(const std::vector<std::string>& key) const noexcept
    {
        std::size_t h = 0;
        for (const auto& s : key)
            h = h * 1000003u ^ std::hash<std::string>{}(s);
        return h;
    }
};

} // namespace

Table extract_time_series(const Table& table, const std::string& time_column, const TimeSpec& time,
                          double resolution, const AggregationSpec& spec)
{
    if (!(resolution > 0.0) || !std::isfinite(resolution))
        throw ConfigError("time-series resolution must be positive");
    const std::size_t time_idx = table.require(time_column);

    for (const auto& [col, agg] : spec.aggregations) {
        (void)agg;
        if (std::find(spec.group_by.begin(), spec.group_by.end(), col) != spec.group_by.end())
            throw ConfigError("column '" + col + "' is both grouped and aggregated");
    }
    if (std::find(spec.group_by.begin(), spec.group_by.end(), time_column) == spec.group_by.end())
        throw ConfigError("group_by must include the time column '" + time_column + "'");

    std::vector<std::size_t> group_idx, sort_idx, agg_idx;
    for (const auto& c : spec.group_by)
        group_idx.push_back(table.require(c));
    for (const auto& c : spec.sort_by)
        sort_idx.push_back(table.require(c));
    for (const auto& [c, agg] : spec.aggregations) {
        (void)agg;
        agg_idx.push_back(table.require(c));
    }

    const std::size_t n = table.rows.size();
    std::vector<std::int64_t> bucket(n);
    for (std::size_t r = 0; r < n; ++r) {
        auto ts = parse_timestamp(table.rows[r][time_idx], time);
        if (!ts)
            throw DataError("line " + std::to_string(table.line_of(r)) + ": unparseable timestamp '" +
                            table.rows[r][time_idx] + "'");
        bucket[r] = static_cast<std::int64_t>(std::floor(*ts / resolution));
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (bucket[a] != bucket[b])
            return bucket[a] < bucket[b];
        for (auto c : sort_idx) {
            const auto& x = table.rows[a][c];
            const auto& y = table.rows[b][c];
            if (cell_less(x, y))
                return true;
            if (cell_less(y, x))
                return false;
        }
        return false;
    });

    // Groups in order of first appearance within the sorted sequence.
    std::vector<std::vector<std::size_t>> groups;
    std::unordered_map<std::vector<std::string>, std::size_t, KeyHash> index;
    std::vector<std::int64_t> group_bucket;
    for (auto r : order) {
        std::vector<std::string> key;
        key.reserve(group_idx.size() + 1);
        key.push_back(std::to_string(bucket[r]));
        for (auto c : group_idx)
            if (c != time_idx)
                key.push_back(table.rows[r][c]);
        auto [it, inserted] = index.try_emplace(std::move(key), groups.size());
        if (inserted) {
            groups.emplace_back();
            group_bucket.push_back(bucket[r]);
        }
        groups[it->second].push_back(r);
    }

    Table out;
    out.columns = spec.group_by;
    for (const auto& [c, agg] : spec.aggregations) {
        (void)agg;
        out.columns.push_back(c);
    }
    out.rows.reserve(groups.size());

    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& members = groups[g];
        const auto& head = table.rows[members.front()];
        std::vector<std::string> row;
        row.reserve(out.columns.size());
        for (auto c : group_idx) {
            if (c == time_idx)
                row.push_back(format_timestamp(static_cast<double>(group_bucket[g]) * resolution, time));
            else
                row.push_back(head[c]);
        }
        for (std::size_t a = 0; a < spec.aggregations.size(); ++a) {
            const auto agg = spec.aggregations[a].second;
            const auto c = agg_idx[a];
            if (agg == Aggregation::first) {
                row.push_back(head[c]);
                continue;
            }
            double acc = 0.0;
            double lo = 0.0, hi = 0.0;
            for (std::size_t k = 0; k < members.size(); ++k) {
                const auto& cell = table.rows[members[k]][c];
                auto v = parse_number(cell);
                if (!v)
                    throw ConfigError("aggregation '" + std::string(to_string(agg)) +
                                      "' on non-numeric column '" + spec.aggregations[a].first +
                                      "' (line " + std::to_string(table.line_of(members[k])) +
                                      ": '" + cell + "')");
                acc += *v;
                lo = k == 0 ? *v : std::min(lo, *v);
                hi = k == 0 ? *v : std::max(hi, *v);
            }
            double value = 0.0;
            switch (agg) {
            case Aggregation::sum: value = acc; break;
            case Aggregation::mean: value = acc / static_cast<double>(members.size()); break;
            case Aggregation::min: value = lo; break;
            case Aggregation::max: value = hi; break;
            case Aggregation::first: break;
            }
            row.push_back(format_number(value));
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

} // namespace flowgraph
