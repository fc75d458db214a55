#include "flowgraph/windowing.hpp"

#include "flowgraph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace flowgraph {

std::vector<TimeWindow> partition_windows(std::span<const FlowRecord> records, double interval,
                                          bool continuity)
{
    if (!(interval > 0.0) || !std::isfinite(interval))
        throw ConfigError("window interval must be positive");

    std::vector<TimeWindow> windows;
    if (records.empty())
        return windows;

    for (std::size_t i = 1; i < records.size(); ++i)
        if (records[i].timestamp < records[i - 1].timestamp)
            throw DataError("records are not sorted by timestamp (record " + std::to_string(i) +
                            " at t=" + format_number(records[i].timestamp) + ")");

    auto slot_of = [interval](double ts) {
        return static_cast<std::int64_t>(std::floor(ts / interval));
    };
    auto make = [&](std::int64_t slot, std::size_t begin, std::size_t end) {
        TimeWindow w;
        w.index = windows.size();
        w.start = static_cast<double>(slot) * interval;
        w.end = static_cast<double>(slot + 1) * interval;
        w.records = records.subspan(begin, end - begin);
        windows.push_back(w);
    };

    std::size_t begin = 0;
    std::int64_t slot = slot_of(records.front().timestamp);
    while (begin < records.size()) {
        const std::int64_t current = slot_of(records[begin].timestamp);
        if (continuity)
            for (; slot < current; ++slot)
                make(slot, begin, begin);
        std::size_t end = begin;
        while (end < records.size() && slot_of(records[end].timestamp) == current)
            ++end;
        make(current, begin, end);
        slot = current + 1;
        begin = end;
    }
    return windows;
}

SubWindowPair split_midpoint(const TimeWindow& window)
{
    const double mid = window.start + window.length() / 2.0;
    const auto it = std::partition_point(window.records.begin(), window.records.end(),
                                         [mid](const FlowRecord& r) { return r.timestamp < mid; });
    SubWindowPair pair;
    pair.full = window;
    pair.first_half = window;
    pair.first_half.end = mid;
    pair.first_half.records =
        window.records.first(static_cast<std::size_t>(it - window.records.begin()));
    return pair;
}

} // namespace flowgraph
