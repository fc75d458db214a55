#pragma once

#include "flowgraph/flow_ingest.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace flowgraph {

/// Half-open interval [start, end) and the slice of records inside it.
struct TimeWindow {
    std::size_t index = 0;
    double start = 0.0;
    double end = 0.0;
    std::span<const FlowRecord> records;

    double length() const { return end - start; }
};

/// A window and its first half, [start, start + length/2).
struct SubWindowPair {
    TimeWindow first_half;
    TimeWindow full;
};

/// Windows are aligned to multiples of `interval`. With `continuity` every
/// slot between the first and last record is emitted, empty or not;
/// otherwise only occupied slots are emitted. Indices are consecutive over
/// the emitted windows. Throws DataError on unsorted input, ConfigError on a
/// non-positive interval.
std::vector<TimeWindow> partition_windows(std::span<const FlowRecord> records, double interval,
                                          bool continuity);

SubWindowPair split_midpoint(const TimeWindow& window);

} // namespace flowgraph
