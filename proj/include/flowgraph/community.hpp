#pragma once

#include "flowgraph/flow_ingest.hpp"
#include "flowgraph/graph.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flowgraph {

/// Out-of-range marker for undefined metric values in numeric columns.
inline constexpr double kSentinel = -2.0;

enum class CommunityStrategy { louvain, label_propagation };

/// "louvain", "labelprop" or "label_propagation"; throws ConfigError.
CommunityStrategy parse_strategy(std::string_view name);
std::string_view to_string(CommunityStrategy strategy);

struct Community {
    std::vector<NodeId> members;          ///< ascending
    std::vector<std::string> member_keys; ///< ascending (same order as members)
    NodeId center = 0;                    ///< max weighted degree, ties to lowest key
};

struct CommunityPartition {
    std::size_t window_index = 0;
    std::vector<std::uint32_t> assignment; ///< node id -> community id
    std::vector<Community> communities;    ///< ids ordered by lowest member
    CommunityStrategy strategy = CommunityStrategy::louvain;
    std::uint64_t seed = 0;

    std::size_t size() const { return communities.size(); }
};

struct PartitionOptions {
    double resolution = 1.0;
    std::size_t max_label_iterations = 100;
};

/// Deterministic for a given (graph, strategy, seed, options).
CommunityPartition partition(const TrafficGraph& g, CommunityStrategy strategy, std::uint64_t seed,
                             const PartitionOptions& options = {});

/// Builds a partition (with centers and keys) from a raw assignment.
CommunityPartition make_partition(const TrafficGraph& g, std::span<const std::uint32_t> assignment);

/// Newman modularity with resolution; 0 for a graph without edge weight.
double modularity(const TrafficGraph& g, std::span<const std::uint32_t> assignment,
                  double resolution = 1.0);

struct CommunityMetrics {
    std::size_t size = 0;
    std::size_t internal_edges = 0;
    double internal_weight = 0.0;
    std::size_t boundary_edges = 0;
    double boundary_weight = 0.0;
    double density = 0.0;     ///< internal_edges / C(size, 2); 0 when size < 2
    double conductance = 0.0; ///< boundary / (2 internal + boundary); 0 when volume is 0
    double degree_min = 0.0;
    double degree_mean = 0.0;
    double degree_max = 0.0;
};

struct CommunityFirstOrder {
    std::vector<CommunityMetrics> communities;
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    double modularity = 0.0;
};

CommunityFirstOrder gc_metrics_first_order(const TrafficGraph& g, const CommunityPartition& p,
                                           double resolution = 1.0);

struct Summary {
    double mean = 0.0;
    double std = 0.0; ///< population standard deviation
    double min = 0.0;
    double max = 0.0;
};

struct CommunitySecondOrder {
    std::size_t community_count = 0;
    Summary density;
    Summary conductance;
    Summary size;
    double largest_fraction = 0.0;
    double modularity = 0.0;
};

CommunitySecondOrder gc_metrics_second_order(const CommunityFirstOrder& first);

/// (|A ∩ B| - |A Δ B|) / |A ∪ B| over ascending, duplicate-free key lists.
/// Returns kSentinel when both are empty.
double stability(std::span<const std::string> a, std::span<const std::string> b);

struct CommunityMatch {
    struct Pair {
        std::uint32_t previous = 0;
        std::uint32_t next = 0;
        std::size_t overlap = 0;
        double stability = 0.0;
    };
    std::vector<Pair> pairs;          ///< sorted by `previous`
    std::vector<std::uint32_t> died;  ///< unmatched at t
    std::vector<std::uint32_t> born;  ///< unmatched at t+1
};

/// Greedy maximum-overlap matching on member keys. Ties prefer the pair
/// whose t+1 community contains the t community's center, then the lowest
/// (previous, next) id pair. Zero-overlap pairs are never matched.
CommunityMatch propagate_communities(const CommunityPartition& previous,
                                     const CommunityPartition& next);

struct EnrichOptions {
    double interval = 300.0;
    bool continuity = true;
    CommunityStrategy strategy = CommunityStrategy::louvain;
    std::uint64_t seed = 42;
    std::string suffix = "gc";
    WeightFeature weight = WeightFeature::unit;
    PartitionOptions partition;
};

/// Names of the appended columns, in output order, for `suffix`.
std::vector<std::string> community_columns(std::string_view suffix);

/// Appends per-row community metrics (keyed on each row's source node) to
/// the log's table. Windows are processed in parallel, matching across
/// windows is a sequential fold. Rows without a parsed record, or whose
/// source node has no edges, carry kSentinel.
Table insert_graph_community_metrics(const FlowLog& log, const EnrichOptions& options);

/// Single-threaded reference of insert_graph_community_metrics.
Table insert_graph_community_metrics_serial(const FlowLog& log, const EnrichOptions& options);

} // namespace flowgraph
