#pragma once

#include "flowgraph/windowing.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flowgraph {

using NodeId = std::uint32_t;

/// Which flow measure becomes the edge weight. `unit` counts flows.
enum class WeightFeature { packets, bytes, rate, unit };

WeightFeature parse_weight_feature(std::string_view name);
std::string_view to_string(WeightFeature weight);

/// Labels treated as benign traffic ("normal", "benign", "background", "0"
/// and the empty string, case-insensitive).
bool is_benign_label(std::string_view label);

struct Edge {
    NodeId u = 0; ///< always u < v
    NodeId v = 0;
    double weight = 0.0;
    std::uint32_t multiplicity = 0;
    /// At least one contributing flow carried a non-benign label.
    bool attack = false;
};

struct Neighbor {
    NodeId node = 0;
    double weight = 0.0;
};

/// Weighted undirected graph over interned endpoint keys. Node ids follow
/// the lexicographic order of keys and edges are sorted by (u, v), so two
/// graphs built from the same multiset of flows are identical.
class TrafficGraph {
public:
    std::size_t node_count() const { return keys_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    bool empty() const { return keys_.empty(); }

    const std::string& key(NodeId v) const { return keys_.at(v); }
    const std::vector<std::string>& keys() const { return keys_; }
    std::optional<NodeId> find(std::string_view key) const;

    std::span<const Edge> edges() const { return edges_; }
    std::span<const Neighbor> neighbors(NodeId v) const;

    /// Sum of incident edge weights. Throws std::out_of_range for unknown ids.
    double weighted_degree(NodeId v) const;
    double total_weight() const { return total_weight_; }

    /// Flows dropped because both endpoints had the same key.
    std::size_t discarded_self_loops() const { return discarded_; }

private:
    friend class GraphBuilder;

    std::vector<std::string> keys_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;
    std::vector<Neighbor> adjacency_;
    std::vector<double> degree_;
    double total_weight_ = 0.0;
    std::size_t discarded_ = 0;
};

/// Accumulates endpoint pairs; parallel and reversed pairs merge on build.
class GraphBuilder {
public:
    void add_node(std::string key);
    void add_edge(std::string a, std::string b, double weight, bool attack = false);
    TrafficGraph build() &&;

private:
    struct Contribution {
        std::string a, b;
        double weight;
        bool attack;
    };
    std::vector<std::string> nodes_;
    std::vector<Contribution> contributions_;
    std::size_t discarded_ = 0;
};

double flow_weight(const FlowRecord& record, WeightFeature weight);

TrafficGraph build_graph(std::span<const FlowRecord> records, WeightFeature weight);
inline TrafficGraph build_graph(const TimeWindow& window, WeightFeature weight)
{
    return build_graph(window.records, weight);
}

/// Number of connected components by union-find. Isolated nodes count as
/// components and zero-weight edges do not connect.
std::size_t connected_components(const TrafficGraph& g);

} // namespace flowgraph
