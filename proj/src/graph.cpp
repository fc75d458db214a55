#include "flowgraph/graph.hpp"

#include "flowgraph/errors.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace flowgraph {

WeightFeature parse_weight_feature(std::string_view name)
{
    if (name == "packets" || name == "pkts")
        return WeightFeature::packets;
    if (name == "bytes")
        return WeightFeature::bytes;
    if (name == "rate")
        return WeightFeature::rate;
    if (name == "unit")
        return WeightFeature::unit;
    throw ConfigError("unknown weight feature '" + std::string(name) + "'");
}

std::string_view to_string(WeightFeature weight)
{
    switch (weight) {
    case WeightFeature::packets: return "pkts";
    case WeightFeature::bytes: return "bytes";
    case WeightFeature::rate: return "rate";
    case WeightFeature::unit: return "unit";
    }
    return "?";
}

bool is_benign_label(std::string_view label)
{
    std::string lower(label);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lower.empty() || lower == "normal" || lower == "benign" || lower == "background" ||
           lower == "0";
}

std::optional<NodeId> TrafficGraph::find(std::string_view key) const
{
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it == keys_.end() || *it != key)
        return std::nullopt;
    return static_cast<NodeId>(it - keys_.begin());
}

std::span<const Neighbor> TrafficGraph::neighbors(NodeId v) const
{
    if (v >= keys_.size())
        throw std::out_of_range("unknown node id " + std::to_string(v));
    return std::span<const Neighbor>(adjacency_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
}

double TrafficGraph::weighted_degree(NodeId v) const
{
    if (v >= degree_.size())
        throw std::out_of_range("unknown node id " + std::to_string(v));
    return degree_[v];
}

void GraphBuilder::add_node(std::string key) { nodes_.push_back(std::move(key)); }

void GraphBuilder::add_edge(std::string a, std::string b, double weight, bool attack)
{
    if (a == b) {
        ++discarded_;
        return;
    }
    if (b < a)
        std::swap(a, b);
    contributions_.push_back({std::move(a), std::move(b), weight, attack});
}

TrafficGraph GraphBuilder::build() &&
{
    TrafficGraph g;
    g.discarded_ = discarded_;

    g.keys_ = std::move(nodes_);
    g.keys_.reserve(g.keys_.size() + 2 * contributions_.size());
    for (const auto& c : contributions_) {
        g.keys_.push_back(c.a);
        g.keys_.push_back(c.b);
    }
    std::sort(g.keys_.begin(), g.keys_.end());
    g.keys_.erase(std::unique(g.keys_.begin(), g.keys_.end()), g.keys_.end());

    struct Item {
        NodeId u, v;
        double w;
        bool attack;
    };
    std::vector<Item> items;
    items.reserve(contributions_.size());
    for (const auto& c : contributions_)
        items.push_back({*g.find(c.a), *g.find(c.b), c.weight, c.attack});
    // Summing in a canonical order keeps weights bit-identical under any
    // permutation of the input flows.
    std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
        return std::tie(x.u, x.v, x.w, x.attack) < std::tie(y.u, y.v, y.w, y.attack);
    });

    for (const auto& it : items) {
        if (g.edges_.empty() || g.edges_.back().u != it.u || g.edges_.back().v != it.v)
            g.edges_.push_back({it.u, it.v, 0.0, 0, false});
        auto& e = g.edges_.back();
        e.weight += it.w;
        ++e.multiplicity;
        e.attack = e.attack || it.attack;
    }

    const std::size_t n = g.keys_.size();
    g.degree_.assign(n, 0.0);
    std::vector<std::size_t> count(n, 0);
    for (const auto& e : g.edges_) {
        ++count[e.u];
        ++count[e.v];
        g.total_weight_ += e.weight;
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v)
        g.offsets_[v + 1] = g.offsets_[v] + count[v];
    g.adjacency_.resize(g.offsets_[n]);
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& e : g.edges_) {
        g.adjacency_[fill[e.u]++] = {e.v, e.weight};
        g.adjacency_[fill[e.v]++] = {e.u, e.weight};
    }
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t k = g.offsets_[v]; k < g.offsets_[v + 1]; ++k)
            g.degree_[v] += g.adjacency_[k].weight;
    return g;
}

double flow_weight(const FlowRecord& record, WeightFeature weight)
{
    switch (weight) {
    case WeightFeature::packets: return record.pkts;
    case WeightFeature::bytes: return record.bytes;
    case WeightFeature::rate: return record.rate;
    case WeightFeature::unit: return 1.0;
    }
    return 0.0;
}

TrafficGraph build_graph(std::span<const FlowRecord> records, WeightFeature weight)
{
    GraphBuilder builder;
    for (const auto& r : records)
        builder.add_edge(r.src_node(), r.dst_node(), flow_weight(r, weight),
                         !is_benign_label(r.label));
    return std::move(builder).build();
}

std::size_t connected_components(const TrafficGraph& g)
{
    std::vector<NodeId> parent(g.node_count());
    std::iota(parent.begin(), parent.end(), NodeId{0});
    auto root = [&](NodeId v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    std::size_t components = g.node_count();
    for (const auto& e : g.edges()) {
        if (!(e.weight > 0.0))
            continue;
        const NodeId a = root(e.u), b = root(e.v);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
            --components;
        }
    }
    return components;
}

} // namespace flowgraph
