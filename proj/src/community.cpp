#include "flowgraph/community.hpp"

#include "flowgraph/errors.hpp"
#include "flowgraph/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <unordered_map>

#include <omp.h>

namespace flowgraph {

CommunityFirstOrder gc_metrics_first_order(const TrafficGraph& g, const CommunityPartition& p,
                                           double resolution)
{
    CommunityFirstOrder out;
    out.node_count = g.node_count();
    out.edge_count = g.edge_count();
    out.communities.resize(p.size());

    for (const auto& e : g.edges()) {
        const auto cu = p.assignment[e.u];
        const auto cv = p.assignment[e.v];
        if (cu == cv) {
            ++out.communities[cu].internal_edges;
            out.communities[cu].internal_weight += e.weight;
        } else {
            for (const auto c : {cu, cv}) {
                ++out.communities[c].boundary_edges;
                out.communities[c].boundary_weight += e.weight;
            }
        }
    }

    for (std::size_t c = 0; c < p.size(); ++c) {
        auto& m = out.communities[c];
        const auto& members = p.communities[c].members;
        m.size = members.size();
        if (m.size >= 2) {
            const double pairs = static_cast<double>(m.size) * static_cast<double>(m.size - 1) / 2.0;
            m.density = static_cast<double>(m.internal_edges) / pairs;
        }
        const double volume = 2.0 * m.internal_weight + m.boundary_weight;
        m.conductance = volume > 0.0 ? m.boundary_weight / volume : 0.0;

        double sum = 0.0;
        m.degree_min = std::numeric_limits<double>::infinity();
        m.degree_max = 0.0;
        for (const auto v : members) {
            const double d = g.weighted_degree(v);
            sum += d;
            m.degree_min = std::min(m.degree_min, d);
            m.degree_max = std::max(m.degree_max, d);
        }
        m.degree_mean = members.empty() ? 0.0 : sum / static_cast<double>(members.size());
        if (members.empty())
            m.degree_min = 0.0;
    }
    out.modularity = modularity(g, p.assignment, resolution);
    return out;
}

namespace {

template <typename Get>
Summary summarize(const std::vector<CommunityMetrics>& rows, Get get)
{
    Summary s;
    if (rows.empty())
        return s;
    s.min = s.max = get(rows.front());
    double sum = 0.0;
    for (const auto& r : rows) {
        const double v = get(r);
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    const double n = static_cast<double>(rows.size());
    s.mean = sum / n;
    double sq = 0.0;
    for (const auto& r : rows) {
        const double d = get(r) - s.mean;
        sq += d * d;
    }
    s.std = std::sqrt(sq / n);
    return s;
}

} // namespace

CommunitySecondOrder gc_metrics_second_order(const CommunityFirstOrder& first)
{
    CommunitySecondOrder out;
    out.community_count = first.communities.size();
    out.modularity = first.modularity;
    if (first.communities.empty())
        return out;
    out.density = summarize(first.communities, [](const CommunityMetrics& m) { return m.density; });
    out.conductance =
        summarize(first.communities, [](const CommunityMetrics& m) { return m.conductance; });
    out.size = summarize(first.communities,
                         [](const CommunityMetrics& m) { return static_cast<double>(m.size); });
    if (first.node_count > 0)
        out.largest_fraction = out.size.max / static_cast<double>(first.node_count);
    return out;
}

namespace {

std::size_t overlap(std::span<const std::string> a, std::span<const std::string> b)
{
    std::size_t count = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j)
            ++i;
        else if (*j < *i)
            ++j;
        else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

} // namespace

double stability(std::span<const std::string> a, std::span<const std::string> b)
{
    const std::size_t common = overlap(a, b);
    const std::size_t unite = a.size() + b.size() - common;
    if (unite == 0)
        return kSentinel;
    const std::size_t differ = unite - common;
    return (static_cast<double>(common) - static_cast<double>(differ)) / static_cast<double>(unite);
}

CommunityMatch propagate_communities(const CommunityPartition& previous,
                                     const CommunityPartition& next)
{
    struct Candidate {
        std::size_t overlap;
        bool has_center;
        std::uint32_t prev, next;
    };

    // Index t+1 communities by member key so only overlapping pairs are scored.
    std::unordered_map<std::string_view, std::uint32_t> owner;
    for (std::uint32_t c = 0; c < next.size(); ++c)
        for (const auto& k : next.communities[c].member_keys)
            owner.emplace(k, c);

    std::vector<Candidate> candidates;
    for (std::uint32_t a = 0; a < previous.size(); ++a) {
        const auto& ca = previous.communities[a];
        std::vector<std::uint32_t> hits;
        for (const auto& k : ca.member_keys)
            if (auto it = owner.find(k); it != owner.end())
                hits.push_back(it->second);
        std::sort(hits.begin(), hits.end());
        const auto center_pos =
            std::lower_bound(ca.members.begin(), ca.members.end(), ca.center) - ca.members.begin();
        const auto& center_key = ca.member_keys[static_cast<std::size_t>(center_pos)];
        const auto center_owner = owner.find(center_key);
        for (std::size_t i = 0; i < hits.size();) {
            std::size_t j = i;
            while (j < hits.size() && hits[j] == hits[i])
                ++j;
            const bool has_center = center_owner != owner.end() && center_owner->second == hits[i];
            candidates.push_back({j - i, has_center, a, hits[i]});
            i = j;
        }
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
        if (x.overlap != y.overlap)
            return x.overlap > y.overlap;
        if (x.has_center != y.has_center)
            return x.has_center;
        return std::tie(x.prev, x.next) < std::tie(y.prev, y.next);
    });

    CommunityMatch match;
    std::vector<bool> used_prev(previous.size(), false), used_next(next.size(), false);
    for (const auto& c : candidates) {
        if (used_prev[c.prev] || used_next[c.next])
            continue;
        used_prev[c.prev] = used_next[c.next] = true;
        match.pairs.push_back({c.prev, c.next, c.overlap,
                               stability(previous.communities[c.prev].member_keys,
                                         next.communities[c.next].member_keys)});
    }
    std::sort(match.pairs.begin(), match.pairs.end(),
              [](const auto& x, const auto& y) { return x.previous < y.previous; });
    for (std::uint32_t a = 0; a < previous.size(); ++a)
        if (!used_prev[a])
            match.died.push_back(a);
    for (std::uint32_t b = 0; b < next.size(); ++b)
        if (!used_next[b])
            match.born.push_back(b);
    return match;
}

std::vector<std::string> community_columns(std::string_view suffix)
{
    static const char* const base[] = {
        "window",          "community",        "community_size",         "density",
        "conductance",     "degree",           "community_degree_min",   "community_degree_mean",
        "community_degree_max", "stability",   "community_count",        "modularity",
        "density_mean",    "density_std",      "density_min",            "density_max",
        "conductance_mean", "conductance_std", "conductance_min",        "conductance_max",
        "size_mean",       "size_std",         "size_min",               "size_max",
        "largest_fraction",
    };
    std::vector<std::string> out;
    for (const char* b : base)
        out.push_back(std::string(b) + "_" + std::string(suffix));
    return out;
}

namespace {

struct WindowResult {
    TrafficGraph graph;
    CommunityPartition partition;
    CommunityFirstOrder first;
    CommunitySecondOrder second;
    std::vector<double> stability; // per community at this window
};

WindowResult compute_window(const TimeWindow& w, const EnrichOptions& o)
{
    WindowResult r;
    r.graph = build_graph(w, o.weight);
    r.partition = partition(r.graph, o.strategy, o.seed, o.partition);
    r.partition.window_index = w.index;
    r.first = gc_metrics_first_order(r.graph, r.partition, o.partition.resolution);
    r.second = gc_metrics_second_order(r.first);
    r.stability.assign(r.partition.size(), kSentinel);
    return r;
}

void check_options(const FlowLog& log, const EnrichOptions& o)
{
    if (o.suffix.empty())
        throw ConfigError("community column suffix must not be empty");
    for (const auto& c : community_columns(o.suffix))
        if (log.table.find(c))
            throw ConfigError("output column '" + c + "' already exists in input");
}

Table assemble(const FlowLog& log, const EnrichOptions& o, const std::vector<TimeWindow>& windows,
               std::vector<WindowResult>& results)
{
    for (std::size_t i = 1; i < results.size(); ++i) {
        const auto m = propagate_communities(results[i - 1].partition, results[i].partition);
        for (const auto& pair : m.pairs)
            results[i].stability[pair.next] = pair.stability;
    }

    const auto extra = community_columns(o.suffix);
    Table out;
    out.columns = log.table.columns;
    out.columns.insert(out.columns.end(), extra.begin(), extra.end());
    out.lines = log.table.lines;
    out.rows.reserve(log.table.rows.size());
    for (const auto& row : log.table.rows) {
        auto r = row;
        r.resize(out.columns.size(), format_number(kSentinel));
        out.rows.push_back(std::move(r));
    }

    const std::size_t base = log.table.columns.size();
    for (std::size_t w = 0; w < windows.size(); ++w) {
        const auto& res = results[w];
        const auto& so = res.second;
        const double graph_values[] = {
            static_cast<double>(so.community_count), so.modularity,
            so.density.mean,     so.density.std,     so.density.min,     so.density.max,
            so.conductance.mean, so.conductance.std, so.conductance.min, so.conductance.max,
            so.size.mean,        so.size.std,        so.size.min,        so.size.max,
            so.largest_fraction,
        };
        for (const auto& rec : windows[w].records) {
            auto& row = out.rows[rec.row];
            row[base] = std::to_string(windows[w].index);
            for (std::size_t k = 0; k < std::size(graph_values); ++k)
                row[base + 10 + k] = format_number(graph_values[k]);

            const auto node = res.graph.find(rec.src_node());
            if (!node)
                continue;
            const auto c = res.partition.assignment[*node];
            const auto& m = res.first.communities[c];
            const double node_values[] = {
                static_cast<double>(c), static_cast<double>(m.size), m.density, m.conductance,
                res.graph.weighted_degree(*node), m.degree_min, m.degree_mean, m.degree_max,
                res.stability[c],
            };
            for (std::size_t k = 0; k < std::size(node_values); ++k)
                row[base + 1 + k] = format_number(node_values[k]);
        }
    }
    return out;
}

} // namespace

Table insert_graph_community_metrics(const FlowLog& log, const EnrichOptions& options)
{
    check_options(log, options);
    const auto windows = partition_windows(log.records, options.interval, options.continuity);
    std::vector<WindowResult> results(windows.size());
    const auto count = static_cast<std::int64_t>(windows.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i)
        results[static_cast<std::size_t>(i)] =
            compute_window(windows[static_cast<std::size_t>(i)], options);
    return assemble(log, options, windows, results);
}

Table insert_graph_community_metrics_serial(const FlowLog& log, const EnrichOptions& options)
{
    check_options(log, options);
    const auto windows = partition_windows(log.records, options.interval, options.continuity);
    std::vector<WindowResult> results;
    results.reserve(windows.size());
    for (const auto& w : windows)
        results.push_back(compute_window(w, options));
    return assemble(log, options, windows, results);
}

} // namespace flowgraph
