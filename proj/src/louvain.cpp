#include "flowgraph/community.hpp"

#include "flowgraph/errors.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace flowgraph {

CommunityStrategy parse_strategy(std::string_view name)
{
    if (name == "louvain")
        return CommunityStrategy::louvain;
    if (name == "labelprop" || name == "label_propagation")
        return CommunityStrategy::label_propagation;
    throw ConfigError("unknown community strategy '" + std::string(name) + "'");
}

std::string_view to_string(CommunityStrategy strategy)
{
    return strategy == CommunityStrategy::louvain ? "louvain" : "labelprop";
}

namespace {

// Weighted graph used between Louvain levels. Self-loop weight w at node i
// contributes 2w to its degree, matching an aggregated community's internal
// edge weight.
struct WorkGraph {
    std::size_t n = 0;
    std::vector<std::vector<Neighbor>> adj; // no self entries
    std::vector<double> self;               // self-loop weight
    std::vector<double> degree;
    double total = 0.0; // sum of degrees = 2m
};

WorkGraph from_traffic(const TrafficGraph& g)
{
    WorkGraph w;
    w.n = g.node_count();
    w.adj.resize(w.n);
    w.self.assign(w.n, 0.0);
    w.degree.assign(w.n, 0.0);
    for (NodeId v = 0; v < w.n; ++v) {
        const auto nb = g.neighbors(v);
        w.adj[v].assign(nb.begin(), nb.end());
        w.degree[v] = g.weighted_degree(v);
        w.total += w.degree[v];
    }
    return w;
}

// Fisher-Yates with raw engine output so the permutation is identical on
// every standard library.
std::vector<std::uint32_t> visit_order(std::size_t n, std::mt19937_64& rng)
{
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

// One level of local moving. Returns true if any node changed community.
bool local_moving(const WorkGraph& w, std::vector<std::uint32_t>& comm, double resolution,
                  std::mt19937_64& rng)
{
    constexpr double eps = 1e-12;
    std::vector<double> tot(w.n, 0.0);
    for (std::size_t i = 0; i < w.n; ++i)
        tot[comm[i]] += w.degree[i];

    std::vector<double> link(w.n, 0.0);
    std::vector<std::uint32_t> touched;
    bool moved_any = false;
    const auto order = visit_order(w.n, rng);

    for (std::size_t pass = 0; pass < 1000; ++pass) {
        bool moved = false;
        for (const auto i : order) {
            const std::uint32_t current = comm[i];
            const double ki = w.degree[i];

            touched.clear();
            for (const auto& nb : w.adj[i]) {
                const auto c = comm[nb.node];
                if (link[c] == 0.0)
                    touched.push_back(c);
                link[c] += nb.weight;
            }

            tot[current] -= ki;
            const double scale = resolution * ki / w.total;
            std::uint32_t best = current;
            double best_gain = link[current] - tot[current] * scale;
            for (const auto c : touched) {
                const double gain = link[c] - tot[c] * scale;
                if (gain > best_gain + eps ||
                    (gain >= best_gain - eps && c < best && best != current)) {
                    best = c;
                    best_gain = gain;
                }
            }
            tot[best] += ki;
            for (const auto c : touched)
                link[c] = 0.0;
            link[current] = 0.0;

            if (best != current) {
                comm[i] = best;
                moved = true;
                moved_any = true;
            }
        }
        if (!moved)
            break;
    }
    return moved_any;
}

// Renumbers community ids densely in order of their lowest member.
std::size_t renumber(std::vector<std::uint32_t>& comm)
{
    constexpr auto none = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> map(comm.size(), none);
    std::uint32_t next = 0;
    for (auto& c : comm) {
        if (map[c] == none)
            map[c] = next++;
        c = map[c];
    }
    return next;
}

WorkGraph aggregate(const WorkGraph& w, const std::vector<std::uint32_t>& comm, std::size_t k)
{
    WorkGraph out;
    out.n = k;
    out.adj.resize(k);
    out.self.assign(k, 0.0);
    out.degree.assign(k, 0.0);
    out.total = w.total;
    std::vector<std::map<std::uint32_t, double>> links(k);
    for (std::size_t i = 0; i < w.n; ++i) {
        const auto ci = comm[i];
        out.degree[ci] += w.degree[i];
        out.self[ci] += w.self[i];
        for (const auto& nb : w.adj[i]) {
            const auto cj = comm[nb.node];
            if (ci == cj) {
                if (i < nb.node)
                    out.self[ci] += nb.weight;
            } else {
                links[ci][cj] += nb.weight;
            }
        }
    }
    for (std::size_t c = 0; c < k; ++c)
        for (const auto& [d, weight] : links[c])
            out.adj[c].push_back({d, weight});
    return out;
}

std::vector<std::uint32_t> louvain(const TrafficGraph& g, std::uint64_t seed, double resolution)
{
    const std::size_t n = g.node_count();
    std::vector<std::uint32_t> assignment(n);
    std::iota(assignment.begin(), assignment.end(), 0u);
    if (n == 0 || !(g.total_weight() > 0.0))
        return assignment;

    std::mt19937_64 rng(seed);
    WorkGraph level = from_traffic(g);
    while (true) {
        std::vector<std::uint32_t> comm(level.n);
        std::iota(comm.begin(), comm.end(), 0u);
        if (!local_moving(level, comm, resolution, rng))
            break;
        const std::size_t k = renumber(comm);
        for (auto& a : assignment)
            a = comm[a];
        if (k == level.n)
            break;
        level = aggregate(level, comm, k);
    }
    renumber(assignment);
    return assignment;
}

std::uint64_t mix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::vector<std::uint32_t> label_propagation(const TrafficGraph& g, std::uint64_t seed,
                                             std::size_t max_iterations)
{
    const std::size_t n = g.node_count();
    std::vector<std::uint32_t> label(n), next(n);
    std::iota(label.begin(), label.end(), 0u);

    std::vector<double> score(n, 0.0);
    std::vector<std::uint32_t> touched, tied;
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        for (NodeId v = 0; v < n; ++v) {
            touched.clear();
            for (const auto& nb : g.neighbors(v)) {
                const auto l = label[nb.node];
                if (score[l] == 0.0)
                    touched.push_back(l);
                score[l] += nb.weight;
            }
            if (touched.empty()) {
                next[v] = label[v];
                continue;
            }
            double best = 0.0;
            for (const auto l : touched)
                best = std::max(best, score[l]);
            tied.clear();
            for (const auto l : touched)
                if (score[l] >= best * (1.0 - 1e-12))
                    tied.push_back(l);
            for (const auto l : touched)
                score[l] = 0.0;

            if (std::find(tied.begin(), tied.end(), label[v]) != tied.end()) {
                next[v] = label[v];
                continue;
            }
            std::sort(tied.begin(), tied.end());
            const auto pick = mix(seed ^ mix(iter * 0x100000001b3ull + v)) % tied.size();
            next[v] = tied[pick];
            changed = true;
        }
        label.swap(next);
        if (!changed)
            break;
    }
    renumber(label);
    return label;
}

} // namespace

CommunityPartition make_partition(const TrafficGraph& g, std::span<const std::uint32_t> assignment)
{
    CommunityPartition p;
    p.assignment.assign(assignment.begin(), assignment.end());
    std::vector<std::uint32_t> dense(p.assignment);
    const std::size_t k = renumber(dense);
    p.assignment = dense;
    p.communities.resize(k);
    for (NodeId v = 0; v < g.node_count(); ++v) {
        auto& c = p.communities[p.assignment[v]];
        c.members.push_back(v);
        c.member_keys.push_back(g.key(v));
    }
    for (auto& c : p.communities) {
        c.center = c.members.front();
        for (const auto v : c.members)
            if (g.weighted_degree(v) > g.weighted_degree(c.center))
                c.center = v;
    }
    return p;
}

CommunityPartition partition(const TrafficGraph& g, CommunityStrategy strategy, std::uint64_t seed,
                             const PartitionOptions& options)
{
    std::vector<std::uint32_t> assignment;
    switch (strategy) {
    case CommunityStrategy::louvain:
        assignment = louvain(g, seed, options.resolution);
        break;
    case CommunityStrategy::label_propagation:
        assignment = label_propagation(g, seed, options.max_label_iterations);
        break;
    }
    CommunityPartition p = make_partition(g, assignment);
    p.strategy = strategy;
    p.seed = seed;
    return p;
}

double modularity(const TrafficGraph& g, std::span<const std::uint32_t> assignment, double resolution)
{
    const double m = g.total_weight();
    if (!(m > 0.0))
        return 0.0;
    std::size_t k = 0;
    for (const auto c : assignment)
        k = std::max<std::size_t>(k, c + 1);
    std::vector<double> internal(k, 0.0), volume(k, 0.0);
    for (const auto& e : g.edges())
        if (assignment[e.u] == assignment[e.v])
            internal[assignment[e.u]] += e.weight;
    for (NodeId v = 0; v < g.node_count(); ++v)
        volume[assignment[v]] += g.weighted_degree(v);
    double q = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        const double frac = volume[c] / (2.0 * m);
        q += internal[c] / m - resolution * frac * frac;
    }
    return q;
}

} // namespace flowgraph
