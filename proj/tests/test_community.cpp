#include "flowgraph/community.hpp"
#include "flowgraph/errors.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <omp.h>

#include <random>
#include <set>

using namespace flowgraph;

namespace {

std::vector<std::string> keys(std::initializer_list<const char*> ks)
{
    std::vector<std::string> out(ks.begin(), ks.end());
    std::sort(out.begin(), out.end());
    return out;
}

CommunityPartition partition_of(const TrafficGraph& g, std::vector<std::vector<std::string>> groups)
{
    std::vector<std::uint32_t> a(g.node_count(), 0);
    for (std::uint32_t c = 0; c < groups.size(); ++c)
        for (const auto& k : groups[c])
            a[*g.find(k)] = c;
    return make_partition(g, a);
}

FlowLog log_from(const std::string& csv)
{
    return parse_log(parse_table(csv), SchemaMapping{});
}

} // namespace

TEST_SUITE("community") {

TEST_CASE("Louvain splits two bridged 4-cliques into the cliques")
{
    const auto g = oracle::two_cliques_with_bridge();
    const auto p = partition(g, CommunityStrategy::louvain, 42);
    REQUIRE(p.size() == 2);
    CHECK(p.communities[0].member_keys == keys({"a0", "a1", "a2", "a3"}));
    CHECK(p.communities[1].member_keys == keys({"b0", "b1", "b2", "b3"}));

    // oracle: best of all 4140 partitions of the 8 nodes
    const auto [best_q, best] = oracle::exhaustive_best_modularity(g);
    std::vector<int> found(p.assignment.begin(), p.assignment.end());
    CHECK(found == best);
    CHECK(modularity(g, p.assignment) == doctest::Approx(best_q).epsilon(1e-12));
    CHECK(best_q == doctest::Approx(12.0 / 13.0 - 0.5).epsilon(1e-12));
}

TEST_CASE("a triangle is one community; an empty graph has none")
{
    const auto tri = oracle::graph_from({}, {{"x", "y", 1.0}, {"y", "z", 1.0}, {"x", "z", 1.0}});
    CHECK(partition(tri, CommunityStrategy::louvain, 1).size() == 1);
    CHECK(partition(tri, CommunityStrategy::label_propagation, 1).size() == 1);
    const TrafficGraph empty;
    CHECK(partition(empty, CommunityStrategy::louvain, 1).size() == 0);
    CHECK(partition(empty, CommunityStrategy::label_propagation, 1).size() == 0);
    CHECK_THROWS_AS(parse_strategy("girvan"), ConfigError);
}

TEST_CASE("first-order metrics on fixtures")
{
    SUBCASE("isolated triangle")
    {
        const auto tri = oracle::graph_from({}, {{"x", "y", 1.0}, {"y", "z", 1.0}, {"x", "z", 1.0}});
        const auto fo = gc_metrics_first_order(tri, partition_of(tri, {{"x", "y", "z"}}));
        CHECK(fo.communities[0].density == 1.0);
        CHECK(fo.communities[0].conductance == 0.0);
    }
    SUBCASE("singleton with two outgoing edges")
    {
        const auto g = oracle::graph_from({}, {{"s", "y", 1.0}, {"s", "z", 1.0}});
        const auto fo = gc_metrics_first_order(g, partition_of(g, {{"s"}, {"y", "z"}}));
        const auto& single = fo.communities[partition_of(g, {{"s"}, {"y", "z"}}).assignment[*g.find("s")]];
        CHECK(single.size == 1);
        CHECK(single.conductance == 1.0);
        CHECK(single.density == 0.0);
    }
    SUBCASE("bridged cliques: internal 6, boundary 1, volume 13")
    {
        const auto g = oracle::two_cliques_with_bridge();
        const auto fo = gc_metrics_first_order(g, partition(g, CommunityStrategy::louvain, 42));
        REQUIRE(fo.communities.size() == 2);
        for (const auto& m : fo.communities) {
            CHECK(m.internal_edges == 6);
            CHECK(m.boundary_edges == 1);
            CHECK(m.density == 1.0);
            CHECK(m.conductance == doctest::Approx(1.0 / 13.0).epsilon(1e-15));
            CHECK(m.degree_min == 3.0);
            CHECK(m.degree_max == 4.0);
            CHECK(m.degree_mean == 3.25);
        }
    }
}

TEST_CASE("second-order aggregates")
{
    CommunityFirstOrder one;
    one.node_count = 3;
    one.communities.push_back({});
    one.communities[0].density = 1.0;
    one.communities[0].size = 3;
    auto so = gc_metrics_second_order(one);
    CHECK(so.density.mean == 1.0);
    CHECK(so.density.std == 0.0);

    CommunityFirstOrder two;
    two.node_count = 8;
    two.communities.resize(2);
    two.communities[0].density = 1.0;
    two.communities[1].density = 0.5;
    two.communities[0].size = two.communities[1].size = 4;
    so = gc_metrics_second_order(two);
    CHECK(so.density.mean == 0.75);
    CHECK(so.density.std == 0.25);
    CHECK(so.density.min == 0.5);
    CHECK(so.largest_fraction == 0.5);
    CHECK(so.community_count == 2);

    const auto none = gc_metrics_second_order(CommunityFirstOrder{});
    CHECK(none.community_count == 0);
    CHECK(none.size.mean == 0.0);
    CHECK(none.largest_fraction == 0.0);
}

TEST_CASE("stability")
{
    CHECK(stability(keys({"a", "b", "c"}), keys({"a", "b", "c"})) == 1.0);
    CHECK(stability(keys({"a", "b"}), keys({"c", "d"})) == -1.0);
    CHECK(stability(keys({"a", "b", "c"}), keys({"b", "c", "d"})) == 0.0);
    CHECK(stability({}, {}) == kSentinel);

    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 500; ++trial) {
        std::set<std::string> a, b;
        for (int i = 0; i < 10; ++i) {
            if (rng() % 2)
                a.insert("k" + std::to_string(rng() % 15));
            if (rng() % 2)
                b.insert("k" + std::to_string(rng() % 15));
        }
        std::vector<std::string> va(a.begin(), a.end()), vb(b.begin(), b.end());
        if (va.empty() && vb.empty())
            continue;
        const double s = stability(va, vb);
        CHECK(s == stability(vb, va));
        CHECK(s >= -1.0);
        CHECK(s <= 1.0);
        // oracle: direct set arithmetic
        std::size_t inter = 0;
        for (const auto& k : a)
            inter += b.count(k);
        const std::size_t uni = a.size() + b.size() - inter;
        CHECK(s == doctest::Approx((2.0 * inter - uni) / uni));
    }
}

TEST_CASE("propagation: identical partitions match identically")
{
    const auto g = oracle::two_cliques_with_bridge();
    const auto p = partition(g, CommunityStrategy::louvain, 42);
    const auto m = propagate_communities(p, p);
    REQUIRE(m.pairs.size() == 2);
    CHECK(m.pairs[0].previous == 0);
    CHECK(m.pairs[0].next == 0);
    CHECK(m.pairs[1].next == 1);
    CHECK(m.pairs[0].stability == 1.0);
    CHECK(m.born.empty());
    CHECK(m.died.empty());
}

TEST_CASE("propagation: best overlap wins and newcomers are born")
{
    const auto g0 = oracle::graph_from({}, {{"A", "B", 1.0}, {"B", "C", 1.0}});
    const auto g1 = oracle::graph_from({}, {{"A", "B", 1.0}, {"B", "D", 1.0}, {"E", "F", 1.0}});
    const auto p0 = partition_of(g0, {{"A", "B", "C"}});
    const auto p1 = partition_of(g1, {{"A", "B", "D"}, {"E", "F"}});
    const auto m = propagate_communities(p0, p1);
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0].overlap == 2);
    CHECK(p1.communities[m.pairs[0].next].member_keys == keys({"A", "B", "D"}));
    CHECK(m.pairs[0].stability == 0.0);
    REQUIRE(m.born.size() == 1);
    CHECK(p1.communities[m.born[0]].member_keys == keys({"E", "F"}));
    CHECK(m.died.empty());
}

TEST_CASE("propagation: disjoint windows")
{
    const auto g0 = oracle::graph_from({}, {{"A", "B", 1.0}, {"C", "D", 1.0}});
    const auto g1 = oracle::graph_from({}, {{"X", "Y", 1.0}});
    const auto m = propagate_communities(partition_of(g0, {{"A", "B"}, {"C", "D"}}),
                                         partition_of(g1, {{"X", "Y"}}));
    CHECK(m.pairs.empty());
    CHECK(m.died.size() == 2);
    CHECK(m.born.size() == 1);
}

TEST_CASE("propagation: overlap ties prefer the community holding the old center")
{
    // previous {A,B,C,D} with center B (degree 3); next splits it {A,C} / {B,D}
    const auto g0 = oracle::graph_from({}, {{"A", "B", 1.0}, {"B", "C", 1.0}, {"B", "D", 1.0}});
    const auto g1 = oracle::graph_from({}, {{"A", "C", 1.0}, {"B", "D", 1.0}});
    const auto p0 = partition_of(g0, {{"A", "B", "C", "D"}});
    CHECK(g0.key(p0.communities[0].center) == "B");
    const auto p1 = partition_of(g1, {{"A", "C"}, {"B", "D"}});
    const auto m = propagate_communities(p0, p1);
    REQUIRE(m.pairs.size() == 1);
    CHECK(p1.communities[m.pairs[0].next].member_keys == keys({"B", "D"}));
}

TEST_CASE("center ties go to the lowest key")
{
    const auto g = oracle::graph_from({}, {{"q", "p", 1.0}});
    const auto p = partition_of(g, {{"p", "q"}});
    CHECK(g.key(p.communities[0].center) == "p");
}

TEST_CASE("property: metric ranges, edge conservation and modularity on random graphs")
{
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto g = oracle::random_graph(rng, 50, 0.1, 10.0);
        const auto strategy = trial % 2 ? CommunityStrategy::label_propagation : CommunityStrategy::louvain;
        const auto p = partition(g, strategy, static_cast<std::uint64_t>(trial));
        REQUIRE(p.assignment.size() == g.node_count());

        std::size_t covered = 0;
        for (std::uint32_t c = 0; c < p.size(); ++c) {
            covered += p.communities[c].members.size();
            for (auto v : p.communities[c].members)
                CHECK(p.assignment[v] == c);
            const auto& ms = p.communities[c].members;
            CHECK(std::find(ms.begin(), ms.end(), p.communities[c].center) != ms.end());
        }
        CHECK(covered == g.node_count());

        const auto fo = gc_metrics_first_order(g, p);
        std::size_t internal = 0, boundary = 0;
        for (const auto& m : fo.communities) {
            CHECK(m.density >= 0.0);
            CHECK(m.density <= 1.0);
            CHECK(m.conductance >= 0.0);
            CHECK(m.conductance <= 1.0);
            internal += m.internal_edges;
            boundary += m.boundary_edges;
        }
        CHECK(internal + boundary / 2 == g.edge_count());
        CHECK(boundary % 2 == 0);

        std::vector<int> comm(p.assignment.begin(), p.assignment.end());
        CHECK(fo.modularity == doctest::Approx(oracle::modularity_matrix(g, comm)).epsilon(1e-9));
        if (strategy == CommunityStrategy::louvain)
            CHECK(fo.modularity >= -1e-12);

        const auto so = gc_metrics_second_order(fo);
        if (!fo.communities.empty()) {
            double mx = 0.0;
            for (const auto& m : fo.communities)
                mx = std::max(mx, m.conductance);
            CHECK(so.conductance.max == mx);
        }
    }
}

TEST_CASE("partitioning is deterministic across runs and thread counts")
{
    std::mt19937_64 rng(77);
    std::vector<TrafficGraph> graphs;
    for (int i = 0; i < 40; ++i)
        graphs.push_back(oracle::random_graph(rng, 60, 0.5, 5.0));
    std::vector<std::vector<std::uint32_t>> reference;
    for (const auto& g : graphs)
        reference.push_back(partition(g, CommunityStrategy::louvain, 42).assignment);

    for (int threads : {1, 4}) {
        omp_set_num_threads(threads);
        std::vector<std::vector<std::uint32_t>> got(graphs.size());
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < static_cast<int>(graphs.size()); ++i)
            got[static_cast<std::size_t>(i)] = partition(graphs[static_cast<std::size_t>(i)],
                                                         CommunityStrategy::louvain, 42).assignment;
        CHECK(got == reference);
    }
    omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("enrichment: suffixed columns, preserved rows, sentinels")
{
    const auto log = log_from("stime,saddr,daddr,category\n"
                              "1,A,B,Normal\n2,B,C,Normal\n3,C,A,Normal\n4,D,D,Normal\n");
    EnrichOptions o;
    o.interval = 300.0;
    o.suffix = "ip5";
    const auto out = insert_graph_community_metrics(log, o);
    CHECK(out.rows.size() == 4);
    REQUIRE(out.columns.size() == 4 + community_columns("ip5").size());
    for (std::size_t c = 4; c < out.columns.size(); ++c)
        CHECK(out.columns[c].ends_with("_ip5"));
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c)
            CHECK(out.rows[r][c] == log.table.rows[r][c]);

    const auto stab = *out.find("stability_ip5");
    for (const auto& row : out.rows)
        CHECK(row[stab] == "-2");
    // D only has a self loop: no node in the graph
    CHECK(out.rows[3][*out.find("community_ip5")] == "-2");
    CHECK(out.rows[0][*out.find("density_ip5")] == "1");
}

TEST_CASE("enrichment: a repeated window is perfectly stable")
{
    const auto log = log_from("stime,saddr,daddr,category\n"
                              "1,A,B,Normal\n2,B,C,Normal\n3,C,A,Normal\n"
                              "11,A,B,Normal\n12,B,C,Normal\n13,C,A,Normal\n");
    EnrichOptions o;
    o.interval = 10.0;
    o.suffix = "x";
    const auto out = insert_graph_community_metrics(log, o);
    const auto stab = *out.find("stability_x");
    for (std::size_t r = 0; r < 3; ++r)
        CHECK(out.rows[r][stab] == "-2");
    for (std::size_t r = 3; r < 6; ++r)
        CHECK(out.rows[r][stab] == "1");
}

TEST_CASE("enrichment: parallel matches the serial reference; unsorted input rejected")
{
    std::mt19937_64 rng(21);
    std::string csv = "stime,saddr,daddr,category\n";
    for (int i = 0; i < 2000; ++i)
        csv += std::to_string(i / 10.0) + ",h" + std::to_string(rng() % 40) + ",h" +
               std::to_string(rng() % 40) + ",Normal\n";
    const auto log = log_from(csv);
    for (auto strategy : {CommunityStrategy::louvain, CommunityStrategy::label_propagation}) {
        EnrichOptions o;
        o.interval = 20.0;
        o.strategy = strategy;
        CHECK(format_table(insert_graph_community_metrics(log, o)) ==
              format_table(insert_graph_community_metrics_serial(log, o)));
    }

    const auto unsorted = log_from("stime,saddr,daddr,category\n5,A,B,x\n1,B,C,x\n");
    CHECK_THROWS_AS(insert_graph_community_metrics(unsorted, EnrichOptions{}), DataError);
}

}
