#include "flowgraph/errors.hpp"
#include "flowgraph/export.hpp"

#include "oracles.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

using namespace flowgraph;
using nlohmann::json;

namespace {

TrafficGraph with_attack()
{
    GraphBuilder b;
    b.add_edge("10.0.0.1", "10.0.0.2", 3.0);
    b.add_edge("10.0.0.2", "203.0.113.9", 1.0, true);
    b.add_node("10.0.0.7");
    return std::move(b).build();
}

RenderSpec dot_spec(ColorBy color = ColorBy::label, std::string title = "")
{
    RenderSpec s;
    s.mode = RenderMode::dot;
    s.color_by = color;
    s.title = std::move(title);
    return s;
}

} // namespace

TEST_SUITE("export_viz") {

TEST_CASE("dot: two nodes and one edge")
{
    const auto g = oracle::graph_from({}, {{"a", "b", 2.5}});
    const auto text = export_dot(g, dot_spec());
    const auto r = oracle::DotChecker::check(text);
    REQUIRE_MESSAGE(r.ok, r.error);
    CHECK_FALSE(r.directed);
    CHECK(std::set<std::string>(r.node_ids.begin(), r.node_ids.end()) == std::set<std::string>{"a", "b"});
    REQUIRE(r.edges.size() == 1);
    CHECK(r.edges[0] == std::pair<std::string, std::string>{"a", "b"});
    CHECK(text.find("weight=2.5") != std::string::npos);
}

TEST_CASE("dot: empty graph")
{
    const auto text = export_dot(TrafficGraph{}, dot_spec());
    CHECK(text == "graph {}\n");
    const auto r = oracle::DotChecker::check(text);
    CHECK(r.ok);
    CHECK(r.node_ids.empty());
    CHECK(r.edges.empty());
}

TEST_CASE("dot: identifiers with quotes and backslashes survive")
{
    const auto g = oracle::graph_from({}, {{"we\"ird", "back\\slash", 1.0}, {"x y", "we\"ird", 1.0}});
    const auto r = oracle::DotChecker::check(export_dot(g, dot_spec(ColorBy::label, "t\"itle")));
    REQUIRE_MESSAGE(r.ok, r.error);
    CHECK(std::set<std::string>(r.node_ids.begin(), r.node_ids.end()) ==
          std::set<std::string>{"we\"ird", "back\\slash", "x y"});
    CHECK(r.edges.size() == 2);
}

TEST_CASE("dot: attack edges are colored, communities fill nodes")
{
    const auto g = with_attack();
    const auto by_label = export_dot(g, dot_spec());
    CHECK(by_label.find("color=\"#d62728\"") != std::string::npos);
    CHECK(oracle::DotChecker::check(by_label).ok);

    const auto by_comm = export_dot(oracle::two_cliques_with_bridge(), dot_spec(ColorBy::community));
    const auto r = oracle::DotChecker::check(by_comm);
    REQUIRE_MESSAGE(r.ok, r.error);
    CHECK(by_comm.find("community=0") != std::string::npos);
    CHECK(by_comm.find("community=1") != std::string::npos);
    CHECK(r.node_ids.size() == 8);
    CHECK(r.edges.size() == 13);
}

TEST_CASE("dot: random graphs parse with matching counts")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto g = oracle::random_graph(rng, 40, 0.1, 100.0);
        const auto r = oracle::DotChecker::check(export_dot(g, dot_spec(trial % 2 ? ColorBy::community : ColorBy::label)));
        REQUIRE_MESSAGE(r.ok, r.error);
        CHECK(r.node_ids.size() == g.node_count());
        CHECK(r.edges.size() == g.edge_count());
    }
}

TEST_CASE("dot checker rejects malformed documents")
{
    CHECK_FALSE(oracle::DotChecker::check("graph { a -- }").ok);
    CHECK_FALSE(oracle::DotChecker::check("graph { \"a -- b }").ok);
    CHECK_FALSE(oracle::DotChecker::check("graph { a -> b }").ok);
    CHECK_FALSE(oracle::DotChecker::check("graph { a [label=] }").ok);
    CHECK(oracle::DotChecker::check("digraph G { a -> b; }").ok);
}

TEST_CASE("html: payload round-trips nodes, edges and attributes")
{
    const auto g = with_attack();
    RenderSpec spec;
    spec.title = "window </script> 3";
    const auto page = render_html(g, spec);
    CHECK(page.find("http://") == std::string::npos);
    CHECK(page.find("https://") == std::string::npos);

    const auto doc = json::parse(extract_payload(page));
    CHECK(doc["title"] == spec.title);
    CHECK(doc["color_by"] == "label");
    REQUIRE(doc["nodes"].size() == g.node_count());
    REQUIRE(doc["edges"].size() == g.edge_count());
    for (NodeId v = 0; v < g.node_count(); ++v) {
        CHECK(doc["nodes"][v]["id"] == v);
        CHECK(doc["nodes"][v]["key"] == g.key(v));
        CHECK(doc["nodes"][v]["degree"].get<double>() == g.weighted_degree(v));
    }
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
        const auto& e = g.edges()[i];
        CHECK(doc["edges"][i]["source"] == e.u);
        CHECK(doc["edges"][i]["target"] == e.v);
        CHECK(doc["edges"][i]["weight"].get<double>() == e.weight);
        CHECK(doc["edges"][i]["multiplicity"] == e.multiplicity);
        CHECK(doc["edges"][i]["attack"] == e.attack);
    }
    const auto key_id = [&](const std::string& k) { return *g.find(k); };
    CHECK(doc["nodes"][key_id("203.0.113.9")]["class"] == "attack");
    CHECK(doc["nodes"][key_id("10.0.0.1")]["class"] == "normal");
    CHECK(doc["nodes"][key_id("10.0.0.7")]["size"].get<double>() == 4.0);
    CHECK(doc["nodes"][key_id("10.0.0.2")]["size"].get<double>() == 18.0);
}

TEST_CASE("html: community coloring lists one class per community")
{
    const auto g = oracle::two_cliques_with_bridge();
    RenderSpec spec;
    spec.color_by = ColorBy::community;
    const auto doc = json::parse(html_payload(g, spec));
    CHECK(doc["classes"].size() == 2);
    std::set<std::string> used;
    for (const auto& n : doc["nodes"])
        used.insert(n["class"].get<std::string>());
    CHECK(used == std::set<std::string>{"community-0", "community-1"});
    CHECK(doc["nodes"][*g.find("a1")]["class"] == doc["nodes"][*g.find("a2")]["class"]);
    CHECK(doc["nodes"][*g.find("a1")]["class"] != doc["nodes"][*g.find("b1")]["class"]);
}

TEST_CASE("write_rendering writes the requested format")
{
    const auto dir = std::filesystem::temp_directory_path() / "flowgraph_export_test";
    std::filesystem::remove_all(dir);
    RenderSpec spec = dot_spec();
    spec.output_dir = dir / "nested";
    const auto g = with_attack();
    const auto dot = write_rendering(g, spec, "trace");
    CHECK(dot.filename() == "trace.dot");
    std::ifstream in(dot);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    CHECK(text == export_dot(g, spec));

    spec.mode = RenderMode::html;
    CHECK(write_rendering(g, spec, "trace").filename() == "trace.html");
    std::filesystem::remove_all(dir);

    CHECK_THROWS_AS(parse_render_mode("svg"), ConfigError);
    CHECK_THROWS_AS(parse_color_by("degree"), ConfigError);
    CHECK_THROWS(extract_payload("<html></html>"));
}

}
