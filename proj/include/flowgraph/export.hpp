#pragma once

#include "flowgraph/community.hpp"
#include "flowgraph/graph.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace flowgraph {

enum class RenderMode { dot, html };
enum class ColorBy { label, community };

RenderMode parse_render_mode(std::string_view name);
ColorBy parse_color_by(std::string_view name);

struct RenderSpec {
    RenderMode mode = RenderMode::html;
    ColorBy color_by = ColorBy::label;
    std::string title;
    std::filesystem::path output_dir = "graph_representation";
};

/// Graphviz DOT for an undirected graph. Node ids are the quoted endpoint
/// keys. With ColorBy::label, edges that carried attack flows are red; with
/// ColorBy::community, nodes are filled by community from `communities`
/// (computed with Louvain, seed 42, when null).
std::string export_dot(const TrafficGraph& g, const RenderSpec& spec,
                       const CommunityPartition* communities = nullptr);

/// JSON document embedded in the HTML page: nodes ordered by id, edges in
/// graph order, and the color classes in use.
std::string html_payload(const TrafficGraph& g, const RenderSpec& spec,
                         const CommunityPartition* communities = nullptr);

/// Self-contained HTML page (payload plus force-layout viewer, no external
/// fetches).
std::string render_html(const TrafficGraph& g, const RenderSpec& spec,
                        const CommunityPartition* communities = nullptr);

/// Writes `<output_dir>/<stem>.dot|.html` according to spec.mode and returns
/// the path. Throws DataError on I/O failure.
std::filesystem::path write_rendering(const TrafficGraph& g, const RenderSpec& spec,
                                      std::string_view stem,
                                      const CommunityPartition* communities = nullptr);

/// Extracts the embedded payload from a page produced by render_html.
std::string extract_payload(std::string_view html);

} // namespace flowgraph
