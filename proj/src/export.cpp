#include "flowgraph/export.hpp"

#include "flowgraph/errors.hpp"
#include "flowgraph/table.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <optional>

namespace flowgraph {

RenderMode parse_render_mode(std::string_view name)
{
    if (name == "dot")
        return RenderMode::dot;
    if (name == "html")
        return RenderMode::html;
    throw ConfigError("unknown render mode '" + std::string(name) + "' (expected dot|html)");
}

ColorBy parse_color_by(std::string_view name)
{
    if (name == "label")
        return ColorBy::label;
    if (name == "community")
        return ColorBy::community;
    throw ConfigError("unknown color mode '" + std::string(name) + "' (expected label|community)");
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2",
                                    "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a"};
constexpr const char* kNormalColor = "#6b8fb5";
constexpr const char* kAttackColor = "#d62728";

std::string quote(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': break;
        default: out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

// Holds a partition that was computed locally when the caller gave none.
struct Coloring {
    std::optional<CommunityPartition> owned;
    const CommunityPartition* partition = nullptr;

    Coloring(const TrafficGraph& g, const RenderSpec& spec, const CommunityPartition* given)
    {
        if (spec.color_by != ColorBy::community)
            return;
        if (given) {
            if (given->assignment.size() != g.node_count())
                throw ConfigError("community partition does not match the rendered graph");
            partition = given;
            return;
        }
        owned = partition_graph(g);
        partition = &*owned;
    }

    static CommunityPartition partition_graph(const TrafficGraph& g)
    {
        return flowgraph::partition(g, CommunityStrategy::louvain, 42);
    }
};

std::vector<bool> attack_nodes(const TrafficGraph& g)
{
    std::vector<bool> out(g.node_count(), false);
    for (const auto& e : g.edges())
        if (e.attack)
            out[e.u] = out[e.v] = true;
    return out;
}

} // namespace

std::string export_dot(const TrafficGraph& g, const RenderSpec& spec,
                       const CommunityPartition* communities)
{
    const Coloring coloring(g, spec, communities);
    std::string head = "graph";
    if (!spec.title.empty())
        head += " " + quote(spec.title);
    if (g.empty())
        return head + " {}\n";

    std::string out = head + " {\n";
    for (NodeId v = 0; v < g.node_count(); ++v) {
        out += "  " + quote(g.key(v)) + " [label=" + quote(g.key(v));
        if (coloring.partition) {
            const auto c = coloring.partition->assignment[v];
            out += ", style=filled, fillcolor=" + quote(kPalette[c % std::size(kPalette)]) +
                   ", community=" + std::to_string(c);
        }
        out += "];\n";
    }
    for (const auto& e : g.edges()) {
        out += "  " + quote(g.key(e.u)) + " -- " + quote(g.key(e.v)) +
               " [weight=" + format_number(e.weight) + ", count=" + std::to_string(e.multiplicity);
        if (spec.color_by == ColorBy::label && e.attack)
            out += std::string(", color=") + quote(kAttackColor);
        out += "];\n";
    }
    out += "}\n";
    return out;
}

std::string html_payload(const TrafficGraph& g, const RenderSpec& spec,
                         const CommunityPartition* communities)
{
    using nlohmann::json;
    const Coloring coloring(g, spec, communities);
    const auto attack = attack_nodes(g);

    double max_degree = 0.0;
    for (NodeId v = 0; v < g.node_count(); ++v)
        max_degree = std::max(max_degree, g.weighted_degree(v));

    json classes = json::array();
    if (coloring.partition) {
        for (std::size_t c = 0; c < coloring.partition->size(); ++c)
            classes.push_back({{"name", "community-" + std::to_string(c)},
                               {"color", kPalette[c % std::size(kPalette)]}});
    } else {
        classes.push_back({{"name", "normal"}, {"color", kNormalColor}});
        classes.push_back({{"name", "attack"}, {"color", kAttackColor}});
    }

    json nodes = json::array();
    for (NodeId v = 0; v < g.node_count(); ++v) {
        const double degree = g.weighted_degree(v);
        const double size = 4.0 + (max_degree > 0.0 ? 14.0 * degree / max_degree : 0.0);
        std::string cls = coloring.partition
                              ? "community-" + std::to_string(coloring.partition->assignment[v])
                              : (attack[v] ? "attack" : "normal");
        nodes.push_back({{"id", v}, {"key", g.key(v)}, {"degree", degree}, {"size", size},
                         {"class", cls}});
    }

    json edges = json::array();
    for (const auto& e : g.edges())
        edges.push_back({{"source", e.u},
                         {"target", e.v},
                         {"weight", e.weight},
                         {"multiplicity", e.multiplicity},
                         {"attack", e.attack}});

    json doc = {{"title", spec.title},
                {"color_by", spec.color_by == ColorBy::community ? "community" : "label"},
                {"classes", classes},
                {"nodes", nodes},
                {"edges", edges}};
    return doc.dump();
}

namespace {

constexpr std::string_view kPayloadOpen = R"(<script type="application/json" id="graph-data">)";
constexpr std::string_view kPayloadClose = "</script>";

std::string html_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

constexpr std::string_view kViewerHead = R"(<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>)";

constexpr std::string_view kViewerStyle = R"(</title>
<style>
  html, body { margin: 0; height: 100%; font: 13px sans-serif; background: #fafafa; }
  #bar { position: absolute; top: 0; left: 0; right: 0; padding: 6px 10px; background: #fffe; border-bottom: 1px solid #ddd; }
  #legend span { display: inline-block; margin-right: 10px; }
  #legend i { display: inline-block; width: 10px; height: 10px; margin-right: 4px; border-radius: 5px; }
  #tip { position: absolute; pointer-events: none; background: #222; color: #fff; padding: 3px 6px; border-radius: 3px; display: none; }
  canvas { display: block; width: 100%; height: 100%; cursor: grab; }
</style>
</head>
<body>
<div id="bar"><b id="heading"></b> <span id="stats"></span> <div id="legend"></div></div>
<canvas id="view"></canvas>
<div id="tip"></div>
)";

constexpr std::string_view kViewerScript = R"js(
<script>
(function () {
  "use strict";
  var data = JSON.parse(document.getElementById("graph-data").textContent);
  var colors = {};
  data.classes.forEach(function (c) { colors[c.name] = c.color; });
  document.getElementById("heading").textContent = data.title || "traffic graph";
  document.getElementById("stats").textContent = data.nodes.length + " nodes, " + data.edges.length + " edges";
  var legend = document.getElementById("legend");
  data.classes.forEach(function (c) {
    var s = document.createElement("span");
    s.innerHTML = '<i style="background:' + c.color + '"></i>';
    s.appendChild(document.createTextNode(c.name));
    legend.appendChild(s);
  });

  var canvas = document.getElementById("view"), ctx = canvas.getContext("2d");
  var tip = document.getElementById("tip");
  var nodes = data.nodes.map(function (n, i) {
    var a = 2 * Math.PI * i / Math.max(1, data.nodes.length);
    var r = 40 + 6 * Math.sqrt(data.nodes.length);
    return { n: n, x: r * Math.cos(a), y: r * Math.sin(a), vx: 0, vy: 0 };
  });
  var maxW = data.edges.reduce(function (m, e) { return Math.max(m, e.weight); }, 0) || 1;
  var view = { x: 0, y: 0, k: 1 };

  function step() {
    var i, j, a, b, dx, dy, d2, d, f;
    for (i = 0; i < nodes.length; i++) {
      a = nodes[i];
      for (j = i + 1; j < nodes.length; j++) {
        b = nodes[j];
        dx = a.x - b.x; dy = a.y - b.y; d2 = dx * dx + dy * dy + 0.01;
        f = 400 / d2;
        a.vx += dx * f; a.vy += dy * f; b.vx -= dx * f; b.vy -= dy * f;
      }
      a.vx -= a.x * 0.002; a.vy -= a.y * 0.002;
    }
    data.edges.forEach(function (e) {
      a = nodes[e.source]; b = nodes[e.target];
      dx = b.x - a.x; dy = b.y - a.y; d = Math.sqrt(dx * dx + dy * dy) + 0.01;
      f = (d - 50) * 0.01;
      a.vx += dx / d * f; a.vy += dy / d * f; b.vx -= dx / d * f; b.vy -= dy / d * f;
    });
    nodes.forEach(function (p) { p.vx *= 0.85; p.vy *= 0.85; p.x += p.vx; p.y += p.vy; });
  }

  function draw() {
    canvas.width = canvas.clientWidth; canvas.height = canvas.clientHeight;
    ctx.setTransform(view.k, 0, 0, view.k, canvas.width / 2 + view.x, canvas.height / 2 + view.y);
    ctx.clearRect(-1e5, -1e5, 2e5, 2e5);
    data.edges.forEach(function (e) {
      var a = nodes[e.source], b = nodes[e.target];
      ctx.strokeStyle = e.attack && data.color_by === "label" ? colors.attack : "#bbb";
      ctx.lineWidth = (0.5 + 3 * e.weight / maxW) / view.k;
      ctx.beginPath(); ctx.moveTo(a.x, a.y); ctx.lineTo(b.x, b.y); ctx.stroke();
    });
    nodes.forEach(function (p) {
      ctx.fillStyle = colors[p.n["class"]] || "#888";
      ctx.beginPath(); ctx.arc(p.x, p.y, p.n.size / view.k, 0, 2 * Math.PI); ctx.fill();
    });
  }

  var ticks = 0;
  function frame() { if (ticks++ < 300) step(); draw(); requestAnimationFrame(frame); }
  requestAnimationFrame(frame);

  function toWorld(ev) {
    return { x: (ev.offsetX - canvas.width / 2 - view.x) / view.k, y: (ev.offsetY - canvas.height / 2 - view.y) / view.k };
  }
  var drag = null;
  canvas.addEventListener("mousedown", function (ev) { drag = { x: ev.clientX - view.x, y: ev.clientY - view.y }; });
  window.addEventListener("mouseup", function () { drag = null; });
  canvas.addEventListener("mousemove", function (ev) {
    if (drag) { view.x = ev.clientX - drag.x; view.y = ev.clientY - drag.y; return; }
    var w = toWorld(ev), hit = null;
    nodes.forEach(function (p) {
      var dx = p.x - w.x, dy = p.y - w.y, r = p.n.size / view.k + 2;
      if (dx * dx + dy * dy <= r * r) hit = p;
    });
    if (!hit) { tip.style.display = "none"; return; }
    tip.textContent = hit.n.key + "  (degree " + hit.n.degree + ", " + hit.n["class"] + ")";
    tip.style.left = (ev.clientX + 12) + "px"; tip.style.top = (ev.clientY + 12) + "px";
    tip.style.display = "block";
  });
  canvas.addEventListener("wheel", function (ev) {
    ev.preventDefault();
    view.k = Math.min(20, Math.max(0.05, view.k * (ev.deltaY < 0 ? 1.1 : 1 / 1.1)));
  }, { passive: false });
})();
</script>
</body>
</html>
)js";

} // namespace

std::string render_html(const TrafficGraph& g, const RenderSpec& spec,
                        const CommunityPartition* communities)
{
    std::string payload = html_payload(g, spec, communities);
    // "</" may not appear inside a script element; "\/" is the same JSON text.
    for (std::size_t pos = 0; (pos = payload.find("</", pos)) != std::string::npos; pos += 3)
        payload.replace(pos, 2, "<\\/");

    std::string out;
    out += kViewerHead;
    out += html_escape(spec.title.empty() ? "traffic graph" : spec.title);
    out += kViewerStyle;
    out += kPayloadOpen;
    out += payload;
    out += kPayloadClose;
    out += kViewerScript;
    return out;
}

std::string extract_payload(std::string_view html)
{
    const auto open = html.find(kPayloadOpen);
    if (open == std::string_view::npos)
        throw DataError("no embedded graph payload found");
    const auto begin = open + kPayloadOpen.size();
    const auto end = html.find(kPayloadClose, begin);
    if (end == std::string_view::npos)
        throw DataError("unterminated graph payload");
    return std::string(html.substr(begin, end - begin));
}

std::filesystem::path write_rendering(const TrafficGraph& g, const RenderSpec& spec,
                                      std::string_view stem, const CommunityPartition* communities)
{
    std::error_code ec;
    std::filesystem::create_directories(spec.output_dir, ec);
    if (ec)
        throw DataError("cannot create output directory '" + spec.output_dir.string() +
                        "': " + ec.message());
    const bool dot = spec.mode == RenderMode::dot;
    const auto path = spec.output_dir / (std::string(stem) + (dot ? ".dot" : ".html"));
    const std::string text = dot ? export_dot(g, spec, communities) : render_html(g, spec, communities);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw DataError("write failed for '" + path.string() + "'");
    return path;
}

} // namespace flowgraph
