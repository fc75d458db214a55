#include "flowgraph/spectral.hpp"

#include "flowgraph/community.hpp"
#include "flowgraph/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include <omp.h>

namespace flowgraph {

Eigen::MatrixXd laplacian_matrix(const TrafficGraph& g)
{
    const auto n = static_cast<Eigen::Index>(g.node_count());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : g.edges()) {
        L(e.u, e.v) -= e.weight;
        L(e.v, e.u) -= e.weight;
        L(e.u, e.u) += e.weight;
        L(e.v, e.v) += e.weight;
    }
    return L;
}

LaplacianSpectrum laplacian_spectrum(const TrafficGraph& g, const SpectralConfig& cfg)
{
    if (g.empty())
        throw std::invalid_argument("laplacian_spectrum: empty graph");

    LaplacianSpectrum s;
    const Eigen::MatrixXd L = laplacian_matrix(g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("symmetric eigensolver did not converge");

    const auto& values = solver.eigenvalues();
    s.eigenvalues.assign(values.data(), values.data() + values.size());
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
    s.lambda_max = std::max(0.0, s.eigenvalues.back());

    const double tol = std::max(cfg.zero_tolerance * s.lambda_max, cfg.zero_floor);
    for (auto& v : s.eigenvalues) {
        if (v <= tol) {
            v = 0.0;
            ++s.solver_zero_count;
        }
    }

    const std::size_t components = connected_components(g);
    s.zero_multiplicity = s.solver_zero_count;
    if (components != s.solver_zero_count) {
        spdlog::warn("spectrum: {} near-zero eigenvalues but {} connected components on a {}-node "
                     "graph; using the component count",
                     s.solver_zero_count, components, g.node_count());
        s.zero_multiplicity = components;
    }
    return s;
}

double connectedness(std::size_t zero_multiplicity)
{
    if (zero_multiplicity < 1)
        throw std::invalid_argument("connectedness: zero multiplicity must be >= 1");
    return std::exp(1.0 / static_cast<double>(zero_multiplicity) - 1.0);
}

SpectralValue flooding(const LaplacianSpectrum& spectrum, std::size_t devices)
{
    const std::size_t n = spectrum.size();
    const std::size_t first = std::min(spectrum.zero_multiplicity, n);
    const std::size_t last = std::min(spectrum.zero_multiplicity + devices, n);
    SpectralValue out;
    out.truncated = spectrum.zero_multiplicity + devices > n;
    double sum = 0.0;
    for (std::size_t i = first; i < last; ++i)
        sum += spectrum.eigenvalues[i];
    const std::size_t taken = last - first;
    out.value = (taken ? sum / static_cast<double>(taken) : 0.0) - 1.0;
    return out;
}

SpectralValue wiriness(const LaplacianSpectrum& spectrum, std::size_t devices)
{
    const std::size_t n = spectrum.size();
    const std::size_t taken = std::min(devices, n);
    SpectralValue out;
    out.truncated = devices > n;
    double sum = 0.0;
    for (std::size_t i = n - taken; i < n; ++i)
        sum += spectrum.eigenvalues[i];
    out.value = taken ? sum / static_cast<double>(taken) : 0.0;
    return out;
}

std::vector<std::string> SpectralTable::columns()
{
    std::vector<std::string> cols{"window",    "window_start", "window_end", "records",
                                  "nodes_mid", "edges_mid",    "nodes_end",  "edges_end"};
    for (const char* sub : {"mid", "end"})
        for (const auto topo : kSpectralTopologies)
            for (const char* metric : {"connectedness", "flooding", "wiriness"})
                cols.push_back(std::string(metric) + "_" + std::string(to_string(topo)) + "_" + sub);
    for (const char* flag : {"empty", "truncated", "oversize"})
        for (const char* sub : {"mid", "end"})
            cols.push_back(std::string(flag) + "_" + sub);
    cols.push_back("label");
    return cols;
}

Table SpectralTable::to_table() const
{
    Table t;
    t.columns = columns();
    for (const auto& r : rows) {
        std::vector<std::string> row;
        row.reserve(t.columns.size());
        row.push_back(std::to_string(r.window_index));
        row.push_back(format_number(r.start));
        row.push_back(format_number(r.end));
        row.push_back(std::to_string(r.records));
        for (const auto& sub : r.features) {
            row.push_back(std::to_string(sub[0].nodes));
            row.push_back(std::to_string(sub[0].edges));
        }
        for (const auto& sub : r.features)
            for (const auto& f : sub) {
                row.push_back(format_number(f.connectedness));
                row.push_back(format_number(f.flooding));
                row.push_back(format_number(f.wiriness));
            }
        auto any = [](const std::array<SpectralFeatures, 3>& sub, bool SpectralFeatures::*flag) {
            return std::any_of(sub.begin(), sub.end(),
                               [flag](const SpectralFeatures& f) { return f.*flag; });
        };
        for (auto flag : {&SpectralFeatures::empty, &SpectralFeatures::truncated,
                          &SpectralFeatures::oversize})
            for (const auto& sub : r.features)
                row.push_back(any(sub, flag) ? "1" : "0");
        row.push_back(r.label);
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string window_label(std::span<const FlowRecord> records)
{
    std::map<std::string, std::size_t> counts;
    for (const auto& r : records)
        ++counts[r.label];
    if (counts.empty())
        return "Normal";
    const std::pair<const std::string, std::size_t>* best = nullptr;
    for (const auto& entry : counts) {
        if (!best) {
            best = &entry;
            continue;
        }
        if (entry.second != best->second) {
            if (entry.second > best->second)
                best = &entry;
            continue;
        }
        // equal counts: attack beats benign; otherwise keep the smaller name
        if (is_benign_label(best->first) && !is_benign_label(entry.first))
            best = &entry;
    }
    return best->first;
}

SpectralFeatures compute_features(const TimeWindow& window, SubWindow sub, WeightFeature topology,
                                  std::size_t devices, const SpectralConfig& cfg)
{
    const auto pair = split_midpoint(window);
    const TimeWindow& w = sub == SubWindow::midpoint ? pair.first_half : pair.full;

    SpectralFeatures f;
    f.window_index = window.index;
    f.sub_window = sub;
    f.topology = topology;

    const TrafficGraph g = build_graph(w, topology);
    f.nodes = g.node_count();
    f.edges = g.edge_count();
    if (g.empty() || g.node_count() > cfg.node_cap) {
        f.empty = g.empty();
        f.oversize = !g.empty();
        f.connectedness = f.flooding = f.wiriness = kSentinel;
        return f;
    }

    const auto spectrum = laplacian_spectrum(g, cfg);
    const auto fl = flooding(spectrum, devices);
    const auto wi = wiriness(spectrum, devices);
    f.zero_multiplicity = spectrum.zero_multiplicity;
    f.connectedness = connectedness(spectrum.zero_multiplicity);
    f.flooding = fl.value;
    f.wiriness = wi.value;
    f.truncated = fl.truncated || wi.truncated;
    return f;
}

namespace {

std::size_t endpoint_count(std::span<const FlowRecord> records)
{
    std::set<std::string> keys;
    for (const auto& r : records) {
        auto a = r.src_node();
        auto b = r.dst_node();
        if (a == b)
            continue;
        keys.insert(std::move(a));
        keys.insert(std::move(b));
    }
    return keys.size();
}

std::size_t choose_devices(const std::vector<TimeWindow>& windows, const SpectralConfig& cfg)
{
    if (cfg.device_count) {
        if (*cfg.device_count < 1)
            throw ConfigError("device count must be >= 1");
        return *cfg.device_count;
    }
    double mean = 0.0;
    for (const auto& w : windows)
        mean += static_cast<double>(endpoint_count(w.records));
    if (!windows.empty())
        mean /= static_cast<double>(windows.size());
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(mean))));
    spdlog::info("device count not set; using N = {} (mean {:.2f} nodes per window)", n, mean);
    return n;
}

SpectralTable prepare(const std::vector<TimeWindow>& windows, const SpectralConfig& cfg)
{
    SpectralTable table;
    table.device_count = choose_devices(windows, cfg);
    table.rows.resize(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        auto& row = table.rows[i];
        row.window_index = windows[i].index;
        row.start = windows[i].start;
        row.end = windows[i].end;
        row.records = windows[i].records.size();
        row.label = window_label(windows[i].records);
    }
    return table;
}

constexpr std::size_t kCellsPerWindow = 6;

void run_cell(const std::vector<TimeWindow>& windows, SpectralTable& table, std::size_t cell,
              const SpectralConfig& cfg)
{
    const std::size_t w = cell / kCellsPerWindow;
    const std::size_t sub = (cell % kCellsPerWindow) / 3;
    const std::size_t topo = cell % 3;
    table.rows[w].features[sub][topo] = compute_features(
        windows[w], static_cast<SubWindow>(sub), kSpectralTopologies[topo], table.device_count, cfg);
}

} // namespace

SpectralTable spectral_metrics_extractor(std::span<const FlowRecord> records, double interval,
                                         const SpectralConfig& cfg, bool continuity)
{
    const auto windows = partition_windows(records, interval, continuity);
    SpectralTable table = prepare(windows, cfg);
    const auto cells = static_cast<std::int64_t>(windows.size() * kCellsPerWindow);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < cells; ++c)
        run_cell(windows, table, static_cast<std::size_t>(c), cfg);
    return table;
}

SpectralTable spectral_metrics_extractor_serial(std::span<const FlowRecord> records, double interval,
                                                const SpectralConfig& cfg, bool continuity)
{
    const auto windows = partition_windows(records, interval, continuity);
    SpectralTable table = prepare(windows, cfg);
    for (std::size_t c = 0; c < windows.size() * kCellsPerWindow; ++c)
        run_cell(windows, table, c, cfg);
    return table;
}

void require_spectral_columns(const SchemaMapping& schema)
{
    if (!schema.pkts_column || !schema.bytes_column || !schema.rate_column)
        throw SchemaError("spectral extraction needs pkts, bytes and rate columns in the schema");
}

} // namespace flowgraph
