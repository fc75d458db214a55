#pragma once

#include "flowgraph/flow_ingest.hpp"
#include "flowgraph/graph.hpp"
#include "flowgraph/windowing.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flowgraph {

struct SpectralConfig {
    /// Number of network devices N. When unset the extractor picks
    /// max(1, floor(sqrt(mean node count))).
    std::optional<std::size_t> device_count;
    /// Eigenvalues at or below max(zero_tolerance * lambda_max, zero_floor)
    /// are clamped to zero.
    double zero_tolerance = 1e-9;
    double zero_floor = 1e-12;
    /// Windows whose graph exceeds this many nodes are flagged and skipped.
    std::size_t node_cap = 2000;
};

struct LaplacianSpectrum {
    std::vector<double> eigenvalues; ///< ascending, clamped
    std::size_t zero_multiplicity = 0;
    /// Zero count seen by the eigensolver before reconciling with the
    /// component count.
    std::size_t solver_zero_count = 0;
    double lambda_max = 0.0;

    std::size_t size() const { return eigenvalues.size(); }
};

/// Dense L = D - W indexed by node id.
Eigen::MatrixXd laplacian_matrix(const TrafficGraph& g);

/// Full symmetric eigendecomposition of the Laplacian. Z is reconciled
/// against the connected-component count (a mismatch is logged and the
/// component count wins). Throws std::invalid_argument on an empty graph.
LaplacianSpectrum laplacian_spectrum(const TrafficGraph& g, const SpectralConfig& cfg = {});

/// exp(1/Z - 1). Throws std::invalid_argument for Z < 1.
double connectedness(std::size_t zero_multiplicity);

struct SpectralValue {
    double value = 0.0;
    /// Fewer than N eigenvalues were available; the mean uses what exists.
    bool truncated = false;
};

/// Mean of the N eigenvalues following the zeros, minus one.
SpectralValue flooding(const LaplacianSpectrum& spectrum, std::size_t devices);
/// Mean of the N largest eigenvalues.
SpectralValue wiriness(const LaplacianSpectrum& spectrum, std::size_t devices);

enum class SubWindow { midpoint = 0, end = 1 };

inline constexpr std::array<WeightFeature, 3> kSpectralTopologies{
    WeightFeature::packets, WeightFeature::bytes, WeightFeature::rate};

struct SpectralFeatures {
    std::size_t window_index = 0;
    SubWindow sub_window = SubWindow::end;
    WeightFeature topology = WeightFeature::packets;
    double connectedness = 0.0;
    double flooding = 0.0;
    double wiriness = 0.0;
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t zero_multiplicity = 0;
    bool empty = false;
    bool truncated = false;
    bool oversize = false;
};

/// One output row: both sub-windows times the three topologies.
struct SpectralRow {
    std::size_t window_index = 0;
    double start = 0.0;
    double end = 0.0;
    std::size_t records = 0;
    std::array<std::array<SpectralFeatures, 3>, 2> features{};
    std::string label;
};

struct SpectralTable {
    std::size_t device_count = 1;
    std::vector<SpectralRow> rows;

    static std::vector<std::string> columns();
    Table to_table() const;
};

/// Majority label of the records. Ties go to non-benign labels, then to the
/// lexicographically smallest. Empty input yields "Normal".
std::string window_label(std::span<const FlowRecord> records);

/// Computes the features of one (sub-window, topology) cell.
SpectralFeatures compute_features(const TimeWindow& window, SubWindow sub, WeightFeature topology,
                                  std::size_t devices, const SpectralConfig& cfg);

/// Per-window spectral features, one row per emitted window. Cells run in
/// parallel; rows come back in window order.
SpectralTable spectral_metrics_extractor(std::span<const FlowRecord> records, double interval,
                                         const SpectralConfig& cfg, bool continuity = false);

/// Single-threaded reference of spectral_metrics_extractor.
SpectralTable spectral_metrics_extractor_serial(std::span<const FlowRecord> records, double interval,
                                                const SpectralConfig& cfg, bool continuity = false);

/// Throws SchemaError unless pkts, bytes and rate are all mapped.
void require_spectral_columns(const SchemaMapping& schema);

} // namespace flowgraph
