#include "flowgraph/cli.hpp"

#include "flowgraph/community.hpp"
#include "flowgraph/duration.hpp"
#include "flowgraph/errors.hpp"
#include "flowgraph/export.hpp"
#include "flowgraph/flow_ingest.hpp"
#include "flowgraph/spectral.hpp"
#include "flowgraph/table.hpp"
#include "flowgraph/windowing.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

namespace flowgraph::cli {

namespace {

void init_logging(const std::string& level)
{
    static const auto logger = [] {
        auto l = std::make_shared<spdlog::logger>("flowgraph",
                                                  std::make_shared<spdlog::sinks::stderr_sink_mt>());
        l->set_pattern("[%l] %v");
        spdlog::set_default_logger(l);
        return l;
    }();
    const auto lvl = spdlog::level::from_str(level);
    if (lvl == spdlog::level::off && level != "off")
        throw ConfigError("unknown log level '" + level + "'");
    logger->set_level(lvl);
}

// Options shared by every subcommand that reads a flow log.
struct InputOptions {
    std::string input;
    std::string delimiter = ",";
    std::string time_column = "stime";
    std::string time_format = "epoch_seconds";
    std::vector<std::string> src{"saddr"};
    std::vector<std::string> dst{"daddr"};
    std::string pkts;
    std::string bytes;
    std::string rate;
    std::string label = "category";
    bool lenient = false;
    bool sort_input = false;
    bool dry_run = false;

    void attach(CLI::App& sub, bool measures_default)
    {
        if (measures_default) {
            pkts = "pkts";
            bytes = "bytes";
            rate = "rate";
        }
        sub.add_option("--input", input, "Delimited flow log with a header row")->required();
        sub.add_option("--delimiter", delimiter, "Field delimiter")->capture_default_str();
        sub.add_option("--time-column", time_column, "Timestamp column")->capture_default_str();
        sub.add_option("--time-format", time_format,
                       "epoch_seconds, epoch_millis or a strptime pattern (UTC)")
            ->capture_default_str();
        sub.add_option("--src", src, "Source endpoint column(s), joined with '|'")
            ->delimiter(',')
            ->capture_default_str();
        sub.add_option("--dst", dst, "Destination endpoint column(s), joined with '|'")
            ->delimiter(',')
            ->capture_default_str();
        sub.add_option("--pkts", pkts, "Packet count column (empty: unmapped)")->capture_default_str();
        sub.add_option("--bytes", bytes, "Byte count column (empty: unmapped)")->capture_default_str();
        sub.add_option("--rate", rate, "Packet rate column (empty: unmapped)")->capture_default_str();
        sub.add_option("--label", label, "Label / attack category column")->capture_default_str();
        sub.add_flag("--lenient", lenient, "Skip malformed rows with a warning instead of failing");
        sub.add_flag("--sort-input", sort_input, "Sort records by time instead of rejecting unsorted input");
        sub.add_flag("--dry-run", dry_run, "Validate configuration and schema, then exit");
    }

    char delim() const
    {
        if (delimiter == "\\t" || delimiter == "tab")
            return '\t';
        if (delimiter.size() != 1)
            throw ConfigError("delimiter must be a single character, got '" + delimiter + "'");
        return delimiter.front();
    }

    SchemaMapping schema() const
    {
        SchemaMapping s;
        s.time_column = time_column;
        s.time = parse_time_spec(time_format);
        s.src_columns = src;
        s.dst_columns = dst;
        auto opt = [](const std::string& c) -> std::optional<std::string> {
            if (c.empty())
                return std::nullopt;
            return c;
        };
        s.pkts_column = opt(pkts);
        s.bytes_column = opt(bytes);
        s.rate_column = opt(rate);
        s.label_column = label;
        return s;
    }

    Table header() const
    {
        std::ifstream in(input, std::ios::binary);
        if (!in)
            throw DataError("cannot open input file '" + input + "'");
        std::string line;
        std::getline(in, line);
        return parse_table(line, delim());
    }

    FlowLog load(const SchemaMapping& s) const
    {
        ParseOptions po;
        po.delimiter = delim();
        po.lenient = lenient;
        FlowLog log = parse_log(input, s, po);
        for (const auto& e : log.skipped)
            spdlog::warn("skipped line {} [{}]: {}", e.line, e.column, e.message);
        if (!is_time_sorted(log.records)) {
            if (!sort_input)
                throw DataError("input is not sorted by '" + time_column +
                                "' (pass --sort-input to sort it)");
            std::stable_sort(log.records.begin(), log.records.end(),
                             [](const FlowRecord& a, const FlowRecord& b) {
                                 return a.timestamp < b.timestamp;
                             });
        }
        spdlog::info("read {} records from {}", log.records.size(), input);
        return log;
    }
};

void write_output(const Table& table, const std::string& path, char delim)
{
    write_table(table, path, delim);
    spdlog::info("wrote {} rows to {}", table.rows.size(), path);
}

struct TimeseriesCommand {
    InputOptions in;
    std::string output;
    std::string resolution = "1s";
    std::vector<std::string> sort_by;
    std::vector<std::string> group_by;
    std::vector<std::string> aggregations;

    CLI::App* attach(CLI::App& app)
    {
        auto* sub = app.add_subcommand("timeseries", "Aggregate flows into fixed-resolution time series");
        in.attach(*sub, true);
        sub->add_option("--output", output, "Output table")->required();
        sub->add_option("--resolution", resolution, "Bucket width (e.g. 1s, 500ms)")->capture_default_str();
        sub->add_option("--sort-by", sort_by, "Sort columns within a bucket (default: time column)")
            ->delimiter(',');
        sub->add_option("--group-by", group_by, "Group columns (default: time, src, dst)")->delimiter(',');
        sub->add_option("--agg", aggregations,
                        "column=sum|mean|min|max|first, repeatable (default: pkts=sum, bytes=sum, "
                        "rate=mean, <label>=first)")
            ->delimiter(',');
        return sub;
    }

    AggregationSpec spec() const
    {
        AggregationSpec s;
        s.sort_by = sort_by.empty() ? std::vector<std::string>{in.time_column} : sort_by;
        if (group_by.empty()) {
            s.group_by.push_back(in.time_column);
            s.group_by.insert(s.group_by.end(), in.src.begin(), in.src.end());
            s.group_by.insert(s.group_by.end(), in.dst.begin(), in.dst.end());
        } else {
            s.group_by = group_by;
        }
        if (aggregations.empty()) {
            for (const auto& [c, a] : {std::pair{in.pkts, "sum"}, std::pair{in.bytes, "sum"},
                                       std::pair{in.rate, "mean"}, std::pair{in.label, "first"}})
                if (!c.empty())
                    s.aggregations.emplace_back(c, parse_aggregation(a));
        } else {
            for (const auto& item : aggregations) {
                const auto eq = item.find('=');
                if (eq == std::string::npos || eq == 0)
                    throw ConfigError("--agg expects column=function, got '" + item + "'");
                s.aggregations.emplace_back(item.substr(0, eq), parse_aggregation(item.substr(eq + 1)));
            }
        }
        return s;
    }

    int execute() const
    {
        const double res = parse_duration(resolution);
        const auto time = parse_time_spec(in.time_format);
        const auto s = spec();
        const Table header = in.header();
        header.require(in.time_column);
        for (const auto* cols : {&s.sort_by, &s.group_by})
            for (const auto& c : *cols)
                header.require(c);
        for (const auto& a : s.aggregations)
            header.require(a.first);
        if (in.dry_run) {
            spdlog::info("dry run: configuration and schema are valid");
            return kExitOk;
        }
        const Table table = read_table(in.input, in.delim());
        spdlog::info("read {} rows from {}", table.rows.size(), in.input);
        write_output(extract_time_series(table, in.time_column, time, res, s), output, in.delim());
        return kExitOk;
    }
};

struct CommunityCommand {
    InputOptions in;
    std::string output;
    std::string window = "5m";
    std::string strategy = "louvain";
    std::uint64_t seed = 42;
    std::string suffix = "gc";
    bool continuity = true;
    std::string weight = "unit";
    double resolution = 1.0;

    CLI::App* attach(CLI::App& app)
    {
        auto* sub = app.add_subcommand("community-enrich",
                                       "Append per-window community metrics to every flow row");
        in.attach(*sub, false);
        sub->add_option("--output", output, "Output table")->required();
        sub->add_option("--window", window, "Window length (e.g. 5m, 30s)")->capture_default_str();
        sub->add_option("--strategy", strategy, "louvain | labelprop")->capture_default_str();
        sub->add_option("--seed", seed, "Partition seed")->capture_default_str();
        sub->add_option("--suffix", suffix, "Suffix for the new columns")->capture_default_str();
        sub->add_option("--continuity", continuity, "Materialize empty windows (true|false)")
            ->capture_default_str();
        sub->add_option("--weight", weight, "Edge weight: unit | pkts | bytes | rate")->capture_default_str();
        sub->add_option("--modularity-resolution", resolution, "Louvain resolution")->capture_default_str();
        return sub;
    }

    int execute() const
    {
        EnrichOptions o;
        o.interval = parse_duration(window);
        o.continuity = continuity;
        o.strategy = parse_strategy(strategy);
        o.seed = seed;
        o.suffix = suffix;
        o.weight = parse_weight_feature(weight);
        o.partition.resolution = resolution;
        if (suffix.empty())
            throw ConfigError("--suffix must not be empty");
        if (!(resolution > 0.0))
            throw ConfigError("--modularity-resolution must be positive");
        const auto s = in.schema();
        if (o.weight != WeightFeature::unit) {
            const auto& col = o.weight == WeightFeature::packets ? s.pkts_column
                              : o.weight == WeightFeature::bytes ? s.bytes_column
                                                                 : s.rate_column;
            if (!col)
                throw SchemaError("--weight " + weight + " needs the matching column mapped");
        }
        s.validate(in.header());
        if (in.dry_run) {
            spdlog::info("dry run: configuration and schema are valid");
            return kExitOk;
        }
        const FlowLog log = in.load(s);
        spdlog::info("community metrics: window {}s, strategy {}, seed {}", o.interval,
                     to_string(o.strategy), o.seed);
        write_output(insert_graph_community_metrics(log, o), output, in.delim());
        return kExitOk;
    }
};

struct SpectralCommand {
    InputOptions in;
    std::string output;
    std::string window = "1m";
    std::size_t devices = 0;
    bool continuity = false;
    std::size_t node_cap = 2000;
    double zero_tolerance = 1e-9;

    CLI::App* attach(CLI::App& app)
    {
        auto* sub = app.add_subcommand("spectral-extract",
                                       "Laplacian spectral features per window (one row per window)");
        in.attach(*sub, true);
        sub->add_option("--output", output, "Output feature table")->required();
        sub->add_option("--window", window, "Window length (e.g. 1m)")->capture_default_str();
        sub->add_option("--devices", devices, "Device count N (default: floor(sqrt(mean nodes)))");
        sub->add_option("--continuity", continuity, "Materialize empty windows (true|false)")
            ->capture_default_str();
        sub->add_option("--node-cap", node_cap, "Skip (flag) windows with more nodes than this")
            ->capture_default_str();
        sub->add_option("--zero-tolerance", zero_tolerance, "Zero-eigenvalue tolerance relative to lambda_max")
            ->capture_default_str();
        return sub;
    }

    int execute() const
    {
        const double interval = parse_duration(window);
        SpectralConfig cfg;
        if (devices > 0)
            cfg.device_count = devices;
        cfg.node_cap = node_cap;
        if (!(zero_tolerance >= 0.0))
            throw ConfigError("--zero-tolerance must be non-negative");
        cfg.zero_tolerance = zero_tolerance;
        const auto s = in.schema();
        require_spectral_columns(s);
        s.validate(in.header());
        if (in.dry_run) {
            spdlog::info("dry run: configuration and schema are valid");
            return kExitOk;
        }
        const FlowLog log = in.load(s);
        const auto features = spectral_metrics_extractor(log.records, interval, cfg, continuity);
        spdlog::info("spectral features: {} windows, N = {}", features.rows.size(), features.device_count);
        write_output(features.to_table(), output, in.delim());
        return kExitOk;
    }
};

struct RenderCommand {
    InputOptions in;
    std::string out = "graph_representation";
    std::string mode = "html";
    std::string color_by = "label";
    std::string title;
    std::string window;
    std::string weight = "unit";
    std::uint64_t seed = 42;

    CLI::App* attach(CLI::App& app)
    {
        auto* sub = app.add_subcommand("render", "Write DOT or self-contained HTML graph renderings");
        in.attach(*sub, false);
        sub->add_option("--out", out, "Output directory")->capture_default_str();
        sub->add_option("--mode", mode, "dot | html")->capture_default_str();
        sub->add_option("--color-by", color_by, "label | community")->capture_default_str();
        sub->add_option("--title", title, "Title and file stem (default: graph)");
        sub->add_option("--window", window, "Render one graph per window of this length");
        sub->add_option("--weight", weight, "Edge weight: unit | pkts | bytes | rate")->capture_default_str();
        sub->add_option("--seed", seed, "Seed for community coloring")->capture_default_str();
        return sub;
    }

    int execute() const
    {
        RenderSpec spec;
        spec.mode = parse_render_mode(mode);
        spec.color_by = parse_color_by(color_by);
        spec.output_dir = out;
        const auto w = parse_weight_feature(weight);
        const double interval = window.empty() ? 0.0 : parse_duration(window);
        const auto s = in.schema();
        s.validate(in.header());
        if (in.dry_run) {
            spdlog::info("dry run: configuration and schema are valid");
            return kExitOk;
        }
        const FlowLog log = in.load(s);
        const std::string stem = title.empty() ? "graph" : title;

        auto emit = [&](const TrafficGraph& g, const std::string& name, const std::string& heading) {
            RenderSpec local = spec;
            local.title = heading;
            std::optional<CommunityPartition> p;
            if (spec.color_by == ColorBy::community)
                p = partition(g, CommunityStrategy::louvain, seed);
            const auto path = write_rendering(g, local, name, p ? &*p : nullptr);
            spdlog::info("wrote {} ({} nodes, {} edges)", path.string(), g.node_count(), g.edge_count());
        };

        if (window.empty()) {
            emit(build_graph(log.records, w), stem, title);
            return kExitOk;
        }
        for (const auto& win : partition_windows(log.records, interval, false))
            emit(build_graph(win, w), stem + "_w" + std::to_string(win.index),
                 (title.empty() ? std::string("window ") : title + " window ") +
                     std::to_string(win.index) + " [" + format_number(win.start) + ", " +
                     format_number(win.end) + ")");
        return kExitOk;
    }
};

} // namespace

int run(int argc, const char* const* argv)
{
    CLI::App app{"flowgraph: graph features from network flow logs"};
    app.name("flowgraph");
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI config file; explicit flags take precedence")
        ->envname(kConfigEnv);
    std::string log_level = "info";
    int threads = 0;
    app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads (default: all cores)");

    TimeseriesCommand timeseries;
    CommunityCommand community;
    SpectralCommand spectral;
    RenderCommand render;
    auto* ts_cmd = timeseries.attach(app);
    auto* gc_cmd = community.attach(app);
    auto* sp_cmd = spectral.attach(app);
    auto* rd_cmd = render.attach(app);

    if (argc <= 1) {
        std::cerr << app.help();
        return kExitConfig;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return kExitConfig;
    }

    try {
        init_logging(log_level);
        if (threads < 0)
            throw ConfigError("--threads must be positive");
        if (threads > 0)
            omp_set_num_threads(threads);

        if (*ts_cmd)
            return timeseries.execute();
        if (*gc_cmd)
            return community.execute();
        if (*sp_cmd)
            return spectral.execute();
        if (*rd_cmd)
            return render.execute();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitConfig;
}

} // namespace flowgraph::cli
