#include "flowgraph/cli.hpp"
#include "flowgraph/table.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace flowgraph;
using namespace flowgraph::cli;

namespace {

struct Scratch {
    fs::path dir;
    Scratch() : dir(fs::temp_directory_path() / "flowgraph_cli_test")
    {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }

    std::string write(const std::string& name, const std::string& text) const
    {
        std::ofstream(dir / name, std::ios::binary) << text;
        return (dir / name).string();
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(std::initializer_list<std::string> args)
{
    std::vector<std::string> owned{"flowgraph"};
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : owned)
        argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

const char* kLog = "stime,saddr,daddr,pkts,bytes,rate,category\n"
                   "0.0,a,b,2,100,1.5,Normal\n"
                   "0.4,a,b,3,200,2.5,Normal\n"
                   "1.2,a,c,1,50,0.5,Normal\n"
                   "2.0,b,c,4,400,4,DDoS\n"
                   "2.5,c,d,1,10,1,DDoS\n"
                   "61.0,a,b,1,10,1,Normal\n";

} // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes")
{
    Scratch s;
    const auto in = s.write("flows.csv", kLog);
    CHECK(run_cli({}) == kExitConfig);
    CHECK(run_cli({"--help"}) == kExitOk);
    CHECK(run_cli({"spectral-extract", "--input", in}) == kExitConfig);
    CHECK(run_cli({"spectral-extract", "--input", in, "--output", s.path("o.csv"), "--window", "-3s"}) ==
          kExitConfig);
    CHECK(run_cli({"community-enrich", "--input", in, "--output", s.path("o.csv"), "--strategy", "magic"}) ==
          kExitConfig);
    CHECK(run_cli({"spectral-extract", "--input", s.path("missing.csv"), "--output", s.path("o.csv")}) ==
          kExitData);

    const auto no_label = s.write("nolabel.csv", "stime,saddr,daddr,pkts,bytes,rate\n0,a,b,1,1,1\n");
    CHECK(run_cli({"spectral-extract", "--input", no_label, "--output", s.path("o.csv")}) == kExitConfig);

    const auto bad = s.write("bad.csv", "stime,saddr,daddr,pkts,bytes,rate,category\n0,a,b,x,1,1,Normal\n");
    CHECK(run_cli({"spectral-extract", "--input", bad, "--output", s.path("o.csv")}) == kExitData);
    CHECK(run_cli({"spectral-extract", "--input", bad, "--output", s.path("o.csv"), "--lenient"}) == kExitOk);

    const auto unsorted = s.write("unsorted.csv", "stime,saddr,daddr,pkts,bytes,rate,category\n"
                                                  "5,a,b,1,1,1,Normal\n1,a,c,1,1,1,Normal\n");
    CHECK(run_cli({"community-enrich", "--input", unsorted, "--output", s.path("o.csv")}) == kExitData);
    CHECK(run_cli({"community-enrich", "--input", unsorted, "--output", s.path("o.csv"), "--sort-input"}) ==
          kExitOk);
}

TEST_CASE("dry run validates without writing")
{
    Scratch s;
    const auto in = s.write("flows.csv", kLog);
    CHECK(run_cli({"spectral-extract", "--input", in, "--output", s.path("o.csv"), "--dry-run"}) == kExitOk);
    CHECK_FALSE(fs::exists(s.path("o.csv")));
    CHECK(run_cli({"spectral-extract", "--input", in, "--output", s.path("o.csv"), "--dry-run", "--src",
                   "nope"}) == kExitConfig);
}

TEST_CASE("config file, environment and flag precedence")
{
    Scratch s;
    const auto in = s.write("flows.csv", kLog);
    const auto cfg = s.write("run.toml", "[community-enrich]\nsuffix = \"cfg\"\nwindow = \"30s\"\n");

    CHECK(run_cli({"--config", cfg, "community-enrich", "--input", in, "--output", s.path("a.csv")}) ==
          kExitOk);
    auto t = read_table(s.path("a.csv"));
    CHECK(t.find("window_cfg").has_value());
    CHECK(t.rows.back()[*t.find("window_cfg")] == "2");

    CHECK(run_cli({"--config", cfg, "community-enrich", "--input", in, "--output", s.path("b.csv"), "--suffix",
                   "flag"}) == kExitOk);
    t = read_table(s.path("b.csv"));
    CHECK(t.find("window_flag").has_value());
    CHECK_FALSE(t.find("window_cfg").has_value());

    ::setenv(kConfigEnv, cfg.c_str(), 1);
    const int env_code = run_cli({"community-enrich", "--input", in, "--output", s.path("c.csv")});
    ::unsetenv(kConfigEnv);
    CHECK(env_code == kExitOk);
    CHECK(read_table(s.path("c.csv")).find("window_cfg").has_value());
}

TEST_CASE("timeseries command")
{
    Scratch s;
    const auto in = s.write("flows.csv", kLog);
    REQUIRE(run_cli({"timeseries", "--input", in, "--output", s.path("ts.csv"), "--resolution", "1s",
                     "--group-by", "stime,saddr", "--agg", "pkts=sum", "--agg", "rate=max"}) == kExitOk);
    const auto t = read_table(s.path("ts.csv"));
    CHECK(t.columns == std::vector<std::string>{"stime", "saddr", "pkts", "rate"});
    REQUIRE(t.rows.size() == 5);
    CHECK(t.rows[0] == std::vector<std::string>{"0", "a", "5", "2.5"});
    CHECK(t.rows[1] == std::vector<std::string>{"1", "a", "1", "0.5"});
    CHECK(t.rows[2] == std::vector<std::string>{"2", "b", "4", "4"});
    CHECK(t.rows[3] == std::vector<std::string>{"2", "c", "1", "1"});
    CHECK(t.rows[4] == std::vector<std::string>{"61", "a", "1", "1"});

    CHECK(run_cli({"timeseries", "--input", in, "--output", s.path("x.csv"), "--group-by", "saddr"}) ==
          kExitConfig);
    CHECK(run_cli({"timeseries", "--input", in, "--output", s.path("x.csv"), "--agg", "category=sum"}) ==
          kExitConfig);
}

TEST_CASE("reruns are byte-identical")
{
    Scratch s;
    const auto in = s.write("flows.csv", kLog);
    for (const char* cmd : {"spectral-extract", "community-enrich"}) {
        REQUIRE(run_cli({cmd, "--input", in, "--output", s.path("1.csv"), "--window", "1m"}) == kExitOk);
        REQUIRE(run_cli({"--threads", "1", cmd, "--input", in, "--output", s.path("2.csv"), "--window", "1m"}) ==
                kExitOk);
        CHECK(slurp(s.path("1.csv")) == slurp(s.path("2.csv")));
    }
}

TEST_CASE("render writes one file per window")
{
    Scratch s;
    const auto in = s.write("flows.csv", kLog);
    REQUIRE(run_cli({"render", "--input", in, "--out", s.path("viz"), "--mode", "dot", "--title", "trace",
                     "--window", "1m"}) == kExitOk);
    CHECK(fs::exists(s.path("viz/trace_w0.dot")));
    CHECK(fs::exists(s.path("viz/trace_w1.dot")));
    REQUIRE(run_cli({"render", "--input", in, "--out", s.path("viz"), "--color-by", "community"}) == kExitOk);
    CHECK(fs::exists(s.path("viz/graph.html")));
}

}
