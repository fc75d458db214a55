// Writes the bundled synthetic flow trace: ten one-minute windows of
// background traffic among an office subnet, a packet flood from five
// external hosts against every internal host in window 5, and a horizontal
// port scan in window 8.
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

namespace {

struct Flow {
    double t;
    std::string src, dst;
    int sport, dport;
    long pkts, bytes;
    double rate;
    const char* label;
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }
    long between(long lo, long hi) { return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

std::string host(const char* prefix, int i) { return std::string(prefix) + std::to_string(i); }

} // namespace

int main(int argc, char** argv)
{
    const char* path = argc > 1 ? argv[1] : "sample_flows.csv";
    constexpr double kBase = 1500000000.0; // a multiple of 60
    constexpr int kWindows = 10;
    constexpr int kClients = 30;
    constexpr int kServers = 5;
    constexpr int kServerPorts[kServers] = {53, 80, 443, 445, 993};

    Rng rng(20241016);
    std::vector<Flow> flows;

    for (int w = 0; w < kWindows; ++w) {
        for (int k = 0; k < 420; ++k) {
            Flow f;
            f.t = kBase + 60.0 * w + 60.0 * rng.unit();
            const int client = static_cast<int>(rng.below(kClients)) + 1;
            f.src = host("10.0.0.", client);
            f.sport = static_cast<int>(rng.between(1024, 65535));
            if (rng.below(10) < 7) {
                const int s = static_cast<int>(rng.below(kServers));
                f.dst = host("10.0.1.", s + 1);
                f.dport = kServerPorts[s];
            } else {
                int peer = static_cast<int>(rng.below(kClients)) + 1;
                if (peer == client)
                    peer = peer % kClients + 1;
                f.dst = host("10.0.0.", peer);
                f.dport = static_cast<int>(rng.between(1024, 65535));
            }
            f.pkts = rng.between(1, 20);
            f.bytes = f.pkts * rng.between(60, 1500);
            f.rate = static_cast<double>(f.pkts) / (0.05 + 2.0 * rng.unit());
            f.label = "Normal";
            flows.push_back(f);
        }
    }

    // flood: window 5
    for (int a = 1; a <= 5; ++a)
        for (int c = 1; c <= kClients; ++c)
            for (int k = 0; k < 3; ++k) {
                Flow f;
                f.t = kBase + 300.0 + 60.0 * rng.unit();
                f.src = host("203.0.113.", a);
                f.dst = host("10.0.0.", c);
                f.sport = static_cast<int>(rng.between(1024, 65535));
                f.dport = 80;
                f.pkts = rng.between(300, 500);
                f.bytes = f.pkts * 64;
                f.rate = static_cast<double>(f.pkts) / (0.01 + 0.05 * rng.unit());
                f.label = "DDoS";
                flows.push_back(f);
            }

    // scan: window 8
    for (int i = 1; i <= 254; ++i) {
        Flow f;
        f.t = kBase + 480.0 + 55.0 * (i - 1) / 254.0 + rng.unit() * 0.1;
        f.src = "198.51.100.7";
        f.dst = host("10.0.2.", i);
        f.sport = 40000;
        f.dport = 22;
        f.pkts = rng.between(1, 2);
        f.bytes = f.pkts * 60;
        f.rate = static_cast<double>(f.pkts) / 0.001;
        f.label = "Scan";
        flows.push_back(f);
    }

    std::stable_sort(flows.begin(), flows.end(), [](const Flow& a, const Flow& b) { return a.t < b.t; });

    std::FILE* out = std::fopen(path, "w");
    if (!out) {
        std::perror(path);
        return 1;
    }
    std::fprintf(out, "stime,saddr,daddr,sport,dport,pkts,bytes,rate,category\n");
    for (const auto& f : flows)
        std::fprintf(out, "%.3f,%s,%s,%d,%d,%ld,%ld,%.3f,%s\n", f.t, f.src.c_str(), f.dst.c_str(),
                     f.sport, f.dport, f.pkts, f.bytes, f.rate, f.label);
    std::fclose(out);
    return 0;
}
