#pragma once

namespace flowgraph::cli {

/// Exit codes: 0 success, 1 configuration or schema error, 2 data error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;

/// Environment variable naming a default config file.
inline constexpr const char* kConfigEnv = "FLOWGRAPH_CONFIG";

int run(int argc, const char* const* argv);

} // namespace flowgraph::cli
