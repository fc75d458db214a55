#pragma once

#include <string_view>

namespace flowgraph {

/// Parse a duration such as "5m", "30s", "1.5h", "250ms" or a bare number of
/// seconds. Result is in seconds and strictly positive; throws ConfigError.
double parse_duration(std::string_view text);

} // namespace flowgraph
