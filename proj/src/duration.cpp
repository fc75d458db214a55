#include "flowgraph/duration.hpp"

#include "flowgraph/errors.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace flowgraph {

double parse_duration(std::string_view text)
{
    const std::string original(text);
    while (!text.empty() && text.front() == ' ')
        text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ')
        text.remove_suffix(1);

    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr == text.data())
        throw ConfigError("invalid duration '" + original + "'");

    std::string_view unit(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr));
    double scale = 0.0;
    if (unit.empty() || unit == "s" || unit == "sec")
        scale = 1.0;
    else if (unit == "ms")
        scale = 1e-3;
    else if (unit == "us")
        scale = 1e-6;
    else if (unit == "m" || unit == "min")
        scale = 60.0;
    else if (unit == "h")
        scale = 3600.0;
    else if (unit == "d")
        scale = 86400.0;
    else
        throw ConfigError("unknown duration unit in '" + original + "'");

    const double seconds = value * scale;
    if (!std::isfinite(seconds) || seconds <= 0.0)
        throw ConfigError("duration must be positive: '" + original + "'");
    return seconds;
}

} // namespace flowgraph
