#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace hpcpm {

/// Observation time, UTC, second resolution.
using Timestamp = std::chrono::sys_seconds;

/// "2022-12-07T11:51:45Z"
std::string format_iso8601(Timestamp t);

/// "20221207T115145Z", as used in replay file names.
std::string format_iso8601_basic(Timestamp t);

/// Accepts both the extended and the basic form; the trailing 'Z' is required.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// Humanized duration: 45 -> "45s", 300 -> "5m0s", 3725 -> "1h2m5s".
/// Fractional input is rounded to the nearest second.
std::string humanize_seconds(double seconds);

}  // namespace hpcpm
