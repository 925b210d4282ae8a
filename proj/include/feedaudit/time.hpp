#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace feedaudit {

// Timestamps are integer nanoseconds since the Unix epoch, UTC.
using TimeNs = std::int64_t;

inline constexpr TimeNs kNsPerSecond = 1'000'000'000;

// Simulation clocks run in seconds; rounds to the nearest nanosecond.
TimeNs ns_from_seconds(double seconds);

// "YYYY-MM-DDTHH:MM:SS[.fraction]Z", UTC only. The fraction, when present,
// is 1..9 digits. Throws std::invalid_argument on anything else.
TimeNs parse_rfc3339(std::string_view text);

// Canonical form: fraction omitted when zero, otherwise printed with
// trailing zeros trimmed. parse_rfc3339(format_rfc3339(t)) == t.
std::string format_rfc3339(TimeNs t);

}  // namespace feedaudit
