#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace quintel {

/// UTC instant, microseconds since the Unix epoch. Wire form is RFC 3339.
struct Timestamp {
    std::int64_t micros = 0;

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;

    double seconds_until(Timestamp later) const {
        return static_cast<double>(later.micros - micros) / 1e6;
    }
};

/// Parses "YYYY-MM-DDTHH:MM:SS[.frac](Z|±hh:mm)" into UTC. Returns nullopt on malformed input.
std::optional<Timestamp> try_parse_rfc3339(std::string_view text);

/// Canonical UTC rendering: seconds precision, ".ffffff" appended only when sub-second.
std::string format_rfc3339(Timestamp ts);

}  // namespace quintel
