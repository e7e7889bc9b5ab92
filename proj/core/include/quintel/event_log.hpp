#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quintel/time.hpp"

namespace quintel::app {

enum class EventKind { report, feedback, trusted_list_reload };

std::string_view to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view text);

/// One line of the append-only JSONL log. Full state is a pure fold over these.
struct EventLogEntry {
    std::uint64_t seq = 0;  // strictly 1,2,3,... with no gaps
    Timestamp at{};
    EventKind kind = EventKind::report;
    std::string payload;  // serialized wire object
};

std::string serialize_event(const EventLogEntry& entry);
EventLogEntry parse_event(std::string_view line);

/// Reads and validates a whole log. Throws CorruptLogError (with the offending
/// seq) on a gap or regression.
std::vector<EventLogEntry> read_event_log(std::istream& in);
std::vector<EventLogEntry> read_event_log_file(const std::string& path);  // absent file -> empty

/// Append-only writer. The sequence continues from whatever the file already
/// holds.
class EventLogWriter {
public:
    explicit EventLogWriter(std::string path);

    std::uint64_t next_seq() const { return next_seq_; }

    /// Appends one entry and flushes. Returns the assigned seq.
    std::uint64_t append(EventKind kind, Timestamp at, std::string payload);

private:
    std::string path_;
    std::uint64_t next_seq_ = 1;
};

}  // namespace quintel::app
