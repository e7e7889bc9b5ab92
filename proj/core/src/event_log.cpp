#include "quintel/event_log.hpp"

#include <fstream>
#include <istream>

#include <nlohmann/json.hpp>

#include "quintel/errors.hpp"

namespace quintel::app {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

}  // namespace

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::report: return "report";
        case EventKind::feedback: return "feedback";
        default: return "trusted_list_reload";
    }
}

std::optional<EventKind> event_kind_from_string(std::string_view text) {
    if (text == "report") return EventKind::report;
    if (text == "feedback") return EventKind::feedback;
    if (text == "trusted_list_reload") return EventKind::trusted_list_reload;
    return std::nullopt;
}

std::string serialize_event(const EventLogEntry& entry) {
    ordered_json obj;
    obj["seq"] = entry.seq;
    obj["at"] = format_rfc3339(entry.at);
    obj["kind"] = std::string(to_string(entry.kind));
    obj["payload"] = json::parse(entry.payload);
    return obj.dump();
}

EventLogEntry parse_event(std::string_view line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed event log line: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("seq") || !obj.contains("at") ||
        !obj.contains("kind") || !obj.contains("payload"))
        throw ValidationError("event log line must carry seq, at, kind, payload");
    if (!obj["seq"].is_number_unsigned()) throw ValidationError("event seq must be an unsigned integer");

    EventLogEntry entry;
    entry.seq = obj["seq"].get<std::uint64_t>();
    const auto at = try_parse_rfc3339(obj["at"].get<std::string>());
    if (!at) throw ValidationError("event at is not an RFC 3339 timestamp");
    entry.at = *at;
    const auto kind = event_kind_from_string(obj["kind"].get<std::string>());
    if (!kind) throw ValidationError("event kind must be report|feedback|trusted_list_reload");
    entry.kind = *kind;
    entry.payload = obj["payload"].dump();
    return entry;
}

std::vector<EventLogEntry> read_event_log(std::istream& in) {
    std::vector<EventLogEntry> entries;
    std::string line;
    std::uint64_t expected = 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        EventLogEntry entry = parse_event(line);
        if (entry.seq != expected)
            throw CorruptLogError("event log corrupt: expected seq " + std::to_string(expected) +
                                      ", found " + std::to_string(entry.seq),
                                  entry.seq);
        ++expected;
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::vector<EventLogEntry> read_event_log_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    return read_event_log(in);
}

EventLogWriter::EventLogWriter(std::string path) : path_(std::move(path)) {
    const auto existing = read_event_log_file(path_);
    next_seq_ = existing.size() + 1;
}

std::uint64_t EventLogWriter::append(EventKind kind, Timestamp at, std::string payload) {
    EventLogEntry entry{next_seq_, at, kind, std::move(payload)};
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot open event log \"" + path_ + "\" for append");
    out << serialize_event(entry) << '\n';
    out.flush();
    if (!out) throw Error("failed writing event log \"" + path_ + "\"");
    return next_seq_++;
}

}  // namespace quintel::app
