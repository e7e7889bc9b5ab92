#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "quintel/config.hpp"
#include "quintel/event_log.hpp"
#include "quintel/fusion.hpp"
#include "quintel/reports.hpp"
#include "quintel/sources.hpp"
#include "quintel/time.hpp"
#include "quintel/triage.hpp"

namespace quintel::app {

struct IngestSummary {
    int accepted = 0;     // threaded by batch end
    int quarantined = 0;  // still held at batch end
    int rejected = 0;     // parse or validation failures
    int unknown_fields = 0;
    std::vector<std::string> errors;  // one message per rejected record
};

struct FusionResult {
    std::string incident_id;
    fusion::CombinationRule rule = fusion::CombinationRule::noisy_or;
    std::vector<reports::Evidence> evidence;
    fusion::QuintileVector fused;
    // Odds-rule wipeout: every quintile the evidence asserted fused to zero
    // (includes the all-zero vector). Noisy-OR can never produce this.
    bool annihilated = false;
    int quintile = 0;  // argmax readout, valid when not annihilated
    double weight = 0.0;

    std::string render_text() const;
    std::string to_json() const;
};

struct TriageResult {
    std::vector<triage::TriageItem> items;  // rank order

    std::string jsonl() const;
    std::string table() const;
};

/// Event-sourced application core shared by the CLI and the HTTP service.
/// State is a pure fold over the append-only log; one logical writer.
class Engine {
public:
    using Clock = std::function<Timestamp()>;

    /// Opens (creating if needed) the configured event log and folds it.
    explicit Engine(Config config, Clock clock = system_clock);

    /// Folds an arbitrary log into a fresh read-only state (no writer): the
    /// `replay` verification path. Write operations throw.
    static Engine replay_log(Config config, const std::string& log_path);

    IngestSummary ingest(std::istream& in);
    IngestSummary ingest_file(const std::string& path);

    FusionResult fuse_incident(const std::string& incident_id,
                               std::optional<fusion::CombinationRule> rule = std::nullopt) const;

    TriageResult triage(Timestamp now,
                        std::optional<triage::TriagePolicy> policy = std::nullopt) const;

    sources::SourceProfile feedback(const std::string& report_id, sources::Outcome outcome,
                                    std::optional<Timestamp> at = std::nullopt);

    /// Re-reads the trusted list file and logs the new membership (the log
    /// carries the list itself so replay never depends on the file).
    std::size_t reload_trusted();

    std::string sources_csv() const { return profiles_.csv(); }
    const sources::SourceProfile& source(const std::string& source_id) const {
        return profiles_.profile(source_id);
    }

    /// Synthetic incident contrasting fusion with and without provenance
    /// labels: n_sources independent assertions plus n_duplicates echoes of the
    /// first source.
    std::string simulate_echo(int n_sources, int n_duplicates,
                              fusion::CombinationRule rule) const;

    const Config& config() const { return config_; }
    const reports::ThreadStore& store() const { return store_; }
    const sources::ProfileStore& profiles() const { return profiles_; }
    std::uint64_t event_count() const { return event_count_; }

    static Timestamp system_clock();

private:
    Engine(Config config, Clock clock, bool open_writer);

    void fold(const std::vector<EventLogEntry>& entries);
    void apply_report(const reports::ThreatReport& report, Timestamp at);
    void apply_feedback_payload(const std::string& payload);
    void apply_trusted_payload(const std::string& payload);
    EventLogWriter& writer();

    Config config_;
    Clock clock_;
    reports::ThreadStore store_;
    sources::ProfileStore profiles_;
    std::unique_ptr<EventLogWriter> writer_;
    std::uint64_t event_count_ = 0;
};

}  // namespace quintel::app
