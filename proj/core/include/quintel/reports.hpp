#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "quintel/estimative.hpp"
#include "quintel/fusion.hpp"
#include "quintel/sources.hpp"
#include "quintel/time.hpp"

namespace quintel::reports {

enum class ProvenanceKind { initiating, descendant };

/// Either "a new unique event" (initiating, carries the incident id) or "an
/// additional report about a known event" (descendant, names its parent report).
struct Provenance {
    ProvenanceKind kind;
    std::string ref;  // incident_id for initiating, parent_report_id for descendant

    static Provenance initiating(std::string incident_id) {
        return {ProvenanceKind::initiating, std::move(incident_id)};
    }
    static Provenance descendant(std::string parent_report_id) {
        return {ProvenanceKind::descendant, std::move(parent_report_id)};
    }
};

enum class Vetting { human, machine, both, unknown };

std::string_view to_string(Vetting vetting);
std::optional<Vetting> vetting_from_string(std::string_view text);

/// A scale term plus the row it was written in; validated against the scale.
struct BandTermAssertion {
    std::string term;
    estimative::TermRow row;

    friend bool operator==(const BandTermAssertion&, const BandTermAssertion&) = default;
};

struct ProbabilityAssertion {
    double p;

    friend bool operator==(const ProbabilityAssertion&, const ProbabilityAssertion&) = default;
};

struct QuintileAssertion {
    int quintile;  // 1..5

    friend bool operator==(const QuintileAssertion&, const QuintileAssertion&) = default;
};

using Assertion = std::variant<BandTermAssertion, ProbabilityAssertion, QuintileAssertion>;

/// Quintile containing a probability: Q1=[0,0.2], then right-closed fifths, so
/// 0.80 lands in Q4 and Q5 covers (0.8,1].
int quintile_of(double p);

/// Quintile readout of any assertion kind; band terms map via their range midpoint.
int assertion_quintile(const Assertion& assertion);

/// Band readout: terms use their own band; numeric probabilities map through
/// the scale; quintile assertions have none.
std::optional<int> assertion_band(const Assertion& assertion);

struct ThreatReport {
    std::string report_id;
    Provenance provenance{ProvenanceKind::initiating, {}};
    std::string source_id;
    Timestamp observed_at{};
    Timestamp published_at{};
    std::optional<Timestamp> expires_at;
    Assertion assertion{QuintileAssertion{3}};
    std::optional<estimative::ReliabilityLetter> asserted_reliability;
    Vetting vetting = Vetting::unknown;
    int detail_score = 0;  // 0..3
    std::string body;
    // Operator-supplied incident metadata; meaningful on initiating reports.
    std::optional<std::string> seriousness;   // "low" | "medium" | "high"
    std::optional<std::string> action_cost;   // "low" | "medium" | "high"
};

struct ParsedReport {
    ThreatReport report;
    int unknown_fields = 0;  // tolerated, counted
};

/// Parses one wire-format JSON object. Errors name the offending field and the
/// report_id when one is available.
ParsedReport parse_report(std::string_view json_object);

/// Canonical single-line JSON for the wire format; parse(serialize(r)) == r.
std::string serialize_report(const ThreatReport& report);

struct IncidentThread {
    std::string incident_id;
    std::vector<std::string> initiating;
    std::vector<std::string> descendants;
    std::set<std::string> distinct_sources;

    bool empty() const { return initiating.empty() && descendants.empty(); }
};

/// Threads reports into incidents. Descendants with an unthreaded parent are
/// quarantined (held, retried after each successful attach), never dropped.
class ThreadStore {
public:
    enum class AddResult { accepted, quarantined };

    /// Stores and threads a report; drains the quarantine on success.
    /// Throws ValidationError on duplicate report ids.
    AddResult add(ThreatReport report);

    /// Threading primitive: attaches an already-stored report, throwing
    /// QuarantineError when the parent is unknown.
    const IncidentThread& assign(const std::string& report_id);

    const ThreatReport& report(const std::string& report_id) const;
    bool has_report(const std::string& report_id) const;
    const IncidentThread& thread(const std::string& incident_id) const;
    const IncidentThread* find_thread(const std::string& incident_id) const;
    /// Incident the report landed in, empty while quarantined.
    std::optional<std::string> incident_of(const std::string& report_id) const;

    std::vector<std::string> incident_ids() const;          // sorted
    std::vector<std::string> quarantined_ids() const;       // sorted
    std::size_t quarantine_size() const { return quarantine_.size(); }
    std::size_t report_count() const { return reports_.size(); }

private:
    bool try_attach(const std::string& report_id);

    std::map<std::string, ThreatReport> reports_;
    std::map<std::string, IncidentThread> threads_;
    std::map<std::string, std::string> report_incident_;
    std::set<std::string> quarantine_;
};

/// One selected report per distinct source: the independence unit used by fusion.
struct Evidence {
    std::string source_id;
    std::string report_id;
    int quintile;
    estimative::ReliabilityLetter letter;
    double center_mass;
    bool corroborating;  // selected report is a descendant from a new source
    fusion::QuintileVector vector;
};

/// Per-source earliest-published selection with echo suppression: additional
/// reports from a source that already contributes change nothing. The letter is
/// the recipient's profile grade when history exists, else the report's own
/// asserted letter, else F (uniform). Ordered by source_id. Throws DomainError
/// on an empty thread.
std::vector<Evidence> independent_evidence(const IncidentThread& thread, const ThreadStore& store,
                                           const sources::ProfileStore& profiles,
                                           fusion::SpreadPolicy policy);

/// Just the spread vectors, in the same order.
std::vector<fusion::QuintileVector> independent_vectors(const IncidentThread& thread,
                                                        const ThreadStore& store,
                                                        const sources::ProfileStore& profiles,
                                                        fusion::SpreadPolicy policy);

}  // namespace quintel::reports
