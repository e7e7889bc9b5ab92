#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "quintel/estimative.hpp"
#include "quintel/fusion.hpp"
#include "quintel/time.hpp"

namespace quintel::sources {

using estimative::ReliabilityLetter;

enum class Outcome { confirmed, refuted };

std::string_view to_string(Outcome outcome);

/// Accuracy cutoffs for grading a source from outcome history. The letter
/// definitions are qualitative; only F (no history) is pinned, so the numeric
/// scheme is configuration, not doctrine.
struct ReliabilityThresholds {
    std::int64_t min_history = 5;  // below this the source stays F
    double grade_a = 0.95;
    double grade_b = 0.80;
    double grade_c = 0.60;
    double grade_d = 0.40;

    void validate() const;
};

/// Letter from resolved outcome counts. n = confirmed + refuted; n below the
/// minimum yields F, otherwise the accuracy confirmed/n is graded A..E.
ReliabilityLetter letter_from_history(std::int64_t confirmed, std::int64_t refuted,
                                      const ReliabilityThresholds& thresholds = {});

/// Center mass a letter contributes when spreading an assertion:
/// A 0.80 (the top tier), descending 0.10 per grade to E 0.40. F is 0.20.
double center_mass(ReliabilityLetter letter);

/// Evidence vector for "quintile k asserted by a source at this letter".
/// F carries no information and yields the uniform vector regardless of k;
/// every other letter spreads its center mass under the given policy.
fusion::QuintileVector reliability_vector(int quintile, ReliabilityLetter letter,
                                          fusion::SpreadPolicy policy);

struct SourceProfile {
    std::string source_id;
    bool trusted = false;  // membership on the local trusted list
    std::int64_t confirmed = 0;
    std::int64_t refuted = 0;
    std::int64_t unresolved = 0;  // ingested reports with no outcome yet
    ReliabilityLetter letter = ReliabilityLetter::F;
    Timestamp updated_at{};
};

/// Per-source trust and outcome history. One logical writer; reads are
/// snapshots. Each report accepts at most one outcome: later feedback for the
/// same report replaces the earlier one and adjusts the counts.
class ProfileStore {
public:
    ProfileStore() = default;
    explicit ProfileStore(ReliabilityThresholds thresholds) : thresholds_(thresholds) {
        thresholds_.validate();
    }

    /// Registers an ingested report for its source (creates the profile on
    /// first sight and bumps the unresolved count).
    void note_report(const std::string& source_id, const std::string& report_id, Timestamp at);

    /// Applies outcome feedback for a report. Throws ReferenceError when the
    /// report was never noted.
    SourceProfile record_feedback(const std::string& report_id, Outcome outcome, Timestamp at);

    /// Replaces the trusted set wholesale.
    void set_trusted(const std::vector<std::string>& source_ids);

    /// Trusted-list membership, independent of whether a profile exists yet.
    bool is_trusted(const std::string& source_id) const { return trusted_.contains(source_id); }

    const SourceProfile* find(const std::string& source_id) const;
    /// Throws LookupError for unknown sources.
    const SourceProfile& profile(const std::string& source_id) const;

    std::vector<SourceProfile> all() const;  // sorted by source_id

    /// CSV export: source_id,trusted,confirmed,refuted,letter.
    std::string csv() const;

    const ReliabilityThresholds& thresholds() const { return thresholds_; }

private:
    ReliabilityThresholds thresholds_{};
    std::map<std::string, SourceProfile> profiles_;
    std::set<std::string> trusted_;
    // report_id -> (source_id, outcome); presence means the report has a resolved outcome
    std::map<std::string, std::pair<std::string, Outcome>> outcomes_;
    std::map<std::string, std::string> report_source_;
};

/// Trusted list file format: one source_id per line, blank lines ignored.
std::vector<std::string> parse_trusted_list(std::string_view text);

}  // namespace quintel::sources
