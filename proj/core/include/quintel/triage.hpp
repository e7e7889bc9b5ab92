#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quintel/fusion.hpp"
#include "quintel/reports.hpp"
#include "quintel/sources.hpp"
#include "quintel/time.hpp"

namespace quintel::triage {

/// Operator-supplied three-level rating for seriousness and action cost.
enum class Rating { low, medium, high };

std::string_view to_string(Rating rating);
std::optional<Rating> rating_from_string(std::string_view text);

/// high 1.0, medium 0.5, low 0.0.
double rating_value(Rating rating);

/// Time-decay relevance of a report: 2^(-age/half_life), hard zero at or past
/// the expiration date. Throws DomainError when now precedes published_at.
double freshness(const reports::ThreatReport& report, Timestamp now, double half_life_seconds);

/// Feature weights for the acquiring-confidence score. Each per-report feature
/// is in [0,1] before weighting; corroboration is in [0,3].
struct ScoringWeights {
    double trusted = 1.0;
    double reliability = 1.0;
    double corroboration = 1.0;
    double vetted_human = 1.0;
    double detail = 1.0;
    double freshness = 1.0;
    double freshness_half_life_seconds = 30.0 * 86400.0;

    void validate() const;
};

/// Weighted sum over the thread's selected independent reports: trusted-source
/// and human-vetting indicators, reliability center mass, detail/3, plus the
/// thread-level corroboration count (distinct sources - 1, capped at 3) and
/// mean freshness. Throws DomainError on an empty thread.
double acquiring_score(const reports::IncidentThread& thread, const reports::ThreadStore& store,
                       const sources::ProfileStore& profiles, Timestamp now,
                       const ScoringWeights& weights);

struct TriageItem {
    std::string incident_id;
    Rating seriousness = Rating::medium;
    Rating action_cost = Rating::medium;
    fusion::QuintileVector fused;
    int fused_quintile = 1;     // argmax readout; 1 (conservative) when annihilated
    double fused_weight = 0.0;  // normalized share of the winning quintile
    bool annihilated = false;   // odds-rule wipeout: fused is all zero
    double acquiring_score = 0.0;
};

struct TriagePolicy {
    enum class Mode { confidence_first, cost_first, weighted };

    Mode mode = Mode::confidence_first;
    // Used only in weighted mode; at least one must be positive.
    double w_seriousness = 0.0;
    double w_confidence = 0.0;
    double w_cost = 0.0;

    static TriagePolicy confidence_first() { return {Mode::confidence_first, 0, 0, 0}; }
    static TriagePolicy cost_first() { return {Mode::cost_first, 0, 0, 0}; }
    static TriagePolicy weighted(double w_seriousness, double w_confidence, double w_cost) {
        return {Mode::weighted, w_seriousness, w_confidence, w_cost};
    }

    void validate() const;
};

std::string_view to_string(TriagePolicy::Mode mode);

/// Deterministic total order under the selected policy; the final tie-break is
/// always incident_id ascending.
std::vector<TriageItem> rank(std::vector<TriageItem> items, const TriagePolicy& policy);

}  // namespace quintel::triage
