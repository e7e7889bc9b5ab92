#include "quintel/triage.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "quintel/errors.hpp"

namespace quintel::triage {

std::string_view to_string(Rating rating) {
    switch (rating) {
        case Rating::low: return "low";
        case Rating::medium: return "medium";
        default: return "high";
    }
}

std::optional<Rating> rating_from_string(std::string_view text) {
    if (text == "low") return Rating::low;
    if (text == "medium") return Rating::medium;
    if (text == "high") return Rating::high;
    return std::nullopt;
}

double rating_value(Rating rating) {
    switch (rating) {
        case Rating::low: return 0.0;
        case Rating::medium: return 0.5;
        default: return 1.0;
    }
}

double freshness(const reports::ThreatReport& report, Timestamp now, double half_life_seconds) {
    if (now < report.published_at)
        throw DomainError("freshness evaluated before the report was published");
    if (!std::isfinite(half_life_seconds) || half_life_seconds <= 0.0)
        throw DomainError("freshness half-life must be positive");
    if (report.expires_at && now >= *report.expires_at) return 0.0;
    const double age = report.published_at.seconds_until(now);
    return std::exp2(-age / half_life_seconds);
}

void ScoringWeights::validate() const {
    const double all[] = {trusted, reliability, corroboration, vetted_human, detail, freshness};
    for (double w : all) {
        if (!std::isfinite(w) || w < 0.0)
            throw DomainError("scoring weights must be finite and >= 0");
    }
    if (!std::isfinite(freshness_half_life_seconds) || freshness_half_life_seconds <= 0.0)
        throw DomainError("freshness half-life must be positive");
}

double acquiring_score(const reports::IncidentThread& thread, const reports::ThreadStore& store,
                       const sources::ProfileStore& profiles, Timestamp now,
                       const ScoringWeights& w) {
    w.validate();
    // Scoring features don't depend on how mass is spread, only on which
    // reports are selected and at which letter.
    const auto evidence =
        reports::independent_evidence(thread, store, profiles, fusion::SpreadPolicy::nearest);

    double score = 0.0;
    double freshness_sum = 0.0;
    for (const auto& ev : evidence) {
        const reports::ThreatReport& r = store.report(ev.report_id);
        if (profiles.is_trusted(ev.source_id)) score += w.trusted;
        score += w.reliability * ev.center_mass;
        if (r.vetting == reports::Vetting::human || r.vetting == reports::Vetting::both)
            score += w.vetted_human;
        score += w.detail * (static_cast<double>(r.detail_score) / 3.0);
        freshness_sum += freshness(r, now, w.freshness_half_life_seconds);
    }

    const double corroborating =
        std::min<double>(3.0, static_cast<double>(evidence.size()) - 1.0);
    score += w.corroboration * corroborating;
    score += w.freshness * (freshness_sum / static_cast<double>(evidence.size()));
    return score;
}

void TriagePolicy::validate() const {
    if (mode != Mode::weighted) return;
    const double all[] = {w_seriousness, w_confidence, w_cost};
    for (double w : all) {
        if (!std::isfinite(w) || w < 0.0)
            throw DomainError("triage policy weights must be finite and >= 0");
    }
    if (w_seriousness <= 0.0 && w_confidence <= 0.0 && w_cost <= 0.0)
        throw DomainError("weighted triage policy needs at least one positive weight");
}

std::string_view to_string(TriagePolicy::Mode mode) {
    switch (mode) {
        case TriagePolicy::Mode::confidence_first: return "confidence-first";
        case TriagePolicy::Mode::cost_first: return "cost-first";
        default: return "weighted";
    }
}

std::vector<TriageItem> rank(std::vector<TriageItem> items, const TriagePolicy& policy) {
    policy.validate();
    switch (policy.mode) {
        case TriagePolicy::Mode::confidence_first:
            std::sort(items.begin(), items.end(), [](const TriageItem& a, const TriageItem& b) {
                return std::make_tuple(-rating_value(a.seriousness), -a.fused_quintile,
                                       -a.acquiring_score, std::cref(a.incident_id)) <
                       std::make_tuple(-rating_value(b.seriousness), -b.fused_quintile,
                                       -b.acquiring_score, std::cref(b.incident_id));
            });
            break;
        case TriagePolicy::Mode::cost_first:
            std::sort(items.begin(), items.end(), [](const TriageItem& a, const TriageItem& b) {
                return std::make_tuple(-rating_value(a.seriousness), rating_value(a.action_cost),
                                       -a.fused_quintile, std::cref(a.incident_id)) <
                       std::make_tuple(-rating_value(b.seriousness), rating_value(b.action_cost),
                                       -b.fused_quintile, std::cref(b.incident_id));
            });
            break;
        case TriagePolicy::Mode::weighted: {
            auto weighted_score = [&policy](const TriageItem& item) {
                const double confidence = (item.fused_quintile - 1) / 4.0;
                return policy.w_seriousness * rating_value(item.seriousness) +
                       policy.w_confidence * confidence +
                       policy.w_cost * (1.0 - rating_value(item.action_cost));
            };
            std::sort(items.begin(), items.end(),
                      [&](const TriageItem& a, const TriageItem& b) {
                          const double sa = weighted_score(a), sb = weighted_score(b);
                          if (sa != sb) return sa > sb;
                          return a.incident_id < b.incident_id;
                      });
            break;
        }
    }
    return items;
}

}  // namespace quintel::triage
