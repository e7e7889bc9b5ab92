#include "quintel/estimative.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>

#include "quintel/errors.hpp"

namespace quintel::estimative {
namespace {

constexpr std::array<LikelihoodBand, 7> kScale = {{
    {1, "Almost No Chance", "Remote", 0.01, 0.05},
    {2, "Very Unlikely", "Highly Improbable", 0.05, 0.20},
    {3, "Unlikely", "Improbable (Improbably)", 0.20, 0.45},
    {4, "Roughly Even Chance", "Roughly Even Odds", 0.45, 0.55},
    {5, "Likely", "Probable (Probably)", 0.55, 0.80},
    {6, "Very Likely", "Highly Probable", 0.80, 0.95},
    {7, "Almost Certain(ly)", "Nearly Certain", 0.95, 0.99},
}};

std::string normalize(std::string_view term) {
    std::string out;
    out.reserve(term.size());
    bool pending_space = false;
    for (char c : term) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

// "Probable (Probably)" -> {"probable (probably)", "probable", "probably"};
// "Almost Certain(ly)"  -> {"almost certain(ly)", "almost certain", "almost certainly"}.
std::vector<std::string> variants(std::string_view term) {
    const std::string norm = normalize(term);
    std::vector<std::string> out = {norm};
    const auto open = norm.find('(');
    const auto close = norm.find(')', open == std::string::npos ? 0 : open);
    if (open == std::string::npos || close == std::string::npos || close < open) return out;

    std::string inner = norm.substr(open + 1, close - open - 1);
    std::string before = norm.substr(0, open);
    std::string after = norm.substr(close + 1);
    const bool attached = !before.empty() && before.back() != ' ';

    std::string stripped = before;
    while (!stripped.empty() && stripped.back() == ' ') stripped.pop_back();
    std::string stripped_full = stripped + after;
    if (!stripped_full.empty()) out.push_back(stripped_full);

    // Attached parenthetical is a suffix alternative; detached one is a standalone synonym.
    std::string expanded = attached ? before + inner + after : inner;
    if (!expanded.empty()) out.push_back(expanded);
    return out;
}

const std::map<std::string, TermMatch, std::less<>>& term_index() {
    static const std::map<std::string, TermMatch, std::less<>> index = [] {
        std::map<std::string, TermMatch, std::less<>> m;
        for (const auto& b : kScale) {
            for (const auto& v : variants(b.likelihood_term))
                m.emplace(v, TermMatch{b.index, TermRow::likelihood});
            for (const auto& v : variants(b.probability_term))
                m.emplace(v, TermMatch{b.index, TermRow::probability});
        }
        return m;
    }();
    return index;
}

constexpr std::array<std::string_view, 6> kReliabilityDefs = {
    "Reliable", "Usually Reliable", "Fairly Reliable", "Not Usually Reliable", "Unreliable",
    "Cannot Be Judged"};

constexpr std::array<AdmiraltyContent, 6> kContentCodes = {{
    {1, "Confirmed"},
    {2, "Probably True"},
    {3, "Possibly True"},
    {4, "Doubtfully True"},
    {5, "Improbable"},
    {6, "Cannot Be Judged"},
}};

constexpr std::array<CriterionNote, 5> kHighCriteria = {{
    {ConfidenceCriterion::corroboration, "well-corroborated information"},
    {ConfidenceCriterion::source_quality, "reliable sources"},
    {ConfidenceCriterion::deception_potential, "low potential for deception"},
    {ConfidenceCriterion::assumption_criticality, "assumptions not critical"},
    {ConfidenceCriterion::inference_strength, "strong logical inferences"},
}};

constexpr std::array<CriterionNote, 5> kModerateCriteria = {{
    {ConfidenceCriterion::corroboration, "partially corroborated information"},
    {ConfidenceCriterion::source_quality, "good sources"},
    {ConfidenceCriterion::deception_potential, "moderate potential for deception"},
    {ConfidenceCriterion::assumption_criticality, "assumptions potentially critical"},
    {ConfidenceCriterion::inference_strength, "mix of strong and weak inferences"},
}};

constexpr std::array<CriterionNote, 5> kLowCriteria = {{
    {ConfidenceCriterion::corroboration, "uncorroborated information"},
    {ConfidenceCriterion::source_quality, "marginal sources"},
    {ConfidenceCriterion::deception_potential, "high potential for deception"},
    {ConfidenceCriterion::assumption_criticality, "key assumptions critical"},
    {ConfidenceCriterion::inference_strength, "weak inferences"},
}};

}  // namespace

std::string_view to_string(TermRow row) {
    return row == TermRow::likelihood ? "likelihood" : "probability";
}

std::span<const LikelihoodBand, 7> scale() { return kScale; }

const LikelihoodBand& band(int index) {
    if (index < 1 || index > 7) throw DomainError("band index out of range 1..7");
    return kScale[static_cast<std::size_t>(index - 1)];
}

const LikelihoodBand& band_for_probability(double p) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0)
        throw DomainError("probability must be a finite number in [0,1]");
    for (const auto& b : kScale) {
        if (p < b.hi) return b;  // lower edge extension falls into band 1
    }
    return kScale.back();  // covers [0.95, 1]
}

std::optional<TermMatch> lookup_term(std::string_view term) {
    const auto& index = term_index();
    for (const auto& v : variants(term)) {
        if (auto it = index.find(v); it != index.end()) return it->second;
    }
    return std::nullopt;
}

std::pair<double, double> range_for_term(std::string_view term, TermRow row) {
    const auto match = lookup_term(term);
    if (!match)
        throw LookupError("unknown " + std::string(to_string(row)) + " term: \"" +
                          std::string(term) + "\"");
    if (match->row != row)
        throw CrossRowError("term \"" + std::string(term) + "\" belongs to the " +
                            std::string(to_string(match->row)) + " row, not " +
                            std::string(to_string(row)));
    const auto& b = band(match->band_index);
    return {b.lo, b.hi};
}

std::string_view reliability_definition(ReliabilityLetter letter) {
    return kReliabilityDefs[static_cast<std::size_t>(to_char(letter) - 'A')];
}

char to_char(ReliabilityLetter letter) { return static_cast<char>(letter); }

std::optional<ReliabilityLetter> reliability_from_char(char c) {
    if (c >= 'a' && c <= 'f') c = static_cast<char>(c - 'a' + 'A');
    if (c < 'A' || c > 'F') return std::nullopt;
    return static_cast<ReliabilityLetter>(c);
}

const AdmiraltyContent& content_code(int code) {
    if (code < 1 || code > 6) throw DomainError("content code out of range 1..6");
    return kContentCodes[static_cast<std::size_t>(code - 1)];
}

AdmiraltyContent classify_content(bool confirmed_independent, Logicality logicality,
                                  Consistency consistency, bool judgeable) {
    if (!judgeable) return content_code(6);
    if (confirmed_independent && logicality == Logicality::logical &&
        consistency == Consistency::consistent)
        return content_code(1);
    if (!confirmed_independent && logicality == Logicality::logical &&
        consistency == Consistency::consistent)
        return content_code(2);
    if (!confirmed_independent && logicality == Logicality::reasonably_logical &&
        consistency == Consistency::agrees_some)
        return content_code(3);
    if (!confirmed_independent && logicality == Logicality::not_logical &&
        consistency == Consistency::no_other_info)
        return content_code(4);
    if (!confirmed_independent && logicality == Logicality::not_logical &&
        consistency == Consistency::contradicted)
        return content_code(5);
    return content_code(6);  // the table is not a total truth table
}

AdmiraltyContent content_code_for_probability(double p) {
    const auto& b = band_for_probability(p);
    switch (b.index) {
        case 1: return content_code(5);
        case 2: return content_code(4);
        case 5: return content_code(3);
        case 6: return content_code(2);
        case 7: return content_code(1);
        default: return content_code(6);  // 20-55%: blank in the source table
    }
}

std::string_view to_string(ConfidenceLevel level) {
    switch (level) {
        case ConfidenceLevel::high: return "high";
        case ConfidenceLevel::moderate: return "moderate";
        default: return "low";
    }
}

std::span<const CriterionNote, 5> confidence_criteria(ConfidenceLevel level) {
    switch (level) {
        case ConfidenceLevel::high: return kHighCriteria;
        case ConfidenceLevel::moderate: return kModerateCriteria;
        default: return kLowCriteria;
    }
}

std::string_view to_string(LintWarning warning) {
    return warning == LintWarning::mixed_rows ? "MIXED_ROWS" : "LEVEL_PLUS_LIKELIHOOD";
}

std::vector<LintWarning> lint_assertion(std::optional<std::string_view> likelihood_term,
                                        std::optional<std::string_view> probability_term,
                                        std::optional<ConfidenceLevel> confidence_level,
                                        bool co_located) {
    std::vector<LintWarning> warnings;

    std::optional<TermMatch> lk, pr;
    if (likelihood_term) {
        lk = lookup_term(*likelihood_term);
        if (lk && lk->row != TermRow::likelihood) lk.reset();
    }
    if (probability_term) {
        pr = lookup_term(*probability_term);
        if (pr && pr->row != TermRow::probability) pr.reset();
    }

    if (lk && pr && lk->band_index != pr->band_index)
        warnings.push_back(LintWarning::mixed_rows);
    if (confidence_level && co_located && (lk || pr))
        warnings.push_back(LintWarning::level_plus_likelihood);
    return warnings;
}

std::string scale_csv() {
    std::string out = "index,likelihood_term,probability_term,lo_percent,hi_percent\n";
    for (const auto& b : kScale) {
        out += std::to_string(b.index);
        out += ',';
        out += b.likelihood_term;
        out += ',';
        out += b.probability_term;
        out += ',';
        out += std::to_string(static_cast<int>(std::lround(b.lo * 100)));
        out += ',';
        out += std::to_string(static_cast<int>(std::lround(b.hi * 100)));
        out += '\n';
    }
    return out;
}

}  // namespace quintel::estimative
