#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace quintel::estimative {

/// Which vocabulary row a phrase belongs to. Likelihood and probability terms
/// express the same seven-band assessment and must not be mixed within one product.
enum class TermRow { likelihood, probability };

std::string_view to_string(TermRow row);

/// One band of the seven-band estimative scale: paired terms plus a percent range.
/// Ranges are half-open [lo, hi) except band 7, which is closed; [0, lo(1)) folds
/// into band 1 and (hi(7), 1] into band 7 so the scale is total on [0, 1].
struct LikelihoodBand {
    int index;  // 1..7
    std::string_view likelihood_term;
    std::string_view probability_term;
    double lo;  // fraction
    double hi;  // fraction

    std::string_view term(TermRow row) const {
        return row == TermRow::likelihood ? likelihood_term : probability_term;
    }
    double midpoint() const { return (lo + hi) / 2.0; }
};

/// The full scale, index order. Exactly 7 bands.
std::span<const LikelihoodBand, 7> scale();

/// Band by index 1..7.
const LikelihoodBand& band(int index);

/// Total map [0,1] -> band. Throws DomainError on non-finite or out-of-range input.
const LikelihoodBand& band_for_probability(double p);

/// Percent range (as fractions) for a vocabulary term. Matching is
/// case-insensitive and accepts parenthesized variants ("probably" matches
/// "Probable (Probably)"). Throws LookupError for unknown terms and
/// CrossRowError when the term lives in the other row.
std::pair<double, double> range_for_term(std::string_view term, TermRow row);

/// Resolves a term to its band and row without committing to a row. Used by the
/// linter; returns nullopt for phrases outside the scale.
struct TermMatch {
    int band_index;
    TermRow row;
};
std::optional<TermMatch> lookup_term(std::string_view term);

/// Source reliability letter (Admiralty scale).
enum class ReliabilityLetter : char { A = 'A', B = 'B', C = 'C', D = 'D', E = 'E', F = 'F' };

/// "Reliable" ... "Cannot Be Judged".
std::string_view reliability_definition(ReliabilityLetter letter);

char to_char(ReliabilityLetter letter);
std::optional<ReliabilityLetter> reliability_from_char(char c);

/// Information content code 1..6 with its definition text.
struct AdmiraltyContent {
    int code;  // 1..6
    std::string_view definition;
};

const AdmiraltyContent& content_code(int code);

enum class Logicality { logical, reasonably_logical, not_logical };
enum class Consistency { consistent, agrees_some, no_other_info, contradicted };

/// Rule cascade over the content table. Total: combinations matching no row,
/// and anything not judgeable, resolve to code 6.
AdmiraltyContent classify_content(bool confirmed_independent, Logicality logicality,
                                  Consistency consistency, bool judgeable);

/// Content code from a numeric probability. The 20-55% span has no code in the
/// source table and maps to 6; edge handling matches band_for_probability.
AdmiraltyContent content_code_for_probability(double p);

/// Analytic confidence level, distinct from the likelihood bands.
enum class ConfidenceLevel { high, moderate, low };

std::string_view to_string(ConfidenceLevel level);

enum class ConfidenceCriterion {
    corroboration,
    source_quality,
    deception_potential,
    assumption_criticality,
    inference_strength,
};

struct CriterionNote {
    ConfidenceCriterion tag;
    std::string_view note;
};

/// The five criteria that distinguish a level, with the wording used for it.
std::span<const CriterionNote, 5> confidence_criteria(ConfidenceLevel level);

enum class LintWarning { mixed_rows, level_plus_likelihood };

std::string_view to_string(LintWarning warning);

/// Style checks on one assertion unit. MIXED_ROWS fires when both rows are
/// present with different band indices; LEVEL_PLUS_LIKELIHOOD when a confidence
/// level sits in the same sentence as any band term. Unresolvable phrases are
/// ignored. Never throws.
std::vector<LintWarning> lint_assertion(std::optional<std::string_view> likelihood_term,
                                        std::optional<std::string_view> probability_term,
                                        std::optional<ConfidenceLevel> confidence_level,
                                        bool co_located);

/// Canonical CSV of the scale: index,likelihood_term,probability_term,lo_percent,hi_percent.
std::string scale_csv();

}  // namespace quintel::estimative
