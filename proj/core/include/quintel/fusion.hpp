#pragma once

#include <array>
#include <span>
#include <string_view>

namespace quintel::fusion {

/// Where the non-center mass of an edge assertion (Q1/Q5) goes.
enum class SpreadPolicy { nearest, extremes_wide };

enum class CombinationRule { noisy_or, odds_product };

std::string_view to_string(SpreadPolicy policy);
std::string_view to_string(CombinationRule rule);

/// Belief masses over the five probability quintiles Q1=[0-20%] .. Q5=[81-100%].
/// A freshly spread vector sums to 1; combined vectors are unnormalized score
/// vectors compared by relative size.
struct QuintileVector {
    std::array<double, 5> q{};

    static QuintileVector uniform() { return {{0.2, 0.2, 0.2, 0.2, 0.2}}; }

    double operator[](int i) const { return q[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return q[static_cast<std::size_t>(i)]; }

    double sum() const { return q[0] + q[1] + q[2] + q[3] + q[4]; }
    bool all_zero() const { return q[0] == 0 && q[1] == 0 && q[2] == 0 && q[3] == 0 && q[4] == 0; }

    friend bool operator==(const QuintileVector&, const QuintileVector&) = default;
};

/// Decision readout: the winning quintile and its share of the vector sum.
struct Readout {
    int quintile;   // 1..5, ties broken toward the lower quintile
    double weight;  // component / sum, in (0, 1]
};

/// Distributes a point assertion "confidence is in Qk" over the quintiles.
/// The center keeps center_mass; the remainder splits evenly between the two
/// neighbors. At the edges the whole remainder goes to the single neighbor
/// (nearest) or splits over the two nearest interior quintiles (extremes_wide).
/// Throws DomainError unless quintile is 1..5 and center_mass is in (0, 1].
QuintileVector spread(int quintile, double center_mass, SpreadPolicy policy);

/// Componentwise p = 1 - (1-pa)(1-pb). Inputs must be probabilities in [0,1].
QuintileVector combine_noisy_or(const QuintileVector& a, const QuintileVector& b);

/// Componentwise odds multiplication: odds are p/(1-p) with p clamped to
/// 1 - 1e-9, multiplied, and converted back via p = o/(1+o). A zero component
/// in either input annihilates that cell.
QuintileVector combine_odds(const QuintileVector& a, const QuintileVector& b);

QuintileVector combine(const QuintileVector& a, const QuintileVector& b, CombinationRule rule);

/// Left fold of the pairwise rule. Throws DomainError on an empty list.
QuintileVector combine_all(std::span<const QuintileVector> vectors, CombinationRule rule);

/// Lowest-index maximal component and its normalized share. Throws
/// DegenerateEvidenceError on the all-zero vector (odds-rule annihilation).
Readout argmax_quintile(const QuintileVector& v);

/// Per-cell odds p/(1-p) with the same clamping as combine_odds. Exposed for
/// the worked-table renderer.
std::array<double, 5> to_odds(const QuintileVector& v);

}  // namespace quintel::fusion
