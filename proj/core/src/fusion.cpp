#include "quintel/fusion.hpp"

#include <cmath>

#include "quintel/errors.hpp"

namespace quintel::fusion {
namespace {

constexpr double kOddsEpsilon = 1e-9;

void require_probabilities(const QuintileVector& v, const char* what) {
    for (double x : v.q) {
        if (!std::isfinite(x) || x < 0.0 || x > 1.0)
            throw DomainError(std::string(what) + " requires components in [0,1]");
    }
}

double cell_odds(double p) {
    if (p <= 0.0) return 0.0;
    if (p > 1.0 - kOddsEpsilon) p = 1.0 - kOddsEpsilon;
    return p / (1.0 - p);
}

}  // namespace

std::string_view to_string(SpreadPolicy policy) {
    return policy == SpreadPolicy::nearest ? "nearest" : "extremes-wide";
}

std::string_view to_string(CombinationRule rule) {
    return rule == CombinationRule::noisy_or ? "noisy-or" : "odds";
}

QuintileVector spread(int quintile, double center_mass, SpreadPolicy policy) {
    if (quintile < 1 || quintile > 5) throw DomainError("quintile must be 1..5");
    if (!std::isfinite(center_mass) || center_mass <= 0.0 || center_mass > 1.0)
        throw DomainError("center mass must be in (0,1]");

    QuintileVector v;
    const int k = quintile - 1;
    const double rest = 1.0 - center_mass;
    v[k] = center_mass;
    if (k > 0 && k < 4) {
        v[k - 1] = rest / 2.0;
        v[k + 1] = rest / 2.0;
    } else if (policy == SpreadPolicy::nearest) {
        v[k == 0 ? 1 : 3] = rest;
    } else {
        const int step = k == 0 ? 1 : -1;
        v[k + step] = rest / 2.0;
        v[k + 2 * step] = rest / 2.0;
    }
    return v;
}

QuintileVector combine_noisy_or(const QuintileVector& a, const QuintileVector& b) {
    require_probabilities(a, "noisy-OR");
    require_probabilities(b, "noisy-OR");
    QuintileVector out;
    for (int i = 0; i < 5; ++i) out[i] = 1.0 - (1.0 - a[i]) * (1.0 - b[i]);
    return out;
}

QuintileVector combine_odds(const QuintileVector& a, const QuintileVector& b) {
    require_probabilities(a, "odds multiplication");
    require_probabilities(b, "odds multiplication");
    QuintileVector out;
    for (int i = 0; i < 5; ++i) {
        const double o = cell_odds(a[i]) * cell_odds(b[i]);
        out[i] = o / (1.0 + o);
    }
    return out;
}

QuintileVector combine(const QuintileVector& a, const QuintileVector& b, CombinationRule rule) {
    return rule == CombinationRule::noisy_or ? combine_noisy_or(a, b) : combine_odds(a, b);
}

QuintileVector combine_all(std::span<const QuintileVector> vectors, CombinationRule rule) {
    if (vectors.empty()) throw DomainError("cannot combine an empty list of vectors");
    QuintileVector acc = vectors.front();
    for (std::size_t i = 1; i < vectors.size(); ++i) acc = combine(acc, vectors[i], rule);
    return acc;
}

Readout argmax_quintile(const QuintileVector& v) {
    if (v.all_zero())
        throw DegenerateEvidenceError("evidence annihilated: all quintile masses are zero");
    int best = 0;
    for (int i = 1; i < 5; ++i) {
        if (v[i] > v[best]) best = i;
    }
    return Readout{best + 1, v[best] / v.sum()};
}

std::array<double, 5> to_odds(const QuintileVector& v) {
    require_probabilities(v, "odds conversion");
    std::array<double, 5> out{};
    for (int i = 0; i < 5; ++i) out[static_cast<std::size_t>(i)] = cell_odds(v[i]);
    return out;
}

}  // namespace quintel::fusion
