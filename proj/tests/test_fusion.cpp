#include <doctest.h>

#include <cmath>
#include <random>

#include "quintel/errors.hpp"
#include "quintel/fusion.hpp"

using namespace quintel;
using namespace quintel::fusion;

namespace {

QuintileVector random_probability_vector(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    QuintileVector v;
    for (int i = 0; i < 5; ++i) v[i] = dist(rng);
    return v;
}

void check_close(const QuintileVector& a, const QuintileVector& b, double tol) {
    for (int i = 0; i < 5; ++i) CHECK(std::abs(a[i] - b[i]) <= tol);
}

}  // namespace

TEST_CASE("spread reproduces the worked reliability rows") {
    check_close(spread(3, 0.80, SpreadPolicy::nearest), {{0.0, 0.10, 0.80, 0.10, 0.0}}, 1e-15);
    check_close(spread(1, 0.80, SpreadPolicy::nearest), {{0.80, 0.20, 0.0, 0.0, 0.0}}, 1e-15);
    check_close(spread(1, 0.80, SpreadPolicy::extremes_wide), {{0.80, 0.10, 0.10, 0.0, 0.0}},
                1e-15);
    // mirror symmetry at the top edge
    check_close(spread(5, 0.80, SpreadPolicy::nearest), {{0.0, 0.0, 0.0, 0.20, 0.80}}, 1e-15);
    check_close(spread(5, 0.80, SpreadPolicy::extremes_wide), {{0.0, 0.0, 0.10, 0.10, 0.80}},
                1e-15);
}

TEST_CASE("spread policies agree on interior quintiles") {
    for (int q : {2, 3, 4}) {
        check_close(spread(q, 0.7, SpreadPolicy::nearest), spread(q, 0.7, SpreadPolicy::extremes_wide),
                    0.0);
    }
}

TEST_CASE("spread validates its domain") {
    CHECK_THROWS_AS(spread(0, 0.8, SpreadPolicy::nearest), DomainError);
    CHECK_THROWS_AS(spread(6, 0.8, SpreadPolicy::nearest), DomainError);
    CHECK_THROWS_AS(spread(3, 0.0, SpreadPolicy::nearest), DomainError);
    CHECK_THROWS_AS(spread(3, 1.0001, SpreadPolicy::nearest), DomainError);
    CHECK_NOTHROW(spread(3, 1.0, SpreadPolicy::nearest));
}

TEST_CASE("spread sums to one with at most three nonzero components") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mass(0.001, 1.0);
    std::uniform_int_distribution<int> quintile(1, 5);
    for (int i = 0; i < 2000; ++i) {
        const auto policy = (i % 2 == 0) ? SpreadPolicy::nearest : SpreadPolicy::extremes_wide;
        const QuintileVector v = spread(quintile(rng), mass(rng), policy);
        CHECK(std::abs(v.sum() - 1.0) <= 1e-9);
        int nonzero = 0;
        for (int k = 0; k < 5; ++k) {
            CHECK(v[k] >= 0.0);
            if (v[k] != 0.0) ++nonzero;
        }
        CHECK(nonzero <= 3);
    }
}

TEST_CASE("noisy-OR reproduces the worked combination cases") {
    const QuintileVector r1{{0.0, 0.10, 0.80, 0.10, 0.0}};
    const QuintileVector r2{{0.80, 0.20, 0.0, 0.0, 0.0}};
    // conflicting pair (the CASE A demo row)
    check_close(combine_noisy_or(r1, r2), {{0.80, 0.28, 0.80, 0.10, 0.0}}, 1e-12);
    // agreeing pair (the CASE B demo row)
    check_close(combine_noisy_or(r1, r1), {{0.0, 0.19, 0.96, 0.19, 0.0}}, 1e-12);
}

TEST_CASE("noisy-OR treats the zero vector as identity") {
    std::mt19937_64 rng(11);
    const QuintileVector zero{};
    for (int i = 0; i < 100; ++i) {
        const QuintileVector a = random_probability_vector(rng);
        check_close(combine_noisy_or(a, zero), a, 1e-15);
    }
}

TEST_CASE("noisy-OR rejects components outside [0,1]") {
    QuintileVector bad{{0.0, 0.5, 1.5, 0.0, 0.0}};
    CHECK_THROWS_AS(combine_noisy_or(bad, QuintileVector{}), DomainError);
    bad[2] = -0.1;
    CHECK_THROWS_AS(combine_noisy_or(QuintileVector{}, bad), DomainError);
}

TEST_CASE("odds multiplication reproduces the worked combination cases") {
    const QuintileVector r1{{0.0, 0.10, 0.80, 0.10, 0.0}};
    const QuintileVector r2{{0.80, 0.20, 0.0, 0.0, 0.0}};

    // agreeing pair concentrates: odds 0.111 and 4.000, products 0.012 and 16.000
    const auto odds = to_odds(r1);
    CHECK(odds[1] == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(odds[2] == doctest::Approx(4.0).epsilon(1e-12));
    const QuintileVector agreeing = combine_odds(r1, r1);
    CHECK(agreeing[1] == doctest::Approx(1.0 / 82.0).epsilon(1e-9));  // 0.0122
    CHECK(agreeing[2] == doctest::Approx(16.0 / 17.0).epsilon(1e-9)); // 0.9412
    CHECK(agreeing[0] == 0.0);
    CHECK(agreeing[4] == 0.0);

    // conflicting pair: disagreement annihilates the asserted cells
    const QuintileVector conflicting = combine_odds(r1, r2);
    CHECK(conflicting[0] == 0.0);
    CHECK(conflicting[1] == doctest::Approx(0.0270270).epsilon(1e-5));
    CHECK(conflicting[2] == 0.0);
    CHECK(conflicting[3] == 0.0);
    CHECK(conflicting[4] == 0.0);
}

TEST_CASE("odds multiplication treats the all-half vector as identity") {
    std::mt19937_64 rng(13);
    const QuintileVector half{{0.5, 0.5, 0.5, 0.5, 0.5}};
    for (int i = 0; i < 100; ++i) {
        const QuintileVector a = random_probability_vector(rng);
        check_close(combine_odds(a, half), a, 1e-9);
    }
}

TEST_CASE("odds multiplication survives components at exactly one") {
    const QuintileVector ones{{1.0, 0.0, 1.0, 0.5, 0.0}};
    const QuintileVector out = combine_odds(ones, ones);
    CHECK(out[0] > 0.999999);
    CHECK(out[0] <= 1.0);
    CHECK(out[1] == 0.0);
    CHECK(std::isfinite(out.sum()));
}

TEST_CASE("combine_all folds pairwise rules") {
    const QuintileVector r1{{0.0, 0.10, 0.80, 0.10, 0.0}};

    const QuintileVector single[] = {r1};
    check_close(combine_all(single, CombinationRule::noisy_or), r1, 0.0);

    // three agreeing reports: center 1 - 0.2^3, neighbors 1 - 0.9^3
    const QuintileVector triple[] = {r1, r1, r1};
    const QuintileVector fused = combine_all(triple, CombinationRule::noisy_or);
    CHECK(fused[2] == doctest::Approx(0.992).epsilon(1e-12));
    CHECK(fused[1] == doctest::Approx(1.0 - 0.9 * 0.9 * 0.9).epsilon(1e-12));

    const QuintileVector r2{{0.80, 0.20, 0.0, 0.0, 0.0}};
    const QuintileVector pair[] = {r1, r2};
    check_close(combine_all(pair, CombinationRule::noisy_or), {{0.80, 0.28, 0.80, 0.10, 0.0}},
                1e-12);

    CHECK_THROWS_AS(combine_all({}, CombinationRule::noisy_or), DomainError);
}

TEST_CASE("argmax readout normalizes and breaks ties low") {
    // Q1 and Q3 tie at 0.80, the lower quintile wins
    const QuintileVector tied{{0.80, 0.28, 0.80, 0.10, 0.0}};
    const Readout a = argmax_quintile(tied);
    CHECK(a.quintile == 1);
    CHECK(a.weight == doctest::Approx(0.80 / 1.98).epsilon(1e-12));

    const QuintileVector peaked{{0.0, 1.0 / 82.0, 16.0 / 17.0, 1.0 / 82.0, 0.0}};
    const Readout c = argmax_quintile(peaked);
    CHECK(c.quintile == 3);
    CHECK(c.weight == doctest::Approx(0.975).epsilon(1e-3));

    CHECK_THROWS_AS(argmax_quintile(QuintileVector{}), DegenerateEvidenceError);
}

TEST_CASE("property: both rules commute to 1e-12") {
    std::mt19937_64 rng(101);
    for (int i = 0; i < 1200; ++i) {
        const QuintileVector a = random_probability_vector(rng);
        const QuintileVector b = random_probability_vector(rng);
        check_close(combine_noisy_or(a, b), combine_noisy_or(b, a), 1e-12);
        check_close(combine_odds(a, b), combine_odds(b, a), 1e-12);
    }
}

TEST_CASE("property: both rules associate to 1e-9") {
    std::mt19937_64 rng(102);
    for (int i = 0; i < 1200; ++i) {
        const QuintileVector a = random_probability_vector(rng);
        const QuintileVector b = random_probability_vector(rng);
        const QuintileVector c = random_probability_vector(rng);
        for (auto rule : {CombinationRule::noisy_or, CombinationRule::odds_product}) {
            const QuintileVector left = combine(combine(a, b, rule), c, rule);
            const QuintileVector right = combine(a, combine(b, c, rule), rule);
            check_close(left, right, 1e-9);
        }
    }
}

TEST_CASE("property: noisy-OR grows monotonically") {
    std::mt19937_64 rng(103);
    for (int i = 0; i < 1200; ++i) {
        const QuintileVector a = random_probability_vector(rng);
        const QuintileVector b = random_probability_vector(rng);
        const QuintileVector out = combine_noisy_or(a, b);
        for (int k = 0; k < 5; ++k) CHECK(out[k] >= std::max(a[k], b[k]) - 1e-15);
    }
}

TEST_CASE("property: odds annihilate zero cells") {
    std::mt19937_64 rng(104);
    std::uniform_int_distribution<int> cell(0, 4);
    for (int i = 0; i < 1200; ++i) {
        QuintileVector a = random_probability_vector(rng);
        const QuintileVector b = random_probability_vector(rng);
        const int k = cell(rng);
        a[k] = 0.0;
        CHECK(combine_odds(a, b)[k] == 0.0);
        CHECK(combine_odds(b, a)[k] == 0.0);
    }
}

TEST_CASE("oracle: noisy-OR matches independent-event simulation for 2..4 inputs") {
    // Cheap in-suite twin of the acceptance Monte-Carlo criterion.
    constexpr int kSamples = 200'000;
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> dist(0.0, 1.0);

    for (int n = 2; n <= 4; ++n) {
        std::vector<double> p(static_cast<std::size_t>(n));
        for (double& x : p) x = dist(rng);

        std::vector<QuintileVector> inputs(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) inputs[static_cast<std::size_t>(i)][0] = p[static_cast<std::size_t>(i)];
        const double fused = combine_all(inputs, CombinationRule::noisy_or)[0];

        double analytic = 1.0;
        for (double x : p) analytic *= 1.0 - x;
        analytic = 1.0 - analytic;
        CHECK(fused == doctest::Approx(analytic).epsilon(1e-12));

        int hits = 0;
        for (int s = 0; s < kSamples; ++s) {
            bool any = false;
            for (double x : p) any = any || dist(rng) < x;
            hits += any ? 1 : 0;
        }
        const double estimate = static_cast<double>(hits) / kSamples;
        const double sigma = std::sqrt(analytic * (1.0 - analytic) / kSamples);
        CHECK(std::abs(estimate - fused) <= 3.0 * sigma);
    }
}

TEST_CASE("property: odds self-agreement concentrates the winner") {
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> mass(0.4, 0.99);
    std::uniform_int_distribution<int> quintile(1, 5);
    for (int i = 0; i < 1200; ++i) {
        const auto policy = (i % 2 == 0) ? SpreadPolicy::nearest : SpreadPolicy::extremes_wide;
        const QuintileVector v = spread(quintile(rng), mass(rng), policy);
        const Readout before = argmax_quintile(v);
        const Readout after = argmax_quintile(combine_odds(v, v));
        CHECK(after.quintile == before.quintile);
        CHECK(after.weight > before.weight);
    }
}
