#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qwalk/errors.hpp"
#include "qwalk/observables.hpp"
#include "qwalk/randomness.hpp"
#include "qwalk/rng.hpp"

using namespace qwalk;

namespace {

ProbabilityDistribution dist_on(int n_max, std::vector<std::pair<int, double>> spikes,
                                int time = 0) {
    ProbabilityDistribution dist;
    dist.time = time;
    dist.values.assign(static_cast<std::size_t>(2 * n_max + 1), 0.0);
    for (auto [x, p] : spikes) dist.values[static_cast<std::size_t>(x + n_max)] = p;
    return dist;
}

// smooth bump of half-width w centered at x0
void add_bump(ProbabilityDistribution& dist, int x0, double height, int w) {
    const int n_max = dist.half_width();
    for (int x = -n_max; x <= n_max; ++x) {
        const double u = static_cast<double>(x - x0) / w;
        dist.values[static_cast<std::size_t>(x + n_max)] += height * std::exp(-u * u);
    }
}

}  // namespace

TEST_CASE("probability_distribution basics") {
    const WalkerState s0 = initial_state(5);
    const ProbabilityDistribution d0 = probability_distribution(s0);
    CHECK(d0.at(0) == doctest::Approx(1.0));
    double sum = 0.0;
    for (double v : d0.values) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    const WalkerState s1 = step(s0, {kPi / 4.0, kHalfPi, kHalfPi}, Shift::forward);
    const ProbabilityDistribution d1 = probability_distribution(s1, 1);
    CHECK(d1.at(1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d1.at(-1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("probability_distribution ignores a global phase") {
    SplitMix64 rng(5);
    WalkerState s = initial_state(4);
    const double phase = 1.234;
    const Complex rot(std::cos(phase), std::sin(phase));
    WalkerState rotated = s;
    for (auto& a : rotated.plus) a *= rot;
    for (auto& a : rotated.minus) a *= rot;
    const auto d1 = probability_distribution(s);
    const auto d2 = probability_distribution(rotated);
    for (std::size_t i = 0; i < d1.values.size(); ++i) {
        CHECK(d1.values[i] == doctest::Approx(d2.values[i]).epsilon(1e-14));
    }
}

TEST_CASE("moment of inertia worked examples") {
    CHECK(moment_of_inertia(dist_on(10, {{0, 1.0}}), 10) == 0.0);
    CHECK(moment_of_inertia(dist_on(10, {{1, 1.0}}), 10) == doctest::Approx(81.0));
    const double third = 1.0 / 3.0;
    CHECK(moment_of_inertia(dist_on(3, {{1, third}, {2, third}, {3, third}}), 3) ==
          doctest::Approx(5.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(moment_of_inertia(dist_on(3, {}), 5), InvalidParameterError);
}

TEST_CASE("MoI of mirror spikes decreases as they move out") {
    const int n = 20;
    double previous = std::numeric_limits<double>::infinity();
    for (int x0 = 1; x0 < n; ++x0) {
        const ProbabilityDistribution dist = dist_on(n, {{-x0, 0.5}, {x0, 0.5}});
        const double moi = moment_of_inertia(dist, n);
        CHECK(moi == doctest::Approx(0.5 * (n - x0) * (n - x0)).epsilon(1e-14));
        CHECK(moi < previous);
        previous = moi;
    }
}

TEST_CASE("ipr worked examples") {
    WalkerState s = initial_state(4);
    // one occupied site, arbitrary weight
    s.plus_at(0) = Complex(0.3, 0.4);
    s.minus_at(0) = Complex(0, 0);
    CHECK(ipr(s) == doctest::Approx(1.0).epsilon(1e-12));

    // uniform |+> over M sites
    const int m = 7;
    WalkerState u = initial_state(10);
    u.plus.assign(u.plus.size(), Complex(0, 0));
    u.minus.assign(u.minus.size(), Complex(0, 0));
    for (int x = 0; x < m; ++x) u.plus_at(x - 3) = Complex(0.2, 0.1);
    CHECK(ipr(u) == doctest::Approx(static_cast<double>(m)).epsilon(1e-12));

    // |psi_+|^2 = (0.5, 0.5)
    WalkerState two = initial_state(3);
    two.plus.assign(two.plus.size(), Complex(0, 0));
    two.minus.assign(two.minus.size(), Complex(0, 0));
    two.plus_at(0) = Complex(std::sqrt(0.5), 0);
    two.plus_at(1) = Complex(0, std::sqrt(0.5));
    CHECK(ipr(two) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("ipr errors on an all-zero plus component and supports the P(x) variant") {
    WalkerState s = initial_state(3);
    s.plus.assign(s.plus.size(), Complex(0, 0));
    s.minus_at(0) = Complex(1, 0);
    CHECK_THROWS_AS(ipr(s), DegenerateStateError);
    CHECK(ipr(s, IprVariant::FullDistribution) == doctest::Approx(1.0));
}

TEST_CASE("ipr bounds hold for random states") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        WalkerState s = initial_state(12);
        int occupied = 0;
        for (int x = -12; x <= 12; ++x) {
            if (rng.bernoulli(0.4)) {
                s.plus_at(x) = Complex(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
                if (std::norm(s.plus_at(x)) > 0.0) ++occupied;
            } else {
                s.plus_at(x) = Complex(0, 0);
            }
        }
        if (occupied == 0) continue;
        const double v = ipr(s);
        CHECK(v >= 1.0 - 1e-12);
        CHECK(v <= static_cast<double>(occupied) + 1e-9);
    }
}

TEST_CASE("classify_peaks: delta spike is a single peak at the origin") {
    const PeakStructure p = classify_peaks(dist_on(50, {{0, 1.0}}, 100));
    CHECK(p.label == PeakLabel::SinglePeak);
    REQUIRE(p.peak_positions.size() == 1);
    CHECK(p.peak_positions[0] == 0);
}

TEST_CASE("classify_peaks: synthetic shapes") {
    // two symmetric outer bumps
    ProbabilityDistribution two = dist_on(200, {}, 200);
    add_bump(two, -160, 1.0, 8);
    add_bump(two, 160, 0.95, 8);
    CHECK(classify_peaks(two).label == PeakLabel::TwoPeak);

    // central bump plus two outer ones (the three-peak transition shape)
    ProbabilityDistribution three = dist_on(200, {}, 200);
    add_bump(three, -150, 0.8, 8);
    add_bump(three, 150, 0.8, 8);
    add_bump(three, 0, 1.0, 10);
    CHECK(classify_peaks(three).label == PeakLabel::FlatOrThreePeak);

    // lopsided pair is not a two-peak structure
    ProbabilityDistribution skew = dist_on(200, {}, 200);
    add_bump(skew, -60, 1.0, 8);
    add_bump(skew, 170, 0.9, 8);
    CHECK(classify_peaks(skew).label == PeakLabel::FlatOrThreePeak);
}

TEST_CASE("classify_peaks is invariant under rescaling") {
    ProbabilityDistribution dist = dist_on(150, {}, 150);
    add_bump(dist, -120, 0.7, 6);
    add_bump(dist, 120, 0.8, 6);
    const PeakStructure before = classify_peaks(dist);
    for (double& v : dist.values) v *= 7.25;
    const PeakStructure after = classify_peaks(dist);
    CHECK(before.label == after.label);
    CHECK(before.peak_positions == after.peak_positions);
}

TEST_CASE("classify_peaks on real walks: ballistic vs localized") {
    // no randomness: the familiar two ballistic fronts
    const WalkConfig free_cfg{400, 400, kPi / 6.0, kHalfPi, kHalfPi, 42};
    const EvolutionRecord free_walk = evolve(free_cfg, NoRandomness{}, false);
    CHECK(classify_peaks(free_walk.final_distribution()).label == PeakLabel::TwoPeak);

    // strong random translation: pinned near the origin
    const WalkConfig loc_cfg{300, 300, kPi / 6.0, kHalfPi, kHalfPi, 42};
    const EvolutionRecord locked = evolve(loc_cfg, RandomTranslation{0.2}, false);
    CHECK(classify_peaks(locked.final_distribution()).label == PeakLabel::SinglePeak);
}
