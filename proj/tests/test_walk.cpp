#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "qwalk/errors.hpp"
#include "qwalk/randomness.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/walk.hpp"

using namespace qwalk;

namespace {

double max_abs(const CoinMatrix& m) {
    return std::max({std::abs(m.a00), std::abs(m.a01), std::abs(m.a10), std::abs(m.a11)});
}

// C^dagger C - I, max entry magnitude.
double unitarity_defect(const CoinMatrix& m) {
    const Complex c00 = std::conj(m.a00) * m.a00 + std::conj(m.a10) * m.a10 - 1.0;
    const Complex c01 = std::conj(m.a00) * m.a01 + std::conj(m.a10) * m.a11;
    const Complex c10 = std::conj(m.a01) * m.a00 + std::conj(m.a11) * m.a10;
    const Complex c11 = std::conj(m.a01) * m.a01 + std::conj(m.a11) * m.a11 - 1.0;
    return max_abs(CoinMatrix{c00, c01, c10, c11});
}

WalkerState random_state(int n_max, SplitMix64& rng) {
    WalkerState s = initial_state(n_max);
    for (int x = -n_max + 1; x < n_max; ++x) {
        s.plus_at(x) = Complex(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
        s.minus_at(x) = Complex(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
    }
    const double scale = 1.0 / std::sqrt(s.norm_sq());
    for (auto& a : s.plus) a *= scale;
    for (auto& a : s.minus) a *= scale;
    return s;
}

}  // namespace

TEST_CASE("coin matrix special angles") {
    const double hp = kHalfPi;
    {
        const CoinMatrix m = coin_matrix({0.0, hp, hp});
        CHECK(std::abs(m.a00 - Complex(1, 0)) < 1e-15);
        CHECK(std::abs(m.a01) < 1e-15);
        CHECK(std::abs(m.a10) < 1e-15);
        CHECK(std::abs(m.a11 - Complex(1, 0)) < 1e-15);
    }
    {
        const CoinMatrix m = coin_matrix({hp, hp, hp});
        CHECK(std::abs(m.a00) < 1e-15);
        CHECK(std::abs(m.a01 - Complex(0, 1)) < 1e-15);
        CHECK(std::abs(m.a10 - Complex(0, 1)) < 1e-15);
        CHECK(std::abs(m.a11) < 1e-15);
    }
    {
        const double r = 1.0 / std::sqrt(2.0);
        const CoinMatrix m = coin_matrix({kPi / 4.0, hp, hp});
        CHECK(std::abs(m.a00 - Complex(r, 0)) < 1e-15);
        CHECK(std::abs(m.a01 - Complex(0, r)) < 1e-15);
        CHECK(std::abs(m.a10 - Complex(0, r)) < 1e-15);
        CHECK(std::abs(m.a11 - Complex(r, 0)) < 1e-15);
    }
}

TEST_CASE("coin matrix rejects non-finite parameters") {
    CHECK_THROWS_AS(coin_matrix({std::nan(""), kHalfPi, kHalfPi}), InvalidParameterError);
    CHECK_THROWS_AS(coin_matrix({0.1, INFINITY, kHalfPi}), InvalidParameterError);
}

TEST_CASE("coin unitarity for 1000 random angles") {
    SplitMix64 rng(2024);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double theta = rng.uniform01() * 2.0 * kPi;
        worst = std::max(worst, unitarity_defect(coin_matrix({theta, kHalfPi, kHalfPi})));
    }
    CHECK(worst < 1e-13);
    // random phases as well
    for (int i = 0; i < 200; ++i) {
        const double theta = rng.uniform01() * 2.0 * kPi;
        const double p1 = rng.uniform01() * 2.0 * kPi;
        const double p2 = rng.uniform01() * 2.0 * kPi;
        CHECK(unitarity_defect(coin_matrix({theta, p1, p2})) < 1e-13);
    }
}

TEST_CASE("initial state") {
    const WalkerState s = initial_state(5);
    CHECK(s.num_sites() == 11);
    CHECK(s.norm_sq() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::norm(s.plus_at(0)) + std::norm(s.minus_at(0)) == doctest::Approx(1.0));
    const WalkerState tiny = initial_state(1);
    CHECK(tiny.plus[0] == Complex(0, 0));
    CHECK(tiny.plus[1] == Complex(1.0 / std::sqrt(2.0), 0));
    CHECK(tiny.plus[2] == Complex(0, 0));
    CHECK_THROWS_AS(initial_state(0), InvalidConfigError);
}

TEST_CASE("apply_coin: identity at theta = 0 and the hand-computed pi/4 case") {
    const WalkerState s0 = initial_state(4);
    const WalkerState id = apply_coin(s0, {0.0, kHalfPi, kHalfPi});
    for (std::size_t i = 0; i < s0.plus.size(); ++i) {
        CHECK(std::abs(id.plus[i] - s0.plus[i]) < 1e-15);
        CHECK(std::abs(id.minus[i] - s0.minus[i]) < 1e-15);
    }

    const WalkerState s1 = apply_coin(s0, {kPi / 4.0, kHalfPi, kHalfPi});
    CHECK(std::abs(s1.plus_at(0) - Complex(0.5, 0.5)) < 1e-15);
    CHECK(std::abs(s1.minus_at(0) - Complex(0.5, 0.5)) < 1e-15);
    CHECK(s1.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("apply_coin preserves the norm of random states") {
    SplitMix64 rng(7);
    for (int i = 0; i < 20; ++i) {
        WalkerState s = random_state(6, rng);
        const double theta = rng.uniform01() * 2.0 * kPi;
        const WalkerState after = apply_coin(s, {theta, kHalfPi, kHalfPi});
        CHECK(std::abs(after.norm_sq() - 1.0) < 1e-12);
    }
}

TEST_CASE("translation moves |+> right and |-> left") {
    WalkerState s = initial_state(3);
    s.minus_at(0) = Complex(0, 0);
    s.plus_at(0) = Complex(1, 0);
    const WalkerState fwd = apply_translation(s, Shift::forward);
    CHECK(fwd.plus_at(1) == Complex(1, 0));
    CHECK(fwd.plus_at(0) == Complex(0, 0));

    WalkerState m = initial_state(3);
    m.plus_at(0) = Complex(0, 0);
    m.minus_at(0) = Complex(1, 0);
    const WalkerState back = apply_translation(m, Shift::forward);
    CHECK(back.minus_at(-1) == Complex(1, 0));
}

TEST_CASE("forward then inverse reproduces the state bit-exactly") {
    SplitMix64 rng(99);
    for (int i = 0; i < 25; ++i) {
        const WalkerState s = random_state(8, rng);
        CHECK(apply_translation(apply_translation(s, Shift::forward), Shift::inverse) == s);
        CHECK(apply_translation(apply_translation(s, Shift::inverse), Shift::forward) == s);
    }
}

TEST_CASE("translation overflow at the boundary raises") {
    WalkerState s = initial_state(2);
    s.plus_at(2) = Complex(0.1, 0);
    CHECK_THROWS_AS(apply_translation(s, Shift::forward), BoundaryOverflowError);
    WalkerState m = initial_state(2);
    m.minus_at(-2) = Complex(0.1, 0);
    CHECK_THROWS_AS(apply_translation(m, Shift::forward), BoundaryOverflowError);
    // the same amplitudes are fine for the inverse shift
    CHECK_NOTHROW(apply_translation(s, Shift::inverse));
}

TEST_CASE("step = coin then translation") {
    SplitMix64 rng(123);
    const WalkerState s = random_state(6, rng);
    const CoinParams coin{0.83, kHalfPi, kHalfPi};
    CHECK(step(s, coin, Shift::forward) ==
          apply_translation(apply_coin(s, coin), Shift::forward));
}

TEST_CASE("one pi/4 step from the origin gives P(+-1) = 1/2") {
    const WalkerState s = step(initial_state(4), {kPi / 4.0, kHalfPi, kHalfPi}, Shift::forward);
    CHECK(std::norm(s.plus_at(1)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::norm(s.minus_at(-1)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::norm(s.plus_at(0)) + std::norm(s.minus_at(0)) == doctest::Approx(0.0));
}

TEST_CASE("theta = 0 step sends all |+> weight right and |-> weight left") {
    const WalkerState s = step(initial_state(4), {0.0, kHalfPi, kHalfPi}, Shift::forward);
    CHECK(std::norm(s.plus_at(1)) == doctest::Approx(0.5));
    CHECK(std::norm(s.minus_at(-1)) == doctest::Approx(0.5));
}

TEST_CASE("light cone: support stays inside |x| <= t, exactly") {
    const WalkConfig cfg{40, 30, kPi / 6.0, kHalfPi, kHalfPi, 5};
    const EvolutionRecord rec = evolve(cfg, NoRandomness{});
    for (const ProbabilityDistribution& dist : rec.distributions) {
        for (int x = -cfg.n_max; x <= cfg.n_max; ++x) {
            if (std::abs(x) > dist.time) CHECK(dist.at(x) == 0.0);
        }
    }
}

TEST_CASE("norm conservation over 500 steps") {
    const WalkConfig cfg{500, 500, kPi / 6.0, kHalfPi, kHalfPi, 11};
    const EvolutionRecord rec = evolve(cfg, NoRandomness{});
    for (const ProbabilityDistribution& dist : rec.distributions) {
        double sum = 0.0;
        for (double v : dist.values) sum += v;
        CHECK(std::abs(sum - 1.0) < 1e-10);
    }
}

TEST_CASE("step is deterministic") {
    const WalkConfig cfg{64, 64, 0.7, kHalfPi, kHalfPi, 321};
    const EvolutionRecord a = evolve(cfg, DiscreteAngle{0.2});
    const EvolutionRecord b = evolve(cfg, DiscreteAngle{0.2});
    CHECK(a.final_state == b.final_state);
    CHECK(a.choices == b.choices);
    CHECK(a.distributions == b.distributions);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(validate_config({0, 1, 0.5, kHalfPi, kHalfPi, 1}), InvalidConfigError);
    CHECK_THROWS_AS(validate_config({10, 11, 0.5, kHalfPi, kHalfPi, 1}), InvalidConfigError);
    CHECK_THROWS_AS(validate_config({10, 5, 0.0, kHalfPi, kHalfPi, 1}), InvalidConfigError);
    CHECK_THROWS_AS(validate_config({10, 5, kHalfPi, kHalfPi, kHalfPi, 1}), InvalidConfigError);
    CHECK_NOTHROW(validate_config({10, 5, 0.3, kHalfPi, kHalfPi, 1}));
}
