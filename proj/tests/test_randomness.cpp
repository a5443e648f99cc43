#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qwalk/errors.hpp"
#include "qwalk/observables.hpp"
#include "qwalk/randomness.hpp"
#include "qwalk/rng.hpp"

using namespace qwalk;

TEST_CASE("draw_choice: degenerate models") {
    SplitMix64 rng(1);
    const double theta0 = kPi / 6.0;
    for (int i = 0; i < 100; ++i) {
        const StepChoice c = draw_choice(DiscreteAngle{0.0}, theta0, rng);
        CHECK(c.theta_used == theta0);
        CHECK(c.direction_used == Shift::forward);
    }
    for (int i = 0; i < 1000; ++i) {
        const StepChoice c = draw_choice(RandomTranslation{0.0}, theta0, rng);
        CHECK(c.direction_used == Shift::forward);
        CHECK(c.theta_used == theta0);
    }
}

TEST_CASE("draw_choice: discrete angle is a fair coin (1e6 draws)") {
    SplitMix64 rng(77);
    const double theta0 = kPi / 6.0;
    const double delta = 0.04;
    int plus = 0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
        const StepChoice c = draw_choice(DiscreteAngle{delta}, theta0, rng);
        const bool up = c.theta_used > theta0;
        const bool down = c.theta_used < theta0;
        CHECK((up || down));
        if (up) {
            CHECK(c.theta_used == doctest::Approx(theta0 + delta).epsilon(1e-14));
            ++plus;
        } else {
            CHECK(c.theta_used == doctest::Approx(theta0 - delta).epsilon(1e-14));
        }
    }
    // binomial 3-sigma bound ~0.0015; the contract allows 0.002
    CHECK(std::abs(static_cast<double>(plus) / n - 0.5) < 0.002);
}

TEST_CASE("draw_choice: continuous angle stays in [theta0, theta0 + delta_max)") {
    SplitMix64 rng(3);
    const double theta0 = 0.5;
    const double delta_max = 0.3;
    double lo = 1e9, hi = -1e9;
    for (int i = 0; i < 100000; ++i) {
        const StepChoice c = draw_choice(ContinuousAngle{delta_max}, theta0, rng);
        lo = std::min(lo, c.theta_used);
        hi = std::max(hi, c.theta_used);
        CHECK(c.theta_used >= theta0);
        CHECK(c.theta_used < theta0 + delta_max);
    }
    // the draw actually fills the interval
    CHECK(lo < theta0 + 0.001);
    CHECK(hi > theta0 + delta_max - 0.001);
}

TEST_CASE("draw_choice: random translation keeps theta0 and flips direction with rate p_r") {
    SplitMix64 rng(9);
    int inverse = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const StepChoice c = draw_choice(RandomTranslation{0.3}, 0.6, rng);
        CHECK(c.theta_used == 0.6);
        if (c.direction_used == Shift::inverse) ++inverse;
    }
    CHECK(static_cast<double>(inverse) / n == doctest::Approx(0.3).epsilon(0.02));
}

TEST_CASE("model validation") {
    const double theta0 = kPi / 6.0;
    CHECK_THROWS_AS(validate_model(DiscreteAngle{-0.1}, theta0), InvalidParameterError);
    CHECK_THROWS_AS(validate_model(DiscreteAngle{theta0 + 0.01}, theta0),
                    InvalidParameterError);
    CHECK_THROWS_AS(validate_model(ContinuousAngle{-0.2}, theta0), InvalidParameterError);
    CHECK_THROWS_AS(validate_model(RandomTranslation{1.2}, theta0), InvalidParameterError);
    CHECK_NOTHROW(validate_model(RandomTranslation{0.8}, theta0));  // parity half allowed
    CHECK_NOTHROW(validate_model(DiscreteAngle{theta0}, theta0));
}

TEST_CASE("evolve: delta_theta = 0 is bit-identical to no randomness") {
    const WalkConfig cfg{80, 80, kPi / 6.0, kHalfPi, kHalfPi, 1234};
    const EvolutionRecord a = evolve(cfg, DiscreteAngle{0.0});
    const EvolutionRecord b = evolve(cfg, NoRandomness{});
    CHECK(a.final_state == b.final_state);
    CHECK(a.distributions == b.distributions);
}

TEST_CASE("evolve records one choice and one distribution per step") {
    const WalkConfig cfg{50, 37, 0.4, kHalfPi, kHalfPi, 5};
    const EvolutionRecord rec = evolve(cfg, ContinuousAngle{0.2});
    CHECK(rec.choices.size() == 37);
    CHECK(rec.distributions.size() == 37);
    CHECK(rec.diagnostics.moi.size() == 37);
    CHECK(rec.diagnostics.ipr.size() == 37);
    CHECK(rec.distributions.back().time == 37);

    const EvolutionRecord lean = evolve(cfg, ContinuousAngle{0.2}, false);
    CHECK(lean.distributions.size() == 1);
    CHECK(lean.distributions.back() == rec.distributions.back());
    CHECK(lean.diagnostics == rec.diagnostics);
}

TEST_CASE("norm is conserved for every randomness model") {
    const WalkConfig cfg{120, 120, kPi / 6.0, kHalfPi, kHalfPi, 21};
    for (const RandomnessModel& model :
         {RandomnessModel(DiscreteAngle{0.1}), RandomnessModel(ContinuousAngle{0.25}),
          RandomnessModel(RandomTranslation{0.2})}) {
        const EvolutionRecord rec = evolve(cfg, model);
        for (const ProbabilityDistribution& dist : rec.distributions) {
            double sum = 0.0;
            for (double v : dist.values) sum += v;
            CHECK(std::abs(sum - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("two-peak ballistic vs single-peak localized regimes") {
    const WalkConfig free_cfg{60, 50, kPi / 6.0, kHalfPi, kHalfPi, 7};
    const EvolutionRecord free_walk = evolve(free_cfg, NoRandomness{}, false);
    CHECK(classify_peaks(free_walk.final_distribution()).label == PeakLabel::TwoPeak);

    const WalkConfig loc_cfg{300, 300, kPi / 6.0, kHalfPi, kHalfPi, 7};
    const EvolutionRecord locked = evolve(loc_cfg, RandomTranslation{0.2}, false);
    CHECK(classify_peaks(locked.final_distribution()).label == PeakLabel::SinglePeak);
}

TEST_CASE("ensemble_mean: n = 1 equals evolve; means stay normalized") {
    const WalkConfig cfg{60, 60, kPi / 6.0, kHalfPi, kHalfPi, 3};
    const EvolutionRecord one = ensemble_mean(cfg, DiscreteAngle{0.08}, 1);
    const EvolutionRecord single = evolve(cfg, DiscreteAngle{0.08});
    CHECK(one.distributions == single.distributions);
    CHECK(one.choices == single.choices);

    const EvolutionRecord mean = ensemble_mean(cfg, DiscreteAngle{0.08}, 64, false);
    CHECK(mean.choices.empty());
    CHECK(mean.realizations == 64);
    for (const ProbabilityDistribution& dist : mean.distributions) {
        double sum = 0.0;
        for (double v : dist.values) sum += v;
        CHECK(std::abs(sum - 1.0) < 1e-10);
    }
}

TEST_CASE("ensemble_mean of a deterministic model equals the single run") {
    const WalkConfig cfg{40, 40, kPi / 6.0, kHalfPi, kHalfPi, 17};
    const EvolutionRecord mean = ensemble_mean(cfg, NoRandomness{}, 8, false);
    const EvolutionRecord single = evolve(cfg, NoRandomness{}, false);
    for (std::size_t i = 0; i < mean.final_distribution().values.size(); ++i) {
        CHECK(mean.final_distribution().values[i] ==
              doctest::Approx(single.final_distribution().values[i]).epsilon(1e-13));
    }
}

TEST_CASE("ensemble_mean is independent of the thread count") {
    const WalkConfig cfg{50, 50, kPi / 6.0, kHalfPi, kHalfPi, 29};
    const EvolutionRecord t1 = ensemble_mean(cfg, RandomTranslation{0.1}, 100, false, 1);
    const EvolutionRecord t4 = ensemble_mean(cfg, RandomTranslation{0.1}, 100, false, 4);
    CHECK(t1.distributions == t4.distributions);
    CHECK(t1.diagnostics == t4.diagnostics);
}

TEST_CASE("evolve with equal seeds is bit-identical") {
    const WalkConfig cfg{70, 70, kPi / 6.0, kHalfPi, kHalfPi, 555};
    const EvolutionRecord a = evolve(cfg, RandomTranslation{0.3});
    const EvolutionRecord b = evolve(cfg, RandomTranslation{0.3});
    CHECK(a.distributions == b.distributions);
    CHECK(a.choices == b.choices);
}

TEST_CASE("parity symmetry: p_r and 1 - p_r mirror each other") {
    // ensemble means for p_r = 0.2 and 0.8 agree after x -> -x within
    // Monte-Carlo error (5 pooled standard errors per site).
    const int n_real = 2000;
    const WalkConfig cfg{100, 100, kPi / 6.0, kHalfPi, kHalfPi, 424242};

    const int sites = 2 * cfg.n_max + 1;
    std::vector<double> sum_a(sites, 0.0), sq_a(sites, 0.0);
    std::vector<double> sum_b(sites, 0.0), sq_b(sites, 0.0);
    for (int r = 0; r < n_real; ++r) {
        WalkConfig c = cfg;
        c.seed = cfg.seed + static_cast<std::uint64_t>(r);
        const EvolutionRecord a = evolve(c, RandomTranslation{0.2}, false);
        const EvolutionRecord b = evolve(c, RandomTranslation{0.8}, false);
        for (int i = 0; i < sites; ++i) {
            const double va = a.final_distribution().values[static_cast<std::size_t>(i)];
            const double vb = b.final_distribution().values[static_cast<std::size_t>(i)];
            sum_a[static_cast<std::size_t>(i)] += va;
            sq_a[static_cast<std::size_t>(i)] += va * va;
            sum_b[static_cast<std::size_t>(i)] += vb;
            sq_b[static_cast<std::size_t>(i)] += vb * vb;
        }
    }
    int violations = 0;
    for (int i = 0; i < sites; ++i) {
        const int j = sites - 1 - i;  // x -> -x
        const double ma = sum_a[static_cast<std::size_t>(i)] / n_real;
        const double mb = sum_b[static_cast<std::size_t>(j)] / n_real;
        const double va = (sq_a[static_cast<std::size_t>(i)] / n_real - ma * ma) / n_real;
        const double vb = (sq_b[static_cast<std::size_t>(j)] / n_real - mb * mb) / n_real;
        const double se = std::sqrt(std::max(va + vb, 0.0));
        if (se == 0.0) {
            CHECK(ma == mb);  // sites never reached by either ensemble
        } else if (std::abs(ma - mb) >= 5.0 * se) {
            ++violations;
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("n_t > n_max is rejected up front") {
    // this is the misconfiguration that would otherwise overflow the lattice
    const WalkConfig bad{30, 31, kPi / 6.0, kHalfPi, kHalfPi, 1};
    CHECK_THROWS_AS(evolve(bad, NoRandomness{}), InvalidConfigError);
}
