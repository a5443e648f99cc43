#include "qwalk/randomness.hpp"

#include <algorithm>
#include <cmath>

#include "qwalk/errors.hpp"
#include "qwalk/parallel.hpp"

namespace qwalk {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::None: return "none";
        case ModelKind::DiscreteAngle: return "discrete_angle";
        case ModelKind::ContinuousAngle: return "continuous_angle";
        case ModelKind::RandomTranslation: return "random_translation";
    }
    return "?";
}

RandomnessModel make_model(ModelKind kind, double value) {
    switch (kind) {
        case ModelKind::None: return NoRandomness{};
        case ModelKind::DiscreteAngle: return DiscreteAngle{value};
        case ModelKind::ContinuousAngle: return ContinuousAngle{value};
        case ModelKind::RandomTranslation: return RandomTranslation{value};
    }
    throw InvalidParameterError("make_model: bad kind");
}

ModelKind kind_of(const RandomnessModel& model) {
    return static_cast<ModelKind>(model.index());
}

double magnitude_of(const RandomnessModel& model) {
    switch (kind_of(model)) {
        case ModelKind::None: return 0.0;
        case ModelKind::DiscreteAngle: return std::get<DiscreteAngle>(model).delta_theta;
        case ModelKind::ContinuousAngle: return std::get<ContinuousAngle>(model).delta_theta_max;
        case ModelKind::RandomTranslation: return std::get<RandomTranslation>(model).p_r;
    }
    return 0.0;
}

void validate_model(const RandomnessModel& model, double theta0) {
    const double value = magnitude_of(model);
    if (!std::isfinite(value)) {
        throw InvalidParameterError("randomness magnitude must be finite");
    }
    switch (kind_of(model)) {
        case ModelKind::None:
            break;
        case ModelKind::DiscreteAngle:
            if (value < 0.0 || value > theta0) {
                throw InvalidParameterError("discrete angle requires 0 <= delta_theta <= theta0");
            }
            break;
        case ModelKind::ContinuousAngle:
            if (value < 0.0) {
                throw InvalidParameterError("continuous angle requires delta_theta_max >= 0");
            }
            break;
        case ModelKind::RandomTranslation:
            if (value < 0.0 || value > 1.0) {
                throw InvalidParameterError("random translation requires 0 <= p_r <= 1");
            }
            break;
    }
}

StepChoice draw_choice(const RandomnessModel& model, double theta0, SplitMix64& rng) {
    StepChoice choice{theta0, Shift::forward};
    switch (kind_of(model)) {
        case ModelKind::None:
            break;
        case ModelKind::DiscreteAngle: {
            const double delta = std::get<DiscreteAngle>(model).delta_theta;
            choice.theta_used = rng.bernoulli(0.5) ? theta0 + delta : theta0 - delta;
            break;
        }
        case ModelKind::ContinuousAngle: {
            const double delta_max = std::get<ContinuousAngle>(model).delta_theta_max;
            choice.theta_used = theta0 + rng.uniform01() * delta_max;
            break;
        }
        case ModelKind::RandomTranslation: {
            const double p_r = std::get<RandomTranslation>(model).p_r;
            if (rng.bernoulli(p_r)) choice.direction_used = Shift::inverse;
            break;
        }
    }
    return choice;
}

EvolutionRecord evolve(const WalkConfig& config, const RandomnessModel& model,
                       bool record_full) {
    validate_config(config);
    validate_model(model, config.theta0);

    EvolutionRecord record;
    record.config = config;
    record.model = model;
    record.choices.reserve(static_cast<std::size_t>(config.n_t));
    record.diagnostics.moi.reserve(static_cast<std::size_t>(config.n_t));
    record.diagnostics.ipr.reserve(static_cast<std::size_t>(config.n_t));
    if (record_full) record.distributions.reserve(static_cast<std::size_t>(config.n_t));

    WalkerState state = initial_state(config.n_max);
    SplitMix64 rng(config.seed);
    for (int t = 1; t <= config.n_t; ++t) {
        const StepChoice choice = draw_choice(model, config.theta0, rng);
        step_inplace(state, CoinParams{choice.theta_used, config.phi1, config.phi2},
                     choice.direction_used);
        record.choices.push_back(choice);
        ProbabilityDistribution dist = probability_distribution(state, t);
        record.diagnostics.moi.push_back(moment_of_inertia(dist, config.n_max));
        record.diagnostics.ipr.push_back(ipr(state));
        if (record_full || t == config.n_t) {
            record.distributions.push_back(std::move(dist));
        }
    }
    record.final_state = std::move(state);
    return record;
}

EvolutionRecord ensemble_mean(const WalkConfig& config, const RandomnessModel& model,
                              int n_realizations, bool record_full, int threads) {
    if (n_realizations < 1) {
        throw InvalidParameterError("ensemble_mean requires n_realizations >= 1");
    }
    if (n_realizations == 1) return evolve(config, model, record_full);

    // Fixed-size blocks, summed internally in realization order and merged
    // in block order: the mean is bitwise independent of the thread count.
    constexpr int kBlock = 32;
    const int n_blocks = (n_realizations + kBlock - 1) / kBlock;

    struct BlockSum {
        std::vector<std::vector<double>> dist_sum;  // per recorded step
        std::vector<double> moi_sum;
        std::vector<double> ipr_sum;
        std::vector<int> times;
        WalkerState first_state;  // block 0 only
    };
    std::vector<BlockSum> blocks(static_cast<std::size_t>(n_blocks));

    parallel_for(static_cast<std::size_t>(n_blocks), threads, [&](std::size_t b) {
        BlockSum& sum = blocks[b];
        const int begin = static_cast<int>(b) * kBlock;
        const int end = std::min(begin + kBlock, n_realizations);
        for (int r = begin; r < end; ++r) {
            WalkConfig cfg = config;
            cfg.seed = config.seed + static_cast<std::uint64_t>(r);
            EvolutionRecord rec = evolve(cfg, model, record_full);
            if (sum.dist_sum.empty()) {
                sum.dist_sum.resize(rec.distributions.size());
                for (std::size_t k = 0; k < rec.distributions.size(); ++k) {
                    sum.dist_sum[k].assign(rec.distributions[k].values.size(), 0.0);
                    sum.times.push_back(rec.distributions[k].time);
                }
                sum.moi_sum.assign(rec.diagnostics.moi.size(), 0.0);
                sum.ipr_sum.assign(rec.diagnostics.ipr.size(), 0.0);
            }
            for (std::size_t k = 0; k < rec.distributions.size(); ++k) {
                const std::vector<double>& v = rec.distributions[k].values;
                for (std::size_t i = 0; i < v.size(); ++i) sum.dist_sum[k][i] += v[i];
            }
            for (std::size_t k = 0; k < rec.diagnostics.moi.size(); ++k) {
                sum.moi_sum[k] += rec.diagnostics.moi[k];
                sum.ipr_sum[k] += rec.diagnostics.ipr[k];
            }
            if (r == 0) sum.first_state = std::move(rec.final_state);
        }
    });

    EvolutionRecord out;
    out.config = config;
    out.model = model;
    out.realizations = n_realizations;
    const BlockSum& first = blocks[0];
    out.distributions.resize(first.dist_sum.size());
    for (std::size_t k = 0; k < first.dist_sum.size(); ++k) {
        out.distributions[k].time = first.times[k];
        out.distributions[k].values.assign(first.dist_sum[k].size(), 0.0);
    }
    out.diagnostics.moi.assign(first.moi_sum.size(), 0.0);
    out.diagnostics.ipr.assign(first.ipr_sum.size(), 0.0);
    for (const BlockSum& sum : blocks) {
        for (std::size_t k = 0; k < sum.dist_sum.size(); ++k) {
            for (std::size_t i = 0; i < sum.dist_sum[k].size(); ++i) {
                out.distributions[k].values[i] += sum.dist_sum[k][i];
            }
        }
        for (std::size_t k = 0; k < sum.moi_sum.size(); ++k) {
            out.diagnostics.moi[k] += sum.moi_sum[k];
            out.diagnostics.ipr[k] += sum.ipr_sum[k];
        }
    }
    const double inv = 1.0 / static_cast<double>(n_realizations);
    for (ProbabilityDistribution& dist : out.distributions) {
        for (double& v : dist.values) v *= inv;
    }
    for (double& v : out.diagnostics.moi) v *= inv;
    for (double& v : out.diagnostics.ipr) v *= inv;
    out.final_state = first.first_state;
    return out;
}

}  // namespace qwalk
