#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "qwalk/observables.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

// The three classical-disorder mechanisms.
struct NoRandomness {
    bool operator==(const NoRandomness&) const = default;
};

// Fair coin between theta0 + delta and theta0 - delta at every step.
struct DiscreteAngle {
    double delta_theta = 0.0;
    bool operator==(const DiscreteAngle&) const = default;
};

// theta0 + u with u uniform in [0, delta_theta_max) at every step.
struct ContinuousAngle {
    double delta_theta_max = 0.0;
    bool operator==(const ContinuousAngle&) const = default;
};

// Inverse translation applied with probability p_r at every step.
struct RandomTranslation {
    double p_r = 0.0;
    bool operator==(const RandomTranslation&) const = default;
};

using RandomnessModel =
    std::variant<NoRandomness, DiscreteAngle, ContinuousAngle, RandomTranslation>;

enum class ModelKind { None, DiscreteAngle, ContinuousAngle, RandomTranslation };

std::string to_string(ModelKind kind);
RandomnessModel make_model(ModelKind kind, double value);
ModelKind kind_of(const RandomnessModel& model);
double magnitude_of(const RandomnessModel& model);

// Throws InvalidParameterError on out-of-range magnitudes.  Evolution
// accepts any p_r in [0, 1]; sweep grids restrict to [0, 0.5], the
// para-symmetric half of the range.
void validate_model(const RandomnessModel& model, double theta0);

// The classical draw made before one step.
struct StepChoice {
    double theta_used = 0.0;
    Shift direction_used = Shift::forward;

    bool operator==(const StepChoice&) const = default;
};

// Full log of one evolution (or of an ensemble mean, in which case
// `choices` is empty and `realizations` > 1).  With record_full = false
// the per-step distributions are dropped and only the final one is kept;
// diagnostics always cover every step.
struct EvolutionRecord {
    WalkConfig config;
    RandomnessModel model;
    std::vector<StepChoice> choices;
    std::vector<ProbabilityDistribution> distributions;
    DiagnosticsSeries diagnostics;
    WalkerState final_state;
    int realizations = 1;

    const ProbabilityDistribution& final_distribution() const { return distributions.back(); }
};

// One classical draw.  DiscreteAngle picks theta0 +- delta with an exactly
// fair coin; ContinuousAngle adds u ~ U[0, delta_max); RandomTranslation
// keeps theta0 and reverses the shift with probability p_r.
StepChoice draw_choice(const RandomnessModel& model, double theta0, SplitMix64& rng);

// Evolve n_t steps from the initial state, drawing one StepChoice per step
// from SplitMix64(config.seed).  Deterministic in (config, model).
EvolutionRecord evolve(const WalkConfig& config, const RandomnessModel& model,
                       bool record_full = true);

// Arithmetic mean of per-realization distributions (and diagnostics) over
// seeds config.seed, config.seed + 1, ...  Merging is done in realization
// order so the result does not depend on the thread count.  final_state
// is the final state of the first realization.
EvolutionRecord ensemble_mean(const WalkConfig& config, const RandomnessModel& model,
                              int n_realizations, bool record_full = true, int threads = 0);

}  // namespace qwalk
