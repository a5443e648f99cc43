#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qwalk/randomness.hpp"
#include "qwalk/walk.hpp"

namespace qwalk::cli {

struct WalkSettings {
    int n_max = 100;
    int n_t = 100;
    double theta0 = kPi / 6.0;
    double phi1 = kHalfPi;
    double phi2 = kHalfPi;
    std::uint64_t seed = 1;

    bool operator==(const WalkSettings&) const = default;
};

struct RandomnessSettings {
    std::string kind = "none";  // none | discrete_angle | continuous_angle | random_translation
    double value = 0.0;

    bool operator==(const RandomnessSettings&) const = default;
};

struct SweepSettings {
    double param_max = 0.0;  // 0 -> theta0 (rotation) or 0.5 (translation)
    int points = 50;
    bool refine = true;
    std::vector<std::string> methods = {"human", "moi", "ipr"};

    bool operator==(const SweepSettings&) const = default;
};

struct SvmSettings {
    int epochs = 50;
    double eta0 = 0.01;
    double l2 = 1e-4;

    bool operator==(const SvmSettings&) const = default;
};

struct MlpSettings {
    std::vector<int> hidden = {400, 200, 100, 50};
    double alpha = 0.001;
    int batch = 64;
    double learning_rate = 0.001;
    int max_epochs = 300;
    int patience = 10;

    bool operator==(const MlpSettings&) const = default;
};

struct MlSettings {
    std::string classifier = "svm";  // svm | mlp
    int n_samples = 1800;
    double band_width = 0.0;  // 0 -> 0.02 (rotation) or 0.1 (translation)
    double holdout_fraction = 0.2;
    std::string max_normalize = "auto";  // auto | on | off; auto = off for svm, on for mlp
    std::string model_file = "model.json";
    int scan_points = 50;
    bool scan_refine = true;
    std::vector<int> sizes = {200, 600, 1000, 1400, 1800};
    int repetitions = 10;
    SvmSettings svm;
    MlpSettings mlp;

    bool operator==(const MlSettings&) const = default;
};

struct ScalingSettings {
    std::vector<int> n_values = {50, 100, 150, 210, 300, 400};
    std::vector<std::string> methods = {"human", "moi", "ipr", "svm"};
    int seeds = 1;
    int points = 50;
    bool refine = true;
    double param_max = 0.0;

    bool operator==(const ScalingSettings&) const = default;
};

struct PlotSettings {
    std::vector<int> times;  // empty -> final step only

    bool operator==(const PlotSettings&) const = default;
};

struct ExperimentConfig {
    WalkSettings walk;
    RandomnessSettings randomness;
    int realizations = 1;
    SweepSettings sweep;
    MlSettings ml;
    ScalingSettings scaling;
    PlotSettings plots;

    bool operator==(const ExperimentConfig&) const = default;
};

// Parse from JSON text.  Unknown keys and type mismatches raise
// ConfigError naming the offending key; syntax errors report line/column.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Full serialization with every default materialized;
// parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

std::uint64_t config_hash(const ExperimentConfig& config);

ModelKind kind_from_string(const std::string& kind);
RandomnessModel model_from(const RandomnessSettings& randomness);
WalkConfig walk_config_from(const WalkSettings& walk);

// Cross-field validation shared by all commands; throws ConfigError.
void validate(const ExperimentConfig& config);

}  // namespace qwalk::cli
