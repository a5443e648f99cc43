#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qwalk/randomness.hpp"

namespace qwalk::ml {

enum class Normalization { Sum, Max };

std::string to_string(Normalization norm);

// One labeled probability distribution.  label 0 = delocalized,
// 1 = localized.
struct Sample {
    std::vector<double> features;
    int label = 0;
    double param_value = 0.0;
    std::uint64_t seed = 0;
    Normalization norm = Normalization::Sum;
};

struct GenOptions {
    double param_lo = 0.0;  // start of the delocalized band; 0 -> param_max / 50
    double param_hi = 0.0;  // end of the localized band; 0 -> theta0 (rotation) or 0.5
    int realizations = 1;
    int threads = 0;
};

double default_param_max(ModelKind kind, double theta0);
double default_band_width(ModelKind kind);

// n_samples/2 label-0 samples with the randomness magnitude uniform in
// [param_lo, param_lo + band_width] and n_samples/2 label-1 samples
// uniform in [param_hi - band_width, param_hi], each from its own stream.
// Features are the final probability distribution (sum-normalized).
std::vector<Sample> generate_training_set(ModelKind kind, double theta0, int n_t,
                                          int n_samples, double band_width,
                                          std::uint64_t seed,
                                          const GenOptions& options = {});

// Divide every feature by the maximum one; idempotent.
Sample max_normalize(const Sample& sample);

struct LossValue {
    double loss;
    double derivative;  // d loss / d margin
};

// max(0, 1-z)^2 for z >= -1, -4z below; continuously differentiable at -1.
LossValue modified_huber_loss(double margin);

// ---------------------------------------------------------------------------
// Linear SGD classifier ("SVM")

struct SvmHyper {
    int epochs = 50;
    double eta0 = 0.01;
    double l2 = 1e-4;
    double holdout_fraction = 0.2;
};

struct LinearClassifier {
    std::vector<double> weights;
    double bias = 0.0;
    double clip_lo = -1.0;  // calibration: p(localized) = (clip(f) + 1) / 2
    double clip_hi = 1.0;
    Normalization norm = Normalization::Sum;
    bool warning = false;  // holdout accuracy came in under 0.9
    SvmHyper hyper;
    std::uint64_t train_seed = 0;
    std::uint64_t fingerprint = 0;

    double decision(std::span<const double> x) const;
    double p_localized(std::span<const double> x) const;
    double p_delocalized(std::span<const double> x) const { return 1.0 - p_localized(x); }
};

struct SvmResult {
    LinearClassifier model;
    double holdout_accuracy = 0.0;
};

SvmResult train_svm(const std::vector<Sample>& samples, const SvmHyper& hyper,
                    std::uint64_t seed);

// ---------------------------------------------------------------------------
// Multi-layer perceptron

struct MlpHyper {
    std::vector<int> hidden = {400, 200, 100, 50};
    double alpha = 0.001;  // L2 regularization
    int batch = 64;
    double learning_rate = 1e-3;
    int max_epochs = 300;
    int patience = 10;
    double holdout_fraction = 0.2;
};

struct MlpClassifier {
    std::vector<int> layer_sizes;              // input, hidden..., 2
    std::vector<std::vector<double>> weights;  // layer l: [in x out], input-major
    std::vector<std::vector<double>> biases;
    double l2_alpha = 0.001;
    Normalization norm = Normalization::Max;
    bool warning = false;
    MlpHyper hyper;
    std::uint64_t train_seed = 0;
    std::uint64_t fingerprint = 0;

    // (p_delocalized, p_localized); rectifier hiddens, softmax output.
    std::pair<double, double> probabilities(std::span<const double> x) const;
    double p_delocalized(std::span<const double> x) const { return probabilities(x).first; }
};

struct MlpResult {
    MlpClassifier model;
    double holdout_accuracy = 0.0;
};

MlpResult train_mlp(const std::vector<Sample>& samples, const MlpHyper& hyper,
                    std::uint64_t seed);

// Mean cross-entropy over the rows plus (alpha/2) sum of squared weights,
// with its exact gradient; shared by the trainer and the
// finite-difference tests.
struct MlpGradients {
    double loss = 0.0;
    std::vector<std::vector<double>> d_weights;
    std::vector<std::vector<double>> d_biases;
};

MlpGradients mlp_loss_and_grad(const MlpClassifier& net, const std::vector<const double*>& rows,
                               const std::vector<int>& labels);

double mlp_loss(const MlpClassifier& net, const std::vector<const double*>& rows,
                const std::vector<int>& labels);

struct GridSearchEntry {
    std::vector<int> hidden;
    double alpha;
    double holdout_accuracy;
};

struct GridSearchResult {
    MlpHyper best;
    double best_accuracy = 0.0;
    std::vector<GridSearchEntry> tried;
};

// Plain grid search over candidate layer layouts and alphas, scored by
// holdout accuracy (ties keep the earlier candidate).
GridSearchResult mlp_grid_search(const std::vector<Sample>& samples,
                                 const std::vector<std::vector<int>>& hidden_candidates,
                                 const std::vector<double>& alpha_candidates,
                                 const MlpHyper& base, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Confusion scan

using AnyClassifier = std::variant<LinearClassifier, MlpClassifier>;

Normalization normalization_of(const AnyClassifier& model);
double p_delocalized(const AnyClassifier& model, std::span<const double> features);

struct ConfusionCurve {
    std::vector<double> param_values;
    std::vector<double> p_delocalized;
};

enum class CrossingRule {
    Interpolate,     // SVM: linear interpolation of the p = 0.5 crossing
    FirstBelowHalf,  // MLP: first grid point with p(delocalized) < 0.5
};

CrossingRule default_rule(const AnyClassifier& model);

// Critical value from a confusion curve; throws NoTransitionError when the
// curve never comes down through 0.5.
double crossing_param(const ConfusionCurve& curve, CrossingRule rule);

struct ScanOptions {
    int realizations = 1;
    int threads = 0;
    int region = 0;  // 0 = whole lattice, 1..3 = region_split before classifying
};

struct ScanResult {
    ConfusionCurve curve;
    double critical_value = 0.0;
};

// One walk per grid param (seeded from the param value), classified with
// the model's own normalization convention.
ScanResult confusion_scan(const AnyClassifier& model, ModelKind kind, double theta0,
                          const std::vector<double>& param_grid, int n_t, std::uint64_t seed,
                          CrossingRule rule, const ScanOptions& options = {});

// ---------------------------------------------------------------------------
// Studies

struct StudyOptions {
    double band_width = 0.0;  // 0 -> default per kind
    double param_lo = 0.0;
    double param_hi = 0.0;
    int scan_points = 50;
    SvmHyper svm;
    int threads = 0;
};

struct SampleSizeRow {
    int size = 0;
    std::vector<double> estimates;  // NaN where the scan found no transition
};

// Trains `repetitions` independent SVMs per training-set size and records
// each one's critical estimate.
std::vector<SampleSizeRow> sample_size_study(ModelKind kind, double theta0, int n_t,
                                             const std::vector<int>& sizes, int repetitions,
                                             std::uint64_t seed,
                                             const StudyOptions& options = {});

// Sub-vector of the features for region 1 (-N < x < -N/2),
// 2 (-N/2 < x < N/2) or 3 (N/2 < x < N), strict bounds.
Sample region_split(const Sample& sample, int region);

// ---------------------------------------------------------------------------
// Serialization (versioned JSON; doubles round-trip bit-exactly)

std::uint64_t samples_fingerprint(const std::vector<Sample>& samples);

void save_model(const std::string& path, const AnyClassifier& model);
AnyClassifier load_model(const std::string& path);

}  // namespace qwalk::ml
