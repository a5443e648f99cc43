#include <algorithm>
#include <cmath>

#include "qwalk/errors.hpp"
#include "qwalk/ml.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/rng.hpp"

namespace qwalk::ml {

std::string to_string(Normalization norm) {
    return norm == Normalization::Sum ? "sum" : "max";
}

double default_param_max(ModelKind kind, double theta0) {
    return kind == ModelKind::RandomTranslation ? 0.5 : theta0;
}

double default_band_width(ModelKind kind) {
    return kind == ModelKind::RandomTranslation ? 0.1 : 0.02;
}

std::vector<Sample> generate_training_set(ModelKind kind, double theta0, int n_t,
                                          int n_samples, double band_width,
                                          std::uint64_t seed, const GenOptions& options) {
    if (kind == ModelKind::None) {
        throw InvalidParameterError("training data needs a randomness model");
    }
    if (n_samples < 2 || n_samples % 2 != 0) {
        throw InvalidParameterError("n_samples must be even and >= 2");
    }
    const double param_max = default_param_max(kind, theta0);
    if (band_width <= 0.0) band_width = default_band_width(kind);
    const double lo_start = options.param_lo > 0.0 ? options.param_lo : param_max / 50.0;
    const double hi_end = options.param_hi > 0.0 ? options.param_hi : param_max;
    const double lo_end = lo_start + band_width;
    const double hi_start = hi_end - band_width;
    if (lo_end > hi_start) {
        throw InvalidBandError("training bands overlap: [" + std::to_string(lo_start) + ", " +
                               std::to_string(lo_end) + "] vs [" + std::to_string(hi_start) +
                               ", " + std::to_string(hi_end) + "]");
    }

    const int half = n_samples / 2;
    std::vector<Sample> samples(static_cast<std::size_t>(n_samples));
    parallel_for(samples.size(), options.threads, [&](std::size_t i) {
        SplitMix64 rng(stream_seed(seed, i));
        const bool localized = static_cast<int>(i) >= half;
        const double param = localized ? hi_start + rng.uniform01() * band_width
                                       : lo_start + rng.uniform01() * band_width;
        const std::uint64_t walk_seed = rng.next();
        WalkConfig cfg{n_t, n_t, theta0, kHalfPi, kHalfPi, walk_seed};
        const RandomnessModel model = make_model(kind, param);
        EvolutionRecord rec = options.realizations > 1
                                  ? ensemble_mean(cfg, model, options.realizations, false, 1)
                                  : evolve(cfg, model, false);
        Sample& s = samples[i];
        s.features = std::move(rec.distributions.back().values);
        s.label = localized ? 1 : 0;
        s.param_value = param;
        s.seed = walk_seed;
        s.norm = Normalization::Sum;
    });
    return samples;
}

Sample max_normalize(const Sample& sample) {
    const auto it = std::max_element(sample.features.begin(), sample.features.end());
    if (it == sample.features.end() || *it <= 0.0) {
        throw DegenerateSampleError("max_normalize: all features are zero");
    }
    Sample out = sample;
    const double inv = 1.0 / *it;
    for (double& v : out.features) v *= inv;
    out.norm = Normalization::Max;
    return out;
}

LossValue modified_huber_loss(double margin) {
    if (margin >= -1.0) {
        const double gap = std::max(0.0, 1.0 - margin);
        return {gap * gap, -2.0 * gap};
    }
    return {-4.0 * margin, -4.0};
}

Sample region_split(const Sample& sample, int region) {
    if (region < 1 || region > 3) {
        throw InvalidParameterError("region must be 1, 2 or 3");
    }
    const int len = static_cast<int>(sample.features.size());
    if (len < 3 || len % 2 == 0) {
        throw InvalidParameterError("features must have odd length 2N+1");
    }
    const double n = static_cast<double>((len - 1) / 2);
    const double half = n / 2.0;
    Sample out = sample;
    out.features.clear();
    for (int i = 0; i < len; ++i) {
        const double x = static_cast<double>(i) - n;
        const bool keep = region == 1   ? (x > -n && x < -half)
                          : region == 2 ? (x > -half && x < half)
                                        : (x > half && x < n);
        if (keep) out.features.push_back(sample.features[static_cast<std::size_t>(i)]);
    }
    return out;
}

std::uint64_t samples_fingerprint(const std::vector<Sample>& samples) {
    std::uint64_t h = 1469598103934665603ull;
    for (const Sample& s : samples) {
        h = fnv1a(s.features.data(), s.features.size() * sizeof(double), h);
        h = fnv1a(&s.label, sizeof(s.label), h);
        h = fnv1a(&s.param_value, sizeof(s.param_value), h);
    }
    return h;
}

}  // namespace qwalk::ml
