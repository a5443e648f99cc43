#include <algorithm>
#include <cmath>

#include "ml_internal.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/ml.hpp"
#include "qwalk/rng.hpp"

namespace qwalk::ml {

namespace internal {

SplitResult stratified_split(const std::vector<Sample>& samples, double fraction,
                             std::uint64_t seed) {
    std::vector<int> by_class[2];
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const int label = samples[i].label;
        if (label != 0 && label != 1) {
            throw InvalidParameterError("labels must be 0 or 1");
        }
        by_class[label].push_back(static_cast<int>(i));
    }
    if (by_class[0].size() < 2 || by_class[1].size() < 2) {
        throw InvalidParameterError("training needs at least 2 samples per class");
    }
    SplitResult split;
    SplitMix64 rng(stream_seed(seed, 0x5B17));
    for (std::vector<int>& members : by_class) {
        shuffle_indices(members, rng);
        const long want = std::lround(fraction * static_cast<double>(members.size()));
        const std::size_t k = static_cast<std::size_t>(
            std::clamp<long>(want, 1, static_cast<long>(members.size()) - 1));
        split.holdout.insert(split.holdout.end(), members.begin(), members.begin() + k);
        split.train.insert(split.train.end(), members.begin() + k, members.end());
    }
    return split;
}

}  // namespace internal

double LinearClassifier::decision(std::span<const double> x) const {
    double f = bias;
    const std::size_t n = std::min(x.size(), weights.size());
    for (std::size_t i = 0; i < n; ++i) f += weights[i] * x[i];
    return f;
}

double LinearClassifier::p_localized(std::span<const double> x) const {
    const double f = std::clamp(decision(x), clip_lo, clip_hi);
    return (f - clip_lo) / (clip_hi - clip_lo);
}

SvmResult train_svm(const std::vector<Sample>& samples, const SvmHyper& hyper,
                    std::uint64_t seed) {
    if (hyper.epochs < 1 || hyper.eta0 <= 0.0 || hyper.l2 < 0.0 ||
        hyper.holdout_fraction <= 0.0 || hyper.holdout_fraction >= 1.0) {
        throw InvalidParameterError("train_svm: bad hyper-parameters");
    }
    const internal::SplitResult split =
        internal::stratified_split(samples, hyper.holdout_fraction, seed);
    const std::size_t dim = samples.front().features.size();
    for (const Sample& s : samples) {
        if (s.features.size() != dim) {
            throw InvalidParameterError("all samples must have the same feature length");
        }
    }

    LinearClassifier model;
    model.weights.assign(dim, 0.0);
    model.bias = 0.0;
    model.norm = samples.front().norm;
    model.hyper = hyper;
    model.train_seed = seed;
    model.fingerprint = samples_fingerprint(samples);

    std::vector<int> order = split.train;
    SplitMix64 shuffler(stream_seed(seed, 0x0DD));
    long t = 1;
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        internal::shuffle_indices(order, shuffler);
        for (int idx : order) {
            const Sample& s = samples[static_cast<std::size_t>(idx)];
            const double y = s.label == 1 ? 1.0 : -1.0;
            const double f = model.decision(s.features);
            const double margin = y * f;
            const double dloss = modified_huber_loss(margin).derivative;
            const double eta =
                hyper.eta0 / (1.0 + hyper.eta0 * hyper.l2 * static_cast<double>(t));
            const double decay = 1.0 - eta * hyper.l2;
            for (double& w : model.weights) w *= decay;
            if (dloss != 0.0) {
                const double scale = eta * dloss * y;
                for (std::size_t i = 0; i < dim; ++i) {
                    model.weights[i] -= scale * s.features[i];
                }
                model.bias -= scale;
            }
            ++t;
        }
    }

    int correct = 0;
    for (int idx : split.holdout) {
        const Sample& s = samples[static_cast<std::size_t>(idx)];
        const int predicted = model.decision(s.features) > 0.0 ? 1 : 0;
        if (predicted == s.label) ++correct;
    }
    const double accuracy =
        static_cast<double>(correct) / static_cast<double>(split.holdout.size());
    model.warning = accuracy < 0.9;
    return SvmResult{std::move(model), accuracy};
}

}  // namespace qwalk::ml
