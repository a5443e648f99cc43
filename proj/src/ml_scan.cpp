#include <algorithm>
#include <cmath>
#include <limits>

#include "qwalk/errors.hpp"
#include "qwalk/ml.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/rng.hpp"

namespace qwalk::ml {

Normalization normalization_of(const AnyClassifier& model) {
    return std::visit([](const auto& m) { return m.norm; }, model);
}

double p_delocalized(const AnyClassifier& model, std::span<const double> features) {
    return std::visit([&](const auto& m) { return m.p_delocalized(features); }, model);
}

CrossingRule default_rule(const AnyClassifier& model) {
    return std::holds_alternative<LinearClassifier>(model) ? CrossingRule::Interpolate
                                                           : CrossingRule::FirstBelowHalf;
}

double crossing_param(const ConfusionCurve& curve, CrossingRule rule) {
    const std::size_t n = curve.param_values.size();
    if (n < 2 || curve.p_delocalized.size() != n) {
        throw InvalidParameterError("confusion curve needs >= 2 aligned points");
    }
    const std::vector<double>& p = curve.p_delocalized;
    const std::vector<double>& x = curve.param_values;
    if (rule == CrossingRule::Interpolate) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (p[i] >= 0.5 && p[i + 1] < 0.5) {
                return x[i] + (x[i + 1] - x[i]) * (p[i] - 0.5) / (p[i] - p[i + 1]);
            }
        }
    } else {
        if (p[0] < 0.5) {
            throw NoTransitionError("curve already starts below 0.5");
        }
        for (std::size_t i = 1; i < n; ++i) {
            if (p[i] < 0.5) return x[i];
        }
    }
    throw NoTransitionError("classification probability never crosses 0.5");
}

ScanResult confusion_scan(const AnyClassifier& model, ModelKind kind, double theta0,
                          const std::vector<double>& param_grid, int n_t, std::uint64_t seed,
                          CrossingRule rule, const ScanOptions& options) {
    if (param_grid.size() < 2 || !std::is_sorted(param_grid.begin(), param_grid.end())) {
        throw InvalidParameterError("confusion_scan needs an ascending grid of >= 2 params");
    }
    const Normalization norm = normalization_of(model);
    ScanResult result;
    result.curve.param_values = param_grid;
    result.curve.p_delocalized.resize(param_grid.size());
    parallel_for(param_grid.size(), options.threads, [&](std::size_t i) {
        const double param = param_grid[i];
        WalkConfig cfg{n_t, n_t, theta0, kHalfPi, kHalfPi,
                       mix64(seed ^ fnv1a(&param, sizeof(param)))};
        const RandomnessModel rmodel = make_model(kind, param);
        EvolutionRecord rec = options.realizations > 1
                                  ? ensemble_mean(cfg, rmodel, options.realizations, false, 1)
                                  : evolve(cfg, rmodel, false);
        Sample s;
        s.features = std::move(rec.distributions.back().values);
        if (options.region != 0) s = region_split(s, options.region);
        if (norm == Normalization::Max) s = max_normalize(s);
        result.curve.p_delocalized[i] = p_delocalized(model, s.features);
    });
    result.critical_value = crossing_param(result.curve, rule);
    return result;
}

std::vector<SampleSizeRow> sample_size_study(ModelKind kind, double theta0, int n_t,
                                             const std::vector<int>& sizes, int repetitions,
                                             std::uint64_t seed, const StudyOptions& options) {
    if (sizes.empty() || !std::is_sorted(sizes.begin(), sizes.end())) {
        throw InvalidParameterError("sample_size_study needs ascending sizes");
    }
    if (repetitions < 1) {
        throw InvalidParameterError("sample_size_study needs repetitions >= 1");
    }
    const double param_max = default_param_max(kind, theta0);
    const double band =
        options.band_width > 0.0 ? options.band_width : default_band_width(kind);
    const std::vector<double> grid = [&] {
        std::vector<double> g(static_cast<std::size_t>(options.scan_points));
        for (int i = 0; i < options.scan_points; ++i) {
            g[static_cast<std::size_t>(i)] =
                param_max * static_cast<double>(i + 1) / static_cast<double>(options.scan_points);
        }
        return g;
    }();

    std::vector<SampleSizeRow> table;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        SampleSizeRow row;
        row.size = sizes[si];
        for (int r = 0; r < repetitions; ++r) {
            const std::uint64_t run_seed =
                stream_seed(seed, si * static_cast<std::size_t>(repetitions) +
                                      static_cast<std::size_t>(r));
            GenOptions gen;
            gen.param_lo = options.param_lo;
            gen.param_hi = options.param_hi;
            gen.threads = options.threads;
            const std::vector<Sample> samples =
                generate_training_set(kind, theta0, n_t, row.size, band, run_seed, gen);
            const SvmResult trained = train_svm(samples, options.svm, run_seed);
            try {
                const ScanResult scan =
                    confusion_scan(trained.model, kind, theta0, grid, n_t,
                                   stream_seed(run_seed, 0x5CA7),
                                   CrossingRule::Interpolate, ScanOptions{1, options.threads});
                row.estimates.push_back(scan.critical_value);
            } catch (const NoTransitionError&) {
                row.estimates.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        table.push_back(std::move(row));
    }
    return table;
}

}  // namespace qwalk::ml
