#include "qwalk/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "qwalk/errors.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/rng.hpp"

namespace qwalk::detect {

std::string to_string(Method method) {
    switch (method) {
        case Method::Human: return "human";
        case Method::MoI: return "moi";
        case Method::IPR: return "ipr";
        case Method::SVM: return "svm";
        case Method::MLP: return "mlp";
    }
    return "?";
}

Method method_from_string(const std::string& name) {
    if (name == "human") return Method::Human;
    if (name == "moi") return Method::MoI;
    if (name == "ipr") return Method::IPR;
    if (name == "svm") return Method::SVM;
    if (name == "mlp") return Method::MLP;
    throw InvalidParameterError("unknown method: " + name);
}

bool is_manual(Method method) {
    return method == Method::Human || method == Method::MoI || method == Method::IPR;
}

std::vector<double> make_param_grid(double param_max, int points) {
    if (points < 1 || param_max <= 0.0) {
        throw InvalidParameterError("parameter grid requires points >= 1 and param_max > 0");
    }
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            param_max * static_cast<double>(i + 1) / static_cast<double>(points);
    }
    return grid;
}

double default_param_max(ModelKind kind, double theta0) {
    return kind == ModelKind::RandomTranslation ? 0.5 : theta0;
}

namespace {

std::uint64_t point_seed(std::uint64_t base_seed, double param) {
    return mix64(base_seed ^ fnv1a(&param, sizeof(param)));
}

}  // namespace

SweepGrid build_sweep_grid(const SweepBase& base, std::vector<double> params, int threads) {
    if (!std::is_sorted(params.begin(), params.end()) ||
        std::adjacent_find(params.begin(), params.end()) != params.end()) {
        throw InvalidParameterError("sweep params must be strictly ascending");
    }
    SweepGrid grid;
    grid.n_max = base.n_max;
    grid.n_t = base.n_t;
    grid.kind = base.kind;
    grid.param_values = std::move(params);
    grid.records.resize(grid.param_values.size());
    parallel_for(grid.param_values.size(), threads, [&](std::size_t i) {
        const double param = grid.param_values[i];
        WalkConfig cfg{base.n_max, base.n_t, base.theta0, base.phi1, base.phi2,
                       point_seed(base.seed, param)};
        const RandomnessModel model = make_model(base.kind, param);
        grid.records[i] = base.realizations > 1
                              ? ensemble_mean(cfg, model, base.realizations, false, 1)
                              : evolve(cfg, model, false);
    });
    return grid;
}

// ---------------------------------------------------------------------------
// Detectors

namespace {

// Least-squares line over the inclusive index range; returns the residual
// sum of squares.
double line_ssr(const std::vector<double>& x, const std::vector<double>& y, int lo, int hi) {
    const int n = hi - lo + 1;
    double sx = 0.0, sy = 0.0;
    for (int i = lo; i <= hi; ++i) {
        sx += x[static_cast<std::size_t>(i)];
        sy += y[static_cast<std::size_t>(i)];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = lo; i <= hi; ++i) {
        const double dx = x[static_cast<std::size_t>(i)] - mx;
        sxx += dx * dx;
        sxy += dx * (y[static_cast<std::size_t>(i)] - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    double ssr = 0.0;
    for (int i = lo; i <= hi; ++i) {
        const double r = y[static_cast<std::size_t>(i)] - my -
                         slope * (x[static_cast<std::size_t>(i)] - mx);
        ssr += r * r;
    }
    return ssr;
}

}  // namespace

double moi_kink(const std::vector<std::pair<double, double>>& series) {
    const int n = static_cast<int>(series.size());
    if (n < 8) {
        throw InsufficientDataError("moi_kink needs at least 8 points, got " + std::to_string(n));
    }
    std::vector<double> x, y;
    x.reserve(series.size());
    y.reserve(series.size());
    for (const auto& [a, b] : series) {
        if (a <= 0.0 || b <= 0.0) {
            throw DomainError("moi_kink requires positive coordinates for the log-log fit");
        }
        x.push_back(std::log(a));
        y.push_back(std::log(b));
    }

    const double ssr_single = line_ssr(x, y, 0, n - 1);
    double mean_y = 0.0, sum_sq = 0.0;
    for (double v : y) {
        mean_y += v;
        sum_sq += v * v;
    }
    mean_y /= n;
    double tss = 0.0;
    for (double v : y) tss += (v - mean_y) * (v - mean_y);

    // A single line that already fits to rounding noise means no kink;
    // the second bound catches constant data, where tss itself is dust.
    if (ssr_single <= 1e-12 * tss || ssr_single <= 1e-18 * std::max(sum_sq, 1e-300)) {
        throw NoKinkError("a single segment already fits the series");
    }

    int best_k = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 2; k <= n - 3; ++k) {  // both segments keep >= 3 points
        const double s = line_ssr(x, y, 0, k) + line_ssr(x, y, k, n - 1);
        if (s < best) {  // strict: ties resolve to the smaller abscissa
            best = s;
            best_k = k;
        }
    }
    if (best > 0.95 * ssr_single) {
        throw NoKinkError("no breakpoint improves on a single segment by >= 5%");
    }
    return series[static_cast<std::size_t>(best_k)].first;
}

double ipr_max(const std::vector<std::pair<double, double>>& series, bool refine) {
    const int n = static_cast<int>(series.size());
    if (n < 3) {
        throw InsufficientDataError("ipr_max needs at least 3 points, got " + std::to_string(n));
    }
    double vmax = series[0].second;
    for (const auto& [_, v] : series) vmax = std::max(vmax, v);

    // Longest run of the maximal value; ties go to the first run.
    int best_a = -1, best_b = -2;
    for (int i = 0; i < n;) {
        if (series[static_cast<std::size_t>(i)].second != vmax) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < n && series[static_cast<std::size_t>(j + 1)].second == vmax) ++j;
        if (j - i > best_b - best_a) {
            best_a = i;
            best_b = j;
        }
        i = j + 1;
    }
    if (best_a == 0 || best_b == n - 1) {
        throw BoundaryMaximumError("IPR maximum sits on the edge of the scanned range");
    }
    const auto xs = [&](int i) { return series[static_cast<std::size_t>(i)].first; };
    const auto ys = [&](int i) { return series[static_cast<std::size_t>(i)].second; };
    if (best_a != best_b) {
        return 0.5 * (xs(best_a) + xs(best_b));
    }
    const int k = best_a;
    if (!refine) return xs(k);
    const double d1 = xs(k) - xs(k - 1);
    const double d2 = xs(k) - xs(k + 1);
    const double num = d1 * d1 * (ys(k) - ys(k + 1)) - d2 * d2 * (ys(k) - ys(k - 1));
    const double den = d1 * (ys(k) - ys(k + 1)) - d2 * (ys(k) - ys(k - 1));
    if (den == 0.0) return xs(k);
    const double vertex = xs(k) - 0.5 * num / den;
    return std::clamp(vertex, xs(k - 1), xs(k + 1));
}

double human_method_from_labels(const std::vector<double>& params,
                                const std::vector<PeakLabel>& labels) {
    const int n = static_cast<int>(params.size());
    if (n < 2 || labels.size() != params.size()) {
        throw InvalidParameterError("human method needs >= 2 aligned (param, label) pairs");
    }
    const bool has_two = std::count(labels.begin(), labels.end(), PeakLabel::TwoPeak) > 0;
    const bool has_single = std::count(labels.begin(), labels.end(), PeakLabel::SinglePeak) > 0;
    if (!has_two || !has_single) {
        throw RegimeCoverageError("sweep does not span both regimes (saw " +
                                  std::string(has_two ? "two_peak" : "no two_peak") + ", " +
                                  std::string(has_single ? "single_peak" : "no single_peak") +
                                  ")");
    }

    double result;
    int band_a = -1, band_b = -1;
    for (int i = 0; i < n;) {
        if (labels[static_cast<std::size_t>(i)] != PeakLabel::FlatOrThreePeak) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < n && labels[static_cast<std::size_t>(j + 1)] == PeakLabel::FlatOrThreePeak) ++j;
        if (j - i > band_b - band_a) {
            band_a = i;
            band_b = j;
        }
        i = j + 1;
    }
    if (band_a >= 0) {
        result = 0.5 * (params[static_cast<std::size_t>(band_a)] +
                        params[static_cast<std::size_t>(band_b)]);
    } else {
        int first_single = -1;
        for (int i = 0; i < n; ++i) {
            if (labels[static_cast<std::size_t>(i)] == PeakLabel::SinglePeak) {
                first_single = i;
                break;
            }
        }
        int last_two = -1;
        for (int i = 0; i < first_single; ++i) {
            if (labels[static_cast<std::size_t>(i)] == PeakLabel::TwoPeak) last_two = i;
        }
        if (first_single < 0 || last_two < 0) {
            throw RegimeCoverageError("no two_peak point precedes the first single_peak point");
        }
        result = 0.5 * (params[static_cast<std::size_t>(last_two)] +
                        params[static_cast<std::size_t>(first_single)]);
    }
    // Keep the estimate strictly inside the scanned range even when the
    // critical band touches an end of the grid.
    const double lo = 0.5 * (params[0] + params[1]);
    const double hi = 0.5 * (params[static_cast<std::size_t>(n - 2)] +
                             params[static_cast<std::size_t>(n - 1)]);
    return std::clamp(result, lo, hi);
}

double human_method(const SweepGrid& grid, const PeakOptions& options) {
    std::vector<PeakLabel> labels;
    labels.reserve(grid.records.size());
    for (const EvolutionRecord& rec : grid.records) {
        labels.push_back(classify_peaks(rec.final_distribution(), options).label);
    }
    return human_method_from_labels(grid.param_values, labels);
}

PowerLawFit power_law_fit(const std::vector<std::pair<double, double>>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 3) {
        throw InsufficientDataError("power_law_fit needs at least 3 points, got " +
                                    std::to_string(n));
    }
    std::vector<double> x, y;
    x.reserve(points.size());
    y.reserve(points.size());
    for (const auto& [a, b] : points) {
        if (a <= 0.0 || b <= 0.0) {
            throw DomainError("power_law_fit requires positive coordinates");
        }
        x.push_back(std::log(a));
        y.push_back(std::log(b));
    }
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += x[static_cast<std::size_t>(i)];
        my += y[static_cast<std::size_t>(i)];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, tss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = x[static_cast<std::size_t>(i)] - mx;
        const double dy = y[static_cast<std::size_t>(i)] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        tss += dy * dy;
    }
    if (sxx <= 0.0) {
        throw DomainError("power_law_fit: degenerate abscissae");
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = y[static_cast<std::size_t>(i)] - intercept -
                         slope * x[static_cast<std::size_t>(i)];
        ssr += r * r;
    }
    PowerLawFit fit;
    fit.exponent = -slope + 0.0;
    fit.prefactor = std::exp(intercept);
    fit.r_squared = tss > 0.0 ? std::clamp(1.0 - ssr / tss, 0.0, 1.0) : 1.0;
    return fit;
}

// ---------------------------------------------------------------------------
// scaling_sweep

namespace {

struct PointSummary {
    ProbabilityDistribution final_dist;
    double final_moi = 0.0;
    double final_ipr = 0.0;
};

// Simulations of one sweep, keyed by index on the fine parameter lattice
// {param_max * i / (points * refine_factor)}.  Per-point seeds come from
// the parameter value, so membership of a point in this or that pass never
// changes its record.
class GridCache {
public:
    GridCache(const ScalingBase& base, int n_max, int n_t, std::uint64_t sweep_seed,
              double param_max, int fine_count, int realizations, int threads)
        : base_(base),
          n_max_(n_max),
          n_t_(n_t),
          sweep_seed_(sweep_seed),
          param_max_(param_max),
          fine_count_(fine_count),
          realizations_(realizations),
          threads_(threads) {}

    double param_at(int index) const {
        return param_max_ * static_cast<double>(index) / static_cast<double>(fine_count_);
    }

    void ensure(const std::vector<int>& indices) {
        std::vector<int> missing;
        for (int i : indices) {
            if (!cache_.count(i)) missing.push_back(i);
        }
        if (missing.empty()) return;
        std::vector<PointSummary> fresh(missing.size());
        parallel_for(missing.size(), threads_, [&](std::size_t k) {
            fresh[k] = simulate(param_at(missing[k]));
        });
        for (std::size_t k = 0; k < missing.size(); ++k) {
            cache_.emplace(missing[k], std::move(fresh[k]));
        }
    }

    const PointSummary& at(int index) const { return cache_.at(index); }

private:
    PointSummary simulate(double param) const {
        WalkConfig cfg{n_max_, n_t_, base_.theta0, base_.phi1, base_.phi2,
                       point_seed(sweep_seed_, param)};
        const RandomnessModel model = make_model(base_.kind, param);
        EvolutionRecord rec = realizations_ > 1
                                  ? ensemble_mean(cfg, model, realizations_, false, 1)
                                  : evolve(cfg, model, false);
        PointSummary summary;
        summary.final_moi = rec.diagnostics.moi.back();
        summary.final_ipr = rec.diagnostics.ipr.back();
        summary.final_dist = std::move(rec.distributions.back());
        return summary;
    }

    ScalingBase base_;
    int n_max_;
    int n_t_;
    std::uint64_t sweep_seed_;
    double param_max_;
    int fine_count_;
    int realizations_;
    int threads_;
    std::map<int, PointSummary> cache_;
};

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct SweepContext {
    const ScalingBase& base;
    const ScalingOptions& opt;
    GridCache& cache;
    std::vector<int> coarse;  // fine-lattice indices of the coarse grid
    int fine_count;
    int n_max;
    int n_t;
    std::uint64_t sweep_seed;
};

double run_manual(Method method, const SweepContext& ctx, const std::vector<int>& indices) {
    std::vector<double> params;
    params.reserve(indices.size());
    for (int i : indices) params.push_back(ctx.cache.param_at(i));
    switch (method) {
        case Method::Human: {
            std::vector<PeakLabel> labels;
            labels.reserve(indices.size());
            for (int i : indices) {
                labels.push_back(
                    classify_peaks(ctx.cache.at(i).final_dist, ctx.opt.peaks).label);
            }
            return human_method_from_labels(params, labels);
        }
        case Method::MoI: {
            std::vector<std::pair<double, double>> series;
            for (std::size_t k = 0; k < indices.size(); ++k) {
                series.emplace_back(params[k], ctx.cache.at(indices[k]).final_moi);
            }
            return moi_kink(series);
        }
        case Method::IPR: {
            std::vector<std::pair<double, double>> series;
            for (std::size_t k = 0; k < indices.size(); ++k) {
                series.emplace_back(params[k], ctx.cache.at(indices[k]).final_ipr);
            }
            return ipr_max(series);
        }
        default:
            throw InvalidParameterError("run_manual: not a manual method");
    }
}

std::vector<int> refine_window(const SweepContext& ctx, double estimate) {
    const double fine_step =
        ctx.cache.param_at(1);  // param_max / fine_count
    int center = static_cast<int>(std::llround(estimate / fine_step));
    center = std::clamp(center, 1, ctx.fine_count);
    const int half = 5 * ctx.opt.refine_factor;
    const int lo = std::max(1, center - half);
    const int hi = std::min(ctx.fine_count, center + half);
    std::vector<int> window;
    for (int i = lo; i <= hi; ++i) window.push_back(i);
    return window;
}

std::vector<int> merge_indices(const std::vector<int>& a, const std::vector<int>& b) {
    std::set<int> merged(a.begin(), a.end());
    merged.insert(b.begin(), b.end());
    return {merged.begin(), merged.end()};
}

double run_ml(Method method, const SweepContext& ctx) {
    if (ctx.n_max != ctx.n_t) {
        throw InvalidParameterError(
            "classifier detectors need n_max == n_t (training and scan lattices must match)");
    }
    const ModelKind kind = ctx.base.kind;
    const double param_max = ctx.cache.param_at(ctx.fine_count);
    const double band =
        ctx.opt.band_width > 0.0 ? ctx.opt.band_width : ml::default_band_width(kind);
    ml::GenOptions gen;
    gen.param_lo = ctx.cache.param_at(ctx.coarse.front());  // smallest nonzero grid param
    gen.param_hi = param_max;
    gen.threads = ctx.opt.threads;
    const std::uint64_t train_seed = mix64(ctx.sweep_seed ^ 0x747261696Eull);

    const bool normalize = method == Method::SVM ? ctx.opt.svm_max_normalize
                                                 : ctx.opt.mlp_max_normalize;
    std::vector<ml::Sample> samples = ml::generate_training_set(
        kind, ctx.base.theta0, ctx.n_t, ctx.opt.n_samples, band, train_seed, gen);
    if (normalize) {
        for (ml::Sample& s : samples) s = ml::max_normalize(s);
    }

    ml::AnyClassifier model = method == Method::SVM
                                  ? ml::AnyClassifier(ml::train_svm(samples, ctx.opt.svm,
                                                                    train_seed).model)
                                  : ml::AnyClassifier(ml::train_mlp(samples, ctx.opt.mlp,
                                                                    train_seed).model);
    const ml::CrossingRule rule = method == Method::SVM ? ml::CrossingRule::Interpolate
                                                        : ml::CrossingRule::FirstBelowHalf;

    auto scan = [&](const std::vector<int>& indices) {
        ml::ConfusionCurve curve;
        for (int i : indices) {
            const PointSummary& summary = ctx.cache.at(i);
            curve.param_values.push_back(ctx.cache.param_at(i));
            if (normalize) {
                ml::Sample s;
                s.features = summary.final_dist.values;
                s = ml::max_normalize(s);
                curve.p_delocalized.push_back(ml::p_delocalized(model, s.features));
            } else {
                curve.p_delocalized.push_back(
                    ml::p_delocalized(model, summary.final_dist.values));
            }
        }
        return ml::crossing_param(curve, rule);
    };

    double estimate = scan(ctx.coarse);
    if (ctx.opt.refine) {
        const std::vector<int> merged = merge_indices(ctx.coarse, refine_window(ctx, estimate));
        ctx.cache.ensure(merged);
        estimate = scan(merged);
    }
    return estimate;
}

}  // namespace

SweepOutcome sweep_detect(const ScalingBase& base, int n_max, int n_t,
                          const ScalingOptions& options) {
    if (options.grid_points < 8 || options.refine_factor < 2) {
        throw InvalidParameterError("sweep_detect: bad grid options");
    }
    const double param_max = options.param_max > 0.0
                                 ? options.param_max
                                 : default_param_max(base.kind, base.theta0);
    const int fine_count = options.grid_points * options.refine_factor;

    std::vector<int> coarse;
    for (int j = 1; j <= options.grid_points; ++j) coarse.push_back(j * options.refine_factor);

    GridCache cache(base, n_max, n_t, base.seed, param_max, fine_count, options.realizations,
                    options.threads);
    SweepContext ctx{base, options, cache, coarse, fine_count, n_max, n_t, base.seed};
    cache.ensure(coarse);

    SweepOutcome outcome;
    for (int i : coarse) {
        const PointSummary& summary = cache.at(i);
        outcome.params.push_back(cache.param_at(i));
        outcome.final_moi.push_back(summary.final_moi);
        outcome.final_ipr.push_back(summary.final_ipr);
        outcome.labels.push_back(classify_peaks(summary.final_dist, options.peaks).label);
    }

    for (Method method : options.methods) {
        MethodOutcome mo;
        mo.method = method;
        try {
            double estimate;
            if (is_manual(method)) {
                estimate = run_manual(method, ctx, coarse);
                if (options.refine) {
                    const std::vector<int> merged =
                        merge_indices(coarse, refine_window(ctx, estimate));
                    cache.ensure(merged);
                    estimate = run_manual(method, ctx, merged);
                }
            } else {
                estimate = run_ml(method, ctx);
            }
            mo.ok = true;
            mo.value = estimate;
        } catch (const Error& e) {
            mo.error = e.what();
        }
        outcome.outcomes.push_back(std::move(mo));
    }
    return outcome;
}

ScalingResult scaling_sweep(const ScalingBase& base, const std::vector<int>& n_values,
                            const ScalingOptions& options) {
    if (n_values.size() < 3) {
        throw InsufficientDataError("scaling_sweep needs at least 3 system sizes");
    }
    if (!std::is_sorted(n_values.begin(), n_values.end())) {
        throw InvalidParameterError("n_values must be ascending");
    }
    if (options.seeds < 1) {
        throw InvalidParameterError("scaling_sweep needs seeds >= 1");
    }

    struct PerMethod {
        std::vector<std::pair<double, double>> points;  // (n, median estimate)
        int n_failures = 0;
        std::string first_error;
    };
    std::map<Method, PerMethod> tally;
    ScalingResult result;

    for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
        const int n = n_values[ni];
        std::map<Method, std::vector<double>> per_seed;
        for (int s = 0; s < options.seeds; ++s) {
            ScalingBase sweep_base = base;
            sweep_base.seed =
                stream_seed(stream_seed(base.seed, ni), static_cast<std::uint64_t>(s));
            const SweepOutcome outcome = sweep_detect(sweep_base, n, n, options);
            for (const MethodOutcome& mo : outcome.outcomes) {
                if (mo.ok) {
                    per_seed[mo.method].push_back(mo.value);
                } else if (tally[mo.method].first_error.empty()) {
                    tally[mo.method].first_error = mo.error;
                }
            }
        }
        for (Method method : options.methods) {
            const auto it = per_seed.find(method);
            if (it == per_seed.end() || it->second.empty()) {
                ++tally[method].n_failures;
                continue;
            }
            CriticalEstimate est;
            est.method = method;
            est.n = n;
            est.critical_value = median(it->second);
            est.diagnostics = "median of " + std::to_string(it->second.size()) + "/" +
                              std::to_string(options.seeds) + " seeds";
            tally[method].points.emplace_back(static_cast<double>(n), est.critical_value);
            result.criticals.push_back(est);
        }
    }

    std::stable_sort(result.criticals.begin(), result.criticals.end(),
                     [](const CriticalEstimate& a, const CriticalEstimate& b) {
                         if (a.method != b.method) return a.method < b.method;
                         return a.n < b.n;
                     });

    const double max_failures = 0.25 * static_cast<double>(n_values.size());
    for (Method method : options.methods) {
        MethodScaling ms;
        ms.method = method;
        const PerMethod& pm = tally[method];
        ms.n_failures = pm.n_failures;
        ms.reliable = static_cast<double>(pm.n_failures) <= max_failures;
        if (!ms.reliable) {
            ms.note = "failed on " + std::to_string(pm.n_failures) + "/" +
                      std::to_string(n_values.size()) + " sizes";
            if (!pm.first_error.empty()) ms.note += ": " + pm.first_error;
        }
        try {
            ms.fit = power_law_fit(pm.points);
            ms.fit_ok = true;
        } catch (const Error& e) {
            ms.fit_ok = false;
            if (ms.note.empty()) ms.note = e.what();
        }
        result.fits.push_back(ms);
    }
    return result;
}

}  // namespace qwalk::detect
