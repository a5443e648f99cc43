#include "qwalk/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "qwalk/csvio.hpp"
#include "qwalk/detect.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/ml.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/svg.hpp"

namespace qwalk::cli {

namespace {

using detect::Method;

std::string out_path(const RunOptions& options, const std::string& name) {
    return (std::filesystem::path(options.out_dir) / name).string();
}

void prepare_out_dir(const RunOptions& options) {
    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + options.out_dir);
}

ExperimentConfig effective_config(const ExperimentConfig& config, const RunOptions& options) {
    ExperimentConfig effective = config;
    if (options.seed_override) effective.walk.seed = *options.seed_override;
    validate(effective);
    return effective;
}

void write_run_info(const ExperimentConfig& config, const RunOptions& options,
                    const std::string& command) {
    nlohmann::json info;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(config_hash(config)));
    info["command"] = command;
    info["config_hash"] = hash;
    info["seed"] = config.walk.seed;
    info["version"] = kVersion;
    write_text_file(out_path(options, "run_info.json"), info.dump(2) + "\n");
}

bool resolve_max_normalize(const std::string& flag, const std::string& classifier) {
    if (flag == "on") return true;
    if (flag == "off") return false;
    return classifier == "mlp";  // the convention that helped the MLP in practice
}

detect::ScalingOptions scaling_options_from(const ExperimentConfig& config,
                                            const RunOptions& options,
                                            const std::vector<std::string>& method_names,
                                            int points, bool refine, double param_max) {
    detect::ScalingOptions opt;
    opt.methods.clear();
    for (const std::string& name : method_names) {
        opt.methods.push_back(detect::method_from_string(name));
    }
    opt.grid_points = points;
    opt.refine = refine;
    opt.param_max = param_max;
    opt.realizations = config.realizations;
    opt.threads = options.threads;
    opt.seeds = config.scaling.seeds;
    opt.n_samples = config.ml.n_samples;
    opt.band_width = config.ml.band_width;
    opt.svm = ml::SvmHyper{config.ml.svm.epochs, config.ml.svm.eta0, config.ml.svm.l2,
                           config.ml.holdout_fraction};
    opt.mlp = ml::MlpHyper{config.ml.mlp.hidden,        config.ml.mlp.alpha,
                           config.ml.mlp.batch,         config.ml.mlp.learning_rate,
                           config.ml.mlp.max_epochs,    config.ml.mlp.patience,
                           config.ml.holdout_fraction};
    opt.svm_max_normalize = resolve_max_normalize(config.ml.max_normalize, "svm");
    opt.mlp_max_normalize = resolve_max_normalize(config.ml.max_normalize, "mlp");
    return opt;
}

std::vector<double> scan_grid(double param_max, int points) {
    return detect::make_param_grid(param_max, points);
}

}  // namespace

int cmd_simulate(const ExperimentConfig& raw, const RunOptions& options) {
    const ExperimentConfig config = effective_config(raw, options);
    prepare_out_dir(options);
    const WalkConfig walk = walk_config_from(config.walk);
    const RandomnessModel model = model_from(config.randomness);

    std::fprintf(stderr, "qwalk simulate: n_max=%d n_t=%d kind=%s value=%s x%d\n",
                 walk.n_max, walk.n_t, config.randomness.kind.c_str(),
                 format_double(config.randomness.value).c_str(), config.realizations);

    const EvolutionRecord record =
        config.realizations > 1
            ? ensemble_mean(walk, model, config.realizations, true, options.threads)
            : evolve(walk, model, true);

    CsvWriter dist_csv({"t", "x", "P"});
    for (const ProbabilityDistribution& dist : record.distributions) {
        const int half = dist.half_width();
        for (int x = -half; x <= half; ++x) {
            dist_csv.add_row({std::to_string(dist.time), std::to_string(x),
                              format_double(dist.at(x))});
        }
    }
    dist_csv.write(out_path(options, "distribution.csv"));

    CsvWriter diag_csv({"t", "moi", "ipr"});
    for (std::size_t k = 0; k < record.diagnostics.moi.size(); ++k) {
        diag_csv.add_row({std::to_string(k + 1), format_double(record.diagnostics.moi[k]),
                          format_double(record.diagnostics.ipr[k])});
    }
    diag_csv.write(out_path(options, "diagnostics.csv"));
    write_run_info(config, options, "simulate");

    if (options.plots) {
        std::vector<int> times = config.plots.times;
        if (times.empty()) times.push_back(walk.n_t);
        for (int t : times) {
            const ProbabilityDistribution& dist =
                record.distributions[static_cast<std::size_t>(t - 1)];
            SvgChart chart;
            chart.title = "P(x) at t = " + std::to_string(t);
            chart.x_label = "x";
            chart.y_label = "P(x)";
            SvgSeries series;
            const int half = dist.half_width();
            for (int x = -half; x <= half; ++x) {
                series.x.push_back(x);
                series.y.push_back(dist.at(x));
            }
            chart.series.push_back(std::move(series));
            write_line_chart(out_path(options, "distribution_t" + std::to_string(t) + ".svg"),
                             chart);
        }
        std::vector<double> ts;
        for (std::size_t k = 0; k < record.diagnostics.moi.size(); ++k) {
            ts.push_back(static_cast<double>(k + 1));
        }
        SvgChart moi_chart;
        moi_chart.title = "MoI vs t";
        moi_chart.x_label = "t";
        moi_chart.y_label = "MoI";
        moi_chart.log_x = moi_chart.log_y = true;
        moi_chart.series.push_back(SvgSeries{"", ts, record.diagnostics.moi, "", false, false});
        write_line_chart(out_path(options, "moi_vs_t.svg"), moi_chart);

        SvgChart ipr_chart;
        ipr_chart.title = "IPR vs t";
        ipr_chart.x_label = "t";
        ipr_chart.y_label = "IPR";
        ipr_chart.log_x = ipr_chart.log_y = true;
        ipr_chart.series.push_back(SvgSeries{"", ts, record.diagnostics.ipr, "", false, false});
        write_line_chart(out_path(options, "ipr_vs_t.svg"), ipr_chart);
    }
    return kExitOk;
}

int cmd_sweep(const ExperimentConfig& raw, const RunOptions& options) {
    const ExperimentConfig config = effective_config(raw, options);
    prepare_out_dir(options);

    detect::ScalingBase base{config.walk.theta0, config.walk.phi1, config.walk.phi2,
                             config.walk.seed, kind_from_string(config.randomness.kind)};
    const detect::ScalingOptions opt =
        scaling_options_from(config, options, config.sweep.methods, config.sweep.points,
                             config.sweep.refine, config.sweep.param_max);

    std::fprintf(stderr, "qwalk sweep: n_max=%d n_t=%d kind=%s points=%d\n", config.walk.n_max,
                 config.walk.n_t, config.randomness.kind.c_str(), config.sweep.points);

    const detect::SweepOutcome outcome =
        detect::sweep_detect(base, config.walk.n_max, config.walk.n_t, opt);

    CsvWriter sweep_csv({"param", "moi", "ipr", "peak_label"});
    for (std::size_t i = 0; i < outcome.params.size(); ++i) {
        sweep_csv.add_row({format_double(outcome.params[i]), format_double(outcome.final_moi[i]),
                           format_double(outcome.final_ipr[i]), to_string(outcome.labels[i])});
    }
    sweep_csv.write(out_path(options, "sweep.csv"));

    CsvWriter est_csv({"method", "critical_value", "status"});
    int failures = 0;
    for (const detect::MethodOutcome& mo : outcome.outcomes) {
        if (!mo.ok) ++failures;
        est_csv.add_row({detect::to_string(mo.method),
                         mo.ok ? format_double(mo.value) : "",
                         mo.ok ? "ok" : csv_escape(mo.error)});
    }
    est_csv.write(out_path(options, "estimates.csv"));
    write_run_info(config, options, "sweep");

    if (options.plots) {
        SvgChart moi_chart;
        moi_chart.title = "MoI vs randomness";
        moi_chart.x_label = config.randomness.kind;
        moi_chart.y_label = "MoI";
        moi_chart.log_x = moi_chart.log_y = true;
        moi_chart.series.push_back(
            SvgSeries{"", outcome.params, outcome.final_moi, "", false, true});
        write_line_chart(out_path(options, "moi_vs_param.svg"), moi_chart);

        SvgChart ipr_chart;
        ipr_chart.title = "IPR vs randomness";
        ipr_chart.x_label = config.randomness.kind;
        ipr_chart.y_label = "IPR";
        ipr_chart.series.push_back(
            SvgSeries{"", outcome.params, outcome.final_ipr, "", false, true});
        write_line_chart(out_path(options, "ipr_vs_param.svg"), ipr_chart);
    }
    if (failures == static_cast<int>(outcome.outcomes.size()) && failures > 0) {
        return kExitFailure;
    }
    return failures > 0 ? kExitPartial : kExitOk;
}

namespace {

struct MlContext {
    ModelKind kind;
    double theta0;
    int n_t;
    double param_max;
    double band_width;
    bool max_norm;
    std::uint64_t seed;
};

MlContext ml_context(const ExperimentConfig& config) {
    MlContext ctx;
    ctx.kind = kind_from_string(config.randomness.kind);
    if (ctx.kind == ModelKind::None) {
        throw ConfigError("ml commands need randomness.kind != none");
    }
    ctx.theta0 = config.walk.theta0;
    ctx.n_t = config.walk.n_t;
    ctx.param_max = ml::default_param_max(ctx.kind, ctx.theta0);
    ctx.band_width = config.ml.band_width > 0.0 ? config.ml.band_width
                                                : ml::default_band_width(ctx.kind);
    ctx.max_norm = resolve_max_normalize(config.ml.max_normalize, config.ml.classifier);
    ctx.seed = config.walk.seed;
    return ctx;
}

std::vector<ml::Sample> make_training_set(const ExperimentConfig& config,
                                          const RunOptions& options, const MlContext& ctx,
                                          int n_samples, std::uint64_t seed, int region) {
    ml::GenOptions gen;
    gen.realizations = config.realizations;
    gen.threads = options.threads;
    std::vector<ml::Sample> samples = ml::generate_training_set(
        ctx.kind, ctx.theta0, ctx.n_t, n_samples, ctx.band_width, seed, gen);
    for (ml::Sample& s : samples) {
        if (region != 0) s = ml::region_split(s, region);
        if (ctx.max_norm) s = ml::max_normalize(s);
    }
    return samples;
}

struct Trained {
    ml::AnyClassifier model;
    double holdout_accuracy = 0.0;
};

Trained train_classifier(const ExperimentConfig& config,
                         const std::vector<ml::Sample>& samples, std::uint64_t seed) {
    if (config.ml.classifier == "svm") {
        const ml::SvmHyper hyper{config.ml.svm.epochs, config.ml.svm.eta0, config.ml.svm.l2,
                                 config.ml.holdout_fraction};
        ml::SvmResult result = ml::train_svm(samples, hyper, seed);
        return {ml::AnyClassifier(std::move(result.model)), result.holdout_accuracy};
    }
    const ml::MlpHyper hyper{config.ml.mlp.hidden,        config.ml.mlp.alpha,
                             config.ml.mlp.batch,         config.ml.mlp.learning_rate,
                             config.ml.mlp.max_epochs,    config.ml.mlp.patience,
                             config.ml.holdout_fraction};
    ml::MlpResult result = ml::train_mlp(samples, hyper, seed);
    return {ml::AnyClassifier(std::move(result.model)), result.holdout_accuracy};
}

ml::ScanResult scan_with_refinement(const ml::AnyClassifier& model, const MlContext& ctx,
                                    const ExperimentConfig& config, const RunOptions& options,
                                    int region) {
    ml::ScanOptions scan_opt;
    scan_opt.realizations = config.realizations;
    scan_opt.threads = options.threads;
    scan_opt.region = region;
    const ml::CrossingRule rule = ml::default_rule(model);
    const std::uint64_t scan_seed = mix64(ctx.seed ^ 0x5CA7ull);
    const std::vector<double> coarse = scan_grid(ctx.param_max, config.ml.scan_points);
    ml::ScanResult result =
        ml::confusion_scan(model, ctx.kind, ctx.theta0, coarse, ctx.n_t, scan_seed, rule,
                           scan_opt);
    if (!config.ml.scan_refine) return result;

    const double h = ctx.param_max / static_cast<double>(config.ml.scan_points);
    const double step = h / 5.0;
    std::set<double> params(coarse.begin(), coarse.end());
    const double lo = std::max(step, result.critical_value - 5.0 * h);
    const double hi = std::min(ctx.param_max, result.critical_value + 5.0 * h);
    for (long i = std::lround(std::ceil(lo / step)); step * static_cast<double>(i) <= hi; ++i) {
        params.insert(step * static_cast<double>(i));
    }
    return ml::confusion_scan(model, ctx.kind, ctx.theta0,
                              std::vector<double>(params.begin(), params.end()), ctx.n_t,
                              scan_seed, rule, scan_opt);
}

int ml_train(const ExperimentConfig& config, const RunOptions& options) {
    const MlContext ctx = ml_context(config);
    std::fprintf(stderr, "qwalk ml train: %s, %d samples, n_t=%d\n",
                 config.ml.classifier.c_str(), config.ml.n_samples, ctx.n_t);
    const std::vector<ml::Sample> samples =
        make_training_set(config, options, ctx, config.ml.n_samples, ctx.seed, 0);
    const Trained trained = train_classifier(config, samples, ctx.seed);
    ml::save_model(out_path(options, config.ml.model_file), trained.model);

    const bool warning = trained.holdout_accuracy < 0.9;
    CsvWriter report({"key", "value"});
    report.add_row({"classifier", config.ml.classifier});
    report.add_row({"n_samples", std::to_string(config.ml.n_samples)});
    report.add_row({"band_width", format_double(ctx.band_width)});
    report.add_row({"normalization", ctx.max_norm ? "max" : "sum"});
    report.add_row({"holdout_fraction", format_double(config.ml.holdout_fraction)});
    report.add_row({"holdout_accuracy", format_double(trained.holdout_accuracy)});
    report.add_row({"warning", warning ? "holdout accuracy below 0.9" : ""});
    report.add_row({"seed", std::to_string(ctx.seed)});
    report.write(out_path(options, "train_report.csv"));
    std::fprintf(stderr, "qwalk ml train: holdout accuracy %s\n",
                 format_double(trained.holdout_accuracy).c_str());
    return kExitOk;
}

int ml_scan(const ExperimentConfig& config, const RunOptions& options) {
    const MlContext ctx = ml_context(config);
    const ml::AnyClassifier model = ml::load_model(out_path(options, config.ml.model_file));
    const ml::ScanResult result = scan_with_refinement(model, ctx, config, options, 0);

    CsvWriter curve_csv({"param", "p_delocalized"});
    for (std::size_t i = 0; i < result.curve.param_values.size(); ++i) {
        curve_csv.add_row({format_double(result.curve.param_values[i]),
                           format_double(result.curve.p_delocalized[i])});
    }
    curve_csv.write(out_path(options, "confusion.csv"));

    CsvWriter est_csv({"classifier", "rule", "critical_value"});
    const bool svm = std::holds_alternative<ml::LinearClassifier>(model);
    est_csv.add_row({svm ? "svm" : "mlp", svm ? "p_equal" : "first_below_half",
                     format_double(result.critical_value)});
    est_csv.write(out_path(options, "estimate.csv"));

    if (options.plots) {
        SvgChart chart;
        chart.title = "classification probability";
        chart.x_label = config.randomness.kind;
        chart.y_label = "p(delocalized)";
        chart.series.push_back(SvgSeries{"p(delocalized)", result.curve.param_values,
                                         result.curve.p_delocalized, "", false, true});
        chart.series.push_back(SvgSeries{"critical",
                                         {result.critical_value, result.critical_value},
                                         {0.0, 1.0},
                                         "#d62728",
                                         true,
                                         false});
        write_line_chart(out_path(options, "confusion.svg"), chart);
    }
    std::fprintf(stderr, "qwalk ml scan: critical value %s\n",
                 format_double(result.critical_value).c_str());
    return kExitOk;
}

int ml_samplesize(const ExperimentConfig& config, const RunOptions& options) {
    const MlContext ctx = ml_context(config);
    ml::StudyOptions study;
    study.band_width = ctx.band_width;
    study.scan_points = config.ml.scan_points;
    study.svm = ml::SvmHyper{config.ml.svm.epochs, config.ml.svm.eta0, config.ml.svm.l2,
                             config.ml.holdout_fraction};
    study.threads = options.threads;
    std::fprintf(stderr, "qwalk ml samplesize: %zu sizes x %d repetitions\n",
                 config.ml.sizes.size(), config.ml.repetitions);
    const std::vector<ml::SampleSizeRow> table = ml::sample_size_study(
        ctx.kind, ctx.theta0, ctx.n_t, config.ml.sizes, config.ml.repetitions, ctx.seed, study);

    CsvWriter csv({"size", "repetition", "critical_value"});
    for (const ml::SampleSizeRow& row : table) {
        for (std::size_t r = 0; r < row.estimates.size(); ++r) {
            csv.add_row({std::to_string(row.size), std::to_string(r),
                         format_double(row.estimates[r])});
        }
    }
    csv.write(out_path(options, "samplesize.csv"));
    return kExitOk;
}

int ml_regions(const ExperimentConfig& config, const RunOptions& options) {
    const MlContext ctx = ml_context(config);
    CsvWriter csv({"region", "feature_length", "holdout_accuracy", "critical_value", "status"});
    int failures = 0;
    for (int region = 1; region <= 3; ++region) {
        const std::vector<ml::Sample> samples =
            make_training_set(config, options, ctx, config.ml.n_samples,
                              stream_seed(ctx.seed, static_cast<std::uint64_t>(region)), region);
        const Trained trained = train_classifier(
            config, samples, stream_seed(ctx.seed, static_cast<std::uint64_t>(region)));
        std::string value, status = "ok";
        try {
            const ml::ScanResult scan =
                scan_with_refinement(trained.model, ctx, config, options, region);
            value = format_double(scan.critical_value);
        } catch (const Error& e) {
            status = csv_escape(e.what());
            ++failures;
        }
        csv.add_row({std::to_string(region), std::to_string(samples.front().features.size()),
                     format_double(trained.holdout_accuracy), value, status});
    }
    csv.write(out_path(options, "regions.csv"));
    if (failures == 3) return kExitFailure;
    return failures > 0 ? kExitPartial : kExitOk;
}

}  // namespace

int cmd_ml(const ExperimentConfig& raw, const RunOptions& options,
           const std::string& subaction) {
    const ExperimentConfig config = effective_config(raw, options);
    prepare_out_dir(options);
    write_run_info(config, options, "ml " + subaction);
    if (subaction == "train") return ml_train(config, options);
    if (subaction == "scan") return ml_scan(config, options);
    if (subaction == "samplesize") return ml_samplesize(config, options);
    if (subaction == "regions") return ml_regions(config, options);
    throw ConfigError("unknown ml subaction '" + subaction +
                      "' (expected train|scan|samplesize|regions)");
}

int cmd_scaling(const ExperimentConfig& raw, const RunOptions& options) {
    const ExperimentConfig config = effective_config(raw, options);
    prepare_out_dir(options);
    if (config.scaling.n_values.size() < 3) {
        throw ConfigError("scaling.n_values needs at least 3 sizes for a power-law fit");
    }
    detect::ScalingBase base{config.walk.theta0, config.walk.phi1, config.walk.phi2,
                             config.walk.seed, kind_from_string(config.randomness.kind)};
    const detect::ScalingOptions opt =
        scaling_options_from(config, options, config.scaling.methods, config.scaling.points,
                             config.scaling.refine, config.scaling.param_max);

    std::fprintf(stderr, "qwalk scaling: %zu sizes, %zu methods, %d seed(s)\n",
                 config.scaling.n_values.size(), opt.methods.size(), opt.seeds);
    const detect::ScalingResult result =
        detect::scaling_sweep(base, config.scaling.n_values, opt);

    CsvWriter crit_csv({"method", "n", "critical_value"});
    for (const detect::CriticalEstimate& est : result.criticals) {
        crit_csv.add_row({detect::to_string(est.method), std::to_string(est.n),
                          format_double(est.critical_value)});
    }
    crit_csv.write(out_path(options, "criticals.csv"));

    CsvWriter exp_csv({"method", "exponent", "r_squared", "status"});
    bool any_bad = false;
    for (const detect::MethodScaling& ms : result.fits) {
        if (!ms.fit_ok || !ms.reliable) any_bad = true;
        exp_csv.add_row({detect::to_string(ms.method),
                         ms.fit_ok ? format_double(ms.fit.exponent) : "",
                         ms.fit_ok ? format_double(ms.fit.r_squared) : "",
                         ms.fit_ok && ms.reliable ? "ok" : csv_escape(ms.note)});
    }
    exp_csv.write(out_path(options, "exponents.csv"));
    write_run_info(config, options, "scaling");

    if (options.plots) {
        SvgChart chart;
        chart.title = "critical value vs system size (" + config.randomness.kind + ")";
        chart.x_label = "N";
        chart.y_label = "critical value";
        chart.log_x = chart.log_y = true;
        for (const detect::MethodScaling& ms : result.fits) {
            SvgSeries points;
            points.name = detect::to_string(ms.method);
            points.markers = true;
            for (const detect::CriticalEstimate& est : result.criticals) {
                if (est.method != ms.method) continue;
                points.x.push_back(est.n);
                points.y.push_back(est.critical_value);
            }
            if (points.x.empty()) continue;
            if (ms.fit_ok) {
                SvgSeries line;
                line.dashed = true;
                line.color = "#7f7f7f";
                for (double n = points.x.front(); n <= points.x.back() * 1.0001;
                     n *= 1.1) {
                    line.x.push_back(n);
                    line.y.push_back(ms.fit.prefactor * std::pow(n, -ms.fit.exponent));
                }
                chart.series.push_back(std::move(line));
            }
            chart.series.push_back(std::move(points));
        }
        write_line_chart(out_path(options, "scaling.svg"), chart);
    }

    if (result.criticals.empty()) return kExitFailure;
    return any_bad ? kExitPartial : kExitOk;
}

}  // namespace qwalk::cli
