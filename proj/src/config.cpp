#include "qwalk/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "qwalk/csvio.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/rng.hpp"

namespace qwalk::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& section) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            fail("unknown key '" + key + "' in section '" + section + "'");
        }
    }
}

template <class T>
void read_field(const json& obj, const char* key, T& out, const std::string& section) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        fail("bad value for '" + section + "." + key + "'");
    }
}

void parse_walk(const json& obj, WalkSettings& walk) {
    reject_unknown_keys(obj, {"n_max", "n_t", "theta0", "phi1", "phi2", "seed"}, "walk");
    read_field(obj, "n_max", walk.n_max, "walk");
    read_field(obj, "n_t", walk.n_t, "walk");
    read_field(obj, "theta0", walk.theta0, "walk");
    read_field(obj, "phi1", walk.phi1, "walk");
    read_field(obj, "phi2", walk.phi2, "walk");
    read_field(obj, "seed", walk.seed, "walk");
}

void parse_randomness(const json& obj, RandomnessSettings& randomness) {
    reject_unknown_keys(obj, {"kind", "value"}, "randomness");
    read_field(obj, "kind", randomness.kind, "randomness");
    read_field(obj, "value", randomness.value, "randomness");
}

void parse_sweep(const json& obj, SweepSettings& sweep) {
    reject_unknown_keys(obj, {"param_max", "points", "refine", "methods"}, "sweep");
    read_field(obj, "param_max", sweep.param_max, "sweep");
    read_field(obj, "points", sweep.points, "sweep");
    read_field(obj, "refine", sweep.refine, "sweep");
    read_field(obj, "methods", sweep.methods, "sweep");
}

void parse_svm(const json& obj, SvmSettings& svm) {
    reject_unknown_keys(obj, {"epochs", "eta0", "l2"}, "ml.svm");
    read_field(obj, "epochs", svm.epochs, "ml.svm");
    read_field(obj, "eta0", svm.eta0, "ml.svm");
    read_field(obj, "l2", svm.l2, "ml.svm");
}

void parse_mlp(const json& obj, MlpSettings& mlp) {
    reject_unknown_keys(
        obj, {"hidden", "alpha", "batch", "learning_rate", "max_epochs", "patience"}, "ml.mlp");
    read_field(obj, "hidden", mlp.hidden, "ml.mlp");
    read_field(obj, "alpha", mlp.alpha, "ml.mlp");
    read_field(obj, "batch", mlp.batch, "ml.mlp");
    read_field(obj, "learning_rate", mlp.learning_rate, "ml.mlp");
    read_field(obj, "max_epochs", mlp.max_epochs, "ml.mlp");
    read_field(obj, "patience", mlp.patience, "ml.mlp");
}

void parse_ml(const json& obj, MlSettings& ml) {
    reject_unknown_keys(obj,
                        {"classifier", "n_samples", "band_width", "holdout_fraction",
                         "max_normalize", "model_file", "scan_points", "scan_refine", "sizes",
                         "repetitions", "svm", "mlp"},
                        "ml");
    read_field(obj, "classifier", ml.classifier, "ml");
    read_field(obj, "n_samples", ml.n_samples, "ml");
    read_field(obj, "band_width", ml.band_width, "ml");
    read_field(obj, "holdout_fraction", ml.holdout_fraction, "ml");
    read_field(obj, "max_normalize", ml.max_normalize, "ml");
    read_field(obj, "model_file", ml.model_file, "ml");
    read_field(obj, "scan_points", ml.scan_points, "ml");
    read_field(obj, "scan_refine", ml.scan_refine, "ml");
    read_field(obj, "sizes", ml.sizes, "ml");
    read_field(obj, "repetitions", ml.repetitions, "ml");
    if (obj.contains("svm")) parse_svm(obj.at("svm"), ml.svm);
    if (obj.contains("mlp")) parse_mlp(obj.at("mlp"), ml.mlp);
}

void parse_scaling(const json& obj, ScalingSettings& scaling) {
    reject_unknown_keys(obj, {"n_values", "methods", "seeds", "points", "refine", "param_max"},
                        "scaling");
    read_field(obj, "n_values", scaling.n_values, "scaling");
    read_field(obj, "methods", scaling.methods, "scaling");
    read_field(obj, "seeds", scaling.seeds, "scaling");
    read_field(obj, "points", scaling.points, "scaling");
    read_field(obj, "refine", scaling.refine, "scaling");
    read_field(obj, "param_max", scaling.param_max, "scaling");
}

void parse_plots(const json& obj, PlotSettings& plots) {
    reject_unknown_keys(obj, {"times"}, "plots");
    read_field(obj, "times", plots.times, "plots");
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
    int line = 1, column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        fail("config syntax error at line " + std::to_string(line) + ", column " +
             std::to_string(column) + ": " + e.what());
    }
    if (!root.is_object()) fail("config root must be a JSON object");
    reject_unknown_keys(
        root, {"walk", "randomness", "realizations", "sweep", "ml", "scaling", "plots"},
        "(root)");

    ExperimentConfig config;
    if (root.contains("walk")) parse_walk(root.at("walk"), config.walk);
    if (root.contains("randomness")) parse_randomness(root.at("randomness"), config.randomness);
    read_field(root, "realizations", config.realizations, "(root)");
    if (root.contains("sweep")) parse_sweep(root.at("sweep"), config.sweep);
    if (root.contains("ml")) parse_ml(root.at("ml"), config.ml);
    if (root.contains("scaling")) parse_scaling(root.at("scaling"), config.scaling);
    if (root.contains("plots")) parse_plots(root.at("plots"), config.plots);
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const IoError& e) {
        fail(e.what());
    }
    return parse_config(text);
}

std::string serialize_config(const ExperimentConfig& c) {
    json root;
    root["walk"] = {{"n_max", c.walk.n_max},   {"n_t", c.walk.n_t},
                    {"theta0", c.walk.theta0}, {"phi1", c.walk.phi1},
                    {"phi2", c.walk.phi2},     {"seed", c.walk.seed}};
    root["randomness"] = {{"kind", c.randomness.kind}, {"value", c.randomness.value}};
    root["realizations"] = c.realizations;
    root["sweep"] = {{"param_max", c.sweep.param_max},
                     {"points", c.sweep.points},
                     {"refine", c.sweep.refine},
                     {"methods", c.sweep.methods}};
    root["ml"] = {{"classifier", c.ml.classifier},
                  {"n_samples", c.ml.n_samples},
                  {"band_width", c.ml.band_width},
                  {"holdout_fraction", c.ml.holdout_fraction},
                  {"max_normalize", c.ml.max_normalize},
                  {"model_file", c.ml.model_file},
                  {"scan_points", c.ml.scan_points},
                  {"scan_refine", c.ml.scan_refine},
                  {"sizes", c.ml.sizes},
                  {"repetitions", c.ml.repetitions},
                  {"svm", {{"epochs", c.ml.svm.epochs}, {"eta0", c.ml.svm.eta0}, {"l2", c.ml.svm.l2}}},
                  {"mlp",
                   {{"hidden", c.ml.mlp.hidden},
                    {"alpha", c.ml.mlp.alpha},
                    {"batch", c.ml.mlp.batch},
                    {"learning_rate", c.ml.mlp.learning_rate},
                    {"max_epochs", c.ml.mlp.max_epochs},
                    {"patience", c.ml.mlp.patience}}}};
    root["scaling"] = {{"n_values", c.scaling.n_values}, {"methods", c.scaling.methods},
                       {"seeds", c.scaling.seeds},       {"points", c.scaling.points},
                       {"refine", c.scaling.refine},     {"param_max", c.scaling.param_max}};
    root["plots"] = {{"times", c.plots.times}};
    return root.dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    const std::string text = serialize_config(config);
    return fnv1a(text.data(), text.size());
}

ModelKind kind_from_string(const std::string& kind) {
    if (kind == "none") return ModelKind::None;
    if (kind == "discrete_angle") return ModelKind::DiscreteAngle;
    if (kind == "continuous_angle") return ModelKind::ContinuousAngle;
    if (kind == "random_translation") return ModelKind::RandomTranslation;
    fail("unknown randomness kind '" + kind + "'");
}

RandomnessModel model_from(const RandomnessSettings& randomness) {
    return make_model(kind_from_string(randomness.kind), randomness.value);
}

WalkConfig walk_config_from(const WalkSettings& walk) {
    return WalkConfig{walk.n_max, walk.n_t, walk.theta0, walk.phi1, walk.phi2, walk.seed};
}

void validate(const ExperimentConfig& c) {
    try {
        validate_config(walk_config_from(c.walk));
        validate_model(model_from(c.randomness), c.walk.theta0);
    } catch (const Error& e) {
        fail(e.what());
    }
    if (c.realizations < 1) fail("realizations must be >= 1");

    const ModelKind kind = kind_from_string(c.randomness.kind);
    const bool translation = kind == ModelKind::RandomTranslation;
    if (c.sweep.points < 8) fail("sweep.points must be >= 8");
    if (c.sweep.param_max < 0.0) fail("sweep.param_max must be >= 0");
    if (translation && c.sweep.param_max > 0.5) {
        fail("sweep.param_max must be <= 0.5 for random translation");
    }
    if (kind == ModelKind::DiscreteAngle && c.sweep.param_max > c.walk.theta0) {
        fail("sweep.param_max must be <= theta0 for discrete rotation");
    }
    for (const std::string& m : c.sweep.methods) {
        if (m != "human" && m != "moi" && m != "ipr") {
            fail("sweep.methods entries must be human|moi|ipr, got '" + m + "'");
        }
    }

    if (c.ml.classifier != "svm" && c.ml.classifier != "mlp") {
        fail("ml.classifier must be svm or mlp");
    }
    if (c.ml.n_samples < 2 || c.ml.n_samples % 2 != 0) fail("ml.n_samples must be even, >= 2");
    if (c.ml.band_width < 0.0) fail("ml.band_width must be >= 0");
    if (c.ml.holdout_fraction <= 0.0 || c.ml.holdout_fraction >= 1.0) {
        fail("ml.holdout_fraction must lie in (0, 1)");
    }
    if (c.ml.max_normalize != "auto" && c.ml.max_normalize != "on" &&
        c.ml.max_normalize != "off") {
        fail("ml.max_normalize must be auto|on|off");
    }
    if (c.ml.scan_points < 2) fail("ml.scan_points must be >= 2");
    if (c.ml.repetitions < 1) fail("ml.repetitions must be >= 1");
    if (c.ml.sizes.empty() || !std::is_sorted(c.ml.sizes.begin(), c.ml.sizes.end())) {
        fail("ml.sizes must be a non-empty ascending list");
    }
    for (int s : c.ml.sizes) {
        if (s < 2 || s % 2 != 0) fail("ml.sizes entries must be even and >= 2");
    }
    if (c.ml.svm.epochs < 1 || c.ml.svm.eta0 <= 0.0 || c.ml.svm.l2 < 0.0) {
        fail("bad ml.svm hyper-parameters");
    }
    if (c.ml.mlp.batch < 1 || c.ml.mlp.learning_rate <= 0.0 || c.ml.mlp.max_epochs < 1 ||
        c.ml.mlp.patience < 1 || c.ml.mlp.alpha < 0.0 || c.ml.mlp.hidden.empty()) {
        fail("bad ml.mlp hyper-parameters");
    }

    if (c.scaling.n_values.empty() ||
        !std::is_sorted(c.scaling.n_values.begin(), c.scaling.n_values.end())) {
        fail("scaling.n_values must be a non-empty ascending list");
    }
    for (int n : c.scaling.n_values) {
        if (n < 8) fail("scaling.n_values entries must be >= 8");
    }
    for (const std::string& m : c.scaling.methods) {
        if (m != "human" && m != "moi" && m != "ipr" && m != "svm" && m != "mlp") {
            fail("scaling.methods entries must be human|moi|ipr|svm|mlp, got '" + m + "'");
        }
    }
    if (c.scaling.seeds < 1) fail("scaling.seeds must be >= 1");
    if (c.scaling.points < 8) fail("scaling.points must be >= 8");
    if (c.scaling.param_max < 0.0) fail("scaling.param_max must be >= 0");
    if (translation && c.scaling.param_max > 0.5) {
        fail("scaling.param_max must be <= 0.5 for random translation");
    }

    for (int t : c.plots.times) {
        if (t < 1 || t > c.walk.n_t) fail("plots.times entries must lie in [1, n_t]");
    }
}

}  // namespace qwalk::cli
