#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qwalk/errors.hpp"
#include "qwalk/ml.hpp"

namespace qwalk::ml {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

std::string hex64(std::uint64_t v) {
    std::ostringstream out;
    out << std::hex << v;
    return out.str();
}

std::uint64_t parse_hex64(const std::string& s) {
    return std::stoull(s, nullptr, 16);
}

Normalization norm_from_string(const std::string& s) {
    if (s == "sum") return Normalization::Sum;
    if (s == "max") return Normalization::Max;
    throw IoError("model file: unknown normalization '" + s + "'");
}

json svm_to_json(const LinearClassifier& m) {
    json j;
    j["format_version"] = kFormatVersion;
    j["kind"] = "svm";
    j["normalization"] = to_string(m.norm);
    j["weights"] = m.weights;
    j["bias"] = m.bias;
    j["clip"] = {m.clip_lo, m.clip_hi};
    j["warning"] = m.warning;
    j["hyper"] = {{"epochs", m.hyper.epochs},
                  {"eta0", m.hyper.eta0},
                  {"l2", m.hyper.l2},
                  {"holdout_fraction", m.hyper.holdout_fraction}};
    j["train_seed"] = m.train_seed;
    j["fingerprint"] = hex64(m.fingerprint);
    return j;
}

json mlp_to_json(const MlpClassifier& m) {
    json j;
    j["format_version"] = kFormatVersion;
    j["kind"] = "mlp";
    j["normalization"] = to_string(m.norm);
    j["layer_sizes"] = m.layer_sizes;
    j["weights"] = m.weights;
    j["biases"] = m.biases;
    j["alpha"] = m.l2_alpha;
    j["warning"] = m.warning;
    j["hyper"] = {{"hidden", m.hyper.hidden},
                  {"alpha", m.hyper.alpha},
                  {"batch", m.hyper.batch},
                  {"learning_rate", m.hyper.learning_rate},
                  {"max_epochs", m.hyper.max_epochs},
                  {"patience", m.hyper.patience},
                  {"holdout_fraction", m.hyper.holdout_fraction}};
    j["train_seed"] = m.train_seed;
    j["fingerprint"] = hex64(m.fingerprint);
    return j;
}

LinearClassifier svm_from_json(const json& j) {
    LinearClassifier m;
    m.norm = norm_from_string(j.at("normalization").get<std::string>());
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.clip_lo = j.at("clip").at(0).get<double>();
    m.clip_hi = j.at("clip").at(1).get<double>();
    m.warning = j.at("warning").get<bool>();
    const json& h = j.at("hyper");
    m.hyper.epochs = h.at("epochs").get<int>();
    m.hyper.eta0 = h.at("eta0").get<double>();
    m.hyper.l2 = h.at("l2").get<double>();
    m.hyper.holdout_fraction = h.at("holdout_fraction").get<double>();
    m.train_seed = j.at("train_seed").get<std::uint64_t>();
    m.fingerprint = parse_hex64(j.at("fingerprint").get<std::string>());
    return m;
}

MlpClassifier mlp_from_json(const json& j) {
    MlpClassifier m;
    m.norm = norm_from_string(j.at("normalization").get<std::string>());
    m.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    m.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    m.l2_alpha = j.at("alpha").get<double>();
    m.warning = j.at("warning").get<bool>();
    const json& h = j.at("hyper");
    m.hyper.hidden = h.at("hidden").get<std::vector<int>>();
    m.hyper.alpha = h.at("alpha").get<double>();
    m.hyper.batch = h.at("batch").get<int>();
    m.hyper.learning_rate = h.at("learning_rate").get<double>();
    m.hyper.max_epochs = h.at("max_epochs").get<int>();
    m.hyper.patience = h.at("patience").get<int>();
    m.hyper.holdout_fraction = h.at("holdout_fraction").get<double>();
    m.train_seed = j.at("train_seed").get<std::uint64_t>();
    m.fingerprint = parse_hex64(j.at("fingerprint").get<std::string>());
    if (m.weights.size() + 1 != m.layer_sizes.size() || m.biases.size() != m.weights.size()) {
        throw IoError("model file: layer shapes do not chain");
    }
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        const std::size_t nin = static_cast<std::size_t>(m.layer_sizes[l]);
        const std::size_t nout = static_cast<std::size_t>(m.layer_sizes[l + 1]);
        if (m.weights[l].size() != nin * nout || m.biases[l].size() != nout) {
            throw IoError("model file: weight matrix size mismatch at layer " +
                          std::to_string(l));
        }
    }
    return m;
}

}  // namespace

void save_model(const std::string& path, const AnyClassifier& model) {
    const json j = std::holds_alternative<LinearClassifier>(model)
                       ? svm_to_json(std::get<LinearClassifier>(model))
                       : mlp_to_json(std::get<MlpClassifier>(model));
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing model file: " + path);
}

AnyClassifier load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("model file parse error: " + std::string(e.what()));
    }
    if (!j.contains("format_version") || j.at("format_version").get<int>() != kFormatVersion) {
        throw IoError("model file: unsupported format version");
    }
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "svm") return svm_from_json(j);
        if (kind == "mlp") return mlp_from_json(j);
    } catch (const json::exception& e) {
        throw IoError("model file: " + std::string(e.what()));
    }
    throw IoError("model file: unknown kind '" + kind + "'");
}

}  // namespace qwalk::ml
