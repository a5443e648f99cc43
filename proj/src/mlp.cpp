#include <algorithm>
#include <cmath>
#include <limits>

#include "ml_internal.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/ml.hpp"
#include "qwalk/rng.hpp"

namespace qwalk::ml {

namespace {

struct Batch {
    std::vector<double> data;  // rows x cols, row-major
    int rows = 0;
    int cols = 0;
    double* row(int i) { return data.data() + static_cast<std::size_t>(i) * cols; }
    const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * cols; }
};

// out[i][j] = sum_k in[i][k] * w[k][j] + b[j], with w input-major so every
// inner loop walks contiguous memory.
void affine_forward(const Batch& in, const std::vector<double>& w, const std::vector<double>& b,
                    Batch& out) {
    const int rows = in.rows, nin = in.cols, nout = static_cast<int>(b.size());
    out.rows = rows;
    out.cols = nout;
    out.data.assign(static_cast<std::size_t>(rows) * nout, 0.0);
    for (int i = 0; i < rows; ++i) {
        const double* a = in.row(i);
        double* o = out.row(i);
        for (int j = 0; j < nout; ++j) o[j] = b[static_cast<std::size_t>(j)];
        for (int k = 0; k < nin; ++k) {
            const double aik = a[k];
            if (aik == 0.0) continue;
            const double* wrow = w.data() + static_cast<std::size_t>(k) * nout;
            for (int j = 0; j < nout; ++j) o[j] += aik * wrow[j];
        }
    }
}

void relu_inplace(Batch& b) {
    for (double& v : b.data) v = v > 0.0 ? v : 0.0;
}

// Row-wise stable softmax of two logits plus the mean cross entropy.
double softmax2_ce(Batch& logits, const std::vector<int>& labels) {
    double ce = 0.0;
    for (int i = 0; i < logits.rows; ++i) {
        double* z = logits.row(i);
        const double m = std::max(z[0], z[1]);
        const double e0 = std::exp(z[0] - m);
        const double e1 = std::exp(z[1] - m);
        const double sum = e0 + e1;
        const double log_p = (labels[static_cast<std::size_t>(i)] == 0 ? z[0] : z[1]) - m -
                             std::log(sum);
        ce -= log_p;
        z[0] = e0 / sum;
        z[1] = e1 / sum;
    }
    return ce / static_cast<double>(logits.rows);
}

Batch make_batch(const std::vector<const double*>& rows, int cols) {
    Batch b;
    b.rows = static_cast<int>(rows.size());
    b.cols = cols;
    b.data.resize(static_cast<std::size_t>(b.rows) * cols);
    for (int i = 0; i < b.rows; ++i) {
        std::copy(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(i)] + cols,
                  b.row(i));
    }
    return b;
}

struct ForwardPass {
    std::vector<Batch> acts;  // acts[0] = input, acts.back() = softmax rows
    double ce = 0.0;
};

ForwardPass forward(const MlpClassifier& net, const std::vector<const double*>& rows,
                    const std::vector<int>& labels) {
    const int layers = static_cast<int>(net.weights.size());
    ForwardPass pass;
    pass.acts.resize(static_cast<std::size_t>(layers) + 1);
    pass.acts[0] = make_batch(rows, net.layer_sizes.front());
    for (int l = 0; l < layers; ++l) {
        affine_forward(pass.acts[static_cast<std::size_t>(l)],
                       net.weights[static_cast<std::size_t>(l)],
                       net.biases[static_cast<std::size_t>(l)],
                       pass.acts[static_cast<std::size_t>(l) + 1]);
        if (l + 1 < layers) relu_inplace(pass.acts[static_cast<std::size_t>(l) + 1]);
    }
    pass.ce = softmax2_ce(pass.acts.back(), labels);
    return pass;
}

double weight_penalty(const MlpClassifier& net) {
    double sq = 0.0;
    for (const std::vector<double>& w : net.weights) {
        for (double v : w) sq += v * v;
    }
    return 0.5 * net.l2_alpha * sq;
}

}  // namespace

std::pair<double, double> MlpClassifier::probabilities(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != layer_sizes.front()) {
        throw InvalidParameterError("feature length does not match the network input layer");
    }
    std::vector<double> a(x.begin(), x.end());
    std::vector<double> next;
    const int layers = static_cast<int>(weights.size());
    for (int l = 0; l < layers; ++l) {
        const int nin = layer_sizes[static_cast<std::size_t>(l)];
        const int nout = layer_sizes[static_cast<std::size_t>(l) + 1];
        next.assign(static_cast<std::size_t>(nout), 0.0);
        const std::vector<double>& w = weights[static_cast<std::size_t>(l)];
        for (int j = 0; j < nout; ++j) next[static_cast<std::size_t>(j)] =
            biases[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
        for (int k = 0; k < nin; ++k) {
            const double ak = a[static_cast<std::size_t>(k)];
            if (ak == 0.0) continue;
            const double* wrow = w.data() + static_cast<std::size_t>(k) * nout;
            for (int j = 0; j < nout; ++j) next[static_cast<std::size_t>(j)] += ak * wrow[j];
        }
        if (l + 1 < layers) {
            for (double& v : next) v = v > 0.0 ? v : 0.0;
        }
        a.swap(next);
    }
    const double m = std::max(a[0], a[1]);
    const double e0 = std::exp(a[0] - m);
    const double e1 = std::exp(a[1] - m);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

MlpGradients mlp_loss_and_grad(const MlpClassifier& net, const std::vector<const double*>& rows,
                               const std::vector<int>& labels) {
    if (rows.empty() || rows.size() != labels.size()) {
        throw InvalidParameterError("mlp_loss_and_grad: empty or misaligned batch");
    }
    const int layers = static_cast<int>(net.weights.size());
    const int batch = static_cast<int>(rows.size());
    ForwardPass pass = forward(net, rows, labels);

    MlpGradients grads;
    grads.loss = pass.ce + weight_penalty(net);
    grads.d_weights.resize(static_cast<std::size_t>(layers));
    grads.d_biases.resize(static_cast<std::size_t>(layers));

    // delta starts as (softmax - onehot) / batch.
    Batch delta = pass.acts.back();
    for (int i = 0; i < batch; ++i) {
        delta.row(i)[labels[static_cast<std::size_t>(i)]] -= 1.0;
        delta.row(i)[0] /= batch;
        delta.row(i)[1] /= batch;
    }

    for (int l = layers - 1; l >= 0; --l) {
        const Batch& a = pass.acts[static_cast<std::size_t>(l)];
        const int nin = a.cols, nout = delta.cols;
        std::vector<double>& dw = grads.d_weights[static_cast<std::size_t>(l)];
        std::vector<double>& db = grads.d_biases[static_cast<std::size_t>(l)];
        dw.assign(static_cast<std::size_t>(nin) * nout, 0.0);
        db.assign(static_cast<std::size_t>(nout), 0.0);
        for (int i = 0; i < batch; ++i) {
            const double* ar = a.row(i);
            const double* dr = delta.row(i);
            for (int j = 0; j < nout; ++j) db[static_cast<std::size_t>(j)] += dr[j];
            for (int k = 0; k < nin; ++k) {
                const double aik = ar[k];
                if (aik == 0.0) continue;
                double* dwrow = dw.data() + static_cast<std::size_t>(k) * nout;
                for (int j = 0; j < nout; ++j) dwrow[j] += aik * dr[j];
            }
        }
        const std::vector<double>& w = net.weights[static_cast<std::size_t>(l)];
        for (std::size_t i = 0; i < w.size(); ++i) dw[i] += net.l2_alpha * w[i];
        if (l > 0) {
            Batch prev;
            prev.rows = batch;
            prev.cols = nin;
            prev.data.assign(static_cast<std::size_t>(batch) * nin, 0.0);
            for (int i = 0; i < batch; ++i) {
                const double* dr = delta.row(i);
                const double* ar = a.row(i);
                double* pr = prev.row(i);
                for (int k = 0; k < nin; ++k) {
                    if (ar[k] <= 0.0) continue;  // rectifier gate
                    const double* wrow = w.data() + static_cast<std::size_t>(k) * nout;
                    double acc = 0.0;
                    for (int j = 0; j < nout; ++j) acc += dr[j] * wrow[j];
                    pr[k] = acc;
                }
            }
            delta = std::move(prev);
        }
    }
    return grads;
}

double mlp_loss(const MlpClassifier& net, const std::vector<const double*>& rows,
                const std::vector<int>& labels) {
    ForwardPass pass = forward(net, rows, labels);
    return pass.ce + weight_penalty(net);
}

namespace {

MlpClassifier build_network(int input_dim, const MlpHyper& hyper, Normalization norm,
                            std::uint64_t seed) {
    MlpClassifier net;
    net.layer_sizes.push_back(input_dim);
    for (int h : hyper.hidden) {
        if (h < 1) throw InvalidParameterError("hidden layer sizes must be positive");
        net.layer_sizes.push_back(h);
    }
    net.layer_sizes.push_back(2);
    net.l2_alpha = hyper.alpha;
    net.norm = norm;
    net.hyper = hyper;
    net.train_seed = seed;
    SplitMix64 rng(stream_seed(seed, 0x1417));
    for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
        const int nin = net.layer_sizes[l];
        const int nout = net.layer_sizes[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(nin + nout));
        std::vector<double> w(static_cast<std::size_t>(nin) * nout);
        for (double& v : w) v = (2.0 * rng.uniform01() - 1.0) * limit;
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(static_cast<std::size_t>(nout), 0.0);
    }
    return net;
}

struct AdamState {
    std::vector<std::vector<double>> mw, vw, mb, vb;
    long step = 0;
};

void adam_update(MlpClassifier& net, const MlpGradients& grads, AdamState& state,
                 double learning_rate) {
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    ++state.step;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        auto update = [&](std::vector<double>& param, const std::vector<double>& grad,
                          std::vector<double>& m, std::vector<double>& v) {
            for (std::size_t i = 0; i < param.size(); ++i) {
                m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grad[i];
                v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
                param[i] -= learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kEps);
            }
        };
        update(net.weights[l], grads.d_weights[l], state.mw[l], state.vw[l]);
        update(net.biases[l], grads.d_biases[l], state.mb[l], state.vb[l]);
    }
}

double batch_ce(const MlpClassifier& net, const std::vector<const double*>& rows,
                const std::vector<int>& labels) {
    return forward(net, rows, labels).ce;
}

}  // namespace

MlpResult train_mlp(const std::vector<Sample>& samples, const MlpHyper& hyper,
                    std::uint64_t seed) {
    if (hyper.batch < 1 || hyper.max_epochs < 1 || hyper.patience < 1 ||
        hyper.learning_rate <= 0.0 || hyper.alpha < 0.0 ||
        hyper.holdout_fraction <= 0.0 || hyper.holdout_fraction >= 1.0) {
        throw InvalidParameterError("train_mlp: bad hyper-parameters");
    }
    const internal::SplitResult split =
        internal::stratified_split(samples, hyper.holdout_fraction, seed);
    const int dim = static_cast<int>(samples.front().features.size());
    for (const Sample& s : samples) {
        if (static_cast<int>(s.features.size()) != dim) {
            throw InvalidParameterError("all samples must have the same feature length");
        }
    }

    MlpClassifier net = build_network(dim, hyper, samples.front().norm, seed);
    net.fingerprint = samples_fingerprint(samples);

    AdamState adam;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        adam.mw.emplace_back(net.weights[l].size(), 0.0);
        adam.vw.emplace_back(net.weights[l].size(), 0.0);
        adam.mb.emplace_back(net.biases[l].size(), 0.0);
        adam.vb.emplace_back(net.biases[l].size(), 0.0);
    }

    std::vector<const double*> val_rows;
    std::vector<int> val_labels;
    for (int idx : split.holdout) {
        val_rows.push_back(samples[static_cast<std::size_t>(idx)].features.data());
        val_labels.push_back(samples[static_cast<std::size_t>(idx)].label);
    }

    std::vector<int> order = split.train;
    SplitMix64 shuffler(stream_seed(seed, 0x0DD));
    double best_val = std::numeric_limits<double>::infinity();
    MlpClassifier best = net;
    int stale = 0;

    for (int epoch = 0; epoch < hyper.max_epochs; ++epoch) {
        internal::shuffle_indices(order, shuffler);
        for (std::size_t pos = 0; pos < order.size(); pos += static_cast<std::size_t>(hyper.batch)) {
            const std::size_t end =
                std::min(order.size(), pos + static_cast<std::size_t>(hyper.batch));
            std::vector<const double*> rows;
            std::vector<int> labels;
            rows.reserve(end - pos);
            labels.reserve(end - pos);
            for (std::size_t k = pos; k < end; ++k) {
                rows.push_back(samples[static_cast<std::size_t>(order[k])].features.data());
                labels.push_back(samples[static_cast<std::size_t>(order[k])].label);
            }
            const MlpGradients grads = mlp_loss_and_grad(net, rows, labels);
            if (!std::isfinite(grads.loss)) {
                throw TrainingFailedError("MLP training diverged (non-finite loss)");
            }
            adam_update(net, grads, adam, hyper.learning_rate);
        }
        const double val = batch_ce(net, val_rows, val_labels);
        if (!std::isfinite(val)) {
            throw TrainingFailedError("MLP training diverged (non-finite validation loss)");
        }
        if (val < best_val - 1e-6) {
            best_val = val;
            best = net;
            stale = 0;
        } else if (++stale >= hyper.patience) {
            break;
        }
    }

    int correct = 0;
    for (std::size_t i = 0; i < val_rows.size(); ++i) {
        const auto [p0, p1] = best.probabilities(
            std::span<const double>(val_rows[i], static_cast<std::size_t>(dim)));
        const int predicted = p1 > p0 ? 1 : 0;
        if (predicted == val_labels[i]) ++correct;
    }
    const double accuracy = static_cast<double>(correct) / static_cast<double>(val_rows.size());
    best.warning = accuracy < 0.9;
    return MlpResult{std::move(best), accuracy};
}

GridSearchResult mlp_grid_search(const std::vector<Sample>& samples,
                                 const std::vector<std::vector<int>>& hidden_candidates,
                                 const std::vector<double>& alpha_candidates,
                                 const MlpHyper& base, std::uint64_t seed) {
    if (hidden_candidates.empty() || alpha_candidates.empty()) {
        throw InvalidParameterError("grid search needs at least one candidate per axis");
    }
    GridSearchResult result;
    result.best_accuracy = -1.0;
    for (const std::vector<int>& hidden : hidden_candidates) {
        for (double alpha : alpha_candidates) {
            MlpHyper hyper = base;
            hyper.hidden = hidden;
            hyper.alpha = alpha;
            const MlpResult trained = train_mlp(samples, hyper, seed);
            result.tried.push_back({hidden, alpha, trained.holdout_accuracy});
            if (trained.holdout_accuracy > result.best_accuracy) {
                result.best_accuracy = trained.holdout_accuracy;
                result.best = hyper;
            }
        }
    }
    return result;
}

}  // namespace qwalk::ml
