#pragma once

// Deep feed-forward binary classifier, written out in full: tanh hidden
// layers, two independent sigmoid output nodes, per-node binary cross
// entropy with an l2 penalty on weights, mini-batch SGD with heavy-ball
// momentum and recursive epoch-based learning rate decay
//   mu_e = mu_{e-1} / (1 + decay * e).
// Training and initialization draw from seeded generators only, so a fixed
// seed reproduces the whole trajectory.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lagtrend/dataset.hpp"
#include "lagtrend/matrix.hpp"
#include "lagtrend/rng.hpp"

namespace lagtrend {

struct NetworkConfig {
    std::size_t input_dim = 0;
    int hidden_layers = 10;
    int hidden_width = 400;
    static constexpr int output_dim = 2;

    void validate() const {
        if (input_dim < 1 || hidden_layers < 1 || hidden_width < 1)
            throw std::runtime_error("network config: all dimensions must be >= 1");
    }

    // in/out width of weight layer l, l in [0, hidden_layers]
    std::size_t layer_in(std::size_t l) const {
        return l == 0 ? input_dim : static_cast<std::size_t>(hidden_width);
    }
    std::size_t layer_out(std::size_t l) const {
        return l == static_cast<std::size_t>(hidden_layers) ? static_cast<std::size_t>(output_dim)
                                                           : static_cast<std::size_t>(hidden_width);
    }
};

struct Network {
    NetworkConfig config;
    std::vector<Matrix> weights;                // layer l: out x in
    std::vector<std::vector<double>> biases;    // layer l: out

    std::size_t layer_count() const { return weights.size(); }
};

// Weights ~ N(0, 2 / fan_in), biases exactly 0.
inline Network init_network(const NetworkConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Network net;
    net.config = cfg;
    Rng rng(derive_seed(seed, hash_string("mlp-init")));
    const std::size_t layers = static_cast<std::size_t>(cfg.hidden_layers) + 1;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = cfg.layer_in(l), out = cfg.layer_out(l);
        Matrix w(out, in);
        const double stddev = std::sqrt(2.0 / static_cast<double>(in));
        for (auto& v : w.data) v = stddev * rng.next_gaussian();
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(out, 0.0);
    }
    return net;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Post-activation values per layer; activations[0] is the input row.
struct ForwardCache {
    std::vector<std::vector<double>> activations;
};

inline std::vector<double> forward(const Network& net, std::span<const double> input, ForwardCache* cache = nullptr) {
    if (input.size() != net.config.input_dim) throw std::runtime_error("forward: input dimension mismatch");
    if (cache) {
        cache->activations.resize(net.layer_count() + 1);
        cache->activations[0].assign(input.begin(), input.end());
    }
    std::vector<double> cur(input.begin(), input.end());
    std::vector<double> next;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const Matrix& w = net.weights[l];
        const auto& b = net.biases[l];
        next.assign(w.rows, 0.0);
        for (std::size_t o = 0; o < w.rows; ++o) {
            const double* wr = w.data.data() + o * w.cols;
            double z = b[o];
            for (std::size_t i = 0; i < w.cols; ++i) z += wr[i] * cur[i];
            next[o] = (l + 1 == net.layer_count()) ? sigmoid(z) : std::tanh(z);
        }
        cur.swap(next);
        if (cache) cache->activations[l + 1] = cur;
    }
    return cur;
}

inline double weight_sq_sum(const Network& net) {
    double s = 0.0;
    for (const auto& w : net.weights)
        for (double v : w.data) s += v * v;
    return s;
}

inline double node_bce(double p, double y) {
    constexpr double eps = 1e-300;
    return -(y * std::log(std::max(p, eps)) + (1.0 - y) * std::log(std::max(1.0 - p, eps)));
}

// Mean BCE over the two output nodes.
inline double output_bce(std::span<const double> outputs, std::span<const double> label) {
    return 0.5 * (node_bce(outputs[0], label[0]) + node_bce(outputs[1], label[1]));
}

// Per-row loss: mean per-node cross entropy plus (l2/2) * sum of squared
// weights. Biases carry no penalty.
inline double loss(std::span<const double> outputs, std::span<const double> label, const Network& net, double l2) {
    return output_bce(outputs, label) + 0.5 * l2 * weight_sq_sum(net);
}

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

inline Gradients zero_gradients(const Network& net) {
    Gradients g;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        g.weights.emplace_back(net.weights[l].rows, net.weights[l].cols);
        g.biases.emplace_back(net.biases[l].size(), 0.0);
    }
    return g;
}

// Exact gradients of  (1/|rows|) sum_rows output_bce + (l2/2) sum w^2.
// Returns the data loss term (without the penalty) for monitoring.
inline double backprop(const Network& net, const Matrix& inputs, const Matrix& labels,
                       std::span<const std::size_t> rows, double l2, Gradients& out) {
    if (rows.empty()) throw std::runtime_error("backprop: empty batch");
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        std::fill(out.weights[l].data.begin(), out.weights[l].data.end(), 0.0);
        std::fill(out.biases[l].begin(), out.biases[l].end(), 0.0);
    }
    const double inv_batch = 1.0 / static_cast<double>(rows.size());
    double data_loss = 0.0;
    ForwardCache cache;
    std::vector<double> delta, delta_prev;
    for (std::size_t r : rows) {
        const auto outputs = forward(net, inputs.row(r), &cache);
        const auto label = labels.row(r);
        data_loss += output_bce(outputs, label);
        // d(mean-node BCE)/dz at the sigmoid outputs: (p - y) / 2
        delta.assign(2, 0.0);
        delta[0] = (outputs[0] - label[0]) * 0.5 * inv_batch;
        delta[1] = (outputs[1] - label[1]) * 0.5 * inv_batch;
        for (std::size_t l = net.layer_count(); l-- > 0;) {
            const Matrix& w = net.weights[l];
            const auto& a_prev = cache.activations[l];
            Matrix& gw = out.weights[l];
            auto& gb = out.biases[l];
            for (std::size_t o = 0; o < w.rows; ++o) {
                const double d = delta[o];
                gb[o] += d;
                double* gwr = gw.data.data() + o * w.cols;
                for (std::size_t i = 0; i < w.cols; ++i) gwr[i] += d * a_prev[i];
            }
            if (l > 0) {
                delta_prev.assign(w.cols, 0.0);
                for (std::size_t o = 0; o < w.rows; ++o) {
                    const double d = delta[o];
                    const double* wr = w.data.data() + o * w.cols;
                    for (std::size_t i = 0; i < w.cols; ++i) delta_prev[i] += wr[i] * d;
                }
                // back through tanh: dtanh(z) = 1 - a^2
                for (std::size_t i = 0; i < w.cols; ++i) {
                    const double a = cache.activations[l][i];
                    delta_prev[i] *= 1.0 - a * a;
                }
                delta.swap(delta_prev);
            }
        }
    }
    if (l2 != 0.0)
        for (std::size_t l = 0; l < net.layer_count(); ++l)
            for (std::size_t i = 0; i < net.weights[l].data.size(); ++i)
                out.weights[l].data[i] += l2 * net.weights[l].data[i];
    return data_loss * inv_batch;
}

// One decay step of the recursive schedule.
inline double lr_schedule(double mu_prev, double decay, long long epoch) {
    return mu_prev / (1.0 + decay * static_cast<double>(epoch));
}

struct TrainConfig {
    double initial_learning_rate = 0.01;
    double decay_coefficient = 0.001;
    double momentum = 0.9;
    double l2 = 1e-4;
    int batch_size = 32;
    int max_epochs = 500;
    int patience = 20;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(initial_learning_rate > 0.0)) throw std::runtime_error("train config: learning rate must be positive");
        if (decay_coefficient < 0.0) throw std::runtime_error("train config: decay must be >= 0");
        if (momentum < 0.0 || momentum >= 1.0) throw std::runtime_error("train config: momentum must be in [0,1)");
        if (l2 < 0.0) throw std::runtime_error("train config: l2 must be >= 0");
        if (batch_size < 1 || max_epochs < 1 || patience < 1)
            throw std::runtime_error("train config: batch_size, max_epochs, patience must be >= 1");
    }
};

// Optimizer state. Kept separate from the network so walk-forward updates
// can continue momentum, the decay schedule and the shuffle stream across
// calls.
struct SgdState {
    Gradients velocity;
    Gradients scratch;
    double learning_rate = 0.0;
    long long epochs_done = 0;
    Rng rng;

    SgdState(const Network& net, const TrainConfig& cfg)
        : velocity(zero_gradients(net)),
          scratch(zero_gradients(net)),
          learning_rate(cfg.initial_learning_rate),
          rng(derive_seed(cfg.seed, hash_string("mlp-sgd"))) {}
};

// One epoch of shuffled mini-batch SGD; returns the mean batch data loss.
inline double train_one_epoch(Network& net, SgdState& st, const TrainConfig& cfg, const Matrix& inputs,
                              const Matrix& labels, const std::vector<std::size_t>& train_rows) {
    if (train_rows.empty()) throw std::runtime_error("train: empty training split");
    ++st.epochs_done;
    st.learning_rate = lr_schedule(st.learning_rate, cfg.decay_coefficient, st.epochs_done);

    std::vector<std::size_t> order = train_rows;
    st.rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
        const std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), order.size() - start);
        loss_sum += backprop(net, inputs, labels, {order.data() + start, len}, cfg.l2, st.scratch);
        ++n_batches;
        for (std::size_t l = 0; l < net.layer_count(); ++l) {
            auto& v = st.velocity.weights[l].data;
            auto& g = st.scratch.weights[l].data;
            auto& w = net.weights[l].data;
            for (std::size_t i = 0; i < w.size(); ++i) {
                v[i] = cfg.momentum * v[i] - st.learning_rate * g[i];
                w[i] += v[i];
            }
            auto& vb = st.velocity.biases[l];
            auto& gb = st.scratch.biases[l];
            auto& b = net.biases[l];
            for (std::size_t i = 0; i < b.size(); ++i) {
                vb[i] = cfg.momentum * vb[i] - st.learning_rate * gb[i];
                b[i] += vb[i];
            }
        }
    }
    return loss_sum / static_cast<double>(n_batches);
}

// Fixed number of epochs, no early stopping; the walk-forward update step.
inline void train_epochs(Network& net, SgdState& st, const TrainConfig& cfg, const Matrix& inputs,
                         const Matrix& labels, const std::vector<std::size_t>& train_rows, int epochs) {
    for (int e = 0; e < epochs; ++e) train_one_epoch(net, st, cfg, inputs, labels, train_rows);
}

inline int predict_row(const Network& net, std::span<const double> input) {
    const auto out = forward(net, input);
    return out[kClassUp] > out[kClassDown] ? kClassUp : kClassDown;  // tie -> DOWN
}

inline std::vector<int> predict(const Network& net, const Matrix& inputs, const std::vector<std::size_t>& rows) {
    std::vector<int> classes;
    classes.reserve(rows.size());
    for (std::size_t r : rows) classes.push_back(predict_row(net, inputs.row(r)));
    return classes;
}

inline std::vector<int> predict(const Network& net, const Matrix& inputs) {
    std::vector<std::size_t> all(inputs.rows);
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return predict(net, inputs, all);
}

// Sigmoid output of the UP node, the score used for AUC.
inline double score_up(const Network& net, std::span<const double> input) {
    return forward(net, input)[kClassUp];
}

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    double learning_rate = 0.0;
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    int best_epoch = 0;  // 1-based
    std::string stop_reason;
};

inline double mean_data_loss(const Network& net, const Matrix& inputs, const Matrix& labels,
                             const std::vector<std::size_t>& rows) {
    double s = 0.0;
    for (std::size_t r : rows) s += output_bce(forward(net, inputs.row(r)), labels.row(r));
    return s / static_cast<double>(rows.size());
}

// Full protocol: mini-batch SGD with momentum, l2 and epoch decay, early
// stopped on validation loss. The network is left at the best-validation
// snapshot.
inline TrainReport train(Network& net, const Matrix& inputs, const Matrix& labels,
                         const std::vector<std::size_t>& train_rows, const std::vector<std::size_t>& val_rows,
                         const TrainConfig& cfg) {
    cfg.validate();
    if (train_rows.empty() || val_rows.empty()) throw std::runtime_error("train: empty split");

    SgdState st(net, cfg);
    TrainReport report;
    Network best = net;
    double best_val = std::numeric_limits<double>::infinity();
    int since_improvement = 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        EpochStats es;
        es.train_loss = train_one_epoch(net, st, cfg, inputs, labels, train_rows);
        es.learning_rate = st.learning_rate;
        es.val_loss = mean_data_loss(net, inputs, labels, val_rows);
        {
            std::size_t hits = 0;
            for (std::size_t r : val_rows)
                if (predict_row(net, inputs.row(r)) == label_class(labels, r)) ++hits;
            es.val_accuracy = static_cast<double>(hits) / static_cast<double>(val_rows.size());
        }
        report.epochs.push_back(es);

        if (es.val_loss < best_val) {
            best_val = es.val_loss;
            best = net;
            report.best_epoch = epoch;
            since_improvement = 0;
        } else if (++since_improvement >= cfg.patience) {
            report.stop_reason = "early_stopping";
            break;
        }
    }
    if (report.stop_reason.empty()) report.stop_reason = "max_epochs";
    net = best;
    return report;
}

}  // namespace lagtrend
