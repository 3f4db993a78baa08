#include "snndse/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace snndse {

double Hyperparams::learning_rate_at(int epoch) const {
    return learning_rate * std::pow(lr_decay, epoch / lr_step_size);
}

void Hyperparams::validate() const {
    if (!(learning_rate >= 0.0)) throw ValidationError("learning_rate must be non-negative");
    if (momentum < 0.0 || momentum >= 1.0) throw ValidationError("momentum must be in [0, 1)");
    if (!(lr_decay > 0.0) || lr_decay > 1.0) throw ValidationError("lr_decay must be in (0, 1]");
    if (lr_step_size < 1) throw ValidationError("lr_step_size must be >= 1");
    if (epochs < 0) throw ValidationError("epochs must be >= 0");
    if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
    if (weight_decay < 0.0) throw ValidationError("weight_decay must be >= 0");
}

Dataset Dataset::slice(std::size_t start, std::size_t count) const {
    Dataset d;
    d.dims = dims;
    const std::size_t stride = static_cast<std::size_t>(dims);
    d.pixels.assign(pixels.begin() + static_cast<std::ptrdiff_t>(start * stride),
                    pixels.begin() + static_cast<std::ptrdiff_t>((start + count) * stride));
    d.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(start),
                    labels.begin() + static_cast<std::ptrdiff_t>(start + count));
    return d;
}

void Dataset::validate() const {
    if (dims < 1) throw ValidationError("dataset dims must be >= 1");
    if (pixels.size() != labels.size() * static_cast<std::size_t>(dims))
        throw ValidationError("dataset pixel buffer does not match sample count");
    for (float v : pixels)
        if (!(v >= 0.0f && v <= 1.0f))
            throw ValidationError("dataset pixel outside [0, 1]");
}

TrainedNetwork init_xavier(const NetworkTopology& topology, std::uint64_t seed) {
    topology.validate();
    Rng rng(seed);
    TrainedNetwork net;
    net.topology = topology;
    const int depth = topology.depth();
    net.weights.resize(static_cast<std::size_t>(depth));
    net.thresholds.assign(static_cast<std::size_t>(depth), 1.0);
    for (int l = 1; l <= depth; ++l) {
        const int fan_in = topology.layer_size(l - 1);
        const int fan_out = topology.layer_size(l);
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        auto& w = net.weights[static_cast<std::size_t>(l - 1)];
        w.resize(static_cast<std::size_t>(fan_in) * static_cast<std::size_t>(fan_out));
        for (double& x : w) x = rng.uniform(-bound, bound);
        net.activations.push_back(l == depth ? Activation::Linear : Activation::Rectifier);
    }
    return net;
}

namespace {

// y_l = f(W_l^T y_{l-1}); rectifier on hidden layers, identity on the output.
void forward_into(const TrainedNetwork& net, std::span<const double> input,
                  std::vector<std::vector<double>>& acts) {
    const int depth = net.topology.depth();
    acts.resize(static_cast<std::size_t>(depth));
    const double* prev = input.data();
    std::size_t prev_n = input.size();
    for (int l = 1; l <= depth; ++l) {
        const std::size_t n = static_cast<std::size_t>(net.topology.layer_size(l));
        auto& out = acts[static_cast<std::size_t>(l - 1)];
        out.assign(n, 0.0);
        const auto& w = net.weights[static_cast<std::size_t>(l - 1)];
        for (std::size_t i = 0; i < prev_n; ++i) {
            const double yi = prev[i];
            if (yi == 0.0) continue;
            const double* row = w.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) out[j] += row[j] * yi;
        }
        if (net.activations[static_cast<std::size_t>(l - 1)] == Activation::Rectifier)
            for (double& v : out) v = std::max(0.0, v);
        prev = out.data();
        prev_n = n;
    }
}

int argmax_lowest(std::span<const double> v) {
    int best = 0;
    for (int j = 1; j < static_cast<int>(v.size()); ++j)
        if (v[j] > v[static_cast<std::size_t>(best)]) best = j;
    return best;
}

// Softmax probabilities computed with the usual max-shift.
void softmax_into(std::span<const double> logits, std::vector<double>& probs) {
    probs.resize(logits.size());
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
        probs[j] = std::exp(logits[j] - m);
        sum += probs[j];
    }
    for (double& p : probs) p /= sum;
}

struct Workspace {
    std::vector<double> input;
    std::vector<std::vector<double>> acts;
    std::vector<double> probs;
    std::vector<std::vector<double>> deltas;  // dL/ds per layer
};

// Accumulates dL/dW into grads; returns the sample loss.
double backprop_into(const TrainedNetwork& net, std::span<const float> image, int label,
                     std::vector<std::vector<double>>& grads, Workspace& ws) {
    const int depth = net.topology.depth();
    ws.input.assign(image.begin(), image.end());
    forward_into(net, ws.input, ws.acts);

    const auto& logits = ws.acts[static_cast<std::size_t>(depth - 1)];
    softmax_into(logits, ws.probs);
    const double loss = -std::log(std::max(ws.probs[static_cast<std::size_t>(label)], 1e-300));

    ws.deltas.resize(static_cast<std::size_t>(depth));
    auto& out_delta = ws.deltas[static_cast<std::size_t>(depth - 1)];
    out_delta = ws.probs;
    out_delta[static_cast<std::size_t>(label)] -= 1.0;

    for (int l = depth; l >= 1; --l) {
        const std::size_t n = static_cast<std::size_t>(net.topology.layer_size(l));
        const std::size_t n_prev = static_cast<std::size_t>(net.topology.layer_size(l - 1));
        const auto& delta = ws.deltas[static_cast<std::size_t>(l - 1)];
        const double* prev_y = l == 1 ? ws.input.data() : ws.acts[static_cast<std::size_t>(l - 2)].data();
        auto& g = grads[static_cast<std::size_t>(l - 1)];
        for (std::size_t i = 0; i < n_prev; ++i) {
            const double yi = prev_y[i];
            if (yi != 0.0) {
                double* grow = g.data() + i * n;
                for (std::size_t j = 0; j < n; ++j) grow[j] += yi * delta[j];
            }
        }
        if (l > 1) {
            auto& prev_delta = ws.deltas[static_cast<std::size_t>(l - 2)];
            prev_delta.assign(n_prev, 0.0);
            const auto& w = net.weights[static_cast<std::size_t>(l - 1)];
            for (std::size_t i = 0; i < n_prev; ++i) {
                if (prev_y[i] <= 0.0) continue;  // rectifier gate
                const double* row = w.data() + i * n;
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += row[j] * delta[j];
                prev_delta[i] = s;
            }
        }
    }
    return loss;
}

std::vector<std::vector<double>> zeros_like(const std::vector<std::vector<double>>& w) {
    std::vector<std::vector<double>> z(w.size());
    for (std::size_t l = 0; l < w.size(); ++l) z[l].assign(w[l].size(), 0.0);
    return z;
}

}  // namespace

std::vector<std::vector<double>> forward(const TrainedNetwork& net, std::span<const double> input) {
    if (input.size() != static_cast<std::size_t>(net.topology.input_size()))
        throw ValidationError("input vector has " + std::to_string(input.size()) +
                              " entries, network expects " + std::to_string(net.topology.input_size()));
    std::vector<std::vector<double>> acts;
    forward_into(net, input, acts);
    return acts;
}

int predict(const TrainedNetwork& net, std::span<const float> image) {
    Workspace ws;
    ws.input.assign(image.begin(), image.end());
    if (ws.input.size() != static_cast<std::size_t>(net.topology.input_size()))
        throw ValidationError("image size does not match network input size");
    forward_into(net, ws.input, ws.acts);
    return argmax_lowest(ws.acts.back());
}

double sample_loss(const TrainedNetwork& net, std::span<const float> image, int label) {
    Workspace ws;
    ws.input.assign(image.begin(), image.end());
    forward_into(net, ws.input, ws.acts);
    softmax_into(ws.acts.back(), ws.probs);
    return -std::log(std::max(ws.probs[static_cast<std::size_t>(label)], 1e-300));
}

Gradients backprop(const TrainedNetwork& net, std::span<const float> image, int label) {
    Gradients g;
    g.weight_grads = zeros_like(net.weights);
    Workspace ws;
    g.loss = backprop_into(net, image, label, g.weight_grads, ws);
    return g;
}

TrainResult train(const TrainedNetwork& init, const Dataset& train_set, const Dataset& val_set,
                  const Hyperparams& hp) {
    hp.validate();
    train_set.validate();
    val_set.validate();
    init.validate();
    if (train_set.dims != init.topology.input_size())
        throw ValidationError("training data dims do not match network input size");
    const int classes = init.topology.output_size();
    for (std::uint8_t lb : train_set.labels)
        if (lb >= classes) throw ValidationError("training label >= class count");

    TrainResult result;
    result.net = init;
    auto& net = result.net;

    auto velocity = zeros_like(net.weights);
    auto grads = zeros_like(net.weights);
    Workspace ws;
    Rng rng(hp.seed);

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        const double lr = hp.learning_rate_at(epoch);
        // Fisher-Yates on our own rng, so the batch order is seed-stable.
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.next_u64() % i]);

        double loss_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(hp.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(hp.batch_size));
            const double inv_batch = 1.0 / static_cast<double>(stop - start);
            for (auto& g : grads) std::fill(g.begin(), g.end(), 0.0);
            double batch_loss = 0.0;
            for (std::size_t k = start; k < stop; ++k) {
                const std::size_t idx = order[k];
                batch_loss += backprop_into(net, train_set.image(idx),
                                            train_set.label(idx), grads, ws);
            }
            if (!std::isfinite(batch_loss))
                throw ValidationError("training diverged: non-finite loss at epoch " +
                                      std::to_string(epoch) + ", batch " +
                                      std::to_string(start / static_cast<std::size_t>(hp.batch_size)));
            loss_sum += batch_loss;
            seen += stop - start;

            const double shrink = 1.0 - hp.weight_decay;
            for (std::size_t l = 0; l < net.weights.size(); ++l) {
                auto& w = net.weights[l];
                auto& v = velocity[l];
                const auto& g = grads[l];
                for (std::size_t k = 0; k < w.size(); ++k) {
                    v[k] = hp.momentum * v[k] - lr * g[k] * inv_batch;
                    w[k] = (w[k] + v[k]) * shrink;
                }
            }
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.learning_rate = lr;
        stats.mean_loss = seen ? loss_sum / static_cast<double>(seen) : 0.0;
        stats.val_accuracy = val_set.size() ? evaluate_formal(net, val_set) : 0.0;
        result.log.push_back(stats);
    }
    return result;
}

double evaluate_formal(const TrainedNetwork& net, const Dataset& test_set) {
    if (test_set.size() == 0) return 0.0;
    std::size_t hits = 0;
    Workspace ws;
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        auto img = test_set.image(i);
        ws.input.assign(img.begin(), img.end());
        forward_into(net, ws.input, ws.acts);
        if (argmax_lowest(ws.acts.back()) == test_set.label(i)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(test_set.size());
}

}  // namespace snndse
