#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "snndse/network.hpp"

namespace snndse {

struct Hyperparams {
    double learning_rate = 0.01;
    double momentum = 0.9;
    double weight_decay = 0.0005;
    int lr_step_size = 1;      // epochs between learning-rate steps
    double lr_decay = 0.993;
    int epochs = 20;
    int batch_size = 32;
    std::uint64_t seed = 0;

    // Step-decay schedule: rate used during epoch e (counted from 0).
    [[nodiscard]] double learning_rate_at(int epoch) const;
    void validate() const;
};

// Flat pixel storage, one row of `dims` floats per sample, values in [0, 1].
struct Dataset {
    std::vector<float> pixels;
    std::vector<std::uint8_t> labels;
    int dims = 0;

    [[nodiscard]] std::size_t size() const { return labels.size(); }
    [[nodiscard]] std::span<const float> image(std::size_t i) const {
        return {pixels.data() + i * static_cast<std::size_t>(dims), static_cast<std::size_t>(dims)};
    }
    [[nodiscard]] int label(std::size_t i) const { return labels[i]; }
    [[nodiscard]] Dataset slice(std::size_t start, std::size_t count) const;
    void validate() const;
};

// Uniform weights in +-sqrt(6 / (fan_in + fan_out)), thresholds 1.0,
// rectifier hidden layers and a linear output layer.
[[nodiscard]] TrainedNetwork init_xavier(const NetworkTopology& topology, std::uint64_t seed);

// Returns the outputs of layers 1..L (result[l-1] is layer l).
[[nodiscard]] std::vector<std::vector<double>> forward(const TrainedNetwork& net,
                                                       std::span<const double> input);

[[nodiscard]] int predict(const TrainedNetwork& net, std::span<const float> image);

// Softmax cross-entropy loss over the linear output layer.
[[nodiscard]] double sample_loss(const TrainedNetwork& net, std::span<const float> image, int label);

struct Gradients {
    std::vector<std::vector<double>> weight_grads;  // same shapes as net.weights
    double loss = 0.0;
};

[[nodiscard]] Gradients backprop(const TrainedNetwork& net, std::span<const float> image, int label);

struct EpochStats {
    int epoch = 0;
    double learning_rate = 0.0;
    double mean_loss = 0.0;
    double val_accuracy = 0.0;
};

struct TrainResult {
    TrainedNetwork net;
    std::vector<EpochStats> log;
};

// Mini-batch SGD with momentum; weight decay is a multiplicative shrink
// applied after each batch step, independent of the learning rate.
// Deterministic for a fixed seed.
[[nodiscard]] TrainResult train(const TrainedNetwork& init, const Dataset& train_set,
                                const Dataset& val_set, const Hyperparams& hp);

// Fraction of samples whose output argmax equals the label; argmax ties
// resolve to the lowest class index.
[[nodiscard]] double evaluate_formal(const TrainedNetwork& net, const Dataset& test_set);

}  // namespace snndse
