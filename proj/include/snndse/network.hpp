#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "snndse/common.hpp"

namespace snndse {

enum class Activation { Rectifier, Linear };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view s);

// Layer sizes N_0..N_L. Layer 0 is the input, layer L the output; the L
// weighted layers are indexed 1..L.
struct NetworkTopology {
    std::vector<int> layer_sizes;

    [[nodiscard]] int depth() const { return static_cast<int>(layer_sizes.size()) - 1; }
    [[nodiscard]] int layer_size(int l) const { return layer_sizes.at(static_cast<std::size_t>(l)); }
    [[nodiscard]] int input_size() const { return layer_sizes.front(); }
    [[nodiscard]] int output_size() const { return layer_sizes.back(); }
    [[nodiscard]] long long neuron_count() const;   // sum of N_l over l = 1..L
    [[nodiscard]] long long synapse_count() const;  // sum of N_{l-1} * N_l

    void validate() const;

    // Hyphen notation, e.g. "784-300-10".
    static NetworkTopology from_string(const std::string& text);
    [[nodiscard]] std::string to_string() const;

    bool operator==(const NetworkTopology&) const = default;
};

// Weight matrices use presynaptic-major layout: weights[l-1][i * N_l + j] is
// the synapse from neuron i of layer l-1 to neuron j of layer l. One
// threshold per layer. Immutable after construction by convention; treat as
// a value type.
struct TrainedNetwork {
    NetworkTopology topology;
    std::vector<std::vector<double>> weights;
    std::vector<double> thresholds;
    std::vector<Activation> activations;

    [[nodiscard]] double weight(int layer, int pre, int post) const {
        return weights[static_cast<std::size_t>(layer - 1)]
                      [static_cast<std::size_t>(pre) * static_cast<std::size_t>(topology.layer_size(layer)) +
                       static_cast<std::size_t>(post)];
    }

    void validate() const;

    bool operator==(const TrainedNetwork&) const = default;
};

// Spike-encoder parameters. Frequencies are per unit of simulated time; the
// presentation window is w_t in the same unit.
struct CodingParams {
    double f_min = 10.0;
    double f_max = 100.0;
    double s_dev = 0.1;    // relative standard deviation of the inter-spike jitter
    double t_min = 0.01;   // minimum emission time for first-spike coding
    double window = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// AER-style event: time plus source address.
struct SpikeEvent {
    double time = 0.0;
    int layer = 0;  // source layer; encoder output uses 0 (the input layer)
    int neuron = 0;

    bool operator==(const SpikeEvent&) const = default;
};

// Events sorted by (time, neuron).
struct SpikeTrainSet {
    std::vector<SpikeEvent> events;
    double window = 0.0;

    [[nodiscard]] std::size_t size() const { return events.size(); }
    bool operator==(const SpikeTrainSet&) const = default;
};

enum class Termination { Delta, Max, Window, NoInput };

std::string_view to_string(Termination t);

// Per-run spike accounting. spikes_in[l-1] counts arrivals at layer l
// (equal to the upstream layer's emissions by construction), spikes_out[l-1]
// counts emissions of layer l.
struct ActivityTrace {
    std::vector<long long> spikes_in;
    std::vector<long long> spikes_out;
    std::optional<int> predicted_class;
    double elapsed_window = 0.0;
    Termination terminated_by = Termination::Window;

    // Total emissions including the output layer's own spikes.
    [[nodiscard]] long long total_spikes() const;
};

// Dataset-averaged arrivals per layer, length L.
struct SpikeProfile {
    std::vector<double> mean_spikes_in;

    [[nodiscard]] double total() const;
};

// Footprint of synaptic weight storage; bits_per_weight is a parameter of
// the estimate only, inference math stays in 64-bit reals.
[[nodiscard]] long long memory_bits(const NetworkTopology& topology, int bits_per_weight);

// JSON round trip. load(save(n)) == n bit-exactly for finite weights.
void save_network(const TrainedNetwork& net, const std::filesystem::path& path);
[[nodiscard]] TrainedNetwork load_network(const std::filesystem::path& path);

}  // namespace snndse
