#pragma once

#include <optional>
#include <ostream>
#include <span>

#include "snndse/coding.hpp"
#include "snndse/trainer.hpp"

namespace snndse {

struct NeuronState {
    double potential = 0.0;
    long long spike_count = 0;  // tracked for output-layer neurons
};

// Integrate one weighted contribution: s = p + w; fires iff s >= threshold,
// in which case the potential resets by subtraction (p' = s - theta).
// Negative potentials are allowed. At most one spike per call regardless of
// how large s gets.
inline bool if_integrate(NeuronState& state, double weight, double threshold) {
    const double s = state.potential + weight;
    if (s >= threshold) {
        state.potential = s - threshold;
        return true;
    }
    state.potential = s;
    return false;
}

// Summation form: all contributions of one step are accumulated first, then
// a single threshold test runs. Agrees with if_integrate when spikes arrive
// one per step.
inline bool if_integrate_sum(NeuronState& state, double summed_input, double threshold) {
    return if_integrate(state, summed_input, threshold);
}

enum class SelectorKind { TerminateDelta, MaxTerminate };

struct SelectorConfig {
    SelectorKind kind = SelectorKind::TerminateDelta;
    int delta_value = 4;
    int max_value = 4;

    void validate() const {
        if (delta_value < 1) throw ValidationError("delta_value must be >= 1");
        if (max_value < 1) throw ValidationError("max_value must be >= 1");
    }

    [[nodiscard]] std::optional<int> poll(std::span<const long long> counts) const;
};

// Winner iff the leading count exceeds the runner-up by at least delta;
// argmax ties yield no decision.
[[nodiscard]] std::optional<int> terminate_delta(std::span<const long long> counts, int delta);

// Lowest-index class whose count reached max_value.
[[nodiscard]] std::optional<int> max_terminate(std::span<const long long> counts, int max_value);

struct InferenceResult {
    int predicted_class = 0;
    ActivityTrace trace;
};

// Event-driven inference. Input events run in (time, neuron) order; each
// event cascades through the layers synchronously: every spike a layer emits
// is handed to the next layer within the same step, in ascending neuron
// order. The selector is polled after every output spike; without a decision
// the run ends at window exhaustion with the argmax of the output counts
// (ties to the lowest index).
[[nodiscard]] InferenceResult run_inference(const TrainedNetwork& net, const SpikeTrainSet& trains,
                                            const SelectorConfig& selector);

struct ProfileResult {
    SpikeProfile profile;            // mean arrivals per layer
    double mean_output_spikes = 0.0; // mean emissions of the output layer
    double accuracy = 0.0;
    std::size_t samples = 0;
};

// Runs one inference per sample and averages the traces. Per-sample rng
// streams derive from params.seed and the sample index, so results do not
// depend on thread count. max_threads 0 picks hardware concurrency.
[[nodiscard]] ProfileResult profile_dataset(const TrainedNetwork& net, const Dataset& dataset,
                                            const PipelineScheme& scheme,
                                            const SelectorConfig& selector,
                                            std::size_t sample_count, int max_threads = 0);

void write_trace_json(const ActivityTrace& trace, std::ostream& out);

}  // namespace snndse
