#pragma once

#include <ostream>
#include <span>
#include <string_view>

#include "snndse/network.hpp"

namespace snndse {

enum class CodingTag { JitteredPeriodic, SingleBurst, FirstSpike };

// Raised first-hidden-layer threshold; spikes that cannot clear it never
// reach the deeper layers.
struct SpikeSelectConfig {
    double threshold_factor = 3.0;

    void validate() const {
        if (!(threshold_factor >= 1.0))
            throw ValidationError("spike-select threshold factor must be >= 1");
    }
};

struct CodingScheme {
    CodingTag tag = CodingTag::JitteredPeriodic;
    CodingParams params;
};

// Nominal spike period for a pixel value in [0, 1]:
// p = 1 / (f_max + (1 - |v|) * (f_min - f_max)), so v=1 -> 1/f_max, v=0 -> 1/f_min.
[[nodiscard]] double period_of(double value, const CodingParams& params);

// Jittered interval around the nominal period: n ~ Normal(p, s_dev * p)
// clamped at zero, then dt ~ Uniform(0, 2n). E[dt] = p while the clamp stays
// inactive.
[[nodiscard]] double deviation(double period, const CodingParams& params, Rng& rng);

// Periodic train per nonzero pixel, jittered intervals, truncated at the
// window. Zero pixels stay silent.
[[nodiscard]] SpikeTrainSet encode_jittered_periodic(std::span<const float> image,
                                                     const CodingParams& params, Rng& rng);

// One spike per nonzero pixel at t = |1 - v| * window. Deterministic.
[[nodiscard]] SpikeTrainSet encode_single_burst(std::span<const float> image,
                                                const CodingParams& params);

// One jittered spike per nonzero pixel, never earlier than t_min.
[[nodiscard]] SpikeTrainSet encode_first_spike(std::span<const float> image,
                                               const CodingParams& params, Rng& rng);

[[nodiscard]] SpikeTrainSet encode(const CodingScheme& scheme, std::span<const float> image,
                                   Rng& rng);

// Copy of the network with the first hidden layer's threshold scaled by the
// configured factor; everything else untouched.
[[nodiscard]] TrainedNetwork apply_spike_select(const TrainedNetwork& net,
                                                const SpikeSelectConfig& cfg);

// CSV rows "time,neuron" in time order.
void write_spike_train_csv(const SpikeTrainSet& trains, std::ostream& out);

// Pipeline-level scheme selection: the three encoders plus spike select,
// which encodes with the jittered-periodic scheme and transforms the network.
enum class SchemeKind { JitteredPeriodic, SingleBurst, FirstSpike, SpikeSelect };

[[nodiscard]] std::string_view to_string(SchemeKind k);
[[nodiscard]] SchemeKind scheme_from_string(std::string_view s);  // jp | sb | fs | ss

struct PipelineScheme {
    SchemeKind kind = SchemeKind::JitteredPeriodic;
    CodingParams params;
    SpikeSelectConfig select;

    [[nodiscard]] CodingScheme coding() const;
    [[nodiscard]] TrainedNetwork prepare(const TrainedNetwork& net) const;
};

}  // namespace snndse
