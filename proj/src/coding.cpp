#include "snndse/coding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace snndse {

double period_of(double value, const CodingParams& params) {
    return 1.0 / (params.f_max + (1.0 - std::abs(value)) * (params.f_min - params.f_max));
}

double deviation(double period, const CodingParams& params, Rng& rng) {
    double n = rng.normal(period, params.s_dev * period);
    if (n < 0.0) n = 0.0;
    return rng.uniform(0.0, 2.0 * n);
}

namespace {

void sort_events(SpikeTrainSet& t) {
    std::sort(t.events.begin(), t.events.end(), [](const SpikeEvent& a, const SpikeEvent& b) {
        return a.time != b.time ? a.time < b.time : a.neuron < b.neuron;
    });
}

}  // namespace

SpikeTrainSet encode_jittered_periodic(std::span<const float> image, const CodingParams& params,
                                       Rng& rng) {
    params.validate();
    SpikeTrainSet t;
    t.window = params.window;
    for (int px = 0; px < static_cast<int>(image.size()); ++px) {
        const double v = image[static_cast<std::size_t>(px)];
        if (v == 0.0) continue;
        const double p = period_of(v, params);
        double time = deviation(p, params, rng);
        while (time <= params.window) {
            t.events.push_back({time, 0, px});
            time += deviation(p, params, rng);
        }
    }
    sort_events(t);
    return t;
}

SpikeTrainSet encode_single_burst(std::span<const float> image, const CodingParams& params) {
    params.validate();
    SpikeTrainSet t;
    t.window = params.window;
    for (int px = 0; px < static_cast<int>(image.size()); ++px) {
        const double v = image[static_cast<std::size_t>(px)];
        if (v == 0.0) continue;
        t.events.push_back({std::abs(1.0 - v) * params.window, 0, px});
    }
    sort_events(t);
    return t;
}

SpikeTrainSet encode_first_spike(std::span<const float> image, const CodingParams& params,
                                 Rng& rng) {
    params.validate();
    SpikeTrainSet t;
    t.window = params.window;
    for (int px = 0; px < static_cast<int>(image.size()); ++px) {
        const double v = image[static_cast<std::size_t>(px)];
        if (v == 0.0) continue;
        const double dt = deviation(period_of(v, params), params, rng);
        const double time = std::max(dt, params.t_min);
        if (time <= params.window) t.events.push_back({time, 0, px});
    }
    sort_events(t);
    return t;
}

SpikeTrainSet encode(const CodingScheme& scheme, std::span<const float> image, Rng& rng) {
    switch (scheme.tag) {
    case CodingTag::JitteredPeriodic: return encode_jittered_periodic(image, scheme.params, rng);
    case CodingTag::SingleBurst: return encode_single_burst(image, scheme.params);
    case CodingTag::FirstSpike: return encode_first_spike(image, scheme.params, rng);
    }
    throw ValidationError("unknown coding tag");
}

TrainedNetwork apply_spike_select(const TrainedNetwork& net, const SpikeSelectConfig& cfg) {
    cfg.validate();
    net.validate();
    if (net.topology.depth() < 2)
        throw ValidationError("spike select needs at least one hidden layer");
    TrainedNetwork out = net;
    out.thresholds[0] *= cfg.threshold_factor;
    return out;
}

void write_spike_train_csv(const SpikeTrainSet& trains, std::ostream& out) {
    out << "time,neuron\n";
    for (const SpikeEvent& e : trains.events) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g,%d\n", e.time, e.neuron);
        out << buf;
    }
}

std::string_view to_string(SchemeKind k) {
    switch (k) {
    case SchemeKind::JitteredPeriodic: return "jp";
    case SchemeKind::SingleBurst: return "sb";
    case SchemeKind::FirstSpike: return "fs";
    case SchemeKind::SpikeSelect: return "ss";
    }
    return "jp";
}

SchemeKind scheme_from_string(std::string_view s) {
    if (s == "jp") return SchemeKind::JitteredPeriodic;
    if (s == "sb") return SchemeKind::SingleBurst;
    if (s == "fs") return SchemeKind::FirstSpike;
    if (s == "ss") return SchemeKind::SpikeSelect;
    throw ParseError("unknown coding scheme '" + std::string(s) + "' (expected jp, sb, fs or ss)");
}

CodingScheme PipelineScheme::coding() const {
    CodingScheme c;
    c.params = params;
    switch (kind) {
    case SchemeKind::JitteredPeriodic:
    case SchemeKind::SpikeSelect: c.tag = CodingTag::JitteredPeriodic; break;
    case SchemeKind::SingleBurst: c.tag = CodingTag::SingleBurst; break;
    case SchemeKind::FirstSpike: c.tag = CodingTag::FirstSpike; break;
    }
    return c;
}

TrainedNetwork PipelineScheme::prepare(const TrainedNetwork& net) const {
    if (kind == SchemeKind::SpikeSelect) return apply_spike_select(net, select);
    return net;
}

}  // namespace snndse
