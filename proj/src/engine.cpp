#include "snndse/engine.hpp"

#include <algorithm>
#include <thread>

#include "json.hpp"

namespace snndse {

std::optional<int> terminate_delta(std::span<const long long> counts, int delta) {
    int best = 0, second = -1;
    for (int j = 1; j < static_cast<int>(counts.size()); ++j) {
        if (counts[static_cast<std::size_t>(j)] > counts[static_cast<std::size_t>(best)]) {
            second = best;
            best = j;
        } else if (second < 0 || counts[static_cast<std::size_t>(j)] >
                                     counts[static_cast<std::size_t>(second)]) {
            second = j;
        }
    }
    if (second < 0) return std::nullopt;  // fewer than two classes tracked
    const long long gap = counts[static_cast<std::size_t>(best)] -
                          counts[static_cast<std::size_t>(second)];
    if (gap >= delta) return best;
    return std::nullopt;
}

std::optional<int> max_terminate(std::span<const long long> counts, int max_value) {
    for (int j = 0; j < static_cast<int>(counts.size()); ++j)
        if (counts[static_cast<std::size_t>(j)] >= max_value) return j;
    return std::nullopt;
}

std::optional<int> SelectorConfig::poll(std::span<const long long> counts) const {
    return kind == SelectorKind::TerminateDelta ? terminate_delta(counts, delta_value)
                                                : max_terminate(counts, max_value);
}

namespace {

int argmax_lowest(std::span<const long long> counts) {
    int best = 0;
    for (int j = 1; j < static_cast<int>(counts.size()); ++j)
        if (counts[static_cast<std::size_t>(j)] > counts[static_cast<std::size_t>(best)]) best = j;
    return best;
}

}  // namespace

InferenceResult run_inference(const TrainedNetwork& net, const SpikeTrainSet& trains,
                              const SelectorConfig& selector) {
    selector.validate();
    const int depth = net.topology.depth();
    const int input_size = net.topology.input_size();

    InferenceResult result;
    ActivityTrace& trace = result.trace;
    trace.spikes_in.assign(static_cast<std::size_t>(depth), 0);
    trace.spikes_out.assign(static_cast<std::size_t>(depth), 0);

    if (trains.events.empty()) {
        trace.terminated_by = Termination::NoInput;
        trace.predicted_class = 0;
        result.predicted_class = 0;
        return result;
    }

    std::vector<std::vector<double>> potential(static_cast<std::size_t>(depth));
    for (int l = 1; l <= depth; ++l)
        potential[static_cast<std::size_t>(l - 1)]
            .assign(static_cast<std::size_t>(net.topology.layer_size(l)), 0.0);
    std::vector<long long> counts(static_cast<std::size_t>(net.topology.output_size()), 0);

    // Scratch frontiers, one per layer; frontier[l-1] holds the source
    // indices entering layer l during the current step, in ascending order.
    std::vector<std::vector<int>> frontier(static_cast<std::size_t>(depth));

    for (const SpikeEvent& event : trains.events) {
        if (event.neuron < 0 || event.neuron >= input_size)
            throw ValidationError("input spike addresses neuron " + std::to_string(event.neuron) +
                                  " outside the input layer");
        trace.spikes_in[0] += 1;
        frontier[0].assign(1, event.neuron);

        for (int l = 1; l <= depth; ++l) {
            const auto& sources = frontier[static_cast<std::size_t>(l - 1)];
            if (sources.empty()) break;
            const std::size_t n = static_cast<std::size_t>(net.topology.layer_size(l));
            const auto& w = net.weights[static_cast<std::size_t>(l - 1)];
            const double theta = net.thresholds[static_cast<std::size_t>(l - 1)];
            auto& pot = potential[static_cast<std::size_t>(l - 1)];
            std::vector<int>* next = l < depth ? &frontier[static_cast<std::size_t>(l)] : nullptr;
            if (next) next->clear();

            for (int src : sources) {
                const double* row = w.data() + static_cast<std::size_t>(src) * n;
                for (std::size_t j = 0; j < n; ++j) {
                    const double s = pot[j] + row[j];
                    if (s >= theta) {
                        pot[j] = s - theta;
                        trace.spikes_out[static_cast<std::size_t>(l - 1)] += 1;
                        if (l < depth) {
                            trace.spikes_in[static_cast<std::size_t>(l)] += 1;
                            next->push_back(static_cast<int>(j));
                        } else {
                            counts[j] += 1;
                            if (auto decided = selector.poll(counts)) {
                                trace.predicted_class = *decided;
                                trace.elapsed_window = event.time;
                                trace.terminated_by =
                                    selector.kind == SelectorKind::TerminateDelta
                                        ? Termination::Delta
                                        : Termination::Max;
                                result.predicted_class = *decided;
                                return result;
                            }
                        }
                    } else {
                        pot[j] = s;
                    }
                }
            }
        }
    }

    result.predicted_class = argmax_lowest(counts);
    trace.predicted_class = result.predicted_class;
    trace.elapsed_window = trains.window;
    trace.terminated_by = Termination::Window;
    return result;
}

ProfileResult profile_dataset(const TrainedNetwork& net, const Dataset& dataset,
                              const PipelineScheme& scheme, const SelectorConfig& selector,
                              std::size_t sample_count, int max_threads) {
    scheme.params.validate();
    selector.validate();
    const TrainedNetwork prepared = scheme.prepare(net);
    const CodingScheme coding = scheme.coding();
    const std::size_t n = std::min(sample_count, dataset.size());
    if (n == 0) throw ValidationError("profiling needs at least one sample");
    const int depth = prepared.topology.depth();

    struct SampleOut {
        std::vector<long long> in;
        long long out_last = 0;
        bool hit = false;
    };
    std::vector<SampleOut> results(n);

    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Rng rng = Rng::for_stream(scheme.params.seed, i);
            SpikeTrainSet trains = encode(coding, dataset.image(i), rng);
            InferenceResult r = run_inference(prepared, trains, selector);
            results[i].in = r.trace.spikes_in;
            results[i].out_last = r.trace.spikes_out.back();
            results[i].hit = r.predicted_class == dataset.label(i);
        }
    };

    int threads = max_threads > 0 ? max_threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("SNN_DSE_THREADS")) {
        const int limit = std::atoi(cap);
        if (limit > 0) threads = std::min(threads, limit);
    }
    threads = std::max(1, std::min<int>(threads, static_cast<int>(n)));

    if (threads == 1) {
        run_range(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + static_cast<std::size_t>(threads) - 1) /
                                  static_cast<std::size_t>(threads);
        for (int t = 0; t < threads; ++t) {
            const std::size_t begin = static_cast<std::size_t>(t) * chunk;
            if (begin >= n) break;
            pool.emplace_back(run_range, begin, std::min(n, begin + chunk));
        }
        for (auto& th : pool) th.join();
    }

    ProfileResult out;
    out.samples = n;
    out.profile.mean_spikes_in.assign(static_cast<std::size_t>(depth), 0.0);
    long long hits = 0, out_spikes = 0;
    for (const SampleOut& s : results) {
        for (std::size_t l = 0; l < s.in.size(); ++l)
            out.profile.mean_spikes_in[l] += static_cast<double>(s.in[l]);
        out_spikes += s.out_last;
        hits += s.hit ? 1 : 0;
    }
    for (double& v : out.profile.mean_spikes_in) v /= static_cast<double>(n);
    out.mean_output_spikes = static_cast<double>(out_spikes) / static_cast<double>(n);
    out.accuracy = static_cast<double>(hits) / static_cast<double>(n);
    return out;
}

void write_trace_json(const ActivityTrace& trace, std::ostream& out) {
    nlohmann::json j;
    j["spikes_in"] = trace.spikes_in;
    j["spikes_out"] = trace.spikes_out;
    j["class"] = trace.predicted_class ? *trace.predicted_class : -1;
    j["terminated_by"] = std::string(to_string(trace.terminated_by));
    j["elapsed_window"] = trace.elapsed_window;
    out << j.dump() << '\n';
}

}  // namespace snndse
