#include "snndse/network.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace snndse {

using nlohmann::json;

std::string_view to_string(Activation a) {
    return a == Activation::Rectifier ? "rectifier" : "linear";
}

Activation activation_from_string(std::string_view s) {
    if (s == "rectifier") return Activation::Rectifier;
    if (s == "linear") return Activation::Linear;
    throw ParseError("unknown activation tag: '" + std::string(s) + "'");
}

std::string_view to_string(Termination t) {
    switch (t) {
    case Termination::Delta: return "delta";
    case Termination::Max: return "max";
    case Termination::Window: return "window";
    case Termination::NoInput: return "no-input";
    }
    return "window";
}

long long NetworkTopology::neuron_count() const {
    long long n = 0;
    for (std::size_t l = 1; l < layer_sizes.size(); ++l) n += layer_sizes[l];
    return n;
}

long long NetworkTopology::synapse_count() const {
    long long n = 0;
    for (std::size_t l = 1; l < layer_sizes.size(); ++l)
        n += static_cast<long long>(layer_sizes[l - 1]) * layer_sizes[l];
    return n;
}

void NetworkTopology::validate() const {
    if (layer_sizes.size() < 2)
        throw ValidationError("topology needs at least an input and an output layer");
    for (std::size_t l = 0; l < layer_sizes.size(); ++l)
        if (layer_sizes[l] < 1)
            throw ValidationError("layer " + std::to_string(l) + " has non-positive size " +
                                  std::to_string(layer_sizes[l]));
}

NetworkTopology NetworkTopology::from_string(const std::string& text) {
    NetworkTopology t;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t dash = text.find('-', pos);
        std::string tok = text.substr(pos, dash == std::string::npos ? dash : dash - pos);
        std::size_t used = 0;
        int n = 0;
        try {
            n = std::stoi(tok, &used);
        } catch (const std::exception&) {
            throw ParseError("bad topology string '" + text + "': '" + tok + "' is not a layer size");
        }
        if (used != tok.size() || n < 1)
            throw ParseError("bad topology string '" + text + "': '" + tok + "' is not a layer size");
        t.layer_sizes.push_back(n);
        if (dash == std::string::npos) break;
        pos = dash + 1;
    }
    t.validate();
    return t;
}

std::string NetworkTopology::to_string() const {
    std::string s;
    for (std::size_t l = 0; l < layer_sizes.size(); ++l) {
        if (l) s += '-';
        s += std::to_string(layer_sizes[l]);
    }
    return s;
}

void TrainedNetwork::validate() const {
    topology.validate();
    const std::size_t depth = static_cast<std::size_t>(topology.depth());
    if (weights.size() != depth)
        throw ValidationError("expected " + std::to_string(depth) + " weight matrices, got " +
                              std::to_string(weights.size()));
    if (thresholds.size() != depth)
        throw ValidationError("expected " + std::to_string(depth) + " thresholds, got " +
                              std::to_string(thresholds.size()));
    if (activations.size() != depth)
        throw ValidationError("expected " + std::to_string(depth) + " activation tags, got " +
                              std::to_string(activations.size()));
    for (std::size_t l = 1; l <= depth; ++l) {
        const auto expected = static_cast<std::size_t>(topology.layer_size(static_cast<int>(l - 1))) *
                              static_cast<std::size_t>(topology.layer_size(static_cast<int>(l)));
        if (weights[l - 1].size() != expected)
            throw ValidationError("weight matrix W_" + std::to_string(l) + " has " +
                                  std::to_string(weights[l - 1].size()) + " entries, topology wants " +
                                  std::to_string(expected));
        for (double w : weights[l - 1])
            if (!std::isfinite(w))
                throw ValidationError("weight matrix W_" + std::to_string(l) + " contains a non-finite value");
        if (!(thresholds[l - 1] > 0.0))
            throw ValidationError("threshold of layer " + std::to_string(l) + " must be positive");
    }
}

void CodingParams::validate() const {
    if (!(f_min > 0.0) || !(f_min <= f_max))
        throw ValidationError("coding params need 0 < f_min <= f_max");
    if (s_dev < 0.0) throw ValidationError("coding params need s_dev >= 0");
    if (t_min < 0.0 || !(t_min < window))
        throw ValidationError("coding params need 0 <= t_min < window");
}

long long ActivityTrace::total_spikes() const {
    long long n = std::accumulate(spikes_in.begin(), spikes_in.end(), 0LL);
    if (!spikes_out.empty()) n += spikes_out.back();
    return n;
}

double SpikeProfile::total() const {
    return std::accumulate(mean_spikes_in.begin(), mean_spikes_in.end(), 0.0);
}

long long memory_bits(const NetworkTopology& topology, int bits_per_weight) {
    topology.validate();
    return static_cast<long long>(bits_per_weight) * topology.synapse_count();
}

void save_network(const TrainedNetwork& net, const std::filesystem::path& path) {
    net.validate();
    json j;
    j["layer_sizes"] = net.topology.layer_sizes;
    j["thresholds"] = net.thresholds;
    std::vector<std::string> acts;
    acts.reserve(net.activations.size());
    for (Activation a : net.activations) acts.emplace_back(to_string(a));
    j["activations"] = acts;
    j["weights"] = net.weights;
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
    out << j.dump();
    out << '\n';
    if (!out) throw ParseError("failed writing network file '" + path.string() + "'");
}

namespace {

const json& require_field(const json& j, const char* name, const std::filesystem::path& path) {
    auto it = j.find(name);
    if (it == j.end())
        throw ParseError("network file '" + path.string() + "' is missing field '" + name + "'");
    return *it;
}

}  // namespace

TrainedNetwork load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open network file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("network file '" + path.string() + "' is not valid JSON: " + e.what());
    }

    TrainedNetwork net;
    try {
        require_field(j, "layer_sizes", path).get_to(net.topology.layer_sizes);
        require_field(j, "thresholds", path).get_to(net.thresholds);
        for (const auto& tag : require_field(j, "activations", path))
            net.activations.push_back(activation_from_string(tag.get<std::string>()));
        require_field(j, "weights", path).get_to(net.weights);
    } catch (const json::exception& e) {
        throw ParseError("network file '" + path.string() + "' has a malformed field: " + e.what());
    }
    net.validate();
    return net;
}

}  // namespace snndse
