#include "qebcheck/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qeb {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

json config_to_json(const QuantConfig& c) {
    return {{"sign", to_string(c.sign)}, {"bits", c.bits}, {"frac", c.frac}};
}

QuantConfig config_from_json(const json& j) {
    QuantConfig c;
    c.sign = signedness_from_string(j.at("sign").get<std::string>());
    c.bits = j.at("bits").get<int>();
    c.frac = j.at("frac").get<int>();
    c.validate();
    return c;
}

json scheme_to_json(const QuantScheme& s) {
    return {{"weights", config_to_json(s.weights)},
            {"biases", config_to_json(s.biases)},
            {"input", config_to_json(s.input)},
            {"hidden", config_to_json(s.hidden)}};
}

QuantScheme scheme_from_json(const json& j) {
    QuantScheme s;
    s.weights = config_from_json(j.at("weights"));
    s.biases = config_from_json(j.at("biases"));
    s.input = config_from_json(j.at("input"));
    s.hidden = config_from_json(j.at("hidden"));
    s.validate();
    return s;
}

void check_activation(const json& j) {
    if (j.value("activation", "relu") != "relu")
        throw std::runtime_error("unsupported activation '" +
                                 j.value("activation", std::string()) + "' (only relu)");
}

template <typename Net, typename Scalar>
Net layers_from_json(const json& j) {
    check_activation(j);
    Net net;
    for (const json& jl : j.at("layers")) {
        typename decltype(net.layers)::value_type layer;
        for (const json& row : jl.at("weights"))
            layer.weights.push_back(row.get<std::vector<Scalar>>());
        layer.bias = jl.at("bias").get<std::vector<Scalar>>();
        net.layers.push_back(std::move(layer));
    }
    if (net.layers.empty()) throw std::runtime_error("model has no layers");
    net.num_inputs = net.layers.front().in_size();
    return net;
}

template <typename Net>
json layers_to_json(const Net& net) {
    json jlayers = json::array();
    for (const auto& l : net.layers)
        jlayers.push_back({{"weights", l.weights}, {"bias", l.bias}});
    return jlayers;
}

} // namespace

Network parse_network(const std::string& text) {
    json j = json::parse(text);
    if (j.value("quantized", false))
        throw std::runtime_error("expected a real-valued model, file is quantized");
    Network net = layers_from_json<Network, double>(j);
    net.validate();
    return net;
}

QuantizedNetwork parse_quantized_network(const std::string& text) {
    json j = json::parse(text);
    if (!j.value("quantized", false))
        throw std::runtime_error("expected a quantized model (missing \"quantized\": true)");
    QuantizedNetwork net = layers_from_json<QuantizedNetwork, int64_t>(j);
    net.scheme = scheme_from_json(j.at("scheme"));
    net.validate();
    return net;
}

QuantScheme parse_scheme(const std::string& text) { return scheme_from_json(json::parse(text)); }

std::string format_network(const Network& net) {
    json j{{"activation", "relu"}, {"layers", layers_to_json(net)}};
    return j.dump(2) + "\n";
}

std::string format_quantized_network(const QuantizedNetwork& qnet) {
    json j{{"activation", "relu"},
           {"quantized", true},
           {"scheme", scheme_to_json(qnet.scheme)},
           {"layers", layers_to_json(qnet)}};
    return j.dump(2) + "\n";
}

std::string format_scheme(const QuantScheme& scheme) { return scheme_to_json(scheme).dump(2) + "\n"; }

Network load_network(const std::string& path) { return parse_network(read_file(path)); }

QuantizedNetwork load_quantized_network(const std::string& path) {
    return parse_quantized_network(read_file(path));
}

QuantScheme load_scheme(const std::string& path) { return parse_scheme(read_file(path)); }

void save_network(const Network& net, const std::string& path) {
    write_file(path, format_network(net));
}

void save_quantized_network(const QuantizedNetwork& qnet, const std::string& path) {
    write_file(path, format_quantized_network(qnet));
}

void save_scheme(const QuantScheme& scheme, const std::string& path) {
    write_file(path, format_scheme(scheme));
}

} // namespace qeb
