// JSON model and scheme files.
//
// Network file:
//   { "activation": "relu",
//     "layers": [ { "weights": [[...], ...], "bias": [...] }, ... ] }
// Quantized network file adds "quantized": true and an embedded "scheme".
// Scheme file:
//   { "weights": {"sign": "±", "bits": 4, "frac": 2}, "biases": {...},
//     "input": {...}, "hidden": {...} }

#pragma once

#include <string>

#include "qebcheck/network.hpp"

namespace qeb {

Network parse_network(const std::string& text);
QuantizedNetwork parse_quantized_network(const std::string& text);
QuantScheme parse_scheme(const std::string& text);

std::string format_network(const Network& net);
std::string format_quantized_network(const QuantizedNetwork& qnet);
std::string format_scheme(const QuantScheme& scheme);

Network load_network(const std::string& path);
QuantizedNetwork load_quantized_network(const std::string& path);
QuantScheme load_scheme(const std::string& path);

void save_network(const Network& net, const std::string& path);
void save_quantized_network(const QuantizedNetwork& qnet, const std::string& path);
void save_scheme(const QuantScheme& scheme, const std::string& path);

} // namespace qeb
