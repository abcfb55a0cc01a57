// Network data types and the reference forward semantics for the real-valued
// network and its fully quantized counterpart.
//
// Layer numbering follows the convention that the input layer is layer 1 and
// the affine transforms are layers 2..d. Internally a network is stored as
// its list of affine layers (so a "3-layer" network has two entries); every
// affine layer except the last is followed by a ReLU, the last is the output
// and stays affine.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qebcheck/interval.hpp"
#include "qebcheck/quantization.hpp"

namespace qeb {

struct AffineLayer {
    std::vector<std::vector<double>> weights; // [out][in], row-major
    std::vector<double> bias;                 // [out]

    size_t out_size() const { return weights.size(); }
    size_t in_size() const { return weights.empty() ? 0 : weights[0].size(); }
};

struct Network {
    size_t num_inputs = 0;
    std::vector<AffineLayer> layers;

    size_t depth() const { return layers.size() + 1; }       // paper-style d
    size_t num_outputs() const { return layers.back().out_size(); }
    size_t hidden_count() const { return layers.size() - 1; }
    void validate() const; // dimension chain, at least one affine layer
};

struct QuantLayer {
    std::vector<std::vector<int64_t>> weights;
    std::vector<int64_t> bias;

    size_t out_size() const { return weights.size(); }
    size_t in_size() const { return weights.empty() ? 0 : weights[0].size(); }
};

struct QuantizedNetwork {
    size_t num_inputs = 0;
    std::vector<QuantLayer> layers;
    QuantScheme scheme;

    size_t depth() const { return layers.size() + 1; }
    size_t num_outputs() const { return layers.back().out_size(); }
    size_t hidden_count() const { return layers.size() - 1; }
    void validate() const; // dimensions plus weight/bias ranges

    // Alignment exponent for the pre-activation accumulator of hidden affine
    // layer `a` (0-based): F_h - F_w - F_in for the first hidden layer and
    // -F_w afterwards.
    int accumulator_exponent(size_t a) const {
        const QuantScheme& s = scheme;
        return a == 0 ? s.hidden.frac - s.weights.frac - s.input.frac : -s.weights.frac;
    }
};

// Element-wise quantization of all weights (C_w) and biases (C_b).
QuantizedNetwork quantize_network(const Network& net, const QuantScheme& scheme);

// Discrete input box: all integer points within L-inf distance `radius` of
// `center`, intersected with the representable input range.
struct InputRegion {
    std::vector<int64_t> center;
    int64_t radius = 0;

    std::vector<IntInterval> bounds(const QuantConfig& input_cfg) const;
    bool contains(std::span<const int64_t> point, const QuantConfig& input_cfg) const;
    // Number of integer points, saturating at cap+1 to keep the count cheap.
    int64_t point_count(const QuantConfig& input_cfg, int64_t cap) const;
};

struct Property {
    size_t target_class = 0; // 0-based output index
    double epsilon = 0.0;
};

std::vector<double> dnn_forward(const Network& net, std::span<const double> x);

struct DnnTrace {
    std::vector<std::vector<double>> pre;  // per affine layer, before activation
    std::vector<std::vector<double>> post; // after ReLU (last layer: == pre)
};
DnnTrace dnn_trace(const Network& net, std::span<const double> x);

std::vector<double> qnn_forward(const QuantizedNetwork& qnet, std::span<const int64_t> xhat);

struct QnnTrace {
    std::vector<std::vector<double>> pre_round; // hidden accumulators before rounding
    std::vector<std::vector<int64_t>> rounded;  // after round, before clamp
    std::vector<std::vector<int64_t>> clamped;  // hidden activations in [0, C_h.ub]
    std::vector<double> output;                 // real-valued output layer
};
QnnTrace qnn_trace(const QuantizedNetwork& qnet, std::span<const int64_t> xhat);

// Diagnostic forward with quantized weights but real-valued activations:
// evaluates the fixed-point weight matrices on x = 2^-F_in * xhat with plain
// ReLU and no rounding or clamping.
std::vector<double> weights_only_forward(const QuantizedNetwork& qnet,
                                         std::span<const int64_t> xhat);

// Signed output deviation 2^-F_h * QNN(xhat)_g - DNN(xhat / span)_g where
// span = C_in.ub - C_in.lb.
double quantization_error(const Network& net, const QuantizedNetwork& qnet,
                          std::span<const int64_t> xhat, size_t g);

} // namespace qeb
