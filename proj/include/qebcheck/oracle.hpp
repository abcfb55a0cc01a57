// Exact brute force over the finite quantized input region: ground truth for
// error extrema and per-neuron difference ranges.

#pragma once

#include <cstdint>
#include <vector>

#include "qebcheck/interval.hpp"
#include "qebcheck/network.hpp"

namespace qeb {

struct OracleResult {
    double max_error = 0.0; // signed extrema of the aligned output deviation
    double min_error = 0.0;
    std::vector<int64_t> argmax; // first point (lexicographic) attaining max |error|
    int64_t points_evaluated = 0;

    // Filled when track_neurons is set: true per-neuron difference ranges.
    bool has_neuron_ranges = false;
    std::vector<Interval> input_delta_range;
    std::vector<std::vector<Interval>> delta_in_range; // per affine layer
    std::vector<std::vector<Interval>> delta_range;

    double max_abs_error() const;
};

// Iterates the whole region in lexicographic order; refuses regions larger
// than `cap` points (throws std::length_error with the cardinality).
OracleResult enumerate_errors(const Network& net, const QuantizedNetwork& qnet,
                              const InputRegion& region, size_t g,
                              int64_t cap = 10'000'000, bool track_neurons = false);

struct OracleDecision {
    bool proved = false;
    std::vector<int64_t> witness; // extremal input when falsified
    double witness_error = 0.0;
};

// Exact decision: proved iff max |error| < epsilon.
OracleDecision verify_by_enumeration(const Network& net, const QuantizedNetwork& qnet,
                                     const InputRegion& region, size_t g, double epsilon,
                                     int64_t cap = 10'000'000);

} // namespace qeb
