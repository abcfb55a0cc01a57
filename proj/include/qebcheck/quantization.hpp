// Fixed-point quantization configurations and the scalar quantization
// primitives (round-to-nearest, clamp, value quantization).

#pragma once

#include <cstdint>
#include <string>

namespace qeb {

enum class Signedness { Unsigned, Signed };

std::string to_string(Signedness s);           // "+" or "±"
Signedness signedness_from_string(const std::string& s); // accepts "+", "±", "+-"

// <tau, Q, F>: signedness, total bits, fractional bits.
struct QuantConfig {
    Signedness sign = Signedness::Unsigned;
    int bits = 8;
    int frac = 0;

    int64_t lb() const {
        return sign == Signedness::Unsigned ? 0 : -(int64_t(1) << (bits - 1));
    }
    int64_t ub() const {
        return sign == Signedness::Unsigned ? (int64_t(1) << bits) - 1
                                            : (int64_t(1) << (bits - 1)) - 1;
    }
    // Width of the representable integer range, as a real.
    double span() const { return double(ub() - lb()); }

    void validate() const;
};

// Per-tensor-class configurations: weights, biases, input-layer output and
// hidden-layer outputs. Hidden activations must be unsigned (the activation
// is a clamp to [0, C_h.ub]).
struct QuantScheme {
    QuantConfig weights;
    QuantConfig biases;
    QuantConfig input;
    QuantConfig hidden;

    void validate() const;
};

double clamp_value(double x, double a, double b);
int64_t clamp_value(int64_t x, int64_t a, int64_t b);

// Round to nearest integer, ties away from zero. Throws on non-finite input
// and on |x| >= 2^62.
int64_t round_nearest(double x);

// clamp(round(2^F * x), lb, ub)
int64_t quantize_value(double x, const QuantConfig& c);

// Exact power of two as a double.
double pow2(int e);

} // namespace qeb
