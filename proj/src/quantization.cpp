#include "qebcheck/quantization.hpp"

#include <cmath>
#include <stdexcept>

namespace qeb {

std::string to_string(Signedness s) {
    return s == Signedness::Unsigned ? "+" : "±";
}

Signedness signedness_from_string(const std::string& s) {
    if (s == "+") return Signedness::Unsigned;
    if (s == "±" || s == "+-") return Signedness::Signed;
    throw std::invalid_argument("bad signedness '" + s + "' (expected \"+\" or \"±\")");
}

void QuantConfig::validate() const {
    if (bits < 1 || bits > 32)
        throw std::invalid_argument("quantization bit width must be in [1, 32], got " +
                                    std::to_string(bits));
}

void QuantScheme::validate() const {
    weights.validate();
    biases.validate();
    input.validate();
    hidden.validate();
    if (hidden.sign != Signedness::Unsigned)
        throw std::invalid_argument("hidden-layer quantization must be unsigned");
}

double clamp_value(double x, double a, double b) {
    if (a > b) throw std::invalid_argument("clamp bounds out of order");
    return x < a ? a : (x > b ? b : x);
}

int64_t clamp_value(int64_t x, int64_t a, int64_t b) {
    if (a > b) throw std::invalid_argument("clamp bounds out of order");
    return x < a ? a : (x > b ? b : x);
}

int64_t round_nearest(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("round_nearest: non-finite input");
    if (std::fabs(x) >= 4.611686018427387904e18) // 2^62
        throw std::invalid_argument("round_nearest: input too large");
    return std::llround(x); // llround rounds halfway cases away from zero
}

int64_t quantize_value(double x, const QuantConfig& c) {
    c.validate();
    return clamp_value(round_nearest(pow2(c.frac) * x), c.lb(), c.ub());
}

double pow2(int e) { return std::ldexp(1.0, e); }

} // namespace qeb
