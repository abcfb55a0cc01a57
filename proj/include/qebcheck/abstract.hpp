// Polyhedral bound propagation for both networks.
//
// Every neuron is split into nodes that each carry a lower and an upper
// affine form over the previous stage's variables plus concrete bounds:
// affine and ReLU nodes for the real-valued network; affine (with a +-0.5
// rounding slack), ReLU and min nodes for the quantized one. Concrete bounds
// come from substituting the forms down to the input variables and taking
// the best corner of the input box.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qebcheck/interval.hpp"
#include "qebcheck/network.hpp"

namespace qeb {

struct AffineForm {
    std::vector<double> coef;
    double constant = 0.0;
};

struct AbstractElement {
    AffineForm lower;
    AffineForm upper;
    double lb = 0.0;
    double ub = 0.0;
};

enum class StageKind { Affine, Relu, Min };

struct Stage {
    StageKind kind = StageKind::Affine;
    std::vector<AbstractElement> nodes; // forms over the previous stage's outputs
};

struct AbstractChain {
    std::vector<Interval> input_box;
    std::vector<Stage> stages;

    // Substitute an expression over the outputs of stage `s` (s = -1 means
    // the expression is already over the inputs) down to the input
    // variables, picking each variable's lower or upper form by the sign of
    // its coefficient.
    AffineForm substitute(int s, const AffineForm& e, bool want_lower) const;

    double eval_min(const AffineForm& input_form) const;
    double eval_max(const AffineForm& input_form) const;

    // Input-level forms of node (s, j); the node's own forms live over
    // stage s-1.
    AffineForm lower_input_form(int s, size_t j) const;
    AffineForm upper_input_form(int s, size_t j) const;
};

// Constructors for the individual abstract transformers. `j` addresses the
// source node inside a stage of width `width`; the returned forms are over
// that stage's variables.
AbstractElement affine_element(std::span<const double> w, double b);
// Quantized affine accumulator 2^acc_exp * sum(w * x) + bias_scale * b with
// the rounding slack folded into the bounds forms.
AbstractElement quant_affine_element(std::span<const int64_t> w, int64_t b, int acc_exp,
                                     double bias_scale);
AbstractElement relu_element(double l, double u, size_t j, size_t width);
AbstractElement min_element(double l, double u, double t, size_t j, size_t width);

struct LayerBounds {
    std::vector<Interval> pre;  // before the activation
    std::vector<Interval> post; // after it (output layer: same as pre)
};

struct InputForms {
    AffineForm lower;
    AffineForm upper;
};

struct DnnAnalysis {
    AbstractChain chain;                          // stages: (affine, relu)* affine
    std::vector<LayerBounds> layers;              // per affine layer
    std::vector<std::vector<InputForms>> pre_forms; // substituted affine-node forms
};

DnnAnalysis analyze_dnn(const Network& net, std::span<const Interval> input_box);

struct QnnSymbolicAnalysis {
    std::vector<IntInterval> int_box;
    AbstractChain chain;                          // stages: (affine, relu, min)* affine
    std::vector<LayerBounds> layers;              // integer-unit intervals
    std::vector<std::vector<InputForms>> pre_forms; // over the integer input vars
};

QnnSymbolicAnalysis analyze_qnn_symbolic(const QuantizedNetwork& qnet, const InputRegion& region);

// Concrete (non-symbolic) interval analysis of the quantized network:
// sign-directed integer corner evaluation, then round, then clamp.
struct QnnConcreteAnalysis {
    std::vector<IntInterval> int_box;
    std::vector<std::vector<Interval>> pre_round; // hidden accumulator ranges, real
    std::vector<std::vector<IntInterval>> pre;    // rounded, before clamp
    std::vector<std::vector<IntInterval>> post;   // clamped activations
    std::vector<Interval> output;                 // real-valued output range
};

QnnConcreteAnalysis analyze_qnn_concrete(const QuantizedNetwork& qnet, const InputRegion& region);

// Real input box x = xhat / (C_in.ub - C_in.lb) of a quantized region.
std::vector<Interval> real_input_box(const InputRegion& region, const QuantConfig& input_cfg);

} // namespace qeb
