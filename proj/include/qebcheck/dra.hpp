// Differential reachability analysis: sound per-neuron bounds on the aligned
// output deviation 2^-F_h * quantized - real, propagated layer by layer.
//
// All difference intervals are kept in real (fixed-point aligned) units;
// integer activation intervals are converted once at the module boundary
// (2^-F_in for the input layer, 2^-F_h afterwards).

#pragma once

#include <span>
#include <vector>

#include "qebcheck/abstract.hpp"
#include "qebcheck/interval.hpp"
#include "qebcheck/network.hpp"

namespace qeb {

enum class DraVerdict { Proved, Unknown };

struct DraResult {
    std::vector<Interval> input_delta;            // per input coordinate
    std::vector<std::vector<Interval>> delta_in;  // per affine layer, pre-activation
    std::vector<std::vector<Interval>> delta;     // post-activation (output: == delta_in)

    const std::vector<Interval>& output() const { return delta.back(); }
    DraVerdict verdict(size_t g, double epsilon) const {
        const Interval& o = delta.back().at(g);
        return (o.lo > -epsilon && o.hi < epsilon) ? DraVerdict::Proved : DraVerdict::Unknown;
    }
};

// Difference of the affine stages. `w` is the real weight row, `wt` the
// fixed-point weight row 2^-F_w * What, `s_prev` the real network's previous
// activation intervals, `d_prev` the aligned difference intervals and `xi`
// the rounding slack (2^-F_h-1 for hidden layers, 0 for the output layer).
Interval aff_trs(std::span<const double> w, std::span<const double> wt, double delta_b,
                 std::span<const Interval> s_prev, std::span<const Interval> d_prev, double xi);

// Difference across clamp-vs-ReLU. `s_dnn` is the real pre-activation
// interval, `s_qnn` the aligned quantized pre-activation interval and
// t = 2^-F_h * C_h.ub the aligned saturation level. Aborts if the case
// result and the activation-image difference have an empty intersection
// (would mean an internal soundness bug).
Interval act_trs(const Interval& d_in, const Interval& s_dnn, const Interval& s_qnn, double t);

// Interval-based forward difference propagation.
DraResult propagate_interval(const Network& net, const QuantizedNetwork& qnet,
                             const InputRegion& region);

// Symbolic difference computation: subtracts the input-level polyhedral
// forms of the paired pre-activation nodes and evaluates over the real box.
Interval symbolic_diff_bounds(const InputForms& dnn_forms, const InputForms& qnn_forms,
                              double align, double input_span,
                              std::span<const Interval> real_box);

DraResult propagate_symbolic(const Network& net, const QuantizedNetwork& qnet,
                             const InputRegion& region);

// Baseline: independent analyses subtracted on the output layer only.
std::vector<Interval> naive_diff(const Network& net, const QuantizedNetwork& qnet,
                                 const InputRegion& region);

// Per-neuron intersection of two sound results; still sound, tighter than
// either input. Not part of the propagation algorithms themselves.
DraResult intersect_sound(const DraResult& a, const DraResult& b);

} // namespace qeb
