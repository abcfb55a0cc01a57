#include "qebcheck/dra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qeb {

namespace {

// Meet of two over-approximations of the same set. Bounds computed along
// different expression orders can disagree by a few ulps (the analysis makes
// no soundness claim about its own rounding), so gaps up to a tiny tolerance
// collapse to the touching point instead of failing.
std::optional<Interval> meet_sound(const Interval& a, const Interval& b) {
    if (auto m = try_intersect(a, b)) return m;
    const double scale = std::max({1.0, std::fabs(a.lo), std::fabs(a.hi), std::fabs(b.lo),
                                   std::fabs(b.hi)});
    const double lo = std::max(a.lo, b.lo);
    const double hi = std::min(a.hi, b.hi);
    if (lo - hi <= 1e-12 * scale) return Interval{hi, lo}; // crossed by fp noise only
    return std::nullopt;
}

} // namespace

Interval aff_trs(std::span<const double> w, std::span<const double> wt, double delta_b,
                 std::span<const Interval> s_prev, std::span<const Interval> d_prev, double xi) {
    if (w.size() != wt.size() || w.size() != s_prev.size() || w.size() != d_prev.size())
        throw std::invalid_argument("aff_trs dimension mismatch");
    double lo = delta_b - xi;
    double hi = delta_b + xi;
    for (size_t k = 0; k < w.size(); ++k) {
        Interval a = scale(wt[k], d_prev[k]);
        Interval b = scale(wt[k] - w[k], s_prev[k]);
        lo += a.lo + b.lo;
        hi += a.hi + b.hi;
    }
    return {lo, hi};
}

Interval act_trs(const Interval& d_in, const Interval& s_dnn, const Interval& s_qnn, double t) {
    if (!(t > 0)) throw std::invalid_argument("act_trs: clamp level must be positive");
    double lb, ub;
    if (s_dnn.hi <= 0) {
        // real neuron always inactive: difference is the clamped value itself
        lb = clamp_value(s_qnn.lo, 0.0, t);
        ub = clamp_value(s_qnn.hi, 0.0, t);
    } else if (s_dnn.lo >= 0) {
        // real neuron always active
        if (s_qnn.hi <= t && s_qnn.lo >= 0) {
            lb = d_in.lo;
            ub = d_in.hi;
        } else if (s_qnn.lo >= t || s_qnn.hi <= 0) {
            lb = clamp_value(s_qnn.lo, 0.0, t) - s_dnn.hi;
            ub = clamp_value(s_qnn.hi, 0.0, t) - s_dnn.lo;
        } else if (s_qnn.hi <= t) {
            lb = std::max(-s_dnn.hi, d_in.lo);
            ub = std::max(-s_dnn.lo, d_in.hi);
        } else if (s_qnn.lo >= 0) {
            lb = std::min(t - s_dnn.hi, d_in.lo);
            ub = std::min(t - s_dnn.lo, d_in.hi);
        } else {
            lb = std::max(-s_dnn.hi, std::min(t - s_dnn.hi, d_in.lo));
            ub = std::max(-s_dnn.lo, std::min(t - s_dnn.lo, d_in.hi));
        }
    } else {
        // real neuron unstable
        if (s_qnn.hi <= t && s_qnn.lo >= 0) {
            lb = std::min(s_qnn.lo, d_in.lo);
            ub = std::min(s_qnn.hi, d_in.hi);
        } else if (s_qnn.lo >= t || s_qnn.hi <= 0) {
            lb = clamp_value(s_qnn.lo, 0.0, t) - s_dnn.hi;
            ub = clamp_value(s_qnn.hi, 0.0, t);
        } else if (s_qnn.hi <= t) {
            lb = std::max(d_in.lo, -s_dnn.hi);
            ub = std::min(d_in.hi, s_qnn.hi);
            if (d_in.hi <= 0) ub = 0;
            if (d_in.lo >= 0) lb = 0;
        } else if (s_qnn.lo >= 0) {
            lb = std::min({d_in.lo, s_qnn.lo, t - s_dnn.hi});
            ub = std::min(d_in.hi, t);
        } else {
            lb = std::min({t - s_dnn.hi, 0.0, std::max(d_in.lo, -s_dnn.hi)});
            ub = clamp_value(d_in.hi, 0.0, t);
        }
    }

    // intersect with (clamp image of quantized) - (ReLU image of real)
    Interval q_img{clamp_value(s_qnn.lo, 0.0, t), clamp_value(s_qnn.hi, 0.0, t)};
    Interval d_img{std::max(0.0, s_dnn.lo), std::max(0.0, s_dnn.hi)};
    auto res = meet_sound(Interval{lb, ub}, q_img - d_img);
    if (!res)
        throw std::logic_error("act_trs produced an empty difference interval "
                               "(internal soundness violation)");
    return *res;
}

namespace {

void check_pair(const Network& net, const QuantizedNetwork& qnet) {
    net.validate();
    qnet.validate();
    if (net.num_inputs != qnet.num_inputs || net.layers.size() != qnet.layers.size())
        throw std::invalid_argument("network pair is structurally mismatched");
    for (size_t l = 0; l < net.layers.size(); ++l)
        if (net.layers[l].out_size() != qnet.layers[l].out_size())
            throw std::invalid_argument("network pair is structurally mismatched");
    if (qnet.scheme.hidden.sign != Signedness::Unsigned)
        throw std::invalid_argument(
            "unsupported configuration: hidden activations must be unsigned");
}

std::vector<double> fixed_point_row(const QuantizedNetwork& qnet, size_t l, size_t j) {
    const double s = pow2(-qnet.scheme.weights.frac);
    const auto& row = qnet.layers[l].weights[j];
    std::vector<double> wt(row.size());
    for (size_t k = 0; k < row.size(); ++k) wt[k] = s * double(row[k]);
    return wt;
}

// Input-layer difference intervals c * [lo, hi] per coordinate, with
// c = align - 1/span the gap between the fixed-point and normalized inputs.
std::vector<Interval> scaled_input_delta(const std::vector<IntInterval>& int_box, double align,
                                         double span) {
    const double c = align - 1.0 / span;
    std::vector<Interval> d;
    d.reserve(int_box.size());
    for (const IntInterval& b : int_box) d.push_back(scale(c, b.to_real()));
    return d;
}

} // namespace

DraResult propagate_interval(const Network& net, const QuantizedNetwork& qnet,
                             const InputRegion& region) {
    check_pair(net, qnet);
    const QuantScheme& s = qnet.scheme;
    const double span = s.input.span();
    const double align_h = pow2(-s.hidden.frac);
    const double t = align_h * double(s.hidden.ub());
    const double bias_align = pow2(-s.biases.frac);

    const auto int_box = region.bounds(s.input);
    const auto box = real_input_box(region, s.input);
    const DnnAnalysis dnn = analyze_dnn(net, box);
    const QnnConcreteAnalysis qcon = analyze_qnn_concrete(qnet, region);

    DraResult r;
    r.input_delta = scaled_input_delta(int_box, pow2(-s.input.frac), span);

    const size_t L = net.layers.size();
    std::vector<Interval> prev_delta = r.input_delta;
    std::vector<Interval> prev_s(box.begin(), box.end());

    for (size_t l = 0; l < L; ++l) {
        const bool hidden = l + 1 < L;
        const double xi = hidden ? pow2(-s.hidden.frac - 1) : 0.0;
        if (!hidden && l == 0) {
            // no hidden layer: the output affine reads the input layer, whose
            // aligned counterpart is 2^-F_h * xhat rather than 2^-F_in * xhat
            prev_delta = scaled_input_delta(int_box, align_h, span);
        }
        const size_t n = net.layers[l].out_size();
        std::vector<Interval> din(n), dout(n);
        for (size_t j = 0; j < n; ++j) {
            const double delta_b =
                bias_align * double(qnet.layers[l].bias[j]) - net.layers[l].bias[j];
            din[j] = aff_trs(net.layers[l].weights[j], fixed_point_row(qnet, l, j), delta_b,
                             prev_s, prev_delta, xi);
            if (hidden)
                dout[j] = act_trs(din[j], dnn.layers[l].pre[j],
                                  scale(align_h, qcon.pre[l][j].to_real()), t);
            else
                dout[j] = din[j];
        }
        r.delta_in.push_back(std::move(din));
        r.delta.push_back(dout);
        prev_delta = std::move(dout);
        prev_s = dnn.layers[l].post;
    }
    return r;
}

Interval symbolic_diff_bounds(const InputForms& dnn_forms, const InputForms& qnn_forms,
                              double align, double input_span,
                              std::span<const Interval> real_box) {
    const size_t n = real_box.size();
    if (dnn_forms.lower.coef.size() != n || qnn_forms.lower.coef.size() != n)
        throw std::invalid_argument("symbolic_diff_bounds dimension mismatch");
    AffineForm low, up;
    low.coef.resize(n);
    up.coef.resize(n);
    // xhat = span * x maps the quantized form onto the real input variables
    for (size_t k = 0; k < n; ++k) {
        low.coef[k] = align * input_span * qnn_forms.lower.coef[k] - dnn_forms.upper.coef[k];
        up.coef[k] = align * input_span * qnn_forms.upper.coef[k] - dnn_forms.lower.coef[k];
    }
    low.constant = align * qnn_forms.lower.constant - dnn_forms.upper.constant;
    up.constant = align * qnn_forms.upper.constant - dnn_forms.lower.constant;
    return {corner_min(low.coef, real_box, low.constant),
            corner_max(up.coef, real_box, up.constant)};
}

DraResult propagate_symbolic(const Network& net, const QuantizedNetwork& qnet,
                             const InputRegion& region) {
    check_pair(net, qnet);
    const QuantScheme& s = qnet.scheme;
    const double span = s.input.span();
    const double align_h = pow2(-s.hidden.frac);
    const double t = align_h * double(s.hidden.ub());

    const auto int_box = region.bounds(s.input);
    const auto box = real_input_box(region, s.input);
    const DnnAnalysis dnn = analyze_dnn(net, box);
    const QnnSymbolicAnalysis qsym = analyze_qnn_symbolic(qnet, region);

    DraResult r;
    r.input_delta = scaled_input_delta(int_box, pow2(-s.input.frac), span);

    const size_t L = net.layers.size();
    for (size_t l = 0; l < L; ++l) {
        const bool hidden = l + 1 < L;
        const size_t n = net.layers[l].out_size();
        std::vector<Interval> din(n), dout(n);
        for (size_t j = 0; j < n; ++j) {
            din[j] = symbolic_diff_bounds(dnn.pre_forms[l][j], qsym.pre_forms[l][j], align_h,
                                          span, box);
            if (hidden)
                dout[j] = act_trs(din[j], dnn.layers[l].pre[j],
                                  scale(align_h, qsym.layers[l].pre[j]), t);
            else
                dout[j] = din[j];
        }
        r.delta_in.push_back(std::move(din));
        r.delta.push_back(std::move(dout));
    }
    return r;
}

std::vector<Interval> naive_diff(const Network& net, const QuantizedNetwork& qnet,
                                 const InputRegion& region) {
    check_pair(net, qnet);
    const QuantScheme& s = qnet.scheme;
    const auto box = real_input_box(region, s.input);
    const DnnAnalysis dnn = analyze_dnn(net, box);
    const QnnConcreteAnalysis qcon = analyze_qnn_concrete(qnet, region);

    std::vector<Interval> out;
    const auto& dnn_out = dnn.layers.back().pre;
    for (size_t j = 0; j < dnn_out.size(); ++j)
        out.push_back(scale(pow2(-s.hidden.frac), qcon.output[j]) - dnn_out[j]);
    return out;
}

DraResult intersect_sound(const DraResult& a, const DraResult& b) {
    auto meet = [](const std::vector<Interval>& x, const std::vector<Interval>& y) {
        if (x.size() != y.size()) throw std::invalid_argument("result shapes differ");
        std::vector<Interval> out;
        for (size_t i = 0; i < x.size(); ++i) {
            auto m = meet_sound(x[i], y[i]);
            if (!m)
                throw std::logic_error("sound difference intervals do not overlap "
                                       "(internal soundness violation)");
            out.push_back(*m);
        }
        return out;
    };
    DraResult r;
    r.input_delta = meet(a.input_delta, b.input_delta);
    if (a.delta_in.size() != b.delta_in.size()) throw std::invalid_argument("result shapes differ");
    for (size_t l = 0; l < a.delta_in.size(); ++l) {
        r.delta_in.push_back(meet(a.delta_in[l], b.delta_in[l]));
        r.delta.push_back(meet(a.delta[l], b.delta[l]));
    }
    return r;
}

} // namespace qeb
