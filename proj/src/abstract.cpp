#include "qebcheck/abstract.hpp"

#include <algorithm>
#include <stdexcept>

namespace qeb {

AffineForm AbstractChain::substitute(int s, const AffineForm& e, bool want_lower) const {
    AffineForm cur = e;
    for (int level = s; level >= 0; --level) {
        const Stage& stage = stages[level];
        if (cur.coef.size() != stage.nodes.size())
            throw std::invalid_argument("expression width does not match stage width");
        size_t prev_width =
            level == 0 ? input_box.size() : stages[level - 1].nodes.size();
        AffineForm next;
        next.coef.assign(prev_width, 0.0);
        next.constant = cur.constant;
        for (size_t j = 0; j < cur.coef.size(); ++j) {
            double c = cur.coef[j];
            if (c == 0.0) continue;
            const AffineForm& f = (c >= 0) == want_lower ? stage.nodes[j].lower
                                                         : stage.nodes[j].upper;
            for (size_t k = 0; k < prev_width; ++k) next.coef[k] += c * f.coef[k];
            next.constant += c * f.constant;
        }
        cur = std::move(next);
    }
    if (cur.coef.size() != input_box.size())
        throw std::invalid_argument("expression width does not match input width");
    return cur;
}

double AbstractChain::eval_min(const AffineForm& f) const {
    return corner_min(f.coef, input_box, f.constant);
}

double AbstractChain::eval_max(const AffineForm& f) const {
    return corner_max(f.coef, input_box, f.constant);
}

AffineForm AbstractChain::lower_input_form(int s, size_t j) const {
    return substitute(s - 1, stages[s].nodes[j].lower, true);
}

AffineForm AbstractChain::upper_input_form(int s, size_t j) const {
    return substitute(s - 1, stages[s].nodes[j].upper, false);
}

AbstractElement affine_element(std::span<const double> w, double b) {
    AbstractElement e;
    e.lower.coef.assign(w.begin(), w.end());
    e.lower.constant = b;
    e.upper = e.lower;
    return e;
}

AbstractElement quant_affine_element(std::span<const int64_t> w, int64_t b, int acc_exp,
                                     double bias_scale) {
    AbstractElement e;
    const double s = pow2(acc_exp);
    e.lower.coef.resize(w.size());
    for (size_t k = 0; k < w.size(); ++k) e.lower.coef[k] = s * double(w[k]);
    const double c = bias_scale * double(b);
    e.upper = e.lower;
    e.lower.constant = c - 0.5;
    e.upper.constant = c + 0.5;
    return e;
}

namespace {

AffineForm unit_form(size_t j, size_t width, double coef, double constant) {
    AffineForm f;
    f.coef.assign(width, 0.0);
    f.coef[j] = coef;
    f.constant = constant;
    return f;
}

AffineForm const_form(size_t width, double constant) {
    AffineForm f;
    f.coef.assign(width, 0.0);
    f.constant = constant;
    return f;
}

} // namespace

AbstractElement relu_element(double l, double u, size_t j, size_t width) {
    AbstractElement e;
    if (u <= 0) {
        e.lower = e.upper = const_form(width, 0.0);
        e.lb = e.ub = 0.0;
    } else if (l >= 0) {
        e.lower = e.upper = unit_form(j, width, 1.0, 0.0);
        e.lb = l;
        e.ub = u;
    } else {
        e.upper = unit_form(j, width, u / (u - l), -u * l / (u - l));
        const double lambda = u >= -l ? 1.0 : 0.0; // smaller triangle wins, ties keep identity
        e.lower = unit_form(j, width, lambda, 0.0);
        e.lb = lambda * l;
        e.ub = u;
    }
    return e;
}

AbstractElement min_element(double l, double u, double t, size_t j, size_t width) {
    AbstractElement e;
    if (l >= t) {
        e.lower = e.upper = const_form(width, t);
        e.lb = e.ub = t;
    } else if (u <= t) {
        e.lower = e.upper = unit_form(j, width, 1.0, 0.0);
        e.lb = l;
        e.ub = u;
    } else {
        e.lower = unit_form(j, width, (t - l) / (u - l), (u - t) * l / (u - l));
        // upper is either the identity or the constant t, whichever encloses
        // the smaller area; ties keep the identity
        if (u + l <= 2 * t) {
            e.upper = unit_form(j, width, 1.0, 0.0);
            e.ub = u;
        } else {
            e.upper = const_form(width, t);
            e.ub = t;
        }
        e.lb = l;
    }
    return e;
}

namespace {

// Push an affine stage, compute concrete bounds and input-level forms of its
// nodes via back-substitution.
void finish_affine_stage(AbstractChain& chain, Stage&& stage,
                         std::vector<InputForms>& forms_out, LayerBounds& bounds_out) {
    chain.stages.push_back(std::move(stage));
    const int s = int(chain.stages.size()) - 1;
    Stage& st = chain.stages[s];
    forms_out.clear();
    bounds_out.pre.clear();
    for (size_t j = 0; j < st.nodes.size(); ++j) {
        InputForms f;
        f.lower = chain.lower_input_form(s, j);
        f.upper = chain.upper_input_form(s, j);
        st.nodes[j].lb = chain.eval_min(f.lower);
        st.nodes[j].ub = chain.eval_max(f.upper);
        bounds_out.pre.emplace_back(st.nodes[j].lb, st.nodes[j].ub);
        forms_out.push_back(std::move(f));
    }
}

} // namespace

DnnAnalysis analyze_dnn(const Network& net, std::span<const Interval> input_box) {
    net.validate();
    if (input_box.size() != net.num_inputs)
        throw std::invalid_argument("input box dimension mismatch");

    DnnAnalysis a;
    a.chain.input_box.assign(input_box.begin(), input_box.end());
    const size_t L = net.layers.size();
    a.layers.resize(L);
    a.pre_forms.resize(L);

    for (size_t l = 0; l < L; ++l) {
        const AffineLayer& layer = net.layers[l];
        Stage affine{StageKind::Affine, {}};
        for (size_t j = 0; j < layer.out_size(); ++j)
            affine.nodes.push_back(affine_element(layer.weights[j], layer.bias[j]));
        finish_affine_stage(a.chain, std::move(affine), a.pre_forms[l], a.layers[l]);

        if (l + 1 < L) {
            const Stage& src = a.chain.stages.back();
            Stage relu{StageKind::Relu, {}};
            for (size_t j = 0; j < src.nodes.size(); ++j)
                relu.nodes.push_back(
                    relu_element(src.nodes[j].lb, src.nodes[j].ub, j, src.nodes.size()));
            for (const AbstractElement& e : relu.nodes)
                a.layers[l].post.emplace_back(std::max(0.0, e.lb), std::max(0.0, e.ub));
            a.chain.stages.push_back(std::move(relu));
        } else {
            a.layers[l].post = a.layers[l].pre;
        }
    }
    return a;
}

QnnSymbolicAnalysis analyze_qnn_symbolic(const QuantizedNetwork& qnet,
                                         const InputRegion& region) {
    qnet.validate();
    if (region.center.size() != qnet.num_inputs)
        throw std::invalid_argument("region dimension mismatch");

    QnnSymbolicAnalysis a;
    a.int_box = region.bounds(qnet.scheme.input);
    for (const IntInterval& b : a.int_box) a.chain.input_box.push_back(b.to_real());

    const QuantScheme& s = qnet.scheme;
    const double bias_scale = pow2(s.hidden.frac - s.biases.frac);
    const double t = double(s.hidden.ub());
    const size_t L = qnet.layers.size();
    a.layers.resize(L);
    a.pre_forms.resize(L);

    for (size_t l = 0; l < L; ++l) {
        const QuantLayer& layer = qnet.layers[l];
        const bool hidden = l + 1 < L;
        Stage affine{StageKind::Affine, {}};
        for (size_t j = 0; j < layer.out_size(); ++j) {
            if (hidden) {
                affine.nodes.push_back(quant_affine_element(
                    layer.weights[j], layer.bias[j], qnet.accumulator_exponent(l), bias_scale));
            } else {
                // output layer is exact: 2^-F_w * W * x + 2^(F_h-F_b) * b
                std::vector<double> w(layer.in_size());
                for (size_t k = 0; k < w.size(); ++k)
                    w[k] = pow2(-s.weights.frac) * double(layer.weights[j][k]);
                affine.nodes.push_back(affine_element(w, bias_scale * double(layer.bias[j])));
            }
        }
        finish_affine_stage(a.chain, std::move(affine), a.pre_forms[l], a.layers[l]);

        if (hidden) {
            const Stage& src = a.chain.stages.back();
            const size_t width = src.nodes.size();
            Stage relu{StageKind::Relu, {}};
            for (size_t j = 0; j < width; ++j)
                relu.nodes.push_back(relu_element(src.nodes[j].lb, src.nodes[j].ub, j, width));
            a.chain.stages.push_back(std::move(relu));

            const Stage& rsrc = a.chain.stages.back();
            Stage mins{StageKind::Min, {}};
            for (size_t j = 0; j < width; ++j)
                mins.nodes.push_back(min_element(rsrc.nodes[j].lb, rsrc.nodes[j].ub, t, j, width));
            for (const AbstractElement& e : mins.nodes)
                a.layers[l].post.emplace_back(clamp_value(e.lb, 0.0, t),
                                              clamp_value(e.ub, 0.0, t));
            a.chain.stages.push_back(std::move(mins));
        } else {
            a.layers[l].post = a.layers[l].pre;
        }
    }
    return a;
}

QnnConcreteAnalysis analyze_qnn_concrete(const QuantizedNetwork& qnet,
                                         const InputRegion& region) {
    qnet.validate();
    if (region.center.size() != qnet.num_inputs)
        throw std::invalid_argument("region dimension mismatch");

    QnnConcreteAnalysis a;
    a.int_box = region.bounds(qnet.scheme.input);

    const QuantScheme& s = qnet.scheme;
    const double bias_scale = pow2(s.hidden.frac - s.biases.frac);
    std::vector<IntInterval> cur = a.int_box;

    const size_t L = qnet.layers.size();
    for (size_t l = 0; l + 1 < L; ++l) {
        const QuantLayer& layer = qnet.layers[l];
        const double acc_scale = pow2(qnet.accumulator_exponent(l));
        std::vector<Interval> zrow;
        std::vector<IntInterval> prow, crow;
        for (size_t j = 0; j < layer.out_size(); ++j) {
            int64_t acc_lo = 0, acc_hi = 0;
            for (size_t k = 0; k < layer.in_size(); ++k) {
                int64_t w = layer.weights[j][k];
                acc_lo += w >= 0 ? w * cur[k].lo : w * cur[k].hi;
                acc_hi += w >= 0 ? w * cur[k].hi : w * cur[k].lo;
            }
            double zlo = acc_scale * double(acc_lo) + bias_scale * double(layer.bias[j]);
            double zhi = acc_scale * double(acc_hi) + bias_scale * double(layer.bias[j]);
            zrow.emplace_back(zlo, zhi);
            IntInterval p(round_nearest(zlo), round_nearest(zhi));
            prow.push_back(p);
            crow.emplace_back(clamp_value(p.lo, int64_t(0), s.hidden.ub()),
                              clamp_value(p.hi, int64_t(0), s.hidden.ub()));
        }
        cur = crow;
        a.pre_round.push_back(std::move(zrow));
        a.pre.push_back(std::move(prow));
        a.post.push_back(std::move(crow));
    }

    const QuantLayer& out = qnet.layers.back();
    const double w_scale = pow2(-s.weights.frac);
    for (size_t j = 0; j < out.out_size(); ++j) {
        int64_t acc_lo = 0, acc_hi = 0;
        for (size_t k = 0; k < out.in_size(); ++k) {
            int64_t w = out.weights[j][k];
            acc_lo += w >= 0 ? w * cur[k].lo : w * cur[k].hi;
            acc_hi += w >= 0 ? w * cur[k].hi : w * cur[k].lo;
        }
        a.output.emplace_back(w_scale * double(acc_lo) + bias_scale * double(out.bias[j]),
                              w_scale * double(acc_hi) + bias_scale * double(out.bias[j]));
    }
    return a;
}

std::vector<Interval> real_input_box(const InputRegion& region, const QuantConfig& input_cfg) {
    std::vector<Interval> box;
    const double span = input_cfg.span();
    for (const IntInterval& b : region.bounds(input_cfg))
        box.emplace_back(double(b.lo) / span, double(b.hi) / span);
    return box;
}

} // namespace qeb
