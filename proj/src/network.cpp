#include "qebcheck/network.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qeb {

namespace {

void check_dims(size_t num_inputs, const std::vector<size_t>& outs,
                const std::vector<size_t>& ins) {
    size_t prev = num_inputs;
    for (size_t a = 0; a < outs.size(); ++a) {
        if (ins[a] != prev)
            throw std::invalid_argument("layer " + std::to_string(a + 2) + " expects " +
                                        std::to_string(ins[a]) + " inputs, previous width is " +
                                        std::to_string(prev));
        if (outs[a] == 0) throw std::invalid_argument("empty layer");
        prev = outs[a];
    }
}

template <typename L>
void check_rect(const L& layer, size_t idx) {
    for (const auto& row : layer.weights)
        if (row.size() != layer.in_size())
            throw std::invalid_argument("ragged weight matrix in layer " + std::to_string(idx + 2));
    if (layer.bias.size() != layer.out_size())
        throw std::invalid_argument("bias size mismatch in layer " + std::to_string(idx + 2));
}

} // namespace

void Network::validate() const {
    if (layers.empty()) throw std::invalid_argument("network needs at least one affine layer");
    if (num_inputs == 0) throw std::invalid_argument("network needs at least one input");
    std::vector<size_t> outs, ins;
    for (size_t a = 0; a < layers.size(); ++a) {
        check_rect(layers[a], a);
        outs.push_back(layers[a].out_size());
        ins.push_back(layers[a].in_size());
    }
    check_dims(num_inputs, outs, ins);
}

void QuantizedNetwork::validate() const {
    if (layers.empty()) throw std::invalid_argument("network needs at least one affine layer");
    if (num_inputs == 0) throw std::invalid_argument("network needs at least one input");
    scheme.validate();
    std::vector<size_t> outs, ins;
    for (size_t a = 0; a < layers.size(); ++a) {
        check_rect(layers[a], a);
        outs.push_back(layers[a].out_size());
        ins.push_back(layers[a].in_size());
        for (const auto& row : layers[a].weights)
            for (int64_t w : row)
                if (w < scheme.weights.lb() || w > scheme.weights.ub())
                    throw std::invalid_argument("quantized weight out of range");
        for (int64_t b : layers[a].bias)
            if (b < scheme.biases.lb() || b > scheme.biases.ub())
                throw std::invalid_argument("quantized bias out of range");
    }
    check_dims(num_inputs, outs, ins);
}

QuantizedNetwork quantize_network(const Network& net, const QuantScheme& scheme) {
    net.validate();
    scheme.validate();
    QuantizedNetwork q;
    q.num_inputs = net.num_inputs;
    q.scheme = scheme;
    q.layers.reserve(net.layers.size());
    for (const AffineLayer& l : net.layers) {
        QuantLayer ql;
        ql.weights.reserve(l.out_size());
        for (const auto& row : l.weights) {
            std::vector<int64_t> qrow;
            qrow.reserve(row.size());
            for (double w : row) qrow.push_back(quantize_value(w, scheme.weights));
            ql.weights.push_back(std::move(qrow));
        }
        ql.bias.reserve(l.bias.size());
        for (double b : l.bias) ql.bias.push_back(quantize_value(b, scheme.biases));
        q.layers.push_back(std::move(ql));
    }
    return q;
}

std::vector<IntInterval> InputRegion::bounds(const QuantConfig& input_cfg) const {
    if (radius < 0) throw std::invalid_argument("negative region radius");
    std::vector<IntInterval> b;
    b.reserve(center.size());
    for (int64_t c : center) {
        int64_t lo = std::max(input_cfg.lb(), c - radius);
        int64_t hi = std::min(input_cfg.ub(), c + radius);
        if (lo > hi)
            throw std::invalid_argument("input region is empty (center outside the representable range)");
        b.emplace_back(lo, hi);
    }
    return b;
}

bool InputRegion::contains(std::span<const int64_t> point, const QuantConfig& input_cfg) const {
    if (point.size() != center.size()) return false;
    auto b = bounds(input_cfg);
    for (size_t k = 0; k < point.size(); ++k)
        if (!b[k].contains(point[k])) return false;
    return true;
}

int64_t InputRegion::point_count(const QuantConfig& input_cfg, int64_t cap) const {
    int64_t n = 1;
    for (const IntInterval& b : bounds(input_cfg)) {
        n *= b.hi - b.lo + 1;
        if (n > cap) return cap + 1;
    }
    return n;
}

DnnTrace dnn_trace(const Network& net, std::span<const double> x) {
    if (x.size() != net.num_inputs) throw std::invalid_argument("input dimension mismatch");
    DnnTrace t;
    std::vector<double> cur(x.begin(), x.end());
    for (size_t a = 0; a < net.layers.size(); ++a) {
        const AffineLayer& l = net.layers[a];
        std::vector<double> pre(l.out_size());
        for (size_t j = 0; j < l.out_size(); ++j) {
            double acc = l.bias[j];
            for (size_t k = 0; k < l.in_size(); ++k) acc += l.weights[j][k] * cur[k];
            pre[j] = acc;
        }
        std::vector<double> post = pre;
        if (a + 1 < net.layers.size())
            for (double& v : post) v = std::max(0.0, v);
        t.pre.push_back(std::move(pre));
        cur = post;
        t.post.push_back(std::move(post));
    }
    return t;
}

std::vector<double> dnn_forward(const Network& net, std::span<const double> x) {
    return dnn_trace(net, x).post.back();
}

QnnTrace qnn_trace(const QuantizedNetwork& qnet, std::span<const int64_t> xhat) {
    if (xhat.size() != qnet.num_inputs) throw std::invalid_argument("input dimension mismatch");
    const QuantScheme& s = qnet.scheme;
    for (int64_t v : xhat)
        if (v < s.input.lb() || v > s.input.ub())
            throw std::invalid_argument("quantized input out of range");

    QnnTrace t;
    std::vector<int64_t> cur(xhat.begin(), xhat.end());
    const double bias_scale = pow2(s.hidden.frac - s.biases.frac);
    for (size_t a = 0; a + 1 < qnet.layers.size(); ++a) {
        const QuantLayer& l = qnet.layers[a];
        const double acc_scale = pow2(qnet.accumulator_exponent(a));
        std::vector<double> pre(l.out_size());
        std::vector<int64_t> rounded(l.out_size()), clamped(l.out_size());
        for (size_t j = 0; j < l.out_size(); ++j) {
            int64_t acc = 0;
            for (size_t k = 0; k < l.in_size(); ++k) acc += l.weights[j][k] * cur[k];
            pre[j] = acc_scale * double(acc) + bias_scale * double(l.bias[j]);
            rounded[j] = round_nearest(pre[j]);
            clamped[j] = clamp_value(rounded[j], int64_t(0), s.hidden.ub());
        }
        cur = clamped;
        t.pre_round.push_back(std::move(pre));
        t.rounded.push_back(std::move(rounded));
        t.clamped.push_back(std::move(clamped));
    }

    const QuantLayer& out = qnet.layers.back();
    const double w_scale = pow2(-s.weights.frac);
    t.output.resize(out.out_size());
    for (size_t j = 0; j < out.out_size(); ++j) {
        int64_t acc = 0;
        for (size_t k = 0; k < out.in_size(); ++k) acc += out.weights[j][k] * cur[k];
        t.output[j] = w_scale * double(acc) + bias_scale * double(out.bias[j]);
    }
    return t;
}

std::vector<double> qnn_forward(const QuantizedNetwork& qnet, std::span<const int64_t> xhat) {
    return qnn_trace(qnet, xhat).output;
}

std::vector<double> weights_only_forward(const QuantizedNetwork& qnet,
                                         std::span<const int64_t> xhat) {
    if (xhat.size() != qnet.num_inputs) throw std::invalid_argument("input dimension mismatch");
    const QuantScheme& s = qnet.scheme;
    const double w_scale = pow2(-s.weights.frac);
    const double b_scale = pow2(-s.biases.frac);
    std::vector<double> cur(xhat.size());
    for (size_t k = 0; k < xhat.size(); ++k) cur[k] = pow2(-s.input.frac) * double(xhat[k]);
    for (size_t a = 0; a < qnet.layers.size(); ++a) {
        const QuantLayer& l = qnet.layers[a];
        std::vector<double> next(l.out_size());
        for (size_t j = 0; j < l.out_size(); ++j) {
            double acc = b_scale * double(l.bias[j]);
            for (size_t k = 0; k < l.in_size(); ++k)
                acc += w_scale * double(l.weights[j][k]) * cur[k];
            next[j] = (a + 1 < qnet.layers.size()) ? std::max(0.0, acc) : acc;
        }
        cur = std::move(next);
    }
    return cur;
}

double quantization_error(const Network& net, const QuantizedNetwork& qnet,
                          std::span<const int64_t> xhat, size_t g) {
    if (g >= net.num_outputs()) throw std::invalid_argument("output class index out of range");
    const double span = qnet.scheme.input.span();
    std::vector<double> x(xhat.size());
    for (size_t k = 0; k < xhat.size(); ++k) x[k] = double(xhat[k]) / span;
    const double q = pow2(-qnet.scheme.hidden.frac) * qnn_forward(qnet, xhat)[g];
    return q - dnn_forward(net, x)[g];
}

} // namespace qeb
