#include "qebcheck/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace qeb {

double OracleResult::max_abs_error() const {
    return std::max(std::fabs(max_error), std::fabs(min_error));
}

OracleResult enumerate_errors(const Network& net, const QuantizedNetwork& qnet,
                              const InputRegion& region, size_t g, int64_t cap,
                              bool track_neurons) {
    net.validate();
    qnet.validate();
    if (g >= net.num_outputs()) throw std::invalid_argument("output class index out of range");

    const QuantScheme& s = qnet.scheme;
    const auto box = region.bounds(s.input);
    {
        // exact cardinality for the capacity check
        __int128 n = 1;
        for (const IntInterval& b : box) n *= __int128(b.hi - b.lo + 1);
        if (n > __int128(cap)) {
            double approx = 1.0;
            for (const IntInterval& b : box) approx *= double(b.hi - b.lo + 1);
            throw std::length_error("input region has about " + std::to_string(approx) +
                                    " points, exceeding the enumeration cap of " +
                                    std::to_string(cap));
        }
    }

    const double span = s.input.span();
    const double align_in = pow2(-s.input.frac);
    const double align_h = pow2(-s.hidden.frac);

    OracleResult r;
    r.has_neuron_ranges = track_neurons;

    std::vector<int64_t> point(box.size());
    for (size_t k = 0; k < box.size(); ++k) point[k] = box[k].lo;
    std::vector<double> x(box.size());

    bool first = true;
    double best_abs = -1.0;
    while (true) {
        for (size_t k = 0; k < point.size(); ++k) x[k] = double(point[k]) / span;
        const DnnTrace dt = dnn_trace(net, x);
        const QnnTrace qt = qnn_trace(qnet, point);
        const double err = align_h * qt.output[g] - dt.pre.back()[g];

        if (first) {
            r.max_error = r.min_error = err;
        } else {
            if (err > r.max_error) r.max_error = err;
            if (err < r.min_error) r.min_error = err;
        }
        // strict improvement keeps the first maximizer in iteration order
        if (std::fabs(err) > best_abs) {
            best_abs = std::fabs(err);
            r.argmax = point;
        }

        if (track_neurons) {
            const size_t L = net.layers.size();
            if (first) {
                r.input_delta_range.assign(point.size(), Interval{});
                r.delta_in_range.assign(L, {});
                r.delta_range.assign(L, {});
                for (size_t l = 0; l < L; ++l) {
                    r.delta_in_range[l].assign(net.layers[l].out_size(), Interval{});
                    r.delta_range[l].assign(net.layers[l].out_size(), Interval{});
                }
            }
            for (size_t k = 0; k < point.size(); ++k) {
                const double d = align_in * double(point[k]) - x[k];
                Interval& iv = r.input_delta_range[k];
                iv = first ? Interval::point(d) : hull(iv, Interval::point(d));
            }
            for (size_t l = 0; l < L; ++l) {
                const bool hidden = l + 1 < L;
                for (size_t j = 0; j < net.layers[l].out_size(); ++j) {
                    double din, dout;
                    if (hidden) {
                        din = align_h * double(qt.rounded[l][j]) - dt.pre[l][j];
                        dout = align_h * double(qt.clamped[l][j]) - dt.post[l][j];
                    } else {
                        din = dout = align_h * qt.output[j] - dt.pre[l][j];
                    }
                    Interval& i1 = r.delta_in_range[l][j];
                    Interval& i2 = r.delta_range[l][j];
                    i1 = first ? Interval::point(din) : hull(i1, Interval::point(din));
                    i2 = first ? Interval::point(dout) : hull(i2, Interval::point(dout));
                }
            }
        }

        ++r.points_evaluated;
        first = false;

        size_t k = 0;
        for (; k < point.size(); ++k) {
            if (point[k] < box[k].hi) {
                ++point[k];
                break;
            }
            point[k] = box[k].lo;
        }
        if (k == point.size()) break;
    }
    return r;
}

OracleDecision verify_by_enumeration(const Network& net, const QuantizedNetwork& qnet,
                                     const InputRegion& region, size_t g, double epsilon,
                                     int64_t cap) {
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    OracleResult r = enumerate_errors(net, qnet, region, g, cap);
    OracleDecision d;
    d.proved = r.max_abs_error() < epsilon;
    if (!d.proved) {
        d.witness = r.argmax;
        d.witness_error = quantization_error(net, qnet, d.witness, g);
    }
    return d;
}

} // namespace qeb
