#include "doctest.h"

#include <cmath>
#include <random>

#include "qebcheck/abstract.hpp"
#include "qebcheck/oracle.hpp"
#include "testutil.hpp"

using namespace qeb;
using namespace testutil;

namespace {

const std::vector<Interval> kBox{{0.4, 0.8}, {0.2, 0.6}};

} // namespace

TEST_CASE("affine element over the example box") {
    DnnAnalysis a = analyze_dnn(fig1_network(), kBox);
    CHECK(a.layers[0].pre[0].lo == doctest::Approx(0.36).epsilon(1e-12));
    CHECK(a.layers[0].pre[0].hi == doctest::Approx(0.92).epsilon(1e-12));
    CHECK(a.layers[0].pre[1].lo == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(a.layers[0].pre[1].hi == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("constant affine element") {
    AbstractChain chain;
    chain.input_box = {Interval{-1, 1}};
    Stage st{StageKind::Affine, {affine_element(std::vector<double>{0.0}, 2.5)}};
    chain.stages.push_back(st);
    CHECK(chain.eval_min(chain.lower_input_form(0, 0)) == 2.5);
    CHECK(chain.eval_max(chain.upper_input_form(0, 0)) == 2.5);
}

TEST_CASE("relu transformer cases") {
    // unstable node from the worked example: [-0.4, 0.2]
    AbstractElement e = relu_element(-0.4, 0.2, 0, 1);
    CHECK(e.upper.coef[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(e.upper.constant == doctest::Approx(0.4 / 3.0).epsilon(1e-12));
    CHECK(e.lower.coef[0] == 0.0); // area rule picks the flat lower form
    CHECK(e.lb == 0.0);
    CHECK(e.ub == doctest::Approx(0.2));

    // always active: identity
    AbstractElement act = relu_element(0.36, 0.92, 0, 1);
    CHECK(act.lower.coef[0] == 1.0);
    CHECK(act.upper.coef[0] == 1.0);
    CHECK(act.lb == doctest::Approx(0.36));
    CHECK(act.ub == doctest::Approx(0.92));

    // always inactive: constant zero
    AbstractElement off = relu_element(-5.0, -1.0, 0, 1);
    CHECK(off.lower.coef[0] == 0.0);
    CHECK(off.upper.coef[0] == 0.0);
    CHECK(off.ub == 0.0);

    // boundary l = u = 0 falls into the inactive case
    AbstractElement zero = relu_element(0.0, 0.0, 0, 1);
    CHECK(zero.upper.coef[0] == 0.0);

    // steep side: |l| < u picks the identity lower form
    AbstractElement steep = relu_element(-0.1, 0.9, 0, 1);
    CHECK(steep.lower.coef[0] == 1.0);
    CHECK(steep.lb == doctest::Approx(-0.1));
    // tie |l| == u also keeps the identity
    CHECK(relu_element(-0.5, 0.5, 0, 1).lower.coef[0] == 1.0);
}

TEST_CASE("back substitution on the worked example output") {
    DnnAnalysis a = analyze_dnn(fig1_network(), kBox);
    CHECK(a.layers[1].pre[0].lo == doctest::Approx(0.108).epsilon(1e-9));
    CHECK(a.layers[1].pre[0].hi == doctest::Approx(0.98 / 3.0).epsilon(1e-9));
}

TEST_CASE("back substitution equals direct interval evaluation of the final form") {
    DnnAnalysis a = analyze_dnn(fig1_network(), kBox);
    const int out_stage = int(a.chain.stages.size()) - 1;
    AffineForm lo = a.chain.lower_input_form(out_stage, 0);
    AffineForm hi = a.chain.upper_input_form(out_stage, 0);
    CHECK(a.layers[1].pre[0].lo == corner_min(lo.coef, kBox, lo.constant));
    CHECK(a.layers[1].pre[0].hi == corner_max(hi.coef, kBox, hi.constant));
}

TEST_CASE("dnn bounds contain sampled forward evaluations") {
    std::mt19937 rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        RandomInstance inst = random_instance(900 + rep);
        std::vector<Interval> box;
        std::uniform_real_distribution<double> w(0.1, 0.8);
        for (size_t k = 0; k < inst.net.num_inputs; ++k) {
            double lo = std::uniform_real_distribution<double>(-1.0, 0.5)(rng);
            box.push_back({lo, lo + w(rng)});
        }
        DnnAnalysis a = analyze_dnn(inst.net, box);
        for (int s = 0; s < 50; ++s) {
            std::vector<double> x;
            for (const Interval& b : box)
                x.push_back(std::uniform_real_distribution<double>(b.lo, b.hi)(rng));
            DnnTrace t = dnn_trace(inst.net, x);
            for (size_t l = 0; l < inst.net.layers.size(); ++l)
                for (size_t j = 0; j < t.pre[l].size(); ++j) {
                    CHECK(a.layers[l].pre[j].lo <= t.pre[l][j] + 1e-9);
                    CHECK(a.layers[l].pre[j].hi >= t.pre[l][j] - 1e-9);
                    CHECK(a.layers[l].post[j].lo <= t.post[l][j] + 1e-9);
                    CHECK(a.layers[l].post[j].hi >= t.post[l][j] - 1e-9);
                }
        }
    }
}

TEST_CASE("quantized affine element bounds") {
    QnnSymbolicAnalysis a = analyze_qnn_symbolic(fig1_qnn(), fig1_region(3));
    CHECK(a.layers[0].pre[0].lo == doctest::Approx(0.8125).epsilon(1e-12));
    CHECK(a.layers[0].pre[0].hi == doctest::Approx(4.0625).epsilon(1e-12));
    CHECK(a.layers[0].pre[1].lo == doctest::Approx(-2.1875).epsilon(1e-12));
    CHECK(a.layers[0].pre[1].hi == doctest::Approx(1.0625).epsilon(1e-12));
}

TEST_CASE("quantized affine element with a zero row is pure rounding slack") {
    AbstractElement e =
        quant_affine_element(std::vector<int64_t>{0, 0}, 0, -4, 1.0);
    AbstractChain chain;
    chain.input_box = {Interval{0, 15}, Interval{0, 15}};
    chain.stages.push_back({StageKind::Affine, {e}});
    CHECK(chain.eval_min(chain.lower_input_form(0, 0)) == -0.5);
    CHECK(chain.eval_max(chain.upper_input_form(0, 0)) == 0.5);
}

TEST_CASE("min transformer cases") {
    // upper bound below the clamp level: identity
    AbstractElement id = min_element(0.8125, 4.0625, 15.0, 0, 1);
    CHECK(id.lower.coef[0] == 1.0);
    CHECK(id.upper.coef[0] == 1.0);
    CHECK(id.lb == doctest::Approx(0.8125));
    CHECK(id.ub == doctest::Approx(4.0625));

    // fully clamped
    AbstractElement flat = min_element(20.0, 30.0, 15.0, 0, 1);
    CHECK(flat.lower.coef[0] == 0.0);
    CHECK(flat.lower.constant == 15.0);
    CHECK(flat.ub == 15.0);

    // crossing case: forms must enclose min(x, 15) on every integer point
    AbstractElement mix = min_element(10.0, 20.0, 15.0, 0, 1);
    for (int x = 10; x <= 20; ++x) {
        const double truth = std::min(double(x), 15.0);
        const double lo = mix.lower.coef[0] * x + mix.lower.constant;
        const double hi = mix.upper.coef[0] * x + mix.upper.constant;
        CHECK(lo <= truth + 1e-12);
        CHECK(hi >= truth - 1e-12);
        CHECK(mix.lb <= truth);
        CHECK(mix.ub >= truth);
    }
    // area tie at l + u = 2t keeps the identity upper form
    CHECK(mix.upper.coef[0] == 1.0);
    // clearly saturated mass picks the constant form
    AbstractElement high = min_element(14.0, 30.0, 15.0, 0, 1);
    CHECK(high.upper.coef[0] == 0.0);
    CHECK(high.upper.constant == 15.0);
}

TEST_CASE("symbolic quantized analysis reproduces the worked-example forms") {
    QnnSymbolicAnalysis a = analyze_qnn_symbolic(fig1_qnn(), fig1_region(3));
    // stages: affine, relu, min, output affine
    REQUIRE(a.chain.stages.size() == 4);

    // post-ReLU node of the unstable neuron, substituted to the inputs:
    // upper form (17/16 (-3 x1 + 3 x2) + 45.6875) / 52
    AffineForm up = a.chain.upper_input_form(1, 1);
    CHECK(up.coef[0] == doctest::Approx(17.0 / 16.0 * -3.0 / 52.0).epsilon(1e-12));
    CHECK(up.coef[1] == doctest::Approx(17.0 / 16.0 * 3.0 / 52.0).epsilon(1e-12));
    CHECK(up.constant == doctest::Approx(45.6875 / 52.0).epsilon(1e-12));
    AffineForm lo = a.chain.lower_input_form(1, 1);
    CHECK(lo.coef[0] == 0.0);
    CHECK(lo.coef[1] == 0.0);
    CHECK(lo.constant == 0.0);

    // min stage keeps the identity here, bounds [0, 1.0625]
    CHECK(a.chain.stages[2].nodes[1].lb == doctest::Approx(0.0));
    CHECK(a.chain.stages[2].nodes[1].ub == doctest::Approx(1.0625));
    CHECK(a.layers[0].post[1].lo == doctest::Approx(0.0));
    CHECK(a.layers[0].post[1].hi == doctest::Approx(1.0625));
}

TEST_CASE("concrete quantized analysis on the worked example") {
    QnnConcreteAnalysis a = analyze_qnn_concrete(fig1_qnn(), fig1_region(3));
    CHECK(a.pre[0][0].lo == 1);
    CHECK(a.pre[0][0].hi == 4);
    CHECK(a.pre[0][1].lo == -2);
    CHECK(a.pre[0][1].hi == 1);
    CHECK(a.post[0][1].lo == 0);
    CHECK(a.post[0][1].hi == 1);
}

TEST_CASE("concrete analysis of a point region is the exact forward value") {
    QuantizedNetwork q = fig1_qnn();
    InputRegion r{{9, 6}, 0};
    QnnConcreteAnalysis a = analyze_qnn_concrete(q, r);
    QnnTrace t = qnn_trace(q, std::vector<int64_t>{9, 6});
    for (size_t j = 0; j < 2; ++j) {
        CHECK(a.pre[0][j].lo == t.rounded[0][j]);
        CHECK(a.pre[0][j].hi == t.rounded[0][j]);
        CHECK(a.post[0][j].lo == t.clamped[0][j]);
    }
    CHECK(a.output[0].lo == doctest::Approx(t.output[0]));
    CHECK(a.output[0].hi == doctest::Approx(t.output[0]));
}

TEST_CASE("both quantized analyses contain all enumerated activations") {
    for (int rep = 0; rep < 25; ++rep) {
        RandomInstance inst = random_instance(300 + rep);
        QnnConcreteAnalysis con = analyze_qnn_concrete(inst.qnet, inst.region);
        QnnSymbolicAnalysis sym = analyze_qnn_symbolic(inst.qnet, inst.region);

        const auto box = inst.region.bounds(inst.scheme.input);
        std::vector<int64_t> p(box.size());
        for (size_t k = 0; k < p.size(); ++k) p[k] = box[k].lo;
        while (true) {
            QnnTrace t = qnn_trace(inst.qnet, p);
            for (size_t l = 0; l + 1 < inst.qnet.layers.size(); ++l)
                for (size_t j = 0; j < t.rounded[l].size(); ++j) {
                    CHECK(con.pre[l][j].contains(t.rounded[l][j]));
                    CHECK(con.post[l][j].contains(t.clamped[l][j]));
                    CHECK(sym.layers[l].pre[j].lo <= double(t.rounded[l][j]) + 1e-9);
                    CHECK(sym.layers[l].pre[j].hi >= double(t.rounded[l][j]) - 1e-9);
                    CHECK(sym.layers[l].post[j].lo <= double(t.clamped[l][j]) + 1e-9);
                    CHECK(sym.layers[l].post[j].hi >= double(t.clamped[l][j]) - 1e-9);
                }
            for (size_t j = 0; j < t.output.size(); ++j) {
                CHECK(con.output[j].lo <= t.output[j] + 1e-9);
                CHECK(con.output[j].hi >= t.output[j] - 1e-9);
                CHECK(sym.layers.back().pre[j].lo <= t.output[j] + 1e-9);
                CHECK(sym.layers.back().pre[j].hi >= t.output[j] - 1e-9);
            }
            size_t k = 0;
            for (; k < p.size(); ++k) {
                if (p[k] < box[k].hi) { ++p[k]; break; }
                p[k] = box[k].lo;
            }
            if (k == p.size()) break;
        }
    }
}

TEST_CASE("zero quantized network stays inside the clamp range after activations") {
    Network n;
    n.num_inputs = 2;
    n.layers.push_back({{{0.0, 0.0}, {0.0, 0.0}}, {0.0, 0.0}});
    n.layers.push_back({{{0.0, 0.0}}, {0.0}});
    QuantizedNetwork q = quantize_network(n, fig1_scheme());
    QnnSymbolicAnalysis a = analyze_qnn_symbolic(q, fig1_region(3));
    CHECK(a.layers[0].pre[0].lo == doctest::Approx(-0.5));
    CHECK(a.layers[0].pre[0].hi == doctest::Approx(0.5));
    CHECK(a.layers[0].post[0].lo >= 0.0);
    CHECK(a.layers[0].post[0].hi <= 15.0);
}
