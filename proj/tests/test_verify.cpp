#include "doctest.h"

#include <cmath>

#include "qebcheck/oracle.hpp"
#include "qebcheck/verify.hpp"
#include "testutil.hpp"

using namespace qeb;
using namespace testutil;

namespace {

VerifyConfig fig1_config(double eps, DraMode dra, MilpMode milp, int64_t radius = 3) {
    VerifyConfig cfg;
    cfg.net = fig1_network();
    cfg.qnet = fig1_qnn();
    cfg.region = fig1_region(radius);
    cfg.target = 0;
    cfg.epsilon = eps;
    cfg.dra = dra;
    cfg.milp = milp;
    return cfg;
}

} // namespace

TEST_CASE("interval analysis alone proves a loose bound") {
    Report rep = run_verify(fig1_config(0.3, DraMode::Interval, MilpMode::Off));
    CHECK(rep.verdict == Verdict::Proved);
    CHECK(rep.stage == ReportStage::Dra);
    CHECK(rep.output_diff.size() == 1);
    CHECK(rep.output_diff[0].value.lo == doctest::Approx(-0.24459375).epsilon(1e-9));
    CHECK(rep.output_diff[0].value.hi == doctest::Approx(0.117625).epsilon(1e-9));
}

TEST_CASE("analysis alone cannot decide a tight bound") {
    Report rep = run_verify(fig1_config(0.2, DraMode::Interval, MilpMode::Off));
    CHECK(rep.verdict == Verdict::Unknown);
    CHECK(rep.stage == ReportStage::Dra);
}

TEST_CASE("fallback stage decides exactly") {
    // the true maximum over radius 3 is about 0.1522
    OracleResult o = enumerate_errors(fig1_network(), fig1_qnn(), fig1_region(3), 0);
    REQUIRE(o.max_abs_error() < 0.2);
    REQUIRE(o.max_abs_error() > 0.1);

    Report proved = run_verify(fig1_config(0.2, DraMode::Interval, MilpMode::On));
    CHECK(proved.verdict == Verdict::Proved);
    CHECK(proved.stage == ReportStage::Milp);

    Report falsified = run_verify(fig1_config(0.1, DraMode::Interval, MilpMode::Hints));
    CHECK(falsified.verdict == Verdict::Falsified);
    CHECK(falsified.stage == ReportStage::Milp);
    REQUIRE(!falsified.witness.empty());
    CHECK(std::fabs(quantization_error(fig1_network(), fig1_qnn(), falsified.witness, 0)) >=
          0.1 - 1e-6);
    CHECK(falsified.has_witness_error);
}

TEST_CASE("a huge bound is proved immediately") {
    Report rep = run_verify(fig1_config(10.0, DraMode::Symbolic, MilpMode::Hints));
    CHECK(rep.verdict == Verdict::Proved);
    CHECK(rep.stage == ReportStage::Dra);
}

TEST_CASE("all analysis modes prove the loose bound") {
    for (DraMode mode :
         {DraMode::Interval, DraMode::Symbolic, DraMode::Combined, DraMode::Naive}) {
        Report rep = run_verify(fig1_config(2.0, mode, MilpMode::Off));
        CHECK(rep.verdict == Verdict::Proved);
    }
}

TEST_CASE("reports round-trip through the printer") {
    Report rep = run_verify(fig1_config(0.1, DraMode::Symbolic, MilpMode::Hints));
    Report back = parse_report(print_report(rep));
    CHECK(back == rep);
}

TEST_CASE("invalid configurations are rejected") {
    VerifyConfig bad = fig1_config(0.0, DraMode::Interval, MilpMode::Off);
    CHECK_THROWS_AS(run_verify(bad), std::invalid_argument);

    VerifyConfig naive_hints = fig1_config(0.1, DraMode::Naive, MilpMode::Hints);
    CHECK_THROWS_AS(run_verify(naive_hints), std::invalid_argument);

    VerifyConfig bad_class = fig1_config(0.1, DraMode::Interval, MilpMode::Off);
    bad_class.target = 7;
    CHECK_THROWS_AS(run_verify(bad_class), std::invalid_argument);
}

TEST_CASE("predicted class picks the argmax, lowest index on ties") {
    Network n;
    n.num_inputs = 2;
    n.layers.push_back({{{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0}});
    n.layers.push_back({{{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0}});
    QuantScheme s = fig1_scheme();
    QuantizedNetwork q = quantize_network(n, s);
    // center (9,9): both outputs equal, tie resolves to the first class
    CHECK(predicted_class(n, q, InputRegion{{9, 9}, 1}) == 0);
    CHECK(predicted_class(n, q, InputRegion{{9, 6}, 1}) == 0);
    CHECK(predicted_class(n, q, InputRegion{{6, 9}, 1}) == 1);
}

TEST_CASE("verdicts agree with the oracle across modes") {
    for (int rep = 0; rep < 10; ++rep) {
        RandomInstance inst = random_instance(8800 + rep);
        OracleResult o = enumerate_errors(inst.net, inst.qnet, inst.region, 0);
        const double eps = std::max(o.max_abs_error(), 1e-6);
        for (DraMode mode : {DraMode::Interval, DraMode::Symbolic}) {
            VerifyConfig cfg;
            cfg.net = inst.net;
            cfg.qnet = inst.qnet;
            cfg.region = inst.region;
            cfg.target = 0;
            cfg.epsilon = eps * 1.5; // strictly above the attained maximum
            cfg.dra = mode;
            cfg.milp = MilpMode::Hints;
            Report r = run_verify(cfg);
            CHECK(r.verdict == Verdict::Proved);

            if (o.max_abs_error() >= 1e-6) {
                cfg.epsilon = o.max_abs_error() / 2; // clearly exceeded
                Report r2 = run_verify(cfg);
                CHECK(r2.verdict == Verdict::Falsified);
            }
        }
    }
}
