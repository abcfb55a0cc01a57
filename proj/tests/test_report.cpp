#include "doctest.h"

#include "qebcheck/report.hpp"

using namespace qeb;

TEST_CASE("report round-trips exactly") {
    Report r;
    r.verdict = Verdict::Falsified;
    r.stage = ReportStage::Milp;
    r.dra_mode = "symbolic";
    r.milp_mode = "hints";
    r.epsilon = 0.1;
    r.target_class = 1;
    r.center = {9, 6};
    r.radius = 3;
    r.output_diff.push_back({3, 1, Interval{-0.19721875, 0.2045}});
    r.delta_in.push_back({2, 1, Interval{-0.168125, 0.106875}});
    r.delta_in.push_back({2, 2, Interval{-0.185625, 0.104375}});
    r.delta.push_back({2, 1, Interval{-0.168125, 0.106875}});
    r.delta.push_back({2, 2, Interval{-0.185625, 0.104375}});
    r.witness = {10, 5};
    r.has_witness_error = true;
    r.witness_error = -0.1521666666666667;
    r.time_dra_ms = 0.125;
    r.time_milp_ms = 1.0 / 3.0;

    Report back = parse_report(print_report(r));
    CHECK(back == r);
}

TEST_CASE("minimal report round-trips") {
    Report r;
    r.verdict = Verdict::Proved;
    r.stage = ReportStage::Dra;
    r.dra_mode = "interval";
    r.milp_mode = "off";
    r.epsilon = 0.3;
    r.target_class = 1;
    r.center = {9, 6};
    r.radius = 3;
    Report back = parse_report(print_report(r));
    CHECK(back == r);
}

TEST_CASE("error report keeps its message") {
    Report r;
    r.verdict = Verdict::Error;
    r.message = "solver returned status 'GIBBERISH'";
    Report back = parse_report(print_report(r));
    CHECK(back == r);
}

TEST_CASE("malformed reports are rejected") {
    CHECK_THROWS(parse_report(""));
    CHECK_THROWS(parse_report("qebcheck-report 1\nverdict: proved\n")); // no end
    CHECK_THROWS(parse_report("qebcheck-report 1\nbogus line\nend\n"));
    CHECK_THROWS(parse_report("qebcheck-report 1\nverdict: maybe\nend\n"));
}

TEST_CASE("exit codes") {
    CHECK(exit_code(Verdict::Proved) == 0);
    CHECK(exit_code(Verdict::Falsified) == 1);
    CHECK(exit_code(Verdict::Unknown) == 2);
    CHECK(exit_code(Verdict::Error) >= 3);
}
