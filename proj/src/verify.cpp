#include "qebcheck/verify.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "qebcheck/dra.hpp"
#include "qebcheck/oracle.hpp"
#include "qebcheck/solve.hpp"

namespace qeb {

std::string to_string(DraMode m) {
    switch (m) {
    case DraMode::Interval: return "interval";
    case DraMode::Symbolic: return "symbolic";
    case DraMode::Naive: return "naive";
    case DraMode::Combined: return "combined";
    }
    return "symbolic";
}

std::string to_string(MilpMode m) {
    switch (m) {
    case MilpMode::Off: return "off";
    case MilpMode::On: return "on";
    case MilpMode::Hints: return "hints";
    }
    return "off";
}

DraMode dra_mode_from_string(const std::string& s) {
    if (s == "interval") return DraMode::Interval;
    if (s == "symbolic") return DraMode::Symbolic;
    if (s == "naive") return DraMode::Naive;
    if (s == "combined") return DraMode::Combined;
    throw std::invalid_argument("bad dra mode '" + s + "'");
}

MilpMode milp_mode_from_string(const std::string& s) {
    if (s == "off") return MilpMode::Off;
    if (s == "on") return MilpMode::On;
    if (s == "hints") return MilpMode::Hints;
    throw std::invalid_argument("bad milp mode '" + s + "'");
}

void VerifyConfig::validate() const {
    net.validate();
    qnet.validate();
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    if (region.radius < 0) throw std::invalid_argument("radius must be non-negative");
    if (region.center.size() != net.num_inputs)
        throw std::invalid_argument("center dimension mismatch");
    if (target && *target >= net.num_outputs())
        throw std::invalid_argument("target class out of range");
    if (dra == DraMode::Naive && milp == MilpMode::Hints)
        throw std::invalid_argument("the naive analysis yields no hidden difference "
                                    "intervals; use --milp on or another --dra mode");
}

size_t predicted_class(const Network& net, const QuantizedNetwork& qnet,
                       const InputRegion& region) {
    const double span = qnet.scheme.input.span();
    std::vector<double> x(region.center.size());
    for (size_t k = 0; k < x.size(); ++k) x[k] = double(region.center[k]) / span;
    const std::vector<double> y = dnn_forward(net, x);
    size_t best = 0;
    for (size_t j = 1; j < y.size(); ++j)
        if (y[j] > y[best]) best = j;
    return best;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void fill_tables(Report& rep, const DraResult& dra, size_t out_layer_paper) {
    for (size_t l = 0; l < dra.delta_in.size(); ++l) {
        const int paper = int(l) + 2;
        const bool is_out = l + 1 == dra.delta_in.size();
        for (size_t j = 0; j < dra.delta_in[l].size(); ++j) {
            if (is_out) {
                rep.output_diff.push_back({int(out_layer_paper), int(j) + 1, dra.delta[l][j]});
            } else {
                rep.delta_in.push_back({paper, int(j) + 1, dra.delta_in[l][j]});
                rep.delta.push_back({paper, int(j) + 1, dra.delta[l][j]});
            }
        }
    }
}

} // namespace

Report run_verify(const VerifyConfig& cfg) {
    cfg.validate();
    Report rep;
    rep.dra_mode = to_string(cfg.dra);
    rep.milp_mode = to_string(cfg.milp);
    rep.epsilon = cfg.epsilon;
    rep.center = cfg.region.center;
    rep.radius = cfg.region.radius;

    const size_t g = cfg.target ? *cfg.target : predicted_class(cfg.net, cfg.qnet, cfg.region);
    rep.target_class = int(g) + 1;

    const size_t out_layer = cfg.net.depth();
    const auto t0 = Clock::now();
    Interval out_diff;
    std::optional<DraResult> dra;
    try {
        switch (cfg.dra) {
        case DraMode::Interval:
            dra = propagate_interval(cfg.net, cfg.qnet, cfg.region);
            break;
        case DraMode::Symbolic:
            dra = propagate_symbolic(cfg.net, cfg.qnet, cfg.region);
            break;
        case DraMode::Combined:
            dra = intersect_sound(propagate_interval(cfg.net, cfg.qnet, cfg.region),
                                  propagate_symbolic(cfg.net, cfg.qnet, cfg.region));
            break;
        case DraMode::Naive: {
            const auto out = naive_diff(cfg.net, cfg.qnet, cfg.region);
            for (size_t j = 0; j < out.size(); ++j)
                rep.output_diff.push_back({int(out_layer), int(j) + 1, out[j]});
            out_diff = out[g];
            break;
        }
        }
    } catch (const std::exception& e) {
        rep.verdict = Verdict::Error;
        rep.stage = ReportStage::Dra;
        rep.message = e.what();
        rep.time_dra_ms = ms_since(t0);
        return rep;
    }
    if (dra) {
        fill_tables(rep, *dra, out_layer);
        out_diff = dra->output()[g];
    }
    rep.time_dra_ms = ms_since(t0);

    if (out_diff.lo > -cfg.epsilon && out_diff.hi < cfg.epsilon) {
        rep.verdict = Verdict::Proved;
        rep.stage = ReportStage::Dra;
        return rep;
    }
    if (cfg.milp == MilpMode::Off) {
        rep.verdict = Verdict::Unknown;
        rep.stage = ReportStage::Dra;
        return rep;
    }

    const auto t1 = Clock::now();
    rep.stage = ReportStage::Milp;
    try {
        const DraResult* hints = cfg.milp == MilpMode::Hints && dra ? &*dra : nullptr;
        const MilpEncoding enc =
            encode_property(cfg.net, cfg.qnet, cfg.region, g, cfg.epsilon, hints);
        const VerificationTask task{&cfg.net, &cfg.qnet, cfg.region, g, cfg.epsilon};
        SolverBackend backend;
        if (cfg.solver_cmd.empty())
            backend = EnumerationBackend{cfg.enumerate_cap, cfg.time_limit_s};
        else
            backend = ExternalBackend{cfg.solver_cmd, cfg.time_limit_s};

        const SolveVerdict sv = solve(enc, task, backend);
        rep.time_milp_ms = ms_since(t1);
        switch (sv.status) {
        case SolveStatus::Infeasible:
            rep.verdict = Verdict::Proved;
            break;
        case SolveStatus::Timeout:
            rep.verdict = Verdict::Unknown;
            rep.message = "milp stage hit the time limit";
            break;
        case SolveStatus::BackendError:
            rep.verdict = Verdict::Error;
            rep.message = sv.detail;
            break;
        case SolveStatus::Feasible: {
            const auto xhat = decode_witness_input(enc, sv.witness);
            const double err = quantization_error(cfg.net, cfg.qnet, xhat, g);
            if (std::fabs(err) >= cfg.epsilon - 1e-6) {
                rep.verdict = Verdict::Falsified;
                rep.witness = xhat;
                rep.witness_error = err;
                rep.has_witness_error = true;
            } else {
                // only reachable through the rounding-tie relaxation
                rep.verdict = Verdict::Unknown;
                rep.message = "solver witness does not reproduce the error bound violation";
            }
            break;
        }
        }
    } catch (const std::exception& e) {
        rep.verdict = Verdict::Error;
        rep.message = e.what();
        rep.time_milp_ms = ms_since(t1);
    }
    return rep;
}

} // namespace qeb
