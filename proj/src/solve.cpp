#include "qebcheck/solve.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

namespace qeb {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

} // namespace

std::map<std::string, double> assignment_from_traces(const MilpEncoding& enc,
                                                     const VerificationTask& task,
                                                     std::span<const int64_t> xhat) {
    const MilpProblem& p = enc.problem;
    const EncodingInfo& info = enc.info;
    const QuantScheme& s = task.qnet->scheme;
    const double span = s.input.span();
    const double align = pow2(-s.hidden.frac);
    const double t = double(s.hidden.ub()); // clamp level in integer units

    std::map<std::string, double> a;
    auto set = [&](int var, double v) {
        if (var >= 0) a[p.vars[var].name] = v;
    };

    std::vector<double> x(xhat.size());
    for (size_t k = 0; k < xhat.size(); ++k) {
        x[k] = double(xhat[k]) / span;
        set(info.input_int[k], double(xhat[k]));
        set(info.input_real[k], x[k]);
    }

    const DnnTrace dt = dnn_trace(*task.net, x);
    for (size_t l = 0; l < info.dnn_pre.size(); ++l)
        for (size_t j = 0; j < info.dnn_pre[l].size(); ++j) {
            set(info.dnn_pre[l][j], dt.pre[l][j]);
            if (l < info.dnn_post.size()) {
                set(info.dnn_post[l][j], dt.post[l][j]);
                if (info.dnn_relu_bin[l][j] >= 0)
                    set(info.dnn_relu_bin[l][j], dt.pre[l][j] > 0 ? 1.0 : 0.0);
            }
        }

    const QnnTrace qt = qnn_trace(*task.qnet, xhat);
    for (size_t l = 0; l < info.qnn_acc.size(); ++l)
        for (size_t j = 0; j < info.qnn_acc[l].size(); ++j) {
            const double q = double(qt.rounded[l][j]);
            set(info.qnn_acc[l][j], qt.pre_round[l][j]);
            set(info.qnn_round[l][j], q);
            set(info.qnn_post[l][j], double(qt.clamped[l][j]));
            if (info.qnn_max_bin[l][j] >= 0) {
                set(info.qnn_max_bin[l][j], q > 0 ? 1.0 : 0.0);
                // intermediate max output when the min gadget follows
                int iv = p.var_index("qv" + std::to_string(l + 2) + "_" + std::to_string(j + 1));
                if (iv >= 0) set(iv, std::max(0.0, q));
            }
            if (info.qnn_min_bin[l][j] >= 0)
                set(info.qnn_min_bin[l][j], std::max(0.0, q) > t ? 1.0 : 0.0);
        }
    for (size_t j = 0; j < info.qnn_out.size(); ++j) set(info.qnn_out[j], qt.output[j]);

    if (info.eta >= 0) {
        const double d = align * qt.output[info.target] - dt.pre.back()[info.target];
        set(info.eta, std::max(d, 0.0));
        set(info.vsel, d > 0 ? 1.0 : 0.0);
    }
    return a;
}

namespace {

SolveVerdict solve_by_enumeration(const MilpEncoding& enc, const VerificationTask& task,
                                  const EnumerationBackend& be) {
    if (enc.problem.vars.empty())
        return {SolveStatus::Feasible, {}, "empty problem"};

    const QuantConfig& in_cfg = task.qnet->scheme.input;
    const int64_t count = task.region.point_count(in_cfg, be.cap);
    if (count > be.cap)
        return {SolveStatus::BackendError, {},
                "region exceeds enumeration cap of " + std::to_string(be.cap) + " points"};

    const auto box = task.region.bounds(in_cfg);
    std::vector<int64_t> point(box.size());
    for (size_t k = 0; k < box.size(); ++k) point[k] = box[k].lo;

    const auto t0 = Clock::now();
    int64_t seen = 0;
    while (true) {
        if ((++seen & 1023) == 0 && be.time_limit_s > 0 && seconds_since(t0) > be.time_limit_s)
            return {SolveStatus::Timeout, {}, "enumeration hit the time limit"};

        const double err = quantization_error(*task.net, *task.qnet, point, task.target);
        if (std::fabs(err) >= task.epsilon) {
            auto a = assignment_from_traces(enc, task, point);
            if (auto why = enc.problem.check_assignment(a, 1e-6))
                return {SolveStatus::BackendError, {},
                        "true trace rejected by the encoding: " + *why};
            return {SolveStatus::Feasible, std::move(a), ""};
        }

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
    return {SolveStatus::Infeasible, {}, ""};
}

std::string temp_path(const char* suffix) {
    static int counter = 0;
    std::ostringstream ss;
    const char* dir = std::getenv("TMPDIR");
    ss << (dir ? dir : "/tmp") << "/qebcheck_" << ::getpid() << "_" << counter++ << suffix;
    return ss.str();
}

std::string expand(std::string tmpl, const std::string& key, const std::string& value) {
    for (size_t pos; (pos = tmpl.find(key)) != std::string::npos;)
        tmpl.replace(pos, key.size(), value);
    return tmpl;
}

SolveVerdict solve_external(const MilpEncoding& enc, const ExternalBackend& be) {
    if (be.command.empty())
        return {SolveStatus::BackendError, {}, "no external solver command configured"};

    const std::string lp_path = temp_path(".lp");
    const std::string sol_path = temp_path(".sol");
    {
        std::ofstream lp(lp_path);
        if (!lp) return {SolveStatus::BackendError, {}, "cannot write " + lp_path};
        lp << emit_lp(enc.problem);
    }

    std::string cmd = expand(expand(be.command, "{lp}", lp_path), "{sol}", sol_path);
    if (be.time_limit_s > 0)
        cmd = "timeout " + std::to_string((long long)std::ceil(be.time_limit_s)) + "s " + cmd;
    const int rc = std::system(cmd.c_str());
    std::remove(lp_path.c_str());
    if (rc != 0 && WEXITSTATUS(rc) == 124) {
        std::remove(sol_path.c_str());
        return {SolveStatus::Timeout, {}, "solver killed at the time limit"};
    }

    std::ifstream sol(sol_path);
    if (!sol) {
        return {SolveStatus::BackendError, {},
                "solver produced no solution file (exit status " + std::to_string(rc) + ")"};
    }
    std::string status;
    sol >> status;
    SolveVerdict v;
    if (status == "INFEASIBLE") {
        v.status = SolveStatus::Infeasible;
    } else if (status == "TIMEOUT") {
        v.status = SolveStatus::Timeout;
    } else if (status == "OPTIMAL" || status == "FEASIBLE") {
        std::map<std::string, double> a;
        std::string name;
        double value;
        while (sol >> name >> value) a[name] = value;
        if (auto why = enc.problem.check_assignment(a, 1e-6)) {
            v.status = SolveStatus::BackendError;
            v.detail = "solver witness failed validation: " + *why;
        } else {
            v.status = SolveStatus::Feasible;
            v.witness = std::move(a);
        }
    } else {
        v.status = SolveStatus::BackendError;
        v.detail = "solver returned status '" + status + "'";
    }
    sol.close();
    std::remove(sol_path.c_str());
    return v;
}

} // namespace

SolveVerdict solve(const MilpEncoding& enc, const VerificationTask& task,
                   const SolverBackend& backend) {
    if (auto* e = std::get_if<EnumerationBackend>(&backend))
        return solve_by_enumeration(enc, task, *e);
    return solve_external(enc, std::get<ExternalBackend>(backend));
}

std::vector<int64_t> decode_witness_input(const MilpEncoding& enc,
                                          const std::map<std::string, double>& witness) {
    std::vector<int64_t> x;
    for (int var : enc.info.input_int) {
        auto it = witness.find(enc.problem.vars[var].name);
        if (it == witness.end()) throw std::invalid_argument("witness is missing an input");
        x.push_back(llround(it->second));
    }
    return x;
}

} // namespace qeb
