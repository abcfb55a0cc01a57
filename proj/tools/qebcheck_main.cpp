// qebcheck: bounds the output deviation between a ReLU network and its
// fully quantized fixed-point counterpart over a discrete input region.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "qebcheck/dra.hpp"
#include "qebcheck/milp.hpp"
#include "qebcheck/model_io.hpp"
#include "qebcheck/oracle.hpp"
#include "qebcheck/solve.hpp"
#include "qebcheck/verify.hpp"

namespace {

using namespace qeb;

struct CommonOpts {
    std::string model_path;
    std::string scheme_arg;
    std::string center_arg;
    int64_t radius = 0;
    std::string class_arg = "predicted";
};

std::vector<int64_t> parse_center(const std::string& s) {
    std::vector<int64_t> v;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ','))
        if (!item.empty()) v.push_back(std::stoll(item));
    if (v.empty()) throw std::invalid_argument("empty center");
    return v;
}

QuantScheme scheme_from_arg(const std::string& arg) {
    // inline JSON or a file path
    if (!arg.empty() && arg.front() == '{') return parse_scheme(arg);
    return load_scheme(arg);
}

std::optional<size_t> parse_class(const std::string& arg, const Network& net) {
    if (arg == "predicted") return std::nullopt;
    const long long c = std::stoll(arg); // 1-based on the command line
    if (c < 1 || size_t(c) > net.num_outputs())
        throw std::invalid_argument("class must be in [1, " +
                                    std::to_string(net.num_outputs()) + "] or 'predicted'");
    return size_t(c - 1);
}

void add_common(CLI::App* cmd, CommonOpts& o, bool need_region = true) {
    cmd->add_option("--model", o.model_path, "real-valued model file")->required();
    cmd->add_option("--scheme", o.scheme_arg, "quantization scheme file or inline JSON")
        ->required();
    if (need_region) {
        cmd->add_option("--center", o.center_arg, "region center, comma separated integers")
            ->required();
        cmd->add_option("--radius", o.radius, "region radius (L-inf)")->required();
        cmd->add_option("--class", o.class_arg,
                        "1-based output class, or 'predicted' (default)");
    }
}

struct Loaded {
    Network net;
    QuantizedNetwork qnet;
    InputRegion region;
    std::optional<size_t> target;
};

Loaded load(const CommonOpts& o, bool need_region = true) {
    Loaded l;
    l.net = load_network(o.model_path);
    l.qnet = quantize_network(l.net, scheme_from_arg(o.scheme_arg));
    if (need_region) {
        l.region.center = parse_center(o.center_arg);
        l.region.radius = o.radius;
        l.target = parse_class(o.class_arg, l.net);
    }
    return l;
}

void write_or_print(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int cmd_verify(const CommonOpts& o, double epsilon, const std::string& dra_mode,
               const std::string& milp_mode, const std::string& solver_cmd, double timeout,
               int64_t cap, const std::string& report_path) {
    Loaded l = load(o);
    VerifyConfig cfg;
    cfg.net = std::move(l.net);
    cfg.qnet = std::move(l.qnet);
    cfg.region = l.region;
    cfg.target = l.target;
    cfg.epsilon = epsilon;
    cfg.dra = dra_mode_from_string(dra_mode);
    cfg.milp = milp_mode_from_string(milp_mode);
    cfg.solver_cmd = solver_cmd;
    cfg.time_limit_s = timeout;
    cfg.enumerate_cap = cap;

    Report rep = run_verify(cfg);
    const std::string text = print_report(rep);
    std::cout << text;
    if (!report_path.empty()) write_or_print(text, report_path);
    return exit_code(rep.verdict);
}

int cmd_analyze(const CommonOpts& o, const std::string& dra_mode,
                const std::string& report_path) {
    Loaded l = load(o);
    const DraMode mode = dra_mode_from_string(dra_mode);

    std::ostringstream out;
    out << "qebcheck-analysis 1\n";
    out << "mode: " << dra_mode << "\n";

    const auto box = real_input_box(l.region, l.qnet.scheme.input);
    const DnnAnalysis dnn = analyze_dnn(l.net, box);
    for (size_t a = 0; a < dnn.layers.size(); ++a)
        for (size_t j = 0; j < dnn.layers[a].pre.size(); ++j) {
            out << "dnn_pre " << a + 2 << " " << j + 1 << ": "
                << fmt17(dnn.layers[a].pre[j].lo) << " " << fmt17(dnn.layers[a].pre[j].hi)
                << "\n";
            out << "dnn_post " << a + 2 << " " << j + 1 << ": "
                << fmt17(dnn.layers[a].post[j].lo) << " " << fmt17(dnn.layers[a].post[j].hi)
                << "\n";
        }

    if (mode == DraMode::Symbolic) {
        const QnnSymbolicAnalysis q = analyze_qnn_symbolic(l.qnet, l.region);
        for (size_t a = 0; a < q.layers.size(); ++a)
            for (size_t j = 0; j < q.layers[a].pre.size(); ++j) {
                out << "qnn_pre " << a + 2 << " " << j + 1 << ": "
                    << fmt17(q.layers[a].pre[j].lo) << " " << fmt17(q.layers[a].pre[j].hi)
                    << "\n";
                out << "qnn_post " << a + 2 << " " << j + 1 << ": "
                    << fmt17(q.layers[a].post[j].lo) << " " << fmt17(q.layers[a].post[j].hi)
                    << "\n";
            }
    } else {
        const QnnConcreteAnalysis q = analyze_qnn_concrete(l.qnet, l.region);
        for (size_t a = 0; a < q.pre.size(); ++a)
            for (size_t j = 0; j < q.pre[a].size(); ++j) {
                out << "qnn_pre " << a + 2 << " " << j + 1 << ": " << q.pre[a][j].lo << " "
                    << q.pre[a][j].hi << "\n";
                out << "qnn_post " << a + 2 << " " << j + 1 << ": " << q.post[a][j].lo << " "
                    << q.post[a][j].hi << "\n";
            }
        for (size_t j = 0; j < q.output.size(); ++j)
            out << "qnn_out " << l.net.depth() << " " << j + 1 << ": " << fmt17(q.output[j].lo)
                << " " << fmt17(q.output[j].hi) << "\n";
    }

    auto table = [&](const DraResult& r) {
        for (size_t a = 0; a < r.delta_in.size(); ++a)
            for (size_t j = 0; j < r.delta_in[a].size(); ++j) {
                out << "delta_in " << a + 2 << " " << j + 1 << ": "
                    << fmt17(r.delta_in[a][j].lo) << " " << fmt17(r.delta_in[a][j].hi) << "\n";
                out << "delta " << a + 2 << " " << j + 1 << ": " << fmt17(r.delta[a][j].lo)
                    << " " << fmt17(r.delta[a][j].hi) << "\n";
            }
    };
    switch (mode) {
    case DraMode::Interval: table(propagate_interval(l.net, l.qnet, l.region)); break;
    case DraMode::Symbolic: table(propagate_symbolic(l.net, l.qnet, l.region)); break;
    case DraMode::Combined:
        table(intersect_sound(propagate_interval(l.net, l.qnet, l.region),
                              propagate_symbolic(l.net, l.qnet, l.region)));
        break;
    case DraMode::Naive: {
        const auto d = naive_diff(l.net, l.qnet, l.region);
        for (size_t j = 0; j < d.size(); ++j)
            out << "delta " << l.net.depth() << " " << j + 1 << ": " << fmt17(d[j].lo) << " "
                << fmt17(d[j].hi) << "\n";
        break;
    }
    }
    out << "end\n";
    write_or_print(out.str(), report_path);
    return 0;
}

int cmd_quantize(const CommonOpts& o, const std::string& out_path) {
    Loaded l = load(o, false);
    write_or_print(format_quantized_network(l.qnet), out_path);
    return 0;
}

int cmd_export_milp(const CommonOpts& o, double epsilon, const std::string& dra_mode,
                    bool with_hints, const std::string& out_path) {
    Loaded l = load(o);
    const size_t g = l.target ? *l.target : predicted_class(l.net, l.qnet, l.region);
    std::optional<DraResult> hints;
    if (with_hints) {
        const DraMode mode = dra_mode_from_string(dra_mode);
        if (mode == DraMode::Naive)
            throw std::invalid_argument("hints need a per-neuron analysis mode");
        hints = mode == DraMode::Interval ? propagate_interval(l.net, l.qnet, l.region)
                                          : propagate_symbolic(l.net, l.qnet, l.region);
    }
    const MilpEncoding enc = encode_property(l.net, l.qnet, l.region, g, epsilon,
                                             hints ? &*hints : nullptr);
    write_or_print(emit_lp(enc.problem), out_path);
    return 0;
}

int cmd_oracle(const CommonOpts& o, int64_t cap) {
    Loaded l = load(o);
    const size_t g = l.target ? *l.target : predicted_class(l.net, l.qnet, l.region);
    const OracleResult r = enumerate_errors(l.net, l.qnet, l.region, g, cap);
    std::cout << "qebcheck-oracle 1\n";
    std::cout << "class: " << g + 1 << "\n";
    std::cout << "points: " << r.points_evaluated << "\n";
    std::cout << "max_error: " << fmt17(r.max_error) << "\n";
    std::cout << "min_error: " << fmt17(r.min_error) << "\n";
    std::cout << "max_abs_error: " << fmt17(r.max_abs_error()) << "\n";
    std::cout << "argmax:";
    for (int64_t v : r.argmax) std::cout << " " << v;
    std::cout << "\nend\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantization error bound verification for ReLU networks"};
    app.require_subcommand(1);

    const char* env_cmd = std::getenv("QEBCHECK_SOLVER_CMD");
    std::string solver_cmd = env_cmd ? env_cmd : "";
    double epsilon = 0.0, timeout = 3600.0;
    int64_t cap = 10'000'000;
    std::string dra_mode = "symbolic", milp_mode = "hints", report_path, out_path;
    bool with_hints = false;

    CommonOpts overify, oanalyze, oquant, oexport, ooracle;

    CLI::App* verify = app.add_subcommand("verify", "prove or falsify an error bound");
    add_common(verify, overify);
    verify->add_option("--epsilon", epsilon, "error bound")->required();
    verify->add_option("--dra", dra_mode, "interval|symbolic|naive|combined");
    verify->add_option("--milp", milp_mode, "off|on|hints");
    verify->add_option("--solver-cmd", solver_cmd,
                       "external solver command with {lp} and {sol} placeholders "
                       "(default: QEBCHECK_SOLVER_CMD, else built-in enumeration)");
    verify->add_option("--timeout", timeout, "per-task wall clock limit, seconds");
    verify->add_option("--enumerate-cap", cap, "max region points for enumeration");
    verify->add_option("--report", report_path, "also write the report to this file");

    CLI::App* analyze = app.add_subcommand("analyze", "print per-neuron interval tables");
    add_common(analyze, oanalyze);
    analyze->add_option("--dra", dra_mode, "interval|symbolic|naive|combined");
    analyze->add_option("--report", report_path, "write the tables to this file");

    CLI::App* quantize = app.add_subcommand("quantize", "write the quantized model");
    add_common(quantize, oquant, false);
    quantize->add_option("--out", out_path, "output path (default stdout)");

    CLI::App* exportm = app.add_subcommand("export-milp", "write the LP encoding, unsolved");
    add_common(exportm, oexport);
    exportm->add_option("--epsilon", epsilon, "error bound")->required();
    exportm->add_option("--dra", dra_mode, "analysis used for hint intervals");
    exportm->add_flag("--hints", with_hints, "include difference-interval hints");
    exportm->add_option("--out", out_path, "output path (default stdout)");

    CLI::App* oracle = app.add_subcommand("oracle", "exact enumeration of the region");
    add_common(oracle, ooracle);
    oracle->add_option("--enumerate-cap", cap, "max region points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    try {
        if (verify->parsed())
            return cmd_verify(overify, epsilon, dra_mode, milp_mode, solver_cmd, timeout, cap,
                              report_path);
        if (analyze->parsed()) return cmd_analyze(oanalyze, dra_mode, report_path);
        if (quantize->parsed()) return cmd_quantize(oquant, out_path);
        if (exportm->parsed())
            return cmd_export_milp(oexport, epsilon, dra_mode, with_hints, out_path);
        if (oracle->parsed()) return cmd_oracle(ooracle, cap);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 3;
}
