// Python bindings for the main operations: model handling, the two forward
// semantics, the difference analyses, the exact oracle, the LP export and
// the full verification pipeline.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qebcheck/dra.hpp"
#include "qebcheck/milp.hpp"
#include "qebcheck/model_io.hpp"
#include "qebcheck/oracle.hpp"
#include "qebcheck/verify.hpp"

namespace py = pybind11;
using namespace qeb;

namespace {

QuantConfig make_config(const std::string& sign, int bits, int frac) {
    QuantConfig c{signedness_from_string(sign), bits, frac};
    c.validate();
    return c;
}

std::vector<std::pair<double, double>> intervals_to_pairs(const std::vector<Interval>& v) {
    std::vector<std::pair<double, double>> out;
    out.reserve(v.size());
    for (const Interval& i : v) out.emplace_back(i.lo, i.hi);
    return out;
}

py::dict dra_to_dict(const DraResult& r) {
    py::dict d;
    d["input_delta"] = intervals_to_pairs(r.input_delta);
    py::list din, dout;
    for (const auto& layer : r.delta_in) din.append(intervals_to_pairs(layer));
    for (const auto& layer : r.delta) dout.append(intervals_to_pairs(layer));
    d["delta_in"] = din;
    d["delta"] = dout;
    d["output"] = intervals_to_pairs(r.output());
    return d;
}

InputRegion make_region(const std::vector<int64_t>& center, int64_t radius) {
    return InputRegion{center, radius};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "quantization error bound verification for ReLU networks";

    py::class_<QuantConfig>(m, "QuantConfig")
        .def(py::init(&make_config), py::arg("sign"), py::arg("bits"), py::arg("frac"))
        .def_readonly("bits", &QuantConfig::bits)
        .def_readonly("frac", &QuantConfig::frac)
        .def_property_readonly("sign", [](const QuantConfig& c) { return to_string(c.sign); })
        .def_property_readonly("lb", &QuantConfig::lb)
        .def_property_readonly("ub", &QuantConfig::ub);

    py::class_<QuantScheme>(m, "QuantScheme")
        .def(py::init([](QuantConfig w, QuantConfig b, QuantConfig i, QuantConfig h) {
                 QuantScheme s{w, b, i, h};
                 s.validate();
                 return s;
             }),
             py::arg("weights"), py::arg("biases"), py::arg("input"), py::arg("hidden"))
        .def_readonly("weights", &QuantScheme::weights)
        .def_readonly("biases", &QuantScheme::biases)
        .def_readonly("input", &QuantScheme::input)
        .def_readonly("hidden", &QuantScheme::hidden);

    py::class_<Network>(m, "Network")
        .def(py::init([](const std::vector<std::pair<std::vector<std::vector<double>>,
                                                     std::vector<double>>>& layers) {
                 Network n;
                 for (const auto& [w, b] : layers) n.layers.push_back({w, b});
                 if (!n.layers.empty()) n.num_inputs = n.layers.front().in_size();
                 n.validate();
                 return n;
             }),
             py::arg("layers"), "layers: list of (weights, bias) pairs")
        .def_property_readonly("num_inputs", [](const Network& n) { return n.num_inputs; })
        .def_property_readonly("depth", &Network::depth)
        .def("weights", [](const Network& n, size_t l) { return n.layers.at(l).weights; })
        .def("bias", [](const Network& n, size_t l) { return n.layers.at(l).bias; });

    py::class_<QuantizedNetwork>(m, "QuantizedNetwork")
        .def_property_readonly("depth", &QuantizedNetwork::depth)
        .def_readonly("scheme", &QuantizedNetwork::scheme)
        .def("weights",
             [](const QuantizedNetwork& n, size_t l) { return n.layers.at(l).weights; })
        .def("bias", [](const QuantizedNetwork& n, size_t l) { return n.layers.at(l).bias; });

    m.def("quantize_value", &quantize_value, py::arg("x"), py::arg("config"));
    m.def("round_nearest", &round_nearest, py::arg("x"));
    m.def("quantize_network", &quantize_network, py::arg("net"), py::arg("scheme"));

    m.def("dnn_forward",
          [](const Network& n, const std::vector<double>& x) { return dnn_forward(n, x); });
    m.def("qnn_forward", [](const QuantizedNetwork& n, const std::vector<int64_t>& x) {
        return qnn_forward(n, x);
    });
    m.def("weights_only_forward",
          [](const QuantizedNetwork& n, const std::vector<int64_t>& x) {
              return weights_only_forward(n, x);
          });
    m.def("quantization_error",
          [](const Network& n, const QuantizedNetwork& q, const std::vector<int64_t>& x,
             size_t g) { return quantization_error(n, q, x, g); },
          py::arg("net"), py::arg("qnet"), py::arg("xhat"), py::arg("target"));

    m.def("propagate_interval",
          [](const Network& n, const QuantizedNetwork& q, const std::vector<int64_t>& center,
             int64_t radius) { return dra_to_dict(propagate_interval(n, q, make_region(center, radius))); },
          py::arg("net"), py::arg("qnet"), py::arg("center"), py::arg("radius"));
    m.def("propagate_symbolic",
          [](const Network& n, const QuantizedNetwork& q, const std::vector<int64_t>& center,
             int64_t radius) { return dra_to_dict(propagate_symbolic(n, q, make_region(center, radius))); },
          py::arg("net"), py::arg("qnet"), py::arg("center"), py::arg("radius"));
    m.def("naive_diff",
          [](const Network& n, const QuantizedNetwork& q, const std::vector<int64_t>& center,
             int64_t radius) { return intervals_to_pairs(naive_diff(n, q, make_region(center, radius))); },
          py::arg("net"), py::arg("qnet"), py::arg("center"), py::arg("radius"));

    m.def("enumerate_errors",
          [](const Network& n, const QuantizedNetwork& q, const std::vector<int64_t>& center,
             int64_t radius, size_t g, int64_t cap) {
              const OracleResult r = enumerate_errors(n, q, make_region(center, radius), g, cap);
              py::dict d;
              d["max_error"] = r.max_error;
              d["min_error"] = r.min_error;
              d["max_abs_error"] = r.max_abs_error();
              d["argmax"] = r.argmax;
              d["points"] = r.points_evaluated;
              return d;
          },
          py::arg("net"), py::arg("qnet"), py::arg("center"), py::arg("radius"),
          py::arg("target"), py::arg("cap") = 10'000'000);

    m.def("export_milp",
          [](const Network& n, const QuantizedNetwork& q, const std::vector<int64_t>& center,
             int64_t radius, size_t g, double epsilon, bool hints) {
              const InputRegion region = make_region(center, radius);
              std::optional<DraResult> h;
              if (hints) h = propagate_symbolic(n, q, region);
              return emit_lp(encode_property(n, q, region, g, epsilon, h ? &*h : nullptr)
                                 .problem);
          },
          py::arg("net"), py::arg("qnet"), py::arg("center"), py::arg("radius"),
          py::arg("target"), py::arg("epsilon"), py::arg("hints") = false);

    m.def("verify",
          [](const Network& n, const QuantizedNetwork& q, const std::vector<int64_t>& center,
             int64_t radius, double epsilon, const std::string& dra, const std::string& milp,
             std::optional<size_t> target, const std::string& solver_cmd, double timeout) {
              VerifyConfig cfg;
              cfg.net = n;
              cfg.qnet = q;
              cfg.region = make_region(center, radius);
              cfg.target = target;
              cfg.epsilon = epsilon;
              cfg.dra = dra_mode_from_string(dra);
              cfg.milp = milp_mode_from_string(milp);
              cfg.solver_cmd = solver_cmd;
              cfg.time_limit_s = timeout;
              const Report rep = run_verify(cfg);
              py::dict d;
              d["verdict"] = to_string(rep.verdict);
              d["stage"] = to_string(rep.stage);
              d["report"] = print_report(rep);
              d["witness"] = rep.witness;
              return d;
          },
          py::arg("net"), py::arg("qnet"), py::arg("center"), py::arg("radius"),
          py::arg("epsilon"), py::arg("dra") = "symbolic", py::arg("milp") = "hints",
          py::arg("target") = std::nullopt, py::arg("solver_cmd") = "",
          py::arg("timeout") = 3600.0);

    m.def("parse_network", &parse_network);
    m.def("format_network", &format_network);
    m.def("parse_scheme", &parse_scheme);
    m.def("format_scheme", &format_scheme);
    m.def("load_network", &load_network);
    m.def("load_scheme", &load_scheme);
}
