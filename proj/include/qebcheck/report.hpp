// Line-oriented verification report: key-value header plus per-neuron
// interval tables. print/parse round-trip exactly.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qebcheck/interval.hpp"

namespace qeb {

enum class Verdict { Proved, Falsified, Unknown, Error };
enum class ReportStage { None, Dra, Milp };

std::string to_string(Verdict v);
std::string to_string(ReportStage s);

struct NeuronInterval {
    int layer = 0;  // paper-style layer index (first affine layer is 2)
    int neuron = 0; // 1-based
    Interval value;

    bool operator==(const NeuronInterval&) const = default;
};

struct Report {
    std::string tool = "qebcheck";
    std::string version = "0.1.0";
    Verdict verdict = Verdict::Unknown;
    ReportStage stage = ReportStage::None;
    std::string dra_mode;  // interval | symbolic | naive | combined
    std::string milp_mode; // off | on | hints
    double epsilon = 0.0;
    int target_class = 0; // 1-based
    std::vector<int64_t> center;
    int64_t radius = 0;
    std::vector<NeuronInterval> output_diff;
    std::vector<NeuronInterval> delta_in;
    std::vector<NeuronInterval> delta;
    std::vector<int64_t> witness; // only when falsified
    bool has_witness_error = false;
    double witness_error = 0.0;
    double time_dra_ms = 0.0;
    double time_milp_ms = 0.0;
    std::string message;

    bool operator==(const Report&) const = default;
};

std::string print_report(const Report& r);
Report parse_report(const std::string& text);

// Process exit code: 0 proved, 1 falsified, 2 unknown, 4 runtime error.
int exit_code(Verdict v);

} // namespace qeb
