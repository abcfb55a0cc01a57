#include "qebcheck/report.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace qeb {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Proved: return "proved";
    case Verdict::Falsified: return "falsified";
    case Verdict::Unknown: return "unknown";
    case Verdict::Error: return "error";
    }
    return "unknown";
}

std::string to_string(ReportStage s) {
    switch (s) {
    case ReportStage::None: return "none";
    case ReportStage::Dra: return "dra";
    case ReportStage::Milp: return "milp";
    }
    return "none";
}

int exit_code(Verdict v) {
    switch (v) {
    case Verdict::Proved: return 0;
    case Verdict::Falsified: return 1;
    case Verdict::Unknown: return 2;
    case Verdict::Error: return 4;
    }
    return 4;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Verdict verdict_from(const std::string& s) {
    if (s == "proved") return Verdict::Proved;
    if (s == "falsified") return Verdict::Falsified;
    if (s == "unknown") return Verdict::Unknown;
    if (s == "error") return Verdict::Error;
    throw std::invalid_argument("bad verdict '" + s + "'");
}

ReportStage stage_from(const std::string& s) {
    if (s == "none") return ReportStage::None;
    if (s == "dra") return ReportStage::Dra;
    if (s == "milp") return ReportStage::Milp;
    throw std::invalid_argument("bad stage '" + s + "'");
}

void emit_table(std::ostringstream& out, const char* key,
                const std::vector<NeuronInterval>& rows) {
    for (const NeuronInterval& r : rows)
        out << key << " " << r.layer << " " << r.neuron << ": " << fmt(r.value.lo) << " "
            << fmt(r.value.hi) << "\n";
}

} // namespace

std::string print_report(const Report& r) {
    std::ostringstream out;
    out << "qebcheck-report 1\n";
    out << "tool: " << r.tool << "\n";
    out << "version: " << r.version << "\n";
    out << "verdict: " << to_string(r.verdict) << "\n";
    out << "stage: " << to_string(r.stage) << "\n";
    if (!r.dra_mode.empty()) out << "dra_mode: " << r.dra_mode << "\n";
    if (!r.milp_mode.empty()) out << "milp_mode: " << r.milp_mode << "\n";
    out << "epsilon: " << fmt(r.epsilon) << "\n";
    out << "class: " << r.target_class << "\n";
    out << "center:";
    for (int64_t c : r.center) out << " " << c;
    out << "\n";
    out << "radius: " << r.radius << "\n";
    out << "time_dra_ms: " << fmt(r.time_dra_ms) << "\n";
    out << "time_milp_ms: " << fmt(r.time_milp_ms) << "\n";
    if (!r.witness.empty()) {
        out << "witness:";
        for (int64_t w : r.witness) out << " " << w;
        out << "\n";
    }
    if (r.has_witness_error) out << "witness_error: " << fmt(r.witness_error) << "\n";
    if (!r.message.empty()) out << "message: " << r.message << "\n";
    emit_table(out, "output_diff", r.output_diff);
    emit_table(out, "delta_in", r.delta_in);
    emit_table(out, "delta", r.delta);
    out << "end\n";
    return out.str();
}

Report parse_report(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "qebcheck-report 1")
        throw std::invalid_argument("not a qebcheck report");

    Report r;
    r.dra_mode.clear();
    r.milp_mode.clear();
    bool ended = false;
    while (std::getline(in, line)) {
        if (line == "end") {
            ended = true;
            break;
        }
        auto colon = line.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("bad report line: " + line);
        std::string key = line.substr(0, colon);
        std::string rest = line.substr(colon + 1);
        if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
        std::istringstream vs(rest);

        if (key == "tool") r.tool = rest;
        else if (key == "version") r.version = rest;
        else if (key == "verdict") r.verdict = verdict_from(rest);
        else if (key == "stage") r.stage = stage_from(rest);
        else if (key == "dra_mode") r.dra_mode = rest;
        else if (key == "milp_mode") r.milp_mode = rest;
        else if (key == "epsilon") r.epsilon = std::stod(rest);
        else if (key == "class") r.target_class = std::stoi(rest);
        else if (key == "radius") r.radius = std::stoll(rest);
        else if (key == "time_dra_ms") r.time_dra_ms = std::stod(rest);
        else if (key == "time_milp_ms") r.time_milp_ms = std::stod(rest);
        else if (key == "witness_error") {
            r.witness_error = std::stod(rest);
            r.has_witness_error = true;
        } else if (key == "message") r.message = rest;
        else if (key == "center" || key == "witness") {
            std::vector<int64_t>& v = key == "center" ? r.center : r.witness;
            int64_t x;
            while (vs >> x) v.push_back(x);
        } else {
            // table rows: "<name> <layer> <neuron>: <lo> <hi>"
            std::istringstream ks(key);
            std::string name;
            int layer, neuron;
            if (!(ks >> name >> layer >> neuron))
                throw std::invalid_argument("bad report line: " + line);
            double lo, hi;
            if (!(vs >> lo >> hi)) throw std::invalid_argument("bad report line: " + line);
            NeuronInterval row{layer, neuron, Interval{lo, hi}};
            if (name == "output_diff") r.output_diff.push_back(row);
            else if (name == "delta_in") r.delta_in.push_back(row);
            else if (name == "delta") r.delta.push_back(row);
            else throw std::invalid_argument("unknown table '" + name + "'");
        }
    }
    if (!ended) throw std::invalid_argument("report is truncated");
    return r;
}

} // namespace qeb
