// Shared fixtures: the worked-example network pair, a deterministic random
// instance generator for the property suites, and a small independent LP
// reader used to cross-check the exporter.

#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qebcheck/model_io.hpp"
#include "qebcheck/network.hpp"

namespace testutil {

using namespace qeb;

// 2-2-1 network with weights from the running example: hidden
// [[1.2,-0.2],[-0.7,0.8]], output [0.3,0.7], all biases zero.
inline Network fig1_network() {
    Network n;
    n.num_inputs = 2;
    n.layers.push_back({{{1.2, -0.2}, {-0.7, 0.8}}, {0.0, 0.0}});
    n.layers.push_back({{{0.3, 0.7}}, {0.0}});
    n.validate();
    return n;
}

// weights <±,4,2>, biases <±,4,4>, input <+,4,4>, hidden <+,4,2>
inline QuantScheme fig1_scheme() {
    QuantScheme s;
    s.weights = {Signedness::Signed, 4, 2};
    s.biases = {Signedness::Signed, 4, 4};
    s.input = {Signedness::Unsigned, 4, 4};
    s.hidden = {Signedness::Unsigned, 4, 2};
    s.validate();
    return s;
}

inline QuantizedNetwork fig1_qnn() { return quantize_network(fig1_network(), fig1_scheme()); }

inline InputRegion fig1_region(int64_t radius) { return {{9, 6}, radius}; }

// ---------------------------------------------------------------------------
// random instances for the soundness / completeness suites

struct RandomInstance {
    Network net;
    QuantScheme scheme;
    QuantizedNetwork qnet;
    InputRegion region;
};

// Small networks (n <= 3 inputs, width <= 4, depth <= 4) with schemes drawn
// from Q in {4, 6, 8}; regions have radius <= 2 and stay enumerable.
inline RandomInstance random_instance(uint32_t seed) {
    std::mt19937 rng(seed);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto real = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };

    RandomInstance inst;
    const int inputs = pick(1, 3);
    const int depth = pick(2, 4); // paper-style d, counting the input layer
    int prev = inputs;
    inst.net.num_inputs = inputs;
    for (int l = 0; l + 1 < depth; ++l) {
        const int width = l + 2 == depth ? pick(1, 2) : pick(1, 4);
        AffineLayer layer;
        for (int j = 0; j < width; ++j) {
            std::vector<double> row;
            for (int k = 0; k < prev; ++k) row.push_back(real(-2.0, 2.0));
            layer.weights.push_back(row);
            layer.bias.push_back(real(-1.0, 1.0));
        }
        inst.net.layers.push_back(std::move(layer));
        prev = width;
    }
    inst.net.validate();

    const int q = 4 + 2 * pick(0, 2); // 4, 6, 8
    const bool signed_input = pick(0, 1) == 1;
    inst.scheme.weights = {Signedness::Signed, q, pick(1, q - 2)};
    inst.scheme.biases = {Signedness::Signed, q, pick(1, q - 2)};
    inst.scheme.input = {signed_input ? Signedness::Signed : Signedness::Unsigned, q,
                         pick(1, q - 1)};
    inst.scheme.hidden = {Signedness::Unsigned, q, pick(1, q - 2)};
    inst.scheme.validate();
    inst.qnet = quantize_network(inst.net, inst.scheme);

    for (int k = 0; k < inputs; ++k)
        inst.region.center.push_back(
            pick(int(inst.scheme.input.lb()), int(inst.scheme.input.ub())));
    inst.region.radius = pick(0, 2);
    return inst;
}

// ---------------------------------------------------------------------------
// independent LP reader (deliberately separate from the exporter)

struct ParsedLp {
    std::string sense;
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, double>>>> rows;
    std::vector<std::pair<std::string, char>> row_cmp; // name -> '<', '>', '='
    std::vector<std::pair<std::string, double>> row_rhs;
    std::vector<std::pair<std::string, std::pair<double, double>>> bounds;
    std::vector<std::string> generals, binaries;
};

inline ParsedLp parse_lp(const std::string& text) {
    ParsedLp lp;
    std::istringstream in(text);
    std::string line, section;
    std::string pending; // accumulates wrapped constraint lines
    auto flush_row = [&]() {
        if (pending.empty()) return;
        std::string s = pending;
        pending.clear();
        auto colon = s.find(':');
        std::string name = s.substr(0, colon);
        name.erase(0, name.find_first_not_of(' '));
        s = s.substr(colon + 1);
        char cmp = 0;
        double rhs = 0;
        for (const char* op : {"<=", ">=", "="}) {
            auto p = s.find(op);
            if (p != std::string::npos) {
                cmp = op[0] == '=' ? '=' : op[0];
                rhs = std::stod(s.substr(p + (op[0] == '=' ? 1 : 2)));
                s = s.substr(0, p);
                break;
            }
        }
        std::istringstream ts(s);
        std::vector<std::pair<std::string, double>> terms;
        double sign = 1.0;
        std::string tok;
        while (ts >> tok) {
            if (tok == "+") { sign = 1.0; continue; }
            if (tok == "-") { sign = -1.0; continue; }
            double c = std::stod(tok);
            std::string var;
            ts >> var;
            terms.emplace_back(var, sign * c);
            sign = 1.0;
        }
        lp.rows.emplace_back(name, terms);
        lp.row_cmp.emplace_back(name, cmp);
        lp.row_rhs.emplace_back(name, rhs);
    };
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '\\') continue;
        if (line == "Maximize" || line == "Minimize") { lp.sense = line; section = "obj"; continue; }
        if (line == "Subject To") { section = "st"; continue; }
        if (line == "Bounds") { flush_row(); section = "bounds"; continue; }
        if (line == "Generals") { flush_row(); section = "generals"; continue; }
        if (line == "Binaries") { flush_row(); section = "binaries"; continue; }
        if (line == "End") { flush_row(); break; }
        if (section == "st") {
            if (line.find(':') != std::string::npos) flush_row();
            pending += line;
        } else if (section == "bounds") {
            // "lo <= name <= hi" or "name = v"
            std::istringstream bs(line);
            std::string a, b, c, d, e;
            bs >> a >> b >> c;
            if (b == "=") {
                lp.bounds.emplace_back(a, std::make_pair(std::stod(c), std::stod(c)));
            } else {
                bs >> d >> e;
                lp.bounds.emplace_back(c, std::make_pair(std::stod(a), std::stod(e)));
            }
        } else if (section == "generals") {
            std::istringstream gs(line);
            std::string v;
            while (gs >> v) lp.generals.push_back(v);
        } else if (section == "binaries") {
            std::istringstream gs(line);
            std::string v;
            while (gs >> v) lp.binaries.push_back(v);
        }
    }
    return lp;
}

} // namespace testutil
