#include "qebcheck/milp.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace qeb {

int MilpProblem::add_var(const std::string& name, VarKind kind, double lb, double ub) {
    if (index_.count(name)) throw std::invalid_argument("duplicate variable " + name);
    if (lb > ub) throw std::invalid_argument("variable bounds out of order for " + name);
    vars.push_back({name, kind, lb, ub});
    int id = int(vars.size()) - 1;
    index_[name] = id;
    return id;
}

void MilpProblem::add_con(const std::string& name, std::vector<LinTerm> terms, Cmp cmp,
                          double rhs) {
    bool nonzero = false;
    for (const LinTerm& t : terms) {
        if (t.var < 0 || t.var >= int(vars.size()))
            throw std::invalid_argument("constraint " + name + " references unknown variable");
        if (t.coef != 0.0) nonzero = true;
    }
    if (!nonzero) throw std::invalid_argument("constraint " + name + " has no nonzero coefficient");
    cons.push_back({name, std::move(terms), cmp, rhs});
}

int MilpProblem::var_index(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

std::optional<std::string> MilpProblem::check_assignment(const std::map<std::string, double>& a,
                                                         double tol) const {
    std::vector<double> val(vars.size());
    for (size_t i = 0; i < vars.size(); ++i) {
        auto it = a.find(vars[i].name);
        if (it == a.end()) return "missing value for variable " + vars[i].name;
        double v = it->second;
        if (v < vars[i].lb - tol || v > vars[i].ub + tol)
            return "variable " + vars[i].name + " out of bounds";
        if (vars[i].kind != VarKind::Continuous && std::fabs(v - std::round(v)) > tol)
            return "variable " + vars[i].name + " not integral";
        val[i] = v;
    }
    for (const LinConstraint& c : cons) {
        double s = 0;
        for (const LinTerm& t : c.terms) s += t.coef * val[t.var];
        bool ok = c.cmp == Cmp::Le   ? s <= c.rhs + tol
                  : c.cmp == Cmp::Ge ? s >= c.rhs - tol
                                     : std::fabs(s - c.rhs) <= tol;
        if (!ok) return "constraint " + c.name + " violated";
    }
    return std::nullopt;
}

namespace {

std::string vname(const char* prefix, size_t layer, size_t j) {
    // paper-style numbering: input layer is 1, affine layers 2..d, neurons 1-based
    return std::string(prefix) + std::to_string(layer) + "_" + std::to_string(j + 1);
}

} // namespace

void encode_region(MilpEncoding& enc, const InputRegion& region, const QuantScheme& scheme) {
    MilpProblem& p = enc.problem;
    const auto box = region.bounds(scheme.input); // throws when empty
    const double span = scheme.input.span();
    for (size_t k = 0; k < box.size(); ++k) {
        int xi = p.add_var(vname("xh", 1, k), VarKind::Integer, double(box[k].lo),
                           double(box[k].hi));
        int xr = p.add_var(vname("x", 1, k), VarKind::Continuous, double(box[k].lo) / span,
                           double(box[k].hi) / span);
        enc.info.input_int.push_back(xi);
        enc.info.input_real.push_back(xr);
        // x = xhat / (C_in.ub - C_in.lb)
        p.add_con("norm_" + std::to_string(k + 1),
                  {{xr, 1.0}, {xi, -1.0 / span}}, Cmp::Eq, 0.0);
    }
}

void encode_dnn(MilpEncoding& enc, const Network& net, const DnnAnalysis& analysis) {
    MilpProblem& p = enc.problem;
    if (enc.info.input_real.empty()) throw std::invalid_argument("encode the region first");
    std::vector<int> prev = enc.info.input_real;
    const size_t L = net.layers.size();
    for (size_t l = 0; l < L; ++l) {
        const AffineLayer& layer = net.layers[l];
        const bool hidden = l + 1 < L;
        const size_t paper = l + 2;
        std::vector<int> pre_ids, post_ids, bin_ids;
        for (size_t j = 0; j < layer.out_size(); ++j) {
            const Interval b = analysis.layers[l].pre[j];
            int sv = p.add_var(vname("ds", paper, j), VarKind::Continuous, b.lo, b.hi);
            std::vector<LinTerm> aff{{sv, 1.0}};
            for (size_t k = 0; k < layer.in_size(); ++k)
                aff.push_back({prev[k], -layer.weights[j][k]});
            p.add_con(vname("dnn_aff", paper, j), std::move(aff), Cmp::Eq, layer.bias[j]);
            pre_ids.push_back(sv);
            if (!hidden) continue;

            const double lo = b.lo, hi = b.hi;
            int xv = p.add_var(vname("dx", paper, j), VarKind::Continuous, std::max(0.0, lo),
                               std::max(0.0, hi));
            post_ids.push_back(xv);
            if (hi <= 0) {
                p.add_con(vname("dnn_off", paper, j), {{xv, 1.0}}, Cmp::Eq, 0.0);
                bin_ids.push_back(-1);
            } else if (lo >= 0) {
                p.add_con(vname("dnn_on", paper, j), {{xv, 1.0}, {sv, -1.0}}, Cmp::Eq, 0.0);
                bin_ids.push_back(-1);
            } else {
                // big-M ReLU, M values taken from the node's own bounds
                int av = p.add_var(vname("da", paper, j), VarKind::Binary, 0.0, 1.0);
                bin_ids.push_back(av);
                p.add_con(vname("dnn_relu_a", paper, j), {{xv, 1.0}, {sv, -1.0}}, Cmp::Ge, 0.0);
                p.add_con(vname("dnn_relu_b", paper, j), {{xv, 1.0}}, Cmp::Ge, 0.0);
                p.add_con(vname("dnn_relu_c", paper, j), {{xv, 1.0}, {sv, -1.0}, {av, -lo}},
                          Cmp::Le, -lo);
                p.add_con(vname("dnn_relu_d", paper, j), {{xv, 1.0}, {av, -hi}}, Cmp::Le, 0.0);
            }
        }
        enc.info.dnn_pre.push_back(pre_ids);
        if (hidden) {
            enc.info.dnn_post.push_back(post_ids);
            enc.info.dnn_relu_bin.push_back(bin_ids);
            prev = enc.info.dnn_post.back();
        }
    }
}

void encode_qnn(MilpEncoding& enc, const QuantizedNetwork& qnet,
                const QnnConcreteAnalysis& analysis) {
    MilpProblem& p = enc.problem;
    if (enc.info.input_int.empty()) throw std::invalid_argument("encode the region first");
    const QuantScheme& s = qnet.scheme;
    const double bias_scale = pow2(s.hidden.frac - s.biases.frac);
    const double t = double(s.hidden.ub());

    std::vector<int> prev = enc.info.input_int;
    const size_t L = qnet.layers.size();
    for (size_t l = 0; l + 1 < L; ++l) {
        const QuantLayer& layer = qnet.layers[l];
        const size_t paper = l + 2;
        const double acc_scale = pow2(qnet.accumulator_exponent(l));
        std::vector<int> acc_ids, round_ids, post_ids, max_bins, min_bins;
        for (size_t j = 0; j < layer.out_size(); ++j) {
            const Interval z = analysis.pre_round[l][j];
            const IntInterval q = analysis.pre[l][j];
            int zv = p.add_var(vname("qz", paper, j), VarKind::Continuous, z.lo, z.hi);
            std::vector<LinTerm> aff{{zv, 1.0}};
            for (size_t k = 0; k < layer.in_size(); ++k)
                aff.push_back({prev[k], -acc_scale * double(layer.weights[j][k])});
            p.add_con(vname("qnn_aff", paper, j), std::move(aff), Cmp::Eq,
                      bias_scale * double(layer.bias[j]));
            acc_ids.push_back(zv);

            // rounded value: z - 0.5 <= q <= z + 0.5 (sound superset at ties)
            int qv = p.add_var(vname("qq", paper, j), VarKind::Integer, double(q.lo),
                               double(q.hi));
            p.add_con(vname("qnn_rnd_lo", paper, j), {{qv, 1.0}, {zv, -1.0}}, Cmp::Ge, -0.5);
            p.add_con(vname("qnn_rnd_hi", paper, j), {{qv, 1.0}, {zv, -1.0}}, Cmp::Le, 0.5);
            round_ids.push_back(qv);

            // clamp to [0, C_h.ub], with cases eliminated by the concrete bounds
            const bool need_max = q.lo < 0;
            const bool need_min = double(q.hi) > t;
            int max_bin = -1, min_bin = -1, cur = qv;
            double cur_lo = double(q.lo), cur_hi = double(q.hi);
            if (cur_hi <= 0) {
                cur = p.add_var(vname("qx", paper, j), VarKind::Integer, 0.0, 0.0);
                cur_lo = cur_hi = 0.0;
            } else if (cur_lo >= t) {
                cur = p.add_var(vname("qx", paper, j), VarKind::Integer, t, t);
                cur_lo = cur_hi = t;
            } else {
                if (need_max) {
                    int yv = p.add_var(need_min ? vname("qv", paper, j) : vname("qx", paper, j),
                                       VarKind::Integer, 0.0, cur_hi);
                    max_bin = p.add_var(vname("qa", paper, j), VarKind::Binary, 0.0, 1.0);
                    p.add_con(vname("qnn_max_a", paper, j), {{yv, 1.0}, {cur, -1.0}}, Cmp::Ge,
                              0.0);
                    p.add_con(vname("qnn_max_b", paper, j), {{yv, 1.0}}, Cmp::Ge, 0.0);
                    p.add_con(vname("qnn_max_c", paper, j),
                              {{yv, 1.0}, {cur, -1.0}, {max_bin, -cur_lo}}, Cmp::Le, -cur_lo);
                    p.add_con(vname("qnn_max_d", paper, j), {{yv, 1.0}, {max_bin, -cur_hi}},
                              Cmp::Le, 0.0);
                    cur = yv;
                    cur_lo = 0.0;
                }
                if (need_min) {
                    // w = min(y, t): b = 0 keeps w = y, b = 1 pins w = t
                    int wv = p.add_var(vname("qx", paper, j), VarKind::Integer, cur_lo, t);
                    min_bin = p.add_var(vname("qb", paper, j), VarKind::Binary, 0.0, 1.0);
                    p.add_con(vname("qnn_min_a", paper, j), {{wv, 1.0}, {cur, -1.0}}, Cmp::Le,
                              0.0);
                    p.add_con(vname("qnn_min_b", paper, j), {{wv, 1.0}}, Cmp::Le, t);
                    p.add_con(vname("qnn_min_c", paper, j),
                              {{wv, 1.0}, {cur, -1.0}, {min_bin, cur_hi - t}}, Cmp::Ge, 0.0);
                    p.add_con(vname("qnn_min_d", paper, j),
                              {{wv, 1.0}, {min_bin, -(t - cur_lo)}}, Cmp::Ge, cur_lo);
                    cur = wv;
                }
            }
            max_bins.push_back(max_bin);
            min_bins.push_back(min_bin);
            post_ids.push_back(cur);
        }
        enc.info.qnn_acc.push_back(acc_ids);
        enc.info.qnn_round.push_back(round_ids);
        enc.info.qnn_post.push_back(post_ids);
        enc.info.qnn_max_bin.push_back(max_bins);
        enc.info.qnn_min_bin.push_back(min_bins);
        prev = enc.info.qnn_post.back();
    }

    const QuantLayer& out = qnet.layers.back();
    const size_t paper = L + 1;
    const double w_scale = pow2(-s.weights.frac);
    for (size_t j = 0; j < out.out_size(); ++j) {
        const Interval b = analysis.output[j];
        int yv = p.add_var(vname("qy", paper, j), VarKind::Continuous, b.lo, b.hi);
        std::vector<LinTerm> aff{{yv, 1.0}};
        for (size_t k = 0; k < out.in_size(); ++k)
            aff.push_back({prev[k], -w_scale * double(out.weights[j][k])});
        p.add_con(vname("qnn_out", paper, j), std::move(aff), Cmp::Eq,
                  bias_scale * double(out.bias[j]));
        enc.info.qnn_out.push_back(yv);
    }
}

void encode_error_objective(MilpEncoding& enc, size_t g, double epsilon, const DnnAnalysis& dnn,
                            const QnnConcreteAnalysis& qnn, int f_h) {
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    MilpProblem& p = enc.problem;
    if (g >= enc.info.qnn_out.size() || g >= enc.info.dnn_pre.back().size())
        throw std::invalid_argument("target class out of range");
    const double align = pow2(-f_h);
    const int qy = enc.info.qnn_out[g];
    const int dy = enc.info.dnn_pre.back()[g];

    // d = 2^-F_h * qy - dy; M from the analyzed output ranges
    const Interval d_range = scale(align, qnn.output[g]) - dnn.layers.back().pre[g];
    const double big_m = std::max({std::fabs(d_range.lo), std::fabs(d_range.hi), 1.0}) + 1.0;

    int eta = p.add_var("eta", VarKind::Continuous, 0.0, big_m);
    int v = p.add_var("vsel", VarKind::Binary, 0.0, 1.0);
    enc.info.eta = eta;
    enc.info.vsel = v;
    enc.info.target = g;
    enc.info.epsilon = epsilon;

    // eta = max(d, 0) via the four-constraint max gadget
    p.add_con("theta_g_pos", {{eta, 1.0}}, Cmp::Ge, 0.0);
    p.add_con("theta_g_ged", {{eta, 1.0}, {qy, -align}, {dy, 1.0}}, Cmp::Ge, 0.0);
    p.add_con("theta_g_sel", {{eta, 1.0}, {v, -big_m}}, Cmp::Le, 0.0);
    p.add_con("theta_g_led", {{eta, 1.0}, {qy, -align}, {dy, 1.0}, {v, big_m}}, Cmp::Le, big_m);
    // |d| >= epsilon  <=>  2 eta - d >= epsilon
    p.add_con("theta_eps", {{eta, 2.0}, {qy, -align}, {dy, 1.0}}, Cmp::Ge, epsilon);

    // maximize |d| = 2 eta - d so a feasible solve also reports the worst error
    p.sense = ObjSense::Maximize;
    p.objective = {{eta, 2.0}, {qy, -align}, {dy, 1.0}};
}

void encode_diff_hints(MilpEncoding& enc, const DraResult& dra, int f_h) {
    MilpProblem& p = enc.problem;
    const double align = pow2(-f_h);
    for (size_t l = 0; l < enc.info.dnn_post.size(); ++l) {
        for (size_t j = 0; j < enc.info.dnn_post[l].size(); ++j) {
            const Interval d = dra.delta[l][j];
            const int qx = enc.info.qnn_post[l][j];
            const int dx = enc.info.dnn_post[l][j];
            const size_t paper = l + 2;
            p.add_con(vname("hint_lo", paper, j), {{qx, align}, {dx, -1.0}}, Cmp::Ge, d.lo);
            p.add_con(vname("hint_hi", paper, j), {{qx, align}, {dx, -1.0}}, Cmp::Le, d.hi);
        }
    }
}

MilpEncoding encode_property(const Network& net, const QuantizedNetwork& qnet,
                             const InputRegion& region, size_t g, double epsilon,
                             const DraResult* hints) {
    net.validate();
    qnet.validate();
    const DnnAnalysis dnn = analyze_dnn(net, real_input_box(region, qnet.scheme.input));
    const QnnConcreteAnalysis qcon = analyze_qnn_concrete(qnet, region);

    MilpEncoding enc;
    encode_region(enc, region, qnet.scheme);
    encode_dnn(enc, net, dnn);
    encode_qnn(enc, qnet, qcon);
    encode_error_objective(enc, g, epsilon, dnn, qcon, qnet.scheme.hidden.frac);
    if (hints) encode_diff_hints(enc, *hints, qnet.scheme.hidden.frac);
    return enc;
}

namespace {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit_terms(std::ostringstream& out, const std::vector<LinTerm>& terms,
                const std::vector<MilpVar>& vars) {
    bool first = true;
    int on_line = 0;
    for (const LinTerm& t : terms) {
        double c = t.coef;
        if (first) {
            out << fmt_num(c) << " " << vars[t.var].name;
            first = false;
        } else {
            out << (c < 0 ? " - " : " + ") << fmt_num(std::fabs(c)) << " " << vars[t.var].name;
        }
        if (++on_line % 8 == 0 && on_line < int(terms.size())) out << "\n   ";
    }
}

} // namespace

std::string emit_lp(const MilpProblem& p) {
    std::ostringstream out;
    out << "\\ qebcheck milp export\n";
    if (p.sense == ObjSense::Maximize)
        out << "Maximize\n obj: ";
    else
        out << "Minimize\n obj: ";
    if (p.sense == ObjSense::Feasibility || p.objective.empty()) {
        if (!p.vars.empty()) out << "0 " << p.vars.front().name;
    } else {
        emit_terms(out, p.objective, p.vars);
    }
    out << "\nSubject To\n";
    for (const LinConstraint& c : p.cons) {
        out << " " << c.name << ": ";
        emit_terms(out, c.terms, p.vars);
        out << (c.cmp == Cmp::Le ? " <= " : c.cmp == Cmp::Ge ? " >= " : " = ") << fmt_num(c.rhs)
            << "\n";
    }
    out << "Bounds\n";
    for (const MilpVar& v : p.vars) {
        if (v.kind == VarKind::Binary) continue;
        if (v.lb == v.ub)
            out << " " << v.name << " = " << fmt_num(v.lb) << "\n";
        else
            out << " " << fmt_num(v.lb) << " <= " << v.name << " <= " << fmt_num(v.ub) << "\n";
    }
    bool any_int = false, any_bin = false;
    for (const MilpVar& v : p.vars) {
        any_int |= v.kind == VarKind::Integer;
        any_bin |= v.kind == VarKind::Binary;
    }
    if (any_int) {
        out << "Generals\n";
        for (const MilpVar& v : p.vars)
            if (v.kind == VarKind::Integer) out << " " << v.name << "\n";
    }
    if (any_bin) {
        out << "Binaries\n";
        for (const MilpVar& v : p.vars)
            if (v.kind == VarKind::Binary) out << " " << v.name << "\n";
    }
    out << "End\n";
    return out.str();
}

} // namespace qeb
