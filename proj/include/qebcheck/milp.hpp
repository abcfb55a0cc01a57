// Sound-and-complete mixed integer encoding of the error bound property:
// both networks, the quantized input region, the absolute-value gadget on
// the target class, and optional per-neuron difference hints.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qebcheck/abstract.hpp"
#include "qebcheck/dra.hpp"
#include "qebcheck/network.hpp"

namespace qeb {

enum class VarKind { Continuous, Integer, Binary };

struct MilpVar {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lb = 0.0;
    double ub = 0.0;
};

struct LinTerm {
    int var = -1;
    double coef = 0.0;
};

enum class Cmp { Le, Eq, Ge };

struct LinConstraint {
    std::string name;
    std::vector<LinTerm> terms;
    Cmp cmp = Cmp::Le;
    double rhs = 0.0;
};

enum class ObjSense { Feasibility, Maximize, Minimize };

struct MilpProblem {
    std::vector<MilpVar> vars;
    std::vector<LinConstraint> cons;
    ObjSense sense = ObjSense::Feasibility;
    std::vector<LinTerm> objective;

    int add_var(const std::string& name, VarKind kind, double lb, double ub);
    void add_con(const std::string& name, std::vector<LinTerm> terms, Cmp cmp, double rhs);
    int var_index(const std::string& name) const; // -1 when absent

    // Check a full assignment against bounds, integrality and every
    // constraint. Returns an explanation of the first violation.
    std::optional<std::string> check_assignment(const std::map<std::string, double>& a,
                                                double tol) const;

  private:
    std::map<std::string, int> index_;
};

// Mapping from variables back to network nodes, for witness construction
// and decoding.
struct EncodingInfo {
    std::vector<int> input_int;                 // quantized inputs
    std::vector<int> input_real;                // normalized real inputs
    std::vector<std::vector<int>> dnn_pre;      // per affine layer
    std::vector<std::vector<int>> dnn_post;     // hidden layers only
    std::vector<std::vector<int>> dnn_relu_bin; // -1 where stable
    std::vector<std::vector<int>> qnn_acc;      // pre-round accumulators, hidden
    std::vector<std::vector<int>> qnn_round;    // rounded integers, hidden
    std::vector<std::vector<int>> qnn_post;     // clamped activations, hidden
    std::vector<std::vector<int>> qnn_max_bin;  // -1 where eliminated
    std::vector<std::vector<int>> qnn_min_bin;
    std::vector<int> qnn_out;
    int eta = -1;
    int vsel = -1;
    size_t target = 0;
    double epsilon = 0.0;
};

struct MilpEncoding {
    MilpProblem problem;
    EncodingInfo info;
};

// The individual constraint groups. They share one growing problem so the
// variable indices line up; encode_property below is the standard order.
void encode_region(MilpEncoding& enc, const InputRegion& region, const QuantScheme& scheme);
void encode_dnn(MilpEncoding& enc, const Network& net, const DnnAnalysis& analysis);
void encode_qnn(MilpEncoding& enc, const QuantizedNetwork& qnet,
                const QnnConcreteAnalysis& analysis);
void encode_error_objective(MilpEncoding& enc, size_t g, double epsilon, const DnnAnalysis& dnn,
                            const QnnConcreteAnalysis& qnn, int f_h);
void encode_diff_hints(MilpEncoding& enc, const DraResult& dra, int f_h);

MilpEncoding encode_property(const Network& net, const QuantizedNetwork& qnet,
                             const InputRegion& region, size_t g, double epsilon,
                             const DraResult* hints = nullptr);

// LP-file text: Maximize/Minimize/feasibility header, Subject To, Bounds,
// Generals, Binaries, End. Coefficients carry >= 12 significant digits and
// variable names are stable across runs.
std::string emit_lp(const MilpProblem& p);

} // namespace qeb
