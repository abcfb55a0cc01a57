// Solver backends for the property encoding.
//
// The enumeration backend is complete for discrete regions: every region
// point is substituted, both forwards evaluated, and the |error| >= epsilon
// semantics checked directly. The external backend drives an off-the-shelf
// solver through an LP file and a `STATUS\n(name value)*` solution file;
// the command template expands {lp} and {sol}.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "qebcheck/milp.hpp"
#include "qebcheck/network.hpp"

namespace qeb {

enum class SolveStatus { Feasible, Infeasible, Timeout, BackendError };

struct SolveVerdict {
    SolveStatus status = SolveStatus::BackendError;
    std::map<std::string, double> witness; // populated when Feasible
    std::string detail;
};

struct EnumerationBackend {
    int64_t cap = 10'000'000;
    double time_limit_s = 3600.0;
};

struct ExternalBackend {
    std::string command; // e.g. "mysolver {lp} {sol}"
    double time_limit_s = 3600.0;
};

using SolverBackend = std::variant<EnumerationBackend, ExternalBackend>;

struct VerificationTask {
    const Network* net = nullptr;
    const QuantizedNetwork* qnet = nullptr;
    InputRegion region;
    size_t target = 0;
    double epsilon = 0.0;
};

// Feasible witnesses are re-validated against every constraint before being
// returned; a failing witness is a BackendError.
SolveVerdict solve(const MilpEncoding& enc, const VerificationTask& task,
                   const SolverBackend& backend);

// Quantized input behind a witness assignment.
std::vector<int64_t> decode_witness_input(const MilpEncoding& enc,
                                          const std::map<std::string, double>& witness);

// Full assignment for one concrete input, from the forward traces. Exposed
// for the encoding equivalence tests.
std::map<std::string, double> assignment_from_traces(const MilpEncoding& enc,
                                                     const VerificationTask& task,
                                                     std::span<const int64_t> xhat);

} // namespace qeb
