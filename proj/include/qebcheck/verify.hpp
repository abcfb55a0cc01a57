// The verification pipeline: differential reachability first, MILP fallback.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qebcheck/network.hpp"
#include "qebcheck/report.hpp"

namespace qeb {

enum class DraMode { Interval, Symbolic, Naive, Combined };
enum class MilpMode { Off, On, Hints };

std::string to_string(DraMode m);
std::string to_string(MilpMode m);
DraMode dra_mode_from_string(const std::string& s);
MilpMode milp_mode_from_string(const std::string& s);

struct VerifyConfig {
    Network net;
    QuantizedNetwork qnet;
    InputRegion region;
    std::optional<size_t> target; // 0-based; empty means "class predicted at the center"
    double epsilon = 0.0;
    DraMode dra = DraMode::Symbolic;
    MilpMode milp = MilpMode::Hints;
    std::string solver_cmd;      // empty selects the complete enumeration backend
    double time_limit_s = 3600.0;
    int64_t enumerate_cap = 10'000'000;

    void validate() const;
};

// Class predicted at the dequantized region center, lowest index on ties.
size_t predicted_class(const Network& net, const QuantizedNetwork& qnet,
                       const InputRegion& region);

Report run_verify(const VerifyConfig& cfg);

} // namespace qeb
