#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tcr/epistemic.hpp"
#include "tcr/scenario.hpp"

namespace tcr {

// Points (r, t) with t + guard <= T are far enough from the horizon for the
// knowledge fixpoints to be unaffected by truncation.
int oracle_guard(const TcrSpec& spec);

// True when every cycle of G_delta has length zero (so the exact-time fixpoint
// is not emptied by shifts past the horizon).
bool cycles_all_zero(const ImplementationSpec& delta);

struct PointVerdict {
    std::size_t run;
    int time;
    std::string agent;
    bool knows;     // point is in K_i(C^delta(psi)_i)
    bool responded; // optimal rule has responded by then
};

struct OracleReport {
    std::size_t runs = 0;
    std::size_t points = 0;
    std::size_t guarded = 0;
    int guard = 0;
    std::vector<std::string> agents;
    std::vector<std::size_t> agree;    // per agent, guarded points in agreement
    std::vector<PointVerdict> verdicts; // every guarded point and agent
    std::optional<bool> g_equal;       // absent when G_delta has a positive cycle
    bool all_agree = true;
};

// Enumerates every run at the horizon, applies the optimal rule and compares
// its responses with delta-common knowledge of "the trigger has occurred".
OracleReport oracle_equivalence(const Scenario& s, std::optional<int> horizon = {});

std::string format_oracle(const OracleReport& report, bool per_point);

} // namespace tcr
