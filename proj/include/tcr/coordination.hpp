#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tcr/constraints.hpp"
#include "tcr/context.hpp"
#include "tcr/runtime.hpp"

namespace tcr {

struct TcrSpec {
    Context context;
    std::string trigger;
    std::vector<std::string> agents;
    ImplementationSpec delta; // over agents, in the same order
};

// Throws ValidationError when the trigger or the agents are not in the
// context, when fewer than two agents are constrained, or when delta is over
// other agents.
void validate_tcr(const TcrSpec& spec);

struct TcrVerdict {
    bool ok = true;
    std::vector<std::string> failures; // one line per offending run
};

// Runs are cut at their horizon. An agent that has not responded by then
// only fails when the trigger happened at least `settle` ticks before the
// horizon; a response gap is only checked when both responses are visible
// or the deadline already passed.
TcrVerdict verify_tcr(const TcrSpec& spec, const std::vector<Run>& runs, std::optional<int> settle = {});

// Ticks after the trigger by which a solving protocol must have made every
// agent respond: observation spread plus the widest implementation spread.
int default_settle(const TcrSpec& spec);

struct SolvabilityReport {
    bool solvable = true;
    bool comm_strongly_connected = false;
    std::vector<std::vector<std::string>> sccs; // components of G_delta, ids sorted
    struct Chain {
        std::vector<std::size_t> components; // indices into sccs, I_1 .. I_n
        std::optional<std::vector<std::string>> witness; // i_1 .. i_n
    };
    std::vector<Chain> chains;
};

// Throws NotImplementable.
SolvabilityReport check_solvability(const TcrSpec& spec);

std::string format_report(const SolvabilityReport& report);

// Throws PreconditionViolated.
ExtendedDelta worst_case_latest_response(const TcrSpec& spec);

// Throws NotSolvable.
ResponseRule optimal_response_rule(const TcrSpec& spec);

// Checks every path of G_delta from the deciding agent, up to path_budget
// edges. Throws BudgetInsufficient when the search does not close in time.
ResponseRule bruteforce_response_rule(const TcrSpec& spec, int path_budget);

// Responds at trigger time + lag + t(i) for the minimal implementation t,
// as soon as the trigger is known. Solves the spec when lag is at least the
// largest distance from the trigger's observer to any constrained agent.
ResponseRule fixed_offset_rule(const TcrSpec& spec, int lag);

// Constrained agents in context-index order of the spec's agent list.
std::vector<std::size_t> context_agents(const TcrSpec& spec);

} // namespace tcr
