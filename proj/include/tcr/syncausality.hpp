#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tcr/constraints.hpp"
#include "tcr/runtime.hpp"

namespace tcr {

struct NodeRef {
    std::size_t agent = 0;
    int time = 0;

    friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

// Per agent, the earliest time a node or event syncausally reaches it
// (POS_INF when that does not happen within the horizon).
struct EarliestInfluence {
    std::vector<ExtendedDelta> earliest;

    bool reaches(NodeRef n) const { return earliest[n.agent] <= ExtendedDelta(n.time); }
};

// Relaxation over locality, actual deliveries and delivery guarantees.
EarliestInfluence earliest_influence(const Run& run, NodeRef from);
// Throws EventNotInRun.
EarliestInfluence earliest_influence(const Run& run, const NdEvent& e);

bool bound_guarantee(const ContextIndex& ctx, NodeRef a, NodeRef b);

std::vector<NdEvent> nd_past(const Run& run, NodeRef node);

// Syncausal structure over a set of ND events. Built either from a whole run
// or from what one agent knows at one time; in the latter case the causal
// past of every node the agent has heard from is rebuilt from its state.
class CausalView {
public:
    static CausalView of_run(const Run& run);
    static CausalView local(ContextRef ctx, std::size_t agent, int time, const State& state);

    const ContextIndex& ctx() const { return *ctx_; }
    const std::vector<FactKey>& events() const { return events_; }
    // Horizon of the run; absent for local views.
    std::optional<int> horizon() const { return horizon_; }

    bool contains(FactKey e) const;
    int time_of(FactKey e) const;
    std::size_t observer_of(FactKey e) const;
    // ND past of a node; exact for every node the view's owner has heard from.
    const State& past(std::size_t agent, int t) const;
    // e ⇝ e': equal, or e' is a delivery of a message sent after e reached its sender.
    bool precedes(FactKey e, FactKey later) const;
    // e ⇢ (j, tau)
    bool guarantees(FactKey e, std::size_t j, ExtendedDelta tau) const;
    std::optional<FactKey> input_event(std::size_t input) const;

private:
    ContextRef ctx_;
    std::vector<FactKey> events_;
    std::optional<int> horizon_;
    std::shared_ptr<const std::vector<std::vector<State>>> past_;
    int max_time_ = 0;
};

// Events e with trigger ⇝ e and e ⇢ (i, times[i]) for every listed agent,
// sorted by occurrence time. Throws TriggerAbsent.
std::vector<NdEvent> find_brooms(const Run& run, const std::string& trigger,
                                 const std::vector<std::size_t>& agents, const std::vector<int>& times);

struct CentipedeResult {
    std::optional<std::vector<FactKey>> events; // e_1..e_n
    bool horizon_clipped = false;

    explicit operator bool() const { return events.has_value(); }
};

// Path and delta are over the agents of delta; the path uses spec indices.
// Throws InvalidPath.
CentipedeResult has_path_traversing_centipede(const CausalView& view, std::size_t trigger_input,
                                              const std::vector<std::size_t>& path,
                                              const ImplementationSpec& delta, ExtendedDelta t);
CentipedeResult has_path_traversing_centipede(const Run& run, const std::string& trigger,
                                              const std::vector<std::string>& path,
                                              const ImplementationSpec& delta, int t);

// Groups hold context agent indices; times are indexed by context agent.
// Throws GroupOverlap.
std::optional<std::vector<FactKey>> find_centibroom(const CausalView& view, std::size_t trigger_input,
                                                    const std::vector<std::vector<std::size_t>>& groups,
                                                    const std::vector<int>& times);
std::optional<std::vector<FactKey>> find_centibroom(const Run& run, const std::string& trigger,
                                                    const std::vector<std::vector<std::size_t>>& groups,
                                                    const std::vector<int>& times);

// Largest number of ND events on a syncausal path; POS_INF when unrelated.
ExtendedDelta max_nd_count(const Run& run, const NdEvent& from, NodeRef to);
ExtendedDelta max_nd_count(const Run& run, NodeRef from, NodeRef to);

struct DotHighlight {
    std::string label;
    std::vector<FactKey> events;
    std::vector<NodeRef> targets;
};

std::string to_dot(const Run& run, const DotHighlight& highlight = {});

} // namespace tcr
