#pragma once

#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "tcr/constraints.hpp"
#include "tcr/runtime.hpp"

namespace tcr {

using PointSet = boost::dynamic_bitset<>;

// Runs x {0..T}; point index is run * (T + 1) + time.
class PointSpace {
public:
    // All runs must share the context object and the horizon.
    explicit PointSpace(std::vector<Run> runs);

    const std::vector<Run>& runs() const { return runs_; }
    const ContextIndex& ctx() const { return *runs_.front().ctx; }
    int horizon() const { return horizon_; }
    std::size_t size() const { return runs_.size() * static_cast<std::size_t>(horizon_ + 1); }
    std::size_t index(std::size_t run, int t) const { return run * static_cast<std::size_t>(horizon_ + 1) + t; }
    std::size_t run_of(std::size_t point) const { return point / static_cast<std::size_t>(horizon_ + 1); }
    int time_of(std::size_t point) const { return static_cast<int>(point % static_cast<std::size_t>(horizon_ + 1)); }

    PointSet empty() const { return PointSet(size()); }
    PointSet full() const { return ~PointSet(size()); }
    // Points whose time satisfies pred.
    template <class Pred>
    PointSet where(Pred pred) const {
        PointSet s = empty();
        for (std::size_t p = 0; p < size(); ++p)
            if (pred(run_of(p), time_of(p))) s.set(p);
        return s;
    }

    // Indistinguishability cell of each point for an agent (context index).
    const std::vector<std::size_t>& cell(std::size_t agent) const { return cell_[agent]; }
    const std::vector<std::vector<std::size_t>>& members(std::size_t agent) const { return members_[agent]; }

private:
    std::vector<Run> runs_;
    int horizon_ = 0;
    std::vector<std::vector<std::size_t>> cell_;
    std::vector<std::vector<std::vector<std::size_t>>> members_;
};

// Throws SpaceMismatch when psi is over another space.
PointSet knows(const PointSpace& space, std::size_t agent, const PointSet& psi);

PointSet no_later_than(const PointSpace& space, ExtendedDelta eps, const PointSet& psi);

struct ShiftResult {
    PointSet set;
    std::size_t clipped = 0; // points whose shifted time leaves {0..T}
};
ShiftResult at_exactly(const PointSpace& space, std::int64_t eps, const PointSet& psi);

PointSet everyone_knows(const PointSpace& space, const std::vector<std::size_t>& agents, const PointSet& psi);

// Intersection of the iterated everyone-knows sets.
PointSet common_knowledge_iterated(const PointSpace& space, const std::vector<std::size_t>& agents,
                                   const PointSet& psi);
// Greatest fixed point of x -> E(psi & x).
PointSet common_knowledge_gfp(const PointSpace& space, const std::vector<std::size_t>& agents, const PointSet& psi);
// Both of the above; throws std::logic_error if they differ.
PointSet common_knowledge(const PointSpace& space, const std::vector<std::size_t>& agents, const PointSet& psi);

using Ensemble = std::vector<PointSet>; // indexed like the spec's agents

struct FixpointTrace {
    std::vector<Ensemble> steps; // iterates from the top tuple down to the fixpoint
};

// gfp of x_i -> AND_{j != i} no_later_than(delta(i,j), K_j(psi & x_j)).
// `agents` gives the context index of each spec agent.
Ensemble delta_common_knowledge(const PointSpace& space, const std::vector<std::size_t>& agents,
                                const ImplementationSpec& delta, const PointSet& psi, FixpointTrace* trace = nullptr);

// gfp of x_i -> eventually(psi) & AND_{delta(i,j) finite} at_exactly(delta(i,j), K_j(psi & x_j)).
// Throws DeltaNegInf.
Ensemble g_delta_common_knowledge(const PointSpace& space, const std::vector<std::size_t>& agents,
                                  const ImplementationSpec& delta, const PointSet& psi,
                                  FixpointTrace* trace = nullptr);

// gfp of x -> AND_i eventually(K_i(psi & x)).
PointSet eventual_common_knowledge(const PointSpace& space, const std::vector<std::size_t>& agents,
                                   const PointSet& psi);

// (K_i(x_i))_i
Ensemble knowledge_ensemble(const PointSpace& space, const std::vector<std::size_t>& agents, const Ensemble& x);

bool is_delta_coordinated(const PointSpace& space, const Ensemble& e, const ImplementationSpec& delta);

struct NdKnowledgeReport {
    bool ok = true;
    // Per agent, points where K_i(eventually e) and K_i(e by now) differ.
    std::vector<std::vector<std::size_t>> offending;
};

// K_i(eventually e) = K_i(e has occurred) for every agent of the context.
NdKnowledgeReport nd_knowledge_check(const PointSpace& space, const std::string& trigger);

// Points where the input has occurred.
PointSet occurred(const PointSpace& space, std::size_t input);

std::string format_points(const PointSpace& space, const PointSet& s);

} // namespace tcr
