#include "tcr/epistemic.hpp"

#include <map>
#include <sstream>

#include "tcr/errors.hpp"

namespace tcr {

PointSpace::PointSpace(std::vector<Run> runs) : runs_(std::move(runs)) {
    if (runs_.empty()) throw SpaceMismatch("a point space needs at least one run");
    horizon_ = runs_.front().horizon;
    for (const auto& r : runs_)
        if (r.ctx != runs_.front().ctx || r.horizon != horizon_)
            throw SpaceMismatch("runs differ in context or horizon");

    const std::size_t n = ctx().agent_count();
    const bool clock = ctx().context().shared_clock;
    cell_.assign(n, std::vector<std::size_t>(size()));
    members_.assign(n, {});
    for (std::size_t a = 0; a < n; ++a) {
        std::map<std::pair<int, const State*>, std::size_t, bool (*)(const std::pair<int, const State*>&,
                                                                     const std::pair<int, const State*>&)>
            ids([](const std::pair<int, const State*>& x, const std::pair<int, const State*>& y) {
                if (x.first != y.first) return x.first < y.first;
                return *x.second < *y.second;
            });
        for (std::size_t p = 0; p < size(); ++p) {
            const int t = time_of(p);
            const State* s = &runs_[run_of(p)].states[a][t];
            auto [it, fresh] = ids.emplace(std::make_pair(clock ? t : 0, s), members_[a].size());
            if (fresh) members_[a].emplace_back();
            members_[a][it->second].push_back(p);
            cell_[a][p] = it->second;
        }
    }
}

namespace {

void same_space(const PointSpace& space, const PointSet& s) {
    if (s.size() != space.size()) throw SpaceMismatch("point set is over a different space");
}

} // namespace

PointSet knows(const PointSpace& space, std::size_t agent, const PointSet& psi) {
    same_space(space, psi);
    PointSet out = space.empty();
    for (const auto& cell : space.members(agent)) {
        bool all = true;
        for (std::size_t p : cell)
            if (!psi.test(p)) {
                all = false;
                break;
            }
        if (all)
            for (std::size_t p : cell) out.set(p);
    }
    return out;
}

PointSet no_later_than(const PointSpace& space, ExtendedDelta eps, const PointSet& psi) {
    same_space(space, psi);
    PointSet out = space.empty();
    if (eps.is_neg_inf()) return out;
    const int T = space.horizon();
    for (std::size_t r = 0; r < space.runs().size(); ++r) {
        int first = -1;
        for (int t = 0; t <= T && first < 0; ++t)
            if (psi.test(space.index(r, t))) first = t;
        if (first < 0) continue;
        for (int t = 0; t <= T; ++t)
            if (eps.is_pos_inf() || first <= t + eps.value()) out.set(space.index(r, t));
    }
    return out;
}

ShiftResult at_exactly(const PointSpace& space, std::int64_t eps, const PointSet& psi) {
    same_space(space, psi);
    ShiftResult res{space.empty(), 0};
    const int T = space.horizon();
    for (std::size_t r = 0; r < space.runs().size(); ++r)
        for (int t = 0; t <= T; ++t) {
            const std::int64_t u = t + eps;
            if (u < 0 || u > T) {
                ++res.clipped;
                continue;
            }
            if (psi.test(space.index(r, static_cast<int>(u)))) res.set.set(space.index(r, t));
        }
    return res;
}

PointSet everyone_knows(const PointSpace& space, const std::vector<std::size_t>& agents, const PointSet& psi) {
    PointSet out = space.full();
    for (std::size_t a : agents) out &= knows(space, a, psi);
    return out;
}

PointSet common_knowledge_iterated(const PointSpace& space, const std::vector<std::size_t>& agents,
                                   const PointSet& psi) {
    // E^n(psi) decreases in n, so the intersection is the limit.
    PointSet cur = everyone_knows(space, agents, psi);
    for (;;) {
        PointSet next = everyone_knows(space, agents, cur);
        if (next == cur) return cur;
        cur = std::move(next);
    }
}

PointSet common_knowledge_gfp(const PointSpace& space, const std::vector<std::size_t>& agents, const PointSet& psi) {
    PointSet x = space.full();
    for (;;) {
        PointSet next = everyone_knows(space, agents, psi & x);
        if (next == x) return x;
        x = std::move(next);
    }
}

PointSet common_knowledge(const PointSpace& space, const std::vector<std::size_t>& agents, const PointSet& psi) {
    PointSet a = common_knowledge_iterated(space, agents, psi);
    if (a != common_knowledge_gfp(space, agents, psi))
        throw std::logic_error("common knowledge computations disagree");
    return a;
}

namespace {

template <class Step>
Ensemble downward(const PointSpace& space, std::size_t n, Step step, FixpointTrace* trace) {
    Ensemble x(n, space.full());
    if (trace) trace->steps.push_back(x);
    for (;;) {
        Ensemble next(n);
        for (std::size_t i = 0; i < n; ++i) next[i] = step(x, i);
        if (trace) trace->steps.push_back(next);
        if (next == x) return x;
        x = std::move(next);
    }
}

void check_agents(const std::vector<std::size_t>& agents, const ImplementationSpec& delta) {
    if (agents.size() != delta.size()) throw AgentMismatch("agent list and delta differ in size");
    if (agents.size() < 2) throw AgentMismatch("at least two agents are needed");
}

} // namespace

Ensemble delta_common_knowledge(const PointSpace& space, const std::vector<std::size_t>& agents,
                                const ImplementationSpec& delta, const PointSet& psi, FixpointTrace* trace) {
    check_agents(agents, delta);
    same_space(space, psi);
    const std::size_t n = agents.size();
    return downward(
        space, n,
        [&](const Ensemble& x, std::size_t i) {
            PointSet out = space.full();
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) out &= no_later_than(space, delta.at(i, j), knows(space, agents[j], psi & x[j]));
            return out;
        },
        trace);
}

Ensemble g_delta_common_knowledge(const PointSpace& space, const std::vector<std::size_t>& agents,
                                  const ImplementationSpec& delta, const PointSet& psi, FixpointTrace* trace) {
    check_agents(agents, delta);
    same_space(space, psi);
    const std::size_t n = agents.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && delta.at(i, j).is_neg_inf()) throw DeltaNegInf("delta is -inf on some pair");
    const PointSet some_time = no_later_than(space, POS_INF, psi);
    return downward(
        space, n,
        [&](const Ensemble& x, std::size_t i) {
            PointSet out = some_time;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i && delta.at(i, j).is_finite())
                    out &= at_exactly(space, delta.at(i, j).value(), knows(space, agents[j], psi & x[j])).set;
            return out;
        },
        trace);
}

PointSet eventual_common_knowledge(const PointSpace& space, const std::vector<std::size_t>& agents,
                                   const PointSet& psi) {
    PointSet x = space.full();
    for (;;) {
        PointSet next = space.full();
        for (std::size_t a : agents) next &= no_later_than(space, POS_INF, knows(space, a, psi & x));
        if (next == x) return x;
        x = std::move(next);
    }
}

Ensemble knowledge_ensemble(const PointSpace& space, const std::vector<std::size_t>& agents, const Ensemble& x) {
    Ensemble out;
    for (std::size_t i = 0; i < agents.size(); ++i) out.push_back(knows(space, agents[i], x[i]));
    return out;
}

bool is_delta_coordinated(const PointSpace& space, const Ensemble& e, const ImplementationSpec& delta) {
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = 0; j < e.size(); ++j)
            if (i != j && !e[i].is_subset_of(no_later_than(space, delta.at(i, j), e[j]))) return false;
    return true;
}

PointSet occurred(const PointSpace& space, std::size_t input) {
    return space.where([&](std::size_t r, int t) {
        const int at = space.runs()[r].input_time[input];
        return at != kNever && at <= t;
    });
}

NdKnowledgeReport nd_knowledge_check(const PointSpace& space, const std::string& trigger) {
    const std::size_t k = space.ctx().input(trigger);
    const PointSet by_now = occurred(space, k);
    const PointSet ever = no_later_than(space, POS_INF, by_now);
    NdKnowledgeReport rep;
    for (std::size_t a = 0; a < space.ctx().agent_count(); ++a) {
        const PointSet diff = knows(space, a, ever) ^ knows(space, a, by_now);
        std::vector<std::size_t> bad;
        for (auto p = diff.find_first(); p != PointSet::npos; p = diff.find_next(p)) bad.push_back(p);
        if (!bad.empty()) rep.ok = false;
        rep.offending.push_back(std::move(bad));
    }
    return rep;
}

std::string format_points(const PointSpace& space, const PointSet& s) {
    std::ostringstream out;
    bool first = true;
    for (auto p = s.find_first(); p != PointSet::npos; p = s.find_next(p)) {
        out << (first ? "" : " ") << '(' << space.run_of(p) << ',' << space.time_of(p) << ')';
        first = false;
    }
    return out.str();
}

} // namespace tcr
