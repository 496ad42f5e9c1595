#include "tcr/syncausality.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <sstream>

#include "tcr/errors.hpp"

namespace tcr {

namespace {

constexpr int kUnreached = INT_MAX;

bool has(const State& s, FactKey k) { return std::binary_search(s.begin(), s.end(), k); }

void merge_into(State& acc, const State& more) {
    if (more.empty()) return;
    State out;
    out.reserve(acc.size() + more.size());
    std::set_union(acc.begin(), acc.end(), more.begin(), more.end(), std::back_inserter(out));
    acc.swap(out);
}

std::size_t trigger_index(const ContextIndex& ctx, const std::string& trigger) {
    auto k = ctx.context().input_index(trigger);
    if (!k) throw TriggerAbsent("unknown trigger '" + trigger + "'");
    return *k;
}

} // namespace

EarliestInfluence earliest_influence(const Run& run, NodeRef from) {
    const ContextIndex& ctx = *run.ctx;
    const auto& links = ctx.links();
    std::vector<int> ei(ctx.agent_count(), kUnreached);
    if (from.time <= run.horizon) ei[from.agent] = from.time;

    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t l = 0; l < links.size(); ++l) {
            const int at = ei[links[l].from];
            if (at == kUnreached) continue;
            int best = ei[links[l].to];
            for (int s = at; s <= run.horizon; ++s)
                if (run.delivery[l][s] != kPending) best = std::min(best, run.delivery[l][s]);
            if (links[l].bound >= 0 && at + links[l].bound <= run.horizon) best = std::min(best, at + links[l].bound);
            if (best < ei[links[l].to]) {
                ei[links[l].to] = best;
                changed = true;
            }
        }
    }
    EarliestInfluence out;
    for (int t : ei) out.earliest.push_back(t == kUnreached ? POS_INF : ExtendedDelta(t));
    return out;
}

EarliestInfluence earliest_influence(const Run& run, const NdEvent& e) {
    const bool present = std::any_of(run.events.begin(), run.events.end(),
                                     [&](const NdEvent& x) { return x.key() == e.key(); });
    if (!present) throw EventNotInRun("event " + describe(*run.ctx, e) + " does not occur in the run");
    return earliest_influence(run, NodeRef{e.observer, e.time});
}

bool bound_guarantee(const ContextIndex& ctx, NodeRef a, NodeRef b) {
    const int d = ctx.dist(a.agent, b.agent);
    return d >= 0 && b.time >= a.time + d;
}

std::vector<NdEvent> nd_past(const Run& run, NodeRef node) {
    std::vector<NdEvent> out;
    for (const auto& e : run.events)
        if (earliest_influence(run, NodeRef{e.observer, e.time}).reaches(node)) out.push_back(e);
    return out;
}

CausalView CausalView::of_run(const Run& run) {
    CausalView v;
    v.ctx_ = run.ctx;
    for (const auto& e : run.events) v.events_.push_back(e.key());
    std::sort(v.events_.begin(), v.events_.end());
    v.horizon_ = run.horizon;
    v.past_ = std::shared_ptr<const std::vector<std::vector<State>>>(std::shared_ptr<void>(), &run.states);
    v.max_time_ = run.horizon;
    return v;
}

CausalView CausalView::local(ContextRef ctxp, std::size_t agent, int time, const State& state) {
    (void)agent;
    CausalView v;
    v.ctx_ = std::move(ctxp);
    v.events_ = state;
    v.max_time_ = time;
    const ContextIndex& ctx = *v.ctx_;
    const auto& links = ctx.links();
    const std::size_t n = ctx.agent_count();

    // Facts observed at each node, as far as the state tells.
    std::vector<std::vector<State>> seen(n, std::vector<State>(time + 1));
    for (FactKey k : state) {
        const NdEvent e = decode_fact(ctx, k);
        if (e.time <= time) seen[e.observer][e.time].push_back(k);
    }

    auto past = std::make_shared<std::vector<std::vector<State>>>(n, std::vector<State>(time + 1));
    auto& p = *past;
    for (int u = 0; u <= time; ++u) {
        for (std::size_t k = 0; k < n; ++k) {
            State acc = u > 0 ? p[k][u - 1] : State{};
            merge_into(acc, seen[k][u]);
            for (FactKey f : seen[k][u]) {
                const NdEvent e = decode_fact(ctx, f);
                if (e.kind == NdEvent::Kind::EarlyDelivery) merge_into(acc, p[links[e.link].from][e.send_time]);
            }
            // Messages due at u on bounded channels have arrived by now.
            for (std::size_t l : ctx.incoming(k))
                if (links[l].bound >= 0 && u - links[l].bound >= 0)
                    merge_into(acc, p[links[l].from][u - links[l].bound]);
            p[k][u] = std::move(acc);
        }
    }
    v.past_ = std::move(past);
    return v;
}

bool CausalView::contains(FactKey e) const { return has(events_, e); }

int CausalView::time_of(FactKey e) const { return decode_fact(*ctx_, e).time; }

std::size_t CausalView::observer_of(FactKey e) const { return decode_fact(*ctx_, e).observer; }

const State& CausalView::past(std::size_t agent, int t) const {
    static const State empty;
    if (t < 0) return empty;
    return (*past_)[agent][std::min(t, max_time_)];
}

bool CausalView::precedes(FactKey e, FactKey later) const {
    if (e == later) return true;
    const NdEvent d = decode_fact(*ctx_, later);
    if (d.kind != NdEvent::Kind::EarlyDelivery) return false;
    return has(past(ctx_->links()[d.link].from, d.send_time), e);
}

bool CausalView::guarantees(FactKey e, std::size_t j, ExtendedDelta tau) const {
    const NdEvent x = decode_fact(*ctx_, e);
    const int d = ctx_->dist(x.observer, j);
    if (d < 0) return false;
    return tau >= ExtendedDelta(static_cast<std::int64_t>(x.time) + d);
}

std::optional<FactKey> CausalView::input_event(std::size_t input) const {
    for (FactKey k : events_) {
        const NdEvent e = decode_fact(*ctx_, k);
        if (e.kind == NdEvent::Kind::ExternalInput && e.input == input) return k;
    }
    return std::nullopt;
}

std::vector<NdEvent> find_brooms(const Run& run, const std::string& trigger,
                                 const std::vector<std::size_t>& agents, const std::vector<int>& times) {
    const std::size_t k = trigger_index(*run.ctx, trigger);
    const CausalView view = CausalView::of_run(run);
    const auto trig = view.input_event(k);
    if (!trig) throw TriggerAbsent("trigger '" + trigger + "' does not occur in the run");

    std::vector<NdEvent> out;
    for (const auto& e : run.events) {
        if (!view.precedes(*trig, e.key())) continue;
        bool all = true;
        for (std::size_t a = 0; a < agents.size() && all; ++a)
            all = view.guarantees(e.key(), agents[a], times[a]);
        if (all) out.push_back(e);
    }
    return out;
}

CentipedeResult has_path_traversing_centipede(const CausalView& view, std::size_t trigger_input,
                                              const std::vector<std::size_t>& path,
                                              const ImplementationSpec& delta, ExtendedDelta t) {
    if (path.empty()) throw InvalidPath("empty path");
    std::vector<std::size_t> agents;
    for (std::size_t p : path) {
        if (p >= delta.size()) throw InvalidPath("path leaves the agent set");
        auto a = view.ctx().context().agent_index(delta.agents[p]);
        if (!a) throw InvalidPath("agent '" + delta.agents[p] + "' is not in the context");
        agents.push_back(*a);
    }

    std::vector<ExtendedDelta> tau{t};
    bool neg_inf_edge = false;
    for (std::size_t m = 0; m + 1 < path.size(); ++m) {
        const ExtendedDelta w = delta.at(path[m], path[m + 1]);
        if (path[m] == path[m + 1] || w.is_pos_inf())
            throw InvalidPath("no edge " + delta.agents[path[m]] + "->" + delta.agents[path[m + 1]]);
        if (w.is_neg_inf()) neg_inf_edge = true;
        tau.push_back(neg_inf_edge ? NEG_INF : tau.back() + w);
    }
    if (neg_inf_edge) return {};

    if (view.horizon()) {
        for (const auto& x : tau)
            if (x < ExtendedDelta(0) || x > ExtendedDelta(*view.horizon())) return {std::nullopt, true};
    }

    const auto trig = view.input_event(trigger_input);
    if (!trig) return {};

    // Backward over positions; link[m][k] is the index into frontier m+1 used by candidate k.
    const std::size_t n = path.size();
    std::vector<std::vector<FactKey>> frontier(n);
    std::vector<std::vector<std::size_t>> link(n);
    for (FactKey e : view.events())
        if (view.precedes(*trig, e) && view.guarantees(e, agents[n - 1], tau[n - 1])) {
            frontier[n - 1].push_back(e);
            link[n - 1].push_back(0);
        }
    for (std::size_t m = n - 1; m-- > 0;) {
        if (frontier[m + 1].empty()) return {};
        for (FactKey e : view.events()) {
            if (!view.guarantees(e, agents[m], tau[m])) continue;
            for (std::size_t k = 0; k < frontier[m + 1].size(); ++k)
                if (view.precedes(frontier[m + 1][k], e)) {
                    frontier[m].push_back(e);
                    link[m].push_back(k);
                    break;
                }
        }
    }
    if (frontier[0].empty()) return {};

    std::vector<FactKey> chain{frontier[0][0]};
    std::size_t at = link[0][0];
    for (std::size_t m = 1; m < n; ++m) {
        chain.push_back(frontier[m][at]);
        at = link[m][at];
    }
    return {std::move(chain), false};
}

CentipedeResult has_path_traversing_centipede(const Run& run, const std::string& trigger,
                                              const std::vector<std::string>& path,
                                              const ImplementationSpec& delta, int t) {
    std::vector<std::size_t> idx;
    for (const auto& id : path) {
        auto p = delta.index_of(id);
        if (!p) throw InvalidPath("agent '" + id + "' is not constrained");
        idx.push_back(*p);
    }
    return has_path_traversing_centipede(CausalView::of_run(run), trigger_index(*run.ctx, trigger), idx, delta, t);
}

std::optional<std::vector<FactKey>> find_centibroom(const CausalView& view, std::size_t trigger_input,
                                                    const std::vector<std::vector<std::size_t>>& groups,
                                                    const std::vector<int>& times) {
    std::set<std::size_t> used;
    for (const auto& g : groups) {
        if (g.empty()) throw GroupOverlap("empty group");
        for (std::size_t a : g)
            if (!used.insert(a).second) throw GroupOverlap("agent '" + view.ctx().agent_id(a) + "' in two groups");
    }
    const auto trig = view.input_event(trigger_input);
    if (!trig || groups.empty()) return std::nullopt;

    auto covers = [&](FactKey e, const std::vector<std::size_t>& g) {
        return std::all_of(g.begin(), g.end(), [&](std::size_t a) { return view.guarantees(e, a, times[a]); });
    };
    std::vector<std::vector<FactKey>> frontier(groups.size());
    std::vector<std::vector<std::size_t>> back(groups.size());
    for (FactKey e : view.events())
        if (view.precedes(*trig, e) && covers(e, groups[0])) {
            frontier[0].push_back(e);
            back[0].push_back(0);
        }
    for (std::size_t m = 1; m < groups.size(); ++m) {
        if (frontier[m - 1].empty()) return std::nullopt;
        for (FactKey e : view.events()) {
            if (!covers(e, groups[m])) continue;
            for (std::size_t k = 0; k < frontier[m - 1].size(); ++k)
                if (view.precedes(frontier[m - 1][k], e)) {
                    frontier[m].push_back(e);
                    back[m].push_back(k);
                    break;
                }
        }
    }
    if (frontier.back().empty()) return std::nullopt;

    std::vector<FactKey> chain(groups.size());
    std::size_t at = 0;
    for (std::size_t m = groups.size(); m-- > 0;) {
        chain[m] = frontier[m][at];
        at = back[m][at];
    }
    return chain;
}

std::optional<std::vector<FactKey>> find_centibroom(const Run& run, const std::string& trigger,
                                                    const std::vector<std::vector<std::size_t>>& groups,
                                                    const std::vector<int>& times) {
    return find_centibroom(CausalView::of_run(run), trigger_index(*run.ctx, trigger), groups, times);
}

namespace {

// Longest path over the (agent, time) grid; ND inputs weigh on nodes, early
// deliveries on edges.
ExtendedDelta longest_nd_path(const Run& run, NodeRef start, int start_count, NodeRef to) {
    const ContextIndex& ctx = *run.ctx;
    const auto& links = ctx.links();
    const std::size_t n = ctx.agent_count();
    const int T = run.horizon;
    if (to.time > T || start.time > T || to.time < start.time) return POS_INF;

    std::vector<std::vector<int>> inputs(n, std::vector<int>(T + 1, 0));
    for (std::size_t k = 0; k < ctx.input_count(); ++k)
        if (run.input_time[k] != kNever) ++inputs[ctx.observer(k)][run.input_time[k]];

    std::vector<std::vector<int>> best(n, std::vector<int>(T + 1, -1));
    best[start.agent][start.time] = start_count;
    auto relax = [&](std::size_t a, int t, int v) {
        if (t <= T && v > best[a][t]) best[a][t] = v;
    };
    for (int t = start.time; t <= T; ++t)
        for (std::size_t a = 0; a < n; ++a) {
            const int v = best[a][t];
            if (v < 0) continue;
            if (t + 1 <= T) relax(a, t + 1, v + inputs[a][t + 1]);
            for (std::size_t l = 0; l < links.size(); ++l) {
                if (links[l].from != a) continue;
                const int at = run.delivery[l][t];
                if (at != kPending) {
                    const bool early = links[l].bound < 0 || at - t < links[l].bound;
                    relax(links[l].to, at, v + (early ? 1 : 0) + inputs[links[l].to][at]);
                }
                if (links[l].bound >= 0 && t + links[l].bound <= T)
                    relax(links[l].to, t + links[l].bound, v + inputs[links[l].to][t + links[l].bound]);
            }
        }
    const int r = best[to.agent][to.time];
    return r < 0 ? POS_INF : ExtendedDelta(r);
}

} // namespace

ExtendedDelta max_nd_count(const Run& run, const NdEvent& from, NodeRef to) {
    NodeRef start{from.observer, from.time};
    int count = 0;
    for (std::size_t k = 0; k < run.ctx->input_count(); ++k)
        if (run.input_time[k] == from.time && run.ctx->observer(k) == from.observer) ++count;
    if (from.kind == NdEvent::Kind::EarlyDelivery) ++count;
    return longest_nd_path(run, start, count, to);
}

ExtendedDelta max_nd_count(const Run& run, NodeRef from, NodeRef to) {
    int count = 0;
    for (std::size_t k = 0; k < run.ctx->input_count(); ++k)
        if (run.input_time[k] == from.time && run.ctx->observer(k) == from.agent) ++count;
    return longest_nd_path(run, from, count, to);
}

std::string to_dot(const Run& run, const DotHighlight& highlight) {
    const ContextIndex& ctx = *run.ctx;
    const auto& links = ctx.links();
    auto name = [&](std::size_t a, int t) { return "\"" + ctx.agent_id(a) + "@" + std::to_string(t) + "\""; };

    std::set<NodeRef> marked;
    for (FactKey k : highlight.events) {
        const NdEvent e = decode_fact(ctx, k);
        marked.insert({e.observer, e.time});
    }
    std::set<NodeRef> targets(highlight.targets.begin(), highlight.targets.end());

    std::ostringstream out;
    out << "digraph run {\n  rankdir=LR;\n  node [shape=circle, fontsize=10];\n";
    if (!highlight.label.empty()) out << "  label=\"" << highlight.label << "\";\n";
    for (int t = 0; t <= run.horizon; ++t) {
        out << "  subgraph time_" << t << " {\n    rank=same;\n";
        for (std::size_t a = 0; a < ctx.agent_count(); ++a) {
            out << "    " << name(a, t);
            std::vector<std::string> attrs;
            if (marked.count({a, t})) attrs.push_back("style=filled, fillcolor=gold");
            if (targets.count({a, t})) attrs.push_back("shape=doublecircle");
            if (!attrs.empty()) {
                out << " [";
                for (std::size_t k = 0; k < attrs.size(); ++k) out << (k ? ", " : "") << attrs[k];
                out << "]";
            }
            out << ";\n";
        }
        out << "  }\n";
    }
    for (std::size_t a = 0; a < ctx.agent_count(); ++a)
        for (int t = 0; t < run.horizon; ++t)
            out << "  " << name(a, t) << " -> " << name(a, t + 1) << " [color=gray];\n";
    for (std::size_t l = 0; l < links.size(); ++l)
        for (int s = 0; s <= run.horizon; ++s) {
            const int at = run.delivery[l][s];
            if (at != kPending) {
                const bool early = links[l].bound < 0 || at - s < links[l].bound;
                out << "  " << name(links[l].from, s) << " -> " << name(links[l].to, at)
                    << (early ? " [color=red];\n" : ";\n");
            }
            if (links[l].bound >= 0 && s + links[l].bound <= run.horizon)
                out << "  " << name(links[l].from, s) << " -> " << name(links[l].to, s + links[l].bound)
                    << " [style=dashed];\n";
        }
    out << "}\n";
    return out.str();
}

} // namespace tcr
