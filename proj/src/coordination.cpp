#include "tcr/coordination.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>

#include "tcr/errors.hpp"
#include "tcr/syncausality.hpp"

namespace tcr {

void validate_tcr(const TcrSpec& spec) {
    std::vector<std::string> problems;
    if (!spec.context.input_index(spec.trigger)) problems.push_back("trigger '" + spec.trigger + "' is not an input");
    std::set<std::string> seen;
    for (const auto& a : spec.agents) {
        if (!spec.context.agent_index(a)) problems.push_back("agent '" + a + "' is not in the context");
        if (!seen.insert(a).second) problems.push_back("agent '" + a + "' listed twice");
    }
    if (spec.agents.size() < 2) problems.push_back("at least two agents must be constrained");
    if (spec.delta.agents != spec.agents) problems.push_back("delta is not over the constrained agents");
    if (problems.empty()) return;
    std::string msg = "invalid tcr spec:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw ValidationError(msg);
}

std::vector<std::size_t> context_agents(const TcrSpec& spec) {
    std::vector<std::size_t> out;
    for (const auto& a : spec.agents) out.push_back(*spec.context.agent_index(a));
    return out;
}

namespace {

int diameter(const ContextIndex& ctx) {
    int d = 0;
    for (std::size_t i = 0; i < ctx.agent_count(); ++i)
        for (std::size_t j = 0; j < ctx.agent_count(); ++j) d = std::max(d, ctx.dist(i, j));
    return d;
}

} // namespace

int default_settle(const TcrSpec& spec) {
    const ContextIndex ctx(spec.context);
    std::int64_t spread = 0;
    std::int64_t widest = 0;
    if (is_implementable(spec.delta)) {
        const auto cf = canonical_form(spec.delta);
        for (std::size_t i = 0; i < spec.delta.size(); ++i) spread = std::max(spread, -row_min(cf, i).value());
    }
    for (std::size_t i = 0; i < spec.delta.size(); ++i)
        for (std::size_t j = 0; j < spec.delta.size(); ++j)
            if (i != j && spec.delta.at(i, j).is_finite()) widest = std::max(widest, spec.delta.at(i, j).value());
    return static_cast<int>(spread + widest + diameter(ctx));
}

TcrVerdict verify_tcr(const TcrSpec& spec, const std::vector<Run>& runs, std::optional<int> settle) {
    validate_tcr(spec);
    const int grace = settle ? *settle : default_settle(spec);
    const auto agents = context_agents(spec);
    const std::size_t n = agents.size();
    TcrVerdict v;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const Run& run = runs[r];
        const ContextIndex& ctx = *run.ctx;
        const std::size_t k = ctx.input(spec.trigger);
        auto fail = [&](const std::string& why) {
            v.ok = false;
            v.failures.push_back("run " + std::to_string(r) + ": " + why);
        };
        if (!run.triggered_by(k)) {
            for (std::size_t p = 0; p < n; ++p)
                if (run.response[agents[p]]) fail("agent " + spec.agents[p] + " responds without the trigger");
            continue;
        }
        const int te = run.input_time[k];
        const int T = run.horizon;
        for (std::size_t p = 0; p < n; ++p) {
            const bool bounded = ctx.dist(ctx.observer(k), agents[p]) >= 0;
            if (!run.response[agents[p]] && bounded && te + grace <= T)
                fail("agent " + spec.agents[p] + " never responds");
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const ExtendedDelta d = spec.delta.at(i, j);
                const auto& ri = run.response[agents[i]];
                const auto& rj = run.response[agents[j]];
                if (d.is_pos_inf() || !ri) continue;
                if (d.is_neg_inf()) {
                    fail("agent " + spec.agents[i] + " responds under a -inf bound");
                    continue;
                }
                const ExtendedDelta deadline = ExtendedDelta(*ri) + d;
                if (rj ? ExtendedDelta(*rj) > deadline : deadline <= ExtendedDelta(T))
                    fail("agent " + spec.agents[j] + " misses " + spec.agents[i] + "+" + d.to_string());
            }
    }
    return v;
}

namespace {

using Digraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;

// Components of G_delta ordered by their first agent; members in spec order.
std::vector<std::vector<std::size_t>> delta_components(const ImplementationSpec& d, std::vector<std::size_t>& comp_of) {
    const std::size_t n = d.size();
    Digraph g(n);
    for (const auto& e : constraint_graph(d).edges) boost::add_edge(e.from, e.to, g);
    std::vector<int> raw(n);
    boost::strong_components(g, boost::make_iterator_property_map(raw.begin(), boost::get(boost::vertex_index, g)));
    std::map<int, std::size_t> renumber;
    std::vector<std::vector<std::size_t>> comps;
    comp_of.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        auto [it, fresh] = renumber.emplace(raw[v], comps.size());
        if (fresh) comps.emplace_back();
        comps[it->second].push_back(v);
        comp_of[v] = it->second;
    }
    return comps;
}

} // namespace

SolvabilityReport check_solvability(const TcrSpec& spec) {
    validate_tcr(spec);
    if (!is_implementable(spec.delta)) throw NotImplementable("constraints admit no implementation");
    const ContextIndex ctx(spec.context);
    const auto agents = context_agents(spec);
    const std::size_t observer = ctx.observer(ctx.input(spec.trigger));

    SolvabilityReport rep;
    rep.comm_strongly_connected = true;
    for (std::size_t i = 0; i < ctx.agent_count(); ++i)
        for (std::size_t j = 0; j < ctx.agent_count(); ++j)
            if (!ctx.reaches(i, j)) rep.comm_strongly_connected = false;

    std::vector<std::size_t> comp_of;
    const auto comps = delta_components(spec.delta, comp_of);
    for (const auto& c : comps) {
        std::vector<std::string> ids;
        for (std::size_t v : c) ids.push_back(spec.agents[v]);
        std::sort(ids.begin(), ids.end());
        rep.sccs.push_back(ids);
    }
    std::vector<std::set<std::size_t>> succ(comps.size());
    for (const auto& e : constraint_graph(spec.delta).edges)
        if (comp_of[e.from] != comp_of[e.to]) succ[comp_of[e.from]].insert(comp_of[e.to]);

    // Every path of the condensation, each component as a start.
    std::vector<std::vector<std::size_t>> chains;
    std::vector<std::size_t> cur;
    auto extend = [&](auto&& self, std::size_t c) -> void {
        cur.push_back(c);
        chains.push_back(cur);
        for (std::size_t nxt : succ[c]) self(self, nxt);
        cur.pop_back();
    };
    for (std::size_t c = 0; c < comps.size(); ++c) extend(extend, c);

    // v is a context agent; every member of component c must be within a
    // finite-bound distance of it.
    auto spans = [&](std::size_t v, std::size_t c) {
        return std::all_of(comps[c].begin(), comps[c].end(),
                           [&](std::size_t j) { return ctx.dist(v, agents[j]) >= 0; });
    };
    for (const auto& chain : chains) {
        // Witnesses are chosen from I_n back to I_1, following the
        // communication path observer -> i_n -> ... -> i_1.
        std::vector<std::size_t> pick(chain.size());
        auto search = [&](auto&& self, std::size_t m, std::size_t from) -> bool {
            for (std::size_t v = 0; v < ctx.agent_count(); ++v) {
                if (!ctx.reaches(from, v) || !spans(v, chain[m])) continue;
                pick[m] = v;
                if (m == 0 || self(self, m - 1, v)) return true;
            }
            return false;
        };
        SolvabilityReport::Chain out{chain, std::nullopt};
        if (search(search, chain.size() - 1, observer)) {
            std::vector<std::string> ids;
            for (std::size_t v : pick) ids.push_back(ctx.agent_id(v));
            out.witness = ids;
        } else {
            rep.solvable = false;
        }
        rep.chains.push_back(std::move(out));
    }
    return rep;
}

std::string format_report(const SolvabilityReport& report) {
    std::ostringstream out;
    out << "solvable: " << (report.solvable ? "yes" : "no") << '\n';
    out << "communication graph strongly connected: " << (report.comm_strongly_connected ? "yes" : "no") << '\n';
    for (std::size_t c = 0; c < report.sccs.size(); ++c) {
        out << "scc " << c << ": {";
        for (std::size_t k = 0; k < report.sccs[c].size(); ++k) out << (k ? "," : "") << report.sccs[c][k];
        out << "}\n";
    }
    for (const auto& ch : report.chains) {
        out << "chain";
        for (std::size_t c : ch.components) out << ' ' << c;
        if (ch.witness) {
            out << " witness";
            for (const auto& w : *ch.witness) out << ' ' << w;
        } else {
            out << " FAILS";
        }
        out << '\n';
    }
    if (report.comm_strongly_connected)
        out << "every chain reduces to its components: any finite-distance agent per component works\n";
    return out.str();
}

ExtendedDelta worst_case_latest_response(const TcrSpec& spec) {
    validate_tcr(spec);
    std::vector<std::string> failed;
    for (std::size_t i = 0; i < spec.delta.size(); ++i)
        for (std::size_t j = 0; j < spec.delta.size(); ++j)
            if (i != j && spec.delta.at(i, j) < ExtendedDelta(0)) {
                failed.push_back("delta is negative somewhere");
                i = j = spec.delta.size();
                break;
            }
    std::vector<std::size_t> comp_of;
    if (delta_components(spec.delta, comp_of).size() != 1) failed.push_back("G_delta is not strongly connected");
    if (!failed.empty()) {
        std::string msg = "worst-case bound needs";
        for (const auto& f : failed) msg += " [" + f + "]";
        throw PreconditionViolated(msg);
    }
    const ContextIndex ctx(spec.context);
    const std::size_t obs = ctx.observer(ctx.input(spec.trigger));
    ExtendedDelta best = POS_INF;
    for (std::size_t v = 0; v < ctx.agent_count(); ++v) {
        if (ctx.dist(obs, v) < 0) continue;
        ExtendedDelta reach = ctx.dist(obs, v);
        for (std::size_t j : context_agents(spec)) {
            if (ctx.dist(v, j) < 0) {
                reach = POS_INF;
                break;
            }
            reach = max(reach, ExtendedDelta(ctx.dist(obs, v) + ctx.dist(v, j)));
        }
        best = min(best, reach);
    }
    return best;
}

namespace {

// Everything a response rule needs that does not depend on the point.
struct Plan {
    TcrSpec spec;
    ContextRef ctx;
    std::size_t trigger = 0;
    std::vector<std::size_t> agents;            // spec index -> context agent
    std::vector<std::optional<std::size_t>> of; // context agent -> spec index
    CanonicalForm cf;
    std::int64_t weight = 1;                    // largest |finite dhat|, at least 1

    std::vector<std::size_t> comp_of;
    std::vector<std::vector<std::size_t>> comps;
    std::vector<std::set<std::size_t>> comp_succ;
    std::vector<char> sink;
    std::vector<char> multi_class;
    std::vector<std::size_t> rep;                 // representative of each zero class
    std::vector<std::vector<std::size_t>> group;  // members of a representative's class
    std::vector<std::size_t> reps;                // sorted by id
    std::vector<std::vector<std::int64_t>> col_min; // [comp][spec index] min_{l in C} dhat(l, j)

    explicit Plan(const TcrSpec& s) : spec(s), ctx(index_context(s.context)) {
        trigger = ctx->input(spec.trigger);
        agents = context_agents(spec);
        of.assign(ctx->agent_count(), std::nullopt);
        for (std::size_t p = 0; p < agents.size(); ++p) of[agents[p]] = p;
        cf = canonical_form(spec.delta);
        const std::size_t n = agents.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (cf.dhat(i, j).is_finite()) weight = std::max<std::int64_t>(weight, std::llabs(cf.dhat(i, j).value()));

        comps = delta_components(spec.delta, comp_of);
        comp_succ.assign(comps.size(), {});
        for (const auto& e : constraint_graph(spec.delta).edges)
            if (comp_of[e.from] != comp_of[e.to]) comp_succ[comp_of[e.from]].insert(comp_of[e.to]);
        for (std::size_t c = 0; c < comps.size(); ++c) sink.push_back(comp_succ[c].empty());

        rep.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            rep[i] = i;
            for (std::size_t j = 0; j < n; ++j)
                if (zero(i, j) && spec.agents[j] < spec.agents[rep[i]]) rep[i] = j;
        }
        group.assign(n, {});
        for (std::size_t i = 0; i < n; ++i) group[rep[i]].push_back(i);
        for (std::size_t i = 0; i < n; ++i)
            if (rep[i] == i) reps.push_back(i);
        std::sort(reps.begin(), reps.end(), [&](std::size_t a, std::size_t b) { return spec.agents[a] < spec.agents[b]; });

        multi_class.assign(comps.size(), 0);
        col_min.assign(comps.size(), std::vector<std::int64_t>(n, 0));
        for (std::size_t c = 0; c < comps.size(); ++c) {
            std::set<std::size_t> classes;
            for (std::size_t v : comps[c]) classes.insert(rep[v]);
            multi_class[c] = classes.size() > 1;
            for (std::size_t j : comps[c]) {
                std::int64_t m = 0;
                for (std::size_t l : comps[c]) m = std::min(m, cf.dhat(l, j).value());
                col_min[c][j] = m;
            }
        }
    }

    bool zero(std::size_t i, std::size_t j) const {
        return cf.dhat(i, j).is_finite() && cf.dhat(j, i).is_finite() &&
               cf.dhat(i, j).value() == -cf.dhat(j, i).value();
    }

    std::set<std::size_t> reachable_comps(std::size_t p) const {
        std::set<std::size_t> seen{comp_of[p]};
        std::deque<std::size_t> q{comp_of[p]};
        while (!q.empty()) {
            const std::size_t c = q.front();
            q.pop_front();
            for (std::size_t d : comp_succ[c])
                if (seen.insert(d).second) q.push_back(d);
        }
        return seen;
    }
};

// Per-point evaluation data shared by both rules.
struct Point {
    CausalView view;
    std::vector<FactKey> reached; // known events the trigger reaches
    std::int64_t cap = 0;         // at or above this every finite-distance guarantee holds
};

std::optional<Point> prepare(const Plan& plan, std::size_t agent, int t, const State& state) {
    Point pt{CausalView::local(plan.ctx, agent, t, state), {}, 0};
    const auto trig = pt.view.input_event(plan.trigger);
    if (!trig) return std::nullopt;
    for (FactKey e : pt.view.events())
        if (pt.view.precedes(*trig, e)) pt.reached.push_back(e);
    std::int64_t top = t;
    for (FactKey e : pt.reached)
        for (std::size_t j : plan.agents)
            if (const int d = plan.ctx->dist(pt.view.observer_of(e), j); d >= 0)
                top = std::max<std::int64_t>(top, pt.view.time_of(e) + d);
    pt.cap = top + static_cast<std::int64_t>(plan.agents.size()) * plan.weight + 1;
    return pt;
}

using Events = std::vector<FactKey>;

// Events of `pool` covering all (j, tau + offset_j) for j in `targets` that
// precede some member of `after`.
Events next_set(const Plan& plan, const Point& pt, const Events& after, std::int64_t tau,
                const std::vector<std::pair<std::size_t, std::int64_t>>& targets) {
    Events out;
    for (FactKey e : pt.reached) {
        bool ok = std::all_of(targets.begin(), targets.end(), [&](const auto& tg) {
            return pt.view.guarantees(e, plan.agents[tg.first], ExtendedDelta(tau + tg.second));
        });
        if (!ok) continue;
        if (std::any_of(after.begin(), after.end(), [&](FactKey s) { return pt.view.precedes(e, s); }))
            out.push_back(e);
    }
    return out;
}

bool optimal_decide(const Plan& plan, std::size_t agent, int t, const State& state) {
    const auto p = plan.of[agent];
    if (!p) return false;
    const auto prepared = prepare(plan, agent, t, state);
    if (!prepared) return false;
    const Point& pt = *prepared;
    const auto& dhat = plan.cf.dhat;

    // Broom candidates and the broom horizon for each multi-class component.
    std::map<std::size_t, Events> brooms;
    std::map<std::size_t, std::int64_t> horizon;
    for (std::size_t c : plan.reachable_comps(*p)) {
        if (!plan.multi_class[c]) continue;
        Events b;
        std::int64_t h = std::numeric_limits<std::int64_t>::min();
        for (FactKey e : pt.reached) {
            std::int64_t br = std::numeric_limits<std::int64_t>::min();
            bool finite = true;
            for (std::size_t j : plan.comps[c]) {
                const int d = plan.ctx->dist(pt.view.observer_of(e), plan.agents[j]);
                if (d < 0) {
                    finite = false;
                    break;
                }
                br = std::max(br, pt.view.time_of(e) + d - plan.col_min[c][j]);
            }
            if (!finite) continue;
            b.push_back(e);
            h = std::max(h, br);
        }
        if (b.empty()) return false;
        brooms[c] = std::move(b);
        horizon[c] = h;
    }

    auto group_targets = [&](std::size_t r) {
        std::vector<std::pair<std::size_t, std::int64_t>> tg;
        for (std::size_t j : plan.group[r]) tg.emplace_back(j, dhat(r, j).value());
        return tg;
    };
    auto clamp = [&](std::int64_t tau) { return std::min(tau, pt.cap); };

    using Node = std::tuple<std::size_t, std::int64_t, Events>;
    std::set<Node> seen;
    std::deque<Node> queue;
    const std::size_t r0 = plan.rep[*p];
    const std::int64_t tau0 = clamp(t + dhat(*p, r0).value());
    Events s0 = next_set(plan, pt, pt.reached, tau0, group_targets(r0));
    if (s0.empty()) return false;
    queue.emplace_back(r0, tau0, s0);
    seen.emplace(r0, tau0, std::move(s0));

    while (!queue.empty()) {
        auto [r, tau, s] = std::move(queue.front());
        queue.pop_front();
        const std::size_t c = plan.comp_of[r];
        if (plan.sink[c] && plan.multi_class[c] && tau >= horizon[c]) {
            const auto& b = brooms[c];
            const bool anchored = std::any_of(b.begin(), b.end(), [&](FactKey e) {
                return std::any_of(s.begin(), s.end(), [&](FactKey x) { return pt.view.precedes(e, x); });
            });
            if (!anchored) return false;
            continue;
        }
        for (std::size_t r2 : plan.reps) {
            if (r2 == r || !dhat(r, r2).is_finite()) continue;
            const std::int64_t tau2 = clamp(tau + dhat(r, r2).value());
            Events s2 = next_set(plan, pt, s, tau2, group_targets(r2));
            if (s2.empty()) return false;
            Node node{r2, tau2, std::move(s2)};
            if (seen.insert(node).second) queue.push_back(std::move(node));
        }
    }
    return true;
}

struct BruteNode {
    std::size_t vertex;
    std::int64_t tau;
    Events set;
    std::size_t parent;
    int depth;
};

bool bruteforce_decide(const Plan& plan, int budget, std::size_t agent, int t, const State& state) {
    const auto p = plan.of[agent];
    if (!p) return false;
    const auto prepared = prepare(plan, agent, t, state);
    if (!prepared) return false;
    const Point& pt = *prepared;
    const auto& delta = plan.spec.delta;
    auto clamp = [&](std::int64_t tau) { return std::min(tau, pt.cap); };

    std::vector<BruteNode> nodes;
    std::set<std::tuple<std::size_t, std::int64_t, Events>> seen;
    auto path_of = [&](std::size_t idx) {
        std::vector<std::size_t> path;
        for (std::size_t k = idx;; k = nodes[k].parent) {
            path.push_back(nodes[k].vertex);
            if (k == 0) break;
        }
        std::reverse(path.begin(), path.end());
        return path;
    };
    // The independent chain search must agree with the incremental sets.
    auto cross_check = [&](std::size_t idx, bool nonempty) {
        const auto res = has_path_traversing_centipede(pt.view, plan.trigger, path_of(idx), delta, t);
        if (res.events.has_value() != nonempty)
            throw std::logic_error("incremental centipede search disagrees with the path check");
    };

    Events s0 = next_set(plan, pt, pt.reached, t, {{*p, 0}});
    nodes.push_back({*p, t, s0, 0, 0});
    cross_check(0, !s0.empty());
    if (s0.empty()) return false;
    seen.emplace(*p, t, s0);

    std::vector<std::size_t> order(delta.size());
    for (std::size_t v = 0; v < order.size(); ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return delta.agents[a] < delta.agents[b]; });

    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const BruteNode cur = nodes[k];
        for (std::size_t v : order) {
            if (v == cur.vertex || delta.at(cur.vertex, v).is_pos_inf()) continue;
            const std::int64_t tau2 = clamp(cur.tau + delta.at(cur.vertex, v).value());
            Events s2 = next_set(plan, pt, cur.set, tau2, {{v, 0}});
            auto key = std::make_tuple(v, tau2, s2);
            if (!s2.empty() && seen.count(key)) continue;
            if (cur.depth + 1 > budget)
                throw BudgetInsufficient("path budget " + std::to_string(budget) + " does not close the search");
            nodes.push_back({v, tau2, s2, k, cur.depth + 1});
            cross_check(nodes.size() - 1, !s2.empty());
            if (s2.empty()) return false;
            seen.insert(std::move(key));
        }
    }
    return true;
}

std::shared_ptr<const Plan> make_plan(const TcrSpec& spec) {
    const auto report = check_solvability(spec);
    if (!report.solvable) throw NotSolvable("no protocol solves this spec in its context");
    return std::make_shared<const Plan>(spec);
}

} // namespace

ResponseRule optimal_response_rule(const TcrSpec& spec) {
    auto plan = make_plan(spec);
    return {"optimal", [plan](std::size_t a, int t, const State& s) { return optimal_decide(*plan, a, t, s); }};
}

ResponseRule bruteforce_response_rule(const TcrSpec& spec, int path_budget) {
    auto plan = make_plan(spec);
    if (path_budget <= 0 && !constraint_graph(spec.delta).edges.empty())
        throw BudgetInsufficient("a path budget of " + std::to_string(path_budget) + " cannot cover G_delta");
    return {"bruteforce", [plan, path_budget](std::size_t a, int t, const State& s) {
                return bruteforce_decide(*plan, path_budget, a, t, s);
            }};
}

ResponseRule fixed_offset_rule(const TcrSpec& spec, int lag) {
    validate_tcr(spec);
    auto ctx = index_context(spec.context);
    const std::size_t k = ctx->input(spec.trigger);
    const auto base = minimal_implementation(spec.delta);
    std::vector<std::optional<std::int64_t>> offset(ctx->agent_count());
    const auto agents = context_agents(spec);
    for (std::size_t p = 0; p < agents.size(); ++p) offset[agents[p]] = base.t[p];
    return {"fixed-offset", [ctx, k, offset, lag](std::size_t a, int t, const State& s) {
                if (!offset[a]) return false;
                for (FactKey f : s) {
                    const NdEvent e = decode_fact(*ctx, f);
                    if (e.kind == NdEvent::Kind::ExternalInput && e.input == k)
                        return t >= e.time + lag + *offset[a];
                }
                return false;
            }};
}

} // namespace tcr
