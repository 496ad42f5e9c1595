#include "tcr/constraints.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <sstream>

#include "tcr/errors.hpp"

namespace tcr {

ImplementationSpec::ImplementationSpec(std::vector<std::string> ids)
    : agents(std::move(ids)), delta(agents.size(), POS_INF) {
    for (std::size_t i = 0; i < agents.size(); ++i) delta(i, i) = 0;
}

std::optional<std::size_t> ImplementationSpec::index_of(const std::string& id) const {
    auto it = std::find(agents.begin(), agents.end(), id);
    if (it == agents.end()) return std::nullopt;
    return static_cast<std::size_t>(it - agents.begin());
}

void ImplementationSpec::set(const std::string& i, const std::string& j, ExtendedDelta v) {
    auto a = index_of(i);
    auto b = index_of(j);
    if (!a || !b) throw AgentMismatch("unknown agent in constraint " + i + "->" + j);
    if (*a == *b) throw AgentMismatch("constraint on identical agents " + i);
    delta(*a, *b) = v;
}

ImplementationSpec CanonicalForm::as_spec() const {
    ImplementationSpec s(agents);
    for (std::size_t i = 0; i < agents.size(); ++i)
        for (std::size_t j = 0; j < agents.size(); ++j)
            if (i != j) s.delta(i, j) = dhat(i, j);
    return s;
}

ConstraintGraph constraint_graph(const ImplementationSpec& spec) {
    ConstraintGraph g{spec.agents, {}};
    for (std::size_t i = 0; i < spec.size(); ++i)
        for (std::size_t j = 0; j < spec.size(); ++j)
            if (i != j && !spec.at(i, j).is_pos_inf()) g.edges.push_back({i, j, spec.at(i, j)});
    return g;
}

namespace {

// Single-source distances: relaxation rounds, then every vertex reachable
// from a still-relaxable edge or a -inf value is set to -inf.
std::vector<ExtendedDelta> distances_from(std::size_t src, std::size_t n,
                                          const std::vector<ConstraintEdge>& edges) {
    std::vector<ExtendedDelta> d(n, POS_INF);
    d[src] = 0;
    for (std::size_t round = 0; round < n; ++round) {
        bool changed = false;
        for (const auto& e : edges) {
            if (d[e.from].is_pos_inf()) continue;
            ExtendedDelta cand = d[e.from] + e.weight;
            if (cand < d[e.to]) {
                d[e.to] = cand;
                changed = true;
            }
        }
        if (!changed) break;
    }

    std::vector<char> unbounded(n, 0);
    std::deque<std::size_t> queue;
    auto mark = [&](std::size_t v) {
        if (!unbounded[v]) {
            unbounded[v] = 1;
            queue.push_back(v);
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (d[v].is_neg_inf()) mark(v);
    for (const auto& e : edges)
        if (!d[e.from].is_pos_inf() && d[e.from] + e.weight < d[e.to]) mark(e.to);
    while (!queue.empty()) {
        std::size_t u = queue.front();
        queue.pop_front();
        for (const auto& e : edges)
            if (e.from == u) mark(e.to);
    }
    for (std::size_t v = 0; v < n; ++v)
        if (unbounded[v]) d[v] = NEG_INF;
    return d;
}

} // namespace

CanonicalForm canonical_form(const ImplementationSpec& spec) {
    const std::size_t n = spec.size();
    const auto edges = constraint_graph(spec).edges;
    CanonicalForm cf{spec.agents, SquareMatrix<ExtendedDelta>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        auto row = distances_from(i, n, edges);
        for (std::size_t j = 0; j < n; ++j) cf.dhat(i, j) = row[j];
    }
    return cf;
}

bool is_implementable(const ImplementationSpec& spec) {
    const auto cf = canonical_form(spec);
    for (std::size_t i = 0; i < spec.size(); ++i)
        for (std::size_t j = 0; j < spec.size(); ++j)
            if (cf.dhat(i, j).is_neg_inf()) return false;
    return true;
}

ExtendedDelta row_min(const CanonicalForm& cf, std::size_t i) {
    ExtendedDelta m = POS_INF;
    for (std::size_t j = 0; j < cf.agents.size(); ++j) m = min(m, cf.dhat(i, j));
    return m;
}

TimeAssignment minimal_implementation(const ImplementationSpec& spec) {
    if (!is_implementable(spec)) throw NotImplementable("constraints admit no implementation");
    const auto cf = canonical_form(spec);
    TimeAssignment t{spec.agents, std::vector<std::int64_t>(spec.size(), 0)};
    for (std::size_t i = 0; i < spec.size(); ++i) t.t[i] = -row_min(cf, i).value();
    return t;
}

bool verify_implementation(const ImplementationSpec& spec, const TimeAssignment& t) {
    if (t.agents != spec.agents || t.t.size() != spec.size())
        throw AgentMismatch("time assignment is not over the agents of the spec");
    for (std::size_t i = 0; i < spec.size(); ++i) {
        for (std::size_t j = 0; j < spec.size(); ++j) {
            if (i == j) continue;
            const ExtendedDelta d = spec.at(i, j);
            if (d.is_pos_inf()) continue;
            if (d.is_neg_inf()) return false;
            if (t.t[j] > t.t[i] + d.value()) return false;
        }
    }
    return true;
}

TimeAssignment extremal_implementation(const ImplementationSpec& spec, std::size_t i,
                                       std::size_t j, std::int64_t k) {
    const std::size_t n = spec.size();
    if (i >= n || j >= n || i == j) throw std::invalid_argument("extremal_implementation needs i != j");
    if (!is_implementable(spec)) throw NotImplementable("constraints admit no implementation");

    // Every unconstrained pair gets one common slack value, large enough that
    // no path through it undercuts a finite distance or creates a negative
    // cycle, and that any path through it is at least k long.
    std::int64_t w = 1;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b && spec.at(a, b).is_finite()) w = std::max<std::int64_t>(w, std::llabs(spec.at(a, b).value()));
    const std::int64_t slack = std::llabs(k) + 2 * static_cast<std::int64_t>(n) * w + 1;

    ImplementationSpec closed = spec;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b && closed.at(a, b).is_pos_inf()) closed.set(a, b, slack);
    const auto cf = canonical_form(closed);

    TimeAssignment t{spec.agents, std::vector<std::int64_t>(n, 0)};
    for (std::size_t v = 0; v < n; ++v) t.t[v] = cf.dhat(i, v).value();
    const std::int64_t lo = *std::min_element(t.t.begin(), t.t.end());
    for (auto& x : t.t) x -= lo;
    return t;
}

std::string format_matrix(const std::vector<std::string>& agents,
                          const SquareMatrix<ExtendedDelta>& m) {
    std::size_t width = 1;
    for (const auto& a : agents) width = std::max(width, a.size());
    for (std::size_t i = 0; i < agents.size(); ++i)
        for (std::size_t j = 0; j < agents.size(); ++j) width = std::max(width, m(i, j).to_string().size());

    auto pad = [&](const std::string& s) { return std::string(width - s.size(), ' ') + s; };
    std::ostringstream out;
    out << pad("");
    for (const auto& a : agents) out << ' ' << pad(a);
    out << '\n';
    for (std::size_t i = 0; i < agents.size(); ++i) {
        out << pad(agents[i]);
        for (std::size_t j = 0; j < agents.size(); ++j) out << ' ' << pad(m(i, j).to_string());
        out << '\n';
    }
    return out.str();
}

} // namespace tcr
