#include "tcr/context.hpp"

#include <algorithm>
#include <set>

#include "tcr/errors.hpp"

namespace tcr {

std::optional<std::size_t> Context::agent_index(const std::string& id) const {
    auto it = std::find(agents.begin(), agents.end(), id);
    if (it == agents.end()) return std::nullopt;
    return static_cast<std::size_t>(it - agents.begin());
}

std::optional<std::size_t> Context::input_index(const std::string& id) const {
    for (std::size_t k = 0; k < inputs.size(); ++k)
        if (inputs[k].id == id) return k;
    return std::nullopt;
}

std::string to_string(Diagnostic::Kind kind) {
    switch (kind) {
    case Diagnostic::Kind::NonPositiveBound: return "NonPositiveBound";
    case Diagnostic::Kind::UnknownObserver: return "UnknownObserver";
    case Diagnostic::Kind::UnknownAgent: return "UnknownAgent";
    case Diagnostic::Kind::SelfChannel: return "SelfChannel";
    case Diagnostic::Kind::DuplicateChannel: return "DuplicateChannel";
    case Diagnostic::Kind::DuplicateAgent: return "DuplicateAgent";
    case Diagnostic::Kind::DuplicateInput: return "DuplicateInput";
    }
    return "?";
}

std::vector<Diagnostic> validate_context(const Context& ctx) {
    using K = Diagnostic::Kind;
    std::vector<Diagnostic> out;
    std::set<std::string> seen;
    for (const auto& a : ctx.agents)
        if (!seen.insert(a).second) out.push_back({K::DuplicateAgent, "agent '" + a + "' declared twice"});

    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& c : ctx.channels) {
        const std::string name = c.from + "->" + c.to;
        if (!seen.count(c.from) || !seen.count(c.to))
            out.push_back({K::UnknownAgent, "channel " + name + " names an undeclared agent"});
        if (c.from == c.to) out.push_back({K::SelfChannel, "channel " + name + " is a self-channel"});
        if (!c.bound.is_pos_inf() && (!c.bound.is_finite() || c.bound.value() < 1))
            out.push_back({K::NonPositiveBound, "channel " + name + " has bound " + c.bound.to_string()});
        if (!pairs.insert({c.from, c.to}).second)
            out.push_back({K::DuplicateChannel, "channel " + name + " declared twice"});
    }

    std::set<std::string> input_ids;
    for (const auto& e : ctx.inputs) {
        if (!input_ids.insert(e.id).second)
            out.push_back({K::DuplicateInput, "input '" + e.id + "' declared twice"});
        if (!seen.count(e.observer))
            out.push_back({K::UnknownObserver, "input '" + e.id + "' observed by undeclared agent '" +
                                                   e.observer + "'"});
    }
    return out;
}

namespace {

void require_valid(const Context& ctx) {
    auto diags = validate_context(ctx);
    if (diags.empty()) return;
    std::string msg = "invalid context:";
    for (const auto& d : diags) msg += " [" + to_string(d.kind) + "] " + d.message + ";";
    throw InvalidContext(msg);
}

} // namespace

CommDistance comm_distance(const Context& ctx) {
    ContextIndex idx(ctx);
    const std::size_t n = ctx.agents.size();
    CommDistance cd{ctx.agents, SquareMatrix<ExtendedDelta>(n, POS_INF)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (idx.dist(i, j) >= 0) cd.dist(i, j) = idx.dist(i, j);
    return cd;
}

ContextIndex::ContextIndex(Context ctx) : ctx_(std::move(ctx)) {
    require_valid(ctx_);
    const std::size_t n = ctx_.agents.size();
    incoming_.assign(n, {});
    for (const auto& c : ctx_.channels) {
        Link l{*ctx_.agent_index(c.from), *ctx_.agent_index(c.to),
               c.bound.is_finite() ? static_cast<int>(c.bound.value()) : -1};
        incoming_[l.to].push_back(links_.size());
        links_.push_back(l);
    }
    for (const auto& e : ctx_.inputs) observers_.push_back(*ctx_.agent_index(e.observer));

    // Floyd-Warshall on finite bounds; plain closure for reachability.
    dist_ = SquareMatrix<int>(n, -1);
    reach_ = SquareMatrix<char>(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        dist_(i, i) = 0;
        reach_(i, i) = 1;
    }
    for (const auto& l : links_) {
        reach_(l.from, l.to) = 1;
        if (l.bound >= 0 && (dist_(l.from, l.to) < 0 || l.bound < dist_(l.from, l.to)))
            dist_(l.from, l.to) = l.bound;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (reach_(i, k) && reach_(k, j)) reach_(i, j) = 1;
                if (dist_(i, k) >= 0 && dist_(k, j) >= 0) {
                    const int via = dist_(i, k) + dist_(k, j);
                    if (dist_(i, j) < 0 || via < dist_(i, j)) dist_(i, j) = via;
                }
            }
}

std::size_t ContextIndex::agent(const std::string& id) const {
    auto a = ctx_.agent_index(id);
    if (!a) throw InvalidContext("unknown agent '" + id + "'");
    return *a;
}

std::size_t ContextIndex::input(const std::string& id) const {
    auto e = ctx_.input_index(id);
    if (!e) throw InvalidContext("unknown external input '" + id + "'");
    return *e;
}

std::optional<std::size_t> ContextIndex::link(std::size_t from, std::size_t to) const {
    for (std::size_t k = 0; k < links_.size(); ++k)
        if (links_[k].from == from && links_[k].to == to) return k;
    return std::nullopt;
}

ContextRef index_context(const Context& ctx) { return std::make_shared<const ContextIndex>(ctx); }

} // namespace tcr
