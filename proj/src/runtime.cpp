#include "tcr/runtime.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "tcr/errors.hpp"

namespace tcr {

namespace {

constexpr std::uint64_t kDeliveryBit = std::uint64_t{1} << 63;

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

} // namespace

FactKey input_fact(std::size_t input, int time) {
    return (static_cast<std::uint64_t>(input) << 32) | static_cast<std::uint32_t>(time);
}

FactKey delivery_fact(std::size_t link, int send_time, int time) {
    return kDeliveryBit | (static_cast<std::uint64_t>(link) << 40) |
           (static_cast<std::uint64_t>(send_time) << 20) | static_cast<std::uint64_t>(time);
}

std::uint64_t NdEvent::key() const {
    return kind == Kind::ExternalInput ? input_fact(input, time) : delivery_fact(link, send_time, time);
}

NdEvent decode_fact(const ContextIndex& ctx, FactKey key) {
    NdEvent e;
    if (key & kDeliveryBit) {
        e.kind = NdEvent::Kind::EarlyDelivery;
        e.link = static_cast<std::size_t>((key & ~kDeliveryBit) >> 40);
        e.send_time = static_cast<int>((key >> 20) & 0xFFFFF);
        e.time = static_cast<int>(key & 0xFFFFF);
        e.observer = ctx.links()[e.link].to;
    } else {
        e.kind = NdEvent::Kind::ExternalInput;
        e.input = static_cast<std::size_t>(key >> 32);
        e.time = static_cast<int>(key & 0xFFFFFFFF);
        e.observer = ctx.observer(e.input);
    }
    return e;
}

std::string describe(const ContextIndex& ctx, const NdEvent& e) {
    if (e.kind == NdEvent::Kind::ExternalInput)
        return ctx.context().inputs[e.input].id + "@" + std::to_string(e.time);
    const auto& l = ctx.links()[e.link];
    return ctx.agent_id(l.from) + "->" + ctx.agent_id(l.to) + ":" + std::to_string(e.send_time) + "@" +
           std::to_string(e.time);
}

ResponseRule never_respond() {
    return {"none", [](std::size_t, int, const State&) { return false; }};
}

Run simulate(const Context& ctx, const ResponseRule& rule, const NdSchedule& sched, int horizon) {
    return simulate(index_context(ctx), rule, sched, horizon);
}

namespace {

// Builds the timeline and states; responses are left empty.
Run build_run(ContextRef ctxp, const NdSchedule& sched, int horizon) {
    if (horizon < 0) throw ScheduleViolation("negative horizon");
    const ContextIndex& ctx = *ctxp;
    const std::size_t n = ctx.agent_count();
    const auto& links = ctx.links();

    Run run;
    run.ctx = ctxp;
    run.schedule = sched;
    run.horizon = horizon;
    run.input_time.assign(ctx.input_count(), kNever);
    for (const auto& [id, t] : sched.input_times) {
        auto k = ctx.context().input_index(id);
        if (!k) throw ScheduleViolation("schedule names unknown input '" + id + "'");
        if (t < 0) throw ScheduleViolation("input '" + id + "' scheduled at negative time");
        run.input_time[*k] = t > horizon ? kNever : t;
    }

    run.delivery.assign(links.size(), std::vector<int>(horizon + 1, kPending));
    for (std::size_t l = 0; l < links.size(); ++l)
        for (int s = 0; s <= horizon; ++s)
            if (links[l].bound >= 0 && s + links[l].bound <= horizon) run.delivery[l][s] = s + links[l].bound;
    for (const auto& [msg, d] : sched.delays) {
        auto from = ctx.context().agent_index(msg.sender);
        auto to = ctx.context().agent_index(msg.recipient);
        std::optional<std::size_t> l;
        if (from && to) l = ctx.link(*from, *to);
        if (!l) throw ScheduleViolation("schedule delays a message on a missing channel " + msg.sender + "->" +
                                        msg.recipient);
        const int b = links[*l].bound;
        if (d < 1 || (b >= 0 && d > b))
            throw ScheduleViolation("delay " + std::to_string(d) + " outside 1.." +
                                    (b >= 0 ? std::to_string(b) : std::string("inf")) + " on " + msg.sender +
                                    "->" + msg.recipient);
        if (msg.send_time < 0) throw ScheduleViolation("negative send time");
        if (msg.send_time > horizon) continue;
        run.delivery[*l][msg.send_time] = msg.send_time + d <= horizon ? msg.send_time + d : kPending;
    }

    for (std::size_t k = 0; k < ctx.input_count(); ++k)
        if (run.input_time[k] != kNever)
            run.events.push_back({NdEvent::Kind::ExternalInput, k, 0, 0, run.input_time[k], ctx.observer(k)});
    for (std::size_t l = 0; l < links.size(); ++l)
        for (int s = 0; s <= horizon; ++s) {
            const int at = run.delivery[l][s];
            if (at == kPending) continue;
            if (links[l].bound < 0 || at - s < links[l].bound)
                run.events.push_back({NdEvent::Kind::EarlyDelivery, 0, l, s, at, links[l].to});
        }
    std::sort(run.events.begin(), run.events.end(), [](const NdEvent& a, const NdEvent& b) {
        return a.time != b.time ? a.time < b.time : a.key() < b.key();
    });

    run.states.assign(n, std::vector<State>(horizon + 1));
    for (int t = 0; t <= horizon; ++t) {
        for (std::size_t a = 0; a < n; ++a) {
            std::vector<FactKey> add;
            for (std::size_t k = 0; k < ctx.input_count(); ++k)
                if (run.input_time[k] == t && ctx.observer(k) == a) add.push_back(input_fact(k, t));
            State acc = t > 0 ? run.states[a][t - 1] : State{};
            for (std::size_t l : ctx.incoming(a)) {
                for (int s = 0; s < t; ++s) {
                    if (run.delivery[l][s] != t) continue;
                    if (links[l].bound < 0 || t - s < links[l].bound) add.push_back(delivery_fact(l, s, t));
                    const State& payload = run.states[links[l].from][s];
                    State merged;
                    merged.reserve(acc.size() + payload.size());
                    std::set_union(acc.begin(), acc.end(), payload.begin(), payload.end(),
                                   std::back_inserter(merged));
                    acc.swap(merged);
                }
            }
            std::sort(add.begin(), add.end());
            State merged;
            std::set_union(acc.begin(), acc.end(), add.begin(), add.end(), std::back_inserter(merged));
            run.states[a][t] = std::move(merged);
        }
    }
    run.response.assign(n, std::nullopt);
    return run;
}

} // namespace

bool RuleCache::decide(std::size_t agent, int t, const State& s) {
    auto key = std::make_tuple(agent, t, s);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const bool v = rule_.decide(agent, t, s);
    memo_.emplace(std::move(key), v);
    return v;
}

void apply_rule(Run& run, RuleCache& cache) {
    for (std::size_t a = 0; a < run.states.size(); ++a) {
        run.response[a].reset();
        for (int t = 0; t <= run.horizon; ++t)
            if (cache.decide(a, t, run.states[a][t])) {
                run.response[a] = t;
                break;
            }
    }
}

void apply_rule(std::vector<Run>& runs, const ResponseRule& rule) {
    RuleCache cache(rule);
    for (auto& r : runs) apply_rule(r, cache);
}

Run simulate(ContextRef ctx, const ResponseRule& rule, const NdSchedule& sched, int horizon) {
    Run run = build_run(std::move(ctx), sched, horizon);
    RuleCache cache(rule);
    apply_rule(run, cache);
    return run;
}

std::vector<NdEvent> nd_events(const Run& run) { return run.events; }

namespace {

struct Choice {
    std::size_t link;
    int send;
    std::vector<int> delays; // 0 stands for the default completion
};

std::vector<Choice> message_choices(const ContextIndex& ctx, int horizon) {
    std::vector<Choice> out;
    const auto& links = ctx.links();
    for (std::size_t l = 0; l < links.size(); ++l)
        for (int s = 0; s < horizon; ++s) {
            Choice c{l, s, {0}};
            const int room = horizon - s;
            const int early_max = links[l].bound < 0 ? room : std::min(links[l].bound - 1, room);
            for (int d = 1; d <= early_max; ++d) c.delays.push_back(d);
            if (c.delays.size() > 1) out.push_back(std::move(c));
        }
    return out;
}

} // namespace

std::size_t count_runs(const ContextIndex& ctx, int horizon) {
    std::uint64_t total = 1;
    for (std::size_t k = 0; k < ctx.input_count(); ++k)
        total = sat_mul(total, static_cast<std::uint64_t>(horizon) + 2);
    for (const auto& c : message_choices(ctx, horizon)) total = sat_mul(total, c.delays.size());
    return static_cast<std::size_t>(std::min<std::uint64_t>(total, std::numeric_limits<std::size_t>::max()));
}

std::vector<Run> enumerate_runs(ContextRef ctx, const ResponseRule& rule, int horizon, EnumerationCaps caps) {
    const std::size_t total = count_runs(*ctx, horizon);
    if (total > caps.max_runs) throw CapExceeded(total, caps.max_runs);

    const auto choices = message_choices(*ctx, horizon);
    const std::size_t inputs = ctx->input_count();
    std::vector<std::size_t> radix;
    for (std::size_t k = 0; k < inputs; ++k) radix.push_back(static_cast<std::size_t>(horizon) + 2);
    for (const auto& c : choices) radix.push_back(c.delays.size());

    RuleCache cache(rule);
    std::vector<Run> runs;
    runs.reserve(total);
    std::set<std::pair<std::vector<int>, std::vector<std::vector<int>>>> seen;
    std::vector<std::size_t> digit(radix.size(), 0);
    for (std::size_t count = 0; count < total; ++count) {
        NdSchedule sched;
        for (std::size_t k = 0; k < inputs; ++k)
            if (digit[k] > 0) sched.input_times[ctx->context().inputs[k].id] = static_cast<int>(digit[k]) - 1;
        for (std::size_t c = 0; c < choices.size(); ++c) {
            const int d = choices[c].delays[digit[inputs + c]];
            if (d == 0) continue;
            const auto& l = ctx->links()[choices[c].link];
            sched.delays[{ctx->agent_id(l.from), choices[c].send, ctx->agent_id(l.to)}] = d;
        }
        Run run = build_run(ctx, sched, horizon);
        // Distinct schedules give distinct timelines; the check guards that claim.
        if (seen.emplace(run.input_time, run.delivery).second) {
            apply_rule(run, cache);
            runs.push_back(std::move(run));
        }
        for (std::size_t p = 0; p < digit.size(); ++p) {
            if (++digit[p] < radix[p]) break;
            digit[p] = 0;
        }
    }
    return runs;
}

std::string format_trace(const Run& run) {
    const ContextIndex& ctx = *run.ctx;
    const auto& links = ctx.links();
    std::ostringstream out;
    out << "horizon " << run.horizon << '\n';
    for (int t = 0; t <= run.horizon; ++t) {
        for (std::size_t k = 0; k < ctx.input_count(); ++k)
            if (run.input_time[k] == t)
                out << "t=" << t << " input " << ctx.context().inputs[k].id << " at "
                    << ctx.agent_id(ctx.observer(k)) << '\n';
        for (std::size_t l = 0; l < links.size(); ++l)
            for (int s = 0; s < t; ++s)
                if (run.delivery[l][s] == t) {
                    const bool early = links[l].bound < 0 || t - s < links[l].bound;
                    out << "t=" << t << " deliver " << ctx.agent_id(links[l].from) << "->"
                        << ctx.agent_id(links[l].to) << " sent=" << s << (early ? " early" : " on-time") << '\n';
                }
        for (std::size_t a = 0; a < ctx.agent_count(); ++a) {
            const State& now = run.states[a][t];
            State fresh;
            if (t == 0) {
                fresh = now;
            } else {
                const State& before = run.states[a][t - 1];
                std::set_difference(now.begin(), now.end(), before.begin(), before.end(),
                                    std::back_inserter(fresh));
            }
            out << "t=" << t << " agent " << ctx.agent_id(a) << " new={";
            for (std::size_t f = 0; f < fresh.size(); ++f)
                out << (f ? "," : "") << describe(ctx, decode_fact(ctx, fresh[f]));
            out << "} respond=" << (run.response[a] == t ? "yes" : "no") << '\n';
        }
    }
    for (std::size_t l = 0; l < links.size(); ++l)
        for (int s = 0; s <= run.horizon; ++s)
            if (run.delivery[l][s] == kPending)
                out << "pending " << ctx.agent_id(links[l].from) << "->" << ctx.agent_id(links[l].to)
                    << " sent=" << s << '\n';
    return out.str();
}

} // namespace tcr
