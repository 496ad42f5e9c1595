#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tcr/context.hpp"

namespace tcr {

inline constexpr int kNever = -1;
inline constexpr int kPending = -1;

struct MessageKey {
    std::string sender;
    int send_time = 0;
    std::string recipient;

    friend auto operator<=>(const MessageKey&, const MessageKey&) = default;
};

// Input occurrence times (absent = never) and per-message delays (absent =
// the channel bound, i.e. never delivered on an unbounded channel).
struct NdSchedule {
    std::map<std::string, int> input_times;
    std::map<MessageKey, int> delays;

    friend bool operator==(const NdSchedule&, const NdSchedule&) = default;
};

struct NdEvent {
    enum class Kind : std::uint8_t { ExternalInput, EarlyDelivery };

    Kind kind = Kind::ExternalInput;
    std::size_t input = 0;    // ExternalInput
    std::size_t link = 0;     // EarlyDelivery
    int send_time = 0;        // EarlyDelivery
    int time = 0;             // occurrence (delivery) time
    std::size_t observer = 0; // input observer or message recipient

    std::uint64_t key() const;
    friend bool operator==(const NdEvent& a, const NdEvent& b) { return a.key() == b.key(); }
};

// A full-information state: the sorted keys of the ND events in the agent's
// causal past. Together with the clock and the context it determines the
// agent's entire observation history.
using FactKey = std::uint64_t;
using State = std::vector<FactKey>;

FactKey input_fact(std::size_t input, int time);
FactKey delivery_fact(std::size_t link, int send_time, int time);
NdEvent decode_fact(const ContextIndex& ctx, FactKey key);
std::string describe(const ContextIndex& ctx, const NdEvent& e);

struct ResponseRule {
    std::string name;
    // (agent, shared clock value, agent's state) -> respond now?
    std::function<bool(std::size_t, int, const State&)> decide;
};

ResponseRule never_respond();

struct Run {
    ContextRef ctx;
    NdSchedule schedule;
    int horizon = 0;
    std::vector<int> input_time;             // per input, kNever if absent
    std::vector<std::vector<int>> delivery;  // [link][send time] -> time or kPending
    std::vector<NdEvent> events;             // ND events sorted by (time, key)
    std::vector<std::vector<State>> states;  // [agent][time]
    std::vector<std::optional<int>> response;

    bool triggered_by(std::size_t input) const { return input_time[input] != kNever; }
    const State& state(std::size_t agent, int t) const { return states[agent][t]; }
};

Run simulate(ContextRef ctx, const ResponseRule& rule, const NdSchedule& sched, int horizon);
Run simulate(const Context& ctx, const ResponseRule& rule, const NdSchedule& sched, int horizon);

std::vector<NdEvent> nd_events(const Run& run);

// Memoizes rule decisions by (agent, time, state); decisions depend on nothing else.
class RuleCache {
public:
    explicit RuleCache(ResponseRule rule) : rule_(std::move(rule)) {}
    bool decide(std::size_t agent, int t, const State& s);
    const ResponseRule& rule() const { return rule_; }

private:
    ResponseRule rule_;
    std::map<std::tuple<std::size_t, int, State>, bool> memo_;
};

// Recomputes every agent's response from the recorded states.
void apply_rule(Run& run, RuleCache& cache);
void apply_rule(std::vector<Run>& runs, const ResponseRule& rule);

struct EnumerationCaps {
    std::size_t max_runs = 5000;
};

// Number of distinct runs enumerate_runs would produce (saturates at SIZE_MAX).
std::size_t count_runs(const ContextIndex& ctx, int horizon);

// All runs up to the horizon. Throws CapExceeded.
std::vector<Run> enumerate_runs(ContextRef ctx, const ResponseRule& rule, int horizon,
                                EnumerationCaps caps = {});

std::string format_trace(const Run& run);

} // namespace tcr
