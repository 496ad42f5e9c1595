#pragma once

#include <string>
#include <vector>

#include "tcr/coordination.hpp"
#include "tcr/scenario.hpp"

namespace fixtures {

inline tcr::Context make_context(std::vector<std::string> agents, std::vector<tcr::Channel> channels,
                                 std::string observer = "1") {
    tcr::Context c;
    c.agents = std::move(agents);
    c.channels = std::move(channels);
    c.inputs = {{"e", std::move(observer)}};
    return c;
}

// Two agents, 1->2 bound 2, 2->1 bound 3, trigger e at 1.
inline tcr::Context c1() { return make_context({"1", "2"}, {{"1", "2", 2}, {"2", "1", 3}}); }

inline tcr::ImplementationSpec spec(std::vector<std::string> agents,
                                    std::vector<std::tuple<std::string, std::string, tcr::ExtendedDelta>> entries) {
    tcr::ImplementationSpec s(std::move(agents));
    for (const auto& [i, j, v] : entries) s.set(i, j, v);
    return s;
}

inline tcr::ImplementationSpec all_zero(const std::vector<std::string>& agents) {
    tcr::ImplementationSpec s(agents);
    for (const auto& i : agents)
        for (const auto& j : agents)
            if (i != j) s.set(i, j, 0);
    return s;
}

inline tcr::TcrSpec tcr_spec(tcr::Context ctx, tcr::ImplementationSpec delta) {
    return tcr::TcrSpec{std::move(ctx), "e", delta.agents, delta};
}

inline std::string scenario_path(const std::string& name) {
    return std::string(TCR_SCENARIO_DIR) + "/" + name + ".json";
}

inline tcr::Scenario scenario(const std::string& name) { return tcr::load_scenario_file(scenario_path(name)); }

} // namespace fixtures
