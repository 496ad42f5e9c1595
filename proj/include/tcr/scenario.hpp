#pragma once

#include <map>
#include <string>
#include <string_view>

#include "tcr/coordination.hpp"
#include "tcr/runtime.hpp"

namespace tcr {

struct OracleConfig {
    int horizon = 4;
    std::size_t max_runs = 5000;

    friend bool operator==(const OracleConfig&, const OracleConfig&) = default;
};

struct Scenario {
    TcrSpec tcr; // tcr.context is the scenario's context
    std::map<std::string, NdSchedule> schedules;
    OracleConfig oracle;

    const Context& context() const { return tcr.context; }
};

// Throws ParseError on malformed JSON and ValidationError listing every
// offending field path otherwise.
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);

// Normalized JSON: every field present, keys sorted, two-space indent.
std::string serialize(const Scenario& s);

} // namespace tcr
