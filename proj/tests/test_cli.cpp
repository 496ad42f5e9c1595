#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "tcr/cli.hpp"
#include "tcr/errors.hpp"
#include "tcr/scenario.hpp"

using namespace tcr;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "tcr");
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

const char* kMinimal = R"({
  "context": {"agents": ["1", "2"], "channels": [{"from": "1", "to": "2", "bound": 2}], "inputs": [{"id": "e", "observer": "1"}]},
  "tcr": {"trigger": "e", "agents": ["1", "2"], "delta": [DELTA]}
})";

std::string minimal(const std::string& delta) {
    std::string s = kMinimal;
    s.replace(s.find("DELTA"), 5, delta);
    return s;
}

const std::vector<std::string> kBundled = {"acme",     "c1_gap",  "c1_neg",   "c1_zero",  "duo_gap",
                                           "duo_neg",  "duo_zero", "tri_nonsc", "tri_ring", "tri_star"};

} // namespace

TEST_SUITE("cli") {

TEST_CASE("loading the acme scenario") {
    const auto s = fixtures::scenario("acme");
    const auto cf = canonical_form(s.tcr.delta);
    CHECK(cf.dhat(0, 1) == ExtendedDelta(100));
    CHECK(cf.dhat(1, 0) == ExtendedDelta(300));
    CHECK(s.context().agents == std::vector<std::string>{"1", "2"});
    CHECK(s.schedules.count("max_delay") == 1);
}

TEST_CASE("loading edge cases") {
    const auto neg = load_scenario(minimal(R"({"from": "1", "to": "2", "value": "-inf"}, {"from": "2", "to": "1", "value": 0})"));
    CHECK(neg.tcr.delta.at(0, 1) == NEG_INF);
    CHECK_FALSE(is_implementable(neg.tcr.delta));

    const auto sparse = load_scenario(minimal(R"({"from": "1", "to": "2", "value": 3})"));
    CHECK(sparse.tcr.delta.at(1, 0) == POS_INF);
    CHECK(sparse.oracle == OracleConfig{});
    CHECK(sparse.context().shared_clock);

    std::string no_trigger = minimal("");
    no_trigger.replace(no_trigger.find(R"("trigger": "e", )"), 16, "");
    CHECK_THROWS_AS(load_scenario(no_trigger), ValidationError);

    std::string unknown = minimal("");
    unknown.replace(unknown.find(R"("trigger")"), 0, R"("colour": 1, )");
    try {
        load_scenario(unknown);
        FAIL("unknown key accepted");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("colour") != std::string::npos);
    }

    CHECK_THROWS_AS(load_scenario("{ not json"), ParseError);
    CHECK_THROWS_AS(load_scenario(minimal(R"({"from": "1", "to": "9", "value": 3})")), ValidationError);

    std::string bad_bound = minimal("");
    bad_bound.replace(bad_bound.find(R"("bound": 2)"), 10, R"("bound": 0)");
    CHECK_THROWS_AS(load_scenario(bad_bound), ValidationError);
}

TEST_CASE("bundled scenarios round-trip byte for byte") {
    for (const auto& name : kBundled) {
        CAPTURE(name);
        const std::string bytes = slurp(fixtures::scenario_path(name));
        const Scenario s = load_scenario(bytes);
        CHECK(serialize(s) == bytes);
        CHECK(serialize(load_scenario(serialize(s))) == serialize(s));
    }
}

TEST_CASE("serialization normalizes sparse input") {
    const auto s = load_scenario(minimal(R"({"from": "1", "to": "2", "value": 3})"));
    const std::string once = serialize(s);
    CHECK(once.find("\"oracle\"") != std::string::npos);
    CHECK(once.find("\"shared_clock\": true") != std::string::npos);
    CHECK(serialize(load_scenario(once)) == once);
}

TEST_CASE("command examples") {
    const auto canon = run({"canon", fixtures::scenario_path("acme")});
    CHECK(canon.code == 0);
    CHECK(canon.out == "      1   2\n  1   0 100\n  2 300   0\n");

    const auto bound = run({"bound", fixtures::scenario_path("c1_zero")});
    CHECK(bound.code == 0);
    CHECK(bound.out == "2\n");

    const auto eq = run({"oracle-equiv", fixtures::scenario_path("c1_gap")});
    CHECK(eq.code == 0);
    CHECK(eq.out.find("AGREE on all guarded points") != std::string::npos);
}

TEST_CASE("verdict commands and exit codes") {
    CHECK(run({"implementable", fixtures::scenario_path("acme")}).out == "implementable: yes\n");
    CHECK(run({"min-impl", fixtures::scenario_path("acme")}).out == "1 0\n2 0\n");
    CHECK(run({"min-impl", fixtures::scenario_path("c1_neg")}).out == "1 1\n2 0\n");
    CHECK(run({"solvable", fixtures::scenario_path("c1_zero")}).code == 0);

    const auto tmp = std::filesystem::temp_directory_path() / "tcr_cli_unimpl.json";
    {
        std::ofstream f(tmp);
        f << minimal(R"({"from": "1", "to": "2", "value": -2}, {"from": "2", "to": "1", "value": 1})");
    }
    const auto no = run({"implementable", tmp.string()});
    CHECK(no.code == 1);
    CHECK(no.out == "implementable: no\n");
    CHECK(run({"min-impl", tmp.string()}).code == 1);
    CHECK(run({"solvable", tmp.string()}).code == 2);
    std::filesystem::remove(tmp);
}

TEST_CASE("usage and input errors exit with 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"canon"}).code == 2);
    const auto missing = run({"canon", "/nonexistent/x.json"});
    CHECK(missing.code == 2);
    CHECK(missing.err.rfind("error: ", 0) == 0);
    CHECK(run({"simulate", fixtures::scenario_path("c1_gap")}).code == 2);
    CHECK(run({"simulate", fixtures::scenario_path("c1_gap"), "--schedule", "nope"}).code == 2);
    CHECK(run({"simulate", fixtures::scenario_path("c1_gap"), "--schedule", "early", "--rule", "magic"}).code == 2);
    CHECK(run({"detect", fixtures::scenario_path("c1_gap"), "--schedule", "early", "--structure", "broom"}).code == 2);
    CHECK(run({"bound", fixtures::scenario_path("c1_gap")}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("simulate prints the trace of the chosen rule") {
    const auto opt = run({"simulate", fixtures::scenario_path("c1_gap"), "--schedule", "max_delay", "--horizon", "3"});
    CHECK(opt.code == 0);
    CHECK(opt.out.find("t=1 agent 1 new={} respond=yes") != std::string::npos);
    CHECK(opt.out.find("t=2 agent 2 new={e@0} respond=yes") != std::string::npos);
    const auto brute = run({"simulate", fixtures::scenario_path("c1_gap"), "--schedule", "max_delay", "--horizon", "3",
                            "--rule", "bruteforce"});
    CHECK(brute.out == opt.out);
    const auto none = run({"simulate", fixtures::scenario_path("c1_gap"), "--schedule", "max_delay", "--rule", "none"});
    CHECK(none.out.find("respond=yes") == std::string::npos);
}

TEST_CASE("detect finds structures and writes diagrams") {
    const std::string c1 = fixtures::scenario_path("c1_gap");
    const auto broom = run({"detect", c1, "--schedule", "max_delay", "--structure", "broom", "--times", "1=2,2=2"});
    CHECK(broom.code == 0);
    CHECK(broom.out == "brooms: e@0\n");
    CHECK(run({"detect", c1, "--schedule", "max_delay", "--structure", "broom", "--times", "1=0,2=0"}).code == 1);

    const auto dot = std::filesystem::temp_directory_path() / "tcr_cli_centipede.dot";
    const auto cent = run({"detect", c1, "--schedule", "max_delay", "--structure", "centipede", "--path", "1,2", "--t",
                           "1", "--dot", dot.string()});
    CHECK(cent.code == 0);
    CHECK(cent.out == "centipede: e@0 e@0\n");
    const std::string diagram = slurp(dot.string());
    CHECK(diagram.find("label=\"centipede\"") != std::string::npos);
    CHECK(diagram.find("\"2@2\" [shape=doublecircle]") != std::string::npos);
    std::filesystem::remove(dot);

    const auto miss = run({"detect", c1, "--schedule", "max_delay", "--structure", "centipede", "--path", "1,2"});
    CHECK(miss.code == 1);
    CHECK(miss.out == "centipede: none\n");

    const auto cb = run({"detect", c1, "--schedule", "max_delay", "--structure", "centibroom", "--groups", "1;2",
                         "--times", "1=0,2=2"});
    CHECK(cb.code == 0);
    CHECK(cb.out == "centibroom: e@0 e@0\n");
    CHECK(run({"detect", c1, "--schedule", "max_delay", "--structure", "centibroom", "--groups", "1;2", "--times",
               "1=0"})
              .code == 2);
}

TEST_CASE("reports are byte-stable") {
    for (const auto& name : kBundled) {
        for (const std::string cmd : {"canon", "implementable", "min-impl", "solvable"}) {
            const auto a = run({cmd, fixtures::scenario_path(name)});
            const auto b = run({cmd, fixtures::scenario_path(name)});
            CHECK(a.out == b.out);
            CHECK(a.code == b.code);
        }
    }
    const auto x = run({"oracle-equiv", fixtures::scenario_path("duo_zero"), "--per-point"});
    const auto y = run({"oracle-equiv", fixtures::scenario_path("duo_zero"), "--per-point"});
    CHECK(x.out == y.out);
}

TEST_CASE("selftest passes") {
    const auto r = run({"selftest"});
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
}

}
