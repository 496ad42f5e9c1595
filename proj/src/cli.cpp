#include "tcr/cli.hpp"

#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "tcr/coordination.hpp"
#include "tcr/errors.hpp"
#include "tcr/oracle.hpp"
#include "tcr/scenario.hpp"
#include "tcr/selftest.hpp"
#include "tcr/syncausality.hpp"

namespace tcr {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

// "1=2,2=5" -> per context agent; unlisted agents get -1.
std::vector<int> parse_times(const ContextIndex& ctx, const std::string& text, std::vector<std::size_t>& listed) {
    std::vector<int> times(ctx.agent_count(), -1);
    for (const auto& item : split(text, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ValidationError("--times expects agent=time pairs, got '" + item + "'");
        const std::size_t a = ctx.agent(item.substr(0, eq));
        times[a] = std::stoi(item.substr(eq + 1));
        listed.push_back(a);
    }
    return times;
}

ResponseRule pick_rule(const std::string& name, const TcrSpec& spec, int budget) {
    if (name == "optimal") return optimal_response_rule(spec);
    if (name == "bruteforce") return bruteforce_response_rule(spec, budget);
    return never_respond();
}

const NdSchedule& schedule_named(const Scenario& s, const std::string& name) {
    auto it = s.schedules.find(name);
    if (it == s.schedules.end()) throw ValidationError("no schedule named '" + name + "'");
    return it->second;
}

std::string events_text(const ContextIndex& ctx, const std::vector<FactKey>& events) {
    std::string out;
    for (FactKey k : events) out += (out.empty() ? "" : " ") + describe(ctx, decode_fact(ctx, k));
    return out;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + path);
    f << body;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Timely-coordinated response toolkit", args.empty() ? "tcr" : args[0]};
    app.require_subcommand(1);

    std::string file;
    auto add_file = [&](CLI::App* sub) { sub->add_option("scenario", file, "scenario JSON file")->required(); };

    auto* canon = app.add_subcommand("canon", "print the canonical form of delta");
    auto* impl = app.add_subcommand("implementable", "decide whether delta has an implementation");
    auto* minimpl = app.add_subcommand("min-impl", "print the minimal implementation");
    auto* solv = app.add_subcommand("solvable", "solvability report");
    auto* bound = app.add_subcommand("bound", "worst-case latest response after the trigger");
    auto* sim = app.add_subcommand("simulate", "simulate one schedule and print its trace");
    auto* detect = app.add_subcommand("detect", "find a syncausal structure in one run");
    auto* oracle = app.add_subcommand("oracle-equiv", "compare the optimal rule with the knowledge fixpoint");
    auto* self = app.add_subcommand("selftest", "run the built-in property checks");
    for (auto* s : {canon, impl, minimpl, solv, bound, sim, detect, oracle}) add_file(s);

    std::string schedule, rule = "optimal", structure, times_text, path_text, groups_text, dot_file;
    std::optional<int> horizon;
    int budget = 64, t_start = 0;
    bool per_point = false;
    for (auto* s : {sim, detect}) {
        s->add_option("--schedule", schedule, "schedule name")->required();
        s->add_option("--horizon", horizon, "last simulated time");
    }
    sim->add_option("--rule", rule, "response rule")->check(CLI::IsMember({"optimal", "bruteforce", "none"}));
    sim->add_option("--budget", budget, "path budget of the brute-force rule");
    detect->add_option("--structure", structure, "structure kind")
        ->required()
        ->check(CLI::IsMember({"broom", "centipede", "centibroom"}));
    detect->add_option("--times", times_text, "end times, e.g. 1=2,2=2");
    detect->add_option("--path", path_text, "agent path for centipedes, e.g. 1,2");
    detect->add_option("--t", t_start, "start time for centipedes");
    detect->add_option("--groups", groups_text, "agent groups for centibrooms, e.g. 1;2,3");
    detect->add_option("--dot", dot_file, "write a DOT diagram of the run");
    oracle->add_option("--horizon", horizon, "enumeration horizon");
    oracle->add_flag("--per-point", per_point, "print every guarded point");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("tcr");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (self->parsed()) return selftest(out) ? 0 : 1;

        const Scenario sc = load_scenario_file(file);
        const TcrSpec& spec = sc.tcr;
        const auto& agents = spec.agents;

        if (canon->parsed()) {
            out << format_matrix(agents, canonical_form(spec.delta).dhat);
            return 0;
        }
        if (impl->parsed()) {
            const bool ok = is_implementable(spec.delta);
            out << "implementable: " << (ok ? "yes" : "no") << '\n';
            return ok ? 0 : 1;
        }
        if (minimpl->parsed()) {
            if (!is_implementable(spec.delta)) {
                out << "not implementable\n";
                return 1;
            }
            const auto t = minimal_implementation(spec.delta);
            for (std::size_t i = 0; i < agents.size(); ++i) out << agents[i] << ' ' << t.t[i] << '\n';
            return 0;
        }
        if (solv->parsed()) {
            const auto rep = check_solvability(spec);
            out << format_report(rep);
            return rep.solvable ? 0 : 1;
        }
        if (bound->parsed()) {
            out << worst_case_latest_response(spec).to_string() << '\n';
            return 0;
        }
        if (oracle->parsed()) {
            const auto rep = oracle_equivalence(sc, horizon);
            out << format_oracle(rep, per_point);
            return rep.all_agree ? 0 : 1;
        }

        const int T = horizon ? *horizon : sc.oracle.horizon;
        auto ctx = index_context(spec.context);
        if (sim->parsed()) {
            const Run run = simulate(ctx, pick_rule(rule, spec, budget), schedule_named(sc, schedule), T);
            out << format_trace(run);
            return 0;
        }

        // detect
        const Run run = simulate(ctx, never_respond(), schedule_named(sc, schedule), T);
        DotHighlight hl;
        hl.label = structure;
        bool found = false;
        if (structure == "broom") {
            std::vector<std::size_t> listed;
            const auto times = parse_times(*ctx, times_text, listed);
            if (listed.empty()) throw ValidationError("--times is required for brooms");
            std::vector<int> per;
            for (std::size_t a : listed) {
                per.push_back(times[a]);
                hl.targets.push_back({a, times[a]});
            }
            const auto b = find_brooms(run, spec.trigger, listed, per);
            for (const auto& e : b) hl.events.push_back(e.key());
            found = !b.empty();
            out << "brooms: " << (found ? events_text(*ctx, hl.events) : "none") << '\n';
        } else if (structure == "centipede") {
            const auto path = split(path_text, ',');
            if (path.empty()) throw ValidationError("--path is required for centipedes");
            const auto res = has_path_traversing_centipede(run, spec.trigger, path, spec.delta, t_start);
            if (res.events) {
                found = true;
                hl.events = *res.events;
                ExtendedDelta tau = t_start;
                for (std::size_t m = 0; m < path.size(); ++m) {
                    if (m > 0) tau += spec.delta.at(*spec.delta.index_of(path[m - 1]), *spec.delta.index_of(path[m]));
                    hl.targets.push_back({ctx->agent(path[m]), static_cast<int>(tau.value())});
                }
                out << "centipede: " << events_text(*ctx, hl.events) << '\n';
            } else {
                out << "centipede: none" << (res.horizon_clipped ? " (horizon clipped)" : "") << '\n';
            }
        } else {
            std::vector<std::size_t> listed;
            const auto times = parse_times(*ctx, times_text, listed);
            std::vector<std::vector<std::size_t>> groups;
            for (const auto& g : split(groups_text, ';')) {
                groups.emplace_back();
                for (const auto& id : split(g, ',')) {
                    groups.back().push_back(ctx->agent(id));
                    if (times[ctx->agent(id)] < 0) throw ValidationError("no --times entry for agent " + id);
                    hl.targets.push_back({ctx->agent(id), times[ctx->agent(id)]});
                }
            }
            if (groups.empty()) throw ValidationError("--groups is required for centibrooms");
            const auto res = find_centibroom(run, spec.trigger, groups, times);
            found = res.has_value();
            if (res) hl.events = *res;
            out << "centibroom: " << (found ? events_text(*ctx, hl.events) : "none") << '\n';
        }
        if (!dot_file.empty()) write_file(dot_file, to_dot(run, hl));
        return found ? 0 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace tcr
