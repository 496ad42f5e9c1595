#include "tcr/oracle.hpp"

#include <sstream>

namespace tcr {

int oracle_guard(const TcrSpec& spec) { return default_settle(spec); }

bool cycles_all_zero(const ImplementationSpec& delta) {
    if (!is_implementable(delta)) return false;
    const auto cf = canonical_form(delta);
    for (std::size_t i = 0; i < delta.size(); ++i)
        for (std::size_t j = 0; j < delta.size(); ++j)
            if (cf.dhat(i, j).is_finite() && cf.dhat(j, i).is_finite() &&
                cf.dhat(i, j).value() + cf.dhat(j, i).value() != 0)
                return false;
    return true;
}

OracleReport oracle_equivalence(const Scenario& s, std::optional<int> horizon) {
    const TcrSpec& spec = s.tcr;
    const int T = horizon ? *horizon : s.oracle.horizon;
    auto ctx = index_context(spec.context);
    auto runs = enumerate_runs(ctx, never_respond(), T, {s.oracle.max_runs});
    apply_rule(runs, optimal_response_rule(spec));

    const PointSpace space(std::move(runs));
    const auto agents = context_agents(spec);
    const PointSet psi = occurred(space, ctx->input(spec.trigger));
    const Ensemble f = delta_common_knowledge(space, agents, spec.delta, psi);
    const Ensemble kf = knowledge_ensemble(space, agents, f);

    OracleReport rep;
    rep.runs = space.runs().size();
    rep.points = space.size();
    rep.guard = oracle_guard(spec);
    rep.agents = spec.agents;
    rep.agree.assign(agents.size(), 0);
    for (std::size_t p = 0; p < space.size(); ++p) {
        const int t = space.time_of(p);
        if (t + rep.guard > T) continue;
        ++rep.guarded;
        const Run& run = space.runs()[space.run_of(p)];
        for (std::size_t i = 0; i < agents.size(); ++i) {
            const auto& resp = run.response[agents[i]];
            PointVerdict v{space.run_of(p), t, spec.agents[i], kf[i].test(p), resp && *resp <= t};
            if (v.knows == v.responded) ++rep.agree[i];
            else rep.all_agree = false;
            rep.verdicts.push_back(v);
        }
    }

    if (cycles_all_zero(spec.delta)) {
        const Ensemble kg = knowledge_ensemble(space, agents, g_delta_common_knowledge(space, agents, spec.delta, psi));
        bool same = true;
        for (std::size_t p = 0; p < space.size(); ++p) {
            if (space.time_of(p) + rep.guard > T) continue;
            for (std::size_t i = 0; i < agents.size(); ++i)
                if (kf[i].test(p) != kg[i].test(p)) same = false;
        }
        rep.g_equal = same;
        if (!same) rep.all_agree = false;
    }
    return rep;
}

std::string format_oracle(const OracleReport& report, bool per_point) {
    std::ostringstream out;
    out << "runs " << report.runs << ", points " << report.points << ", guard " << report.guard << ", guarded points "
        << report.guarded << '\n';
    if (per_point)
        for (const auto& v : report.verdicts)
            out << "run " << v.run << " t=" << v.time << " agent " << v.agent << " knows=" << (v.knows ? 1 : 0)
                << " responded=" << (v.responded ? 1 : 0) << (v.knows == v.responded ? " agree" : " DISAGREE")
                << '\n';
    for (std::size_t i = 0; i < report.agents.size(); ++i)
        out << "agent " << report.agents[i] << ": " << report.agree[i] << "/" << report.guarded << " agree\n";
    if (report.g_equal) out << "exact-time fixpoint: " << (*report.g_equal ? "equal" : "DIFFERS") << '\n';
    else out << "exact-time fixpoint: skipped (positive cycle in G_delta)\n";
    out << (report.all_agree ? "AGREE on all guarded points" : "DISAGREE on some guarded points") << '\n';
    return out.str();
}

} // namespace tcr
