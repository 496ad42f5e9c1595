#include "tcr/selftest.hpp"

#include <functional>
#include <random>

#include "tcr/coordination.hpp"
#include "tcr/epistemic.hpp"
#include "tcr/syncausality.hpp"

namespace tcr {

namespace {

ImplementationSpec random_spec(std::mt19937& rng, std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::string(1, static_cast<char>('a' + i)));
    ImplementationSpec s(ids);
    std::uniform_int_distribution<int> pick(-3, 4);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) {
                const int v = pick(rng);
                s.set(i, j, v == 4 ? POS_INF : ExtendedDelta(v));
            }
    return s;
}

bool canonical_suite() {
    std::mt19937 rng(7);
    for (int round = 0; round < 200; ++round) {
        const auto spec = random_spec(rng, 2 + round % 2);
        const auto cf = canonical_form(spec);
        if (!(canonical_form(cf.as_spec()).dhat == cf.dhat)) return false;
        for (std::size_t i = 0; i < spec.size(); ++i)
            for (std::size_t j = 0; j < spec.size(); ++j)
                if (i != j && cf.dhat(i, j) > spec.at(i, j)) return false;
        if (!is_implementable(spec)) continue;
        const auto t = minimal_implementation(spec);
        if (!verify_implementation(spec, t)) return false;
    }
    return true;
}

Context c1() {
    Context c;
    c.agents = {"1", "2"};
    c.channels = {{"1", "2", 2}, {"2", "1", 3}};
    c.inputs = {{"e", "1"}};
    return c;
}

bool runtime_suite() {
    auto runs = enumerate_runs(index_context(c1()), never_respond(), 3);
    for (const auto& r : runs)
        for (std::size_t a = 0; a < r.states.size(); ++a)
            for (int t = 0; t <= r.horizon; ++t) {
                const State& s = r.states[a][t];
                if (t > 0 && !std::includes(s.begin(), s.end(), r.states[a][t - 1].begin(), r.states[a][t - 1].end()))
                    return false;
                for (FactKey k : s)
                    if (decode_fact(*r.ctx, k).time > t) return false;
            }
    return true;
}

bool engine_suite() {
    TcrSpec spec{c1(), "e", {"1", "2"}, ImplementationSpec({"1", "2"})};
    spec.delta.set("1", "2", 1);
    auto runs = enumerate_runs(index_context(spec.context), never_respond(), 3);
    auto other = runs;
    apply_rule(runs, optimal_response_rule(spec));
    apply_rule(other, bruteforce_response_rule(spec, 32));
    for (std::size_t r = 0; r < runs.size(); ++r)
        if (runs[r].response != other[r].response) return false;
    return verify_tcr(spec, runs).ok;
}

bool knowledge_suite() {
    const PointSpace space(enumerate_runs(index_context(c1()), never_respond(), 2));
    std::mt19937 rng(11);
    std::bernoulli_distribution coin(0.5);
    for (int round = 0; round < 50; ++round) {
        PointSet psi = space.where([&](std::size_t, int) { return coin(rng); });
        for (std::size_t a = 0; a < 2; ++a) {
            const PointSet k = knows(space, a, psi);
            if (!k.is_subset_of(psi) || knows(space, a, k) != k) return false;
        }
    }
    return nd_knowledge_check(space, "e").ok;
}

} // namespace

bool selftest(std::ostream& out) {
    const std::pair<const char*, std::function<bool()>> suites[] = {
        {"canonical forms", canonical_suite},
        {"run invariants", runtime_suite},
        {"optimal vs brute force", engine_suite},
        {"knowledge axioms", knowledge_suite},
    };
    bool all = true;
    for (const auto& [name, fn] : suites) {
        const bool ok = fn();
        out << (ok ? "PASS " : "FAIL ") << name << '\n';
        all = all && ok;
    }
    return all;
}

} // namespace tcr
