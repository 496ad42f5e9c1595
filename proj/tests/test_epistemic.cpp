#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "tcr/epistemic.hpp"
#include "tcr/errors.hpp"

using namespace tcr;

namespace {

PointSpace c1_space(int horizon = 3) {
    return PointSpace(enumerate_runs(index_context(fixtures::c1()), never_respond(), horizon, {100000}));
}

// A random union of whole indistinguishability cells of one agent.
PointSet random_cells(const PointSpace& s, std::size_t agent, std::mt19937& rng, double p) {
    std::bernoulli_distribution coin(p);
    PointSet out = s.empty();
    for (const auto& cell : s.members(agent))
        if (coin(rng))
            for (std::size_t q : cell) out.set(q);
    return out;
}

PointSet random_set(const PointSpace& s, std::mt19937& rng, double p = 0.5) {
    std::bernoulli_distribution coin(p);
    return s.where([&](std::size_t, int) { return coin(rng); });
}

PointSet triggered_runs(const PointSpace& s) {
    return s.where([&](std::size_t r, int) { return s.runs()[r].triggered_by(0); });
}

ImplementationSpec gap() { return fixtures::spec({"1", "2"}, {{"1", "2", 1}}); }

// Random delta-coordinated ensemble inside psi: local seeds pruned to a fixpoint.
Ensemble coordinated_ensemble(const PointSpace& s, const ImplementationSpec& d, const PointSet& psi,
                              std::mt19937& rng) {
    const std::vector<std::size_t> agents = {0, 1};
    Ensemble e;
    for (std::size_t i : agents)
        e.push_back(knows(s, i, no_later_than(s, 0, random_cells(s, i, rng, 0.3))) & knows(s, i, psi));
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < 2; ++i) {
            PointSet keep = e[i];
            for (std::size_t j = 0; j < 2; ++j)
                if (j != i) keep &= no_later_than(s, d.at(i, j), e[j]);
            keep = knows(s, agents[i], keep);
            if (keep != e[i]) {
                e[i] = keep;
                changed = true;
            }
        }
    }
    return e;
}

} // namespace

TEST_SUITE("epistemic") {

TEST_CASE("point space partitions") {
    const auto s = c1_space();
    CHECK(s.size() == s.runs().size() * 4);
    for (std::size_t a = 0; a < 2; ++a) {
        std::size_t covered = 0;
        for (std::size_t c = 0; c < s.members(a).size(); ++c) {
            const auto& cell = s.members(a)[c];
            covered += cell.size();
            for (std::size_t p : cell) {
                CHECK(s.cell(a)[p] == c);
                CHECK(s.time_of(p) == s.time_of(cell.front()));
                CHECK(s.runs()[s.run_of(p)].states[a][s.time_of(p)] ==
                      s.runs()[s.run_of(cell.front())].states[a][s.time_of(cell.front())]);
            }
        }
        CHECK(covered == s.size());
    }

    auto other = enumerate_runs(index_context(fixtures::c1()), never_respond(), 2);
    auto mixed = enumerate_runs(index_context(fixtures::c1()), never_respond(), 3);
    mixed.push_back(other.front());
    CHECK_THROWS_AS(PointSpace(std::move(mixed)), SpaceMismatch);
    CHECK_THROWS_AS(knows(s, 0, PointSet(3)), SpaceMismatch);
}

TEST_CASE("knowledge examples and axioms") {
    const auto s = c1_space();
    CHECK(knows(s, 0, s.full()) == s.full());
    CHECK(knows(s, 1, s.empty()) == s.empty());
    std::mt19937 rng(71);
    for (int k = 0; k < 100; ++k) {
        const PointSet a = random_set(s, rng), b = random_set(s, rng);
        for (std::size_t i = 0; i < 2; ++i) {
            const PointSet ka = knows(s, i, a);
            CHECK(ka.is_subset_of(a));
            CHECK(knows(s, i, ka) == ka);
            CHECK(knows(s, i, a & b) == (ka & knows(s, i, b)));
            CHECK(knows(s, i, a & b).is_subset_of(ka));
            CHECK(ka.is_subset_of(knows(s, i, a | b)));
        }
    }
}

TEST_CASE("no-later-than examples") {
    const auto s = c1_space();
    PointSet one = s.empty();
    one.set(s.index(5, 3));
    const PointSet later = no_later_than(s, 0, one);
    CHECK(later == s.where([](std::size_t r, int t) { return r == 5 && t >= 3; }));
    CHECK(no_later_than(s, NEG_INF, s.full()).none());
    CHECK(no_later_than(s, POS_INF, one) == s.where([](std::size_t r, int) { return r == 5; }));

    // Additivity needs the intermediate time inside {0..T}; it always is for
    // non-negative shifts.
    std::mt19937 rng(73);
    for (int k = 0; k < 100; ++k) {
        const PointSet a = random_set(s, rng, 0.1);
        const std::int64_t inner = static_cast<std::int64_t>(rng() % 5) - 2;
        const std::int64_t outer = static_cast<std::int64_t>(rng() % 5) - 2;
        const PointSet twice = no_later_than(s, outer, no_later_than(s, inner, a));
        const PointSet once = no_later_than(s, inner + outer, a);
        const PointSet unclipped =
            s.where([&](std::size_t, int t) { return t + outer >= 0 && t + outer <= s.horizon(); });
        CHECK((twice & unclipped) == (once & unclipped));
        const std::int64_t p = inner < 0 ? -inner : inner, q = outer < 0 ? -outer : outer;
        CHECK(no_later_than(s, q, no_later_than(s, p, a)) == no_later_than(s, p + q, a));
        CHECK(no_later_than(s, 0, no_later_than(s, 0, a)) == no_later_than(s, 0, a));
    }
}

TEST_CASE("at-exactly examples") {
    const auto s = c1_space(4);
    std::mt19937 rng(79);
    const PointSet a = random_set(s, rng);
    CHECK(at_exactly(s, 0, a).set == a);
    CHECK(at_exactly(s, 0, a).clipped == 0);

    PointSet one = s.empty();
    one.set(s.index(2, 4));
    CHECK(at_exactly(s, 2, one).set == s.where([](std::size_t r, int t) { return r == 2 && t == 2; }));
    CHECK(at_exactly(s, 2, s.full()).clipped == s.runs().size() * 2);

    const PointSpace lone({simulate(fixtures::c1(), never_respond(), NdSchedule{}, 5)});
    PointSet five = lone.empty();
    five.set(lone.index(0, 5));
    CHECK(at_exactly(lone, 2, five).set == lone.where([](std::size_t, int t) { return t == 3; }));

    for (int k = 0; k < 100; ++k) {
        const PointSet b = random_set(s, rng, 0.2);
        const std::int64_t e = static_cast<std::int64_t>(rng() % 7) - 3;
        CHECK(at_exactly(s, e, b).set.is_subset_of(no_later_than(s, e, b)));
    }
}

TEST_CASE("common knowledge examples") {
    const auto s = c1_space();
    const std::vector<std::size_t> both = {0, 1};
    CHECK(common_knowledge(s, both, s.full()) == s.full());
    CHECK(common_knowledge(s, both, s.empty()).none());

    // Agent 2 has no incoming channel, so it never learns the trigger.
    const auto deaf = index_context(fixtures::make_context({"1", "2"}, {{"2", "1", 1}}));
    NdSchedule on;
    on.input_times["e"] = 0;
    std::vector<Run> two = {simulate(deaf, never_respond(), on, 2), simulate(deaf, never_respond(), NdSchedule{}, 2)};
    const PointSpace hand(std::move(two));
    CHECK(common_knowledge(hand, both, occurred(hand, 0)).none());
    CHECK(knows(hand, 1, occurred(hand, 0)).none());
    CHECK(knows(hand, 0, occurred(hand, 0)).any());

    std::mt19937 rng(83);
    for (int k = 0; k < 30; ++k) {
        const PointSet p = random_set(s, rng, 0.8);
        CHECK(common_knowledge_iterated(s, both, p) == common_knowledge_gfp(s, both, p));
    }
}

TEST_CASE("delta common knowledge examples") {
    const auto s = c1_space();
    const std::vector<std::size_t> both = {0, 1};
    for (const auto& x : delta_common_knowledge(s, both, gap(), s.empty())) CHECK(x.none());

    // Unconstrained pairs leave the top element fixed.
    const ImplementationSpec free({"1", "2"});
    for (const auto& x : delta_common_knowledge(s, both, free, s.full())) CHECK(x == s.full());
}

TEST_CASE("unconstrained delta reduces to eventual common knowledge") {
    const ImplementationSpec free({"1", "2"});
    const std::vector<std::size_t> both = {0, 1};
    for (int T : {2, 3}) {
        const auto s = c1_space(T);
        for (const PointSet& psi : {triggered_runs(s), s.full(), s.empty()}) {
            const auto c = delta_common_knowledge(s, both, free, psi);
            const PointSet eck = eventual_common_knowledge(s, both, psi);
            CHECK((c[0] & c[1]) == eck);
            for (std::size_t i = 0; i < 2; ++i) CHECK(knows(s, i, c[i]) == knows(s, i, eck));
        }
    }
}

TEST_CASE("exact-time fixpoint examples") {
    const auto s = c1_space();
    const std::vector<std::size_t> both = {0, 1};
    for (const auto& x : g_delta_common_knowledge(s, both, gap(), s.empty())) CHECK(x.none());

    const auto zero_cycle = fixtures::spec({"1", "2"}, {{"1", "2", 1}, {"2", "1", -1}});
    const auto g = g_delta_common_knowledge(s, both, zero_cycle, s.full());
    CHECK(g[0] == s.where([](std::size_t, int t) { return t <= 2; }));
    CHECK(g[1] == s.where([](std::size_t, int t) { return t >= 1; }));

    const auto neg = fixtures::spec({"1", "2"}, {{"1", "2", NEG_INF}});
    CHECK_THROWS_AS(g_delta_common_knowledge(s, both, neg, s.full()), DeltaNegInf);
}

TEST_CASE("exact-time and no-later-than fixpoints agree on a solvable space") {
    const auto s = PointSpace(enumerate_runs(index_context(fixtures::c1()), never_respond(), 5, {50000}));
    const std::vector<std::size_t> both = {0, 1};
    const PointSet psi = occurred(s, 0);
    CHECK(no_later_than(s, 0, psi) == psi);
    const auto f = delta_common_knowledge(s, both, fixtures::all_zero({"1", "2"}), psi);
    const auto g = g_delta_common_knowledge(s, both, fixtures::all_zero({"1", "2"}), psi);
    // Shifts only clip at the horizon, so compare two ticks away from it.
    const PointSet inner = s.where([](std::size_t, int t) { return t <= 2; });
    for (std::size_t i = 0; i < 2; ++i) CHECK((knows(s, i, f[i]) & inner) == (knows(s, i, g[i]) & inner));
}

TEST_CASE("delta coordination examples") {
    const auto s = c1_space();
    const std::vector<std::size_t> both = {0, 1};
    const auto c = delta_common_knowledge(s, both, gap(), occurred(s, 0));
    CHECK(is_delta_coordinated(s, knowledge_ensemble(s, both, c), gap()));
    CHECK(is_delta_coordinated(s, {s.empty(), s.empty()}, gap()));
    PointSet first = s.empty();
    first.set(s.index(0, 0));
    CHECK_FALSE(is_delta_coordinated(s, {first, s.empty()}, gap()));
}

TEST_CASE("fixpoint stability, trace and maximality") {
    const auto s = c1_space();
    const std::vector<std::size_t> both = {0, 1};
    const std::vector<ImplementationSpec> deltas = {
        gap(), fixtures::all_zero({"1", "2"}), fixtures::spec({"1", "2"}, {{"1", "2", -1}, {"2", "1", 3}})};
    std::mt19937 rng(89);
    for (const auto& d : deltas)
        for (const PointSet& psi : {occurred(s, 0), triggered_runs(s)}) {
            FixpointTrace trace;
            const auto c = delta_common_knowledge(s, both, d, psi, &trace);
            for (const auto& x : c) CHECK(no_later_than(s, 0, x) == x);
            REQUIRE_FALSE(trace.steps.empty());
            CHECK(trace.steps.size() <= s.size() * 2 + 2);
            CHECK(trace.steps.back() == c);
            for (std::size_t k = 1; k < trace.steps.size(); ++k)
                for (std::size_t i = 0; i < 2; ++i) CHECK(trace.steps[k][i].is_subset_of(trace.steps[k - 1][i]));

            const auto e = knowledge_ensemble(s, both, c);
            CHECK(is_delta_coordinated(s, e, d));
            CHECK((e[0] | e[1]).is_subset_of(no_later_than(s, POS_INF, psi)));
            int nonempty = 0;
            for (int k = 0; k < 40; ++k) {
                const auto h = coordinated_ensemble(s, d, psi, rng);
                REQUIRE(is_delta_coordinated(s, h, d));
                nonempty += h[0].any();
                for (std::size_t i = 0; i < 2; ++i) {
                    CHECK(knows(s, i, h[i]) == h[i]);
                    CHECK(h[i].is_subset_of(e[i]));
                }
                const PointSet u = h[0] | h[1];
                const auto cu = delta_common_knowledge(s, both, d, u);
                for (std::size_t i = 0; i < 2; ++i) CHECK(h[i].is_subset_of(knows(s, i, cu[i])));
                CHECK(u.is_subset_of(cu[0] | cu[1]));
            }
            CHECK(nonempty > 0);
        }
}

TEST_CASE("knowing the trigger will happen equals knowing it happened") {
    const auto s = c1_space();
    const auto rep = nd_knowledge_check(s, "e");
    CHECK(rep.ok);

    // Without untriggered runs every agent knows from the start that it will happen.
    std::vector<Run> only;
    for (const auto& r : s.runs())
        if (r.triggered_by(0)) only.push_back(r);
    const auto skewed = nd_knowledge_check(PointSpace(std::move(only)), "e");
    CHECK_FALSE(skewed.ok);
    CHECK_FALSE(skewed.offending[1].empty());

    const PointSpace single({simulate(fixtures::c1(), never_respond(), NdSchedule{}, 3)});
    const auto none = nd_knowledge_check(single, "e");
    CHECK(none.ok);
    CHECK(occurred(single, 0).none());
}

TEST_CASE("point formatting") {
    const auto s = c1_space(1);
    PointSet p = s.empty();
    p.set(s.index(0, 1));
    p.set(s.index(2, 0));
    CHECK(format_points(s, p) == "(0,1) (2,0)");
    CHECK(format_points(s, s.empty()).empty());
}

}
