#include "atlh/error.hpp"
#include "atlh/mcheck.hpp"
#include "atlh/sampling.hpp"
#include "atlh/scenarios.hpp"
#include "doctest.h"
#include "support/properties.hpp"

#include <random>
#include <set>

using namespace atlh;

namespace {

std::set<std::string> names(const Cegm& m, const StateSet& s) {
    std::set<std::string> out;
    s.for_each([&](StateId q) { out.insert(m.states()[q]); });
    return out;
}

std::set<std::string> holds_at(const Cegm& m, const std::string& text, const CheckOptions& opts = {}) {
    Formula f = parse_formula(text);
    return names(m, label(m, f, opts).at(f));
}

using Names = std::set<std::string>;

} // namespace

TEST_CASE("single referendum labels") {
    Cegm m = gen_referendum_single();
    CHECK(holds_at(m, "K[c] Voted") == Names{"s1", "s2"});
    CHECK(holds_at(m, "K[c] V_A").empty());
    CHECK(holds_at(m, "K[c] !V_A") == Names{"s0"});
    CHECK(holds_at(m, "V_A") == Names{"s1"});
    CHECK(holds_at(m, "<v> X V_A") == Names{"s0", "s1"});
    CHECK(holds_at(m, "<c> X V_A") == Names{"s1"});
    CHECK(holds_at(m, "<v, c> X Voted") == Names{"s0", "s1", "s2"});
    CHECK(check(m, m.initial(), single_issue_coercion_formula()));
}

TEST_CASE("single referendum without coercer confusion") {
    Cegm m = load_model(R"(
agents: v c
states: s0 s1 s2
actions v: voteA voteNA eps
actions c: eps
avail v s1: eps
avail v s2: eps
trans s0 (voteA, eps) -> s1
trans s0 (voteNA, eps) -> s2
trans s0 (eps, eps) -> s0
trans s1 (eps, eps) -> s1
trans s2 (eps, eps) -> s2
prop Voted: s1 s2
prop V_A: s1
)");
    CHECK(holds_at(m, "K[c] V_A") == Names{"s1"});
    CHECK_FALSE(check(m, m.initial(), single_issue_coercion_formula()));
}

TEST_CASE("double referendum") {
    Cegm m1 = gen_referendum_double(DoubleVariant::M1);
    Cegm m2 = gen_referendum_double(DoubleVariant::M2);
    CHECK(check(m1, m1.initial(), double_issue_coercion_formula()));
    CHECK(check(m2, m2.initial(), double_issue_coercion_formula()));
    CHECK(check(m2, m2.initial(), double_issue_hartley_formula()));
    CHECK_FALSE(check(m1, m1.initial(), double_issue_hartley_formula()));
    CHECK(holds_at(m2, "H[c] >= 2 {V_A, V_B}") == Names{"s1", "s2", "s3", "s4"});
    CHECK(holds_at(m1, "H[c] >= 2 {V_A, V_B}").empty());
    CHECK(holds_at(m1, "H[c] = 1 {V_A, V_B}") == Names{"s1", "s2", "s3", "s4"});
    // s0 is alone in its class: one vector
    CHECK(holds_at(m2, "H[c] = 0 {V_A, V_B}") == Names{"s0"});
}

TEST_CASE("hartley class counts") {
    Cegm m = gen_referendum_double(DoubleVariant::M2);
    const AgentId c = m.agent_id("c");
    Formula va = parse_formula("V_A"), vb = parse_formula("V_B");
    Labeling lab = label(m, Formula::conjunction(va, vb));
    std::vector<StateSet> both{lab.at(va), lab.at(vb)};
    std::vector<StateSet> one{lab.at(va)};
    const StateId s1 = m.state_id("s1");
    CHECK(hartley_classes(m, c, s1, both) == 4);
    CHECK(hartley_classes(m, c, s1, one) == 2);
    CHECK(hartley_classes(m, c, m.state_id("s0"), both) == 1);
    CHECK(hartley_classes(m, c, s1, {}) == 1);

    Cegm n = gen_referendum_double(DoubleVariant::M1);
    CHECK(hartley_classes(n, n.agent_id("c"), n.state_id("s1"), both) == 2);
}

TEST_CASE("compare_log exactness") {
    CHECK(compare_log(3, Cmp::Eq, Threshold::log_of_count(3)));
    CHECK_FALSE(compare_log(3, Cmp::Eq, Threshold::parse_decimal("1.585")));
    CHECK(compare_log(3, Cmp::Gt, Threshold::parse_decimal("1.584")));
    CHECK(compare_log(3, Cmp::Lt, Threshold::parse_decimal("1.585")));
    CHECK(compare_log(4, Cmp::Ge, Threshold::real(2, 1)));
    CHECK(compare_log(4, Cmp::Eq, Threshold::real(2, 1)));
    CHECK(compare_log(3, Cmp::Lt, Threshold::real(2, 1)));
    CHECK(compare_log(1, Cmp::Eq, Threshold::real(0, 1)));
    CHECK(compare_log(2, Cmp::Gt, Threshold::parse_decimal("0.5")));
    CHECK(compare_log(5, Cmp::Le, Threshold::log_of_count(6)));
    CHECK_FALSE(compare_log(6, Cmp::Lt, Threshold::log_of_count(6)));
    // 2^62 vs 62 and a just-below threshold
    CHECK(compare_log(std::uint64_t{1} << 62, Cmp::Eq, Threshold::real(62, 1)));
    CHECK(compare_log((std::uint64_t{1} << 62) - 1, Cmp::Lt, Threshold::real(62, 1)));
    CHECK(compare_log((std::uint64_t{1} << 62) - 1, Cmp::Gt, Threshold::real(6199999, 100000)));

    // against floating point away from ties
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t c = std::uniform_int_distribution<std::uint64_t>(1, 5000)(rng);
        const std::uint64_t p = std::uniform_int_distribution<std::uint64_t>(0, 1300)(rng);
        const double exact = std::log2(static_cast<double>(c));
        const double t = p / 100.0;
        if (std::abs(exact - t) < 1e-9) continue;
        CHECK(compare_log(c, Cmp::Lt, Threshold::real(p, 100)) == (exact < t));
        CHECK(compare_log(c, Cmp::Ge, Threshold::real(p, 100)) == (exact >= t));
    }
}

TEST_CASE("strategy counts and witnesses") {
    Cegm m = gen_referendum_single();
    CheckOptions ir;
    CHECK(count_strategies(m, {m.agent_id("v")}, ir) == 3);
    CHECK(count_strategies(m, {m.agent_id("c")}, ir) == 1);

    Cegm m2 = gen_referendum_double(DoubleVariant::M2);
    CHECK(count_strategies(m2, {m2.agent_id("v")}, ir) == 5);

    std::size_t seen = 0;
    enumerate_strategies(m2, {m2.agent_id("v")}, ir, [&](const Strategy& s) {
        CHECK(s.agents.size() == 1);
        ++seen;
        return true;
    });
    CHECK(seen == 5);

    auto w = strategic_witness(m, m.initial(), parse_formula("<v> F V_A"));
    REQUIRE(w.has_value());
    CHECK(m.actions(m.agent_id("v"))[w->action(0, m.initial())] == "voteA");
    CHECK_FALSE(strategic_witness(m, m.initial(), parse_formula("<c> F V_A")).has_value());
    CHECK_FALSE(strategic_witness(m, m.initial(), parse_formula("K[c] V_A")).has_value());
}

TEST_CASE("uniformity matters") {
    // v cannot tell s0 from s1 and must pick the action that is right in both.
    Cegm m = load_model(R"(
agents: v
states: s0 s1 good bad
actions v: l r
trans s0 (l) -> good
trans s0 (r) -> bad
trans s1 (l) -> bad
trans s1 (r) -> good
trans good (l) -> good
trans good (r) -> good
trans bad (l) -> bad
trans bad (r) -> bad
obs v: s0 ~ s1
prop win: good
)");
    CheckOptions ir, Ir;
    Ir.strategy_mode = StrategyMode::Ir;
    CHECK(holds_at(m, "<v> X win", ir) == Names{"s0", "s1", "good"});
    CheckOptions subj;
    subj.scope = SuccessScope::subjective;
    CHECK(holds_at(m, "<v> X win", subj) == Names{"good"});
    subj.strategy_mode = StrategyMode::Ir;
    CHECK(holds_at(m, "<v> X win", subj) == Names{"s0", "s1", "good"});
    CHECK(holds_at(m, "<v> F win", Ir) == Names{"s0", "s1", "good"});
}

TEST_CASE("fixpoint shortcut agrees with enumeration") {
    std::mt19937_64 rng(11);
    ModelParams mp;
    mp.max_actions = 2;
    mp.link_probability = 0.2;
    for (int i = 0; i < 150; ++i) {
        Cegm m = random_model(rng, mp);
        FormulaParams fp;
        fp.agents = m.agents();
        fp.props = m.props();
        fp.max_depth = 3;
        fp.max_strategic = 2;
        Formula f = random_formula(rng, fp);
        for (auto mode : {StrategyMode::ir, StrategyMode::Ir}) {
            CheckOptions fast, slow;
            fast.strategy_mode = slow.strategy_mode = mode;
            slow.positional_shortcut = false;
            CHECK_MESSAGE(label(m, f, fast).at(f) == label(m, f, slow).at(f), f.str());
        }
    }
}

TEST_CASE("threads do not change labels or witnesses") {
    std::mt19937_64 rng(3);
    ModelParams mp;
    mp.max_states = 7;
    mp.link_probability = 0.5;
    for (int i = 0; i < 60; ++i) {
        Cegm m = random_model(rng, mp);
        FormulaParams fp;
        fp.agents = m.agents();
        fp.props = m.props();
        fp.max_strategic = 2;
        Formula f = random_formula(rng, fp);
        CheckOptions one, many;
        one.positional_shortcut = many.positional_shortcut = false;
        many.threads = 4;
        CHECK(label(m, f, one).at(f) == label(m, f, many).at(f));
        Formula g = Formula::eventually(m.agents(), Formula::atom("p0"));
        for (StateId q = 0; q < m.num_states(); ++q) {
            auto a = strategic_witness(m, q, g, one);
            auto b = strategic_witness(m, q, g, many);
            REQUIRE(a.has_value() == b.has_value());
            if (a) CHECK(a->actions == b->actions);
        }
    }
}

TEST_CASE("empty coalition and everybody-knows") {
    Cegm m = gen_referendum_single();
    CHECK(holds_at(m, "E[] V_A") == Names{"s0", "s1", "s2"});
    CHECK(holds_at(m, "E[v, c] Voted") == Names{"s1", "s2"});
    CHECK(holds_at(m, "<> G true") == Names{"s0", "s1", "s2"});
    CHECK(holds_at(m, "<> X Voted") == Names{"s1", "s2"});
    CHECK(holds_at(m, "<> F V_A") == Names{"s1"});
}

TEST_CASE("errors") {
    Cegm m = gen_referendum_single();
    CHECK_THROWS_AS(label(m, parse_formula("nope")), ModelError);
    CHECK_THROWS_AS(label(m, parse_formula("<x> X Voted")), ModelError);
    CHECK_THROWS_AS(label(m, parse_formula("K[x] Voted")), ModelError);
}

TEST_CASE("property: hartley validities") {
    auto r = props::hartley_validities(101, 150);
    CHECK(r.checks >= r.models);
    CHECK_MESSAGE(r.ok(), r.first_violation);
    MESSAGE(r.models << " models, " << r.checks << " checks");
}

TEST_CASE("property: hartley upper bound") {
    auto r = props::hartley_upper_bound(102, 150);
    CHECK(r.checks >= r.models);
    CHECK_MESSAGE(r.ok(), r.first_violation);
    MESSAGE(r.models << " models, " << r.checks << " checks");
}

TEST_CASE("property: knowledge as zero uncertainty") {
    auto r = props::knowledge_bridge(103, 150);
    CHECK(r.checks >= r.models);
    CHECK_MESSAGE(r.ok(), r.first_violation);
    MESSAGE(r.models << " models, " << r.checks << " checks");
}

TEST_CASE("property: reflexive models collapse strategic operators") {
    auto r = props::reflexive_collapse(104, 150);
    CHECK(r.checks >= r.models);
    CHECK_MESSAGE(r.ok(), r.first_violation);
    MESSAGE(r.models << " models, " << r.checks << " checks");
}

TEST_CASE("property: agreement with brute force") {
    auto r = props::oracle_agreement(105, 60);
    CHECK(r.checks >= r.models);
    CHECK_MESSAGE(r.ok(), r.first_violation);
    MESSAGE(r.models << " models, " << r.checks << " checks");
}
