#include "atlh/error.hpp"
#include "atlh/mcheck.hpp"
#include "atlh/sampling.hpp"
#include "atlh/scenarios.hpp"
#include "atlh/translate.hpp"
#include "doctest.h"

#include <random>

using namespace atlh;

namespace {

Formula F(const char* text) { return parse_formula(text); }

std::vector<Formula> atoms(std::size_t n) {
    std::vector<Formula> out;
    for (std::size_t i = 1; i <= n; ++i) out.push_back(Formula::atom("p_" + std::to_string(i)));
    return out;
}

} // namespace

TEST_CASE("k_to_h") {
    CHECK(k_to_h(F("K[a] p")) == F("p & H[a] = log(1) {p}"));
    CHECK(k_to_h(F("p")) == F("p"));
    CHECK(k_to_h(F("K[a] K[b] p")) == F("(p & H[b] = log(1) {p}) & H[a] = log(1) {p & H[b] = log(1) {p}}"));
    CHECK(k_to_h(F("E[a, b] p")) == F("(p & H[a] = log(1) {p}) & (p & H[b] = log(1) {p})"));
    CHECK(k_to_h(F("E[] p")) == F("true"));
    CHECK(k_to_h(F("<a> F K[b] p")) == F("<a> F (p & H[b] = log(1) {p})"));
}

TEST_CASE("phi_beta") {
    CHECK(phi_beta({F("p")}) == std::vector<Formula>{F("p"), F("!p")});
    Formula a = F("f1"), b = F("f2");
    CHECK(phi_beta({a, b}) == std::vector<Formula>{F("f1 & f2"), F("f1 & !f2"), F("!f1 & f2"), F("!f1 & !f2")});
    CHECK(phi_beta(atoms(4)).size() == 16);
    CHECK_THROWS_AS(phi_beta(atoms(5)), CapExceeded);
    TranslateOptions wide;
    wide.max_beta = 5;
    CHECK(phi_beta(atoms(5), wide).size() == 32);
}

TEST_CASE("phi_beta cells partition every state") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 100; ++i) {
        Cegm m = random_model(rng);
        FormulaParams fp;
        fp.agents = m.agents();
        fp.props = m.props();
        fp.max_depth = 2;
        std::vector<Formula> beta;
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
        while (beta.size() < n) beta.push_back(random_formula(rng, fp));
        auto cells = phi_beta(beta);
        Labeling lab;
        for (const auto& c : cells) label_into(lab, m, c);
        for (StateId q = 0; q < m.num_states(); ++q) {
            int hits = 0;
            for (const auto& c : cells) hits += lab.at(c).contains(q);
            CHECK(hits == 1);
        }
    }
}

TEST_CASE("t_nm") {
    using T = std::vector<std::vector<std::uint8_t>>;
    CHECK(t_nm(1, 1) == T{{0, 1}, {1, 0}});
    CHECK(t_nm(1, 2) == T{{0, 0}});
    CHECK(t_nm(2, 3).size() == 4);
    CHECK_THROWS(t_nm(1, 0));
    CHECK_THROWS(t_nm(1, 3));

    // against filtering all bit strings
    for (unsigned n = 1; n <= 3; ++n) {
        const unsigned w = 1u << n;
        for (unsigned m = 1; m <= w; ++m) {
            T want;
            for (std::uint32_t bits = 0; bits < (1u << w); ++bits) {
                std::vector<std::uint8_t> t(w);
                unsigned zeros = 0;
                // first position is the most significant bit
                for (unsigned j = 0; j < w; ++j) {
                    t[j] = (bits >> (w - 1 - j)) & 1;
                    zeros += t[j] == 0;
                }
                if (zeros == m) want.push_back(t);
            }
            CHECK(t_nm(n, m) == want);
        }
    }
}

TEST_CASE("h_eq_to_k") {
    CHECK(h_eq_to_k("a", {F("p")}, 1) == F("(K[a] !p & !K[a] !!p) | (!K[a] !p & K[a] !!p)"));
    const char* p3 = "(K[a] !(f1 & f2) & !K[a] !(f1 & !f2) & !K[a] !(!f1 & f2) & !K[a] !(!f1 & !f2))"
                     " | (!K[a] !(f1 & f2) & K[a] !(f1 & !f2) & !K[a] !(!f1 & f2) & !K[a] !(!f1 & !f2))"
                     " | (!K[a] !(f1 & f2) & !K[a] !(f1 & !f2) & K[a] !(!f1 & f2) & !K[a] !(!f1 & !f2))"
                     " | (!K[a] !(f1 & f2) & !K[a] !(f1 & !f2) & !K[a] !(!f1 & f2) & K[a] !(!f1 & !f2))";
    CHECK(h_eq_to_k("a", {F("f1"), F("f2")}, 3) == F(p3));
    CHECK_THROWS(h_eq_to_k("a", {F("p")}, 3));
    CHECK_THROWS(h_eq_to_k("a", {F("p")}, 0));

    // lengths grow with C(2^n, m) * 2^n
    for (std::size_t n = 1; n <= 3; ++n) {
        const std::uint64_t w = std::uint64_t{1} << n;
        for (std::uint64_t m = 1; m <= w; ++m) {
            Formula p = h_eq_to_k("a", atoms(n), m);
            std::uint64_t c = 1;
            for (std::uint64_t i = 1; i <= m; ++i) c = c * (w - m + i) / i;
            CHECK(p.length() >= c * w);
        }
    }
}

TEST_CASE("h_to_k on single nodes") {
    Cegm m = gen_referendum_double(DoubleVariant::M2);
    CHECK(h_to_k(F("H[a] = log(3) {f1, f2}")) == h_eq_to_k("a", {F("f1"), F("f2")}, 3));
    CHECK(h_to_k(F("H[c] >= 2 {V_A, V_B}")) == h_eq_to_k("c", {F("V_A"), F("V_B")}, 4));
    CHECK(h_to_k(F("H[a] < log(1) {p}")) == F("false"));
    CHECK(h_to_k(F("H[a] >= 0 {p}")) == F("true"));
    CHECK(h_to_k(F("H[a] = 0 {p}")) == h_eq_to_k("a", {F("p")}, 1));
    CHECK(h_to_k(F("H[a] = log(5) {p, q}")) == F("false"));
    CHECK(h_to_k(F("H[a] < log(5) {p, q}")) == F("true"));
    CHECK(h_to_k(F("H[a] > 1.5 {p, q}")) ==
          Formula::disjunction(h_eq_to_k("a", {F("p"), F("q")}, 3), h_eq_to_k("a", {F("p"), F("q")}, 4)));
    CHECK(h_to_k(F("H[a] <= log(2) {p, q}")) ==
          Formula::disjunction(h_eq_to_k("a", {F("p"), F("q")}, 1), h_eq_to_k("a", {F("p"), F("q")}, 2)));
    CHECK(h_to_k(F("K[a] p & <a> X q")) == F("K[a] p & <a> X q"));

    const Formula f = double_issue_hartley_formula();
    for (StateId q = 0; q < m.num_states(); ++q) CHECK(check(m, q, f) == check(m, q, h_to_k(f)));
}

TEST_CASE("h_to_k caps") {
    CHECK_THROWS_AS(h_to_k(Formula::hartley("a", Cmp::Eq, Threshold::real(5, 1), atoms(5))), CapExceeded);
    TranslateOptions tight;
    tight.max_nodes = 100;
    CHECK_THROWS_AS(h_to_k(F("H[a] = log(4) {p_1, p_2, p_3}"), tight), CapExceeded);
    CHECK_NOTHROW(h_to_k(F("H[a] = log(2) {p_1}"), tight));
}

TEST_CASE("translated size grows exponentially") {
    for (std::size_t n = 1; n <= 4; ++n) {
        Formula phi = Formula::hartley("a", Cmp::Eq, Threshold::real(n, 1), atoms(n));
        CHECK(formula_length(phi) == n + 1);
        CHECK(formula_length(h_to_k(phi)) >= (std::size_t{1} << n));
    }
}

TEST_CASE("P_m agrees with the Hartley operator") {
    std::mt19937_64 rng(33);
    for (int i = 0; i < 200; ++i) {
        Cegm m = random_model(rng);
        FormulaParams fp;
        fp.agents = m.agents();
        fp.props = m.props();
        fp.max_depth = 2;
        std::vector<Formula> beta;
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
        for (int tries = 0; beta.size() < n && tries < 20; ++tries) {
            Formula g = random_formula(rng, fp);
            if (std::find(beta.begin(), beta.end(), g) == beta.end()) beta.push_back(g);
        }
        const std::string a = m.agents()[std::uniform_int_distribution<std::size_t>(0, m.num_agents() - 1)(rng)];
        const std::uint64_t k = std::uniform_int_distribution<std::uint64_t>(1, std::uint64_t{1} << beta.size())(rng);
        Formula h = Formula::hartley(a, Cmp::Eq, Threshold::log_of_count(k), beta);
        Formula p = h_eq_to_k(a, beta, k);
        Labeling lab;
        label_into(lab, m, h);
        label_into(lab, m, p);
        CHECK(lab.at(h) == lab.at(p));
    }
}

TEST_CASE("K round trip through H") {
    std::mt19937_64 rng(34);
    for (int i = 0; i < 200; ++i) {
        Cegm m = random_model(rng);
        FormulaParams fp;
        fp.agents = m.agents();
        fp.props = m.props();
        fp.allow_hartley = false;
        Formula f = random_formula(rng, fp);
        Labeling lab;
        label_into(lab, m, f);
        label_into(lab, m, k_to_h(f));
        CHECK(lab.at(f) == lab.at(k_to_h(f)));
    }
}

TEST_CASE("single state model") {
    Cegm m = load_model("agents: a\nstates: s\nactions a: x\ntrans s (x) -> s\nprop p: s\n");
    CHECK(check(m, 0, F("(!K[a] p | p) & (!p | K[a] p)")));
    CHECK(check(m, 0, F("H[a] = 0 {p, !p}")));
}

TEST_CASE("equivalence harness") {
    EquivalenceParams p;
    p.seed = 42;
    p.samples = 200;
    auto r = check_translation_equivalence(p);
    CHECK(r.samples.size() == 200);
    CHECK(r.failures() == 0);
    CHECK(r.samples[0].line().rfind("seed=", 0) == 0);
    CHECK(r.samples[0].line().find(" verdict=ok") != std::string::npos);

    p.threads = 4;
    auto r4 = check_translation_equivalence(p);
    CHECK(r4.text() == r.text());

    EquivalenceSample bad{7, 3, "p", std::string("q2")};
    CHECK(bad.line() == "seed=7 states=3 formula=p verdict=mismatch@q2");
}
