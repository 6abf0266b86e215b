#include <doctest.h>

#include "atlh/error.hpp"
#include "atlh/formula.hpp"
#include "atlh/sampling.hpp"

#include <algorithm>
#include <unordered_set>

using namespace atlh;

namespace {

Formula p() { return Formula::atom("p"); }
Formula q() { return Formula::atom("q"); }

// Length computed straight from the recursive definition, independent of the
// cached value in the node.
std::size_t oracle_length(const Formula& f) {
    auto kid = [&](std::size_t i) { return oracle_length(f.child(i)); };
    switch (f.op()) {
    case Op::Atom:
    case Op::True:
    case Op::False: return 1;
    case Op::Not:
    case Op::Knows: return 1 + kid(0);
    case Op::And:
    case Op::Or: return kid(0) + kid(1) + 1;
    case Op::CoalX:
    case Op::CoalG: return f.coalition().size() + 1 + kid(0);
    case Op::CoalU: return f.coalition().size() + kid(0) + kid(1) + 1;
    case Op::CoalFG: // <A>(true U (reach & <>G stay)) with G costing 1
        return f.coalition().size() + 1 + 1 + (kid(0) + 1 + (1 + kid(1)));
    case Op::MutualKnows: return std::max<std::size_t>(1, f.coalition().size()) + kid(0);
    case Op::Hartley: {
        std::size_t s = 1;
        for (std::size_t i = 0; i < f.children().size(); ++i) s += kid(i);
        return s;
    }
    }
    return 0;
}

} // namespace

TEST_CASE("parse single atom") {
    CHECK(parse_formula("p") == p());
    CHECK(parse_formula("  p  # comment") == p());
}

TEST_CASE("parse eventually with Hartley operand") {
    Formula f = parse_formula("<v> F (Voted & H[c] >= 2 {V_A, V_B})");
    Formula expect = Formula::until(
        {"v"}, Formula::top(),
        Formula::conjunction(Formula::atom("Voted"),
                             Formula::hartley("c", Cmp::Ge, Threshold::real(2, 1),
                                              {Formula::atom("V_A"), Formula::atom("V_B")})));
    CHECK(f == expect);
    CHECK(f.is_eventually());
}

TEST_CASE("parse log threshold") {
    Formula f = parse_formula("H[a] = log(3) {p, q}");
    CHECK(f.op() == Op::Hartley);
    CHECK(f.cmp() == Cmp::Eq);
    CHECK(f.threshold() == Threshold::log_of_count(3));
    CHECK(f.children().size() == 2);
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_formula("H[a] = 1 {}"), ParseError);
    CHECK_THROWS_AS(parse_formula("H[a] == 1 {p}"), ParseError);
    CHECK_THROWS_AS(parse_formula("H[a] ! 1 {p}"), ParseError);
    CHECK_THROWS_AS(parse_formula("H[a] = 1 {p, p}"), ParseError);
    CHECK_THROWS_AS(parse_formula("p &"), ParseError);
    CHECK_THROWS_AS(parse_formula("<a> p"), ParseError);
    CHECK_THROWS_AS(parse_formula("G p"), ParseError);
    CHECK_THROWS_AS(parse_formula("<a> F (G p & G q)"), ParseError);
    CHECK_THROWS_AS(parse_formula("<a, a> X p"), ParseError);
    try {
        parse_formula("p &\n  & q");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 3);
    }
}

TEST_CASE("precedence: not binds tighter than and, and tighter than or") {
    CHECK(parse_formula("!p & q | p") ==
          Formula::disjunction(Formula::conjunction(Formula::negation(p()), q()), p()));
    CHECK(parse_formula("p | q & p") == Formula::disjunction(p(), Formula::conjunction(q(), p())));
}

TEST_CASE("eventually-always pattern") {
    Formula f = parse_formula("<v> F (Voted & V_A & G !(K[c] V_A | K[c] !V_A))");
    REQUIRE(f.op() == Op::CoalFG);
    CHECK(f.child(0) == Formula::conjunction(Formula::atom("Voted"), Formula::atom("V_A")));
    CHECK(f.child(1).op() == Op::Not);
    CHECK(parse_formula(f.str()) == f);

    Formula g = parse_formula("<v> F (G p & q)");
    REQUIRE(g.op() == Op::CoalFG);
    CHECK(g.child(0) == q());
    CHECK(g.child(1) == p());
}

TEST_CASE("formula length") {
    CHECK(formula_length(p()) == 1);
    CHECK(formula_length(parse_formula("H[a] = 1 {p, q}")) == 3);
    CHECK(formula_length(parse_formula("<a, b> G p")) == 4);
    CHECK(formula_length(parse_formula("<a> F p")) == 4);
    CHECK(formula_length(parse_formula("p & q")) == 3);
    CHECK(formula_length(parse_formula("E[] p")) == 2);
}

TEST_CASE("subformulas by length") {
    auto s = subformulas_by_length(p());
    REQUIRE(s.size() == 1);
    CHECK(s[0] == p());

    Formula f = Formula::conjunction(p(), Formula::negation(p()));
    s = subformulas_by_length(f);
    REQUIRE(s.size() == 3);
    CHECK(s[0] == p());
    CHECK(s[1] == Formula::negation(p()));
    CHECK(s[2] == f);

    Formula h = parse_formula("H[a] >= 2 {p, q}");
    s = subformulas_by_length(h);
    REQUIRE(s.size() == 3);
    CHECK(s[0] == p());
    CHECK(s[1] == q());
    CHECK(s[2] == h);
}

TEST_CASE("pretty printing") {
    CHECK(pretty_print(p()) == "p");
    CHECK(pretty_print(Formula::knows("c", Formula::atom("V_A"))) == "K[c] V_A");
    CHECK(pretty_print(parse_formula("H[a]=log(3){p,q}")) == "H[a] = log(3) {p, q}");
    CHECK(pretty_print(parse_formula("H[a] >= 0.50 {p}")) == "H[a] >= 0.5 {p}");
    CHECK(pretty_print(parse_formula("<> X p")) == "<> X p");
}

TEST_CASE("random round trip, length and subformula properties") {
    std::mt19937_64 rng(12345);
    FormulaParams fp;
    fp.agents = {"a", "b", "c"};
    fp.props = {"p", "q", "r"};
    fp.max_depth = 5;
    fp.max_beta = 3;
    fp.max_strategic = 3;
    for (int i = 0; i < 2000; ++i) {
        Formula f = random_formula(rng, fp);
        const std::string text = pretty_print(f);
        INFO(text);
        Formula g = parse_formula(text);
        REQUIRE(g == f);
        CHECK(pretty_print(g) == text);
        CHECK(f.length() == oracle_length(f));
        CHECK(f.length() >= 1);

        auto subs = subformulas_by_length(f);
        CHECK(subs.back() == f);
        std::unordered_set<Formula> before;
        for (const auto& s : subs) {
            for (const auto& k : s.children()) {
                CHECK(before.count(k) == 1);
                CHECK(k.length() < s.length());
            }
            before.insert(s);
        }
    }
}

TEST_CASE("threshold decimals are exact") {
    CHECK(Threshold::parse_decimal("1.5") == Threshold::real(3, 2));
    CHECK(Threshold::parse_decimal("2") == Threshold::real(2, 1));
    CHECK(Threshold::parse_decimal("0.0625").to_string() == "0.0625");
    CHECK_THROWS_AS(Threshold::parse_decimal("0.00001"), FormulaError);
    CHECK_THROWS_AS(Threshold::log_of_count(0), FormulaError);
}
