#include "atlh/formula.hpp"

#include "atlh/error.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <unordered_set>

namespace atlh {

namespace detail {

struct Node {
    Op op = Op::True;
    std::string name; // atom name or agent
    Coalition coalition;
    Cmp cmp = Cmp::Eq;
    Threshold threshold = Threshold::log_of_count(1);
    std::vector<Formula> kids;
    std::size_t length = 1;
    std::uint64_t nodes = 1;
    std::size_t hash = 0;
};

} // namespace detail

namespace {

std::size_t sat_add(std::size_t a, std::size_t b) {
    return a > std::numeric_limits<std::size_t>::max() - b ? std::numeric_limits<std::size_t>::max() : a + b;
}

void hash_combine(std::size_t& seed, std::size_t v) {
    seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

} // namespace

std::string_view to_string(Cmp cmp) noexcept {
    switch (cmp) {
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
    case Cmp::Eq: return "=";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Threshold

Threshold Threshold::log_of_count(std::uint64_t k) {
    if (k == 0) throw FormulaError("log threshold needs a positive count");
    return Threshold(true, k, 1);
}

Threshold Threshold::real(std::uint64_t numerator, std::uint64_t denominator) {
    if (denominator == 0) throw FormulaError("threshold denominator is zero");
    auto g = std::gcd(numerator, denominator);
    if (g == 0) g = 1;
    return Threshold(false, numerator / g, denominator / g);
}

Threshold Threshold::parse_decimal(std::string_view text) {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    bool seen_dot = false;
    int frac_digits = 0;
    bool any_digit = false;
    for (char c : text) {
        if (c == '.') {
            if (seen_dot) throw FormulaError("malformed decimal '" + std::string(text) + "'");
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') throw FormulaError("malformed decimal '" + std::string(text) + "'");
        any_digit = true;
        if (num > 1'000'000'000'000ULL) throw FormulaError("decimal threshold too large");
        num = num * 10 + static_cast<std::uint64_t>(c - '0');
        if (seen_dot) {
            if (++frac_digits > 4)
                throw FormulaError("decimal threshold '" + std::string(text) + "' has more than 4 fractional digits");
            den *= 10;
        }
    }
    if (!any_digit) throw FormulaError("malformed decimal '" + std::string(text) + "'");
    return real(num, den);
}

std::string Threshold::to_string() const {
    if (log_) return "log(" + std::to_string(num_) + ")";
    std::string out = std::to_string(num_ / den_);
    std::uint64_t rem = num_ % den_;
    if (rem == 0) return out;
    // den_ divides a power of ten, so the expansion terminates.
    out += '.';
    while (rem != 0) {
        rem *= 10;
        out += static_cast<char>('0' + rem / den_);
        rem %= den_;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Formula construction

Formula Formula::make(detail::Node&& n) {
    std::size_t len = 0;
    std::uint64_t nodes = 1;
    for (const auto& k : n.kids) {
        len = sat_add(len, k.length());
        nodes = sat_add(nodes, k.node_count());
    }
    switch (n.op) {
    case Op::Atom:
    case Op::True:
    case Op::False: len = 1; break;
    case Op::Not:
    case Op::Knows:
    case Op::And:
    case Op::Or:
    case Op::Hartley: len = sat_add(len, 1); break;
    case Op::CoalX:
    case Op::CoalG:
    case Op::CoalU: len = sat_add(len, n.coalition.size() + 1); break;
    case Op::CoalFG: len = sat_add(len, n.coalition.size() + 4); break;
    case Op::MutualKnows: len = sat_add(len, std::max<std::size_t>(1, n.coalition.size())); break;
    }
    n.length = len;
    n.nodes = nodes;

    std::size_t h = static_cast<std::size_t>(n.op) * 0x100000001b3ULL;
    hash_combine(h, std::hash<std::string>{}(n.name));
    for (const auto& a : n.coalition) hash_combine(h, std::hash<std::string>{}(a));
    if (n.op == Op::Hartley) {
        hash_combine(h, static_cast<std::size_t>(n.cmp));
        hash_combine(h, n.threshold.numerator());
        hash_combine(h, n.threshold.denominator() + (n.threshold.is_log() ? 7 : 0));
    }
    for (const auto& k : n.kids) hash_combine(h, k.hash());
    n.hash = h;
    return Formula(std::make_shared<const detail::Node>(std::move(n)));
}

Formula::Formula() : node_(top().node_) {}

Formula Formula::atom(std::string name) {
    detail::Node n;
    n.op = Op::Atom;
    n.name = std::move(name);
    return make(std::move(n));
}

Formula Formula::top() {
    static const Formula t = [] {
        detail::Node n;
        n.op = Op::True;
        return make(std::move(n));
    }();
    return t;
}

Formula Formula::bottom() {
    detail::Node n;
    n.op = Op::False;
    return make(std::move(n));
}

Formula Formula::negation(Formula f) {
    detail::Node n;
    n.op = Op::Not;
    n.kids = {std::move(f)};
    return make(std::move(n));
}

Formula Formula::conjunction(Formula lhs, Formula rhs) {
    detail::Node n;
    n.op = Op::And;
    n.kids = {std::move(lhs), std::move(rhs)};
    return make(std::move(n));
}

Formula Formula::disjunction(Formula lhs, Formula rhs) {
    detail::Node n;
    n.op = Op::Or;
    n.kids = {std::move(lhs), std::move(rhs)};
    return make(std::move(n));
}

namespace {

void check_coalition(const Coalition& c) {
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j)
            if (c[i] == c[j]) throw FormulaError("agent '" + c[i] + "' listed twice in coalition");
}

} // namespace

Formula Formula::next(Coalition coalition, Formula f) {
    check_coalition(coalition);
    detail::Node n;
    n.op = Op::CoalX;
    n.coalition = std::move(coalition);
    n.kids = {std::move(f)};
    return make(std::move(n));
}

Formula Formula::always(Coalition coalition, Formula f) {
    check_coalition(coalition);
    detail::Node n;
    n.op = Op::CoalG;
    n.coalition = std::move(coalition);
    n.kids = {std::move(f)};
    return make(std::move(n));
}

Formula Formula::until(Coalition coalition, Formula hold, Formula reach) {
    check_coalition(coalition);
    detail::Node n;
    n.op = Op::CoalU;
    n.coalition = std::move(coalition);
    n.kids = {std::move(hold), std::move(reach)};
    return make(std::move(n));
}

Formula Formula::eventually(Coalition coalition, Formula f) {
    return until(std::move(coalition), top(), std::move(f));
}

Formula Formula::eventually_always(Coalition coalition, Formula reach, Formula stay) {
    check_coalition(coalition);
    detail::Node n;
    n.op = Op::CoalFG;
    n.coalition = std::move(coalition);
    n.kids = {std::move(reach), std::move(stay)};
    return make(std::move(n));
}

Formula Formula::knows(std::string agent, Formula f) {
    detail::Node n;
    n.op = Op::Knows;
    n.name = std::move(agent);
    n.kids = {std::move(f)};
    return make(std::move(n));
}

Formula Formula::everybody_knows(Coalition coalition, Formula f) {
    check_coalition(coalition);
    detail::Node n;
    n.op = Op::MutualKnows;
    n.coalition = std::move(coalition);
    n.kids = {std::move(f)};
    return make(std::move(n));
}

Formula Formula::hartley(std::string agent, Cmp cmp, Threshold threshold, std::vector<Formula> beta) {
    if (beta.empty()) throw FormulaError("empty formula set in H operator");
    std::unordered_set<Formula> seen;
    for (const auto& b : beta)
        if (!seen.insert(b).second) throw FormulaError("duplicate member '" + b.str() + "' in H formula set");
    detail::Node n;
    n.op = Op::Hartley;
    n.name = std::move(agent);
    n.cmp = cmp;
    n.threshold = threshold;
    n.kids = std::move(beta);
    return make(std::move(n));
}

// ---------------------------------------------------------------------------
// Accessors

Op Formula::op() const noexcept { return node_->op; }

const std::string& Formula::name() const {
    if (node_->op != Op::Atom) throw FormulaError("name() on non-atom");
    return node_->name;
}

const std::string& Formula::agent() const {
    if (node_->op != Op::Knows && node_->op != Op::Hartley) throw FormulaError("agent() on formula without an agent");
    return node_->name;
}

const Coalition& Formula::coalition() const { return node_->coalition; }
Cmp Formula::cmp() const { return node_->cmp; }
const Threshold& Formula::threshold() const { return node_->threshold; }

std::span<const Formula> Formula::children() const noexcept { return node_->kids; }

bool Formula::is_eventually() const noexcept {
    return node_->op == Op::CoalU && node_->kids[0].op() == Op::True;
}

std::size_t Formula::length() const noexcept { return node_->length; }
std::uint64_t Formula::node_count() const noexcept { return node_->nodes; }
std::size_t Formula::hash() const noexcept { return node_->hash; }
std::string Formula::str() const { return pretty_print(*this); }

bool operator==(const Formula& a, const Formula& b) noexcept {
    if (a.node_ == b.node_) return true;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    if (x.hash != y.hash || x.op != y.op || x.length != y.length || x.name != y.name ||
        x.coalition != y.coalition || x.kids.size() != y.kids.size())
        return false;
    if (x.op == Op::Hartley && (x.cmp != y.cmp || !(x.threshold == y.threshold))) return false;
    for (std::size_t i = 0; i < x.kids.size(); ++i)
        if (!(x.kids[i] == y.kids[i])) return false;
    return true;
}

std::size_t formula_length(const Formula& f) { return f.length(); }

// ---------------------------------------------------------------------------
// Printing

namespace {

enum Level { kTop = 0, kOr = 1, kAnd = 2, kUnary = 3 };

void print_list(std::string& out, const Coalition& c) {
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) out += ", ";
        out += c[i];
    }
}

void print(std::string& out, const Formula& f, Level ctx);

void print_coalition_prefix(std::string& out, const Formula& f) {
    out += '<';
    print_list(out, f.coalition());
    out += "> ";
}

void print(std::string& out, const Formula& f, Level ctx) {
    switch (f.op()) {
    case Op::Atom: out += f.name(); return;
    case Op::True: out += "true"; return;
    case Op::False: out += "false"; return;
    case Op::Not:
        out += '!';
        print(out, f.child(0), kUnary);
        return;
    case Op::And:
    case Op::Or: {
        const Level self = f.op() == Op::And ? kAnd : kOr;
        const bool paren = ctx > self;
        if (paren) out += '(';
        print(out, f.child(0), self);
        out += f.op() == Op::And ? " & " : " | ";
        print(out, f.child(1), static_cast<Level>(self + 1));
        if (paren) out += ')';
        return;
    }
    case Op::CoalX:
        print_coalition_prefix(out, f);
        out += "X ";
        print(out, f.child(0), kUnary);
        return;
    case Op::CoalG:
        print_coalition_prefix(out, f);
        out += "G ";
        print(out, f.child(0), kUnary);
        return;
    case Op::CoalU:
        print_coalition_prefix(out, f);
        if (f.is_eventually()) {
            out += "F ";
            print(out, f.child(1), kUnary);
        } else {
            out += '(';
            print(out, f.child(0), kTop);
            out += " U ";
            print(out, f.child(1), kTop);
            out += ')';
        }
        return;
    case Op::CoalFG:
        print_coalition_prefix(out, f);
        out += "F (";
        print(out, f.child(0), kAnd);
        out += " & G ";
        print(out, f.child(1), kUnary);
        out += ')';
        return;
    case Op::Knows:
        out += "K[" + f.agent() + "] ";
        print(out, f.child(0), kUnary);
        return;
    case Op::MutualKnows:
        out += "E[";
        print_list(out, f.coalition());
        out += "] ";
        print(out, f.child(0), kUnary);
        return;
    case Op::Hartley: {
        out += "H[" + f.agent() + "] ";
        out += to_string(f.cmp());
        out += ' ';
        out += f.threshold().to_string();
        out += " {";
        const auto kids = f.children();
        for (std::size_t i = 0; i < kids.size(); ++i) {
            if (i) out += ", ";
            print(out, kids[i], kTop);
        }
        out += '}';
        return;
    }
    }
}

} // namespace

std::string pretty_print(const Formula& f) {
    std::string out;
    print(out, f, kTop);
    return out;
}

// ---------------------------------------------------------------------------

std::vector<Formula> subformulas_by_length(const Formula& f) {
    std::unordered_set<Formula> seen;
    std::vector<Formula> out;
    std::vector<Formula> stack{f};
    while (!stack.empty()) {
        Formula g = std::move(stack.back());
        stack.pop_back();
        if (!seen.insert(g).second) continue;
        out.push_back(g);
        for (const auto& k : g.children()) stack.push_back(k);
    }
    std::vector<std::pair<std::string, Formula>> keyed;
    keyed.reserve(out.size());
    for (auto& g : out) keyed.emplace_back(g.str(), std::move(g));
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        if (a.second.length() != b.second.length()) return a.second.length() < b.second.length();
        return a.first < b.first;
    });
    out.clear();
    for (auto& [text, g] : keyed) out.push_back(std::move(g));
    return out;
}

} // namespace atlh
