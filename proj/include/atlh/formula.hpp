#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace atlh {

enum class Op : std::uint8_t {
    Atom,
    True,
    False,
    Not,
    And,
    Or,
    CoalX,        // <A> X f
    CoalG,        // <A> G f
    CoalU,        // <A> (f U g); <A> F g is CoalU with a True left operand
    CoalFG,       // <A> F (f & G g)
    Knows,        // K[a] f
    MutualKnows,  // E[A] f
    Hartley,      // H[a] cmp m {beta}
};

enum class Cmp : std::uint8_t { Lt, Le, Gt, Ge, Eq };

std::string_view to_string(Cmp cmp) noexcept;

/// The bound m of a Hartley operator. Either log2(k) for a positive integer
/// k, or an exact non-negative decimal kept as a reduced fraction.
class Threshold {
public:
    static Threshold log_of_count(std::uint64_t k);
    static Threshold real(std::uint64_t numerator, std::uint64_t denominator);
    /// Accepts `digits[.digits]` with at most four fractional digits.
    static Threshold parse_decimal(std::string_view text);

    bool is_log() const noexcept { return log_; }
    std::uint64_t count() const noexcept { return num_; }
    std::uint64_t numerator() const noexcept { return num_; }
    std::uint64_t denominator() const noexcept { return den_; }

    /// `log(k)` or the shortest exact decimal.
    std::string to_string() const;

    friend bool operator==(const Threshold&, const Threshold&) = default;

private:
    Threshold(bool log, std::uint64_t num, std::uint64_t den) : log_(log), num_(num), den_(den) {}

    bool log_;
    std::uint64_t num_;
    std::uint64_t den_;
};

using Coalition = std::vector<std::string>;

namespace detail {
struct Node;
}

/// Immutable ATLH/ATLK formula. Copies share structure; equality is structural.
class Formula {
public:
    /// The constant `true`.
    Formula();

    static Formula atom(std::string name);
    static Formula top();
    static Formula bottom();
    static Formula negation(Formula f);
    static Formula conjunction(Formula lhs, Formula rhs);
    static Formula disjunction(Formula lhs, Formula rhs);
    static Formula next(Coalition coalition, Formula f);
    static Formula always(Coalition coalition, Formula f);
    static Formula until(Coalition coalition, Formula hold, Formula reach);
    static Formula eventually(Coalition coalition, Formula f);
    static Formula eventually_always(Coalition coalition, Formula reach, Formula stay);
    static Formula knows(std::string agent, Formula f);
    static Formula everybody_knows(Coalition coalition, Formula f);
    /// Throws FormulaError when beta is empty or has duplicate members.
    static Formula hartley(std::string agent, Cmp cmp, Threshold threshold, std::vector<Formula> beta);

    Op op() const noexcept;
    const std::string& name() const;  // Atom
    const std::string& agent() const; // Knows, Hartley
    const Coalition& coalition() const;
    Cmp cmp() const;
    const Threshold& threshold() const;

    /// Operands in a fixed order: And/Or (lhs, rhs); CoalU (hold, reach);
    /// CoalFG (reach, stay); Hartley: the members of beta.
    std::span<const Formula> children() const noexcept;
    const Formula& child(std::size_t i) const { return children()[i]; }

    bool is_eventually() const noexcept;

    std::size_t length() const noexcept;
    /// Number of nodes in the syntax tree, saturating at UINT64_MAX.
    std::uint64_t node_count() const noexcept;
    std::size_t hash() const noexcept;
    const void* id() const noexcept { return node_.get(); }

    std::string str() const;

    friend bool operator==(const Formula& a, const Formula& b) noexcept;

private:
    explicit Formula(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
    static Formula make(detail::Node&& node);

    std::shared_ptr<const detail::Node> node_;
};

Formula parse_formula(std::string_view text);
std::string pretty_print(const Formula& f);
std::size_t formula_length(const Formula& f);

/// Distinct subformulas, shortest first, ties broken by printed text; the
/// last element is f itself.
std::vector<Formula> subformulas_by_length(const Formula& f);

} // namespace atlh

template <>
struct std::hash<atlh::Formula> {
    std::size_t operator()(const atlh::Formula& f) const noexcept { return f.hash(); }
};
