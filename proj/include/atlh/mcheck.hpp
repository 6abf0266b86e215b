#pragma once

#include "atlh/cegm.hpp"
#include "atlh/formula.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace atlh {

enum class StrategyMode { ir, Ir };
enum class SuccessScope { objective, subjective };

struct CheckOptions {
    StrategyMode strategy_mode = StrategyMode::ir;
    /// objective: paths from q only. subjective: paths from every state some
    /// coalition member considers possible at q.
    SuccessScope scope = SuccessScope::objective;
    unsigned threads = 1;
    /// Solve X/G/U goals by positional fixpoints when no uniformity constraint
    /// bites (Ir mode, or every coalition decision sits in a singleton class)
    /// instead of enumerating strategies.
    bool positional_shortcut = true;
};

/// Memoryless collective strategy. actions[i][q] is the action of agents[i]
/// at state q; in ir mode it is constant on that agent's epistemic classes.
struct Strategy {
    std::vector<AgentId> agents; // ascending
    std::vector<std::vector<ActionId>> actions;

    ActionId action(std::size_t i, StateId q) const { return actions[i][q]; }
};

/// "v: s0=voteA s1=eps ..." with states sharing an epistemic class grouped
/// as {s1,s2}=eps in ir mode.
std::string describe(const Cegm& m, const Strategy& s, StrategyMode mode);

enum class TemporalKind {
    Next,             // args: target
    Always,           // args: target
    Until,            // args: hold, reach
    EventuallyAlways, // args: reach, stay
};

class Labeling {
public:
    const StateSet& at(const Formula& f) const;
    bool contains(const Formula& f) const { return sets_.count(f) > 0; }
    std::size_t size() const noexcept { return sets_.size(); }
    void set(const Formula& f, StateSet s) { sets_.insert_or_assign(f, std::move(s)); }

private:
    std::unordered_map<Formula, StateSet> sets_;
};

/// Labels every subformula of f bottom-up. Throws ModelError on atoms or
/// agents the model does not declare.
Labeling label(const Cegm& m, const Formula& f, const CheckOptions& opts = {});
/// Extends an existing labeling with f and its subformulas.
void label_into(Labeling& lab, const Cegm& m, const Formula& f, const CheckOptions& opts = {});

bool check(const Cegm& m, StateId q, const Formula& f, const CheckOptions& opts = {});

/// |R_{a,q}(beta)|: distinct truth vectors of beta over [q]_a.
std::size_t hartley_classes(const Cegm& m, AgentId a, StateId q, std::span<const StateSet> beta_labels);

/// Exact log2(count) cmp t.
bool compare_log(std::uint64_t count, Cmp cmp, const Threshold& t);

/// Number of collective strategies (saturating at UINT64_MAX).
std::uint64_t count_strategies(const Cegm& m, const std::vector<AgentId>& coalition, const CheckOptions& opts);

/// Visits every strategy once in a fixed order (decision points by agent,
/// then class or state, then action order). Stops when visit returns false.
void enumerate_strategies(const Cegm& m, const std::vector<AgentId>& coalition, const CheckOptions& opts,
                          const std::function<bool(const Strategy&)>& visit);

/// True iff some strategy of the coalition enforces the temporal goal from
/// the start set of q. On success, *witness receives such a strategy.
bool strategic_holds(const Cegm& m, StateId q, const std::vector<AgentId>& coalition, TemporalKind kind,
                     std::span<const StateSet> args, const CheckOptions& opts, Strategy* witness = nullptr);

/// States satisfying the strategic formula, given labels of its operands.
StateSet strategic_states(const Cegm& m, const std::vector<AgentId>& coalition, TemporalKind kind,
                          std::span<const StateSet> args, const CheckOptions& opts);

/// Witness for a formula whose top operator is strategic, or nullopt when it
/// fails at q (or f is not strategic).
std::optional<Strategy> strategic_witness(const Cegm& m, StateId q, const Formula& f, const CheckOptions& opts = {});

/// Agent ids for a coalition, ascending; throws ModelError on unknown names.
std::vector<AgentId> resolve_coalition(const Cegm& m, const Coalition& c);

} // namespace atlh
