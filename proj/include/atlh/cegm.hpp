#pragma once

#include "atlh/state_set.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace atlh {

using AgentId = std::uint32_t;
using ActionId = std::uint32_t;

/// Concurrent epistemic game model: agents, states, per-agent action
/// availability, a deterministic joint-action transition function, one
/// indistinguishability partition per agent, and a valuation.
///
/// Immutable once built. Agents, states, actions and propositions are
/// ordered by declaration; every iteration follows that order.
class Cegm {
public:
    std::size_t num_agents() const noexcept { return agents_.size(); }
    std::size_t num_states() const noexcept { return states_.size(); }
    const std::vector<std::string>& agents() const noexcept { return agents_; }
    const std::vector<std::string>& states() const noexcept { return states_; }
    const std::vector<std::string>& props() const noexcept { return props_; }
    const std::vector<std::string>& actions(AgentId a) const { return actions_.at(a); }
    StateId initial() const noexcept { return initial_; }

    std::optional<AgentId> find_agent(std::string_view name) const;
    std::optional<StateId> find_state(std::string_view name) const;
    std::optional<std::size_t> find_prop(std::string_view name) const;
    std::optional<ActionId> find_action(AgentId a, std::string_view name) const;

    AgentId agent_id(std::string_view name) const;  // throws ModelError
    StateId state_id(std::string_view name) const;  // throws ModelError

    /// Actions available to `a` in `q`, in declaration order (never empty).
    std::span<const ActionId> avail(AgentId a, StateId q) const { return avail_[q][a]; }
    bool is_available(AgentId a, StateId q, ActionId act) const;

    /// Successor under a full profile (one available action per agent, in
    /// agent order).
    StateId transition(StateId q, std::span<const ActionId> profile) const;

    /// Successor by per-agent positions into avail(a, q).
    StateId transition_by_index(StateId q, std::span<const std::uint32_t> positions) const;
    /// All full-profile successors of q, indexed in mixed radix over avail
    /// positions (first agent most significant).
    std::span<const StateId> transition_row(StateId q) const { return trans_[q]; }

    const StateSet& valuation(std::size_t prop) const { return valuation_.at(prop); }
    const StateSet& valuation(std::string_view prop) const;

    /// The indistinguishability class [q]_a; always contains q.
    const StateSet& epistemic_class(AgentId a, StateId q) const { return classes_[a][class_of_[a][q]]; }
    std::uint32_t class_index(AgentId a, StateId q) const { return class_of_[a][q]; }
    /// Blocks of the partition for `a`, ordered by their smallest state.
    const std::vector<StateSet>& classes(AgentId a) const { return classes_[a]; }

    friend bool operator==(const Cegm&, const Cegm&) = default;

private:
    friend class CegmBuilder;
    Cegm() = default;

    std::vector<std::string> agents_;
    std::vector<std::string> states_;
    std::vector<std::string> props_;
    std::vector<std::vector<std::string>> actions_;        // [agent]
    StateId initial_ = 0;
    std::vector<std::vector<std::vector<ActionId>>> avail_; // [state][agent]
    std::vector<std::vector<StateId>> trans_;                // [state][profile index]
    std::vector<StateSet> valuation_;                        // [prop]
    std::vector<std::vector<std::uint32_t>> class_of_;      // [agent][state]
    std::vector<std::vector<StateSet>> classes_;            // [agent][class]
};

/// Incremental construction by name. `build()` closes the epistemic links
/// into partitions and validates every model invariant.
class CegmBuilder {
public:
    CegmBuilder& agent(std::string name);
    CegmBuilder& state(std::string name);
    CegmBuilder& initial(std::string name);
    CegmBuilder& action(const std::string& agent, std::string name);
    /// Without a call, an agent may use all of its actions in a state.
    CegmBuilder& avail(const std::string& agent, const std::string& state, std::vector<std::string> actions);
    CegmBuilder& transition(const std::string& from, std::vector<std::string> profile, const std::string& to);
    CegmBuilder& indistinguishable(const std::string& agent, const std::string& s1, const std::string& s2);
    CegmBuilder& prop(std::string name);
    CegmBuilder& label(const std::string& prop, const std::string& state);

    Cegm build() const;

private:
    struct Trans {
        std::string from;
        std::vector<std::string> profile;
        std::string to;
    };
    struct Link {
        std::string agent, s1, s2;
    };

    std::vector<std::string> agents_;
    std::vector<std::string> states_;
    std::optional<std::string> initial_;
    std::map<std::string, std::vector<std::string>> actions_;
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> avail_;
    std::vector<Trans> trans_;
    std::vector<Link> links_;
    std::vector<std::string> props_;
    std::vector<std::pair<std::string, std::string>> labels_;
};

/// Parses the line-oriented model format and validates the result.
Cegm load_model(std::string_view text);
/// Canonical serialization; load_model(save_model(m)) == m.
std::string save_model(const Cegm& m);

/// One-step successors of q when the agents in `partial` play the given
/// actions and everybody else plays any available action.
StateSet successors(const Cegm& m, StateId q, const std::map<AgentId, ActionId>& partial);

} // namespace atlh
