#include "atlh/cegm.hpp"

#include "atlh/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace atlh {

namespace {

template <typename T>
std::optional<std::uint32_t> index_of(const std::vector<T>& v, std::string_view name) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] == name) return static_cast<std::uint32_t>(i);
    return std::nullopt;
}

std::string join_states(const Cegm& m, const StateSet& s) {
    std::string out = "{";
    bool first = true;
    s.for_each([&](StateId q) {
        if (!first) out += ", ";
        first = false;
        out += m.states()[q];
    });
    return out + "}";
}

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

} // namespace

// ---------------------------------------------------------------------------
// Cegm queries

std::optional<AgentId> Cegm::find_agent(std::string_view name) const { return index_of(agents_, name); }
std::optional<StateId> Cegm::find_state(std::string_view name) const { return index_of(states_, name); }
std::optional<std::size_t> Cegm::find_prop(std::string_view name) const { return index_of(props_, name); }

std::optional<ActionId> Cegm::find_action(AgentId a, std::string_view name) const {
    return index_of(actions_.at(a), name);
}

AgentId Cegm::agent_id(std::string_view name) const {
    if (auto a = find_agent(name)) return *a;
    throw ModelError("unknown agent '" + std::string(name) + "'");
}

StateId Cegm::state_id(std::string_view name) const {
    if (auto q = find_state(name)) return *q;
    throw ModelError("unknown state '" + std::string(name) + "'");
}

const StateSet& Cegm::valuation(std::string_view prop) const {
    if (auto p = find_prop(prop)) return valuation_[*p];
    throw ModelError("unknown proposition '" + std::string(prop) + "'");
}

bool Cegm::is_available(AgentId a, StateId q, ActionId act) const {
    const auto& av = avail_[q][a];
    return std::find(av.begin(), av.end(), act) != av.end();
}

StateId Cegm::transition_by_index(StateId q, std::span<const std::uint32_t> positions) const {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < agents_.size(); ++a) idx = idx * avail_[q][a].size() + positions[a];
    return trans_[q][idx];
}

StateId Cegm::transition(StateId q, std::span<const ActionId> profile) const {
    if (profile.size() != agents_.size()) throw ModelError("profile size does not match the number of agents");
    std::size_t idx = 0;
    for (std::size_t a = 0; a < agents_.size(); ++a) {
        const auto& av = avail_[q][a];
        auto it = std::find(av.begin(), av.end(), profile[a]);
        if (it == av.end())
            throw ModelError("action '" + actions_[a].at(profile[a]) + "' of agent '" + agents_[a] +
                             "' is not available in state '" + states_[q] + "'");
        idx = idx * av.size() + static_cast<std::size_t>(it - av.begin());
    }
    return trans_[q][idx];
}

StateSet successors(const Cegm& m, StateId q, const std::map<AgentId, ActionId>& partial) {
    const std::size_t n = m.num_agents();
    // Per agent: the admissible positions into avail(a, q).
    std::vector<std::vector<std::uint32_t>> choices(n);
    for (AgentId a = 0; a < n; ++a) {
        auto av = m.avail(a, q);
        if (auto it = partial.find(a); it != partial.end()) {
            auto pos = std::find(av.begin(), av.end(), it->second);
            if (pos == av.end())
                throw ModelError("action '" + m.actions(a).at(it->second) + "' of agent '" + m.agents()[a] +
                                 "' is not available in state '" + m.states()[q] + "'");
            choices[a].push_back(static_cast<std::uint32_t>(pos - av.begin()));
        } else {
            for (std::uint32_t i = 0; i < av.size(); ++i) choices[a].push_back(i);
        }
    }
    StateSet out(m.num_states());
    std::vector<std::size_t> odo(n, 0);
    std::vector<std::uint32_t> pos(n);
    while (true) {
        for (std::size_t a = 0; a < n; ++a) pos[a] = choices[a][odo[a]];
        out.insert(m.transition_by_index(q, pos));
        std::size_t a = n;
        while (a > 0) {
            --a;
            if (++odo[a] < choices[a].size()) break;
            odo[a] = 0;
            if (a == 0) return out;
        }
        if (n == 0) return out;
    }
}

// ---------------------------------------------------------------------------
// Builder

CegmBuilder& CegmBuilder::agent(std::string name) {
    agents_.push_back(std::move(name));
    return *this;
}

CegmBuilder& CegmBuilder::state(std::string name) {
    states_.push_back(std::move(name));
    return *this;
}

CegmBuilder& CegmBuilder::initial(std::string name) {
    initial_ = std::move(name);
    return *this;
}

CegmBuilder& CegmBuilder::action(const std::string& agent, std::string name) {
    actions_[agent].push_back(std::move(name));
    return *this;
}

CegmBuilder& CegmBuilder::avail(const std::string& agent, const std::string& state, std::vector<std::string> acts) {
    if (!avail_.emplace(std::pair{agent, state}, std::move(acts)).second)
        throw ModelError("availability of agent '" + agent + "' in state '" + state + "' declared twice");
    return *this;
}

CegmBuilder& CegmBuilder::transition(const std::string& from, std::vector<std::string> profile, const std::string& to) {
    trans_.push_back({from, std::move(profile), to});
    return *this;
}

CegmBuilder& CegmBuilder::indistinguishable(const std::string& agent, const std::string& s1, const std::string& s2) {
    links_.push_back({agent, s1, s2});
    return *this;
}

CegmBuilder& CegmBuilder::prop(std::string name) {
    props_.push_back(std::move(name));
    return *this;
}

CegmBuilder& CegmBuilder::label(const std::string& prop, const std::string& state) {
    labels_.emplace_back(prop, state);
    return *this;
}

Cegm CegmBuilder::build() const {
    Cegm m;
    auto require_unique = [](const std::vector<std::string>& names, const char* what) {
        std::set<std::string> seen;
        for (const auto& n : names)
            if (!seen.insert(n).second) throw ModelError(std::string("duplicate ") + what + " '" + n + "'");
    };
    if (agents_.empty()) throw ModelError("model declares no agents");
    if (states_.empty()) throw ModelError("model declares no states");
    require_unique(agents_, "agent");
    require_unique(states_, "state");
    require_unique(props_, "proposition");
    m.agents_ = agents_;
    m.states_ = states_;
    m.props_ = props_;
    m.initial_ = initial_ ? m.state_id(*initial_) : 0;

    const std::size_t na = agents_.size();
    const std::size_t ns = states_.size();

    for (const auto& [a, acts] : actions_)
        if (!m.find_agent(a)) throw ModelError("actions declared for unknown agent '" + a + "'");
    m.actions_.resize(na);
    for (AgentId a = 0; a < na; ++a) {
        auto it = actions_.find(agents_[a]);
        if (it == actions_.end() || it->second.empty())
            throw ModelError("agent '" + agents_[a] + "' declares no actions");
        require_unique(it->second, "action");
        m.actions_[a] = it->second;
    }

    m.avail_.assign(ns, std::vector<std::vector<ActionId>>(na));
    for (StateId q = 0; q < ns; ++q)
        for (AgentId a = 0; a < na; ++a) {
            auto& av = m.avail_[q][a];
            av.resize(m.actions_[a].size());
            std::iota(av.begin(), av.end(), 0u);
        }
    for (const auto& [key, acts] : avail_) {
        const AgentId a = m.agent_id(key.first);
        const StateId q = m.state_id(key.second);
        if (acts.empty())
            throw ModelError("agent '" + key.first + "' has no available action in state '" + key.second + "'");
        std::vector<ActionId> ids;
        for (const auto& act : acts) {
            auto id = m.find_action(a, act);
            if (!id) throw ModelError("unknown action '" + act + "' for agent '" + key.first + "'");
            if (std::find(ids.begin(), ids.end(), *id) != ids.end())
                throw ModelError("action '" + act + "' listed twice in availability of agent '" + key.first + "'");
            ids.push_back(*id);
        }
        std::sort(ids.begin(), ids.end());
        m.avail_[q][a] = std::move(ids);
    }

    // Epistemic partitions.
    std::vector<UnionFind> uf(na, UnionFind(ns));
    for (const auto& l : links_) {
        auto a = m.find_agent(l.agent);
        if (!a) throw ModelError("indistinguishability declared for unknown agent '" + l.agent + "'");
        auto s1 = m.find_state(l.s1);
        auto s2 = m.find_state(l.s2);
        if (!s1 || !s2)
            throw ModelError("indistinguishability for agent '" + l.agent + "' mentions unknown state '" +
                             (s1 ? l.s2 : l.s1) + "'");
        uf[*a].unite(*s1, *s2);
    }
    m.class_of_.assign(na, std::vector<std::uint32_t>(ns));
    m.classes_.assign(na, {});
    for (AgentId a = 0; a < na; ++a) {
        std::vector<std::int64_t> root_class(ns, -1);
        for (StateId q = 0; q < ns; ++q) {
            auto r = uf[a].find(q);
            if (root_class[r] < 0) {
                root_class[r] = static_cast<std::int64_t>(m.classes_[a].size());
                m.classes_[a].emplace_back(ns);
            }
            m.class_of_[a][q] = static_cast<std::uint32_t>(root_class[r]);
            m.classes_[a][m.class_of_[a][q]].insert(q);
        }
        for (const auto& cls : m.classes_[a]) {
            const auto members = cls.members();
            for (auto q : members)
                if (m.avail_[q][a] != m.avail_[members.front()][a])
                    throw ModelError("non-uniform availability for agent '" + agents_[a] + "' in epistemic class " +
                                     join_states(m, cls) + " (states '" + states_[members.front()] + "' and '" +
                                     states_[q] + "' differ)");
        }
    }

    // Transitions.
    m.trans_.resize(ns);
    std::vector<std::vector<bool>> defined(ns);
    for (StateId q = 0; q < ns; ++q) {
        std::size_t rows = 1;
        for (AgentId a = 0; a < na; ++a) rows *= m.avail_[q][a].size();
        m.trans_[q].assign(rows, 0);
        defined[q].assign(rows, false);
    }
    for (const auto& t : trans_) {
        const StateId q = m.state_id(t.from);
        const StateId to = m.state_id(t.to);
        if (t.profile.size() != na)
            throw ModelError("transition from '" + t.from + "' has " + std::to_string(t.profile.size()) +
                             " actions, expected " + std::to_string(na));
        std::size_t idx = 0;
        for (AgentId a = 0; a < na; ++a) {
            auto id = m.find_action(a, t.profile[a]);
            if (!id) throw ModelError("unknown action '" + t.profile[a] + "' for agent '" + agents_[a] + "'");
            const auto& av = m.avail_[q][a];
            auto it = std::find(av.begin(), av.end(), *id);
            if (it == av.end())
                throw ModelError("transition on unavailable action '" + t.profile[a] + "' of agent '" + agents_[a] +
                                 "' in state '" + t.from + "'");
            idx = idx * av.size() + static_cast<std::size_t>(it - av.begin());
        }
        if (defined[q][idx]) {
            if (m.trans_[q][idx] != to)
                throw ModelError("conflicting transitions from '" + t.from + "' for the same action profile");
            continue;
        }
        defined[q][idx] = true;
        m.trans_[q][idx] = to;
    }
    for (StateId q = 0; q < ns; ++q)
        for (std::size_t idx = 0; idx < defined[q].size(); ++idx) {
            if (defined[q][idx]) continue;
            std::string prof;
            std::size_t rem = idx;
            std::vector<std::string> names(na);
            for (std::size_t a = na; a-- > 0;) {
                const auto& av = m.avail_[q][a];
                names[a] = m.actions_[a][av[rem % av.size()]];
                rem /= av.size();
            }
            for (std::size_t a = 0; a < na; ++a) prof += (a ? ", " : "") + names[a];
            throw ModelError("missing transition from '" + states_[q] + "' for available profile (" + prof + ")");
        }

    m.valuation_.assign(props_.size(), StateSet(ns));
    for (const auto& [p, s] : labels_) {
        auto pi = m.find_prop(p);
        if (!pi) throw ModelError("label for undeclared proposition '" + p + "'");
        m.valuation_[*pi].insert(m.state_id(s));
    }
    return m;
}

} // namespace atlh
