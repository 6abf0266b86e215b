#pragma once

// Test-only reference checker: materializes every memoryless strategy and
// walks every path prefix of length |St|+1. Deliberately naive.

#include "atlh/cegm.hpp"
#include "atlh/mcheck.hpp"

#include <functional>
#include <vector>

namespace oracle {

using namespace atlh;

// strategies[k][i][q]: action of coalition member i at q.
using Plan = std::vector<std::vector<ActionId>>;

inline std::vector<Plan> all_plans(const Cegm& m, const std::vector<AgentId>& A, bool uniform) {
    const std::size_t ns = m.num_states();
    std::vector<Plan> out;
    Plan cur(A.size(), std::vector<ActionId>(ns));
    std::function<void(std::size_t)> rec = [&](std::size_t slot) {
        if (slot == A.size() * ns) {
            if (uniform) {
                for (std::size_t i = 0; i < A.size(); ++i)
                    for (StateId q = 0; q < ns; ++q)
                        for (StateId r = 0; r < ns; ++r)
                            if (m.epistemic_class(A[i], q).contains(r) && cur[i][q] != cur[i][r]) return;
            }
            out.push_back(cur);
            return;
        }
        const std::size_t i = slot / ns;
        const auto q = static_cast<StateId>(slot % ns);
        for (ActionId act : m.avail(A[i], q)) {
            cur[i][q] = act;
            rec(slot + 1);
        }
    };
    rec(0);
    return out;
}

// Successors of q when A follows the plan and everybody else is free.
inline std::vector<StateId> plan_successors(const Cegm& m, const std::vector<AgentId>& A, const Plan& plan,
                                            StateId q) {
    const std::size_t na = m.num_agents();
    std::vector<std::vector<ActionId>> choices(na);
    for (AgentId a = 0; a < na; ++a) {
        bool fixed = false;
        for (std::size_t i = 0; i < A.size(); ++i)
            if (A[i] == a) {
                choices[a] = {plan[i][q]};
                fixed = true;
            }
        if (!fixed) choices[a].assign(m.avail(a, q).begin(), m.avail(a, q).end());
    }
    std::vector<StateId> out;
    std::vector<ActionId> profile(na);
    std::function<void(std::size_t)> rec = [&](std::size_t a) {
        if (a == na) {
            out.push_back(m.transition(q, profile));
            return;
        }
        for (ActionId act : choices[a]) {
            profile[a] = act;
            rec(a + 1);
        }
    };
    rec(0);
    return out;
}

// Calls visit(path) for every path prefix of the given length from q;
// stops and returns false as soon as visit does.
inline bool all_paths(const Cegm& m, const std::vector<AgentId>& A, const Plan& plan, StateId q, std::size_t len,
                      const std::function<bool(const std::vector<StateId>&)>& visit) {
    std::vector<StateId> path{q};
    std::function<bool()> rec = [&]() -> bool {
        if (path.size() == len) return visit(path);
        for (StateId r : plan_successors(m, A, plan, path.back())) {
            path.push_back(r);
            bool ok = rec();
            path.pop_back();
            if (!ok) return false;
        }
        return true;
    };
    return rec();
}

inline bool path_goal(TemporalKind kind, const std::vector<StateId>& path, const std::vector<StateSet>& args,
                      const std::vector<bool>& eventual_target) {
    switch (kind) {
    case TemporalKind::Next: return args[0].contains(path[1]);
    case TemporalKind::Always:
        for (auto s : path)
            if (!args[0].contains(s)) return false;
        return true;
    case TemporalKind::Until:
        for (auto s : path) {
            if (args[1].contains(s)) return true;
            if (!args[0].contains(s)) return false;
        }
        return false;
    case TemporalKind::EventuallyAlways:
        for (auto s : path)
            if (eventual_target[s]) return true;
        return false;
    }
    return false;
}

inline bool holds(const Cegm& m, StateId q, const std::vector<AgentId>& A, TemporalKind kind,
                  const std::vector<StateSet>& args, const CheckOptions& opts) {
    const std::size_t ns = m.num_states();
    const std::size_t len = ns + 1;
    std::vector<StateId> starts{q};
    if (opts.scope == SuccessScope::subjective)
        for (StateId r = 0; r < ns; ++r) {
            if (r == q) continue;
            for (auto a : A)
                if (m.epistemic_class(a, q).contains(r)) {
                    starts.push_back(r);
                    break;
                }
        }
    for (const auto& plan : all_plans(m, A, opts.strategy_mode == StrategyMode::ir)) {
        std::vector<bool> target(ns, false);
        if (kind == TemporalKind::EventuallyAlways) {
            for (StateId t = 0; t < ns; ++t) {
                if (!args[0].contains(t)) continue;
                target[t] = all_paths(m, A, plan, t, len, [&](const std::vector<StateId>& p) {
                    for (auto s : p)
                        if (!args[1].contains(s)) return false;
                    return true;
                });
            }
        }
        bool ok = true;
        for (StateId s : starts) {
            ok = all_paths(m, A, plan, s, len,
                           [&](const std::vector<StateId>& p) { return path_goal(kind, p, args, target); });
            if (!ok) break;
        }
        if (ok) return true;
    }
    return false;
}

} // namespace oracle
