#include "atlh/sampling.hpp"

#include <algorithm>

namespace atlh {

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

} // namespace

Cegm random_model(std::mt19937_64& rng, const ModelParams& params) {
    const std::size_t ns = uniform(rng, params.min_states, std::max(params.min_states, params.max_states));
    const std::size_t na = uniform(rng, params.min_agents, std::max(params.min_agents, params.max_agents));
    CegmBuilder b;
    std::vector<std::string> agents, states;
    for (std::size_t i = 0; i < na; ++i) b.agent(agents.emplace_back("a" + std::to_string(i)));
    for (std::size_t i = 0; i < ns; ++i) b.state(states.emplace_back("q" + std::to_string(i)));
    b.initial(states[0]);

    std::vector<std::vector<std::string>> acts(na);
    for (std::size_t a = 0; a < na; ++a) {
        const std::size_t k = uniform(rng, 1, std::max<std::size_t>(1, params.max_actions));
        for (std::size_t i = 0; i < k; ++i) b.action(agents[a], acts[a].emplace_back("x" + std::to_string(i)));
    }

    // Partitions first so availability can be drawn per class.
    std::vector<std::vector<std::vector<std::string>>> avail(na, std::vector<std::vector<std::string>>(ns));
    for (std::size_t a = 0; a < na; ++a) {
        std::vector<std::size_t> rep(ns);
        for (std::size_t q = 0; q < ns; ++q) {
            rep[q] = q;
            if (q > 0 && coin(rng, params.link_probability)) {
                std::size_t other = uniform(rng, 0, q - 1);
                rep[q] = rep[other];
                b.indistinguishable(agents[a], states[q], states[other]);
            }
        }
        for (std::size_t q = 0; q < ns; ++q) {
            if (rep[q] != q) {
                avail[a][q] = avail[a][rep[q]];
                continue;
            }
            std::vector<std::string> sub;
            while (sub.empty())
                for (const auto& act : acts[a])
                    if (coin(rng, 0.6)) sub.push_back(act);
            avail[a][q] = std::move(sub);
        }
        for (std::size_t q = 0; q < ns; ++q) b.avail(agents[a], states[q], avail[a][q]);
    }

    for (std::size_t q = 0; q < ns; ++q) {
        std::vector<std::size_t> odo(na, 0);
        while (true) {
            std::vector<std::string> profile(na);
            for (std::size_t a = 0; a < na; ++a) profile[a] = avail[a][q][odo[a]];
            const std::size_t to = params.self_loops_only ? q : uniform(rng, 0, ns - 1);
            b.transition(states[q], std::move(profile), states[to]);
            std::size_t a = na;
            bool wrapped = true;
            while (a-- > 0) {
                if (++odo[a] < avail[a][q].size()) {
                    wrapped = false;
                    break;
                }
                odo[a] = 0;
            }
            if (wrapped) break;
        }
    }

    for (std::size_t p = 0; p < params.num_props; ++p) {
        const std::string name = "p" + std::to_string(p);
        b.prop(name);
        for (std::size_t q = 0; q < ns; ++q)
            if (coin(rng, 0.5)) b.label(name, states[q]);
    }
    return b.build();
}

namespace {

class FormulaGen {
public:
    FormulaGen(std::mt19937_64& rng, const FormulaParams& p) : rng_(rng), p_(p), budget_(p.max_strategic) {}

    Formula gen(std::size_t depth) {
        if (depth == 0 || coin(rng_, 0.2)) return leaf();
        enum Kind { Not, And, Or, X, G, U, F, FG, K, E, H };
        std::vector<Kind> kinds{Not, And, Or};
        if (budget_ > 0) kinds.insert(kinds.end(), {X, G, U, F, FG});
        if (p_.allow_knows && !p_.agents.empty()) kinds.insert(kinds.end(), {K, E});
        if (p_.allow_hartley && !p_.agents.empty()) kinds.insert(kinds.end(), {H, H});
        const Kind k = kinds[uniform(rng_, 0, kinds.size() - 1)];
        switch (k) {
        case Not: return Formula::negation(gen(depth - 1));
        case And: {
            Formula l = gen(depth - 1);
            return Formula::conjunction(std::move(l), gen(depth - 1));
        }
        case Or: {
            Formula l = gen(depth - 1);
            return Formula::disjunction(std::move(l), gen(depth - 1));
        }
        case X: --budget_; return Formula::next(coalition(), gen(depth - 1));
        case G: --budget_; return Formula::always(coalition(), gen(depth - 1));
        case U: {
            --budget_;
            Coalition c = coalition();
            Formula l = gen(depth - 1);
            return Formula::until(std::move(c), std::move(l), gen(depth - 1));
        }
        case F: --budget_; return Formula::eventually(coalition(), gen(depth - 1));
        case FG: {
            --budget_;
            Coalition c = coalition();
            Formula l = gen(depth - 1);
            return Formula::eventually_always(std::move(c), std::move(l), gen(depth - 1));
        }
        case K: return Formula::knows(agent(), gen(depth - 1));
        case E: return Formula::everybody_knows(coalition(), gen(depth - 1));
        case H: {
            std::string a = agent();
            const Cmp cmp = static_cast<Cmp>(uniform(rng_, 0, 4));
            Threshold t = threshold();
            const std::size_t n = uniform(rng_, 1, std::max<std::size_t>(1, p_.max_beta));
            std::vector<Formula> beta;
            for (std::size_t i = 0; i < n; ++i) {
                Formula f = gen(depth - 1);
                if (std::find(beta.begin(), beta.end(), f) == beta.end()) beta.push_back(std::move(f));
            }
            return Formula::hartley(std::move(a), cmp, t, std::move(beta));
        }
        }
        return leaf();
    }

private:
    Formula leaf() {
        if (p_.props.empty() || coin(rng_, 0.08)) return coin(rng_, 0.5) ? Formula::top() : Formula::bottom();
        return Formula::atom(p_.props[uniform(rng_, 0, p_.props.size() - 1)]);
    }

    std::string agent() { return p_.agents[uniform(rng_, 0, p_.agents.size() - 1)]; }

    Coalition coalition() {
        Coalition c;
        for (const auto& a : p_.agents)
            if (coin(rng_, 0.5)) c.push_back(a);
        return c;
    }

    Threshold threshold() {
        if (p_.log_thresholds_only || coin(rng_, 0.6))
            return Threshold::log_of_count(uniform(rng_, 1, std::max<std::uint64_t>(1, p_.max_log_count)));
        static const std::uint64_t tenths[] = {0, 5, 10, 15, 20, 25, 6, 16};
        return Threshold::real(tenths[uniform(rng_, 0, std::size(tenths) - 1)], 10);
    }

    std::mt19937_64& rng_;
    const FormulaParams& p_;
    std::size_t budget_;
};

} // namespace

Formula random_formula(std::mt19937_64& rng, const FormulaParams& params) {
    return FormulaGen(rng, params).gen(params.max_depth);
}

} // namespace atlh
