#pragma once

#include "atlh/cegm.hpp"
#include "atlh/formula.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace atlh {

struct ModelParams {
    std::size_t min_states = 1;
    std::size_t max_states = 6;
    std::size_t min_agents = 1;
    std::size_t max_agents = 3;
    std::size_t max_actions = 3;
    std::size_t num_props = 2;
    /// Chance that two states are merged into one epistemic class.
    double link_probability = 0.35;
    /// Every transition is a self-loop (reflexive models, as in the succinctness families).
    bool self_loops_only = false;
};

/// Random valid CEGM: agents a0.., states q0.., props p0... Availability is
/// drawn per epistemic class, so it is always uniform.
Cegm random_model(std::mt19937_64& rng, const ModelParams& params = {});

struct FormulaParams {
    std::vector<std::string> agents{"a0"};
    std::vector<std::string> props{"p0", "p1"};
    std::size_t max_depth = 3;
    std::size_t max_beta = 2;
    /// Upper bound on strategic operators (X, G, U, F, F-G pattern) in one formula.
    std::size_t max_strategic = 1;
    bool allow_knows = true;
    bool allow_hartley = true;
    /// Produce only log(k) thresholds; otherwise decimals are mixed in.
    bool log_thresholds_only = false;
    std::uint64_t max_log_count = 5;
};

Formula random_formula(std::mt19937_64& rng, const FormulaParams& params);

} // namespace atlh
