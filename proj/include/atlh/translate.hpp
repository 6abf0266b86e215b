#pragma once

#include "atlh/formula.hpp"
#include "atlh/mcheck.hpp"
#include "atlh/sampling.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace atlh {

struct TranslateOptions {
    std::size_t max_beta = 4;
    /// Limit on formula_length of the produced formula.
    std::uint64_t max_nodes = 1'000'000;
};

/// Replaces K[a] g by g' & H[a] = log(1) {g'} and E[A] g by the conjunction
/// of the rewritten K[a] g over a in A (true for empty A). Innermost first.
Formula k_to_h(const Formula& f);

/// The 2^n conjunctions of each member or its negation, with t = 1 (member
/// kept) before t = 0 at every position, first position most significant.
std::vector<Formula> phi_beta(const std::vector<Formula>& beta, const TranslateOptions& opts = {});

/// Tuples over {0,1} of length 2^n with exactly m zeros, in ascending
/// lexicographic order.
std::vector<std::vector<std::uint8_t>> t_nm(unsigned n, std::uint64_t m);

/// P_m: exactly m of the phi_beta cells are non-empty in [q]_a. Disjuncts
/// follow t_nm in descending order.
Formula h_eq_to_k(const std::string& agent, const std::vector<Formula>& beta, std::uint64_t m,
                  const TranslateOptions& opts = {});

/// Replaces every Hartley node by a disjunction of P_c over the class
/// counts c in 1..2^n that satisfy the threshold (true or false when all or
/// none do). Innermost first. Throws CapExceeded past the limits.
Formula h_to_k(const Formula& f, const TranslateOptions& opts = {});

struct EquivalenceParams {
    std::uint64_t seed = 1;
    std::size_t samples = 1000;
    ModelParams model;
    std::size_t max_beta = 2;
    std::size_t max_depth = 3;
    std::size_t max_strategic = 1;
    CheckOptions check;
    TranslateOptions translate;
    unsigned threads = 1;
};

struct EquivalenceSample {
    std::uint64_t seed = 0;
    std::size_t states = 0;
    std::string formula;
    /// First state where a translation disagrees with the original.
    std::optional<std::string> mismatch_state;

    /// seed=<u64> states=<n> formula=<text> verdict=ok|mismatch@<state>
    std::string line() const;
};

struct EquivalenceReport {
    std::vector<EquivalenceSample> samples;
    std::size_t failures() const;
    std::string text() const;
};

/// Per-sample seeds are derived from the root seed, so the report does not
/// depend on the thread count.
EquivalenceReport check_translation_equivalence(const EquivalenceParams& params);

} // namespace atlh
