#pragma once

#include "atlh/cegm.hpp"
#include "atlh/formula.hpp"
#include "atlh/mcheck.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace atlh {

/// Single agent `a`, states "0".."2^n-1" all indistinguishable, one action
/// `idle` looping everywhere, p_i true at t iff bit i-1 of t is set.
Cegm gen_Mn(unsigned n);
/// gen_Mn(n) without state j (1 <= j < 2^n).
Cegm gen_Nnj(unsigned n, std::uint64_t j);
/// H[a] = n {p_1, ..., p_n}
Formula phi_n(unsigned n);

struct PointedModel {
    std::shared_ptr<const Cegm> model;
    StateId state = 0;
};

PointedModel pointed(Cegm m, StateId state);
PointedModel pointed(std::shared_ptr<const Cegm> m, StateId state);

/// The pairs (A_n, B_n): M^n at 0 against every N^n_j at 0.
std::vector<PointedModel> family_A(unsigned n);
std::vector<PointedModel> family_B(unsigned n);

struct FsgResult {
    /// Node count of a smallest winning tree, when one of at most kmax nodes exists.
    std::optional<std::uint64_t> min_nodes;
    /// The winning tree read as a formula over atoms, !, | and K[a].
    std::optional<Formula> tree;
    /// Set when the search gave up on a resource cap.
    std::string cap_reason;
    std::uint64_t positions = 0;
};

struct FsgOptions {
    std::uint64_t max_positions = 20'000'000;
};

/// Formula size game on single-agent models. Exhaustive; throws ModelError
/// on multi-agent models or more than 64 states in total.
FsgResult fsg_solve(const std::vector<PointedModel>& A, const std::vector<PointedModel>& B, std::uint64_t kmax,
                    const FsgOptions& opts = {});
std::optional<std::uint64_t> fsg_min_win(const std::vector<PointedModel>& A, const std::vector<PointedModel>& B,
                                         std::uint64_t kmax);

struct MelResult {
    Formula formula;
    std::uint64_t size = 0;
};

/// Smallest formula over atoms, !, | and K[a] (size <= size_cap) true on A and
/// false on B. Enumerates by size, keeping one formula per truth vector over
/// all states of the involved models. Throws CapExceeded past 16 states.
std::optional<MelResult> min_mel_formula(const std::vector<PointedModel>& A, const std::vector<PointedModel>& B,
                                         std::uint64_t size_cap);

/// On models whose transitions are all self-loops: the epistemic formula
/// with the same truth value, obtained by collapsing strategic operators.
/// Objective scope or empty coalition: <A> X f, <A> G f, <A> (g U f) become
/// f, and <A> F (f & G g) becomes f & g. Subjective scope with a non-empty
/// coalition: the same wrapped in E[A].
Formula collapse_reflexive(const Formula& f, SuccessScope scope);

struct SuccinctnessRow {
    unsigned n = 0;
    std::uint64_t len_phi_n = 0;
    std::uint64_t len_translated = 0;
    std::optional<std::uint64_t> fsg_min;
    std::optional<std::uint64_t> mel_min;
    double wallclock_ms = 0;
};

struct SuccinctnessParams {
    unsigned nmax = 4;
    /// Game and formula searches run for n up to this bound.
    unsigned search_nmax = 1;
    std::uint64_t search_cap = 40;
};

std::vector<SuccinctnessRow> succinctness_experiment(const SuccinctnessParams& params);
/// n,len_phi_n,len_translated,fsg_min,mel_min,wallclock_ms
std::string succinctness_csv(const std::vector<SuccinctnessRow>& rows);

} // namespace atlh
