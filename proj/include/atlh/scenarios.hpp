#pragma once

#include "atlh/cegm.hpp"
#include "atlh/formula.hpp"
#include "atlh/mcheck.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace atlh {

// ---------------------------------------------------------------------------
// Referendum models

/// One voter, one coercer, one issue: s0 -> s1 (voted for A) / s2 (against).
Cegm gen_referendum_single();

enum class DoubleVariant { M1, M2 };
/// Two issues. M1: coercer confuses {s1,s2} and {s3,s4}; M2: all of s1..s4.
Cegm gen_referendum_double(DoubleVariant variant);

/// Voter can vote either way with the coercer never knowing V_A.
Formula single_issue_coercion_formula();
/// Four-conjunct knowledge-based property for the double referendum.
Formula double_issue_coercion_formula();
/// <v> F (Voted & H[c] >= 2 {V_A, V_B})
Formula double_issue_hartley_formula();

// ---------------------------------------------------------------------------
// ThreeBallot, two voters and two issues

/// Bit 0: issue A field filled, bit 1: issue B field filled.
/// 0 = BB, 1 = FB, 2 = BF, 3 = FF.
using Ballot = std::uint8_t;
/// Bit 0: for A, bit 1: for B. 0 = nAnB, 1 = AnB, 2 = nAB, 3 = AB.
using Vote = std::uint8_t;
/// Sorted ascending.
using BallotSet = std::array<Ballot, 3>;

std::string ballot_name(Ballot b);
std::string vote_name(Vote v);
std::string ballot_set_name(const BallotSet& bs); // "{BB, FB, BF}"

/// The two ballot sets realizing a vote: the one with three distinct
/// ballots first.
std::vector<BallotSet> ballot_sets_for(Vote v);
/// Distinct ballots of a set, ascending.
std::vector<Ballot> receipts_for(const BallotSet& bs);

struct ThreeBallotWorld {
    Vote vote1;
    BallotSet ballots1;
    Ballot receipt;
    Vote vote2;
    BallotSet ballots2;
};

/// Terminal states of gen_threeballot() in state order.
std::vector<ThreeBallotWorld> threeballot_worlds();
std::string terminal_state_name(const ThreeBallotWorld& w);

/// Agents v (voter), c (coercer), w (other voter). v picks vote and ballots,
/// then a receipt; w then picks its vote and ballots. The coercer confuses
/// terminal states with the same receipt and the same bulletin board.
Cegm gen_threeballot();

struct InfosetRow {
    Vote vote;
    BallotSet ballots;
    Ballot receipt;
    /// Distinct projections onto vote1 of the coercer's classes, each sorted
    /// ascending; ordered by size, then lexicographically.
    std::vector<std::vector<Vote>> infosets;
};

/// Rows grouped by vote (nAnB, AnB, nAB, AB), then ballot set, then receipt.
std::vector<InfosetRow> threeballot_infosets(const Cegm& m);
std::vector<InfosetRow> threeballot_infosets();

std::string infoset_table_text(const std::vector<InfosetRow>& rows);
std::string infoset_table_csv(const std::vector<InfosetRow>& rows);

/// How the implication "votes differ -> coercer knows" is oriented.
enum class EpistemicReading {
    Prose,   // !V1_eq_V2 -> K[c] ...
    Literal, // V1_eq_V2 -> K[c] ...
};

/// How the information-theoretic property quantifies over the other voter.
enum class HartleyReading {
    /// No joint choice of v, c and w leads to a differing-votes outcome where
    /// the coercer's uncertainty is below log|Votes|.
    SomeOutcome,
    /// The displayed formula taken as written, with w as an opponent.
    Literal,
};

Formula coercion_epistemic_formula(EpistemicReading reading = EpistemicReading::Prose);
Formula coercion_hartley_formula(HartleyReading reading = HartleyReading::SomeOutcome);

bool coercion_epistemic(const Cegm& m, EpistemicReading reading = EpistemicReading::Prose,
                        const CheckOptions& opts = {});
bool coercion_hartley(const Cegm& m, HartleyReading reading = HartleyReading::SomeOutcome,
                      const CheckOptions& opts = {});

} // namespace atlh
