#include "atlh/scenarios.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace atlh {

// ---------------------------------------------------------------------------
// Referendum models

Cegm gen_referendum_single() {
    CegmBuilder b;
    b.agent("v").agent("c");
    b.state("s0").state("s1").state("s2").initial("s0");
    b.action("v", "voteA").action("v", "voteNA").action("v", "eps");
    b.action("c", "eps");
    b.avail("v", "s1", {"eps"}).avail("v", "s2", {"eps"});
    b.transition("s0", {"voteA", "eps"}, "s1");
    b.transition("s0", {"voteNA", "eps"}, "s2");
    b.transition("s0", {"eps", "eps"}, "s0");
    b.transition("s1", {"eps", "eps"}, "s1");
    b.transition("s2", {"eps", "eps"}, "s2");
    b.indistinguishable("c", "s1", "s2");
    b.prop("Voted").label("Voted", "s1").label("Voted", "s2");
    b.prop("V_A").label("V_A", "s1");
    return b.build();
}

Cegm gen_referendum_double(DoubleVariant variant) {
    CegmBuilder b;
    b.agent("v").agent("c");
    for (const char* s : {"s0", "s1", "s2", "s3", "s4"}) b.state(s);
    b.initial("s0");
    const char* votes[] = {"voteAnB", "voteNAB", "voteAB", "voteNANB"};
    for (const char* a : votes) b.action("v", a);
    b.action("v", "eps").action("c", "eps");
    for (int i = 0; i < 4; ++i) {
        const std::string s = "s" + std::to_string(i + 1);
        b.avail("v", s, {"eps"});
        b.transition("s0", {votes[i], "eps"}, s);
        b.transition(s, {"eps", "eps"}, s);
    }
    b.transition("s0", {"eps", "eps"}, "s0");
    if (variant == DoubleVariant::M1) {
        b.indistinguishable("c", "s1", "s2").indistinguishable("c", "s3", "s4");
    } else {
        b.indistinguishable("c", "s1", "s2").indistinguishable("c", "s2", "s3").indistinguishable("c", "s3", "s4");
    }
    b.prop("Voted");
    for (const char* s : {"s1", "s2", "s3", "s4"}) b.label("Voted", s);
    b.prop("V_A").label("V_A", "s1").label("V_A", "s3");
    b.prop("V_B").label("V_B", "s2").label("V_B", "s3");
    return b.build();
}

Formula single_issue_coercion_formula() {
    return parse_formula("<v> F (Voted & V_A & G !(K[c] V_A | K[c] !V_A))"
                         " & <v> F (Voted & !V_A & G !(K[c] V_A | K[c] !V_A))");
}

Formula double_issue_coercion_formula() {
    const std::string hidden = "G !(K[c] V_A | K[c] !V_A | K[c] V_B | K[c] !V_B)";
    std::string text;
    for (const char* combo : {"V_A & V_B", "V_A & !V_B", "!V_A & V_B", "!V_A & !V_B"}) {
        if (!text.empty()) text += " & ";
        text += "<v> F (Voted & " + std::string(combo) + " & " + hidden + ")";
    }
    return parse_formula(text);
}

Formula double_issue_hartley_formula() { return parse_formula("<v> F (Voted & H[c] >= 2 {V_A, V_B})"); }

// ---------------------------------------------------------------------------
// ThreeBallot

std::string ballot_name(Ballot b) {
    std::string s;
    s += (b & 1) ? 'F' : 'B';
    s += (b & 2) ? 'F' : 'B';
    return s;
}

std::string vote_name(Vote v) {
    std::string s;
    s += (v & 1) ? "A" : "nA";
    s += (v & 2) ? "B" : "nB";
    return s;
}

std::string ballot_set_name(const BallotSet& bs) {
    return "{" + ballot_name(bs[0]) + ", " + ballot_name(bs[1]) + ", " + ballot_name(bs[2]) + "}";
}

namespace {

std::string ballot_set_tag(const BallotSet& bs) {
    return ballot_name(bs[0]) + ballot_name(bs[1]) + ballot_name(bs[2]);
}

std::string fill_action(Vote v, const BallotSet& bs) { return "fill_" + vote_name(v) + "_" + ballot_set_tag(bs); }

std::string receipt_action(Ballot b) { return "keep_" + ballot_name(b); }

} // namespace

std::vector<BallotSet> ballot_sets_for(Vote v) {
    const int need_a = (v & 1) ? 2 : 1;
    const int need_b = (v & 2) ? 2 : 1;
    std::vector<BallotSet> out;
    for (Ballot x = 0; x < 4; ++x)
        for (Ballot y = x; y < 4; ++y)
            for (Ballot z = y; z < 4; ++z) {
                const int a = (x & 1) + (y & 1) + (z & 1);
                const int b = ((x >> 1) & 1) + ((y >> 1) & 1) + ((z >> 1) & 1);
                if (a == need_a && b == need_b) out.push_back({x, y, z});
            }
    std::stable_sort(out.begin(), out.end(), [](const BallotSet& l, const BallotSet& r) {
        auto distinct = [](const BallotSet& s) { return s[0] != s[1] && s[1] != s[2]; };
        return distinct(l) && !distinct(r);
    });
    return out;
}

std::vector<Ballot> receipts_for(const BallotSet& bs) {
    std::vector<Ballot> out(bs.begin(), bs.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<ThreeBallotWorld> threeballot_worlds() {
    std::vector<ThreeBallotWorld> out;
    for (Vote v1 = 0; v1 < 4; ++v1)
        for (const auto& bs1 : ballot_sets_for(v1))
            for (Ballot rc : receipts_for(bs1))
                for (Vote v2 = 0; v2 < 4; ++v2)
                    for (const auto& bs2 : ballot_sets_for(v2)) out.push_back({v1, bs1, rc, v2, bs2});
    return out;
}

std::string terminal_state_name(const ThreeBallotWorld& w) {
    return "t_" + vote_name(w.vote1) + "_" + ballot_set_tag(w.ballots1) + "_" + ballot_name(w.receipt) + "_" +
           vote_name(w.vote2) + "_" + ballot_set_tag(w.ballots2);
}

Cegm gen_threeballot() {
    CegmBuilder b;
    b.agent("v").agent("c").agent("w");

    struct Choice {
        Vote vote;
        BallotSet bs;
    };
    std::vector<Choice> choices;
    for (Vote v = 0; v < 4; ++v)
        for (const auto& bs : ballot_sets_for(v)) choices.push_back({v, bs});

    for (const auto& ch : choices) b.action("v", fill_action(ch.vote, ch.bs));
    for (Ballot r = 0; r < 4; ++r) b.action("v", receipt_action(r));
    b.action("v", "eps");
    b.action("c", "eps");
    for (const auto& ch : choices) b.action("w", fill_action(ch.vote, ch.bs));
    b.action("w", "eps");

    std::vector<std::string> fills;
    for (const auto& ch : choices) fills.push_back(fill_action(ch.vote, ch.bs));

    b.state("init").initial("init");
    b.avail("v", "init", fills).avail("w", "init", {"eps"});
    for (const auto& ch : choices) {
        const std::string filled = "f_" + vote_name(ch.vote) + "_" + ballot_set_tag(ch.bs);
        b.state(filled);
        b.transition("init", {fill_action(ch.vote, ch.bs), "eps", "eps"}, filled);
        std::vector<std::string> keeps;
        for (Ballot r : receipts_for(ch.bs)) keeps.push_back(receipt_action(r));
        b.avail("v", filled, keeps).avail("w", filled, {"eps"});
        for (Ballot r : receipts_for(ch.bs)) {
            const std::string kept = filled + "_" + ballot_name(r);
            b.state(kept);
            b.transition(filled, {receipt_action(r), "eps", "eps"}, kept);
            b.avail("v", kept, {"eps"}).avail("w", kept, fills);
        }
    }

    b.prop("Voted").prop("V_A").prop("V_B");
    for (Vote v = 0; v < 4; ++v) b.prop("V1_eq_" + vote_name(v));
    b.prop("V1_eq_V2");

    // Coercer observation: receipt plus the multiset of all six ballots.
    std::map<std::pair<Ballot, std::array<int, 4>>, std::string> first_with_view;
    for (const auto& w : threeballot_worlds()) {
        const std::string t = terminal_state_name(w);
        const std::string kept = "f_" + vote_name(w.vote1) + "_" + ballot_set_tag(w.ballots1) + "_" + ballot_name(w.receipt);
        b.state(t);
        b.avail("v", t, {"eps"}).avail("w", t, {"eps"});
        b.transition(kept, {"eps", "eps", fill_action(w.vote2, w.ballots2)}, t);
        b.transition(t, {"eps", "eps", "eps"}, t);

        b.label("Voted", t);
        if (w.vote1 & 1) b.label("V_A", t);
        if (w.vote1 & 2) b.label("V_B", t);
        b.label("V1_eq_" + vote_name(w.vote1), t);
        if (w.vote1 == w.vote2) b.label("V1_eq_V2", t);

        std::array<int, 4> board{};
        for (Ballot x : w.ballots1) ++board[x];
        for (Ballot x : w.ballots2) ++board[x];
        auto [it, fresh] = first_with_view.emplace(std::pair{w.receipt, board}, t);
        if (!fresh) b.indistinguishable("c", it->second, t);
    }
    return b.build();
}

std::vector<InfosetRow> threeballot_infosets(const Cegm& m) {
    const AgentId c = m.agent_id("c");
    std::vector<const StateSet*> vote_props;
    for (Vote v = 0; v < 4; ++v) vote_props.push_back(&m.valuation("V1_eq_" + vote_name(v)));

    std::vector<InfosetRow> rows;
    std::map<std::tuple<Vote, BallotSet, Ballot>, std::size_t> row_of;
    for (Vote v = 0; v < 4; ++v)
        for (const auto& bs : ballot_sets_for(v))
            for (Ballot r : receipts_for(bs)) {
                row_of[{v, bs, r}] = rows.size();
                rows.push_back({v, bs, r, {}});
            }

    std::vector<std::set<std::vector<Vote>>> found(rows.size());
    for (const auto& w : threeballot_worlds()) {
        const StateId t = m.state_id(terminal_state_name(w));
        std::vector<Vote> info;
        for (Vote v = 0; v < 4; ++v)
            if (m.epistemic_class(c, t).intersects(*vote_props[v])) info.push_back(v);
        found[row_of.at({w.vote1, w.ballots1, w.receipt})].insert(std::move(info));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].infosets.assign(found[i].begin(), found[i].end());
        std::stable_sort(rows[i].infosets.begin(), rows[i].infosets.end(),
                         [](const auto& a, const auto& b) { return a.size() < b.size(); });
    }
    return rows;
}

std::vector<InfosetRow> threeballot_infosets() { return threeballot_infosets(gen_threeballot()); }

namespace {

std::string infoset_name(const std::vector<Vote>& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + vote_name(s[i]);
    return out + "}";
}

} // namespace

std::string infoset_table_text(const std::vector<InfosetRow>& rows) {
    std::ostringstream out;
    std::string last_group;
    for (const auto& r : rows) {
        std::string group = "Vote = " + vote_name(r.vote) + ", BS = " + ballot_set_name(r.ballots);
        if (group != last_group) {
            out << group << '\n';
            last_group = group;
        }
        out << "  " << ballot_name(r.receipt) << " |";
        for (std::size_t i = 0; i < r.infosets.size(); ++i) out << (i ? ", " : " ") << infoset_name(r.infosets[i]);
        out << '\n';
    }
    return out.str();
}

std::string infoset_table_csv(const std::vector<InfosetRow>& rows) {
    std::ostringstream out;
    out << "vote,ballot_set,receipt,infosets\n";
    for (const auto& r : rows) {
        out << vote_name(r.vote) << ',' << ballot_set_tag(r.ballots) << ',' << ballot_name(r.receipt) << ',';
        for (std::size_t i = 0; i < r.infosets.size(); ++i) {
            if (i) out << ';';
            for (std::size_t k = 0; k < r.infosets[i].size(); ++k) out << (k ? " " : "") << vote_name(r.infosets[i][k]);
        }
        out << '\n';
    }
    return out.str();
}

Formula coercion_epistemic_formula(EpistemicReading reading) {
    std::string text;
    for (Vote v = 0; v < 4; ++v) {
        const std::string eq = "V1_eq_" + vote_name(v);
        // a -> b written as !a | b
        const std::string guard = reading == EpistemicReading::Prose ? "V1_eq_V2" : "!V1_eq_V2";
        if (!text.empty()) text += " & ";
        text += "!<v, c> F (" + eq + " & (" + guard + " | K[c] " + eq + "))";
    }
    return parse_formula(text);
}

Formula coercion_hartley_formula(HartleyReading reading) {
    std::string text;
    for (Vote v = 0; v < 4; ++v) {
        const std::string eq = "V1_eq_" + vote_name(v);
        if (!text.empty()) text += " & ";
        if (reading == HartleyReading::SomeOutcome)
            text += "!<v, c, w> F (" + eq + " & !V1_eq_V2 & !H[c] = log(4) {V_A, V_B})";
        else
            text += "!<v, c> F (" + eq + " & (V1_eq_V2 | H[c] = log(4) {V_A, V_B}))";
    }
    return parse_formula(text);
}

bool coercion_epistemic(const Cegm& m, EpistemicReading reading, const CheckOptions& opts) {
    return check(m, m.initial(), coercion_epistemic_formula(reading), opts);
}

bool coercion_hartley(const Cegm& m, HartleyReading reading, const CheckOptions& opts) {
    return check(m, m.initial(), coercion_hartley_formula(reading), opts);
}

} // namespace atlh
