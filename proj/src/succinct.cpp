#include "atlh/succinct.hpp"

#include "atlh/error.hpp"
#include "atlh/translate.hpp"

#include <bit>
#include <chrono>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

namespace atlh {

Cegm gen_Mn(unsigned n) {
    if (n < 1 || n > 12) throw Error("n must be in 1..12");
    const std::uint64_t size = std::uint64_t{1} << n;
    CegmBuilder b;
    b.agent("a");
    b.action("a", "idle");
    for (std::uint64_t t = 0; t < size; ++t) b.state(std::to_string(t));
    for (unsigned i = 1; i <= n; ++i) b.prop("p_" + std::to_string(i));
    for (std::uint64_t t = 0; t < size; ++t) {
        const std::string s = std::to_string(t);
        b.transition(s, {"idle"}, s);
        if (t > 0) b.indistinguishable("a", "0", s);
        for (unsigned i = 1; i <= n; ++i)
            if ((t >> (i - 1)) & 1) b.label("p_" + std::to_string(i), s);
    }
    return b.build();
}

Cegm gen_Nnj(unsigned n, std::uint64_t j) {
    if (n < 1 || n > 12) throw Error("n must be in 1..12");
    const std::uint64_t size = std::uint64_t{1} << n;
    if (j == 0) throw Error("state 0 is the distinguished state and cannot be removed");
    if (j >= size) throw Error("j must be in 1.." + std::to_string(size - 1));
    CegmBuilder b;
    b.agent("a");
    b.action("a", "idle");
    for (std::uint64_t t = 0; t < size; ++t)
        if (t != j) b.state(std::to_string(t));
    for (unsigned i = 1; i <= n; ++i) b.prop("p_" + std::to_string(i));
    for (std::uint64_t t = 0; t < size; ++t) {
        if (t == j) continue;
        const std::string s = std::to_string(t);
        b.transition(s, {"idle"}, s);
        if (t > 0) b.indistinguishable("a", "0", s);
        for (unsigned i = 1; i <= n; ++i)
            if ((t >> (i - 1)) & 1) b.label("p_" + std::to_string(i), s);
    }
    return b.build();
}

Formula phi_n(unsigned n) {
    if (n < 1) throw Error("n must be positive");
    std::vector<Formula> beta;
    for (unsigned i = 1; i <= n; ++i) beta.push_back(Formula::atom("p_" + std::to_string(i)));
    return Formula::hartley("a", Cmp::Eq, Threshold::real(n, 1), std::move(beta));
}

PointedModel pointed(Cegm m, StateId state) { return pointed(std::make_shared<const Cegm>(std::move(m)), state); }

PointedModel pointed(std::shared_ptr<const Cegm> m, StateId state) {
    if (state >= m->num_states()) throw ModelError("pointed state out of range");
    return PointedModel{std::move(m), state};
}

std::vector<PointedModel> family_A(unsigned n) { return {pointed(gen_Mn(n), 0)}; }

std::vector<PointedModel> family_B(unsigned n) {
    std::vector<PointedModel> out;
    for (std::uint64_t j = 1; j < (std::uint64_t{1} << n); ++j) out.push_back(pointed(gen_Nnj(n, j), 0));
    return out;
}

// ---------------------------------------------------------------------------
// Shared universe: every state of every model mentioned in A or B.

namespace {

using Mask = std::uint64_t;

struct Universe {
    std::string agent;
    std::size_t size = 0;
    std::vector<std::string> props;
    std::vector<Mask> prop_mask;   // [prop]
    std::vector<Mask> class_mask;  // [state]: its epistemic class
    std::vector<Mask> classes;     // distinct classes
    Mask A = 0, B = 0;

    Mask all() const { return size == 64 ? ~Mask{0} : (Mask{1} << size) - 1; }

    Mask knows(Mask fp) const {
        Mask out = 0;
        for (Mask c : classes)
            if ((c & fp) == c) out |= c;
        return out;
    }
};

Universe make_universe(const std::vector<PointedModel>& A, const std::vector<PointedModel>& B) {
    Universe u;
    std::vector<const Cegm*> models;
    std::map<const Cegm*, std::size_t> offset;
    for (const auto* side : {&A, &B})
        for (const auto& pm : *side) {
            if (!pm.model) throw ModelError("pointed model without a model");
            const Cegm* m = pm.model.get();
            if (offset.count(m)) continue;
            if (m->num_agents() != 1) throw ModelError("formula size game needs single-agent models");
            if (u.agent.empty()) u.agent = m->agents()[0];
            if (m->agents()[0] != u.agent) throw ModelError("models disagree on the agent name");
            offset[m] = u.size;
            models.push_back(m);
            u.size += m->num_states();
            if (u.size > 64) throw ModelError("more than 64 states across the pointed models");
        }
    for (const Cegm* m : models)
        for (const auto& p : m->props())
            if (std::find(u.props.begin(), u.props.end(), p) == u.props.end()) u.props.push_back(p);
    u.prop_mask.assign(u.props.size(), 0);
    u.class_mask.assign(u.size, 0);
    for (const Cegm* m : models) {
        const std::size_t off = offset[m];
        for (std::size_t p = 0; p < u.props.size(); ++p) {
            auto it = std::find(m->props().begin(), m->props().end(), u.props[p]);
            if (it == m->props().end()) continue;
            m->valuation(static_cast<std::size_t>(it - m->props().begin())).for_each([&](StateId q) {
                u.prop_mask[p] |= Mask{1} << (off + q);
            });
        }
        for (const auto& cls : m->classes(0)) {
            Mask c = 0;
            cls.for_each([&](StateId q) { c |= Mask{1} << (off + q); });
            u.classes.push_back(c);
            cls.for_each([&](StateId q) { u.class_mask[off + q] = c; });
        }
    }
    for (const auto& pm : A) u.A |= Mask{1} << (offset[pm.model.get()] + pm.state);
    for (const auto& pm : B) u.B |= Mask{1} << (offset[pm.model.get()] + pm.state);
    return u;
}

constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();

struct PairHash {
    std::size_t operator()(const std::pair<Mask, Mask>& p) const noexcept {
        return std::hash<Mask>{}(p.first * 0x9e3779b97f4a7c15ULL ^ p.second);
    }
};

enum class Move : std::uint8_t { None, Atomic, Not, Or, Knows };

struct Entry {
    std::uint64_t exact = 0;  // 0: unknown
    std::uint64_t failed = 0; // no win within this many nodes
    Move move = Move::None;
    std::size_t prop = 0;
    Mask c1 = 0, c2 = 0; // Or: the two parts; Knows: C', D'
};

class Fsg {
public:
    Fsg(const Universe& u, const FsgOptions& opts) : u_(u), opts_(opts) {}

    std::uint64_t solve(Mask C, Mask D, std::uint64_t b) {
        if (b == 0 || capped_) return kInf;
        const auto key = std::make_pair(C, D);
        {
            const Entry& e = memo_[key];
            if (e.exact) return e.exact <= b ? e.exact : kInf;
            if (e.failed >= b) return kInf;
        }
        if (++positions_ > opts_.max_positions) {
            capped_ = true;
            return kInf;
        }
        Entry found;
        for (std::size_t p = 0; p < u_.props.size(); ++p)
            if ((C & ~u_.prop_mask[p]) == 0 && (D & u_.prop_mask[p]) == 0) {
                found.exact = 1;
                found.move = Move::Atomic;
                found.prop = p;
                break;
            }
        std::uint64_t best = found.exact ? 1 : kInf;
        auto limit = [&] { return std::min(b, best == kInf ? kInf : best - 1); };

        if (limit() >= 2) {
            std::uint64_t r = solve(D, C, limit() - 1);
            if (r != kInf) {
                best = r + 1;
                found = Entry{best, 0, Move::Not, 0, 0, 0};
            }
        }

        if (limit() >= 2) knows_moves(C, D, best, found, limit);

        // Winning is monotone in both sides, so splitting C into disjoint
        // parts loses nothing against overlapping covers.
        if (limit() >= 3 && std::popcount(C) >= 2) {
            const Mask low = C & (~C + 1);
            const Mask rest = C ^ low;
            for (Mask sub = rest;; sub = (sub - 1) & rest) {
                const Mask c1 = sub | low, c2 = C ^ c1;
                if (c2 != 0 && limit() >= 3) {
                    std::uint64_t r1 = solve(c1, D, limit() - 2);
                    if (r1 != kInf) {
                        std::uint64_t r2 = solve(c2, D, limit() - 1 - r1);
                        if (r2 != kInf) {
                            best = 1 + r1 + r2;
                            found = Entry{best, 0, Move::Or, 0, c1, c2};
                        }
                    }
                }
                if (sub == 0) break;
            }
        }

        Entry& e = memo_[key];
        if (capped_) return kInf;
        if (best != kInf) {
            e = found;
            return best;
        }
        e.failed = std::max(e.failed, b);
        return kInf;
    }

    Formula tree(Mask C, Mask D) const {
        const Entry& e = memo_.at({C, D});
        switch (e.move) {
        case Move::Atomic: return Formula::atom(u_.props[e.prop]);
        case Move::Not: return Formula::negation(tree(D, C));
        case Move::Or: return Formula::disjunction(tree(e.c1, D), tree(e.c2, D));
        case Move::Knows: return Formula::knows(u_.agent, tree(e.c1, e.c2));
        case Move::None: break;
        }
        throw Error("no winning tree recorded");
    }

    bool capped() const { return capped_; }
    std::uint64_t positions() const { return positions_; }

private:
    template <typename Limit>
    void knows_moves(Mask C, Mask D, std::uint64_t& best, Entry& found, Limit& limit) {
        Mask Cp = 0;
        for (Mask rest = C; rest; rest &= rest - 1) Cp |= u_.class_mask[std::countr_zero(rest)];
        // each element of D picks one state of its class; since classes are
        // disjoint, picking one per distinct class gives the minimal choices
        std::vector<Mask> classes;
        for (Mask rest = D; rest; rest &= rest - 1) {
            Mask c = u_.class_mask[std::countr_zero(rest)];
            if (std::find(classes.begin(), classes.end(), c) == classes.end()) classes.push_back(c);
        }
        std::function<void(std::size_t, Mask)> pick = [&](std::size_t i, Mask Dp) {
            if (limit() < 2 || capped_) return;
            if (i == classes.size()) {
                std::uint64_t r = solve(Cp, Dp, limit() - 1);
                if (r != kInf) {
                    best = r + 1;
                    found = Entry{best, 0, Move::Knows, 0, Cp, Dp};
                }
                return;
            }
            for (Mask rest = classes[i]; rest; rest &= rest - 1) pick(i + 1, Dp | (rest & (~rest + 1)));
        };
        pick(0, 0);
    }

    const Universe& u_;
    FsgOptions opts_;
    std::unordered_map<std::pair<Mask, Mask>, Entry, PairHash> memo_;
    std::uint64_t positions_ = 0;
    bool capped_ = false;
};

} // namespace

FsgResult fsg_solve(const std::vector<PointedModel>& A, const std::vector<PointedModel>& B, std::uint64_t kmax,
                    const FsgOptions& opts) {
    if (A.empty() || B.empty()) throw Error("both sides of the game need pointed models");
    Universe u = make_universe(A, B);
    Fsg game(u, opts);
    FsgResult out;
    for (std::uint64_t k = 1; k <= kmax; ++k) {
        std::uint64_t r = game.solve(u.A, u.B, k);
        if (game.capped()) {
            out.cap_reason = "position cap of " + std::to_string(opts.max_positions) + " reached at budget " +
                             std::to_string(k);
            break;
        }
        if (r != kInf) {
            out.min_nodes = r;
            out.tree = game.tree(u.A, u.B);
            break;
        }
    }
    out.positions = game.positions();
    return out;
}

std::optional<std::uint64_t> fsg_min_win(const std::vector<PointedModel>& A, const std::vector<PointedModel>& B,
                                         std::uint64_t kmax) {
    return fsg_solve(A, B, kmax).min_nodes;
}

// ---------------------------------------------------------------------------

std::optional<MelResult> min_mel_formula(const std::vector<PointedModel>& A, const std::vector<PointedModel>& B,
                                         std::uint64_t size_cap) {
    if (A.empty() || B.empty()) throw Error("both sides need pointed models");
    Universe u = make_universe(A, B);
    if (u.size > 16) throw CapExceeded("fingerprint space above 2^16 states");
    const Mask full = u.all();

    struct Origin {
        Move kind = Move::None;
        std::uint32_t x = 0, y = 0; // Atomic: prop; Not/Knows: operand; Or: operands
    };
    std::vector<std::uint8_t> size_of(std::size_t{1} << u.size, 0);
    std::vector<Origin> origin(std::size_t{1} << u.size);
    std::vector<std::vector<Mask>> level(1);

    std::optional<Mask> goal;
    auto add = [&](std::vector<Mask>& lvl, std::uint64_t k, Mask fp, Origin o) {
        if (size_of[fp]) return;
        size_of[fp] = static_cast<std::uint8_t>(std::min<std::uint64_t>(k, 255));
        origin[fp] = o;
        lvl.push_back(fp);
        if (!goal && (fp & u.A) == u.A && (fp & u.B) == 0) goal = fp;
    };

    for (std::uint64_t k = 1; k <= size_cap && !goal; ++k) {
        std::vector<Mask> lvl;
        if (k == 1) {
            for (std::size_t p = 0; p < u.props.size(); ++p)
                add(lvl, k, u.prop_mask[p], {Move::Atomic, static_cast<std::uint32_t>(p), 0});
        } else {
            for (Mask f : level[k - 1]) {
                add(lvl, k, ~f & full, {Move::Not, static_cast<std::uint32_t>(f), 0});
                add(lvl, k, u.knows(f), {Move::Knows, static_cast<std::uint32_t>(f), 0});
            }
            for (std::uint64_t i = 1; i + i <= k - 1; ++i) {
                const std::uint64_t j = k - 1 - i;
                for (Mask f : level[i])
                    for (Mask g : level[j])
                        add(lvl, k, f | g, {Move::Or, static_cast<std::uint32_t>(f), static_cast<std::uint32_t>(g)});
            }
        }
        level.push_back(std::move(lvl));
        if (goal) {
            std::function<Formula(Mask)> build = [&](Mask fp) -> Formula {
                const Origin& o = origin[fp];
                switch (o.kind) {
                case Move::Atomic: return Formula::atom(u.props[o.x]);
                case Move::Not: return Formula::negation(build(o.x));
                case Move::Knows: return Formula::knows(u.agent, build(o.x));
                case Move::Or: return Formula::disjunction(build(o.x), build(o.y));
                default: break;
                }
                throw Error("broken fingerprint table");
            };
            return MelResult{build(*goal), k};
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

Formula collapse_reflexive(const Formula& f, SuccessScope scope) {
    std::vector<Formula> kids;
    for (const auto& k : f.children()) kids.push_back(collapse_reflexive(k, scope));
    auto wrap = [&](Formula g) {
        if (scope == SuccessScope::objective || f.coalition().empty()) return g;
        return Formula::everybody_knows(f.coalition(), std::move(g));
    };
    switch (f.op()) {
    case Op::Atom:
    case Op::True:
    case Op::False: return f;
    case Op::Not: return Formula::negation(kids[0]);
    case Op::And: return Formula::conjunction(kids[0], kids[1]);
    case Op::Or: return Formula::disjunction(kids[0], kids[1]);
    case Op::CoalX:
    case Op::CoalG: return wrap(kids[0]);
    case Op::CoalU: return wrap(kids[1]);
    case Op::CoalFG: return wrap(Formula::conjunction(kids[0], kids[1]));
    case Op::Knows: return Formula::knows(f.agent(), kids[0]);
    case Op::MutualKnows: return Formula::everybody_knows(f.coalition(), kids[0]);
    case Op::Hartley: return Formula::hartley(f.agent(), f.cmp(), f.threshold(), std::move(kids));
    }
    return f;
}

// ---------------------------------------------------------------------------

std::vector<SuccinctnessRow> succinctness_experiment(const SuccinctnessParams& params) {
    std::vector<SuccinctnessRow> rows;
    for (unsigned n = 1; n <= params.nmax; ++n) {
        const auto t0 = std::chrono::steady_clock::now();
        SuccinctnessRow r;
        r.n = n;
        const Formula phi = phi_n(n);
        r.len_phi_n = formula_length(phi);
        r.len_translated = formula_length(h_to_k(phi));
        if (n <= params.search_nmax) {
            auto A = family_A(n), B = family_B(n);
            r.fsg_min = fsg_min_win(A, B, params.search_cap);
            if (auto mel = min_mel_formula(A, B, params.search_cap)) r.mel_min = mel->size;
        }
        r.wallclock_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back(r);
    }
    return rows;
}

std::string succinctness_csv(const std::vector<SuccinctnessRow>& rows) {
    std::ostringstream o;
    o << "n,len_phi_n,len_translated,fsg_min,mel_min,wallclock_ms\n";
    for (const auto& r : rows) {
        o << r.n << ',' << r.len_phi_n << ',' << r.len_translated << ',';
        if (r.fsg_min) o << *r.fsg_min;
        o << ',';
        if (r.mel_min) o << *r.mel_min;
        o << ',';
        o.setf(std::ios::fixed);
        o.precision(3);
        o << r.wallclock_ms << '\n';
    }
    return o.str();
}

} // namespace atlh
