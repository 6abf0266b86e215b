#include "atlh/mcheck.hpp"

#include "atlh/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

namespace atlh {

const StateSet& Labeling::at(const Formula& f) const {
    auto it = sets_.find(f);
    if (it == sets_.end()) throw Error("formula '" + f.str() + "' is not labeled");
    return it->second;
}

std::vector<AgentId> resolve_coalition(const Cegm& m, const Coalition& c) {
    std::vector<AgentId> out;
    out.reserve(c.size());
    for (const auto& name : c) out.push_back(m.agent_id(name));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Hartley measure

std::size_t hartley_classes(const Cegm& m, AgentId a, StateId q, std::span<const StateSet> beta_labels) {
    const StateSet& cls = m.epistemic_class(a, q);
    if (beta_labels.size() <= 64) {
        std::set<std::uint64_t> seen;
        cls.for_each([&](StateId r) {
            std::uint64_t v = 0;
            for (std::size_t i = 0; i < beta_labels.size(); ++i)
                if (beta_labels[i].contains(r)) v |= std::uint64_t{1} << i;
            seen.insert(v);
        });
        return seen.size();
    }
    std::set<std::vector<bool>> seen;
    cls.for_each([&](StateId r) {
        std::vector<bool> v(beta_labels.size());
        for (std::size_t i = 0; i < beta_labels.size(); ++i) v[i] = beta_labels[i].contains(r);
        seen.insert(std::move(v));
    });
    return seen.size();
}

namespace {

// Sign of log2(count) - p/q.
int compare_log_rational(std::uint64_t count, std::uint64_t p, std::uint64_t q) {
    using u128 = unsigned __int128;
    const std::uint64_t b = static_cast<std::uint64_t>(std::bit_width(count)) - 1; // floor(log2 count)
    const u128 lo = static_cast<u128>(b) * q;
    if (std::has_single_bit(count)) {
        if (lo == p) return 0;
        return lo > p ? 1 : -1;
    }
    // log2(count) lies strictly between b and b+1 and is irrational.
    if (static_cast<u128>(p) <= lo) return 1;
    if (static_cast<u128>(p) >= lo + q) return -1;
    using boost::multiprecision::cpp_int;
    cpp_int lhs = boost::multiprecision::pow(cpp_int(count), static_cast<unsigned>(q));
    cpp_int rhs = cpp_int(1) << static_cast<unsigned>(p);
    return lhs > rhs ? 1 : -1;
}

} // namespace

bool compare_log(std::uint64_t count, Cmp cmp, const Threshold& t) {
    if (count == 0) throw Error("compare_log needs a positive count");
    int c;
    if (t.is_log()) {
        c = count < t.count() ? -1 : (count > t.count() ? 1 : 0);
    } else {
        c = compare_log_rational(count, t.numerator(), t.denominator());
    }
    switch (cmp) {
    case Cmp::Lt: return c < 0;
    case Cmp::Le: return c <= 0;
    case Cmp::Gt: return c > 0;
    case Cmp::Ge: return c >= 0;
    case Cmp::Eq: return c == 0;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Strategy space

namespace {

struct Decision {
    std::size_t agent; // index into coalition
    std::vector<StateId> states;
    std::uint32_t options;
};

// One-step structure of the game for a fixed coalition.
class Game {
public:
    Game(const Cegm& m, std::vector<AgentId> coalition, const CheckOptions& opts)
        : m_(m), A_(std::move(coalition)), mode_(opts.strategy_mode) {
        const std::size_t ns = m.num_states();
        const std::size_t na = m.num_agents();
        succ_.resize(ns);
        std::vector<std::uint32_t> pos(na);
        for (StateId q = 0; q < ns; ++q) {
            std::size_t joints = 1;
            for (auto a : A_) joints *= m.avail(a, q).size();
            succ_[q].assign(joints, StateSet(ns));
            auto row = m.transition_row(q);
            for (std::size_t idx = 0; idx < row.size(); ++idx) {
                std::size_t rem = idx;
                for (std::size_t a = na; a-- > 0;) {
                    auto sz = m.avail(static_cast<AgentId>(a), q).size();
                    pos[a] = static_cast<std::uint32_t>(rem % sz);
                    rem /= sz;
                }
                std::size_t j = 0;
                for (auto a : A_) j = j * m.avail(a, q).size() + pos[a];
                succ_[q][j].insert(row[idx]);
            }
        }

        start_.reserve(ns);
        for (StateId q = 0; q < ns; ++q) {
            StateSet s(ns);
            s.insert(q);
            if (opts.scope == SuccessScope::subjective)
                for (auto a : A_) s |= m.epistemic_class(a, q);
            start_.push_back(std::move(s));
        }

        for (std::size_t i = 0; i < A_.size(); ++i) {
            const AgentId a = A_[i];
            if (mode_ == StrategyMode::ir) {
                for (const auto& cls : m.classes(a)) {
                    auto members = cls.members();
                    auto n = static_cast<std::uint32_t>(m.avail(a, members.front()).size());
                    if (n > 1) decisions_.push_back({i, std::move(members), n});
                }
            } else {
                for (StateId q = 0; q < ns; ++q) {
                    auto n = static_cast<std::uint32_t>(m.avail(a, q).size());
                    if (n > 1) decisions_.push_back({i, {q}, n});
                }
            }
        }
        total_ = 1;
        for (const auto& d : decisions_) {
            if (total_ > (std::uint64_t{1} << 62) / d.options) {
                // only fatal if someone needs to enumerate
                overflow_ = true;
                break;
            }
            total_ *= d.options;
        }
    }

    const Cegm& model() const { return m_; }
    const std::vector<AgentId>& coalition() const { return A_; }
    std::uint64_t total() const {
        if (overflow_) throw CapExceeded("coalition has more than 2^62 strategies");
        return total_;
    }
    const std::vector<Decision>& decisions() const { return decisions_; }
    const StateSet& start(StateId q) const { return start_[q]; }
    const std::vector<StateSet>& options(StateId q) const { return succ_[q]; }

    /// Decision choices for a strategy index, first decision most significant.
    std::vector<std::uint32_t> decode(std::uint64_t index) const {
        std::vector<std::uint32_t> c(decisions_.size());
        for (std::size_t d = decisions_.size(); d-- > 0;) {
            c[d] = static_cast<std::uint32_t>(index % decisions_[d].options);
            index /= decisions_[d].options;
        }
        return c;
    }

    void advance(std::vector<std::uint32_t>& c) const {
        for (std::size_t d = decisions_.size(); d-- > 0;) {
            if (++c[d] < decisions_[d].options) return;
            c[d] = 0;
        }
    }

    /// Joint coalition action (index into options(q)) per state.
    void joints(const std::vector<std::uint32_t>& choice, std::vector<std::uint32_t>& scratch,
                std::vector<std::uint32_t>& out) const {
        const std::size_t ns = m_.num_states();
        scratch.assign(A_.size() * ns, 0);
        for (std::size_t d = 0; d < decisions_.size(); ++d)
            for (auto q : decisions_[d].states) scratch[decisions_[d].agent * ns + q] = choice[d];
        out.resize(ns);
        for (StateId q = 0; q < ns; ++q) {
            std::uint32_t j = 0;
            for (std::size_t i = 0; i < A_.size(); ++i)
                j = j * static_cast<std::uint32_t>(m_.avail(A_[i], q).size()) + scratch[i * ns + q];
            out[q] = j;
        }
    }

    Strategy strategy_from_joints(const std::vector<std::uint32_t>& joint) const {
        const std::size_t ns = m_.num_states();
        Strategy s;
        s.agents = A_;
        s.actions.assign(A_.size(), std::vector<ActionId>(ns));
        for (StateId q = 0; q < ns; ++q) {
            std::uint32_t j = joint[q];
            for (std::size_t i = A_.size(); i-- > 0;) {
                auto av = m_.avail(A_[i], q);
                s.actions[i][q] = av[j % av.size()];
                j /= static_cast<std::uint32_t>(av.size());
            }
        }
        return s;
    }

    Strategy strategy(const std::vector<std::uint32_t>& choice) const {
        std::vector<std::uint32_t> scratch, joint;
        joints(choice, scratch, joint);
        return strategy_from_joints(joint);
    }

private:
    const Cegm& m_;
    std::vector<AgentId> A_;
    StrategyMode mode_;
    std::vector<std::vector<StateSet>> succ_; // [state][joint coalition action]
    std::vector<StateSet> start_;
    std::vector<Decision> decisions_;
    std::uint64_t total_ = 1;
    bool overflow_ = false;
};

// Win region of a fixed strategy: states from which every path of the
// restricted graph satisfies the goal.
StateSet win_region(const Game& g, const std::vector<std::uint32_t>& joint, TemporalKind kind,
                    std::span<const StateSet> args) {
    const std::size_t ns = g.model().num_states();
    auto next = [&](StateId q) -> const StateSet& { return g.options(q)[joint[q]]; };
    auto always = [&](const StateSet& target) {
        StateSet z = target;
        bool changed = true;
        while (changed) {
            changed = false;
            z.for_each([&](StateId q) {
                if (!next(q).subset_of(z)) {
                    z.erase(q);
                    changed = true;
                }
            });
        }
        return z;
    };
    auto until = [&](const StateSet& hold, const StateSet& reach) {
        StateSet z = reach;
        StateSet pending = hold;
        pending.subtract(z);
        bool changed = true;
        while (changed) {
            changed = false;
            pending.for_each([&](StateId q) {
                if (next(q).subset_of(z)) {
                    z.insert(q);
                    pending.erase(q);
                    changed = true;
                }
            });
        }
        return z;
    };
    switch (kind) {
    case TemporalKind::Next: {
        StateSet w(ns);
        for (StateId q = 0; q < ns; ++q)
            if (next(q).subset_of(args[0])) w.insert(q);
        return w;
    }
    case TemporalKind::Always: return always(args[0]);
    case TemporalKind::Until: return until(args[0], args[1]);
    case TemporalKind::EventuallyAlways: {
        StateSet target = args[0] & always(args[1]);
        return until(StateSet::full(ns), target);
    }
    }
    return StateSet(ns);
}

// Positional fixpoints for perfect-information strategies. Returns the
// region and fills `joint` with a strategy winning from all of it.
StateSet fixpoint_region(const Game& g, TemporalKind kind, std::span<const StateSet> args,
                         std::vector<std::uint32_t>& joint) {
    const std::size_t ns = g.model().num_states();
    joint.assign(ns, 0);
    auto pick = [&](StateId q, const StateSet& z) -> bool {
        const auto& opts = g.options(q);
        for (std::uint32_t j = 0; j < opts.size(); ++j)
            if (opts[j].subset_of(z)) {
                joint[q] = j;
                return true;
            }
        return false;
    };
    switch (kind) {
    case TemporalKind::Next: {
        StateSet w(ns);
        for (StateId q = 0; q < ns; ++q)
            if (pick(q, args[0])) w.insert(q);
        return w;
    }
    case TemporalKind::Always: {
        StateSet z = args[0];
        bool changed = true;
        while (changed) {
            changed = false;
            z.for_each([&](StateId q) {
                if (!pick(q, z)) {
                    z.erase(q);
                    changed = true;
                }
            });
        }
        // Re-pick against the final region.
        z.for_each([&](StateId q) { pick(q, z); });
        return z;
    }
    case TemporalKind::Until: {
        StateSet z = args[1];
        StateSet pending = args[0];
        pending.subtract(z);
        bool changed = true;
        while (changed) {
            changed = false;
            StateSet snapshot = z;
            pending.for_each([&](StateId q) {
                if (pick(q, snapshot)) {
                    z.insert(q);
                    pending.erase(q);
                    changed = true;
                }
            });
        }
        return z;
    }
    case TemporalKind::EventuallyAlways: break;
    }
    throw Error("no positional fixpoint for this goal");
}

bool use_fixpoint(const Game& g, const CheckOptions& opts, TemporalKind kind) {
    if (!opts.positional_shortcut || kind == TemporalKind::EventuallyAlways) return false;
    if (opts.strategy_mode == StrategyMode::Ir) return true;
    return std::all_of(g.decisions().begin(), g.decisions().end(),
                       [](const Decision& d) { return d.states.size() == 1; });
}

std::size_t expected_args(TemporalKind kind) {
    return kind == TemporalKind::Next || kind == TemporalKind::Always ? 1 : 2;
}

// Calls fn(begin, end) over chunks of [0, total), on `threads` workers.
// fn returns false to stop its worker early.
template <typename Fn>
void parallel_chunks(std::uint64_t total, unsigned threads, Fn&& fn) {
    if (threads <= 1 || total < 64) {
        fn(std::uint64_t{0}, total);
        return;
    }
    const std::uint64_t chunk = std::max<std::uint64_t>(1, total / (std::uint64_t{threads} * 16));
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        while (true) {
            std::uint64_t b = next.fetch_add(chunk);
            if (b >= total) return;
            if (!fn(b, std::min(total, b + chunk))) return;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

StateSet satisfied_starts(const Game& g, const StateSet& win) {
    const std::size_t ns = g.model().num_states();
    StateSet r(ns);
    for (StateId q = 0; q < ns; ++q)
        if (g.start(q).subset_of(win)) r.insert(q);
    return r;
}

} // namespace

std::uint64_t count_strategies(const Cegm& m, const std::vector<AgentId>& coalition, const CheckOptions& opts) {
    try {
        return Game(m, coalition, opts).total();
    } catch (const CapExceeded&) {
        return std::numeric_limits<std::uint64_t>::max();
    }
}

void enumerate_strategies(const Cegm& m, const std::vector<AgentId>& coalition, const CheckOptions& opts,
                          const std::function<bool(const Strategy&)>& visit) {
    Game g(m, coalition, opts);
    auto choice = g.decode(0);
    for (std::uint64_t i = 0; i < g.total(); ++i) {
        if (!visit(g.strategy(choice))) return;
        g.advance(choice);
    }
}

StateSet strategic_states(const Cegm& m, const std::vector<AgentId>& coalition, TemporalKind kind,
                          std::span<const StateSet> args, const CheckOptions& opts) {
    if (args.size() != expected_args(kind)) throw Error("wrong number of operand labels");
    Game g(m, coalition, opts);
    const std::size_t ns = m.num_states();
    if (use_fixpoint(g, opts, kind)) {
        std::vector<std::uint32_t> joint;
        return satisfied_starts(g, fixpoint_region(g, kind, args, joint));
    }
    const StateSet full = StateSet::full(ns);
    StateSet result(ns);
    std::mutex mu;
    std::atomic<bool> done{false};
    parallel_chunks(g.total(), opts.threads, [&](std::uint64_t b, std::uint64_t e) {
        StateSet local(ns);
        std::vector<std::uint32_t> scratch, joint;
        auto choice = g.decode(b);
        for (std::uint64_t i = b; i < e && !done.load(std::memory_order_relaxed); ++i) {
            g.joints(choice, scratch, joint);
            local |= satisfied_starts(g, win_region(g, joint, kind, args));
            if (local == full) done = true;
            g.advance(choice);
        }
        std::lock_guard lock(mu);
        result |= local;
        return !done.load();
    });
    return result;
}

bool strategic_holds(const Cegm& m, StateId q, const std::vector<AgentId>& coalition, TemporalKind kind,
                     std::span<const StateSet> args, const CheckOptions& opts, Strategy* witness) {
    if (args.size() != expected_args(kind)) throw Error("wrong number of operand labels");
    if (q >= m.num_states()) throw ModelError("state index out of range");
    Game g(m, coalition, opts);
    const StateSet& start = g.start(q);
    if (use_fixpoint(g, opts, kind)) {
        std::vector<std::uint32_t> joint;
        StateSet z = fixpoint_region(g, kind, args, joint);
        if (!start.subset_of(z)) return false;
        if (witness) *witness = g.strategy_from_joints(joint);
        return true;
    }
    // Smallest winning strategy index, so the witness does not depend on threads.
    std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
    parallel_chunks(g.total(), opts.threads, [&](std::uint64_t b, std::uint64_t e) {
        if (b >= best.load()) return false;
        std::vector<std::uint32_t> scratch, joint;
        auto choice = g.decode(b);
        for (std::uint64_t i = b; i < e && i < best.load(); ++i) {
            g.joints(choice, scratch, joint);
            if (start.subset_of(win_region(g, joint, kind, args))) {
                std::uint64_t cur = best.load();
                while (i < cur && !best.compare_exchange_weak(cur, i)) {
                }
                return false;
            }
            g.advance(choice);
        }
        return true;
    });
    const std::uint64_t found = best.load();
    if (found == std::numeric_limits<std::uint64_t>::max()) return false;
    if (witness) *witness = g.strategy(g.decode(found));
    return true;
}

// ---------------------------------------------------------------------------
// Labeling

namespace {

class Labeler {
public:
    Labeler(Labeling& lab, const Cegm& m, const CheckOptions& opts) : lab_(lab), m_(m), opts_(opts) {}

    const StateSet& run(const Formula& f) {
        if (lab_.contains(f)) return lab_.at(f);
        std::vector<StateSet> kids;
        for (const auto& k : f.children()) kids.push_back(run(k));
        lab_.set(f, compute(f, kids));
        return lab_.at(f);
    }

private:
    StateSet compute(const Formula& f, std::vector<StateSet>& kids) {
        const std::size_t ns = m_.num_states();
        switch (f.op()) {
        case Op::Atom: return m_.valuation(f.name());
        case Op::True: return StateSet::full(ns);
        case Op::False: return StateSet(ns);
        case Op::Not: return kids[0].complement();
        case Op::And: return kids[0] & kids[1];
        case Op::Or: return kids[0] | kids[1];
        case Op::CoalX: return strategic(f, TemporalKind::Next, kids);
        case Op::CoalG: return strategic(f, TemporalKind::Always, kids);
        case Op::CoalU: return strategic(f, TemporalKind::Until, kids);
        case Op::CoalFG: return strategic(f, TemporalKind::EventuallyAlways, kids);
        case Op::Knows: return knows(m_.agent_id(f.agent()), kids[0]);
        case Op::MutualKnows: {
            StateSet r = StateSet::full(ns);
            for (auto a : resolve_coalition(m_, f.coalition())) r &= knows(a, kids[0]);
            return r;
        }
        case Op::Hartley: {
            const AgentId a = m_.agent_id(f.agent());
            StateSet r(ns);
            for (const auto& cls : m_.classes(a)) {
                StateId rep = cls.members().front();
                if (compare_log(hartley_classes(m_, a, rep, kids), f.cmp(), f.threshold())) r |= cls;
            }
            return r;
        }
        }
        return StateSet(ns);
    }

    StateSet knows(AgentId a, const StateSet& s) const {
        StateSet r(m_.num_states());
        for (const auto& cls : m_.classes(a))
            if (cls.subset_of(s)) r |= cls;
        return r;
    }

    StateSet strategic(const Formula& f, TemporalKind kind, const std::vector<StateSet>& kids) {
        return strategic_states(m_, resolve_coalition(m_, f.coalition()), kind, kids, opts_);
    }

    Labeling& lab_;
    const Cegm& m_;
    const CheckOptions& opts_;
};

std::optional<TemporalKind> temporal_kind(Op op) {
    switch (op) {
    case Op::CoalX: return TemporalKind::Next;
    case Op::CoalG: return TemporalKind::Always;
    case Op::CoalU: return TemporalKind::Until;
    case Op::CoalFG: return TemporalKind::EventuallyAlways;
    default: return std::nullopt;
    }
}

} // namespace

void label_into(Labeling& lab, const Cegm& m, const Formula& f, const CheckOptions& opts) {
    Labeler(lab, m, opts).run(f);
}

Labeling label(const Cegm& m, const Formula& f, const CheckOptions& opts) {
    Labeling lab;
    label_into(lab, m, f, opts);
    return lab;
}

bool check(const Cegm& m, StateId q, const Formula& f, const CheckOptions& opts) {
    if (q >= m.num_states()) throw ModelError("state index out of range");
    return label(m, f, opts).at(f).contains(q);
}

std::optional<Strategy> strategic_witness(const Cegm& m, StateId q, const Formula& f, const CheckOptions& opts) {
    auto kind = temporal_kind(f.op());
    if (!kind) return std::nullopt;
    Labeling lab;
    std::vector<StateSet> args;
    for (const auto& k : f.children()) {
        label_into(lab, m, k, opts);
        args.push_back(lab.at(k));
    }
    Strategy s;
    if (!strategic_holds(m, q, resolve_coalition(m, f.coalition()), *kind, args, opts, &s)) return std::nullopt;
    return s;
}

std::string describe(const Cegm& m, const Strategy& s, StrategyMode mode) {
    std::string out;
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
        const AgentId a = s.agents[i];
        if (i) out += "; ";
        out += m.agents()[a] + ":";
        bool any = false;
        auto emit = [&](const std::vector<StateId>& states) {
            auto av = m.avail(a, states.front());
            if (av.size() < 2) return;
            any = true;
            out += ' ';
            if (states.size() == 1) {
                out += m.states()[states.front()];
            } else {
                out += '{';
                for (std::size_t k = 0; k < states.size(); ++k) out += (k ? "," : "") + m.states()[states[k]];
                out += '}';
            }
            out += '=' + m.actions(a)[s.actions[i][states.front()]];
        };
        if (mode == StrategyMode::ir) {
            for (const auto& cls : m.classes(a)) emit(cls.members());
        } else {
            for (StateId q = 0; q < m.num_states(); ++q) emit({q});
        }
        if (!any) out += " (no choices)";
    }
    if (s.agents.empty()) out = "(empty coalition)";
    return out;
}

} // namespace atlh
