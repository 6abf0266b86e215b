#include "atlh/translate.hpp"

#include "atlh/error.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <limits>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace atlh {

namespace {

// Same node with new operands.
Formula rebuild(const Formula& f, std::vector<Formula> kids) {
    switch (f.op()) {
    case Op::Atom:
    case Op::True:
    case Op::False: return f;
    case Op::Not: return Formula::negation(kids[0]);
    case Op::And: return Formula::conjunction(kids[0], kids[1]);
    case Op::Or: return Formula::disjunction(kids[0], kids[1]);
    case Op::CoalX: return Formula::next(f.coalition(), kids[0]);
    case Op::CoalG: return Formula::always(f.coalition(), kids[0]);
    case Op::CoalU: return Formula::until(f.coalition(), kids[0], kids[1]);
    case Op::CoalFG: return Formula::eventually_always(f.coalition(), kids[0], kids[1]);
    case Op::Knows: return Formula::knows(f.agent(), kids[0]);
    case Op::MutualKnows: return Formula::everybody_knows(f.coalition(), kids[0]);
    case Op::Hartley: {
        // members may have collapsed onto each other; repeats do not change |R|
        std::vector<Formula> beta;
        for (auto& k : kids)
            if (std::find(beta.begin(), beta.end(), k) == beta.end()) beta.push_back(std::move(k));
        return Formula::hartley(f.agent(), f.cmp(), f.threshold(), std::move(beta));
    }
    }
    return f;
}

// Bottom-up rewrite with memoization on shared subterms.
template <typename Fn>
class Rewriter {
public:
    explicit Rewriter(Fn fn) : fn_(std::move(fn)) {}

    Formula operator()(const Formula& f) {
        if (auto it = memo_.find(f); it != memo_.end()) return it->second;
        std::vector<Formula> kids;
        for (const auto& k : f.children()) kids.push_back((*this)(k));
        Formula out = fn_(f, std::move(kids));
        memo_.emplace(f, out);
        return out;
    }

private:
    Fn fn_;
    std::unordered_map<Formula, Formula> memo_;
};

Formula conjoin(const std::vector<Formula>& fs) {
    if (fs.empty()) return Formula::top();
    Formula out = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) out = Formula::conjunction(out, fs[i]);
    return out;
}

Formula disjoin(const std::vector<Formula>& fs) {
    if (fs.empty()) return Formula::bottom();
    Formula out = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) out = Formula::disjunction(out, fs[i]);
    return out;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

void check_beta(std::size_t n, const TranslateOptions& opts) {
    if (n == 0) throw FormulaError("empty beta");
    if (n > opts.max_beta)
        throw CapExceeded("beta has " + std::to_string(n) + " members, translation cap is " +
                          std::to_string(opts.max_beta));
}

// The atoms K[a] !alpha_j of P_m, shared by every disjunct.
std::vector<Formula> empty_cells(const std::string& agent, const std::vector<Formula>& beta,
                                 const TranslateOptions& opts) {
    std::vector<Formula> out;
    for (const auto& alpha : phi_beta(beta, opts)) out.push_back(Formula::knows(agent, Formula::negation(alpha)));
    return out;
}

// formula_length of P_m built from the given cells, without building it.
std::uint64_t p_length(const std::vector<Formula>& cells, std::uint64_t m) {
    const std::uint64_t cellsum = [&] {
        std::uint64_t s = 0;
        for (const auto& c : cells) s += c.length();
        return s;
    }();
    const std::uint64_t width = cells.size();
    const std::uint64_t disjuncts = binomial(width, m);
    // m negated cells, width-1 conjunctions
    const std::uint64_t each = cellsum + m + (width - 1);
    return sat_add(sat_mul(disjuncts, each), disjuncts - 1);
}

Formula build_p(const std::vector<Formula>& cells, std::uint64_t m) {
    const unsigned n = static_cast<unsigned>(std::countr_zero(cells.size()));
    auto tuples = t_nm(n, m);
    std::vector<Formula> disjuncts;
    std::vector<Formula> conj;
    for (auto it = tuples.rbegin(); it != tuples.rend(); ++it) {
        conj.clear();
        for (std::size_t j = 0; j < cells.size(); ++j)
            conj.push_back((*it)[j] ? cells[j] : Formula::negation(cells[j]));
        disjuncts.push_back(conjoin(conj));
    }
    return disjoin(disjuncts);
}

} // namespace

Formula k_to_h(const Formula& f) {
    auto knows = [](const std::string& a, const Formula& g) {
        return Formula::conjunction(g, Formula::hartley(a, Cmp::Eq, Threshold::log_of_count(1), {g}));
    };
    Rewriter rw([&](const Formula& node, std::vector<Formula> kids) {
        if (node.op() == Op::Knows) return knows(node.agent(), kids[0]);
        if (node.op() == Op::MutualKnows) {
            std::vector<Formula> parts;
            for (const auto& a : node.coalition()) parts.push_back(knows(a, kids[0]));
            return conjoin(parts);
        }
        return rebuild(node, std::move(kids));
    });
    return rw(f);
}

std::vector<Formula> phi_beta(const std::vector<Formula>& beta, const TranslateOptions& opts) {
    check_beta(beta.size(), opts);
    const std::size_t n = beta.size();
    std::vector<Formula> out;
    out.reserve(std::size_t{1} << n);
    for (std::size_t k = 0; k < (std::size_t{1} << n); ++k) {
        // bit (n-1-i) of k set means member i is negated, so all-kept comes first
        std::vector<Formula> lits;
        for (std::size_t i = 0; i < n; ++i) {
            const bool negated = (k >> (n - 1 - i)) & 1;
            lits.push_back(negated ? Formula::negation(beta[i]) : beta[i]);
        }
        out.push_back(conjoin(lits));
    }
    return out;
}

std::vector<std::vector<std::uint8_t>> t_nm(unsigned n, std::uint64_t m) {
    if (n > 6) throw CapExceeded("t_nm supports n <= 6");
    const std::uint64_t width = std::uint64_t{1} << n;
    if (m < 1 || m > width)
        throw Error("m = " + std::to_string(m) + " out of range 1.." + std::to_string(width));
    if (binomial(width, m) > 1'000'000) throw CapExceeded("more than 10^6 selection tuples");
    // zeros first is the lexicographically smallest arrangement
    std::vector<std::uint8_t> t(width, 1);
    std::fill(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(m), 0);
    std::vector<std::vector<std::uint8_t>> out;
    do out.push_back(t);
    while (std::next_permutation(t.begin(), t.end()));
    return out;
}

Formula h_eq_to_k(const std::string& agent, const std::vector<Formula>& beta, std::uint64_t m,
                  const TranslateOptions& opts) {
    check_beta(beta.size(), opts);
    const std::uint64_t width = std::uint64_t{1} << beta.size();
    if (m < 1 || m > width)
        throw Error("H = log(" + std::to_string(m) + ") over " + std::to_string(beta.size()) +
                    " formulas is unsatisfiable; m must be in 1.." + std::to_string(width));
    auto cells = empty_cells(agent, beta, opts);
    if (p_length(cells, m) > opts.max_nodes) throw CapExceeded("translation exceeds node cap");
    return build_p(cells, m);
}

Formula h_to_k(const Formula& f, const TranslateOptions& opts) {
    Rewriter rw([&](const Formula& node, std::vector<Formula> kids) {
        if (node.op() != Op::Hartley) return rebuild(node, std::move(kids));
        check_beta(kids.size(), opts);
        const std::uint64_t width = std::uint64_t{1} << kids.size();
        std::vector<std::uint64_t> counts;
        for (std::uint64_t c = 1; c <= width; ++c)
            if (compare_log(c, node.cmp(), node.threshold())) counts.push_back(c);
        if (counts.empty()) return Formula::bottom();
        if (counts.size() == width) return Formula::top();
        auto cells = empty_cells(node.agent(), kids, opts);
        std::uint64_t total = counts.size() - 1;
        for (auto c : counts) total = sat_add(total, p_length(cells, c));
        if (total > opts.max_nodes)
            throw CapExceeded("translating " + node.str() + " needs " + std::to_string(total) +
                              " nodes, cap is " + std::to_string(opts.max_nodes));
        std::vector<Formula> parts;
        for (auto c : counts) parts.push_back(build_p(cells, c));
        return disjoin(parts);
    });
    Formula out = rw(f);
    if (out.length() > opts.max_nodes) throw CapExceeded("translation exceeds node cap");
    return out;
}

// ---------------------------------------------------------------------------

std::string EquivalenceSample::line() const {
    std::ostringstream o;
    o << "seed=" << seed << " states=" << states << " formula=" << formula << " verdict=";
    if (mismatch_state)
        o << "mismatch@" << *mismatch_state;
    else
        o << "ok";
    return o.str();
}

std::size_t EquivalenceReport::failures() const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [](const auto& s) { return s.mismatch_state.has_value(); }));
}

std::string EquivalenceReport::text() const {
    std::string out;
    for (const auto& s : samples) out += s.line() + "\n";
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

EquivalenceSample run_sample(const EquivalenceParams& p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Cegm m = random_model(rng, p.model);
    FormulaParams fp;
    fp.agents = m.agents();
    fp.props = m.props();
    fp.max_depth = p.max_depth;
    fp.max_beta = std::min(p.max_beta, p.translate.max_beta);
    fp.max_strategic = p.max_strategic;
    EquivalenceSample s;
    s.seed = seed;
    s.states = m.num_states();
    // nested Hartley nodes can blow past the cap; draw again in that case
    for (int attempt = 0;; ++attempt) {
        Formula f = random_formula(rng, fp);
        Formula viak, viah;
        try {
            viak = h_to_k(f, p.translate);
            viah = k_to_h(f);
        } catch (const CapExceeded&) {
            if (attempt < 100) continue;
            throw;
        }
        s.formula = f.str();
        Labeling lab;
        label_into(lab, m, f, p.check);
        label_into(lab, m, viak, p.check);
        label_into(lab, m, viah, p.check);
        for (StateId q = 0; q < m.num_states(); ++q) {
            const bool want = lab.at(f).contains(q);
            if (lab.at(viak).contains(q) != want || lab.at(viah).contains(q) != want) {
                s.mismatch_state = m.states()[q];
                break;
            }
        }
        return s;
    }
}

} // namespace

EquivalenceReport check_translation_equivalence(const EquivalenceParams& params) {
    EquivalenceReport report;
    report.samples.resize(params.samples);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < params.samples;)
            report.samples[i] = run_sample(params, splitmix64(params.seed + i));
    };
    const unsigned threads = std::max(1u, params.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return report;
}

} // namespace atlh
