#include "atlh/cli.hpp"

#include "atlh/cegm.hpp"
#include "atlh/error.hpp"
#include "atlh/formula.hpp"
#include "atlh/mcheck.hpp"
#include "atlh/scenarios.hpp"
#include "atlh/succinct.hpp"
#include "atlh/translate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace atlh::cli {

namespace {

using json = nlohmann::json;

struct Global {
    std::string strategy_mode = "ir";
    std::string scope = "objective";
    unsigned threads = 1;
    std::uint64_t seed = 1;
    std::uint64_t cap_nodes = 1'000'000;
    std::string format = "text";

    CheckOptions check_options() const {
        CheckOptions o;
        o.strategy_mode = strategy_mode == "Ir" ? StrategyMode::Ir : StrategyMode::ir;
        o.scope = scope == "subjective" ? SuccessScope::subjective : SuccessScope::objective;
        o.threads = threads;
        return o;
    }
};

struct CheckArgs {
    std::string model;
    std::string formula;
    std::string formula_file;
    std::string state;
    bool dump_labels = false;
};

struct TranslateArgs {
    std::string dir;
    std::string formula;
    std::string formula_file;
    std::size_t max_beta = 4;
};

struct GenArgs {
    std::string name;
    unsigned n = 1;
    std::uint64_t j = 1;
    std::string out;
};

struct ExperimentArgs {
    std::string name;
    unsigned nmax = 4;
    unsigned search_nmax = 2;
    std::uint64_t search_cap = 40;
    std::size_t samples = 1000;
    std::size_t max_states = 6;
    std::size_t max_agents = 3;
    std::size_t max_beta = 2;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Formula formula_arg(const std::string& inline_text, const std::string& path) {
    if (!inline_text.empty() && !path.empty()) throw Error("give either --formula or --formula-file, not both");
    if (inline_text.empty() && path.empty()) throw Error("a formula is required (--formula or --formula-file)");
    return parse_formula(inline_text.empty() ? read_file(path) : inline_text);
}

std::vector<std::string> state_names(const Cegm& m, const StateSet& s) {
    std::vector<std::string> out;
    s.for_each([&](StateId q) { out.push_back(m.states()[q]); });
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& x : v) out += (out.empty() ? "" : " ") + x;
    return out;
}

int cmd_check(const Global& g, const CheckArgs& a, std::ostream& out) {
    const Cegm m = load_model(read_file(a.model));
    const Formula f = formula_arg(a.formula, a.formula_file);
    const StateId q = a.state.empty() ? m.initial() : m.state_id(a.state);
    const CheckOptions opts = g.check_options();
    const Labeling lab = label(m, f, opts);
    const bool verdict = lab.at(f).contains(q);
    std::optional<Strategy> witness;
    if (verdict) witness = strategic_witness(m, q, f, opts);

    if (g.format == "jsonl") {
        json j{{"state", m.states()[q]}, {"formula", f.str()}, {"verdict", verdict}};
        if (witness) j["witness"] = describe(m, *witness, opts.strategy_mode);
        j["holds_at"] = state_names(m, lab.at(f));
        out << j.dump() << '\n';
        if (a.dump_labels)
            for (const auto& sub : subformulas_by_length(f))
                out << json{{"formula", sub.str()}, {"states", state_names(m, lab.at(sub))}}.dump() << '\n';
    } else if (g.format == "csv") {
        out << "state,verdict\n" << m.states()[q] << ',' << (verdict ? "true" : "false") << '\n';
        if (a.dump_labels) {
            out << "formula,states\n";
            for (const auto& sub : subformulas_by_length(f))
                out << '"' << sub.str() << "\"," << join(state_names(m, lab.at(sub))) << '\n';
        }
    } else {
        out << m.states()[q] << ": " << (verdict ? "true" : "false") << '\n';
        out << "holds at: {" << join(state_names(m, lab.at(f))) << "}\n";
        if (witness) out << "witness: " << describe(m, *witness, opts.strategy_mode) << '\n';
        if (a.dump_labels)
            for (const auto& sub : subformulas_by_length(f))
                out << "  " << sub.str() << " : {" << join(state_names(m, lab.at(sub))) << "}\n";
    }
    return verdict ? Exit::True : Exit::False;
}

int cmd_translate(const Global& g, const TranslateArgs& a, std::ostream& out) {
    const Formula f = formula_arg(a.formula, a.formula_file);
    TranslateOptions opts;
    opts.max_nodes = g.cap_nodes;
    opts.max_beta = a.max_beta;
    const Formula t = a.dir == "h2k" ? h_to_k(f, opts) : k_to_h(f);
    if (g.format == "jsonl") {
        out << json{{"input", f.str()},
                    {"output", t.str()},
                    {"length_in", formula_length(f)},
                    {"length_out", formula_length(t)}}
                   .dump()
            << '\n';
    } else {
        out << t.str() << '\n';
        out << "length: " << formula_length(f) << " -> " << formula_length(t) << '\n';
    }
    return Exit::True;
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
    Cegm m = [&] {
        if (a.name == "fig1") return gen_referendum_single();
        if (a.name == "m1") return gen_referendum_double(DoubleVariant::M1);
        if (a.name == "m2") return gen_referendum_double(DoubleVariant::M2);
        if (a.name == "threeballot") return gen_threeballot();
        if (a.name == "Mn") return gen_Mn(a.n);
        return gen_Nnj(a.n, a.j);
    }();
    const std::string text = save_model(m);
    if (a.out.empty()) {
        out << text;
    } else {
        std::ofstream f(a.out, std::ios::binary);
        if (!f) throw Error("cannot write '" + a.out + "'");
        f << text;
    }
    return Exit::True;
}

int cmd_experiment(const Global& g, const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
    if (a.name == "succinctness") {
        SuccinctnessParams p;
        p.nmax = a.nmax;
        p.search_nmax = a.search_nmax;
        p.search_cap = a.search_cap;
        out << succinctness_csv(succinctness_experiment(p));
        return Exit::True;
    }
    if (a.name == "translation-equivalence") {
        EquivalenceParams p;
        p.seed = g.seed;
        p.samples = a.samples;
        p.model.max_states = a.max_states;
        p.model.max_agents = a.max_agents;
        p.max_beta = a.max_beta;
        p.check = g.check_options();
        p.threads = g.threads;
        p.translate.max_nodes = g.cap_nodes;
        auto report = check_translation_equivalence(p);
        out << report.text();
        err << report.failures() << " mismatches in " << report.samples.size() << " samples\n";
        return report.failures() == 0 ? Exit::True : Exit::False;
    }
    auto rows = threeballot_infosets();
    out << (g.format == "csv" ? infoset_table_csv(rows) : infoset_table_text(rows));
    return Exit::True;
}

bool color_enabled() {
    const char* v = std::getenv("ATLH_MC_COLOR");
    return v && std::string(v) == "1";
}

void diagnose(std::ostream& err, const std::string& what) {
    if (color_enabled())
        err << "\x1b[1;31merror:\x1b[0m " << what << '\n';
    else
        err << "error: " << what << '\n';
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ATLH/ATLK model checker"};
    app.name("atlh_mc");
    app.require_subcommand(1);

    Global g;
    app.add_option("--strategy-mode", g.strategy_mode, "ir (uniform) or Ir")
        ->check(CLI::IsMember({"ir", "Ir"}))
        ->capture_default_str();
    app.add_option("--scope", g.scope, "success scope")
        ->check(CLI::IsMember({"objective", "subjective"}))
        ->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads for strategy enumeration")
        ->check(CLI::Range(1u, 256u))
        ->capture_default_str();
    app.add_option("--seed", g.seed, "root seed for sampled experiments")->capture_default_str();
    app.add_option("--cap-nodes", g.cap_nodes, "node cap for H to K translation")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--format", g.format, "output format")
        ->check(CLI::IsMember({"text", "csv", "jsonl"}))
        ->capture_default_str();

    CheckArgs ca;
    auto* check = app.add_subcommand("check", "evaluate a formula on a model");
    check->add_option("--model", ca.model, "model file")->required();
    check->add_option("--formula", ca.formula, "formula text");
    check->add_option("--formula-file", ca.formula_file, "file holding the formula");
    check->add_option("--state", ca.state, "state name (default: initial state)");
    check->add_flag("--dump-labels", ca.dump_labels, "print the states of every subformula");

    TranslateArgs ta;
    auto* translate = app.add_subcommand("translate", "translate between H and K");
    translate->add_option("--dir", ta.dir, "h2k or k2h")->required()->check(CLI::IsMember({"h2k", "k2h"}));
    translate->add_option("--formula", ta.formula, "formula text");
    translate->add_option("--formula-file", ta.formula_file, "file holding the formula");
    translate->add_option("--max-beta", ta.max_beta, "largest beta translated")->capture_default_str();

    GenArgs ga;
    auto* gen = app.add_subcommand("gen", "write a generated model");
    gen->add_option("name", ga.name, "fig1, m1, m2, threeballot, Mn or Nnj")
        ->required()
        ->check(CLI::IsMember({"fig1", "m1", "m2", "threeballot", "Mn", "Nnj"}));
    gen->add_option("--n", ga.n, "family parameter n")->capture_default_str();
    gen->add_option("--j", ga.j, "removed state of Nnj")->capture_default_str();
    gen->add_option("--out", ga.out, "output path (default: stdout)");

    ExperimentArgs ea;
    auto* experiment = app.add_subcommand("experiment", "run an experiment");
    experiment->add_option("name", ea.name, "succinctness, translation-equivalence or threeballot-table")
        ->required()
        ->check(CLI::IsMember({"succinctness", "translation-equivalence", "threeballot-table"}));
    experiment->add_option("--nmax", ea.nmax, "largest n")->capture_default_str();
    experiment->add_option("--search-nmax", ea.search_nmax, "largest n for the game and formula searches")
        ->capture_default_str();
    experiment->add_option("--search-cap", ea.search_cap, "size cap of the searches")->capture_default_str();
    experiment->add_option("--samples", ea.samples, "number of random samples")->capture_default_str();
    experiment->add_option("--max-states", ea.max_states, "states per sampled model")->capture_default_str();
    experiment->add_option("--max-agents", ea.max_agents, "agents per sampled model")->capture_default_str();
    experiment->add_option("--max-beta", ea.max_beta, "beta size in sampled formulas")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return Exit::True;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return Exit::True;
    } catch (const CLI::ParseError& e) {
        diagnose(err, e.what());
        return Exit::Failure;
    }

    try {
        if (*check) return cmd_check(g, ca, out);
        if (*translate) return cmd_translate(g, ta, out);
        if (*gen) return cmd_gen(ga, out);
        return cmd_experiment(g, ea, out, err);
    } catch (const std::exception& e) {
        diagnose(err, e.what());
        return Exit::Failure;
    }
}

} // namespace atlh::cli
