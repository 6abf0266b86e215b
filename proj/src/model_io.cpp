#include "atlh/cegm.hpp"
#include "atlh/error.hpp"

#include <cctype>
#include <sstream>

namespace atlh {

namespace {

bool is_name_char(char c) {
    switch (c) {
    case ':':
    case ',':
    case '(':
    case ')':
    case '~':
    case '#': return false;
    default: return !std::isspace(static_cast<unsigned char>(c));
    }
}

// Cursor over one line of the model file.
class LineReader {
public:
    LineReader(std::string_view text, std::size_t line) : s_(text), line_(line) {}

    void skip_ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool at_end() {
        skip_ws();
        return i_ >= s_.size();
    }
    bool accept(std::string_view sym) {
        skip_ws();
        if (s_.substr(i_, sym.size()) == sym) {
            i_ += sym.size();
            return true;
        }
        return false;
    }
    void expect(std::string_view sym) {
        if (!accept(sym)) fail("expected '" + std::string(sym) + "'");
    }
    bool peek_name() {
        skip_ws();
        return i_ < s_.size() && is_name_char(s_[i_]) && s_.substr(i_, 2) != "->";
    }
    std::string name(const char* what) {
        skip_ws();
        std::size_t j = i_;
        while (j < s_.size() && is_name_char(s_[j]) && s_.substr(j, 2) != "->") ++j;
        if (j == i_) fail(std::string("expected ") + what);
        std::string out(s_.substr(i_, j - i_));
        i_ = j;
        return out;
    }
    std::vector<std::string> names_to_end(const char* what) {
        std::vector<std::string> out;
        while (!at_end()) out.push_back(name(what));
        return out;
    }
    void done() {
        if (!at_end()) fail("unexpected '" + std::string(s_.substr(i_)) + "'");
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, i_ + 1); }

private:
    std::string_view s_;
    std::size_t line_;
    std::size_t i_ = 0;
};

} // namespace

Cegm load_model(std::string_view text) {
    CegmBuilder b;
    bool have_agents = false, have_states = false;
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        LineReader r(line, lineno);
        if (r.at_end()) continue;

        std::string kw = r.name("keyword");
        if (kw == "agents") {
            if (have_agents) r.fail("agents declared twice");
            have_agents = true;
            r.expect(":");
            for (auto& a : r.names_to_end("agent name")) b.agent(std::move(a));
        } else if (kw == "states") {
            if (have_states) r.fail("states declared twice");
            have_states = true;
            r.expect(":");
            for (auto& s : r.names_to_end("state name")) b.state(std::move(s));
        } else if (kw == "init") {
            r.expect(":");
            b.initial(r.name("state name"));
            r.done();
        } else if (kw == "actions") {
            std::string a = r.name("agent name");
            r.expect(":");
            for (auto& act : r.names_to_end("action name")) b.action(a, std::move(act));
        } else if (kw == "avail") {
            std::string a = r.name("agent name");
            std::string q = r.name("state name");
            r.expect(":");
            b.avail(a, q, r.names_to_end("action name"));
        } else if (kw == "trans") {
            std::string q = r.name("state name");
            r.expect("(");
            std::vector<std::string> profile;
            if (!r.accept(")")) {
                profile.push_back(r.name("action name"));
                while (r.accept(",")) profile.push_back(r.name("action name"));
                r.expect(")");
            }
            r.expect("->");
            std::string to = r.name("state name");
            r.done();
            b.transition(q, std::move(profile), to);
        } else if (kw == "obs") {
            std::string a = r.name("agent name");
            r.expect(":");
            std::string prev = r.name("state name");
            if (!r.accept("~")) r.fail("expected '~'");
            do {
                std::string next = r.name("state name");
                b.indistinguishable(a, prev, next);
                prev = std::move(next);
            } while (r.accept("~"));
            r.done();
        } else if (kw == "prop") {
            std::string p = r.name("proposition name");
            r.expect(":");
            b.prop(p);
            for (auto& s : r.names_to_end("state name")) b.label(p, s);
        } else {
            throw ParseError("unknown declaration '" + kw + "'", lineno, 1);
        }
    }
    return b.build();
}

std::string save_model(const Cegm& m) {
    std::ostringstream out;
    auto list = [&](const std::vector<std::string>& v) {
        for (const auto& s : v) out << ' ' << s;
    };
    out << "agents:";
    list(m.agents());
    out << "\nstates:";
    list(m.states());
    out << "\ninit: " << m.states()[m.initial()] << '\n';
    for (AgentId a = 0; a < m.num_agents(); ++a) {
        out << "actions " << m.agents()[a] << ':';
        list(m.actions(a));
        out << '\n';
    }
    for (StateId q = 0; q < m.num_states(); ++q)
        for (AgentId a = 0; a < m.num_agents(); ++a) {
            auto av = m.avail(a, q);
            if (av.size() == m.actions(a).size()) continue;
            out << "avail " << m.agents()[a] << ' ' << m.states()[q] << ':';
            for (auto act : av) out << ' ' << m.actions(a)[act];
            out << '\n';
        }
    const std::size_t n = m.num_agents();
    std::vector<std::uint32_t> pos(n);
    for (StateId q = 0; q < m.num_states(); ++q) {
        auto row = m.transition_row(q);
        for (std::size_t idx = 0; idx < row.size(); ++idx) {
            std::size_t rem = idx;
            for (std::size_t a = n; a-- > 0;) {
                auto av = m.avail(static_cast<AgentId>(a), q);
                pos[a] = static_cast<std::uint32_t>(rem % av.size());
                rem /= av.size();
            }
            out << "trans " << m.states()[q] << " (";
            for (std::size_t a = 0; a < n; ++a)
                out << (a ? ", " : "") << m.actions(static_cast<AgentId>(a))[m.avail(static_cast<AgentId>(a), q)[pos[a]]];
            out << ") -> " << m.states()[row[idx]] << '\n';
        }
    }
    for (AgentId a = 0; a < n; ++a)
        for (const auto& cls : m.classes(a)) {
            auto members = cls.members();
            for (std::size_t i = 1; i < members.size(); ++i)
                out << "obs " << m.agents()[a] << ": " << m.states()[members[i - 1]] << " ~ "
                    << m.states()[members[i]] << '\n';
        }
    for (std::size_t p = 0; p < m.props().size(); ++p) {
        out << "prop " << m.props()[p] << ':';
        m.valuation(p).for_each([&](StateId q) { out << ' ' << m.states()[q]; });
        out << '\n';
    }
    return out.str();
}

} // namespace atlh
