#include "atlh/error.hpp"
#include "atlh/formula.hpp"

#include <cctype>
#include <optional>
#include <unordered_set>

namespace atlh {

namespace {

enum class Tok {
    Ident,
    Number,
    Bang,
    Amp,
    Pipe,
    LParen,
    RParen,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Other,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
            t.kind = Tok::Number;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else {
            auto two = src.substr(i, 2);
            std::size_t n = 1;
            switch (c) {
            case '!': t.kind = Tok::Bang; break;
            case '&': t.kind = Tok::Amp; break;
            case '|': t.kind = Tok::Pipe; break;
            case '(': t.kind = Tok::LParen; break;
            case ')': t.kind = Tok::RParen; break;
            case '[': t.kind = Tok::LBracket; break;
            case ']': t.kind = Tok::RBracket; break;
            case '{': t.kind = Tok::LBrace; break;
            case '}': t.kind = Tok::RBrace; break;
            case ',': t.kind = Tok::Comma; break;
            case '=': t.kind = Tok::Eq; break;
            case '<':
                if (two == "<=") {
                    t.kind = Tok::Le;
                    n = 2;
                } else {
                    t.kind = Tok::Lt;
                }
                break;
            case '>':
                if (two == ">=") {
                    t.kind = Tok::Ge;
                    n = 2;
                } else {
                    t.kind = Tok::Gt;
                }
                break;
            default: t.kind = Tok::Other; break;
            }
            t.text = std::string(src.substr(i, n));
            advance(n);
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

bool starts_unary(const Token& t) {
    switch (t.kind) {
    case Tok::Ident:
    case Tok::Bang:
    case Tok::LParen:
    case Tok::Lt: return true;
    default: return false;
    }
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(lex(src)) {}

    Formula parse() {
        Formula f = disj(false);
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
        return f;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    const Token& take() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    [[noreturn]] void fail(const std::string& msg) const { fail_at(peek(), msg); }
    [[noreturn]] static void fail_at(const Token& t, const std::string& msg) {
        throw ParseError(msg, t.line, t.column);
    }
    const Token& expect(Tok kind, const char* what) {
        if (peek().kind != kind) {
            const auto& t = peek();
            fail(std::string("expected ") + what + (t.kind == Tok::End ? " before end of input" : ", found '" + t.text + "'"));
        }
        return take();
    }
    bool is_keyword(const char* kw, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Ident && peek(ahead).text == kw;
    }

    Formula disj(bool bare_g) {
        Formula f = conj(bare_g);
        while (peek().kind == Tok::Pipe) {
            take();
            f = Formula::disjunction(std::move(f), conj(bare_g));
        }
        return f;
    }

    Formula conj(bool bare_g) {
        Formula f = unary(bare_g);
        while (peek().kind == Tok::Amp) {
            take();
            f = Formula::conjunction(std::move(f), unary(bare_g));
        }
        return f;
    }

    Formula unary(bool bare_g) {
        if (peek().kind == Tok::Bang) {
            take();
            return Formula::negation(unary(false));
        }
        if (bare_g && is_keyword("G") && starts_unary(peek(1))) {
            take();
            Formula g = Formula::always({}, unary(false));
            bare_g_.insert(g.id());
            bare_keep_.push_back(g);
            return g;
        }
        return atom(bare_g);
    }

    std::string ident(const char* what) { return expect(Tok::Ident, what).text; }

    Coalition agent_list(Tok close, const char* close_text) {
        Coalition c;
        if (peek().kind == close) {
            take();
            return c;
        }
        c.push_back(ident("agent name"));
        while (peek().kind == Tok::Comma) {
            take();
            c.push_back(ident("agent name"));
        }
        expect(close, close_text);
        return c;
    }

    Formula atom(bool bare_g) {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::LParen: {
            take();
            Formula f = disj(bare_g);
            expect(Tok::RParen, "')'");
            return f;
        }
        case Tok::Lt: {
            take();
            const Token& at = peek();
            Coalition c = agent_list(Tok::Gt, "'>'");
            try {
                return temporal(std::move(c));
            } catch (const FormulaError& e) {
                fail_at(at, e.what());
            }
        }
        case Tok::Ident: {
            if (t.text == "true") {
                take();
                return Formula::top();
            }
            if (t.text == "false") {
                take();
                return Formula::bottom();
            }
            if (peek(1).kind == Tok::LBracket) {
                if (t.text == "K") {
                    take();
                    take();
                    std::string a = ident("agent name");
                    expect(Tok::RBracket, "']'");
                    return Formula::knows(std::move(a), unary(false));
                }
                if (t.text == "E") {
                    const Token& at = take();
                    take();
                    Coalition c = agent_list(Tok::RBracket, "']'");
                    try {
                        return Formula::everybody_knows(std::move(c), unary(false));
                    } catch (const FormulaError& e) {
                        fail_at(at, e.what());
                    }
                }
                if (t.text == "H") return hartley();
            }
            return Formula::atom(take().text);
        }
        case Tok::End: fail("unexpected end of input");
        default: fail("unexpected '" + t.text + "'");
        }
    }

    Formula temporal(Coalition c) {
        if (is_keyword("X")) {
            take();
            return Formula::next(std::move(c), unary(false));
        }
        if (is_keyword("G")) {
            take();
            return Formula::always(std::move(c), unary(false));
        }
        if (is_keyword("F")) {
            take();
            const Token& at = peek();
            Formula body = unary(true);
            return eventually(std::move(c), std::move(body), at);
        }
        if (peek().kind == Tok::LParen) {
            take();
            Formula lhs = disj(false);
            if (!is_keyword("U")) fail("expected 'U' in until formula");
            take();
            Formula rhs = disj(false);
            expect(Tok::RParen, "')'");
            return Formula::until(std::move(c), std::move(lhs), std::move(rhs));
        }
        fail("expected X, G, F or '(' after coalition");
    }

    bool is_bare(const Formula& f) const { return bare_g_.count(f.id()) > 0; }

    // Removes the single bare `G psi` conjunct from a left-nested conjunction chain.
    std::optional<Formula> extract(const Formula& f, std::optional<Formula>& stay) const {
        if (is_bare(f)) {
            stay = f.child(0);
            return std::nullopt;
        }
        if (f.op() != Op::And) return f;
        const Formula& l = f.child(0);
        const Formula& r = f.child(1);
        if (is_bare(r)) {
            stay = r.child(0);
            return l;
        }
        auto rest = extract(l, stay);
        if (!stay) return f;
        if (!rest) return r;
        return Formula::conjunction(*rest, r);
    }

    bool contains_bare(const Formula& f) const {
        if (is_bare(f)) return true;
        for (const auto& k : f.children())
            if (contains_bare(k)) return true;
        return false;
    }

    Formula eventually(Coalition c, Formula body, const Token& at) {
        std::optional<Formula> stay;
        auto rest = extract(body, stay);
        if (!stay) {
            if (contains_bare(body)) fail_at(at, "G without coalition is only allowed as a conjunct of <A> F (f & G g)");
            return Formula::eventually(std::move(c), std::move(body));
        }
        Formula reach = rest ? *rest : Formula::top();
        if (contains_bare(reach) || contains_bare(*stay))
            fail_at(at, "at most one coalition-free G conjunct is allowed under <A> F");
        return Formula::eventually_always(std::move(c), std::move(reach), std::move(*stay));
    }

    Formula hartley() {
        const Token& at = take(); // H
        take();                   // [
        std::string a = ident("agent name");
        expect(Tok::RBracket, "']'");
        Cmp cmp;
        const Token& ct = peek();
        switch (ct.kind) {
        case Tok::Lt: cmp = Cmp::Lt; break;
        case Tok::Le: cmp = Cmp::Le; break;
        case Tok::Gt: cmp = Cmp::Gt; break;
        case Tok::Ge: cmp = Cmp::Ge; break;
        case Tok::Eq: cmp = Cmp::Eq; break;
        default: fail("unknown comparison '" + ct.text + "' (expected <, <=, >, >= or =)");
        }
        take();
        if (cmp == Cmp::Eq && peek().kind == Tok::Eq) fail("unknown comparison '=='");
        Threshold th = threshold();
        expect(Tok::LBrace, "'{'");
        std::vector<Formula> beta;
        if (peek().kind == Tok::RBrace) fail("empty formula set in H operator");
        beta.push_back(disj(false));
        while (peek().kind == Tok::Comma) {
            take();
            beta.push_back(disj(false));
        }
        expect(Tok::RBrace, "'}'");
        try {
            return Formula::hartley(std::move(a), cmp, th, std::move(beta));
        } catch (const FormulaError& e) {
            fail_at(at, e.what());
        }
    }

    Threshold threshold() {
        if (is_keyword("log")) {
            take();
            expect(Tok::LParen, "'('");
            const Token& n = expect(Tok::Number, "positive integer");
            std::uint64_t k = 0;
            for (char ch : n.text) {
                if (ch < '0' || ch > '9') fail_at(n, "log() takes a positive integer");
                if (k > 1'000'000'000'000ULL) fail_at(n, "log() argument too large");
                k = k * 10 + static_cast<std::uint64_t>(ch - '0');
            }
            if (k == 0) fail_at(n, "log() takes a positive integer");
            expect(Tok::RParen, "')'");
            return Threshold::log_of_count(k);
        }
        const Token& n = expect(Tok::Number, "threshold");
        try {
            return Threshold::parse_decimal(n.text);
        } catch (const FormulaError& e) {
            fail_at(n, e.what());
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::unordered_set<const void*> bare_g_;
    std::vector<Formula> bare_keep_; // pins node addresses used as markers
};

} // namespace

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

} // namespace atlh
