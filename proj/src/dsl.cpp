#include "boolgram/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace boolgram {

// ---------------------------------------------------------------- printing

std::string quote_terminal(char c) {
    if (c == '\'') return "'\\''";
    if (c == '\\') return "'\\\\'";
    return std::string("'") + c + "'";
}

std::string print_conjunct(const Conjunct& c) {
    std::string s = c.negative ? "~ " : "";
    if (c.body.empty()) return s + "eps";
    for (std::size_t i = 0; i < c.body.size(); ++i) {
        if (i) s += ' ';
        s += c.body[i].is_terminal() ? quote_terminal(c.body[i].ch) : c.body[i].name;
    }
    return s;
}

namespace {

std::string print_alternative(const Rule& r) {
    std::string s;
    for (std::size_t i = 0; i < r.conjuncts.size(); ++i) {
        if (i) s += " & ";
        s += print_conjunct(r.conjuncts[i]);
    }
    return s;
}

}  // namespace

std::string print_rule(const Rule& r) { return r.head + " -> " + print_alternative(r) + " ;"; }

std::string dsl_print(const Grammar& g) {
    std::string out;
    if (!g.name.empty()) out += "grammar " + g.name + " ;\n";
    out += "start " + g.start + " ;\n";
    out += "alphabet";
    for (char c : g.alphabet) out += " " + quote_terminal(c);
    out += " ;\n";
    std::size_t i = 0;
    while (i < g.rules.size()) {
        const std::string& h = g.rules[i].head;
        out += h + " -> " + print_alternative(g.rules[i]);
        ++i;
        while (i < g.rules.size() && g.rules[i].head == h) out += " | " + print_alternative(g.rules[i++]);
        out += " ;\n";
    }
    std::unordered_set<std::string> heads;
    for (const Rule& r : g.rules) heads.insert(r.head);
    for (const std::string& n : g.nonterminals)
        if (!heads.count(n)) out += "nonterminal " + n + " ;\n";
    return out;
}

// ---------------------------------------------------------------- parsing

namespace {

enum class Tok { Ident, Term, TermVar, Class, Arrow, Bar, Amp, Tilde, Semi, Colon, Comma, LParen, RParen,
                 LBrace, RBrace, Neq, End };

struct Token {
    Tok kind;
    std::string text;  // ident text (with {var} segments), class chars, placeholder var
    char ch = 0;       // terminal
    int line = 0, col = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

class Lexer {
public:
    Lexer(const std::string& s, std::string file) : s_(s), file_(std::move(file)) {}

    [[noreturn]] void fail(const std::string& m, int line, int col) const {
        SourceLoc loc{file_, line, col};
        Diagnostic d{Diagnostic::Severity::Error, m, loc};
        throw GrammarError(d.str(), {d});
    }

    // "{name}" at p: a template placeholder inside a nonterminal name
    bool placeholder_at(std::size_t p) const {
        if (s_[p] != '{' || p + 1 >= s_.size() || !ident_start(s_[p + 1])) return false;
        std::size_t q = p + 1;
        while (q < s_.size() && ident_char(s_[q])) ++q;
        return q < s_.size() && s_[q] == '}';
    }

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip();
            Token t;
            t.line = line_;
            t.col = col_;
            if (p_ >= s_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            char c = s_[p_];
            if (ident_start(c) || placeholder_at(p_)) {
                t.kind = Tok::Ident;
                while (p_ < s_.size()) {
                    char d = s_[p_];
                    if (d == '-' && p_ + 1 < s_.size() && s_[p_ + 1] == '>') break;
                    if (ident_char(d)) {
                        t.text += d;
                        adv();
                    } else if (placeholder_at(p_)) {
                        std::size_t q = s_.find('}', p_);
                        while (p_ <= q) {
                            t.text += s_[p_];
                            adv();
                        }
                    } else {
                        break;
                    }
                }
            } else if (c == '\'') {
                adv();
                if (p_ >= s_.size()) fail("unterminated terminal", t.line, t.col);
                char d = s_[p_];
                if (d == '\\') {
                    adv();
                    if (p_ >= s_.size() || (s_[p_] != '\'' && s_[p_] != '\\'))
                        fail("unknown escape in terminal", t.line, t.col);
                    t.kind = Tok::Term;
                    t.ch = s_[p_];
                    adv();
                } else if (d == '{' && p_ + 1 < s_.size() && s_[p_ + 1] != '\'') {
                    adv();
                    while (p_ < s_.size() && ident_char(s_[p_])) {
                        t.text += s_[p_];
                        adv();
                    }
                    if (p_ >= s_.size() || s_[p_] != '}' || t.text.empty())
                        fail("malformed placeholder in terminal", t.line, t.col);
                    adv();
                    t.kind = Tok::TermVar;
                } else if (d == '\n') {
                    fail("newline in terminal", t.line, t.col);
                } else {
                    t.kind = Tok::Term;
                    t.ch = d;
                    adv();
                }
                if (p_ >= s_.size() || s_[p_] != '\'') fail("expected closing quote", t.line, t.col);
                adv();
            } else if (c == '[') {
                adv();
                t.kind = Tok::Class;
                std::vector<std::pair<char, bool>> items;  // (char, escaped)
                while (p_ < s_.size() && s_[p_] != ']') {
                    if (s_[p_] == '\n') fail("newline in character class", t.line, t.col);
                    if (s_[p_] == '\\') {
                        adv();
                        if (p_ >= s_.size()) break;
                        items.push_back({s_[p_], true});
                    } else {
                        items.push_back({s_[p_], false});
                    }
                    adv();
                }
                if (p_ >= s_.size()) fail("unterminated character class", t.line, t.col);
                adv();
                for (std::size_t k = 0; k < items.size(); ++k) {
                    if (k + 2 < items.size() && items[k + 1].first == '-' && !items[k + 1].second) {
                        char lo = items[k].first, hi = items[k + 2].first;
                        if (lo > hi) fail("empty range in character class", t.line, t.col);
                        for (int x = lo; x <= hi; ++x) t.text += static_cast<char>(x);
                        k += 2;
                    } else {
                        t.text += items[k].first;
                    }
                }
            } else {
                adv();
                switch (c) {
                    case '-':
                        if (p_ < s_.size() && s_[p_] == '>') {
                            adv();
                            t.kind = Tok::Arrow;
                        } else {
                            fail("unexpected '-'", t.line, t.col);
                        }
                        break;
                    case '!':
                        if (p_ < s_.size() && s_[p_] == '=') {
                            adv();
                            t.kind = Tok::Neq;
                        } else {
                            fail("unexpected '!'", t.line, t.col);
                        }
                        break;
                    case '|': t.kind = Tok::Bar; break;
                    case '&': t.kind = Tok::Amp; break;
                    case '~': t.kind = Tok::Tilde; break;
                    case ';': t.kind = Tok::Semi; break;
                    case ':': t.kind = Tok::Colon; break;
                    case ',': t.kind = Tok::Comma; break;
                    case '(': t.kind = Tok::LParen; break;
                    case ')': t.kind = Tok::RParen; break;
                    case '{': t.kind = Tok::LBrace; break;
                    case '}': t.kind = Tok::RBrace; break;
                    default: fail(std::string("unexpected character '") + c + "'", t.line, t.col);
                }
            }
            out.push_back(t);
        }
    }

private:
    void adv() {
        if (s_[p_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++p_;
    }
    void skip() {
        while (p_ < s_.size()) {
            char c = s_[p_];
            if (c == '#') {
                while (p_ < s_.size() && s_[p_] != '\n') adv();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                adv();
            } else {
                break;
            }
        }
    }
    const std::string& s_;
    std::string file_;
    std::size_t p_ = 0;
    int line_ = 1, col_ = 1;
};

struct SymT {
    bool terminal = false;
    char ch = 0;
    std::string text;  // nonterminal name template, or placeholder var for a terminal
    bool term_var = false;
};
struct ConjT {
    bool negative = false;
    std::vector<SymT> body;
};
struct RuleT {
    std::string head;
    std::vector<std::vector<ConjT>> alts;
    int line = 0, col = 0;
};
struct Block;
struct Stmt {
    std::unique_ptr<RuleT> rule;
    std::unique_ptr<Block> block;
};
struct Block {
    // var and its values: single characters from a class, or names from a list
    std::vector<std::pair<std::string, std::vector<std::string>>> binders;
    std::vector<std::pair<std::string, std::string>> distinct;
    std::vector<Stmt> body;
    int line = 0, col = 0;
};

class Parser {
public:
    Parser(std::vector<Token> toks, std::string file) : t_(std::move(toks)), file_(std::move(file)) {}

    [[noreturn]] void fail(const std::string& m, const Token& at) const {
        Diagnostic d{Diagnostic::Severity::Error, m, SourceLoc{file_, at.line, at.col}};
        throw GrammarError(d.str(), {d});
    }

    void run() {
        while (peek().kind != Tok::End) {
            const Token& t = peek();
            if (t.kind == Tok::Ident && t.text == "grammar" && at(1).kind == Tok::Ident) {
                next();
                name = next().text;
                expect(Tok::Semi, "';'");
            } else if (t.kind == Tok::Ident && t.text == "start" && at(1).kind == Tok::Ident &&
                       at(2).kind == Tok::Semi) {
                next();
                if (!start.empty()) fail("duplicate start declaration", t);
                start = next().text;
                next();
            } else if (t.kind == Tok::Ident && t.text == "alphabet" && at(1).kind != Tok::Arrow) {
                next();
                if (have_alphabet) fail("duplicate alphabet declaration", t);
                have_alphabet = true;
                while (peek().kind != Tok::Semi) {
                    const Token& x = next();
                    if (x.kind == Tok::Term)
                        alphabet += x.ch;
                    else if (x.kind == Tok::Class)
                        alphabet += x.text;
                    else
                        fail("expected terminal or character class in alphabet", x);
                }
                next();
            } else if (t.kind == Tok::Ident && t.text == "nonterminal" && at(1).kind != Tok::Arrow) {
                next();
                while (peek().kind == Tok::Ident) declared.push_back({next().text, t});
                expect(Tok::Semi, "';'");
            } else {
                top.push_back(statement());
            }
        }
        if (start.empty()) fail("missing start declaration", peek());
        if (!have_alphabet) fail("missing alphabet declaration", peek());
    }

    std::string name, start, alphabet;
    bool have_alphabet = false;
    std::vector<std::pair<std::string, Token>> declared;
    std::vector<Stmt> top;

private:
    const Token& peek() const { return t_[p_]; }
    const Token& at(std::size_t k) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
    const Token& next() { return t_[p_ < t_.size() - 1 ? p_++ : p_]; }
    const Token& expect(Tok k, const char* what) {
        if (peek().kind != k) fail(std::string("expected ") + what, peek());
        return next();
    }

    Stmt statement() {
        Stmt s;
        const Token& t = peek();
        if (t.kind == Tok::Ident && t.text == "forall" && at(1).kind == Tok::Ident && at(2).kind == Tok::Ident &&
            at(2).text == "in") {
            s.block = forall();
        } else {
            s.rule = rule();
        }
        return s;
    }

    std::unique_ptr<Block> forall() {
        auto b = std::make_unique<Block>();
        const Token& kw = next();
        b->line = kw.line;
        b->col = kw.col;
        for (;;) {
            std::string v = expect(Tok::Ident, "binder variable").text;
            const Token& in = expect(Tok::Ident, "'in'");
            if (in.text != "in") fail("expected 'in'", in);
            std::vector<std::string> values;
            if (peek().kind == Tok::LParen) {
                next();
                for (;;) {
                    values.push_back(expect(Tok::Ident, "name").text);
                    if (peek().kind != Tok::Comma) break;
                    next();
                }
                expect(Tok::RParen, "')'");
            } else {
                for (char c : expect(Tok::Class, "character class or '('").text) values.push_back(std::string(1, c));
            }
            b->binders.push_back({v, values});
            if (peek().kind != Tok::Comma) break;
            next();
        }
        if (peek().kind == Tok::LParen) {
            next();
            for (;;) {
                std::string x = expect(Tok::Ident, "variable").text;
                expect(Tok::Neq, "'!='");
                std::string y = expect(Tok::Ident, "variable").text;
                b->distinct.push_back({x, y});
                if (peek().kind != Tok::Comma) break;
                next();
            }
            expect(Tok::RParen, "')'");
        }
        if (peek().kind == Tok::Colon) {
            next();
            b->body.push_back(statement());
        } else {
            expect(Tok::LBrace, "':' or '{'");
            while (peek().kind != Tok::RBrace) {
                if (peek().kind == Tok::End) fail("unterminated template block", peek());
                b->body.push_back(statement());
            }
            next();
        }
        return b;
    }

    std::unique_ptr<RuleT> rule() {
        auto r = std::make_unique<RuleT>();
        const Token& h = peek();
        if (h.kind != Tok::Ident) fail("expected rule head", h);
        r->head = next().text;
        r->line = h.line;
        r->col = h.col;
        if (r->head == "eps") fail("'eps' cannot be a rule head", h);
        expect(Tok::Arrow, "'->'");
        r->alts.push_back(alternative());
        while (peek().kind == Tok::Bar) {
            next();
            r->alts.push_back(alternative());
        }
        expect(Tok::Semi, "';'");
        return r;
    }

    std::vector<ConjT> alternative() {
        std::vector<ConjT> out;
        out.push_back(conjunct());
        while (peek().kind == Tok::Amp) {
            next();
            out.push_back(conjunct());
        }
        return out;
    }

    ConjT conjunct() {
        ConjT c;
        if (peek().kind == Tok::Tilde) {
            next();
            c.negative = true;
        }
        if (peek().kind == Tok::Ident && peek().text == "eps") {
            next();
            return c;
        }
        for (;;) {
            const Token& t = peek();
            if (t.kind == Tok::Ident) {
                if (t.text == "eps") fail("'eps' must stand alone in a conjunct", t);
                if (at(1).kind == Tok::Arrow) fail("missing ';' before next rule", t);
                SymT s;
                s.text = next().text;
                c.body.push_back(s);
            } else if (t.kind == Tok::Term) {
                SymT s;
                s.terminal = true;
                s.ch = next().ch;
                c.body.push_back(s);
            } else if (t.kind == Tok::TermVar) {
                SymT s;
                s.terminal = true;
                s.term_var = true;
                s.text = next().text;
                c.body.push_back(s);
            } else {
                break;
            }
        }
        if (c.body.empty()) fail("empty conjunct (write 'eps' for the empty string)", peek());
        return c;
    }

    std::vector<Token> t_;
    std::string file_;
    std::size_t p_ = 0;
};

using Env = std::map<std::string, std::string>;

class Expander {
public:
    explicit Expander(std::string file) : file_(std::move(file)) {}

    [[noreturn]] void fail(const std::string& m, int line, int col) const {
        Diagnostic d{Diagnostic::Severity::Error, m, SourceLoc{file_, line, col}};
        throw GrammarError(d.str(), {d});
    }

    std::string subst(const std::string& tmpl, const Env& env, int line, int col) const {
        std::string out;
        for (std::size_t i = 0; i < tmpl.size(); ++i) {
            if (tmpl[i] != '{') {
                out += tmpl[i];
                continue;
            }
            std::size_t j = tmpl.find('}', i);
            std::string v = tmpl.substr(i + 1, j - i - 1);
            auto it = env.find(v);
            if (it == env.end()) fail("placeholder {" + v + "} is outside the scope of its binder", line, col);
            for (char c : it->second)
                if (!ident_char(c))
                    fail(std::string("character '") + c + "' cannot appear in a nonterminal name", line, col);
            out += it->second;
            i = j;
        }
        return out;
    }

    void stmts(const std::vector<Stmt>& ss, const Env& env, std::vector<Rule>& out) const {
        for (const Stmt& s : ss) {
            if (s.rule)
                rule(*s.rule, env, out);
            else
                block(*s.block, env, out);
        }
    }

    void block(const Block& b, const Env& env, std::vector<Rule>& out) const {
        for (auto& [x, y] : b.distinct) {
            auto bound = [&](const std::string& v) {
                return std::any_of(b.binders.begin(), b.binders.end(), [&](auto& p) { return p.first == v; });
            };
            if (!bound(x) || !bound(y)) fail("constraint refers to a variable not bound by this template", b.line, b.col);
        }
        std::function<void(std::size_t, Env&)> go = [&](std::size_t k, Env& e) {
            if (k == b.binders.size()) {
                for (auto& [x, y] : b.distinct)
                    if (e.at(x) == e.at(y)) return;
                stmts(b.body, e, out);
                return;
            }
            for (const std::string& c : b.binders[k].second) {
                Env e2 = e;
                e2[b.binders[k].first] = c;
                go(k + 1, e2);
            }
        };
        Env e = env;
        go(0, e);
    }

    void rule(const RuleT& r, const Env& env, std::vector<Rule>& out) const {
        std::string head = subst(r.head, env, r.line, r.col);
        for (const auto& alt : r.alts) {
            Rule rr;
            rr.head = head;
            rr.origin = SourceLoc{file_, r.line, r.col};
            for (const ConjT& c : alt) {
                Conjunct cc;
                cc.negative = c.negative;
                for (const SymT& s : c.body) {
                    if (!s.terminal) {
                        cc.body.push_back(Symbol::nt(subst(s.text, env, r.line, r.col)));
                    } else if (!s.term_var) {
                        cc.body.push_back(Symbol::term(s.ch));
                    } else {
                        auto it = env.find(s.text);
                        if (it == env.end())
                            fail("placeholder {" + s.text + "} is outside the scope of its binder", r.line, r.col);
                        if (it->second.size() != 1)
                            fail("placeholder {" + s.text + "} is bound to a name, not a character", r.line, r.col);
                        cc.body.push_back(Symbol::term(it->second[0]));
                    }
                }
                rr.conjuncts.push_back(std::move(cc));
            }
            out.push_back(std::move(rr));
        }
    }

private:
    std::string file_;
};

}  // namespace

Grammar dsl_parse(const std::string& text, const std::string& filename, std::vector<Diagnostic>* warnings) {
    Lexer lx(text, filename);
    Parser ps(lx.run(), filename);
    ps.run();

    Grammar g;
    g.name = ps.name;
    g.start = ps.start;
    g.alphabet = normalize_alphabet(ps.alphabet);
    Expander ex(filename);
    ex.stmts(ps.top, Env{}, g.rules);

    std::unordered_set<std::string> seen;
    for (const Rule& r : g.rules)
        if (seen.insert(r.head).second) g.nonterminals.push_back(r.head);
    for (auto& [n, tok] : ps.declared)
        if (seen.insert(n).second) g.nonterminals.push_back(n);

    std::vector<Diagnostic> diags = dedupe_rules(g);
    for (Diagnostic& d : validate(g)) diags.push_back(d);
    std::vector<Diagnostic> errors;
    for (Diagnostic& d : diags) {
        if (d.loc.file.empty()) d.loc.file = filename;
        if (d.severity == Diagnostic::Severity::Error)
            errors.push_back(d);
        else if (warnings)
            warnings->push_back(d);
    }
    if (!errors.empty()) {
        std::string m;
        for (auto& d : errors) m += (m.empty() ? "" : "\n") + d.str();
        throw GrammarError(m, errors);
    }
    return g;
}

Grammar dsl_load(const std::string& path, std::vector<Diagnostic>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GrammarError("cannot open grammar file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return dsl_parse(ss.str(), path, warnings);
}

// ---------------------------------------------------------------- automata

std::vector<Rule> dfa_to_rules(const DfaSpec& dfa, const std::string& name_prefix,
                               const std::optional<std::string>& suffix_nonterminal, const DfaRulesOptions& opt) {
    std::unordered_map<std::string, int> idx;
    for (std::size_t i = 0; i < dfa.states.size(); ++i)
        if (!idx.emplace(dfa.states[i], static_cast<int>(i)).second)
            throw GrammarError("duplicate DFA state " + dfa.states[i]);
    if (!idx.count(dfa.initial)) throw GrammarError("DFA initial state is not a state");
    std::string cs = normalize_alphabet(dfa.charset);
    if (cs.size() != dfa.charset.size()) throw GrammarError("DFA character set has repeated characters");
    const std::size_t S = dfa.states.size(), C = cs.size();
    std::vector<int> next(S * C, -1);
    for (auto& [from, c, to] : dfa.transitions) {
        auto f = idx.find(from), t = idx.find(to);
        if (f == idx.end() || t == idx.end()) throw GrammarError("DFA transition refers to an unknown state");
        std::size_t ci = cs.find(c);
        if (ci == std::string::npos)
            throw GrammarError(std::string("DFA transition on character outside its set: ") + c);
        int& slot = next[f->second * C + ci];
        if (slot != -1 && slot != t->second)
            throw GrammarError("DFA is nondeterministic at state " + from + " on " + quote_terminal(c));
        if (slot != -1) throw GrammarError("DFA repeats a transition at state " + from);
        slot = t->second;
    }
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t c = 0; c < C; ++c)
            if (next[s * C + c] < 0)
                throw GrammarError("DFA is not total: state " + dfa.states[s] + " lacks " + quote_terminal(cs[c]));
    std::vector<bool> acc(S, false);
    for (const std::string& a : dfa.accepting) {
        auto it = idx.find(a);
        if (it == idx.end()) throw GrammarError("DFA accepting state is not a state: " + a);
        acc[it->second] = true;
    }
    std::vector<bool> live(S, true);
    if (opt.omit_dead) {
        live = acc;
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t s = 0; s < S; ++s)
                for (std::size_t c = 0; c < C && !live[s]; ++c)
                    if (live[next[s * C + c]]) changed = live[s] = true;
        }
    }
    // the initial state comes first so its nonterminal is the first head
    std::vector<std::size_t> order{static_cast<std::size_t>(idx[dfa.initial])};
    for (std::size_t s = 0; s < S; ++s)
        if (s != order[0]) order.push_back(s);
    std::vector<Rule> out;
    for (std::size_t s : order) {
        if (!live[s]) continue;
        std::string head = name_prefix + dfa.states[s];
        for (std::size_t c = 0; c < C; ++c) {
            int t = next[s * C + c];
            if (!live[t]) continue;
            Rule r;
            r.head = head;
            r.conjuncts.push_back(Conjunct{false, {Symbol::term(cs[c]), Symbol::nt(name_prefix + dfa.states[t])}});
            out.push_back(std::move(r));
        }
        if (acc[s]) {
            Rule r;
            r.head = head;
            Conjunct c;
            if (suffix_nonterminal) c.body.push_back(Symbol::nt(*suffix_nonterminal));
            r.conjuncts.push_back(c);
            out.push_back(std::move(r));
        }
    }
    return out;
}

bool Dfa::accepts(const std::string& w) const {
    int s = initial;
    for (char c : w) {
        std::size_t ci = charset.find(c);
        if (ci == std::string::npos) return false;
        s = next[s][ci];
    }
    return accepting[s];
}

Dfa dfa_words(const std::vector<std::string>& words, const std::string& charset) {
    Dfa d;
    d.charset = normalize_alphabet(charset);
    const std::size_t C = d.charset.size();
    d.next.push_back(std::vector<int>(C, -1));
    d.accepting.push_back(false);
    for (const std::string& w : words) {
        int s = 0;
        for (char c : w) {
            std::size_t ci = d.charset.find(c);
            if (ci == std::string::npos) throw GrammarError("word uses a character outside the DFA set");
            if (d.next[s][ci] < 0) {
                d.next[s][ci] = d.size();
                d.next.push_back(std::vector<int>(C, -1));
                d.accepting.push_back(false);
            }
            s = d.next[s][ci];
        }
        d.accepting[s] = true;
    }
    int dead = d.size();
    d.next.push_back(std::vector<int>(C, dead));
    d.accepting.push_back(false);
    for (auto& row : d.next)
        for (int& t : row)
            if (t < 0) t = dead;
    return d;
}

Dfa dfa_complement(const Dfa& d) {
    Dfa r = d;
    for (std::size_t i = 0; i < r.accepting.size(); ++i) r.accepting[i] = !d.accepting[i];
    return r;
}

Dfa dfa_product_and(const Dfa& a, const Dfa& b) {
    if (a.charset != b.charset) throw GrammarError("DFA product needs equal character sets");
    const std::size_t C = a.charset.size();
    Dfa r;
    r.charset = a.charset;
    std::map<std::pair<int, int>, int> id;
    std::queue<std::pair<int, int>> q;
    auto get = [&](std::pair<int, int> p) {
        auto it = id.find(p);
        if (it != id.end()) return it->second;
        int k = r.size();
        id[p] = k;
        r.next.push_back(std::vector<int>(C, -1));
        r.accepting.push_back(a.accepting[p.first] && b.accepting[p.second]);
        q.push(p);
        return k;
    };
    r.initial = get({a.initial, b.initial});
    while (!q.empty()) {
        auto p = q.front();
        q.pop();
        int k = id[p];
        for (std::size_t c = 0; c < C; ++c) {
            int t = get({a.next[p.first][c], b.next[p.second][c]});
            r.next[k][c] = t;
        }
    }
    return r;
}

Dfa dfa_minimize(const Dfa& d) {
    const std::size_t C = d.charset.size();
    // reachable states in BFS order from the initial state
    std::vector<int> order{d.initial};
    std::vector<int> pos(d.size(), -1);
    pos[d.initial] = 0;
    for (std::size_t h = 0; h < order.size(); ++h)
        for (std::size_t c = 0; c < C; ++c) {
            int t = d.next[order[h]][c];
            if (pos[t] < 0) {
                pos[t] = static_cast<int>(order.size());
                order.push_back(t);
            }
        }
    // Moore refinement
    std::vector<int> cls(d.size(), -1);
    for (int s : order) cls[s] = d.accepting[s] ? 1 : 0;
    for (;;) {
        std::map<std::vector<int>, int> sig;
        std::vector<int> ncls(d.size(), -1);
        for (int s : order) {
            std::vector<int> key{cls[s]};
            for (std::size_t c = 0; c < C; ++c) key.push_back(cls[d.next[s][c]]);
            auto it = sig.emplace(key, static_cast<int>(sig.size())).first;
            ncls[s] = it->second;
        }
        std::set<int> prev;
        for (int s : order) prev.insert(cls[s]);
        cls = ncls;
        if (sig.size() == prev.size()) break;
    }
    // renumber classes by first appearance in BFS order
    std::map<int, int> renum;
    for (int s : order) renum.emplace(cls[s], static_cast<int>(renum.size()));
    Dfa r;
    r.charset = d.charset;
    r.next.assign(renum.size(), std::vector<int>(C, -1));
    r.accepting.assign(renum.size(), false);
    for (int s : order) {
        int k = renum[cls[s]];
        r.accepting[k] = d.accepting[s];
        for (std::size_t c = 0; c < C; ++c) r.next[k][c] = renum[cls[d.next[s][c]]];
    }
    r.initial = renum[cls[d.initial]];
    return r;
}

DfaSpec to_spec(const Dfa& d, const std::string& state_prefix) {
    DfaSpec s;
    s.charset = d.charset;
    for (int i = 0; i < d.size(); ++i) s.states.push_back(state_prefix + std::to_string(i));
    s.initial = s.states[d.initial];
    for (int i = 0; i < d.size(); ++i) {
        if (d.accepting[i]) s.accepting.push_back(s.states[i]);
        for (std::size_t c = 0; c < d.charset.size(); ++c)
            s.transitions.emplace_back(s.states[i], d.charset[c], s.states[d.next[i][c]]);
    }
    return s;
}

int Nfa::add_state(bool accept) {
    edges.emplace_back();
    accepting.push_back(accept);
    return static_cast<int>(edges.size()) - 1;
}

void Nfa::add_edge(int from, const std::string& chars, int to) {
    for (char c : chars)
        if (charset.find(c) == std::string::npos) throw GrammarError(std::string("NFA edge uses '") + c + "' outside the character set");
    edges.at(from).emplace_back(chars, to);
}

Dfa nfa_to_dfa(const Nfa& n) {
    const std::size_t C = n.charset.size();
    Dfa r;
    r.charset = n.charset;
    std::map<std::set<int>, int> id;
    std::vector<std::set<int>> sets;
    auto get = [&](const std::set<int>& s) {
        auto it = id.find(s);
        if (it != id.end()) return it->second;
        int k = r.size();
        id[s] = k;
        sets.push_back(s);
        r.next.push_back(std::vector<int>(C, -1));
        bool acc = false;
        for (int q : s) acc = acc || n.accepting[q];
        r.accepting.push_back(acc);
        return k;
    };
    r.initial = get(std::set<int>(n.initial.begin(), n.initial.end()));
    for (std::size_t k = 0; k < sets.size(); ++k) {
        std::set<int> cur = sets[k];
        for (std::size_t c = 0; c < C; ++c) {
            std::set<int> to;
            for (int q : cur)
                for (const auto& [chars, t] : n.edges[q])
                    if (chars.find(n.charset[c]) != std::string::npos) to.insert(t);
            int t = get(to);
            r.next[k][c] = t;
        }
    }
    return r;
}

}  // namespace boolgram
