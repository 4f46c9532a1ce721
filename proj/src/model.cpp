#include "boolgram/model.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#ifndef BOOLGRAM_SOURCE_DIR
#define BOOLGRAM_SOURCE_DIR "."
#endif

namespace fs = std::filesystem;

namespace boolgram {

std::string grammar_dir() {
    if (const char* e = std::getenv("BOOLGRAM_GRAMMARS")) return e;
    return std::string(BOOLGRAM_SOURCE_DIR) + "/grammars";
}

std::string corpus_dir() {
    if (const char* e = std::getenv("BOOLGRAM_CORPUS")) return e;
    return std::string(BOOLGRAM_SOURCE_DIR) + "/corpus";
}

Grammar build_boolean_grammar() { return dsl_load(grammar_dir() + "/model-boolean.bgr"); }
Grammar build_unambiguous_grammar() { return dsl_load(grammar_dir() + "/model-unamb.bgr"); }

std::string normalize_whitespace(const std::string& text) {
    std::string s = text;
    for (char& c : s)
        if (c == '\n' || c == '\t' || c == '\r' || c == '\f' || c == '\v') c = ' ';
    return s;
}

const std::vector<std::string> kReasonTags = {
    "undeclared-variable", "duplicate-variable", "scope-violation", "undeclared-function",
    "duplicate-function",  "arity-mismatch",     "no-main",         "duplicate-main",
    "token-split",         "not-returning",      "syntax"};

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// key = "value" lines; '#' comments; \" and \\ escapes
std::map<std::string, std::string> parse_expect(const std::string& text, const std::string& where) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        std::size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos || line[a] == '#') continue;
        std::size_t eq = line.find('=', a);
        if (eq == std::string::npos) throw std::runtime_error(where + ":" + std::to_string(ln) + ": expected key = \"value\"");
        std::string key = line.substr(a, eq - a);
        key.erase(key.find_last_not_of(" \t") + 1);
        std::size_t q = line.find('"', eq);
        if (q == std::string::npos) throw std::runtime_error(where + ":" + std::to_string(ln) + ": value must be quoted");
        std::string val;
        std::size_t k = q + 1;
        for (; k < line.size() && line[k] != '"'; ++k) {
            if (line[k] == '\\' && k + 1 < line.size()) ++k;
            val += line[k];
        }
        if (k >= line.size()) throw std::runtime_error(where + ":" + std::to_string(ln) + ": unterminated string");
        if (!kv.emplace(key, val).second) throw std::runtime_error(where + ": duplicate key " + key);
    }
    return kv;
}

}  // namespace

CorpusCase load_case(const std::string& dir) {
    fs::path d(dir);
    CorpusCase c;
    c.name = d.filename().string();
    c.program = normalize_whitespace(slurp(d / "program.txt"));
    while (!c.program.empty() && c.program.back() == ' ') c.program.pop_back();
    auto kv = parse_expect(slurp(d / "expect.toml"), (d / "expect.toml").string());
    auto need = [&](const char* k) {
        auto it = kv.find(k);
        if (it == kv.end() || it->second.empty()) throw std::runtime_error(c.name + ": expect.toml lacks " + k);
        return it->second;
    };
    std::string verdict = need("verdict");
    if (verdict != "accept" && verdict != "reject") throw std::runtime_error(c.name + ": verdict must be accept or reject");
    c.accept = verdict == "accept";
    c.anchor = need("anchor");
    if (kv.count("note")) c.note = kv["note"];
    if (!c.accept) {
        c.reason = need("reason");
        if (std::find(kReasonTags.begin(), kReasonTags.end(), c.reason) == kReasonTags.end())
            throw std::runtime_error(c.name + ": unknown reason tag " + c.reason);
        c.edit = need("edit");
        c.fixed = normalize_whitespace(slurp(d / "fixed.txt"));
        while (!c.fixed.empty() && c.fixed.back() == ' ') c.fixed.pop_back();
    } else if (kv.count("reason") && !kv["reason"].empty()) {
        throw std::runtime_error(c.name + ": accept cases carry no reason tag");
    }
    return c;
}

std::vector<CorpusCase> corpus(const std::string& dir) {
    std::vector<std::string> dirs;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory()) dirs.push_back(e.path().string());
    std::sort(dirs.begin(), dirs.end());
    std::vector<CorpusCase> out;
    for (const std::string& d : dirs) out.push_back(load_case(d));
    return out;
}

const std::string& letters_digits() {
    static const std::string s = "0123456789abcdefghijklmnopqrstuvwxyz";
    return s;
}

namespace {

// letter (letter | digit)*
Dfa identifier_words() {
    Dfa d;
    d.charset = letters_digits();
    const std::size_t C = d.charset.size();
    d.next.assign(3, std::vector<int>(C, 2));
    d.accepting = {false, true, false};
    for (std::size_t c = 0; c < C; ++c) {
        bool letter = d.charset[c] >= 'a';
        d.next[0][c] = letter ? 1 : 2;
        d.next[1][c] = 1;
    }
    return d;
}

const std::vector<std::string> kKeywords = {"var", "if", "else", "while", "return"};

}  // namespace

Dfa identifier_dfa() {
    return dfa_minimize(dfa_product_and(identifier_words(), dfa_complement(dfa_words(kKeywords, letters_digits()))));
}

Dfa identifier_not_main_dfa() {
    std::vector<std::string> excluded = kKeywords;
    excluded.push_back("main");
    return dfa_minimize(dfa_product_and(identifier_words(), dfa_complement(dfa_words(excluded, letters_digits()))));
}

const std::string& model_alphabet() {
    static const std::string s = normalize_alphabet(letters_digits() + " (){},;+-*/%&|!=<>");
    return s;
}

namespace {

std::string without(const std::string& from, const std::string& drop) {
    std::string r;
    for (char c : from)
        if (drop.find(c) == std::string::npos) r += c;
    return r;
}

const std::string kLetters = "abcdefghijklmnopqrstuvwxyz";

// chain of states spelling `word`; returns the last one
int add_word(Nfa& n, int from, const std::string& word) {
    int s = from;
    for (char c : word) {
        int t = n.add_state();
        n.add_edge(s, std::string(1, c), t);
        s = t;
    }
    return s;
}

}  // namespace

Dfa semicolon_not_closing_var_dfa() {
    const std::string& all = model_alphabet();
    const std::string ald = letters_digits();
    // ... <punctuator other than ','> ' '* var ' '+ id (' '* ',' ' '* id)* ' '* ';' ' '*
    Nfa v;
    v.charset = all;
    int any = v.add_state(), bound = v.add_state();
    v.initial = {any, bound};
    v.add_edge(any, all, any);
    v.add_edge(any, without(all, ald + " ,"), bound);
    v.add_edge(bound, " ", bound);
    int r = add_word(v, bound, "var");
    int sp = v.add_state(), id = v.add_state(), idsp = v.add_state(), comma = v.add_state(), done = v.add_state(true);
    v.add_edge(r, " ", sp);
    v.add_edge(sp, " ", sp);
    v.add_edge(sp, kLetters, id);
    v.add_edge(id, ald, id);
    v.add_edge(id, " ", idsp);
    v.add_edge(idsp, " ", idsp);
    v.add_edge(id, ",", comma);
    v.add_edge(idsp, ",", comma);
    v.add_edge(comma, " ", comma);
    v.add_edge(comma, kLetters, id);
    v.add_edge(id, ";", done);
    v.add_edge(idsp, ";", done);
    v.add_edge(done, " ", done);

    Nfa e;
    e.charset = all;
    int e0 = e.add_state(), e1 = e.add_state(true);
    e.initial = {e0};
    e.add_edge(e0, all, e0);
    e.add_edge(e0, ";", e1);
    e.add_edge(e1, " ", e1);
    return dfa_minimize(dfa_product_and(nfa_to_dfa(e), dfa_complement(nfa_to_dfa(v))));
}

Dfa plain_statement_prefix_dfa() {
    const std::string& all = model_alphabet();
    const std::string nsb = without(all, ";{}");
    Nfa f;
    f.charset = all;
    int start = f.add_state(), rest = f.add_state(true);
    f.initial = {start};
    f.add_edge(rest, nsb, rest);
    for (const char* kw : {"if", "while"}) {
        int k = add_word(f, start, kw);
        f.add_edge(k, " ", k);
        f.add_edge(k, "(", rest);
    }
    // leading spaces belong to the previous token
    f.add_edge(start, " ", rest);
    int el = add_word(f, start, "else");
    f.accepting[el] = true;
    f.add_edge(el, without(nsb, letters_digits()), rest);

    Nfa p;
    p.charset = all;
    int p0 = p.add_state(), p1 = p.add_state(true);
    p.initial = {p0};
    p.add_edge(p0, nsb, p1);
    p.add_edge(p1, nsb, p1);
    return dfa_minimize(dfa_product_and(nfa_to_dfa(p), dfa_complement(nfa_to_dfa(f))));
}

const std::string kGeneratedBegin = "# BEGIN GENERATED by gen_automata, do not edit";
const std::string kGeneratedEnd = "# END GENERATED";

namespace {

// The initial state is named `name` itself, the others name-q<k>.
std::string automaton_rules(const Dfa& d, const std::string& name, const std::optional<std::string>& suffix) {
    Dfa m = dfa_minimize(d);
    DfaSpec spec = to_spec(m, name + "-q");
    std::string init = spec.initial;
    auto rename = [&](std::string& s) {
        if (s == init) s = name;
    };
    for (auto& s : spec.states) rename(s);
    for (auto& s : spec.accepting) rename(s);
    for (auto& [from, c, to] : spec.transitions) {
        rename(from);
        rename(to);
    }
    rename(spec.initial);
    DfaRulesOptions opt;
    opt.omit_dead = true;
    std::vector<Rule> rules = dfa_to_rules(spec, "", suffix, opt);
    std::set<std::string> heads;
    for (const Rule& r : rules) heads.insert(r.head);
    std::string out = "# " + name + ": " + std::to_string(heads.size()) + " live states, " +
                      std::to_string(rules.size()) + " rules\n";
    for (const Rule& r : rules) out += print_rule(r) + "\n";
    return out;
}

}  // namespace

std::string generated_rules() {
    std::string out;
    out += automaton_rules(identifier_dfa(), "tId", std::string("WS"));
    out += automaton_rules(identifier_not_main_dfa(), "tIdNotMain", std::nullopt);
    out += automaton_rules(semicolon_not_closing_var_dfa(), "semicolon-not-closing-var", std::nullopt);
    out += automaton_rules(plain_statement_prefix_dfa(), "plain-statement-prefix", std::nullopt);
    return out;
}

namespace {

std::pair<std::size_t, std::size_t> generated_span(const std::string& text) {
    std::size_t b = text.find(kGeneratedBegin);
    std::size_t e = text.find(kGeneratedEnd);
    if (b == std::string::npos || e == std::string::npos || e < b)
        throw std::runtime_error("grammar text has no generated-rules markers");
    b = text.find('\n', b);
    if (b == std::string::npos || b > e) throw std::runtime_error("malformed generated-rules markers");
    return {b + 1, e};
}

}  // namespace

std::string splice_generated(const std::string& grammar_text, const std::string& block) {
    auto [b, e] = generated_span(grammar_text);
    return grammar_text.substr(0, b) + block + grammar_text.substr(e);
}

std::string extract_generated(const std::string& grammar_text) {
    auto [b, e] = generated_span(grammar_text);
    return grammar_text.substr(b, e - b);
}

std::string return_sum_program(int n) {
    std::string s = "main(x) { return x";
    for (int k = 1; k < n; ++k) s += "+x";
    return s + "; }";
}

}  // namespace boolgram
