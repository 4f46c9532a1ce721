#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "boolgram/grammar.hpp"

namespace boolgram {

// Parses .bgr text, expands templates, validates.  Errors (syntax, expansion,
// validation) throw GrammarError; warnings (e.g. deduplicated rules) go to *warnings.
Grammar dsl_parse(const std::string& text, const std::string& filename = "<input>",
                  std::vector<Diagnostic>* warnings = nullptr);
Grammar dsl_load(const std::string& path, std::vector<Diagnostic>* warnings = nullptr);

std::string dsl_print(const Grammar& g);
std::string print_conjunct(const Conjunct& c);  // e.g. "~ C 'b'"
std::string print_rule(const Rule& r);          // "S -> ... ;"
std::string quote_terminal(char c);

struct DfaSpec {
    std::vector<std::string> states;
    std::string initial;
    std::vector<std::string> accepting;
    std::string charset;
    // (state, char) -> state; multiple entries for one key make the table nondeterministic
    std::vector<std::tuple<std::string, char, std::string>> transitions;
};

struct DfaRulesOptions {
    // drop states from which no accepting state is reachable (and transitions into them)
    bool omit_dead = false;
};

// Right-linear rules: prefix + state per nonterminal; "Q_s -> 'c' Q_t" per
// transition; accepting states end in suffix_nonterminal, or eps.
std::vector<Rule> dfa_to_rules(const DfaSpec& dfa, const std::string& name_prefix,
                               const std::optional<std::string>& suffix_nonterminal,
                               const DfaRulesOptions& opt = {});

// Small DFA toolbox for building automata like the keyword-excluding identifier one.
struct Dfa {
    int initial = 0;
    std::string charset;
    std::vector<std::vector<int>> next;  // next[state][charset index]
    std::vector<bool> accepting;
    int size() const { return static_cast<int>(next.size()); }
    bool accepts(const std::string& w) const;
};
Dfa dfa_words(const std::vector<std::string>& words, const std::string& charset);  // exactly these words
Dfa dfa_complement(const Dfa& d);
Dfa dfa_product_and(const Dfa& a, const Dfa& b);
Dfa dfa_minimize(const Dfa& d);  // also drops unreachable states
DfaSpec to_spec(const Dfa& d, const std::string& state_prefix = "q");

// Epsilon-free NFA with several initial states; edges are labelled by character sets.
struct Nfa {
    std::string charset;
    std::vector<std::vector<std::pair<std::string, int>>> edges;
    std::vector<bool> accepting;
    std::vector<int> initial;
    int add_state(bool accept = false);
    void add_edge(int from, const std::string& chars, int to);
};
// Subset construction; the empty subset becomes the dead state.
Dfa nfa_to_dfa(const Nfa& n);

}  // namespace boolgram
