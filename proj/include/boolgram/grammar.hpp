#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace boolgram {

struct SourceLoc {
    std::string file;
    int line = 0;
    int column = 0;
};

struct Symbol {
    enum class Kind { Terminal, Nonterminal };
    Kind kind = Kind::Terminal;
    char ch = 0;          // terminal payload
    std::string name;     // nonterminal payload

    static Symbol term(char c) { return Symbol{Kind::Terminal, c, {}}; }
    static Symbol nt(std::string n) { return Symbol{Kind::Nonterminal, 0, std::move(n)}; }
    bool is_terminal() const { return kind == Kind::Terminal; }
    bool operator==(const Symbol& o) const {
        return kind == o.kind && (is_terminal() ? ch == o.ch : name == o.name);
    }
};

struct Conjunct {
    bool negative = false;
    std::vector<Symbol> body;  // empty = eps
    bool operator==(const Conjunct& o) const { return negative == o.negative && body == o.body; }
};

struct Rule {
    std::string head;
    std::vector<Conjunct> conjuncts;
    SourceLoc origin;
    // origin is diagnostics only and does not take part in equality
    bool operator==(const Rule& o) const { return head == o.head && conjuncts == o.conjuncts; }
};

enum class Classification { Ordinary, Conjunctive, Boolean };
const char* to_string(Classification c);

struct Grammar {
    std::string name;
    std::string alphabet;                  // sorted, unique characters
    std::vector<std::string> nonterminals; // heads in first-appearance order, then rule-less declarations
    std::vector<Rule> rules;
    std::string start;

    bool has_nonterminal(const std::string& n) const;
    int index_of(const std::string& n) const;  // -1 if absent
    bool in_alphabet(char c) const;
    std::vector<std::size_t> rules_for(const std::string& head) const;
    bool operator==(const Grammar& o) const {
        return alphabet == o.alphabet && nonterminals == o.nonterminals && rules == o.rules &&
               start == o.start;
    }
};

struct Diagnostic {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    std::string message;
    SourceLoc loc;
    std::string str() const;
};

class GrammarError : public std::runtime_error {
public:
    explicit GrammarError(const std::string& m, std::vector<Diagnostic> d = {})
        : std::runtime_error(m), diagnostics(std::move(d)) {}
    std::vector<Diagnostic> diagnostics;
};

std::string normalize_alphabet(const std::string& chars);

// Errors for unresolved symbols, missing start, empty alphabet, empty rules;
// warnings for duplicate identical rules.
std::vector<Diagnostic> validate(const Grammar& g);
bool has_errors(const std::vector<Diagnostic>& d);

// Removes exact duplicate rules (keeping the first); returns one warning per removal.
std::vector<Diagnostic> dedupe_rules(Grammar& g);

Classification classify(const Grammar& g);

struct ReachabilityReport {
    std::set<std::string> unreachable;
    std::set<std::string> unproductive;
    // false when the bounded enumeration did not fit the budget and the
    // syntactic over-approximation of productivity was used instead
    bool exact = true;
    int probe_length = 0;
};

// Productivity uses the positive-conjunct skeleton (negative conjuncts dropped).
ReachabilityReport reachability_report(const Grammar& g, int probe_length,
                                       std::optional<std::string> alphabet = std::nullopt);

}  // namespace boolgram
