#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "boolgram/grammar.hpp"

namespace boolgram {

enum class Truth : std::uint8_t { False = 0, Unknown = 1, True = 2 };

// Default enumeration budget: 2'000'000 strings per top layer, or BOOLGRAM_BUDGET.
std::uint64_t default_budget();

struct OracleOptions {
    std::uint64_t budget = default_budget();
    int residual_cap = 20;
    bool parallel = true;
};

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when some layer has zero or several consistent assignments.
class InvalidGrammar : public GrammarError {
public:
    InvalidGrammar(const std::string& m, int layer_, std::string witness_)
        : GrammarError(m), layer(layer_), witness(std::move(witness_)) {}
    int layer;
    std::string witness;
};

// Raised when residual unknowns exceed the brute-force cap.
class Undetermined : public GrammarError {
public:
    Undetermined(const std::string& m, int layer_) : GrammarError(m), layer(layer_) {}
    int layer;
};

struct LayeredFacts {
    enum class Status { Valid, Invalid, Undetermined };
    std::string alphabet;
    int max_len = 0;
    std::vector<std::string> nonterminals;
    // layers[L][index(w) * N + A]; index is the base-|alphabet| value of w
    std::vector<std::vector<Truth>> layers;
    Status status = Status::Valid;
    int failed_layer = -1;
    std::string detail;  // human-readable account of the failing layer

    std::uint64_t index(const std::string& w) const;
    std::string string_at(int len, std::uint64_t idx) const;
    Truth get(const std::string& nt, const std::string& w) const;
    int computed_layers() const { return static_cast<int>(layers.size()); }
};

// Never throws for invalid/undetermined grammars: the status records it and
// evaluation stops at the failing layer.  Throws BudgetExceeded.
LayeredFacts evaluate_layered(const Grammar& g, const std::string& alphabet, int max_len,
                              const OracleOptions& opt = {});

// Substring-restricted evaluation.  Throws InvalidGrammar / Undetermined.
bool member(const Grammar& g, const std::string& w, const OracleOptions& opt = {});
// Same, for an arbitrary nonterminal.
bool member_nt(const Grammar& g, const std::string& nt, const std::string& w,
               const OracleOptions& opt = {});

// Length-then-lexicographic (by alphabet order).  Throws on invalid grammar.
std::vector<std::string> enumerate(const Grammar& g, const std::string& nt,
                                   const std::string& alphabet, int max_len,
                                   const OracleOptions& opt = {});

// ---- conjunctive derivations --------------------------------------------

struct Derivation {
    enum class Outcome { Found, None, Unknown };
    Outcome outcome = Outcome::None;
    std::vector<std::string> terms;  // rendered terms; terms.front() is the start symbol
    struct Step {
        enum class Kind { Rule, Collapse };
        Kind kind;
        std::size_t rule = 0;  // for Rule steps
    };
    std::vector<Step> steps;  // steps.size() == terms.size() - 1
    std::uint64_t work = 0;
};

// Throws GrammarError if the grammar has negative conjuncts.
Derivation derive_conjunctive(const Grammar& g, const std::string& w, std::uint64_t step_budget);

// Re-applies every step from scratch and compares renderings.
bool replay_derivation(const Grammar& g, const std::string& w, const Derivation& d);

// ---- ambiguity ----------------------------------------------------------

struct AmbiguityFinding {
    enum class Kind { RuleChoice, Split };
    Kind kind;
    std::string nonterminal;  // rule-choice: the head; split: head of the rule holding the conjunct
    std::string site;         // rule-choice: head; split: printed conjunct body
    std::string witness;
    // rule-choice: two rule indices (grammar order); split: first two partitions
    std::size_t rule_a = 0, rule_b = 0;
    std::vector<std::size_t> partition_a, partition_b;  // cut positions inside the witness
};
const char* to_string(AmbiguityFinding::Kind k);

std::vector<AmbiguityFinding> check_ambiguity(const Grammar& g, const std::vector<std::string>& inputs);

}  // namespace boolgram
