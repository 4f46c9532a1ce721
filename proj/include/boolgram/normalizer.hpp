#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boolgram/grammar.hpp"

namespace boolgram {

struct BinConjunct {
    enum class Kind { Eps, Term, Unit, Pair };
    Kind kind = Kind::Eps;
    bool negative = false;
    char ch = 0;       // Term
    int a = -1;        // Unit / Pair left
    int b = -1;        // Pair right
    int pair_id = -1;  // index into BinaryGrammar::pairs
};

struct BinRule {
    int head = -1;
    std::vector<BinConjunct> conjuncts;
};

// Layout of one conjunct of an original rule inside the binary grammar.
struct ConjunctLayout {
    bool negative = false;
    std::vector<Symbol> symbols;  // original body
    std::vector<int> ids;         // nonterminal id per symbol (terminal -> its T_c nonterminal), or -1 in a 1-terminal body
    std::vector<int> rest;        // rest[t]: nonterminal deriving symbols[t..] (t >= 1, suffix length >= 2 -> fold, length 1 -> ids[t])
};

struct UnitEdge {
    int from, to;
    bool negative;
};

struct BinaryGrammar {
    Grammar original;
    Grammar grammar;  // binarized, printable; rules[k] for k < original.rules.size() mirror original rule k
    std::vector<BinRule> rules;
    std::vector<std::vector<int>> rules_of;                  // by nonterminal id
    std::vector<std::pair<int, int>> pairs;                  // distinct pair bodies
    std::vector<std::vector<ConjunctLayout>> layouts;        // by original rule
    std::vector<bool> nullable;
    std::vector<UnitEdge> unit_edges;
    std::vector<std::vector<int>> sccs;  // dependency-first order
    std::vector<int> scc_of;
    std::vector<bool> scc_cyclic;
    std::vector<bool> is_fresh;
    std::vector<int> fold_pair;  // for fold nonterminals: pair id of their single body, else -1
    int start = -1;
    int num_original = 0;

    int size() const { return static_cast<int>(grammar.nonterminals.size()); }
    int id(const std::string& name) const { return grammar.index_of(name); }
};

// Throws GrammarError on rules without positive conjuncts, on an invalid layer 0,
// or when a negative unit edge closes a cycle.
BinaryGrammar binarize(const Grammar& g);

std::string fresh_fold_name(const std::vector<Symbol>& suffix);
std::string fresh_terminal_name(char c);

struct GrammarStats {
    std::size_t nonterminals = 0;
    std::size_t rules = 0;  // one per alternative
    std::size_t positive_conjuncts = 0;
    std::size_t negative_conjuncts = 0;
    std::size_t terminals = 0;  // alphabet size
    std::size_t terminal_occurrences = 0;
};
GrammarStats stats(const Grammar& g);

}  // namespace boolgram
