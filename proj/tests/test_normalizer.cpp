#include <doctest.h>

#include "boolgram/normalizer.hpp"
#include "boolgram/oracle.hpp"
#include "fixtures.hpp"

using namespace boolgram;

namespace {

bool bodies_short(const Grammar& g) {
    for (const Rule& r : g.rules)
        for (const Conjunct& c : r.conjuncts) {
            if (c.body.size() > 2) return false;
            if (c.body.size() == 2 && (c.body[0].is_terminal() || c.body[1].is_terminal())) return false;
        }
    return true;
}

void same_languages(const Grammar& g, int len) {
    BinaryGrammar bg = binarize(g);
    CHECK(bodies_short(bg.grammar));
    for (const std::string& nt : g.nonterminals)
        CHECK_MESSAGE(enumerate(g, nt, g.alphabet, len) == enumerate(bg.grammar, nt, g.alphabet, len), nt);
}

}  // namespace

TEST_CASE("binarizing a S b | eps") {
    Grammar g = inline_grammar("S -> 'a' S 'b' | eps ;");
    BinaryGrammar bg = binarize(g);
    CHECK(bg.grammar.has_nonterminal(fresh_terminal_name('a')));
    CHECK(bg.grammar.has_nonterminal(fresh_terminal_name('b')));
    CHECK(bg.nullable[bg.id("S")]);
    CHECK_FALSE(bg.nullable[bg.id(fresh_terminal_name('a'))]);
    int nullable = 0;
    for (bool b : bg.nullable) nullable += b;
    CHECK(nullable == 1);
    CHECK(bodies_short(bg.grammar));
    // original rules keep their index
    CHECK(bg.grammar.rules[0].head == "S");
    CHECK(bg.grammar.rules[1].head == "S");
    CHECK(bg.grammar.rules[1].conjuncts[0].body.empty());
    same_languages(g, 8);
}

TEST_CASE("binarizing w c w preserves every language") {
    same_languages(fixture("ex3"), 6);
}

TEST_CASE("binarizing the remaining fixtures preserves every language") {
    same_languages(fixture("ex1"), 8);
    same_languages(fixture("ex4"), 8);
    same_languages(fixture("l5"), 9);
}

TEST_CASE("negative unit cycles are rejected") {
    Grammar g = inline_grammar("S -> ~ S & A ;\nA -> 'a' ;");
    try {
        binarize(g);
        FAIL("expected an error");
    } catch (const GrammarError& e) {
        CHECK(std::string(e.what()).find("S") != std::string::npos);
        CHECK(std::string(e.what()).find("negative") != std::string::npos);
    }
    // the negative edge may sit anywhere on the cycle
    Grammar h = inline_grammar("S -> 'a' & ~ T | 'b' ;\nT -> S ;");
    CHECK_THROWS_AS(binarize(h), GrammarError);
}

TEST_CASE("a rule needs a positive conjunct") {
    CHECK_THROWS_AS(binarize(inline_grammar("S -> ~ 'a' ;")), GrammarError);
}

TEST_CASE("positive unit cycles are fine") {
    Grammar g = inline_grammar("S -> T | 'a' ;\nT -> S | 'b' ;");
    BinaryGrammar bg = binarize(g);
    CHECK(bg.scc_cyclic[bg.scc_of[bg.id("S")]]);
    CHECK(bg.scc_of[bg.id("S")] == bg.scc_of[bg.id("T")]);
    same_languages(g, 4);
}

TEST_CASE("binarization is idempotent") {
    for (const char* name : {"ex1", "ex3", "ex4", "l5"}) {
        BinaryGrammar once = binarize(fixture(name));
        BinaryGrammar twice = binarize(once.grammar);
        CHECK(twice.grammar.nonterminals.size() == once.grammar.nonterminals.size());
        CHECK(dsl_print(twice.grammar) == dsl_print(once.grammar));
    }
}

TEST_CASE("binarization is deterministic") {
    Grammar g = fixture("ex3");
    CHECK(dsl_print(binarize(g).grammar) == dsl_print(binarize(g).grammar));
}

TEST_CASE("shared suffixes share a fold") {
    Grammar g = inline_grammar("S -> 'a' A A | 'b' A A ;\nA -> 'a' ;");
    BinaryGrammar bg = binarize(g);
    // T_a, T_b and one fold for "A A"
    CHECK(bg.grammar.nonterminals.size() == 2 + 3);
}

TEST_CASE("unit dependencies come out in dependency order") {
    BinaryGrammar bg = binarize(inline_grammar("S -> A ;\nA -> B ;\nB -> 'a' ;"));
    CHECK(bg.scc_of[bg.id("B")] < bg.scc_of[bg.id("A")]);
    CHECK(bg.scc_of[bg.id("A")] < bg.scc_of[bg.id("S")]);
}

TEST_CASE("grammar statistics") {
    auto s = stats(fixture("ex1"));
    CHECK(s.nonterminals == 4);
    CHECK(s.rules == 8);
    CHECK(s.positive_conjuncts == 9);
    CHECK(s.negative_conjuncts == 0);
    CHECK(s.terminals == 2);
    auto s4 = stats(fixture("ex4"));
    CHECK(s4.positive_conjuncts == 8);
    CHECK(s4.negative_conjuncts == 1);
}
