#include <doctest.h>

#include <set>

#include "boolgram/dsl.hpp"
#include "boolgram/oracle.hpp"
#include "fixtures.hpp"
#include "predicates.hpp"

using namespace boolgram;

TEST_CASE("parse the (a^n b)^k grammar") {
    Grammar g = fixture("ex1");
    CHECK(g.nonterminals == std::vector<std::string>{"S", "A", "C", "B"});
    CHECK(g.rules.size() == 8);
    CHECK(g.start == "S");
    CHECK(g.alphabet == "ab");
}

TEST_CASE("single-binder template") {
    Grammar g = inline_grammar("forall s in [ab]: X_{s} -> '{s}';\nS -> X_a X_b ;");
    REQUIRE(g.rules.size() == 3);
    CHECK(print_rule(g.rules[0]) == "X_a -> 'a' ;");
    CHECK(print_rule(g.rules[1]) == "X_b -> 'b' ;");
}

TEST_CASE("distinctness constraint over two binders") {
    Grammar g = inline_grammar("forall s in [ab], t in [ab] (s != t): P_{s}{t} -> '{s}' '{t}';\nS -> P_ab | P_ba ;");
    CHECK(g.rules.size() == 4);
    CHECK(print_rule(g.rules[0]) == "P_ab -> 'a' 'b' ;");
    CHECK(print_rule(g.rules[1]) == "P_ba -> 'b' 'a' ;");
}

TEST_CASE("template blocks with several rules and nesting") {
    Grammar g = inline_grammar(
        "forall s in [ab] {\n  X_{s} -> '{s}' ;\n  forall t in [ab]: Y_{s}{t} -> X_{s} '{t}' ;\n}\nS -> Y_ab ;");
    CHECK(g.rules.size() == 2 + 4 + 1);
}

TEST_CASE("canonical printing of a negative conjunct") {
    std::string text = dsl_print(fixture("ex4"));
    CHECK(text.find("S -> S A & ~ C 'b' | A ;\n") != std::string::npos);
}

TEST_CASE("empty body prints as eps") {
    Grammar g = inline_grammar("S -> 'a' S | eps ;");
    CHECK(dsl_print(g).find("S -> 'a' S | eps ;") != std::string::npos);
}

TEST_CASE("special terminals round-trip") {
    Grammar g = inline_grammar("S -> '\\'' '\\\\' ' ' '{' '}' '#' ;", "'\\'' '\\\\' ' ' '{' '}' '#'");
    REQUIRE(g.rules.size() == 1);
    CHECK(g.rules[0].conjuncts[0].body.size() == 6);
    CHECK(g.rules[0].conjuncts[0].body[0].ch == '\'');
    CHECK(g.rules[0].conjuncts[0].body[1].ch == '\\');
    CHECK(g.rules[0].conjuncts[0].body[3].ch == '{');
    Grammar h = dsl_parse(dsl_print(g));
    CHECK(h == g);
}

TEST_CASE("print/parse round trip is structural identity and a fixed point") {
    for (const char* name : {"ex1", "ex3", "ex4", "l5", "model-boolean", "model-unamb"}) {
        Grammar g = fixture(name);
        std::string once = dsl_print(g);
        Grammar h = dsl_parse(once);
        CHECK_MESSAGE(h == g, name);
        CHECK(dsl_print(h) == once);
    }
}

TEST_CASE("rule-less declared nonterminals survive printing") {
    Grammar g = inline_grammar("S -> 'a' | Q ;\nnonterminal Q ;");
    CHECK(g.nonterminals == std::vector<std::string>{"S", "Q"});
    CHECK(dsl_parse(dsl_print(g)) == g);
}

TEST_CASE("hyphenated nonterminal names") {
    Grammar g = inline_grammar("S -> all-variables-declared ;\nall-variables-declared -> 'a' | n-of-arg-equal-0 ;\n"
                               "n-of-arg-equal-0 -> 'b' ;");
    CHECK(g.has_nonterminal("all-variables-declared"));
    CHECK(g.has_nonterminal("n-of-arg-equal-0"));
}

TEST_CASE("located errors") {
    try {
        dsl_parse("start S ;\nalphabet 'a' ;\nS -> 'a' 'b' ;", "f.bgr");
        FAIL("expected an error");
    } catch (const GrammarError& e) {
        REQUIRE(!e.diagnostics.empty());
        CHECK(e.diagnostics[0].loc.line == 3);
        CHECK(std::string(e.what()).find("not in the alphabet") != std::string::npos);
    }
    try {
        dsl_parse("start S ;\nalphabet 'a' ;\nS -> 'a' \n T -> 'a' ;", "f.bgr");
        FAIL("expected an error");
    } catch (const GrammarError& e) {
        CHECK(e.diagnostics[0].loc.line == 4);
    }
    CHECK_THROWS_AS(dsl_parse("start S ;\nalphabet 'a' ;\nS -> X_{s} ;"), GrammarError);
    CHECK_THROWS_AS(dsl_parse("start S ;\nalphabet 'a' ;\nS -> '{s}' ;"), GrammarError);
    CHECK_THROWS_AS(dsl_parse("alphabet 'a' ;\nS -> 'a' ;"), GrammarError);
    CHECK_THROWS_AS(dsl_parse("start S ;\nS -> 'a' ;"), GrammarError);
    CHECK_THROWS_AS(dsl_parse("start S ;\nstart S ;\nalphabet 'a' ;\nS -> 'a' ;"), GrammarError);
    CHECK_THROWS_AS(dsl_parse("start S ;\nalphabet 'a' ;\nS -> 'a' & ;"), GrammarError);
    CHECK_THROWS_AS(dsl_parse("start S ;\nalphabet 'a' ;\nS -> Q ;"), GrammarError);
}

TEST_CASE("DFA to right-linear rules") {
    // a b*, total over {a, b} with a dead state
    DfaSpec d;
    d.states = {"0", "1", "2"};
    d.initial = "0";
    d.accepting = {"1"};
    d.charset = "ab";
    d.transitions = {{"0", 'a', "1"}, {"0", 'b', "2"}, {"1", 'a', "2"},
                     {"1", 'b', "1"}, {"2", 'a', "2"}, {"2", 'b', "2"}};
    DfaRulesOptions live;
    live.omit_dead = true;
    auto rules = dfa_to_rules(d, "Q", std::nullopt, live);
    REQUIRE(rules.size() == 3);
    CHECK(print_rule(rules[0]) == "Q0 -> 'a' Q1 ;");
    CHECK(print_rule(rules[1]) == "Q1 -> 'b' Q1 ;");
    CHECK(print_rule(rules[2]) == "Q1 -> eps ;");
    auto all = dfa_to_rules(d, "Q", std::nullopt);
    CHECK(all.size() == 7);
    auto suffixed = dfa_to_rules(d, "Q", std::string("W"), live);
    CHECK(print_rule(suffixed[2]) == "Q1 -> W ;");
    for (const Rule& r : all) {
        CHECK(r.conjuncts.size() == 1);
        CHECK_FALSE(r.conjuncts[0].negative);
    }

    DfaSpec partial = d;
    partial.transitions.pop_back();
    CHECK_THROWS_AS(dfa_to_rules(partial, "Q", std::nullopt), GrammarError);
    DfaSpec nondet = d;
    nondet.transitions.push_back({"0", 'a', "2"});
    CHECK_THROWS_AS(dfa_to_rules(nondet, "Q", std::nullopt), GrammarError);
}

namespace {

bool plain_identifier(const std::string& w) {
    if (w.empty() || !(w[0] >= 'a' && w[0] <= 'z')) return false;
    for (char c : w)
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return false;
    return true;
}

Grammar dfa_grammar(const Dfa& dfa) {
    DfaRulesOptions live;
    live.omit_dead = true;
    Grammar g;
    g.alphabet = letters_digits();
    DfaSpec spec = to_spec(dfa, "q");
    g.rules = dfa_to_rules(spec, "I", std::nullopt, live);
    for (const Rule& r : g.rules)
        if (!g.has_nonterminal(r.head)) g.nonterminals.push_back(r.head);
    g.start = "I" + spec.initial;
    REQUIRE(!has_errors(validate(g)));
    return g;
}

}  // namespace

TEST_CASE("keyword-excluding identifier automaton up to length 6") {
    Grammar g = dfa_grammar(identifier_dfa());
    // sorted, so both sides come out in the same order
    const std::string alpha = normalize_alphabet("varifelswhntu0");
    OracleOptions opt;
    opt.budget = 10'000'000;
    auto got = enumerate(g, g.start, alpha, 6, opt);
    std::set<std::string> kw{"var", "if", "else", "while", "return"};
    auto want = preds::filter(alpha, 6, [&](const std::string& w) { return plain_identifier(w) && !kw.count(w); });
    CHECK(got.size() == want.size());
    CHECK(got == want);
}

TEST_CASE("identifiers other than main") {
    Grammar g = dfa_grammar(identifier_not_main_dfa());
    auto got = enumerate(g, g.start, "mainsx", 5);
    auto want = preds::filter("mainsx", 5, [](const std::string& w) { return plain_identifier(w) && w != "main"; });
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);
    Dfa d = identifier_not_main_dfa();
    CHECK_FALSE(d.accepts("main"));
    CHECK(d.accepts("mains"));
    CHECK(d.accepts("mai"));
    CHECK(d.accepts("x"));
}

TEST_CASE("name-list binders and placeholder-led identifiers") {
    Grammar g = inline_grammar("forall op in (Plus, Minus): E -> E {op} T ;\nforall n in (Plus, Minus): {n} -> 'a' ;\nS -> E ;\nE -> 'b' ;\nT -> 'b' ;");
    REQUIRE(g.rules.size() == 2 + 2 + 3);
    CHECK(print_rule(g.rules[0]) == "E -> E Plus T ;");
    CHECK(print_rule(g.rules[1]) == "E -> E Minus T ;");
    CHECK(print_rule(g.rules[2]) == "Plus -> 'a' ;");
    CHECK(g.has_nonterminal("Minus"));
}

TEST_CASE("a terminal placeholder needs a one-character binding") {
    try {
        inline_grammar("forall n in (ab, b): S -> '{n}' ;");
        FAIL("expected an error");
    } catch (const GrammarError& e) {
        CHECK(std::string(e.what()).find("bound to a name") != std::string::npos);
    }
}

TEST_CASE("subset construction") {
    Nfa n;
    n.charset = "ab";
    int s = n.add_state(), t = n.add_state(true);
    n.initial = {s};
    // (a|b)* a b
    int m = n.add_state();
    n.add_edge(s, "ab", s);
    n.add_edge(s, "a", m);
    n.add_edge(m, "b", t);
    Dfa d = nfa_to_dfa(n);
    for (const std::string& w : preds::all_strings("ab", 6))
        CHECK_MESSAGE(d.accepts(w) == (w.size() >= 2 && w.substr(w.size() - 2) == "ab"), w);
    CHECK(dfa_minimize(d).size() == 3);
    CHECK_THROWS_AS(n.add_edge(s, "c", t), GrammarError);
}
