#include <doctest.h>

#include <algorithm>

#include "boolgram/oracle.hpp"
#include "fixtures.hpp"
#include "predicates.hpp"

using namespace boolgram;

TEST_CASE("S -> ~S has no solution on the empty string") {
    Grammar g = dsl_parse("start S ; alphabet 'a' ;\nS -> ~ S ;");
    auto f = evaluate_layered(g, "a", 3);
    CHECK(f.status == LayeredFacts::Status::Invalid);
    CHECK(f.failed_layer == 0);
    CHECK_FALSE(f.detail.empty());
    CHECK_THROWS_AS(member(g, ""), InvalidGrammar);
    try {
        member(g, "");
    } catch (const InvalidGrammar& e) {
        CHECK(e.layer == 0);
    }
}

TEST_CASE("S -> S is valid and empty") {
    Grammar g = dsl_parse("start S ; alphabet 'a' ;\nS -> S ;");
    for (int l = 0; l <= 6; ++l) {
        auto f = evaluate_layered(g, "a", l);
        CHECK(f.status == LayeredFacts::Status::Valid);
        CHECK(enumerate(g, "S", "a", l).empty());
    }
}

TEST_CASE("a boolean self-reference with two solutions is invalid") {
    // S = ~T, T = ~S: both {S} and {T} are consistent on every string
    Grammar g = dsl_parse("start S ; alphabet 'a' ;\nS -> ~ T & 'a' | ~ T ;\nT -> ~ S ;");
    auto f = evaluate_layered(g, "a", 2);
    CHECK(f.status == LayeredFacts::Status::Invalid);
    CHECK(f.failed_layer == 0);
}

TEST_CASE("residual unknowns beyond the cap are undetermined") {
    std::string body = "start S0 ; alphabet 'a' ;\n";
    // 11 independent two-solution pairs -> 22 residual unknowns
    for (int k = 0; k < 11; ++k) {
        std::string s = "S" + std::to_string(k), t = "T" + std::to_string(k);
        body += s + " -> ~ " + t + " ;\n" + t + " -> ~ " + s + " ;\n";
    }
    Grammar g = dsl_parse(body);
    auto f = evaluate_layered(g, "a", 1);
    CHECK(f.status == LayeredFacts::Status::Undetermined);
    CHECK(f.failed_layer == 0);
    OracleOptions big;
    big.residual_cap = 30;
    CHECK(evaluate_layered(g, "a", 1, big).status == LayeredFacts::Status::Invalid);
}

TEST_CASE("w c w membership") {
    Grammar g = fixture("ex3");
    CHECK(member(g, "abcab"));
    CHECK_FALSE(member(g, "abcba"));
    for (const std::string& w : preds::all_strings("abc", 7)) CHECK_MESSAGE(member(g, w) == preds::wcw(w), w);
}

TEST_CASE("w c w enumeration") {
    Grammar g = fixture("ex3");
    CHECK(enumerate(g, "S", "abc", 3) == std::vector<std::string>{"c", "aca", "bcb"});
}

TEST_CASE("(a^n b)^k layer 9 agrees with the direct predicate") {
    Grammar g = fixture("ex1");
    auto f = evaluate_layered(g, "ab", 9);
    REQUIRE(f.status == LayeredFacts::Status::Valid);
    int disagreements = 0;
    for (std::uint64_t k = 0; k < (1u << 9); ++k) {
        std::string w = f.string_at(9, k);
        Truth t = f.get("S", w);
        CHECK(t != Truth::Unknown);
        if ((t == Truth::True) != preds::same_blocks(w)) ++disagreements;
    }
    CHECK(disagreements == 0);
    CHECK(f.get("S", "aabaabaab") == Truth::True);
}

TEST_CASE("(a^n b)^k membership and enumeration") {
    Grammar g = fixture("ex1");
    CHECK(member(g, "aabaabaab"));
    CHECK_FALSE(member(g, "aabab"));
    CHECK(enumerate(g, "S", "ab", 4) == std::vector<std::string>{"b", "ab", "bb", "aab", "bbb", "aaab", "abab", "bbbb"});
}

TEST_CASE("negated comparison grammar") {
    Grammar g = fixture("ex4");
    CHECK(member(g, "aabab"));
    CHECK_FALSE(member(g, "aabaab"));
    auto got = enumerate(g, "S", "ab", 8);
    CHECK(got == preds::filter("ab", 8, preds::later_blocks_differ) );
}

TEST_CASE("(a^n b)^n by intersection") {
    Grammar g = fixture("l5");
    auto got = enumerate(g, "S", "ab", 12);
    CHECK(got == preds::filter("ab", 12, preds::square_blocks));
    CHECK(got == std::vector<std::string>{"ab", "aabaab", "aaabaaabaaab"});
}

TEST_CASE("nonterminal without rules denotes the empty language") {
    Grammar g = dsl_parse("start S ; alphabet 'a' ;\nS -> 'a' | Q ;\nnonterminal Q ;");
    CHECK(enumerate(g, "Q", "a", 4).empty());
    CHECK(enumerate(g, "S", "a", 4) == std::vector<std::string>{"a"});
}

TEST_CASE("member equals layered evaluation") {
    for (const char* name : {"ex1", "ex3", "ex4"}) {
        Grammar g = fixture(name);
        std::string alpha = g.alphabet;
        auto f = evaluate_layered(g, alpha, 6);
        for (const std::string& w : preds::all_strings(alpha, 6))
            CHECK_MESSAGE(member(g, w) == (f.get(g.start, w) == Truth::True), name << " " << w);
    }
}

TEST_CASE("layers do not change when more are computed") {
    Grammar g = fixture("ex4");
    auto a = evaluate_layered(g, "ab", 6), b = evaluate_layered(g, "ab", 8);
    for (int l = 0; l <= 6; ++l) CHECK(a.layers[l] == b.layers[l]);
}

TEST_CASE("a valid boolean grammar leaves no unknowns") {
    for (const char* name : {"ex1", "ex3", "ex4", "l5"}) {
        Grammar g = fixture(name);
        auto f = evaluate_layered(g, g.alphabet, 6);
        REQUIRE(f.status == LayeredFacts::Status::Valid);
        for (auto& layer : f.layers) CHECK(std::count(layer.begin(), layer.end(), Truth::Unknown) == 0);
    }
}

TEST_CASE("budget is enforced") {
    OracleOptions o;
    o.budget = 100;
    CHECK_THROWS_AS(evaluate_layered(fixture("ex1"), "ab", 9, o), BudgetExceeded);
}

TEST_CASE("single-step derivation trace") {
    Grammar g = dsl_parse("start S ; alphabet 'a' ;\nS -> 'a' ;");
    auto d = derive_conjunctive(g, "a", 1000);
    REQUIRE(d.outcome == Derivation::Outcome::Found);
    CHECK(d.terms == std::vector<std::string>{"S", "(a)", "a"});
    REQUIRE(d.steps.size() == 2);
    CHECK(d.steps[0].kind == Derivation::Step::Kind::Rule);
    CHECK(d.steps[1].kind == Derivation::Step::Kind::Collapse);
    CHECK(replay_derivation(g, "a", d));
}

TEST_CASE("derivation of aabaab ends with a collapse of equal conjuncts") {
    Grammar g = fixture("ex1");
    auto d = derive_conjunctive(g, "aabaab", 100000);
    REQUIRE(d.outcome == Derivation::Outcome::Found);
    CHECK(d.terms.front() == "S");
    CHECK(d.terms.back() == "aabaab");
    REQUIRE(d.terms.size() >= 2);
    CHECK(d.terms[d.terms.size() - 2] == "(aabaab & aabaab)");
    CHECK(d.steps.back().kind == Derivation::Step::Kind::Collapse);
    CHECK(replay_derivation(g, "aabaab", d));
}

TEST_CASE("no derivation for a non-member") {
    auto d = derive_conjunctive(fixture("ex1"), "aa", 100000);
    CHECK(d.outcome == Derivation::Outcome::None);
}

TEST_CASE("derivation step budget") {
    auto d = derive_conjunctive(fixture("ex1"), "aaabaaabaaab", 5);
    CHECK(d.outcome == Derivation::Outcome::Unknown);
}

TEST_CASE("derivations refuse negative conjuncts") {
    CHECK_THROWS_AS(derive_conjunctive(fixture("ex4"), "aabab", 1000), GrammarError);
}

TEST_CASE("derivability agrees with membership on conjunctive grammars") {
    for (const char* name : {"ex1", "ex3", "l5"}) {
        Grammar g = fixture(name);
        for (const std::string& w : preds::all_strings(g.alphabet, 7)) {
            auto d = derive_conjunctive(g, w, 1'000'000);
            REQUIRE(d.outcome != Derivation::Outcome::Unknown);
            bool m = member(g, w);
            CHECK_MESSAGE((d.outcome == Derivation::Outcome::Found) == m, name << " " << w);
            if (m) CHECK(replay_derivation(g, w, d));
        }
    }
}

TEST_CASE("split ambiguity on a two-nullable concatenation") {
    Grammar g = inline_grammar("S -> A B ;\nA -> 'a' | eps ;\nB -> 'a' | eps ;");
    auto f = check_ambiguity(g, {"a"});
    auto it = std::find_if(f.begin(), f.end(), [](auto& x) { return x.kind == AmbiguityFinding::Kind::Split; });
    REQUIRE(it != f.end());
    CHECK(it->site == "A B");
    CHECK(it->witness == "a");
    CHECK(it->partition_a != it->partition_b);
}

TEST_CASE("rule-choice ambiguity") {
    Grammar g = inline_grammar("S -> 'a' | A ;\nA -> 'a' ;");
    auto f = check_ambiguity(g, {"a"});
    REQUIRE(f.size() == 1);
    CHECK(f[0].kind == AmbiguityFinding::Kind::RuleChoice);
    CHECK(f[0].nonterminal == "S");
    CHECK(f[0].rule_a == 0);
    CHECK(f[0].rule_b == 1);
}

TEST_CASE("the (a^n b)^k grammar is unambiguous on short strings") {
    Grammar g = fixture("ex1");
    CHECK(check_ambiguity(g, preds::all_strings("ab", 8)).empty());
}
