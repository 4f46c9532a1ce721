#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <set>

#include "boolgram/cyk.hpp"
#include "boolgram/model.hpp"
#include "boolgram/normalizer.hpp"
#include "boolgram/oracle.hpp"

using namespace boolgram;
namespace fs = std::filesystem;

namespace {

const BinaryGrammar& boolean_bin() {
    static const BinaryGrammar bg = binarize(build_boolean_grammar());
    return bg;
}

const BinaryGrammar& unamb_bin() {
    static const BinaryGrammar bg = binarize(build_unambiguous_grammar());
    return bg;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

void check_verdicts(const BinaryGrammar& bg) {
    for (const CorpusCase& c : corpus()) {
        CHECK_MESSAGE(recognize(bg, c.program).accepted() == c.accept, c.name);
        if (!c.accept) CHECK_MESSAGE(recognize(bg, c.fixed).accepted(), c.name << " (fixed)");
    }
}

}  // namespace

TEST_CASE("whitespace normalization") {
    CHECK(normalize_whitespace("a\n\tb\r\nc\f\v") == "a  b  c  ");
}

TEST_CASE("corpus shape") {
    auto cases = corpus();
    CHECK(cases.size() >= 25);
    std::set<std::string> names;
    int accepts = 0;
    for (const CorpusCase& c : cases) {
        names.insert(c.name);
        accepts += c.accept;
        CHECK_FALSE(c.anchor.empty());
        for (char ch : c.program) CHECK_MESSAGE(model_alphabet().find(ch) != std::string::npos, c.name);
        if (!c.accept) {
            CHECK(std::find(kReasonTags.begin(), kReasonTags.end(), c.reason) != kReasonTags.end());
            CHECK_FALSE(c.edit.empty());
            CHECK(c.fixed != c.program);
        }
    }
    CHECK(accepts >= 10);
    CHECK(cases.size() - accepts >= 10);
    for (const char* n : {"sample", "floyd-L1", "dup-function"}) CHECK(names.count(n));
}

TEST_CASE("malformed case directories are refused") {
    fs::path d = fs::temp_directory_path() / "boolgram-case-test";
    fs::remove_all(d);
    fs::create_directories(d);
    write(d / "program.txt", "main(x) { return x; }\n");
    write(d / "expect.toml", "verdict = \"reject\"\nanchor = \"x\"\nreason = \"misc\"\nedit = \"y\"\n");
    write(d / "fixed.txt", "main(x) { return x; }\n");
    CHECK_THROWS_WITH_AS(load_case(d.string()), doctest::Contains("unknown reason tag"), std::runtime_error);
    write(d / "expect.toml", "verdict = \"reject\"\nanchor = \"x\"\nreason = \"syntax\"\n");
    CHECK_THROWS_WITH_AS(load_case(d.string()), doctest::Contains("lacks edit"), std::runtime_error);
    write(d / "expect.toml", "verdict = \"accept\"\nanchor = \"x\"\n");
    CorpusCase c = load_case(d.string());
    CHECK(c.accept);
    CHECK(c.program == "main(x) { return x; }");
    fs::remove_all(d);
}

TEST_CASE("the boolean grammar") {
    Grammar g = build_boolean_grammar();
    CHECK(classify(g) == Classification::Boolean);
    for (const std::string& nt : g.nonterminals) CHECK(g.has_nonterminal(nt));
    check_verdicts(boolean_bin());
}

TEST_CASE("the unambiguous grammar") {
    Grammar g = build_unambiguous_grammar();
    CHECK(classify(g) == Classification::Conjunctive);
    check_verdicts(unamb_bin());
}

TEST_CASE("both grammars accept the benchmark family") {
    CHECK(return_sum_program(3) == "main(x) { return x+x+x; }");
    for (int n : {1, 2, 7}) {
        CHECK(recognize(boolean_bin(), return_sum_program(n)).accepted());
        CHECK(recognize(unamb_bin(), return_sum_program(n)).accepted());
    }
}

TEST_CASE("generated rules are up to date") {
    std::ifstream in(grammar_dir() + "/model-unamb.bgr");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(extract_generated(ss.str()) == generated_rules());
    CHECK_THROWS_AS(extract_generated("S -> 'a' ;"), std::runtime_error);
    std::string t = "x\n" + kGeneratedBegin + "\nold\n" + kGeneratedEnd + "\n";
    CHECK(splice_generated(t, "new\n") == "x\n" + kGeneratedBegin + "\nnew\n" + kGeneratedEnd + "\n");
}

TEST_CASE("identifier automata") {
    Dfa id = identifier_dfa();
    CHECK(id.size() == 18);
    for (const char* w : {"x", "iffy", "elsewhere", "var1", "main", "whil"}) CHECK_MESSAGE(id.accepts(w), w);
    for (const char* w : {"", "if", "else", "var", "while", "return", "9a"}) CHECK_MESSAGE(!id.accepts(w), w);
    Dfa nm = identifier_not_main_dfa();
    CHECK_FALSE(nm.accepts("main"));
    CHECK_FALSE(nm.accepts("if"));
    CHECK(nm.accepts("mainx"));
    CHECK(nm.accepts("mai"));
}

TEST_CASE("semicolons that do not close a var statement") {
    Dfa d = semicolon_not_closing_var_dfa();
    for (const char* w : {"x = 1;", "return x;  ", "{ var a; x = a;", "variable;", "f(a, b);"}) CHECK_MESSAGE(d.accepts(w), w);
    for (const char* w : {"var a;", "{ var a, b ;  ", "x = 1; var  a1;", "x", "x; y"}) CHECK_MESSAGE(!d.accepts(w), w);
}

TEST_CASE("plain statement prefixes") {
    Dfa d = plain_statement_prefix_dfa();
    for (const char* w : {"x = y", "iffy = 1", "return x", "elsex", "if x", "whilex(y"}) CHECK_MESSAGE(d.accepts(w), w);
    for (const char* w : {"", " x", "if (x", "while(x", "else x", "else", "x;", "{ x"}) CHECK_MESSAGE(!d.accepts(w), w);
}

TEST_CASE("ambiguity of the two grammars") {
    Grammar b = build_boolean_grammar(), u = build_unambiguous_grammar();
    std::string multi = "f(arg, arg) { var arg; var arg, arg; arg=0; }";
    std::set<std::string> where;
    for (const auto& f : check_ambiguity(b, {multi})) where.insert(f.nonterminal);
    CHECK(where.count("this-variable-declared"));
    CHECK(where.count("declared-inside-function"));
    CHECK(where.count("declared-in-this-statement"));
    CHECK(check_ambiguity(u, {multi}).empty());
    std::string dangling = "main(x) { if (x) if (x) return 1; else return 2; return 3; }";
    CHECK_FALSE(check_ambiguity(b, {dangling}).empty());
    CHECK(check_ambiguity(u, {dangling}).empty());
}
