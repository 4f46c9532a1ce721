#pragma once

#include <string>
#include <vector>

#include "boolgram/dsl.hpp"
#include "boolgram/grammar.hpp"

namespace boolgram {

// Directory holding the shipped .bgr files; overridable with BOOLGRAM_GRAMMARS.
std::string grammar_dir();
// Directory holding the corpus; overridable with BOOLGRAM_CORPUS.
std::string corpus_dir();

Grammar build_boolean_grammar();
Grammar build_unambiguous_grammar();

// Newline, tab, carriage return, form feed and vertical tab become spaces.
std::string normalize_whitespace(const std::string& text);

struct CorpusCase {
    std::string name;
    std::string program;  // whitespace-normalized
    bool accept = false;
    std::string reason;   // rejection tag, empty for accept cases
    std::string anchor;
    std::string edit;     // description of the minimal edit (reject cases)
    std::string fixed;    // program after the minimal edit, normalized (reject cases)
    std::string note;     // optional interpretation note
};

extern const std::vector<std::string> kReasonTags;

// Throws std::runtime_error on an incomplete or malformed case directory.
CorpusCase load_case(const std::string& dir);
std::vector<CorpusCase> corpus(const std::string& dir = corpus_dir());

// Letters/digits words starting with a letter, minus var/if/else/while/return.
Dfa identifier_dfa();
// Same, also without "main".
Dfa identifier_not_main_dfa();
const std::string& letters_digits();
// Every character a program may use.
const std::string& model_alphabet();
// Strings ending in ';' plus spaces where that ';' does not close a var statement.
Dfa semicolon_not_closing_var_dfa();
// Nonempty strings without ';' '{' '}' that do not open with a space, an if/while header or else.
Dfa plain_statement_prefix_dfa();

// Right-linear rules of the unambiguous grammar built from the automata above,
// as they appear between the markers in model-unamb.bgr.
extern const std::string kGeneratedBegin;
extern const std::string kGeneratedEnd;
std::string generated_rules();
// Replace the text between the markers; throws std::runtime_error without them.
std::string splice_generated(const std::string& grammar_text, const std::string& block);
std::string extract_generated(const std::string& grammar_text);

// main(x) { return x+x+...+x; } with n summands
std::string return_sum_program(int n);

}  // namespace boolgram
