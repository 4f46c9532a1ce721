#pragma once

#include <string>

#include "boolgram/dsl.hpp"
#include "boolgram/model.hpp"

inline boolgram::Grammar fixture(const std::string& name) {
    return boolgram::dsl_load(boolgram::grammar_dir() + "/" + name + ".bgr");
}

inline boolgram::Grammar inline_grammar(const std::string& body, const std::string& alphabet = "'a' 'b'",
                                        const std::string& start = "S") {
    return boolgram::dsl_parse("start " + start + " ;\nalphabet " + alphabet + " ;\n" + body);
}
