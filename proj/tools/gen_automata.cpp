// Rewrites the generated block of model-unamb.bgr from the automata in model.cpp.
//   gen_automata [grammar.bgr]        rewrite in place
//   gen_automata --check [grammar.bgr] exit 1 if the file is stale
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "boolgram/model.hpp"

int main(int argc, char** argv) {
    bool check = false;
    std::string path = boolgram::grammar_dir() + "/model-unamb.bgr";
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--check")
            check = true;
        else
            path = a;
    }
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot read " << path << "\n";
        return 2;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    try {
        std::string updated = boolgram::splice_generated(text, boolgram::generated_rules());
        if (check) {
            if (updated != text) {
                std::cerr << path << ": generated rules are stale\n";
                return 1;
            }
            return 0;
        }
        if (updated != text) {
            std::ofstream out(path);
            out << updated;
        }
        std::cout << path << "\n";
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 0;
}
