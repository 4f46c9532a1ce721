// Serial vs OpenMP recognizer on the return x+x+...+x family.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <omp.h>

#include "boolgram/cyk.hpp"
#include "boolgram/model.hpp"
#include "boolgram/normalizer.hpp"

using namespace boolgram;

int main(int argc, char** argv) {
    CLI::App app{"recognizer benchmark"};
    std::string grammar = grammar_dir() + "/model-unamb.bgr";
    std::vector<int> sizes{16, 32, 64, 128, 256};
    int reps = 3;
    std::string csv;
    app.add_option("--grammar", grammar, "grammar file");
    app.add_option("--sizes", sizes, "summand counts")->delimiter(',');
    app.add_option("--repeat", reps, "repetitions per size (best is kept)")->check(CLI::PositiveNumber);
    app.add_option("--csv", csv, "also write the records here");
    CLI11_PARSE(app, argc, argv);

    BinaryGrammar bg = binarize(dsl_load(grammar));
    std::vector<std::string> inputs;
    for (int n : sizes) inputs.push_back(return_sum_program(n));
    std::vector<BenchRecord> recs = bench(bg, inputs, reps);

    std::printf("grammar %s, %d binary nonterminals, %d OpenMP threads\n", grammar.c_str(), bg.size(),
                omp_get_max_threads());
    std::printf("%8s %8s %12s %12s %8s\n", "summands", "length", "serial_s", "parallel_s", "speedup");
    std::ofstream out;
    if (!csv.empty()) {
        out.open(csv);
        out << "summands,length,serial_s,parallel_s,accepted\n";
    }
    for (std::size_t k = 0; k < recs.size(); ++k) {
        const BenchRecord& r = recs[k];
        std::printf("%8d %8zu %12.4f %12.4f %8.2f%s\n", sizes[k], r.length, r.seconds_serial, r.seconds,
                    r.seconds > 0 ? r.seconds_serial / r.seconds : 0.0, r.accepted ? "" : "  REJECTED");
        if (out) out << sizes[k] << "," << r.length << "," << r.seconds_serial << "," << r.seconds << "," << r.accepted << "\n";
    }
    if (recs.size() >= 2)
        std::printf("log-log slope: serial %.3f, parallel %.3f\n", loglog_slope(recs, true), loglog_slope(recs));
    for (const BenchRecord& r : recs)
        if (!r.accepted) return 1;
    return 0;
}
