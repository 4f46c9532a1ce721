#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boolgram/normalizer.hpp"

namespace boolgram {

// Table over spans [i, j), 0 <= i <= j <= n.  Stored twice as position bitsets:
// ends(A, i) has bit j set iff A derives w[i, j); starts(A, j) has bit i set.
class ParseTable {
public:
    ParseTable(const BinaryGrammar& bg, std::string input);

    const BinaryGrammar& grammar() const { return *bg_; }
    const std::string& input() const { return input_; }
    int length() const { return n_; }
    int words() const { return words_; }

    bool has(int A, int i, int j) const {
        return (ends(A, i)[j >> 6] >> (j & 63)) & 1u;
    }
    const std::uint64_t* ends(int A, int i) const { return &ends_[(std::size_t(A) * (n_ + 1) + i) * words_]; }
    const std::uint64_t* starts(int A, int j) const { return &starts_[(std::size_t(A) * (n_ + 1) + j) * words_]; }
    std::uint64_t* ends(int A, int i) { return &ends_[(std::size_t(A) * (n_ + 1) + i) * words_]; }
    std::uint64_t* starts(int A, int j) { return &starts_[(std::size_t(A) * (n_ + 1) + j) * words_]; }

    void set(int A, int i, int j) {
        ends(A, i)[j >> 6] |= std::uint64_t(1) << (j & 63);
        starts(A, j)[i >> 6] |= std::uint64_t(1) << (i & 63);
    }

    std::vector<int> row(int i, int j) const;  // nonterminal ids deriving w[i, j)
    bool accepted() const { return has(bg_->start, 0, n_); }
    bool accepts(const std::string& nt) const;

    // Evaluation of one binary conjunct on a filled span.
    bool conjunct_holds(const BinConjunct& c, int i, int j) const;
    bool rule_holds(const BinRule& r, int i, int j) const;
    // Number of split points k with a(i,k) and b(k,j), capped at cap.
    int count_splits(int a, int b, int i, int j, int cap, int* first = nullptr, int* second = nullptr) const;

private:
    const BinaryGrammar* bg_;
    std::string input_;
    int n_, words_;
    std::vector<std::uint64_t> ends_, starts_;
};

// Width levels run in order; spans of one width are filled by an OpenMP loop.
ParseTable recognize(const BinaryGrammar& bg, const std::string& w);
// Same algorithm on one thread; kept as the reference for tests and the benchmark.
ParseTable recognize_serial(const BinaryGrammar& bg, const std::string& w);

struct DagChild {
    bool leaf = false;
    int node = -1;  // internal child
    char ch = 0;    // leaf
    int pos = 0;    // leaf position
};

struct DagNode {
    int id = 0;
    std::string nt;
    std::size_t rule = 0;  // rule index in the original grammar
    int i = 0, j = 0;
    std::vector<std::vector<DagChild>> groups;  // one per positive conjunct
};

struct ParseDag {
    std::string input;
    int root = -1;
    std::vector<DagNode> nodes;
};

// First satisfied rule in grammar order, leftmost split per conjunct,
// nodes shared by (nonterminal, span).  Throws std::invalid_argument on rejected input.
ParseDag extract_dag(const ParseTable& t, const BinaryGrammar& bg);
bool verify_dag(const ParseDag& d, const ParseTable& t, const BinaryGrammar& bg, std::string* why = nullptr);
std::string dag_to_text(const ParseDag& d);
std::string dag_to_json(const ParseDag& d);

struct BenchRecord {
    std::size_t length = 0;
    double seconds = 0;         // parallel recognizer, best of repetitions
    double seconds_serial = 0;  // serial recognizer, best of repetitions
    bool accepted = false;
};
std::vector<BenchRecord> bench(const BinaryGrammar& bg, const std::vector<std::string>& inputs, int repetitions);
// Least-squares slope of log(seconds) against log(length).
double loglog_slope(const std::vector<BenchRecord>& recs, bool serial = false);

}  // namespace boolgram
