// Bounded ambiguity checking: evaluated over the substrings of the given
// inputs using the recognizer table of the binarized grammar.
#include <functional>
#include <set>
#include <unordered_map>

#include "boolgram/cyk.hpp"
#include "boolgram/dsl.hpp"
#include "boolgram/oracle.hpp"

namespace boolgram {

const char* to_string(AmbiguityFinding::Kind k) {
    return k == AmbiguityFinding::Kind::RuleChoice ? "rule-choice" : "split";
}

namespace {

struct Body {
    std::string site;
    std::string head;
    const ConjunctLayout* layout;
};

class FoldAmbiguity {
public:
    FoldAmbiguity(const ParseTable& t, const BinaryGrammar& bg) : t_(t), bg_(bg) {}

    // does the fold nonterminal f have two partitions of its suffix body on [k, j)?
    bool ambiguous(int f, int k, int j) {
        const std::uint64_t key = (std::uint64_t(f) * (t_.length() + 1) + k) * (t_.length() + 1) + j;
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        auto [x, y] = bg_.pairs[bg_.fold_pair[f]];
        int m = -1;
        int cnt = t_.count_splits(x, y, k, j, 2, &m);
        bool r = cnt >= 2 || (cnt == 1 && bg_.fold_pair[y] >= 0 && ambiguous(y, m, j));
        memo_[key] = r;
        return r;
    }

private:
    const ParseTable& t_;
    const BinaryGrammar& bg_;
    std::unordered_map<std::uint64_t, bool> memo_;
};

// first two partitions of [i, j) into the conjunct's symbols, as cut positions
std::vector<std::vector<std::size_t>> partitions(const ParseTable& t, const BinaryGrammar& bg, const ConjunctLayout& cl,
                                                 int i, int j) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t, int)> go = [&](std::size_t s, int p) {
        if (out.size() >= 2) return;
        if (s == cl.symbols.size()) {
            if (p == j) out.push_back(cur);
            return;
        }
        for (int q = p; q <= j; ++q) {
            const Symbol& x = cl.symbols[s];
            bool ok = x.is_terminal() ? (q == p + 1 && t.input()[p] == x.ch) : t.has(bg.id(x.name), p, q);
            if (!ok) continue;
            cur.push_back(static_cast<std::size_t>(q - i));
            go(s + 1, q);
            cur.pop_back();
        }
    };
    go(0, i);
    for (auto& v : out)
        if (!v.empty()) v.pop_back();  // the final cut is always the span end
    return out;
}

}  // namespace

std::vector<AmbiguityFinding> check_ambiguity(const Grammar& g, const std::vector<std::string>& inputs) {
    const BinaryGrammar bg = binarize(g);
    std::vector<AmbiguityFinding> out;
    std::set<std::tuple<int, std::string, std::string>> seen;

    std::vector<Body> bodies;
    {
        std::set<std::string> sites;
        for (std::size_t r = 0; r < g.rules.size(); ++r)
            for (const ConjunctLayout& cl : bg.layouts[r]) {
                if (cl.symbols.size() < 2) continue;
                std::string site = print_conjunct(Conjunct{false, cl.symbols});
                if (sites.insert(site).second) bodies.push_back({site, g.rules[r].head, &cl});
            }
    }
    std::vector<int> multi;  // original nonterminals with at least two rules
    for (int a = 0; a < bg.num_original; ++a)
        if (bg.rules_of[a].size() >= 2) multi.push_back(a);

    for (const std::string& w : inputs) {
        const ParseTable t = recognize(bg, w);
        const int n = t.length();
        for (int a : multi)
            for (int i = 0; i <= n; ++i)
                for (int j = i; j <= n; ++j) {
                    if (!t.has(a, i, j)) continue;
                    int first = -1, second = -1;
                    for (int r : bg.rules_of[a]) {
                        if (!t.rule_holds(bg.rules[r], i, j)) continue;
                        (first < 0 ? first : second) = r;
                        if (second >= 0) break;
                    }
                    if (second < 0) continue;
                    std::string u = w.substr(i, j - i);
                    const std::string& head = bg.grammar.nonterminals[a];
                    if (!seen.emplace(0, head, u).second) continue;
                    AmbiguityFinding f;
                    f.kind = AmbiguityFinding::Kind::RuleChoice;
                    f.nonterminal = head;
                    f.site = head;
                    f.witness = u;
                    f.rule_a = static_cast<std::size_t>(first);
                    f.rule_b = static_cast<std::size_t>(second);
                    out.push_back(std::move(f));
                }
        FoldAmbiguity fa(t, bg);
        for (const Body& b : bodies) {
            const int x = b.layout->ids[0], y = b.layout->rest[1];
            for (int i = 0; i <= n; ++i) {
                const std::uint64_t* e = t.ends(x, i);
                bool any = false;
                for (int k = 0; k < t.words() && !any; ++k) any = e[k] != 0;
                if (!any) continue;
                for (int j = i; j <= n; ++j) {
                    int m = -1;
                    int cnt = t.count_splits(x, y, i, j, 2, &m);
                    bool amb = cnt >= 2 || (cnt == 1 && bg.fold_pair[y] >= 0 && fa.ambiguous(y, m, j));
                    if (!amb) continue;
                    std::string u = w.substr(i, j - i);
                    if (!seen.emplace(1, b.site, u).second) continue;
                    AmbiguityFinding f;
                    f.kind = AmbiguityFinding::Kind::Split;
                    f.nonterminal = b.head;
                    f.site = b.site;
                    f.witness = u;
                    auto ps = partitions(t, bg, *b.layout, i, j);
                    if (ps.size() >= 2) {
                        f.partition_a = ps[0];
                        f.partition_b = ps[1];
                    }
                    out.push_back(std::move(f));
                }
            }
        }
    }
    return out;
}

}  // namespace boolgram
