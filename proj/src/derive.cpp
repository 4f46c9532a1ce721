// Conjunctive derivations as explicit term rewriting.
#include <algorithm>
#include <unordered_map>

#include "boolgram/oracle.hpp"

namespace boolgram {

namespace {

struct Budget {
    std::uint64_t used = 0, limit;
    bool tick() { return ++used <= limit; }
};

struct Witness {
    std::size_t rule = 0;
    std::vector<std::vector<int>> cuts;  // per conjunct: boundaries p0=i < p1 ... < pk=j
};

// Bottom-up least fixpoint over the spans of w, recording for each derived
// fact the rule and partitions that derived it first.
class Searcher {
public:
    Searcher(const Grammar& g, const std::string& w, std::uint64_t limit) : g_(g), w_(w), b_{0, limit} {
        N_ = static_cast<int>(g.nonterminals.size());
        for (int a = 0; a < N_; ++a) id_[g.nonterminals[a]] = a;
        n_ = static_cast<int>(w.size());
        have_.assign(std::size_t(N_) * (n_ + 1) * (n_ + 1), 0);
        wit_.resize(have_.size());
        for (std::size_t r = 0; r < g.rules.size(); ++r) by_head_[id_.at(g.rules[r].head)].push_back(r);
    }

    // false when the budget ran out
    bool run() {
        for (int L = 0; L <= n_; ++L)
            for (int i = 0; i + L <= n_; ++i) {
                int j = i + L;
                bool changed = true;
                while (changed) {
                    changed = false;
                    for (int a = 0; a < N_; ++a) {
                        if (has(a, i, j)) continue;
                        for (std::size_t r : by_head_[a]) {
                            Witness wt;
                            wt.rule = r;
                            bool ok = true;
                            for (const Conjunct& c : g_.rules[r].conjuncts) {
                                std::vector<int> cut{i};
                                if (!partition(c.body, 0, i, j, cut)) {
                                    ok = false;
                                    break;
                                }
                                wt.cuts.push_back(cut);
                            }
                            if (!b_.tick()) return false;
                            if (ok) {
                                set(a, i, j, std::move(wt));
                                changed = true;
                                break;
                            }
                        }
                    }
                }
            }
        return true;
    }

    bool has(int a, int i, int j) const { return have_[key(a, i, j)]; }
    const Witness& witness(int a, int i, int j) const { return wit_[key(a, i, j)]; }
    int id(const std::string& n) const { return id_.at(n); }
    std::uint64_t used() const { return b_.used; }

private:
    std::size_t key(int a, int i, int j) const { return (std::size_t(a) * (n_ + 1) + i) * (n_ + 1) + j; }
    void set(int a, int i, int j, Witness w) {
        have_[key(a, i, j)] = 1;
        wit_[key(a, i, j)] = std::move(w);
    }

    bool partition(const std::vector<Symbol>& body, std::size_t t, int p, int j, std::vector<int>& cut) {
        if (t == body.size()) return p == j;
        const Symbol& x = body[t];
        b_.tick();
        if (x.is_terminal()) {
            if (p < j && w_[p] == x.ch) {
                cut.push_back(p + 1);
                if (partition(body, t + 1, p + 1, j, cut)) return true;
                cut.pop_back();
            }
            return false;
        }
        int a = id_.at(x.name);
        for (int q = (t + 1 == body.size() ? j : p); q <= j; ++q) {
            if (!has(a, p, q)) continue;
            cut.push_back(q);
            if (partition(body, t + 1, q, j, cut)) return true;
            cut.pop_back();
        }
        return false;
    }

    const Grammar& g_;
    const std::string& w_;
    Budget b_;
    int N_ = 0, n_ = 0;
    std::unordered_map<std::string, int> id_;
    std::unordered_map<int, std::vector<std::size_t>> by_head_;
    std::vector<std::uint8_t> have_;
    std::vector<Witness> wit_;
};

// ---- terms

struct Node {
    enum class K { Nt, Conj, Str } k;
    std::string name;                    // Nt
    int a = -1, i = 0, j = 0;            // Nt: fact to expand (search only)
    std::vector<std::vector<int>> seqs;  // Conj
    std::string str;                     // Str
};

struct Term {
    std::vector<Node> nodes;
    std::vector<int> top;

    std::string render_seq(const std::vector<int>& seq) const {
        if (seq.empty()) return "eps";
        std::string s;
        for (int x : seq) s += render(x);
        return s;
    }
    std::string render(int x) const {
        const Node& n = nodes[x];
        switch (n.k) {
            case Node::K::Nt: return n.name;
            case Node::K::Str: return n.str;
            case Node::K::Conj: {
                std::string s = "(";
                for (std::size_t c = 0; c < n.seqs.size(); ++c) s += (c ? " & " : "") + render_seq(n.seqs[c]);
                return s + ")";
            }
        }
        return "";
    }
    std::string render() const {
        if (top.empty()) return "eps";
        bool all_str = std::all_of(top.begin(), top.end(), [&](int x) { return nodes[x].k == Node::K::Str; });
        std::string s;
        for (int x : top) s += render(x);
        return (all_str && s.empty()) ? "eps" : s;
    }

    // leftmost node satisfying pred, in reading order
    template <class P>
    int find(const std::vector<int>& seq, P pred) const {
        for (int x : seq) {
            if (pred(x)) return x;
            if (nodes[x].k == Node::K::Conj)
                for (const auto& s : nodes[x].seqs) {
                    int r = find(s, pred);
                    if (r >= 0) return r;
                }
        }
        return -1;
    }
    int leftmost_nt() const {
        return find(top, [&](int x) { return nodes[x].k == Node::K::Nt; });
    }
    int leftmost_collapsible() const {
        return find(top, [&](int x) {
            const Node& n = nodes[x];
            if (n.k != Node::K::Conj) return false;
            std::string first;
            for (std::size_t c = 0; c < n.seqs.size(); ++c) {
                std::string s;
                for (int y : n.seqs[c]) {
                    if (nodes[y].k != Node::K::Str) return false;
                    s += nodes[y].str;
                }
                if (c == 0)
                    first = s;
                else if (s != first)
                    return false;
            }
            return true;
        });
    }
    void collapse(int x) {
        Node& n = nodes[x];
        std::string s;
        for (int y : n.seqs[0]) s += nodes[y].str;
        n.k = Node::K::Str;
        n.str = s;
        n.seqs.clear();
    }
    bool final() const {
        return std::all_of(top.begin(), top.end(), [&](int x) { return nodes[x].k == Node::K::Str; });
    }
};

// Replaces node x (a nonterminal) by the conjunction of the bodies of rule r.
// spans, when given, annotate the new nonterminal nodes for later expansion.
void substitute(Term& t, int x, const Rule& r, const Searcher* s, const Witness* wt) {
    std::vector<std::vector<int>> seqs;
    for (std::size_t c = 0; c < r.conjuncts.size(); ++c) {
        std::vector<int> seq;
        const auto& body = r.conjuncts[c].body;
        for (std::size_t k = 0; k < body.size(); ++k) {
            Node n;
            if (body[k].is_terminal()) {
                n.k = Node::K::Str;
                n.str = std::string(1, body[k].ch);
            } else {
                n.k = Node::K::Nt;
                n.name = body[k].name;
                if (s && wt) {
                    n.a = s->id(body[k].name);
                    n.i = wt->cuts[c][k];
                    n.j = wt->cuts[c][k + 1];
                }
            }
            t.nodes.push_back(n);
            seq.push_back(static_cast<int>(t.nodes.size()) - 1);
        }
        seqs.push_back(seq);
    }
    Node& n = t.nodes[x];
    n.k = Node::K::Conj;
    n.seqs = std::move(seqs);
}

}  // namespace

Derivation derive_conjunctive(const Grammar& g, const std::string& w, std::uint64_t step_budget) {
    if (classify(g) == Classification::Boolean)
        throw GrammarError("derivations are defined for conjunctive grammars only");
    Derivation d;
    Searcher s(g, w, step_budget);
    bool complete = s.run();
    d.work = s.used();
    const int n = static_cast<int>(w.size());
    int S = s.id(g.start);
    if (!s.has(S, 0, n)) {
        d.outcome = complete ? Derivation::Outcome::None : Derivation::Outcome::Unknown;
        return d;
    }
    d.outcome = Derivation::Outcome::Found;
    Term t;
    t.nodes.push_back(Node{Node::K::Nt, g.start, S, 0, n, {}, {}});
    t.top = {0};
    d.terms.push_back(t.render());
    for (;;) {
        int x = t.leftmost_collapsible();
        if (x >= 0) {
            t.collapse(x);
            d.steps.push_back({Derivation::Step::Kind::Collapse, 0});
            d.terms.push_back(t.render());
            continue;
        }
        x = t.leftmost_nt();
        if (x < 0) break;
        const Node nd = t.nodes[x];
        const Witness& wt = s.witness(nd.a, nd.i, nd.j);
        substitute(t, x, g.rules[wt.rule], &s, &wt);
        d.steps.push_back({Derivation::Step::Kind::Rule, wt.rule});
        d.terms.push_back(t.render());
    }
    return d;
}

bool replay_derivation(const Grammar& g, const std::string& w, const Derivation& d) {
    if (d.outcome != Derivation::Outcome::Found) return false;
    if (d.terms.size() != d.steps.size() + 1) return false;
    Term t;
    t.nodes.push_back(Node{Node::K::Nt, g.start, -1, 0, 0, {}, {}});
    t.top = {0};
    if (t.render() != d.terms[0]) return false;
    for (std::size_t k = 0; k < d.steps.size(); ++k) {
        const auto& st = d.steps[k];
        if (st.kind == Derivation::Step::Kind::Collapse) {
            int x = t.leftmost_collapsible();
            if (x < 0) return false;
            t.collapse(x);
        } else {
            int x = t.leftmost_nt();
            if (x < 0 || st.rule >= g.rules.size() || g.rules[st.rule].head != t.nodes[x].name) return false;
            substitute(t, x, g.rules[st.rule], nullptr, nullptr);
        }
        if (t.render() != d.terms[k + 1]) return false;
    }
    if (!t.final()) return false;
    std::string y;
    for (int x : t.top) y += t.nodes[x].str;
    return y == w;
}

}  // namespace boolgram
