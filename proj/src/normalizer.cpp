#include "boolgram/normalizer.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <unordered_map>

#include "boolgram/dsl.hpp"
#include "boolgram/oracle.hpp"

namespace boolgram {

std::string fresh_terminal_name(char c) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "__bin_t%02x", static_cast<unsigned char>(c));
    return buf;
}

std::string fresh_fold_name(const std::vector<Symbol>& suffix) {
    // FNV-1a over the printed body
    std::string text = print_conjunct(Conjunct{false, suffix});
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "__bin_%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

struct Builder {
    Grammar g;
    std::unordered_map<std::string, int> id;
    std::unordered_map<std::string, std::string> fold_text;  // name -> printed suffix, for collision checks
    std::vector<BinRule> rules;
    std::vector<bool> fresh;

    int add_nt(const std::string& name, bool is_fresh) {
        auto [it, inserted] = id.emplace(name, static_cast<int>(g.nonterminals.size()));
        if (inserted) {
            g.nonterminals.push_back(name);
            fresh.push_back(is_fresh);
        }
        return it->second;
    }

    int term_nt(char c) {
        std::string name = fresh_terminal_name(c);
        auto it = id.find(name);
        if (it != id.end()) return it->second;
        int a = add_nt(name, true);
        Rule r;
        r.head = name;
        r.conjuncts.push_back(Conjunct{false, {Symbol::term(c)}});
        g.rules.push_back(r);
        BinConjunct bc;
        bc.kind = BinConjunct::Kind::Term;
        bc.ch = c;
        rules.push_back(BinRule{a, {bc}});
        return a;
    }

    int sym_id(const Symbol& s) { return s.is_terminal() ? term_nt(s.ch) : id.at(s.name); }

    Symbol as_symbol(int a) const { return Symbol::nt(g.nonterminals[a]); }

    // Nonterminal for body[t..], suffix length >= 2.
    int fold(const std::vector<Symbol>& body, std::size_t t, const std::vector<int>& ids) {
        std::vector<Symbol> suffix(body.begin() + t, body.end());
        std::string name = fresh_fold_name(suffix);
        std::string text = print_conjunct(Conjunct{false, suffix});
        auto it = id.find(name);
        if (it != id.end()) {
            auto ft = fold_text.find(name);
            if (ft != fold_text.end() && ft->second != text)
                throw GrammarError("fresh-name collision between folded bodies " + ft->second + " and " + text);
            return it->second;
        }
        int right = (t + 2 == body.size()) ? ids[t + 1] : fold(body, t + 1, ids);
        int a = add_nt(name, true);
        fold_text[name] = text;
        Rule r;
        r.head = name;
        r.conjuncts.push_back(Conjunct{false, {as_symbol(ids[t]), as_symbol(right)}});
        g.rules.push_back(r);
        BinConjunct bc;
        bc.kind = BinConjunct::Kind::Pair;
        bc.a = ids[t];
        bc.b = right;
        rules.push_back(BinRule{a, {bc}});
        return a;
    }
};

}  // namespace

BinaryGrammar binarize(const Grammar& src) {
    for (const Rule& r : src.rules) {
        if (std::none_of(r.conjuncts.begin(), r.conjuncts.end(), [](const Conjunct& c) { return !c.negative; }))
            throw GrammarError("rule without a positive conjunct cannot be normalized: " + print_rule(r));
    }
    BinaryGrammar bg;
    bg.original = src;
    Builder b;
    b.g.name = src.name;
    b.g.alphabet = src.alphabet;
    b.g.start = src.start;
    for (const std::string& n : src.nonterminals) b.add_nt(n, false);
    bg.num_original = static_cast<int>(src.nonterminals.size());

    // Original rules keep their indices; fresh rules are collected and appended.
    std::vector<Rule> main_rules;
    std::vector<BinRule> main_bin;
    for (const Rule& r : src.rules) {
        Rule out;
        out.head = r.head;
        out.origin = r.origin;
        BinRule br;
        br.head = b.id.at(r.head);
        std::vector<ConjunctLayout> lay;
        for (const Conjunct& c : r.conjuncts) {
            ConjunctLayout cl;
            cl.negative = c.negative;
            cl.symbols = c.body;
            BinConjunct bc;
            bc.negative = c.negative;
            Conjunct oc;
            oc.negative = c.negative;
            const std::size_t k = c.body.size();
            if (k == 0) {
                bc.kind = BinConjunct::Kind::Eps;
            } else if (k == 1) {
                if (c.body[0].is_terminal()) {
                    bc.kind = BinConjunct::Kind::Term;
                    bc.ch = c.body[0].ch;
                    cl.ids.push_back(-1);
                } else {
                    bc.kind = BinConjunct::Kind::Unit;
                    bc.a = b.id.at(c.body[0].name);
                    cl.ids.push_back(bc.a);
                }
                oc.body = c.body;
            } else {
                for (const Symbol& s : c.body) cl.ids.push_back(b.sym_id(s));
                cl.rest.assign(k, -1);
                cl.rest[k - 1] = cl.ids[k - 1];
                for (std::size_t t = k - 1; t-- > 1;) cl.rest[t] = b.fold(c.body, t, cl.ids);
                bc.kind = BinConjunct::Kind::Pair;
                bc.a = cl.ids[0];
                bc.b = cl.rest[1];
                oc.body = {b.as_symbol(bc.a), b.as_symbol(bc.b)};
            }
            out.conjuncts.push_back(oc);
            br.conjuncts.push_back(bc);
            lay.push_back(std::move(cl));
        }
        main_rules.push_back(std::move(out));
        main_bin.push_back(std::move(br));
        bg.layouts.push_back(std::move(lay));
    }
    std::vector<Rule> fresh_rules = std::move(b.g.rules);
    std::vector<BinRule> fresh_bin = std::move(b.rules);
    b.g.rules = std::move(main_rules);
    b.g.rules.insert(b.g.rules.end(), fresh_rules.begin(), fresh_rules.end());
    bg.rules = std::move(main_bin);
    bg.rules.insert(bg.rules.end(), fresh_bin.begin(), fresh_bin.end());
    bg.grammar = std::move(b.g);
    bg.is_fresh = b.fresh;
    const int N = bg.size();
    bg.start = bg.id(src.start);

    std::map<std::pair<int, int>, int> pid;
    bg.rules_of.assign(N, {});
    for (std::size_t r = 0; r < bg.rules.size(); ++r) {
        bg.rules_of[bg.rules[r].head].push_back(static_cast<int>(r));
        for (BinConjunct& c : bg.rules[r].conjuncts)
            if (c.kind == BinConjunct::Kind::Pair) {
                auto [it, ins] = pid.emplace(std::make_pair(c.a, c.b), static_cast<int>(bg.pairs.size()));
                if (ins) bg.pairs.push_back({c.a, c.b});
                c.pair_id = it->second;
            }
    }
    bg.fold_pair.assign(N, -1);
    for (int a = 0; a < N; ++a)
        if (bg.is_fresh[a] && bg.rules_of[a].size() == 1) {
            const BinRule& r = bg.rules[bg.rules_of[a][0]];
            if (r.conjuncts.size() == 1 && r.conjuncts[0].kind == BinConjunct::Kind::Pair)
                bg.fold_pair[a] = r.conjuncts[0].pair_id;
        }

    // nullable set from the oracle's empty-string layer
    OracleOptions opt;
    opt.parallel = false;
    LayeredFacts f0 = evaluate_layered(bg.grammar, "", 0, opt);
    if (f0.status != LayeredFacts::Status::Valid) throw GrammarError("empty-string layer: " + f0.detail);
    bg.nullable.assign(N, false);
    for (int a = 0; a < N; ++a) bg.nullable[a] = f0.layers[0][a] == Truth::True;

    // unit graph
    std::vector<std::vector<std::pair<int, bool>>> adj(N);
    for (const BinRule& r : bg.rules)
        for (const BinConjunct& c : r.conjuncts) {
            auto edge = [&](int to) {
                bg.unit_edges.push_back({r.head, to, c.negative});
                adj[r.head].push_back({to, c.negative});
            };
            if (c.kind == BinConjunct::Kind::Unit) edge(c.a);
            if (c.kind == BinConjunct::Kind::Pair) {
                if (bg.nullable[c.a]) edge(c.b);
                if (bg.nullable[c.b]) edge(c.a);
            }
        }

    // Tarjan, iterative; SCCs come out dependency-first
    bg.scc_of.assign(N, -1);
    {
        std::vector<int> index(N, -1), low(N, 0), stack;
        std::vector<bool> on(N, false);
        int counter = 0;
        struct Frame {
            int v;
            std::size_t e;
        };
        for (int root = 0; root < N; ++root) {
            if (index[root] >= 0) continue;
            std::vector<Frame> call{{root, 0}};
            index[root] = low[root] = counter++;
            stack.push_back(root);
            on[root] = true;
            while (!call.empty()) {
                Frame& fr = call.back();
                int v = fr.v;
                if (fr.e < adj[v].size()) {
                    int w = adj[v][fr.e++].first;
                    if (index[w] < 0) {
                        index[w] = low[w] = counter++;
                        stack.push_back(w);
                        on[w] = true;
                        call.push_back({w, 0});
                    } else if (on[w]) {
                        low[v] = std::min(low[v], index[w]);
                    }
                    continue;
                }
                if (low[v] == index[v]) {
                    std::vector<int> comp;
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on[w] = false;
                        bg.scc_of[w] = static_cast<int>(bg.sccs.size());
                        comp.push_back(w);
                    } while (w != v);
                    std::sort(comp.begin(), comp.end());
                    bg.sccs.push_back(comp);
                }
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
        }
    }
    bg.scc_cyclic.assign(bg.sccs.size(), false);
    for (const UnitEdge& e : bg.unit_edges) {
        if (bg.scc_of[e.from] != bg.scc_of[e.to]) continue;
        bg.scc_cyclic[bg.scc_of[e.from]] = true;
        if (!e.negative) continue;
        // report the cycle: the negative edge followed by a path back inside the component
        std::vector<int> prev(N, -2);
        std::vector<int> queue{e.to};
        prev[e.to] = -1;
        for (std::size_t h = 0; h < queue.size() && prev[e.from] == -2; ++h)
            for (auto [w, neg] : adj[queue[h]])
                if (bg.scc_of[w] == bg.scc_of[e.from] && prev[w] == -2) {
                    prev[w] = queue[h];
                    queue.push_back(w);
                }
        std::vector<std::string> path;
        for (int v = e.from; v >= 0 && v != e.to; v = prev[v]) path.push_back(bg.grammar.nonterminals[v]);
        path.push_back(bg.grammar.nonterminals[e.to]);
        std::reverse(path.begin(), path.end());
        std::string cyc = bg.grammar.nonterminals[e.from] + " -(neg)-> ";
        for (std::size_t k = 0; k < path.size(); ++k) cyc += (k ? " -> " : "") + path[k];
        throw GrammarError("negative edge inside a unit-dependency cycle: " + cyc);
    }
    return bg;
}

GrammarStats stats(const Grammar& g) {
    GrammarStats s;
    s.nonterminals = g.nonterminals.size();
    s.rules = g.rules.size();
    s.terminals = g.alphabet.size();
    for (const Rule& r : g.rules)
        for (const Conjunct& c : r.conjuncts) {
            (c.negative ? s.negative_conjuncts : s.positive_conjuncts)++;
            for (const Symbol& x : c.body) s.terminal_occurrences += x.is_terminal();
        }
    return s;
}

}  // namespace boolgram
