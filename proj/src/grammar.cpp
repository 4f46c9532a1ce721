#include "boolgram/grammar.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "boolgram/dsl.hpp"
#include "boolgram/oracle.hpp"

namespace boolgram {

const char* to_string(Classification c) {
    switch (c) {
        case Classification::Ordinary: return "ordinary";
        case Classification::Conjunctive: return "conjunctive";
        case Classification::Boolean: return "boolean";
    }
    return "?";
}

bool Grammar::has_nonterminal(const std::string& n) const { return index_of(n) >= 0; }

int Grammar::index_of(const std::string& n) const {
    auto it = std::find(nonterminals.begin(), nonterminals.end(), n);
    return it == nonterminals.end() ? -1 : static_cast<int>(it - nonterminals.begin());
}

bool Grammar::in_alphabet(char c) const { return alphabet.find(c) != std::string::npos; }

std::vector<std::size_t> Grammar::rules_for(const std::string& head) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < rules.size(); ++i)
        if (rules[i].head == head) out.push_back(i);
    return out;
}

std::string Diagnostic::str() const {
    std::string s;
    if (!loc.file.empty()) s += loc.file + ":";
    if (loc.line > 0) s += std::to_string(loc.line) + ":";
    if (loc.column > 0) s += std::to_string(loc.column) + ":";
    if (!s.empty()) s += " ";
    s += severity == Severity::Error ? "error: " : "warning: ";
    return s + message;
}

std::string normalize_alphabet(const std::string& chars) {
    std::string a = chars;
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

bool has_errors(const std::vector<Diagnostic>& d) {
    return std::any_of(d.begin(), d.end(),
                       [](const Diagnostic& x) { return x.severity == Diagnostic::Severity::Error; });
}

namespace {

std::string rule_key(const Rule& r) { return print_rule(r); }

}  // namespace

std::vector<Diagnostic> validate(const Grammar& g) {
    std::vector<Diagnostic> out;
    auto err = [&](std::string m, SourceLoc loc = {}) {
        out.push_back({Diagnostic::Severity::Error, std::move(m), std::move(loc)});
    };
    std::unordered_set<std::string> declared(g.nonterminals.begin(), g.nonterminals.end());
    if (g.alphabet.empty()) err("alphabet is empty");
    if (g.start.empty())
        err("no start symbol declared");
    else if (!declared.count(g.start))
        err("start symbol " + g.start + " is not a declared nonterminal");

    std::unordered_set<std::string> reported;
    std::unordered_set<std::string> seen;
    for (const Rule& r : g.rules) {
        if (!declared.count(r.head)) err("rule head " + r.head + " is not declared", r.origin);
        if (r.conjuncts.empty()) err("rule must have at least one conjunct", r.origin);
        for (const Conjunct& c : r.conjuncts)
            for (const Symbol& s : c.body) {
                if (s.is_terminal()) {
                    if (!g.in_alphabet(s.ch))
                        err("terminal " + quote_terminal(s.ch) + " is not in the alphabet", r.origin);
                } else if (!declared.count(s.name) && reported.insert(s.name).second) {
                    err("unresolved nonterminal " + s.name, r.origin);
                }
            }
        if (!seen.insert(rule_key(r)).second)
            out.push_back({Diagnostic::Severity::Warning, "duplicate rule " + rule_key(r), r.origin});
    }
    return out;
}

std::vector<Diagnostic> dedupe_rules(Grammar& g) {
    std::vector<Diagnostic> out;
    std::unordered_set<std::string> seen;
    std::vector<Rule> kept;
    for (Rule& r : g.rules) {
        std::string k = rule_key(r);
        if (seen.insert(k).second)
            kept.push_back(std::move(r));
        else
            out.push_back({Diagnostic::Severity::Warning, "duplicate rule removed: " + k, r.origin});
    }
    g.rules = std::move(kept);
    return out;
}

Classification classify(const Grammar& g) {
    bool ordinary = true;
    for (const Rule& r : g.rules) {
        int pos = 0;
        for (const Conjunct& c : r.conjuncts) {
            if (c.negative) return Classification::Boolean;
            ++pos;
        }
        if (pos != 1) ordinary = false;
    }
    return ordinary ? Classification::Ordinary : Classification::Conjunctive;
}

ReachabilityReport reachability_report(const Grammar& g, int probe_length,
                                       std::optional<std::string> alphabet) {
    ReachabilityReport rep;
    rep.probe_length = probe_length;

    std::map<std::string, std::vector<std::string>> succ;
    for (const Rule& r : g.rules)
        for (const Conjunct& c : r.conjuncts)
            for (const Symbol& s : c.body)
                if (!s.is_terminal()) succ[r.head].push_back(s.name);
    std::unordered_set<std::string> reach{g.start};
    std::vector<std::string> stack{g.start};
    while (!stack.empty()) {
        std::string a = stack.back();
        stack.pop_back();
        for (const std::string& b : succ[a])
            if (reach.insert(b).second) stack.push_back(b);
    }
    for (const std::string& n : g.nonterminals)
        if (!reach.count(n)) rep.unreachable.insert(n);

    Grammar skel = g;
    for (Rule& r : skel.rules)
        r.conjuncts.erase(std::remove_if(r.conjuncts.begin(), r.conjuncts.end(),
                                         [](const Conjunct& c) { return c.negative; }),
                          r.conjuncts.end());
    skel.rules.erase(std::remove_if(skel.rules.begin(), skel.rules.end(),
                                    [](const Rule& r) { return r.conjuncts.empty(); }),
                     skel.rules.end());

    std::string alpha = alphabet.value_or(g.alphabet);
    try {
        OracleOptions opt;
        LayeredFacts f = evaluate_layered(skel, alpha, probe_length, opt);
        const std::size_t N = f.nonterminals.size();
        std::vector<bool> nonempty(N, false);
        for (const auto& layer : f.layers)
            for (std::size_t k = 0; k < layer.size(); ++k)
                if (layer[k] == Truth::True) nonempty[k % N] = true;
        for (std::size_t a = 0; a < N; ++a)
            if (!nonempty[a]) rep.unproductive.insert(f.nonterminals[a]);
    } catch (const BudgetExceeded&) {
        // Syntactic productivity of the skeleton: an over-approximation for conjunctive rules.
        rep.exact = false;
        std::unordered_set<std::string> prod;
        bool changed = true;
        while (changed) {
            changed = false;
            for (const Rule& r : skel.rules) {
                if (prod.count(r.head)) continue;
                bool ok = std::all_of(r.conjuncts.begin(), r.conjuncts.end(), [&](const Conjunct& c) {
                    return std::all_of(c.body.begin(), c.body.end(), [&](const Symbol& s) {
                        return s.is_terminal() || prod.count(s.name);
                    });
                });
                if (ok) changed = prod.insert(r.head).second || changed;
            }
        }
        for (const std::string& n : g.nonterminals)
            if (!prod.count(n)) rep.unproductive.insert(n);
    }
    return rep;
}

}  // namespace boolgram
