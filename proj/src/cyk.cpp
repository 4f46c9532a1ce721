#include "boolgram/cyk.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace boolgram {

ParseTable::ParseTable(const BinaryGrammar& bg, std::string input)
    : bg_(&bg), input_(std::move(input)), n_(static_cast<int>(input_.size())), words_((n_ + 1 + 63) / 64) {
    const std::size_t cells = std::size_t(bg.size()) * (n_ + 1) * words_;
    ends_.assign(cells, 0);
    starts_.assign(cells, 0);
}

std::vector<int> ParseTable::row(int i, int j) const {
    std::vector<int> out;
    for (int a = 0; a < bg_->size(); ++a)
        if (has(a, i, j)) out.push_back(a);
    return out;
}

bool ParseTable::accepts(const std::string& nt) const {
    int a = bg_->id(nt);
    return a >= 0 && has(a, 0, n_);
}

int ParseTable::count_splits(int a, int b, int i, int j, int cap, int* first, int* second) const {
    const std::uint64_t* e = ends(a, i);
    const std::uint64_t* s = starts(b, j);
    int cnt = 0;
    for (int w = i >> 6; w <= (j >> 6) && cnt < cap; ++w) {
        std::uint64_t x = e[w] & s[w];
        while (x && cnt < cap) {
            int k = w * 64 + std::countr_zero(x);
            if (cnt == 0 && first) *first = k;
            if (cnt == 1 && second) *second = k;
            ++cnt;
            x &= x - 1;
        }
    }
    return cnt;
}

bool ParseTable::conjunct_holds(const BinConjunct& c, int i, int j) const {
    switch (c.kind) {
        case BinConjunct::Kind::Eps: return i == j;
        case BinConjunct::Kind::Term: return j == i + 1 && input_[i] == c.ch;
        case BinConjunct::Kind::Unit: return has(c.a, i, j);
        case BinConjunct::Kind::Pair: return count_splits(c.a, c.b, i, j, 1) > 0;
    }
    return false;
}

bool ParseTable::rule_holds(const BinRule& r, int i, int j) const {
    for (const BinConjunct& c : r.conjuncts)
        if (conjunct_holds(c, i, j) == c.negative) return false;
    return true;
}

namespace {

// Per-thread state for filling one span.
class SpanFiller {
public:
    SpanFiller(const BinaryGrammar& bg, ParseTable& t)
        : bg_(bg), t_(t), row_((bg.size() + 63) / 64), stamp_(bg.pairs.size(), -1), pval_(bg.pairs.size(), 0) {}

    void fill(int i, int j) {
        i_ = i;
        j_ = j;
        ++cur_;
        std::fill(row_.begin(), row_.end(), 0);
        for (std::size_t s = 0; s < bg_.sccs.size(); ++s) {
            const auto& comp = bg_.sccs[s];
            if (!bg_.scc_cyclic[s]) {
                if (eval(comp[0])) setbit(comp[0]);
                continue;
            }
            // positive component: least fixpoint
            bool changed = true;
            while (changed) {
                changed = false;
                for (int a : comp)
                    if (!bit(a) && eval(a)) {
                        setbit(a);
                        changed = true;
                    }
            }
        }
        for (std::size_t w = 0; w < row_.size(); ++w) {
            std::uint64_t x = row_[w];
            while (x) {
                t_.set(static_cast<int>(w * 64 + std::countr_zero(x)), i, j);
                x &= x - 1;
            }
        }
    }

private:
    bool bit(int a) const { return (row_[a >> 6] >> (a & 63)) & 1u; }
    void setbit(int a) { row_[a >> 6] |= std::uint64_t(1) << (a & 63); }

    // strict splits i < k < j; same-span bits are not in the table yet
    bool inner(int pid) {
        if (stamp_[pid] == cur_) return pval_[pid];
        stamp_[pid] = cur_;
        const auto [a, b] = bg_.pairs[pid];
        const std::uint64_t* e = t_.ends(a, i_);
        const std::uint64_t* s = t_.starts(b, j_);
        bool v = false;
        for (int w = i_ >> 6; w <= (j_ >> 6); ++w)
            if (e[w] & s[w]) {
                v = true;
                break;
            }
        pval_[pid] = v;
        return v;
    }

    bool holds(const BinConjunct& c) {
        switch (c.kind) {
            case BinConjunct::Kind::Eps: return i_ == j_;
            case BinConjunct::Kind::Term: return j_ == i_ + 1 && t_.input()[i_] == c.ch;
            case BinConjunct::Kind::Unit: return bit(c.a);
            case BinConjunct::Kind::Pair:
                return (bg_.nullable[c.a] && bit(c.b)) || (bg_.nullable[c.b] && bit(c.a)) || inner(c.pair_id);
        }
        return false;
    }

    bool eval(int a) {
        for (int r : bg_.rules_of[a]) {
            bool ok = true;
            for (const BinConjunct& c : bg_.rules[r].conjuncts)
                if (holds(c) == c.negative) {
                    ok = false;
                    break;
                }
            if (ok) return true;
        }
        return false;
    }

    const BinaryGrammar& bg_;
    ParseTable& t_;
    std::vector<std::uint64_t> row_;
    std::vector<int> stamp_;
    std::vector<char> pval_;
    int cur_ = 0, i_ = 0, j_ = 0;
};

void check_input(const BinaryGrammar& bg, const std::string& w) {
    for (char c : w)
        if (!bg.grammar.in_alphabet(c))
            throw std::invalid_argument(std::string("input character '") + c + "' is not in the grammar alphabet");
}

void fill_empty(const BinaryGrammar& bg, ParseTable& t) {
    for (int i = 0; i <= t.length(); ++i)
        for (int a = 0; a < bg.size(); ++a)
            if (bg.nullable[a]) t.set(a, i, i);
}

}  // namespace

ParseTable recognize_serial(const BinaryGrammar& bg, const std::string& w) {
    check_input(bg, w);
    ParseTable t(bg, w);
    fill_empty(bg, t);
    SpanFiller f(bg, t);
    const int n = t.length();
    for (int width = 1; width <= n; ++width)
        for (int i = 0; i + width <= n; ++i) f.fill(i, i + width);
    return t;
}

ParseTable recognize(const BinaryGrammar& bg, const std::string& w) {
    check_input(bg, w);
    ParseTable t(bg, w);
    fill_empty(bg, t);
    const int n = t.length();
#pragma omp parallel
    {
        SpanFiller f(bg, t);
        for (int width = 1; width <= n; ++width) {
            // the implicit barrier at the end of the loop separates width levels
#pragma omp for schedule(dynamic, 4)
            for (int i = 0; i <= n - width; ++i) f.fill(i, i + width);
        }
    }
    return t;
}

// ---------------------------------------------------------------- parse DAG

namespace {

class DagBuilder {
public:
    DagBuilder(const ParseTable& t, const BinaryGrammar& bg) : t_(t), bg_(bg) {}

    int build(int a, int i, int j) {
        const std::uint64_t key = (std::uint64_t(a) * (t_.length() + 1) + i) * (t_.length() + 1) + j;
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        if (!active_.emplace(key).second) return -1;  // a cycle through this span
        int result = -1;
        for (int r : bg_.rules_of[a]) {
            if (!t_.rule_holds(bg_.rules[r], i, j)) continue;
            std::vector<std::vector<DagChild>> groups;
            bool ok = true;
            for (const ConjunctLayout& cl : bg_.layouts[r]) {
                if (cl.negative) continue;
                std::vector<DagChild> g;
                if (!split(cl, 0, i, j, g)) {
                    ok = false;
                    break;
                }
                groups.push_back(std::move(g));
            }
            if (!ok) continue;
            DagNode n;
            n.id = static_cast<int>(nodes_.size());
            n.nt = bg_.grammar.nonterminals[a];
            n.rule = static_cast<std::size_t>(r);
            n.i = i;
            n.j = j;
            n.groups = std::move(groups);
            nodes_.push_back(std::move(n));
            result = static_cast<int>(nodes_.size()) - 1;
            memo_[key] = result;
            break;
        }
        active_.erase(key);
        return result;
    }

    std::vector<DagNode> nodes_;

private:
    bool derives(const ConjunctLayout& cl, std::size_t t, int p, int q) const {
        const Symbol& s = cl.symbols[t];
        if (s.is_terminal()) return q == p + 1 && t_.input()[p] == s.ch;
        return t_.has(bg_.id(s.name), p, q);
    }

    bool split(const ConjunctLayout& cl, std::size_t t, int p, int j, std::vector<DagChild>& out) {
        const std::size_t k = cl.symbols.size();
        if (t == k) return p == j;
        const bool last = t + 1 == k;
        for (int q = last ? j : p; q <= j; ++q) {
            if (!derives(cl, t, p, q)) continue;
            if (!last && !t_.has(cl.rest[t + 1], q, j)) continue;
            const Symbol& s = cl.symbols[t];
            DagChild c;
            if (s.is_terminal()) {
                c.leaf = true;
                c.ch = s.ch;
                c.pos = p;
            } else {
                c.node = build(bg_.id(s.name), p, q);
                if (c.node < 0) continue;
            }
            out.push_back(c);
            if (split(cl, t + 1, q, j, out)) return true;
            out.pop_back();
        }
        return false;
    }

    const ParseTable& t_;
    const BinaryGrammar& bg_;
    std::unordered_map<std::uint64_t, int> memo_;
    std::unordered_set<std::uint64_t> active_;
};

}  // namespace

ParseDag extract_dag(const ParseTable& t, const BinaryGrammar& bg) {
    if (!t.accepted()) throw std::invalid_argument("input is not accepted; there is no parse DAG");
    DagBuilder b(t, bg);
    int root = b.build(bg.start, 0, t.length());
    if (root < 0) throw std::logic_error("no well-founded derivation found for an accepted input");
    // renumber in pre-order from the root
    std::vector<int> order, newid(b.nodes_.size(), -1);
    std::function<void(int)> visit = [&](int x) {
        if (newid[x] >= 0) return;
        newid[x] = static_cast<int>(order.size());
        order.push_back(x);
        for (const auto& g : b.nodes_[x].groups)
            for (const DagChild& c : g)
                if (!c.leaf) visit(c.node);
    };
    visit(root);
    ParseDag d;
    d.input = t.input();
    d.root = 0;
    for (int x : order) {
        DagNode n = b.nodes_[x];
        n.id = newid[x];
        for (auto& g : n.groups)
            for (DagChild& c : g)
                if (!c.leaf) c.node = newid[c.node];
        d.nodes.push_back(std::move(n));
    }
    return d;
}

bool verify_dag(const ParseDag& d, const ParseTable& t, const BinaryGrammar& bg, std::string* why) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (d.root < 0 || d.root >= static_cast<int>(d.nodes.size())) return fail("bad root");
    const DagNode& root = d.nodes[d.root];
    if (root.nt != bg.original.start || root.i != 0 || root.j != t.length()) return fail("root does not cover the input");
    for (const DagNode& n : d.nodes) {
        std::string at = "node n" + std::to_string(n.id) + ": ";
        int a = bg.id(n.nt);
        if (a < 0 || n.rule >= bg.original.rules.size() || bg.original.rules[n.rule].head != n.nt)
            return fail(at + "rule does not belong to its nonterminal");
        if (!t.rule_holds(bg.rules[n.rule], n.i, n.j)) return fail(at + "rule is not satisfied on its span");
        std::size_t g = 0;
        for (const ConjunctLayout& cl : bg.layouts[n.rule]) {
            if (cl.negative) continue;
            if (g >= n.groups.size()) return fail(at + "missing child group");
            const auto& grp = n.groups[g++];
            if (grp.size() != cl.symbols.size()) return fail(at + "child group does not match its conjunct");
            int p = n.i;
            for (std::size_t k = 0; k < grp.size(); ++k) {
                const DagChild& c = grp[k];
                const Symbol& s = cl.symbols[k];
                if (c.leaf) {
                    if (!s.is_terminal() || c.ch != s.ch || c.pos != p || p >= t.length() || t.input()[p] != c.ch)
                        return fail(at + "leaf mismatch");
                    ++p;
                } else {
                    if (c.node < 0 || c.node >= static_cast<int>(d.nodes.size())) return fail(at + "dangling child");
                    const DagNode& ch = d.nodes[c.node];
                    if (s.is_terminal() || ch.nt != s.name || ch.i != p) return fail(at + "child does not tile the span");
                    p = ch.j;
                }
            }
            if (p != n.j) return fail(at + "child group does not end at the span end");
        }
        if (g != n.groups.size()) return fail(at + "extra child groups");
    }
    // acyclicity
    std::vector<int> state(d.nodes.size(), 0);
    std::function<bool(int)> acyclic = [&](int x) {
        if (state[x] == 1) return false;
        if (state[x] == 2) return true;
        state[x] = 1;
        for (const auto& g : d.nodes[x].groups)
            for (const DagChild& c : g)
                if (!c.leaf && !acyclic(c.node)) return false;
        state[x] = 2;
        return true;
    };
    if (!acyclic(d.root)) return fail("cycle in the DAG");
    return true;
}

std::string dag_to_text(const ParseDag& d) {
    std::ostringstream os;
    std::vector<bool> shown(d.nodes.size(), false);
    std::function<void(int, int)> node = [&](int x, int ind) {
        const DagNode& n = d.nodes[x];
        std::string pad(ind, ' ');
        os << pad << "n" << n.id << " " << n.nt << " [" << n.i << "," << n.j << ")";
        if (shown[x]) {
            os << " shared\n";
            return;
        }
        shown[x] = true;
        os << " rule " << n.rule << "\n";
        for (std::size_t g = 0; g < n.groups.size(); ++g) {
            os << pad << "  &" << (g + 1) << "\n";
            for (const DagChild& c : n.groups[g]) {
                if (c.leaf)
                    os << pad << "    '" << c.ch << "' @" << c.pos << "\n";
                else
                    node(c.node, ind + 4);
            }
        }
    };
    if (d.root >= 0) node(d.root, 0);
    return os.str();
}

std::string dag_to_json(const ParseDag& d) {
    nlohmann::json j;
    j["input"] = d.input;
    j["root"] = d.root;
    j["nodes"] = nlohmann::json::array();
    for (const DagNode& n : d.nodes) {
        nlohmann::json jn;
        jn["id"] = n.id;
        jn["nt"] = n.nt;
        jn["rule"] = n.rule;
        jn["span"] = {n.i, n.j};
        jn["groups"] = nlohmann::json::array();
        for (const auto& g : n.groups) {
            nlohmann::json jg = nlohmann::json::array();
            for (const DagChild& c : g) {
                if (c.leaf)
                    jg.push_back({{"leaf", std::string(1, c.ch)}, {"pos", c.pos}});
                else
                    jg.push_back({{"node", c.node}});
            }
            jn["groups"].push_back(jg);
        }
        j["nodes"].push_back(jn);
    }
    return j.dump();
}

// ---------------------------------------------------------------- bench

std::vector<BenchRecord> bench(const BinaryGrammar& bg, const std::vector<std::string>& inputs, int repetitions) {
    using clock = std::chrono::steady_clock;
    std::vector<BenchRecord> out;
    for (const std::string& w : inputs) {
        BenchRecord r;
        r.length = w.size();
        double best = 1e300, best_serial = 1e300;
        for (int k = 0; k < std::max(1, repetitions); ++k) {
            auto t0 = clock::now();
            ParseTable t = recognize(bg, w);
            auto t1 = clock::now();
            ParseTable s = recognize_serial(bg, w);
            auto t2 = clock::now();
            r.accepted = t.accepted();
            if (t.accepted() != s.accepted()) throw std::logic_error("serial and parallel recognizers disagree");
            best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
            best_serial = std::min(best_serial, std::chrono::duration<double>(t2 - t1).count());
        }
        r.seconds = best;
        r.seconds_serial = best_serial;
        out.push_back(r);
    }
    return out;
}

double loglog_slope(const std::vector<BenchRecord>& recs, bool serial) {
    if (recs.size() < 2) return std::nan("");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(recs.size());
    for (const BenchRecord& r : recs) {
        double x = std::log(static_cast<double>(r.length));
        double y = std::log(serial ? r.seconds_serial : r.seconds);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace boolgram
