#include "boolgram/oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace boolgram {

std::uint64_t default_budget() {
    if (const char* e = std::getenv("BOOLGRAM_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(e, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return 2'000'000;
}

namespace {

// Kleene values: 0 false, 1 unknown, 2 true; and = min, or = max.
using V = std::uint8_t;

struct CSym {
    int nt;   // -1 for a terminal
    char ch;
};
struct CConj {
    bool neg;
    std::vector<CSym> body;
    std::size_t terminals = 0;
};
using CRule = std::vector<CConj>;

struct Compiled {
    int N = 0;
    std::vector<std::string> names;
    std::vector<std::vector<CRule>> rules_of;
    // by_first[a * 256 + c]: rules of a not ruled out when the string starts with c
    std::vector<std::vector<int>> by_first;
    bool has_neg = false;
};

Compiled compile(const Grammar& g) {
    Compiled c;
    c.N = static_cast<int>(g.nonterminals.size());
    c.names = g.nonterminals;
    c.rules_of.resize(c.N);
    std::unordered_map<std::string, int> id;
    for (int i = 0; i < c.N; ++i) id[g.nonterminals[i]] = i;
    for (const Rule& r : g.rules) {
        auto h = id.find(r.head);
        if (h == id.end()) throw GrammarError("rule head " + r.head + " is not declared");
        CRule cr;
        for (const Conjunct& cj : r.conjuncts) {
            CConj cc{cj.negative, {}};
            c.has_neg = c.has_neg || cj.negative;
            for (const Symbol& s : cj.body) {
                if (s.is_terminal()) {
                    cc.body.push_back({-1, s.ch});
                    ++cc.terminals;
                } else {
                    auto it = id.find(s.name);
                    if (it == id.end()) throw GrammarError("unresolved nonterminal " + s.name);
                    cc.body.push_back({it->second, 0});
                }
            }
            cr.push_back(std::move(cc));
        }
        c.rules_of[h->second].push_back(std::move(cr));
    }
    c.by_first.resize(std::size_t(c.N) * 256);
    for (int a = 0; a < c.N; ++a)
        for (int k = 0; k < static_cast<int>(c.rules_of[a].size()); ++k) {
            int only = -1;  // the single first character allowed, or -1
            bool dead = false;
            for (const CConj& cj : c.rules_of[a][k]) {
                if (cj.neg || cj.body.empty() || cj.body[0].nt >= 0) continue;
                int ch = static_cast<unsigned char>(cj.body[0].ch);
                if (only >= 0 && only != ch) dead = true;
                only = ch;
            }
            if (dead) continue;
            for (int ch = 0; ch < 256; ++ch)
                if (only < 0 || only == ch) c.by_first[std::size_t(a) * 256 + ch].push_back(k);
        }
    return c;
}

enum class GroupStatus { Ok, Invalid, Undetermined };

struct GroupResult {
    GroupStatus status = GroupStatus::Ok;
    std::size_t unknowns = 0;
    std::size_t solutions = 0;
};

// Evaluates all facts (A, s) for one string s of length L whose proper
// substrings are already final.  Sub(p, q) yields the fact row of s[p, q).
template <class Sub>
class GroupEval {
public:
    GroupEval(const Compiled& c, const Sub& sub) : c_(c), sub_(sub) {}

    GroupResult run(const char* s, int L, V* row, int cap) {
        s_ = s;
        L_ = L;
        row_ = row;
        const int N = c_.N;
        std::fill(row, row + N, V(1));
        bool changed = true;
        while (changed) {
            changed = false;
            for (int a = 0; a < N; ++a) {
                if (row[a] != 1) continue;
                V v = eval(a);
                if (v != 1) {
                    row[a] = v;
                    changed = true;
                }
            }
        }
        unknown_.clear();
        for (int a = 0; a < N; ++a)
            if (row[a] == 1) unknown_.push_back(a);
        GroupResult res;
        res.unknowns = unknown_.size();
        if (unknown_.empty()) return res;
        if (!c_.has_neg) {
            // negation-free: the least solution, as in derivation semantics
            for (int a : unknown_) row[a] = 0;
            return res;
        }
        if (static_cast<int>(unknown_.size()) > cap) {
            res.status = GroupStatus::Undetermined;
            return res;
        }
        const std::size_t U = unknown_.size();
        std::uint64_t found = 0;
        for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << U); ++mask) {
            for (std::size_t k = 0; k < U; ++k) row[unknown_[k]] = ((mask >> k) & 1) ? 2 : 0;
            bool ok = true;
            for (std::size_t k = 0; k < U && ok; ++k) ok = eval(unknown_[k]) == row[unknown_[k]];
            if (ok) {
                if (res.solutions == 0) found = mask;
                if (++res.solutions >= 2) break;
            }
        }
        if (res.solutions == 1) {
            for (std::size_t k = 0; k < U; ++k) row[unknown_[k]] = ((found >> k) & 1) ? 2 : 0;
        } else {
            res.status = GroupStatus::Invalid;
        }
        return res;
    }

    const std::vector<int>& unknowns() const { return unknown_; }

private:
    const V* at(int p, int q) const {
        if (p == 0 && q == L_) return row_;
        // the equations restricted to s only ever look at substrings of s
        if (p < 0 || q > L_ || p > q) throw std::logic_error("conjunct evaluation left its span");
        return sub_(p, q);
    }

    V conj(const CConj& c) {
        const int L = L_;
        const std::size_t m = c.body.size();
        if (m == 0) return L == 0 ? 2 : 0;
        // cheap rejections on terminal anchors
        if (static_cast<int>(c.terminals) > L) return 0;
        const CSym& f = c.body.front();
        if (f.nt < 0 && s_[0] != f.ch) return 0;
        const CSym& b = c.body.back();
        if (b.nt < 0 && s_[L - 1] != b.ch) return 0;
        D_.assign(L + 1, 0);
        D_[0] = 2;
        for (std::size_t t = 0; t < m; ++t) {
            const bool last = t + 1 == m;
            E_.assign(L + 1, 0);
            bool any = false;
            const CSym& x = c.body[t];
            for (int q = 0; q <= L; ++q) {
                V d = D_[q];
                if (!d) continue;
                if (x.nt < 0) {
                    if (q < L && s_[q] == x.ch && (!last || q + 1 == L)) {
                        E_[q + 1] = std::max(E_[q + 1], d);
                        any = true;
                    }
                } else if (last) {
                    V v = std::min(d, at(q, L)[x.nt]);
                    if (v > E_[L]) E_[L] = v;
                    any = any || v;
                } else {
                    for (int p = q; p <= L; ++p) {
                        V v = std::min(d, at(q, p)[x.nt]);
                        if (v > E_[p]) {
                            E_[p] = v;
                            any = true;
                        }
                    }
                }
            }
            D_.swap(E_);
            if (!any) return 0;
        }
        return D_[L];
    }

    V eval(int a) {
        if (L_ == 0) return eval_rules(a, c_.rules_of[a]);
        V best = 0;
        const auto& rules = c_.rules_of[a];
        for (int k : c_.by_first[std::size_t(a) * 256 + static_cast<unsigned char>(s_[0])]) {
            best = std::max(best, eval_rule(rules[k]));
            if (best == 2) break;
        }
        return best;
    }

    V eval_rule(const CRule& r) {
        V v = 2;
        for (const CConj& cj : r) {
            V x = conj(cj);
            if (cj.neg) x = 2 - x;
            v = std::min(v, x);
            if (!v) break;
        }
        return v;
    }

    V eval_rules(int, const std::vector<CRule>& rules) {
        V best = 0;
        for (const CRule& r : rules) {
            V v = 2;
            for (const CConj& cj : r) {
                V x = conj(cj);
                if (cj.neg) x = 2 - x;
                v = std::min(v, x);
                if (!v) break;
            }
            best = std::max(best, v);
            if (best == 2) break;
        }
        return best;
    }

    const Compiled& c_;
    const Sub& sub_;
    const char* s_ = nullptr;
    int L_ = 0;
    V* row_ = nullptr;
    std::vector<V> D_, E_;
    std::vector<int> unknown_;
};

std::uint64_t ipow(std::uint64_t b, int e, std::uint64_t cap) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (b && r > cap / b) return cap + 1;
        r *= b;
    }
    return r;
}

void check_alphabet(const Grammar& g, const std::string& alpha) {
    for (char c : alpha)
        if (!g.in_alphabet(c)) throw GrammarError(std::string("character '") + c + "' is not in the grammar alphabet");
}

std::string describe_unknowns(const Compiled& c, const std::vector<int>& u, const std::string& w, std::size_t sols) {
    std::ostringstream os;
    os << (sols == 0 ? "no consistent assignment" : "several consistent assignments") << " for the facts {";
    for (std::size_t k = 0; k < u.size(); ++k) os << (k ? ", " : "") << "(" << c.names[u[k]] << ", \"" << w << "\")";
    os << "}";
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------- layered

std::uint64_t LayeredFacts::index(const std::string& w) const {
    std::uint64_t idx = 0;
    for (char c : w) {
        std::size_t d = alphabet.find(c);
        if (d == std::string::npos) throw std::out_of_range("character outside the enumeration alphabet");
        idx = idx * alphabet.size() + d;
    }
    return idx;
}

std::string LayeredFacts::string_at(int len, std::uint64_t idx) const {
    std::string s(len, ' ');
    for (int t = len - 1; t >= 0; --t) {
        s[t] = alphabet[idx % alphabet.size()];
        idx /= alphabet.size();
    }
    return s;
}

Truth LayeredFacts::get(const std::string& nt, const std::string& w) const {
    auto it = std::find(nonterminals.begin(), nonterminals.end(), nt);
    if (it == nonterminals.end()) throw std::out_of_range("unknown nonterminal " + nt);
    if (static_cast<int>(w.size()) >= computed_layers()) return Truth::Unknown;
    std::size_t N = nonterminals.size();
    return layers[w.size()][index(w) * N + (it - nonterminals.begin())];
}

LayeredFacts evaluate_layered(const Grammar& g, const std::string& alphabet, int max_len, const OracleOptions& opt) {
    LayeredFacts f;
    f.alphabet = normalize_alphabet(alphabet);
    f.max_len = max_len;
    f.nonterminals = g.nonterminals;
    check_alphabet(g, f.alphabet);
    const std::uint64_t k = f.alphabet.size();
    if (ipow(k, max_len, opt.budget) > opt.budget)
        throw BudgetExceeded("enumeration of " + std::to_string(k) + "^" + std::to_string(max_len) +
                             " strings exceeds the budget of " + std::to_string(opt.budget));
    const Compiled c = compile(g);
    const std::size_t N = c.N;
    std::vector<std::uint64_t> pw(max_len + 1, 1);
    for (int i = 1; i <= max_len; ++i) pw[i] = pw[i - 1] * k;

    for (int L = 0; L <= max_len; ++L) {
        const std::uint64_t count = pw[L];
        f.layers.emplace_back(count * N, Truth::Unknown);
        auto& layers = f.layers;
        std::int64_t bad = -1;
        GroupResult bad_res;
        std::vector<int> bad_unknowns;
#pragma omp parallel if (opt.parallel && count > 64)
        {
            std::vector<std::uint64_t> H(L + 1);
            std::string s(L, ' ');
            auto sub = [&](int p, int q) {
                const std::uint64_t id = H[q] - H[p] * pw[q - p];
                return reinterpret_cast<const V*>(layers[q - p].data()) + id * N;
            };
            GroupEval<decltype(sub)> ev(c, sub);
#pragma omp for schedule(dynamic, 64)
            for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(count); ++idx) {
                std::uint64_t x = idx;
                for (int t = L - 1; t >= 0; --t) {
                    s[t] = f.alphabet[x % k];
                    x /= k;
                }
                H[0] = 0;
                for (int t = 0; t < L; ++t) H[t + 1] = H[t] * k + f.alphabet.find(s[t]);
                V* row = reinterpret_cast<V*>(layers[L].data()) + idx * N;
                GroupResult r = ev.run(s.data(), L, row, opt.residual_cap);
                if (r.status != GroupStatus::Ok) {
#pragma omp critical
                    if (bad < 0 || idx < bad) {
                        bad = idx;
                        bad_res = r;
                        bad_unknowns = ev.unknowns();
                    }
                }
            }
        }
        if (bad >= 0) {
            std::string w = f.string_at(L, bad);
            f.failed_layer = L;
            if (bad_res.status == GroupStatus::Invalid) {
                f.status = LayeredFacts::Status::Invalid;
                f.detail = "layer " + std::to_string(L) + ": " + describe_unknowns(c, bad_unknowns, w, bad_res.solutions);
            } else {
                f.status = LayeredFacts::Status::Undetermined;
                f.detail = "layer " + std::to_string(L) + ": " + std::to_string(bad_res.unknowns) +
                           " residual unknowns for \"" + w + "\" exceed the cap of " + std::to_string(opt.residual_cap);
            }
            f.layers.pop_back();
            break;
        }
    }
    return f;
}

std::vector<std::string> enumerate(const Grammar& g, const std::string& nt, const std::string& alphabet, int max_len,
                                   const OracleOptions& opt) {
    int a = g.index_of(nt);
    if (a < 0) throw GrammarError("unknown nonterminal " + nt);
    LayeredFacts f = evaluate_layered(g, alphabet, max_len, opt);
    if (f.status == LayeredFacts::Status::Invalid) throw InvalidGrammar("invalid grammar: " + f.detail, f.failed_layer, "");
    if (f.status == LayeredFacts::Status::Undetermined) throw Undetermined("undetermined: " + f.detail, f.failed_layer);
    std::vector<std::string> out;
    const std::size_t N = f.nonterminals.size();
    for (int L = 0; L <= max_len; ++L)
        for (std::uint64_t idx = 0; idx * N < f.layers[L].size(); ++idx)
            if (f.layers[L][idx * N + a] == Truth::True) out.push_back(f.string_at(L, idx));
    return out;
}

// ---------------------------------------------------------------- member

bool member_nt(const Grammar& g, const std::string& nt, const std::string& w, const OracleOptions& opt) {
    int target = g.index_of(nt);
    if (target < 0) throw GrammarError("unknown nonterminal " + nt);
    for (char ch : w)
        if (!g.in_alphabet(ch)) throw GrammarError(std::string("character '") + ch + "' is not in the grammar alphabet");
    const Compiled c = compile(g);
    const std::size_t N = c.N;
    const int n = static_cast<int>(w.size());
    const std::size_t W = n + 1;
    std::vector<V> facts(W * W * N, 1);
    auto slot = [&](int i, int len) { return facts.data() + (std::size_t(i) * W + len) * N; };

    for (int L = 0; L <= n; ++L) {
        const int spans = n - L + 1;
        int bad = -1;
        GroupResult bad_res;
        std::vector<int> bad_unknowns;
        std::string logic_error;
#pragma omp parallel if (opt.parallel && spans > 8)
        {
            int base = 0;
            auto sub = [&](int p, int q) -> const V* { return slot(base + p, q - p); };
            GroupEval<decltype(sub)> ev(c, sub);
#pragma omp for schedule(dynamic, 1)
            for (int i = 0; i < spans; ++i) {
                base = i;
                GroupResult r;
                try {
                    r = ev.run(w.data() + i, L, slot(i, L), opt.residual_cap);
                } catch (const std::logic_error& e) {
#pragma omp critical
                    logic_error = e.what();
                    continue;
                }
                if (r.status != GroupStatus::Ok) {
#pragma omp critical
                    if (bad < 0 || i < bad) {
                        bad = i;
                        bad_res = r;
                        bad_unknowns = ev.unknowns();
                    }
                }
            }
        }
        if (!logic_error.empty()) throw std::logic_error(logic_error);
        if (bad >= 0) {
            std::string u = w.substr(bad, L);
            if (bad_res.status == GroupStatus::Invalid)
                throw InvalidGrammar("invalid grammar at length " + std::to_string(L) + ": " +
                                         describe_unknowns(c, bad_unknowns, u, bad_res.solutions),
                                     L, u);
            throw Undetermined("undetermined at length " + std::to_string(L) + ": " +
                                   std::to_string(bad_res.unknowns) + " residual unknowns for \"" + u + "\"",
                               L);
        }
    }
    return slot(0, n)[target] == 2;
}

bool member(const Grammar& g, const std::string& w, const OracleOptions& opt) {
    return member_nt(g, g.start, w, opt);
}

}  // namespace boolgram
