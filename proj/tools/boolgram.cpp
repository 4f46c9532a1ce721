// Command-line front end.  Exit status: 0 ok, 1 expectation mismatch,
// 2 load error, 3 invalid grammar, 4 budget exceeded.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "boolgram/cyk.hpp"
#include "boolgram/dsl.hpp"
#include "boolgram/model.hpp"
#include "boolgram/normalizer.hpp"
#include "boolgram/oracle.hpp"

using namespace boolgram;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSchema = "boolgram-report/1";

enum Exit { kOk = 0, kMismatch = 1, kLoad = 2, kInvalid = 3, kBudget = 4 };

struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream o;
    o << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return o.str();
}

struct Options {
    std::string format = "text";
    bool raw = false;
    int jobs = 1;
};

struct Loaded {
    std::string path;
    std::string hash;
    Grammar g;
};

Loaded load_grammar(const std::string& path) {
    Loaded l;
    l.path = path;
    std::string text = slurp(path);
    l.hash = fnv1a(text);
    try {
        l.g = dsl_parse(text, path);
    } catch (const GrammarError& e) {
        throw LoadError(e.what());
    }
    return l;
}

struct Input {
    std::string label;  // file path or "<string k>"
    std::string text;
    std::optional<bool> expect;
};

std::string trim_program(std::string s) {
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

// Files next to an expect.toml carry their own expectation: program.txt as
// recorded, fixed.txt always accept.
std::optional<bool> expectation_for(const std::string& path) {
    fs::path p(path);
    fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
    if (!fs::exists(dir / "expect.toml")) return std::nullopt;
    if (p.filename() == "fixed.txt") return true;
    if (p.filename() != "program.txt") return std::nullopt;
    try {
        return load_case(dir.string()).accept;
    } catch (const std::exception& e) {
        throw LoadError(e.what());
    }
}

std::vector<Input> gather(const std::vector<std::string>& files, const std::vector<std::string>& strings,
                          const std::string& expect, const Options& o) {
    std::optional<bool> forced;
    if (expect == "accept") forced = true;
    if (expect == "reject") forced = false;
    std::vector<Input> in;
    for (const std::string& f : files) {
        Input i;
        i.label = f;
        std::string t = slurp(f);
        i.text = o.raw ? t : trim_program(normalize_whitespace(t));
        i.expect = forced ? forced : expectation_for(f);
        in.push_back(std::move(i));
    }
    for (std::size_t k = 0; k < strings.size(); ++k) {
        Input i;
        i.label = "<string " + std::to_string(k + 1) + ">";
        i.text = strings[k];
        i.expect = forced;
        in.push_back(std::move(i));
    }
    return in;
}

json header(const std::string& command, const std::vector<std::string>& argv, const Loaded* l) {
    json r;
    r["schema"] = kSchema;
    r["command"] = command;
    r["argv"] = argv;
    if (l) r["grammar"] = {{"file", l->path}, {"hash", l->hash}, {"name", l->g.name}};
    return r;
}

void emit(const json& report, const Options& o, const std::string& text) {
    if (o.format == "json")
        std::cout << report.dump() << "\n";
    else
        std::cout << text;
}

std::string verdict(bool a) { return a ? "accept" : "reject"; }

// ---- commands --------------------------------------------------------------

int cmd_check(const Loaded& l, const std::vector<Input>& inputs, bool oracle, const Options& o, json& rep,
              std::string& text) {
    BinaryGrammar bg = binarize(l.g);
    const int n = static_cast<int>(inputs.size());
    std::vector<json> results(n);
    std::vector<int> codes(n, kOk);
    std::vector<std::string> failures(n);
#pragma omp parallel for num_threads(o.jobs) schedule(dynamic)
    for (int k = 0; k < n; ++k) {
        const Input& in = inputs[k];
        json r;
        r["input"] = in.label;
        try {
            bool a = recognize(bg, in.text).accepted();
            r["verdict"] = verdict(a);
            if (in.expect) {
                r["expected"] = verdict(*in.expect);
                if (*in.expect != a) codes[k] = kMismatch;
            }
            if (oracle) {
                bool m = member(l.g, in.text);
                r["oracle"] = verdict(m);
                if (m != a) {
                    codes[k] = kMismatch;
                    r["error"] = "oracle disagrees with the recognizer";
                }
            }
        } catch (const BudgetExceeded& e) {
            codes[k] = kBudget;
            r["error"] = e.what();
        } catch (const GrammarError& e) {
            codes[k] = kInvalid;
            r["error"] = e.what();
        }
        results[k] = std::move(r);
    }
    int code = kOk;
    for (int c : codes) code = std::max(code, c);
    rep["results"] = results;
    std::ostringstream t;
    for (const json& r : results) {
        t << r["input"].get<std::string>() << ": " << (r.contains("verdict") ? r["verdict"].get<std::string>() : "error");
        if (r.contains("expected")) t << (r["expected"] == r["verdict"] ? " (as expected)" : " (expected " + r["expected"].get<std::string>() + ")");
        if (r.contains("oracle")) t << " oracle " << r["oracle"].get<std::string>();
        if (r.contains("error")) t << " error: " << r["error"].get<std::string>();
        t << "\n";
    }
    text = t.str();
    return code;
}

int cmd_parse(const Loaded& l, const std::vector<Input>& inputs, const Options& o, json& rep, std::string& text) {
    BinaryGrammar bg = binarize(l.g);
    int code = kOk;
    json results = json::array();
    std::ostringstream t;
    for (const Input& in : inputs) {
        ParseTable table = recognize(bg, in.text);
        json r;
        r["input"] = in.label;
        r["verdict"] = verdict(table.accepted());
        t << in.label << ": " << verdict(table.accepted()) << "\n";
        if (table.accepted()) {
            ParseDag d = extract_dag(table, bg);
            r["dag"] = json::parse(dag_to_json(d));
            t << dag_to_text(d);
        } else {
            code = kMismatch;
        }
        results.push_back(std::move(r));
    }
    (void)o;
    rep["results"] = results;
    text = t.str();
    return code;
}

int cmd_enumerate(const Loaded& l, const std::string& nt, std::string alphabet, int maxlen, json& rep,
                  std::string& text) {
    if (alphabet.empty()) alphabet = l.g.alphabet;
    std::string target = nt.empty() ? l.g.start : nt;
    if (!l.g.has_nonterminal(target)) throw LoadError("no nonterminal " + target);
    std::vector<std::string> words = enumerate(l.g, target, alphabet, maxlen);
    rep["nonterminal"] = target;
    rep["alphabet"] = alphabet;
    rep["maxlen"] = maxlen;
    rep["strings"] = words;
    std::ostringstream t;
    for (const std::string& w : words) t << (w.empty() ? "eps" : w) << "\n";
    text = t.str();
    return kOk;
}

int cmd_ambiguity(const Loaded& l, const std::vector<Input>& inputs, json& rep, std::string& text) {
    std::vector<std::string> ws;
    for (const Input& in : inputs) ws.push_back(in.text);
    std::vector<AmbiguityFinding> fs = check_ambiguity(l.g, ws);
    json arr = json::array();
    std::ostringstream t;
    for (const AmbiguityFinding& f : fs) {
        json j{{"kind", to_string(f.kind)}, {"nonterminal", f.nonterminal}, {"site", f.site}, {"witness", f.witness}};
        if (f.kind == AmbiguityFinding::Kind::RuleChoice) {
            j["rules"] = {f.rule_a, f.rule_b};
            t << to_string(f.kind) << " " << f.nonterminal << " rules " << f.rule_a << "," << f.rule_b;
        } else {
            j["partitions"] = {f.partition_a, f.partition_b};
            t << to_string(f.kind) << " " << f.nonterminal << " [" << f.site << "]";
        }
        t << " on \"" << f.witness << "\"\n";
        arr.push_back(std::move(j));
    }
    rep["findings"] = arr;
    t << fs.size() << " finding(s)\n";
    text = t.str();
    return kOk;
}

// Reference sizes come from the table in stats-delta.md next to the grammar.
std::optional<std::pair<long, long>> reference_sizes(const std::string& grammar_path, const std::string& name) {
    fs::path p = fs::path(grammar_path).parent_path() / "stats-delta.md";
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] != '|') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line.substr(1));
        std::string cell;
        while (std::getline(ss, cell, '|')) {
            cell.erase(0, cell.find_first_not_of(' '));
            cell.erase(cell.find_last_not_of(' ') + 1);
            cells.push_back(cell);
        }
        if (cells.size() >= 5 && cells[0] == name) {
            try {
                return std::make_pair(std::stol(cells[3]), std::stol(cells[4]));
            } catch (const std::exception&) {
                return std::nullopt;
            }
        }
    }
    return std::nullopt;
}

int cmd_stats(const Loaded& l, json& rep, std::string& text) {
    GrammarStats s = stats(l.g);
    std::string name = l.g.name.empty() ? fs::path(l.path).stem().string() : l.g.name;
    rep["class"] = to_string(classify(l.g));
    rep["nonterminals"] = s.nonterminals;
    rep["rules"] = s.rules;
    rep["positive_conjuncts"] = s.positive_conjuncts;
    rep["negative_conjuncts"] = s.negative_conjuncts;
    rep["terminals"] = s.terminals;
    std::ostringstream t;
    t << name << ": " << to_string(classify(l.g)) << "\n"
      << "nonterminals " << s.nonterminals << "\nrules " << s.rules << "\npositive conjuncts "
      << s.positive_conjuncts << "\nnegative conjuncts " << s.negative_conjuncts << "\nterminals " << s.terminals
      << "\n";
    if (auto ref = reference_sizes(l.path, name)) {
        long dn = static_cast<long>(s.nonterminals) - ref->first, dr = static_cast<long>(s.rules) - ref->second;
        rep["reference"] = {{"nonterminals", ref->first}, {"rules", ref->second}};
        rep["delta"] = {{"nonterminals", dn}, {"rules", dr}};
        t << "reference " << ref->first << " nonterminals, " << ref->second << " rules; delta " << std::showpos << dn
          << ", " << dr << std::noshowpos << " (see stats-delta.md)\n";
    }
    text = t.str();
    return kOk;
}

int cmd_normalize(const Loaded& l, json& rep, std::string& text) {
    BinaryGrammar bg = binarize(l.g);
    GrammarStats s = stats(bg.grammar);
    std::string printed = dsl_print(bg.grammar);
    rep["nonterminals"] = s.nonterminals;
    rep["rules"] = s.rules;
    rep["pairs"] = bg.pairs.size();
    rep["grammar"]["normalized"] = printed;
    text = printed;
    return kOk;
}

std::vector<int> parse_sizes(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        int v = std::stoi(tok);
        if (v <= 0) throw LoadError("sizes must be positive");
        out.push_back(v);
    }
    if (out.empty()) throw LoadError("no sizes given");
    return out;
}

int cmd_bench(const Loaded& l, const std::string& family, const std::vector<int>& sizes, int reps, json& rep,
              std::string& text) {
    if (family != "return-sum") throw LoadError("unknown benchmark family " + family);
    BinaryGrammar bg = binarize(l.g);
    std::vector<std::string> inputs;
    for (int n : sizes) inputs.push_back(return_sum_program(n));
    std::vector<BenchRecord> recs = bench(bg, inputs, reps);
    json arr = json::array();
    std::ostringstream t;
    t << "summands length parallel_s serial_s verdict\n";
    for (std::size_t k = 0; k < recs.size(); ++k) {
        arr.push_back({{"summands", sizes[k]},
                       {"length", recs[k].length},
                       {"seconds", recs[k].seconds},
                       {"seconds_serial", recs[k].seconds_serial},
                       {"verdict", verdict(recs[k].accepted)}});
        t << sizes[k] << " " << recs[k].length << " " << recs[k].seconds << " " << recs[k].seconds_serial << " "
          << verdict(recs[k].accepted) << "\n";
    }
    rep["records"] = arr;
    if (recs.size() >= 2) {
        rep["slope"] = loglog_slope(recs);
        rep["slope_serial"] = loglog_slope(recs, true);
        t << "log-log slope " << loglog_slope(recs) << " (serial " << loglog_slope(recs, true) << ")\n";
    }
    text = t.str();
    int code = kOk;
    for (const BenchRecord& r : recs)
        if (!r.accepted) code = kMismatch;
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    CLI::App app{"Boolean and conjunctive grammar toolkit"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "text"}));
    app.add_flag("--raw", o.raw, "keep newlines and tabs in input files");
    app.add_option("--jobs", o.jobs, "inputs processed in parallel")->check(CLI::PositiveNumber);

    std::string grammar;
    std::vector<std::string> files, strings;
    std::string expect;
    bool oracle = false;
    auto inputs_opts = [&](CLI::App* c) {
        c->add_option("grammar", grammar, "grammar file")->required();
        c->add_option("inputs", files, "input files");
        c->add_option("--string", strings, "literal input (repeatable)");
        c->add_option("--expect", expect, "expected verdict for every input")->check(CLI::IsMember({"accept", "reject"}));
        c->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "text"}));
        c->add_flag("--raw", o.raw, "keep newlines and tabs in input files");
        c->add_option("--jobs", o.jobs, "inputs processed in parallel")->check(CLI::PositiveNumber);
    };
    auto plain_opts = [&](CLI::App* c) {
        c->add_option("grammar", grammar, "grammar file")->required();
        c->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "text"}));
    };

    CLI::App* check = app.add_subcommand("check", "recognize inputs");
    inputs_opts(check);
    check->add_flag("--oracle", oracle, "cross-check every verdict with the reference evaluator");
    CLI::App* parse = app.add_subcommand("parse", "print the parse of each input");
    inputs_opts(parse);
    CLI::App* ambiguity = app.add_subcommand("ambiguity", "look for ambiguity on the inputs and their substrings");
    inputs_opts(ambiguity);

    std::string nt, alphabet;
    int maxlen = 4;
    CLI::App* enumerate_cmd = app.add_subcommand("enumerate", "list the strings of a nonterminal up to a length");
    plain_opts(enumerate_cmd);
    enumerate_cmd->add_option("--nt", nt, "nonterminal (default: start symbol)");
    enumerate_cmd->add_option("--alphabet", alphabet, "characters (default: grammar alphabet)");
    enumerate_cmd->add_option("--maxlen", maxlen, "maximum length")->check(CLI::NonNegativeNumber);

    CLI::App* stats_cmd = app.add_subcommand("stats", "grammar size and class");
    plain_opts(stats_cmd);
    CLI::App* normalize_cmd = app.add_subcommand("normalize", "print the binary normal form");
    plain_opts(normalize_cmd);

    std::string family = "return-sum", sizes = "8,16,32,64";
    int reps = 3;
    CLI::App* bench_cmd = app.add_subcommand("bench", "time the recognizer on a program family");
    plain_opts(bench_cmd);
    bench_cmd->add_option("--family", family, "program family");
    bench_cmd->add_option("--sizes", sizes, "comma-separated family sizes");
    bench_cmd->add_option("--repeat", reps, "repetitions per size (best is kept)")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kLoad;
    }

    std::string command = app.get_subcommands().front()->get_name();
    json rep = header(command, args, nullptr);
    std::string text;
    int code = kOk;
    try {
        Loaded l = load_grammar(grammar);
        rep = header(command, args, &l);
        if (command == "check" || command == "parse" || command == "ambiguity") {
            std::vector<Input> in = gather(files, strings, expect, o);
            if (in.empty()) throw LoadError("no inputs given");
            if (command == "check")
                code = cmd_check(l, in, oracle, o, rep, text);
            else if (command == "parse")
                code = cmd_parse(l, in, o, rep, text);
            else
                code = cmd_ambiguity(l, in, rep, text);
        } else if (command == "enumerate") {
            code = cmd_enumerate(l, nt, alphabet, maxlen, rep, text);
        } else if (command == "stats") {
            code = cmd_stats(l, rep, text);
        } else if (command == "normalize") {
            code = cmd_normalize(l, rep, text);
        } else {
            code = cmd_bench(l, family, parse_sizes(sizes), reps, rep, text);
        }
    } catch (const LoadError& e) {
        code = kLoad;
        rep["error"] = e.what();
    } catch (const BudgetExceeded& e) {
        code = kBudget;
        rep["error"] = e.what();
    } catch (const GrammarError& e) {
        code = kInvalid;
        rep["error"] = e.what();
    } catch (const std::invalid_argument& e) {
        code = kLoad;
        rep["error"] = e.what();
    }
    rep["exit"] = code;
    if (rep.contains("error")) text += "error: " + rep["error"].get<std::string>() + "\n";
    emit(rep, o, text);
    return code;
}
