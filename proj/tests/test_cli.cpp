#include <doctest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "boolgram/dsl.hpp"
#include "boolgram/model.hpp"

using json = nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(BOOLGRAM_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string g(const std::string& name) { return boolgram::grammar_dir() + "/" + name; }
std::string c(const std::string& name) { return boolgram::corpus_dir() + "/" + name; }

json report(const Run& r) {
    REQUIRE_FALSE(r.out.empty());
    return json::parse(r.out);
}

}  // namespace

TEST_CASE("cli: check the sample program and a rejected case") {
    Run r = run("check " + g("model-boolean.bgr") + " " + c("sample/program.txt") + " " + c("floyd-L1/program.txt") +
                " --format json");
    CHECK(r.code == 0);
    json j = report(r);
    CHECK(j["schema"] == "boolgram-report/1");
    CHECK(j["grammar"]["hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
    REQUIRE(j["results"].size() == 2);
    CHECK(j["results"][0]["verdict"] == "accept");
    CHECK(j["results"][0]["expected"] == "accept");
    CHECK(j["results"][1]["verdict"] == "reject");
    CHECK(j["results"][1]["expected"] == "reject");
}

TEST_CASE("cli: oracle cross-check") {
    Run r = run("check " + g("ex1.bgr") + " --string aabaabaab --string aabab --oracle --format json");
    CHECK(r.code == 0);
    json j = report(r);
    CHECK(j["results"][0]["verdict"] == "accept");
    CHECK(j["results"][0]["oracle"] == "accept");
    CHECK(j["results"][1]["verdict"] == "reject");
    CHECK(j["results"][1]["oracle"] == "reject");
}

TEST_CASE("cli: enumerate") {
    Run r = run("enumerate " + g("ex3.bgr") + " --nt S --alphabet abc --maxlen 3");
    CHECK(r.code == 0);
    CHECK(r.out == "c\naca\nbcb\n");
}

TEST_CASE("cli: stats against the reference sizes") {
    json j = report(run("stats " + g("model-boolean.bgr") + " --format json"));
    CHECK(j["class"] == "boolean");
    CHECK(j["reference"]["nonterminals"] == 117);
    CHECK(j["reference"]["rules"] == 361);
    CHECK(j["delta"]["nonterminals"].get<long>() == j["nonterminals"].get<long>() - 117);
    json u = report(run("stats " + g("model-unamb.bgr") + " --format json"));
    CHECK(u["class"] == "conjunctive");
    CHECK(u["reference"]["rules"] == 3828);
}

TEST_CASE("cli: exit statuses") {
    CHECK(run("check " + g("ex1.bgr") + " --string aab --expect reject").code == 1);
    CHECK(run("check /nonexistent.bgr --string a").code == 2);
    CHECK(run("bogus").code == 2);
    std::string bad = "/tmp/boolgram-cli-invalid.bgr";
    std::ofstream(bad) << "start S ; alphabet 'a' ;\nS -> ~ S ;\n";
    CHECK(run("enumerate " + bad + " --maxlen 2").code == 3);
    CHECK(run("enumerate " + g("ex1.bgr") + " --maxlen 12").code == 0);
    CHECK(run("check " + g("ex1.bgr") + " --string aab --expect accept").code == 0);
}

TEST_CASE("cli: budget override") {
    std::string cmd = "enumerate " + g("ex1.bgr") + " --maxlen 8";
    CHECK(run(cmd).code == 0);
    std::string full = "env BOOLGRAM_BUDGET=50 " + std::string(BOOLGRAM_CLI) + " " + cmd + " >/dev/null 2>&1";
    int st = std::system(full.c_str());
    CHECK((WIFEXITED(st) && WEXITSTATUS(st) == 4));
}

TEST_CASE("cli: reports are deterministic and keep input order") {
    std::string inputs;
    for (const char* n : {"sample", "recursion", "floyd-L1", "dup-function", "while-sum"})
        inputs += " " + c(std::string(n) + "/program.txt");
    Run a = run("check " + g("model-unamb.bgr") + inputs + " --format json");
    Run b = run("check " + g("model-unamb.bgr") + inputs + " --format json");
    Run p = run("check " + g("model-unamb.bgr") + inputs + " --format json --jobs 3");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(report(a)["results"] == report(p)["results"]);
}

TEST_CASE("cli: parse prints a parse or fails on rejection") {
    Run r = run("parse " + g("ex3.bgr") + " --string abcab");
    CHECK(r.code == 0);
    CHECK(r.out.find("n0 S [0,5) rule 0") != std::string::npos);
    json j = report(run("parse " + g("ex3.bgr") + " --string abcab --format json"));
    CHECK(j["results"][0]["dag"].contains("root"));
    CHECK(run("parse " + g("ex3.bgr") + " --string abcba").code == 1);
}

TEST_CASE("cli: normalize output is a loadable grammar") {
    Run r = run("normalize " + g("ex4.bgr"));
    CHECK(r.code == 0);
    boolgram::Grammar n = boolgram::dsl_parse(r.out);
    CHECK(n.start == "S");
}

TEST_CASE("cli: ambiguity findings") {
    json j = report(run("ambiguity " + g("model-boolean.bgr") +
                        " --string \"main(x) { if (x) if (x) return 1; else return 2; return 3; }\" --format json"));
    CHECK_FALSE(j["findings"].empty());
    json u = report(run("ambiguity " + g("model-unamb.bgr") + " " + c("dangling-else/program.txt") + " --format json"));
    CHECK(u["findings"].empty());
}

TEST_CASE("cli: bench") {
    Run r = run("bench " + g("model-unamb.bgr") + " --family return-sum --sizes 2,4 --repeat 1 --format json");
    CHECK(r.code == 0);
    json j = report(r);
    REQUIRE(j["records"].size() == 2);
    CHECK(j["records"][1]["verdict"] == "accept");
    CHECK(j.contains("slope"));
    CHECK(run("bench " + g("model-unamb.bgr") + " --family other --sizes 2").code == 2);
}
