#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"

namespace {

struct Run {
    int status = -1;
    std::string out;
};

// Runs the CLI through the shell; stderr is discarded unless `merge` is set.
Run cli(const std::string& args, const std::string& stdin_text = "", bool merge = false) {
    namespace fs = std::filesystem;
    fs::path in = fs::temp_directory_path() / ("lpfuse_cli_in_" + std::to_string(::getpid()));
    {
        std::ofstream f(in, std::ios::binary);
        f << stdin_text;
    }
    std::string cmd = std::string(LPFUSE_CLI_PATH) + " " + args + " < " + in.string() + (merge ? " 2>&1" : " 2>/dev/null");
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    fs::remove(in);
    return r;
}

std::string grammar(const char* name) { return oracle::grammar_path(name); }

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("check prints the type") {
    Run r = cli("check " + grammar("sexp"));
    CHECK(r.status == 0);
    CHECK(r.out.find("null=false first={LPAR,ATOM} flast={}") != std::string::npos);
}

TEST_CASE("normalize variants") {
    Run r = cli("normalize " + grammar("sexp"));
    CHECK(r.status == 0);
    CHECK(lines(r.out) == 6);
    CHECK(r.out.rfind("sexp -> ", 0) == 0);
    CHECK(lines(cli("normalize --no-trim " + grammar("sexp")).out) == 9);
    CHECK(lines(cli("normalize --raw " + grammar("sexp")).out) == 23);
    Run st = cli("normalize --stats " + grammar("sexp"), "", true);
    CHECK(st.out.find("nonterminals 3, productions 6") != std::string::npos);
}

TEST_CASE("fuse and compile") {
    Run f = cli("fuse " + grammar("sexp"));
    CHECK(f.status == 0);
    CHECK(lines(f.out) == 9);
    Run c = cli("compile " + grammar("sexp"), "", true);
    CHECK(c.status == 0);
    CHECK(c.out.find("11 states") != std::string::npos);
    Run e = cli("compile --emit-source --lang cpp " + grammar("sexp"));
    CHECK(e.out.find("namespace lpfuse_generated") != std::string::npos);
    Run bad = cli("compile --emit-source --lang cobol " + grammar("sexp"));
    CHECK(bad.status == 1);
}

TEST_CASE("run on every backend") {
    for (const char* b : {"interp", "auto", "unfused"}) {
        INFO(b);
        Run ok = cli(std::string("run --backend ") + b + " " + grammar("sexp") + " -", "(ab c)");
        CHECK(ok.status == 0);
        CHECK(ok.out.find("accepted=true consumed=6") != std::string::npos);
        Run fail = cli(std::string("run --backend ") + b + " " + grammar("sexp") + " -", "(9");
        CHECK(fail.status == 2);
        CHECK(fail.out.find("offset=1") != std::string::npos);
        Run trail = cli(std::string("run --backend ") + b + " " + grammar("sexp") + " -", "a b");
        CHECK(trail.status == 2);
    }
}

TEST_CASE("run prints events") {
    Run r = cli("run --events " + grammar("sexp") + " -", "(a b)");
    CHECK(r.status == 0);
    CHECK(r.out.find("event sexp 0 0 1\n") == 0);
    CHECK(lines(r.out) == 6);
}

TEST_CASE("enumerate lists words of both sides equally") {
    Run a = cli("enumerate --max-len 4 --side cfe " + grammar("sexp"));
    Run b = cli("enumerate --max-len 4 --side dgnf " + grammar("sexp"));
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("LPAR ATOM RPAR\n") != std::string::npos);
}

TEST_CASE("errors map to exit codes") {
    CHECK(cli("check /nonexistent.lpf").status == 1);
    CHECK(cli("frobnicate").status == 1);
    namespace fs = std::filesystem;
    fs::path g = fs::temp_directory_path() / ("lpfuse_bad_" + std::to_string(::getpid()) + ".lpf");
    {
        std::ofstream f(g);
        f << "token A = \"a\" ;\ns ::= A | A ;\n";
    }
    Run t = cli("check " + g.string(), "", true);
    CHECK(t.status == 1);
    CHECK(t.out.find("ApartnessViolation") != std::string::npos);
    {
        std::ofstream f(g);
        f << "token A = \"a\" ;\ns ::= A B ;\n";
    }
    Run s = cli("check " + g.string(), "", true);
    CHECK(s.status == 1);
    CHECK(s.out.find("2:9") != std::string::npos);
    fs::remove(g);
}

TEST_CASE("bench writes corpora and reports every pipeline") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / ("lpfuse_bench_" + std::to_string(::getpid()));
    Run r = cli("bench --generate --corpus-dir " + dir.string() + " --sizes 1 --repeat 1 " + grammar("sexp"));
    CHECK(r.status == 0);
    CHECK(r.out.rfind("pipeline,bytes,seconds,mbps\n", 0) == 0);
    CHECK(lines(r.out) == 4);
    CHECK(fs::file_size(dir / "sexp_1mb.txt") == (1u << 20));
    fs::remove_all(dir);
}
