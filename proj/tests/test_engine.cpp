#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"

using namespace lpfuse;

namespace {

std::string slurp_command(const std::string& cmd) {
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return out;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    pclose(p);
    return out;
}

}  // namespace

TEST_CASE("running example parses with identical events on both fused backends") {
    auto tc = build_toolchain(oracle::grammar_path("sexp"));
    std::string in = "(ab c)";
    ParseOutcome a = fparse_interp(tc->fused, in, true);
    ParseOutcome b = run_automaton(tc->automaton, in, true);
    CHECK(a.accepted);
    CHECK(a.consumed == 6);
    CHECK(a == b);
    REQUIRE_FALSE(a.events.empty());
    CHECK(a.events.front().nonterminal == tc->fused.start);
    CHECK(a.events.front().start == 0);
    CHECK(a.events.front().end == 1);
    for (const auto& e : a.events) CHECK(e.start <= e.end);
}

TEST_CASE("failures carry the offset and the nonterminal") {
    auto tc = build_toolchain(oracle::grammar_path("sexp"));
    ParseOutcome a = fparse_interp(tc->fused, "(9");
    ParseOutcome b = run_automaton(tc->automaton, "(9");
    CHECK_FALSE(a.accepted);
    REQUIRE(a.failure);
    CHECK(a.failure->offset == 1);
    CHECK(a == b);
    ParseOutcome e = run_automaton(tc->automaton, "");
    CHECK_FALSE(e.accepted);
    CHECK(e.failure->offset == 0);
    CHECK(e.failure->nonterminal == tc->fused.start);
}

TEST_CASE("trailing text is not part of a parse") {
    auto tc = build_toolchain(oracle::grammar_path("sexp"));
    ParseOutcome o = run_automaton(tc->automaton, "ab cd");
    CHECK(o.accepted);
    CHECK(o.consumed == 2);
    CHECK_FALSE(tc->fused_accepts("ab cd", o));
    ParseOutcome s = run_automaton(tc->automaton, "ab  \n");
    CHECK(tc->fused_accepts("ab  \n", s));
}

TEST_CASE("three pipelines agree on short strings") {
    for (const char* name : {"sexp", "csv"}) {
        auto tc = build_toolchain(oracle::grammar_path(name));
        auto rep = oracle::exhaustive_three_way(*tc, oracle::grammar_alphabet(*tc).all(), 6, 120);
        INFO(name, " ", rep.first_failure);
        CHECK(rep.discrepancies == 0);
        CHECK_FALSE(rep.budget_exhausted);
        CHECK(rep.strings_checked > 100);
    }
}

TEST_CASE("three pipelines agree on random and valid inputs, including events") {
    for (const char* name : {"sexp", "csv", "json"}) {
        auto tc = build_toolchain(oracle::grammar_path(name));
        for (const auto& in : oracle::random_inputs(*tc, 600, 200, 13)) {
            auto t = oracle::run_three(*tc, in, kNoPos, true);
            INFO(name);
            REQUIRE(t.discrepancy() == "");
        }
        for (const auto& in : oracle::sampled_valid_words(*tc, 200, 20, 14)) {
            auto t = oracle::run_three(*tc, in, kNoPos, true);
            CHECK(t.discrepancy() == "");
            CHECK(t.auto_full);
        }
    }
}

TEST_CASE("fast recognition agrees with the full runner") {
    auto tc = build_toolchain(oracle::grammar_path("json"));
    RunScratch scratch;
    for (const auto& in : oracle::random_inputs(*tc, 500, 150, 15)) {
        ParseOutcome a = run_automaton(tc->automaton, in);
        ParseOutcome b = run_automaton_fast(tc->automaton, in, scratch);
        CHECK(a.accepted == b.accepted);
        CHECK(a.consumed == b.consumed);
        CHECK(a.failure == b.failure);
    }
}

TEST_CASE("starting from another nonterminal") {
    auto tc = build_toolchain(oracle::grammar_path("sexp"));
    NtId sexps = tc->grammar.nt("sexps");
    ParseOutcome a = fparse_interp_from(tc->fused, sexps, "a b (c)");
    ParseOutcome b = run_automaton_from(tc->automaton, sexps, "a b (c)");
    CHECK(a.accepted);
    CHECK(a.consumed == 7);
    CHECK(a == b);
    ParseOutcome e = run_automaton_from(tc->automaton, sexps, ")");
    CHECK(e.accepted);
    CHECK(e.consumed == 0);
}

TEST_CASE("automaton structure") {
    auto tc = build_toolchain(oracle::grammar_path("sexp"));
    const auto& A = tc->automaton;
    CHECK(A.state_count() == 11);
    CHECK(A.nt_count() == 3);
    std::vector<bool> reached(A.state_count());
    std::vector<std::size_t> work;
    for (NtId n = 0; n < A.nt_count(); ++n) {
        REQUIRE(A.entry(n) >= 0);
        CHECK(A.accept(static_cast<std::size_t>(A.entry(n))) < 0);
        reached[static_cast<std::size_t>(A.entry(n))] = true;
        work.push_back(static_cast<std::size_t>(A.entry(n)));
    }
    while (!work.empty()) {
        std::size_t s = work.back();
        work.pop_back();
        bool any = false;
        for (unsigned c = 0; c < 256; ++c) {
            std::int32_t t = A.next(s, static_cast<unsigned char>(c));
            CHECK(A.state(s).classes[A.class_row(s)[c]].contains(static_cast<unsigned char>(c)));
            CHECK(A.state(s).class_target[A.class_row(s)[c]] == t);
            if (t == CompiledAutomaton::kExhaust) continue;
            any = true;
            CHECK(A.state(static_cast<std::size_t>(t)).nt == A.state(s).nt);
            if (!reached[static_cast<std::size_t>(t)]) {
                reached[static_cast<std::size_t>(t)] = true;
                work.push_back(static_cast<std::size_t>(t));
            }
        }
        CHECK(A.terminal(s) == !any);
    }
    for (bool r : reached) CHECK(r);
    std::string d = dump(A);
    CHECK(d.rfind("states 11", 0) == 0);
}

TEST_CASE("state budget") {
    auto tc = build_toolchain(oracle::grammar_path("json"));
    CHECK_THROWS_AS(compile_automaton(tc->fused, 5), StateBudgetExceeded);
}

TEST_CASE("pseudo source has one function per state") {
    auto tc = build_toolchain(oracle::grammar_path("sexp"));
    std::string src = emit_source(tc->automaton, tc->fused, EmitBackend::Pseudo);
    std::size_t fns = 0;
    for (std::size_t at = src.find("parse_"); at != std::string::npos; at = src.find("parse_", at + 1))
        if (at >= 4 && (src.compare(at - 4, 4, "rec ") == 0 || src.compare(at - 4, 4, "and ") == 0)) ++fns;
    CHECK(fns == emitted_function_count(tc->automaton));
    CHECK(fns == tc->automaton.state_count());
}

TEST_CASE("emitted C++ compiles and agrees with the automaton") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / ("lpfuse_emit_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    for (const char* name : {"sexp", "csv", "json"}) {
        auto tc = build_toolchain(oracle::grammar_path(name));
        fs::path src = dir / (std::string(name) + ".cpp");
        {
            std::ofstream f(src);
            f << emit_source(tc->automaton, tc->fused, EmitBackend::Cpp);
            f << R"(
#include <cstdio>
#include <string>
int main() {
    std::size_t n;
    while (std::scanf("%zu", &n) == 1) {
        std::getchar();
        std::string s(n, '\0');
        if (n && std::fread(s.data(), 1, n, stdin) != n) return 1;
        auto o = lpfuse_generated::parse(s.c_str(), n);
        std::printf("%d %zu %u\n", o.accepted ? 1 : 0, o.consumed, o.accepted ? 0u : o.failed_nt);
    }
}
)";
        }
        fs::path exe = dir / name;
        std::string cc = std::string(LPFUSE_CXX_COMPILER) + " -std=c++17 -O2 -o " + exe.string() + " " + src.string() +
                         " 2>&1";
        std::string diag = slurp_command(cc);
        INFO(name, " ", diag);
        REQUIRE(fs::exists(exe));

        auto inputs = oracle::random_inputs(*tc, 400, 120, 16);
        for (const auto& w : oracle::sampled_valid_words(*tc, 100, 20, 17)) inputs.push_back(w);
        inputs.push_back("");
        fs::path in = dir / (std::string(name) + ".in");
        std::string expected;
        {
            std::ofstream f(in, std::ios::binary);
            for (const auto& s : inputs) {
                f << s.size() << '\n' << s;
                ParseOutcome o = run_automaton(tc->automaton, s);
                expected += std::to_string(o.accepted ? 1 : 0) + " " + std::to_string(o.consumed) + " " +
                            std::to_string(o.accepted ? 0u : o.failure->nonterminal) + "\n";
            }
        }
        std::string got = slurp_command(exe.string() + " < " + in.string());
        CHECK(got == expected);
    }
    fs::remove_all(dir);
}
