#include <doctest.h>

#include "oracles.hpp"

using namespace lpfuse;

TEST_CASE("fused production counts") {
    for (const char* name : {"sexp", "csv", "json"}) {
        auto tc = build_toolchain(oracle::grammar_path(name));
        const auto& G = tc->grammar;
        const auto& F = tc->fused;
        bool skip = !F.skip.is_bot();
        REQUIRE(F.prods.size() == G.prods.size());
        for (NtId n = 0; n < G.prods.size(); ++n) {
            std::size_t toks = 0, eps = 0;
            for (const auto& p : G.prods[n]) (p.kind == ProdKind::Eps ? eps : toks)++;
            CHECK(F.prods[n].size() == toks + (skip ? 1 : 0) + eps);
            CHECK(F.has_lookahead(n) == (eps == 1));
        }
    }
}

TEST_CASE("match productions are pairwise disjoint and the lookahead excludes them") {
    for (const char* name : {"sexp", "csv", "json"}) {
        auto tc = build_toolchain(oracle::grammar_path(name));
        for (const auto& ps : tc->fused.prods) {
            for (std::size_t i = 0; i < ps.size(); ++i)
                for (std::size_t j = i + 1; j < ps.size(); ++j) {
                    if (ps[i].kind == FusedKind::Lookahead || ps[j].kind == FusedKind::Lookahead) continue;
                    CHECK(is_empty_language(Regex::conj(ps[i].regex, ps[j].regex)));
                }
            for (const auto& p : ps)
                if (p.kind == FusedKind::Lookahead) {
                    CHECK(p.tail.empty());
                    CHECK(p.regex.nullable());
                    for (const auto& q : ps)
                        if (q.kind == FusedKind::Match)
                            CHECK(is_empty_language(Regex::conj(p.regex, q.regex)));
                }
        }
    }
}

TEST_CASE("skip loops return to their own nonterminal") {
    auto tc = build_toolchain(oracle::grammar_path("sexp"));
    for (NtId n = 0; n < tc->fused.prods.size(); ++n) {
        std::size_t loops = 0;
        for (const auto& p : tc->fused.prods[n])
            if (p.kind == FusedKind::Match && p.origin == kNoToken) {
                ++loops;
                CHECK(p.tail == std::vector<NtId>{n});
                CHECK(p.regex == tc->fused.skip);
            }
        CHECK(loops == 1);
    }
}

TEST_CASE("no skip rule means no skip loops") {
    auto tc = build_toolchain(oracle::grammar_path("csv"));
    CHECK(tc->fused.skip.is_bot());
    for (const auto& ps : tc->fused.prods)
        for (const auto& p : ps) CHECK((p.kind == FusedKind::Lookahead || p.origin != kNoToken));
}

TEST_CASE("a token without a lexer rule is rejected") {
    auto ex = oracle::running_example();
    NormalGrammar G = trim_unreachable(normalize(ex.sexp, ex.tokens));
    Lexer L = ex.lexer;
    L.rules.erase(std::remove_if(L.rules.begin(), L.rules.end(),
                                 [&](const LexRule& r) { return r.token == ex.RPAR && r.action == LexAction::Return; }),
                  L.rules.end());
    CHECK_THROWS_AS(fuse(L, G), MissingTokenRule);
}

TEST_CASE("fused dump lists every production") {
    auto ex = oracle::running_example();
    NormalGrammar G = trim_unreachable(normalize(ex.sexp, ex.tokens));
    FusedGrammar F = fuse(ex.lexer, G);
    std::string d = dump(F);
    CHECK(std::count(d.begin(), d.end(), '\n') == 9);
    CHECK(d.find("?!") != std::string::npos);
}
