#include <doctest.h>

#include "oracles.hpp"

using namespace lpfuse;

namespace {

Lexer make_lexer(std::vector<std::pair<std::string, std::string>> rules, const std::string& skip = "") {
    Lexer L;
    for (auto& [name, re] : rules) L.rules.push_back({parse_regex(re), LexAction::Return, L.tokens.intern(name)});
    if (!skip.empty()) L.rules.push_back({parse_regex(skip), LexAction::Skip, kNoToken});
    return L;
}

std::vector<TokenId> ids(const LexResult& r) {
    std::vector<TokenId> out;
    for (const auto& t : r.tokens) out.push_back(t.token);
    return out;
}

}  // namespace

TEST_CASE("canonical lexer has disjoint rules and priority on overlaps") {
    Lexer raw = make_lexer({{"IF", "\"if\""}, {"ID", "[a-z]+"}}, "\" \"");
    Lexer L = canonicalize_lexer(raw);
    REQUIRE(L.rules.size() == 3);
    for (std::size_t i = 0; i < L.rules.size(); ++i)
        for (std::size_t j = i + 1; j < L.rules.size(); ++j)
            CHECK(is_empty_language(Regex::conj(L.rules[i].pattern, L.rules[j].pattern)));
    TokenId IF = L.tokens.find("IF"), ID = L.tokens.find("ID");
    CHECK(matches(L.rule_for(IF)->pattern, "if"));
    CHECK_FALSE(matches(L.rule_for(ID)->pattern, "if"));
    CHECK(matches(L.rule_for(ID)->pattern, "iff"));
    CHECK(matches(L.skip(), " "));
}

TEST_CASE("canonicalization merges repeated tokens and skips") {
    Lexer raw = make_lexer({{"A", "\"a\""}, {"A", "\"b\""}}, "\" \"");
    raw.rules.push_back({parse_regex("\"\\n\""), LexAction::Skip, kNoToken});
    Lexer L = canonicalize_lexer(raw);
    CHECK(L.rules.size() == 2);
    CHECK(matches(L.rule_for(0)->pattern, "b"));
    CHECK(matches(L.skip(), "\n"));
}

TEST_CASE("shadowed and nullable rules") {
    Lexer raw = make_lexer({{"ID", "[a-z]+"}, {"IF", "\"if\""}});
    std::vector<std::string> warnings;
    CanonicalizeOptions opts;
    opts.warnings = &warnings;
    Lexer L = canonicalize_lexer(raw, opts);
    CHECK_FALSE(warnings.empty());
    CHECK(L.rule_for(L.tokens.find("IF")) == nullptr);
    opts.strict = true;
    CHECK_THROWS_AS(canonicalize_lexer(raw, opts), LexerError);
    CHECK_THROWS_AS(canonicalize_lexer(make_lexer({{"E", "\"a\"*"}})), LexerError);
}

TEST_CASE("longest match wins") {
    Lexer L = canonicalize_lexer(make_lexer({{"LT", "\"<\""}, {"LE", "\"<=\""}, {"ID", "[a-z]+"}}, "\" \""));
    auto r = lex(L, "a <= b < c");
    REQUIRE(r.ok());
    TokenId LT = L.tokens.find("LT"), LE = L.tokens.find("LE"), ID = L.tokens.find("ID");
    CHECK(ids(r) == std::vector<TokenId>{ID, LE, ID, LT, ID});
    CHECK(r.tokens[1].start == 2);
    CHECK(r.tokens[1].end == 4);
}

TEST_CASE("lexing errors report the offset of the failed lexeme") {
    Lexer L = canonicalize_lexer(make_lexer({{"AB", "\"ab\""}}, "\" \""));
    auto r = lex(L, "ab a");
    REQUIRE_FALSE(r.ok());
    CHECK(r.error->offset == 3);
    CHECK(r.tokens.size() == 1);
    LexerDfa dfa(L);
    auto d = dfa.lex("ab a");
    REQUIRE_FALSE(d.ok());
    CHECK(d.error->offset == 3);
}

TEST_CASE("derivative lexer agrees with brute-force longest match") {
    auto ex = oracle::running_example();
    std::vector<unsigned char> alpha = {'(', ')', 'a', 'b', ' ', '9'};
    for (std::size_t n = 0; n <= 5; ++n)
        for (const auto& w : oracle::words_of_length(alpha, n)) {
            auto r = lex(ex.lexer, w);
            auto b = oracle::brute_lex(ex.lexer, w);
            INFO(w);
            REQUIRE(r.ok() == b.ok);
            if (b.ok) CHECK(r.tokens == b.tokens);
            else CHECK(r.error->offset == b.error);
        }
}

TEST_CASE("table lexer agrees with the derivative lexer") {
    for (const char* name : {"sexp", "csv", "json"}) {
        auto tc = build_toolchain(oracle::grammar_path(name));
        for (const auto& in : oracle::random_inputs(*tc, 500, 64, 9)) {
            auto a = lex(tc->source.lexer, in);
            auto b = tc->dfa.lex(in);
            INFO(name, " ", in);
            REQUIRE(a.ok() == b.ok());
            CHECK(a.tokens == b.tokens);
            if (!a.ok()) CHECK(a.error->offset == b.error->offset);
        }
    }
}

TEST_CASE("cursor yields the same tokens as whole-input lexing") {
    auto tc = build_toolchain(oracle::grammar_path("json"));
    for (const auto& in : oracle::random_inputs(*tc, 300, 80, 10)) {
        auto whole = tc->dfa.lex(in);
        LexerDfa::Cursor cur(tc->dfa, in);
        std::vector<Lexeme> got;
        while (const Lexeme* t = cur.peek()) {
            got.push_back(*t);
            cur.advance();
        }
        CHECK(got == whole.tokens);
        CHECK(cur.failed() == !whole.ok());
        if (!whole.ok()) CHECK(cur.error_offset() == whole.error->offset);
    }
}

TEST_CASE("only_skip recognises skippable suffixes") {
    auto ex = oracle::running_example();
    LexerDfa dfa(ex.lexer);
    CHECK(dfa.only_skip("abc  \n ", 3));
    CHECK(dfa.only_skip("abc", 3));
    CHECK_FALSE(dfa.only_skip("abc d", 3));
    CHECK_FALSE(dfa.only_skip("abc !", 3));
}

TEST_CASE("bytes sharing a class share the transition") {
    for (const char* name : {"sexp", "csv", "json"}) {
        auto tc = build_toolchain(oracle::grammar_path(name));
        const LexerDfa& d = tc->dfa;
        for (std::size_t s = 0; s < d.state_count(); ++s) {
            std::map<std::uint16_t, std::int32_t> target;
            for (unsigned c = 0; c < 256; ++c) {
                auto [it, fresh] = target.emplace(d.class_row(s)[c], d.next(s, static_cast<unsigned char>(c)));
                if (!fresh) CHECK(it->second == d.next(s, static_cast<unsigned char>(c)));
            }
        }
    }
}

TEST_CASE("lexing into a reused buffer matches fresh lexing") {
    auto tc = build_toolchain(oracle::grammar_path("json"));
    LexResult reused;
    for (const auto& in : oracle::random_inputs(*tc, 200, 80, 12)) {
        auto fresh = tc->dfa.lex(in);
        tc->dfa.lex_into(in, reused);
        CHECK(reused.tokens == fresh.tokens);
        REQUIRE(reused.ok() == fresh.ok());
        if (!fresh.ok()) CHECK(reused.error->offset == fresh.error->offset);
        auto u = tc->run_unfused(in, reused);
        CHECK(u.accepted() == tc->run_unfused(in).accepted());
    }
}
