#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "lpfuse/engine.hpp"
#include "lpfuse/grammar_file.hpp"
#include "lpfuse/token_parser.hpp"

namespace lpfuse {

/// Outcome of lexing the whole input and then parsing the token list.
struct UnfusedOutcome {
    bool lexed = false;
    std::size_t lex_error = 0;
    std::size_t token_count = 0;
    TokenParseResult parse;
    std::size_t consumed = 0;  // end of the last consumed token

    bool accepted() const { return lexed && parse.ok() && parse.remainder == token_count; }
};

/// Every stage built from one grammar file.
struct Toolchain {
    LoadedGrammar source;
    CfeType type;
    NormalGrammar grammar;
    FusedGrammar fused;
    CompiledAutomaton automaton;
    LexerDfa dfa;
    TokenParser parser;

    Toolchain(LoadedGrammar src, const NormalizeOptions& opts = {});

    UnfusedOutcome run_unfused(std::string_view input) const;
    /// Same as run_unfused(input), lexing into the caller's token buffer.
    UnfusedOutcome run_unfused(std::string_view input, LexResult& tokens) const;
    /// Whole-input acceptance: the fused parse succeeded and only skippable
    /// text follows it.
    bool fused_accepts(std::string_view input, const ParseOutcome& o) const {
        return o.accepted && dfa.only_skip(input, o.consumed);
    }
};

std::unique_ptr<Toolchain> build_toolchain(const std::string& grammar_path, const NormalizeOptions& opts = {});

}  // namespace lpfuse
