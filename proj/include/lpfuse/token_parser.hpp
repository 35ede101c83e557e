#pragma once

#include <optional>
#include <vector>

#include "lpfuse/lexer.hpp"
#include "lpfuse/normalize.hpp"

namespace lpfuse {

struct TokenStream {
    std::vector<Lexeme> tokens;
};

struct ParseFail {
    std::size_t token_index;
    NtId nonterminal;
    TokenSet expected;
};

struct TokenParseResult {
    std::size_t remainder = 0;  // index of the first unconsumed token
    std::optional<ParseFail> fail;
    std::size_t steps = 0;
    bool ok() const { return !fail.has_value(); }
};

/// DGNF parser over tokens with one token of lookahead.
class TokenParser {
public:
    explicit TokenParser(const NormalGrammar& G);

    TokenParseResult parse(NtId start, const std::vector<Lexeme>& ts) const;

    /// Parses from a pull source exposing `const Lexeme* peek()` and `advance()`.
    /// If `probe` is given, the pending stack is appended to its configuration
    /// right after the source first reports a hit.
    template <typename Source>
    TokenParseResult parse_source(NtId start, Source& src, ScanStats* probe = nullptr) const;

    const NormalGrammar& grammar() const { return G_; }

private:
    std::int32_t lookup(NtId n, TokenId t) const {
        return t < ntok_ ? table_[static_cast<std::size_t>(n) * ntok_ + t] : -1;
    }
    TokenParseResult failure(std::size_t idx, NtId n, std::size_t steps) const;

    NormalGrammar G_;
    std::size_t ntok_ = 0;
    std::vector<std::int32_t> table_;   // (nt, token) -> production slot or -1
    std::vector<std::uint8_t> eps_;     // nt has an empty production
    std::vector<std::uint32_t> tail_begin_, tail_end_;
    std::vector<NtId> tails_;           // production tails stored reversed
};

TokenParseResult parse_tokens(const NormalGrammar& G, NtId start, const TokenStream& ts);

template <typename Source>
TokenParseResult TokenParser::parse_source(NtId start, Source& src, ScanStats* probe) const {
    std::vector<NtId> stack(64);
    std::size_t top = 0;
    stack[top++] = start;
    std::size_t steps = 0;
    std::size_t idx = 0;
    bool noted = false;
    auto note = [&] {
        if (probe && !noted && probe->probe_hit) {
            noted = true;
            probe->probe_state.push_back(6);
            probe->probe_state.insert(probe->probe_state.end(), stack.begin(),
                                      stack.begin() + static_cast<std::ptrdiff_t>(top));
        }
    };
    note();
    while (top != 0) {
        NtId n = stack[--top];
        ++steps;
        const Lexeme* head = src.peek();
        if (head != nullptr) {
            std::int32_t slot = lookup(n, head->token);
            if (slot >= 0) {
                src.advance();
                ++idx;
                const NtId* tail = tails_.data() + tail_begin_[static_cast<std::size_t>(slot)];
                const NtId* tail_end = tails_.data() + tail_end_[static_cast<std::size_t>(slot)];
                if (top + static_cast<std::size_t>(tail_end - tail) > stack.size()) stack.resize(2 * stack.size() + 16);
                while (tail != tail_end) stack[top++] = *tail++;
                note();
                continue;
            }
        }
        if (eps_[n]) continue;
        return failure(idx, n, steps);
    }
    TokenParseResult r;
    r.remainder = idx;
    r.steps = steps;
    return r;
}

}  // namespace lpfuse
