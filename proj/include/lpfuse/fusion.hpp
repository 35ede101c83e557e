#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lpfuse/lexer.hpp"
#include "lpfuse/normalize.hpp"

namespace lpfuse {

enum class FusedKind : std::uint8_t { Match, Lookahead };

/// `n -> r n1 .. nk` (Match) or `n -> ?r` (Lookahead).
struct FusedProduction {
    FusedKind kind = FusedKind::Match;
    Regex regex;
    std::vector<NtId> tail;
    TokenId origin = kNoToken;  // token the regex came from; kNoToken for skip loops
};

struct FusedGrammar {
    NtId start = 0;
    std::vector<std::vector<FusedProduction>> prods;
    std::vector<std::string> names;
    Regex skip;

    std::size_t production_count() const;
    bool has_lookahead(NtId n) const;
};

class MissingTokenRule : public std::runtime_error {
public:
    MissingTokenRule(TokenId t, const std::string& name);
    TokenId token;
};

/// Inlines token regexes, adds skip self-loops, and turns empty productions
/// into complement lookaheads.
FusedGrammar fuse(const Lexer& L, const NormalGrammar& G, NtId start);
inline FusedGrammar fuse(const Lexer& L, const NormalGrammar& G) { return fuse(L, G, G.start); }

/// One production per line; lookaheads print as `?!...`.
std::string dump(const FusedGrammar& F);

}  // namespace lpfuse
