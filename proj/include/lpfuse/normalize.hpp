#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lpfuse/cfe.hpp"
#include "lpfuse/tokens.hpp"

namespace lpfuse {

enum class ProdKind : std::uint8_t { Eps, Tok, Var };

/// One right-hand side: `<eps>`, `t n1 .. nk`, or the internal `alpha n1 .. nk`.
struct Production {
    ProdKind kind = ProdKind::Eps;
    TokenId token = kNoToken;
    std::string var;
    std::vector<NtId> tail;

    static Production eps() { return {}; }
    static Production tok(TokenId t, std::vector<NtId> tail = {}) {
        return {ProdKind::Tok, t, {}, std::move(tail)};
    }
    static Production var_head(std::string v, std::vector<NtId> tail = {}) {
        return {ProdKind::Var, kNoToken, std::move(v), std::move(tail)};
    }

    bool operator==(const Production& o) const {
        return kind == o.kind && token == o.token && var == o.var && tail == o.tail;
    }
};

struct NormalGrammar {
    NtId start = 0;
    std::vector<std::vector<Production>> prods;  // indexed by nonterminal
    std::vector<std::string> names;               // debug names
    std::map<std::string, NtId> var_nts;          // Fix variable -> its nonterminal
    TokenNames tokens;

    std::size_t nt_count() const { return prods.size(); }
    std::size_t production_count() const;
    NtId add_nt(const std::string& name);
    /// Nonterminal with the given debug name, or throws.
    NtId nt(const std::string& name) const;
};

class NormalizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NormalizeOptions {
    /// When a sequence's right operand is a bound variable, reuse that
    /// variable's nonterminal instead of allocating `n -> alpha`.
    bool share_tail_vars = true;
};

/// Converts a closed, well-typed expression to DGNF. Throws NormalizeError
/// (InternalFormLeak) if a variable-headed production survives.
NormalGrammar normalize(const Cfe& g, const TokenNames& tokens, const NormalizeOptions& opts = {});

/// Keeps only nonterminals reachable from the start symbol.
NormalGrammar trim_unreachable(const NormalGrammar& G);

enum class ViolationKind { InternalForm, ShapeViolation, Determinism, GuardedEpsilon };

const char* violation_kind_name(ViolationKind k);

struct Violation {
    ViolationKind kind;
    NtId nt = 0;               // offending nonterminal
    NtId other = 0;            // GuardedEpsilon: the following nonterminal
    TokenId token = kNoToken;  // clashing token
    std::string detail;
};

std::vector<Violation> check_dgnf(const NormalGrammar& G);

/// FIRST(n): head tokens of n's productions.
TokenSet first_tokens(const NormalGrammar& G, NtId n);

/// Shortest word length derivable from each nonterminal (kNoPos if none).
std::vector<std::size_t> min_lengths(const NormalGrammar& G);

/// Words of length <= max_len derivable from n. If `derivations` is given it
/// receives the number of complete leftmost derivations found for each word.
WordSet expand_enumerate(const NormalGrammar& G, NtId n, std::size_t max_len,
                         std::map<Word, std::size_t>* derivations = nullptr);

/// One production per line, start symbol's productions first:
///   `sexps -> LPAR sexps rpar sexps`, `sexps -> <eps>`, `n5 -> <none>`.
std::string dump(const NormalGrammar& G);

struct ParsedGrammarText {
    NormalGrammar grammar;
    std::vector<Violation> shape_errors;
};

/// Reads the dump format (also accepts `lhs ::= alt | alt` lines). A name is a
/// nonterminal iff it appears on a left-hand side. Right-hand sides that are
/// not `terminal nonterminal*` are reported as ShapeViolation and omitted.
ParsedGrammarText parse_grammar_text(std::string_view text, TokenNames tokens = {});

/// Equality up to a bijective renaming of nonterminals (start maps to start).
bool isomorphic(const NormalGrammar& a, const NormalGrammar& b);

}  // namespace lpfuse
