#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpfuse/tokens.hpp"

namespace lpfuse {

enum class CfeKind : std::uint8_t { Bot, Eps, Tok, Var, Seq, Alt, Fix };

struct CfeNode;
using Cfe = std::shared_ptr<const CfeNode>;

/// Context-free expression node. Seq/Alt use `left`/`right`; Fix uses `name`
/// and `left` as its body; Var uses `name`; Tok uses `token`.
struct CfeNode {
    CfeKind kind;
    TokenId token = kNoToken;
    std::string name;
    Cfe left;
    Cfe right;
};

namespace cfe {

Cfe bot();
Cfe eps();
Cfe tok(TokenId t);
Cfe var(const std::string& name);
Cfe seq(Cfe a, Cfe b);
Cfe alt(Cfe a, Cfe b);
Cfe fix(const std::string& name, Cfe body);
/// Fix with a fresh bound name; `f` receives the variable.
Cfe fix(const std::function<Cfe(Cfe)>& f);
/// Zero or more repetitions: Fix(x, Alt(Eps, Seq(e, Var x))) for a fresh x.
Cfe star(Cfe e);
/// Globally unique variable name with the given prefix.
std::string fresh_name(const std::string& prefix = "x");

}  // namespace cfe

/// Grammar type: nullability, first tokens, and tokens that may follow a
/// word's last token.
struct CfeType {
    bool null = false;
    TokenSet first;
    TokenSet flast;

    static CfeType bot() { return {}; }
    static CfeType eps() { return {true, {}, {}}; }
    static CfeType tok(TokenId t) { return {false, TokenSet::of(t), {}}; }

    bool operator==(const CfeType& o) const {
        return null == o.null && first == o.first && flast == o.flast;
    }
    bool operator!=(const CfeType& o) const { return !(*this == o); }
};

CfeType seq_type(const CfeType& a, const CfeType& b);
CfeType alt_type(const CfeType& a, const CfeType& b);
/// Separability: a is not nullable and a.flast is disjoint from b.first.
bool separable(const CfeType& a, const CfeType& b);
/// Apartness: disjoint first sets and not both nullable.
bool apart(const CfeType& a, const CfeType& b);

enum class TypeErrorKind { ApartnessViolation, SeparabilityViolation, GuardedVarUse, UnboundVar };

const char* type_error_kind_name(TypeErrorKind k);

class TypeError : public std::runtime_error {
public:
    TypeError(TypeErrorKind kind, std::vector<int> path, std::string detail, TokenSet tokens = {},
              std::string var = {}, bool nullable_left = false);

    TypeErrorKind kind;
    std::vector<int> path;   // child indices from the root
    TokenSet tokens;         // conflicting tokens, when relevant
    std::string var;         // offending variable, when relevant
    bool nullable_left;      // SeparabilityViolation caused by a nullable left operand
};

using TypeEnv = std::map<std::string, CfeType>;

struct TypeStats {
    std::size_t fix_nodes = 0;
    std::size_t max_fix_iterations = 0;
};

/// Types g under usable variables `gamma` and guarded variables `delta`.
/// Fix annotations are inferred as least fixed points.
CfeType type_of(const TypeEnv& gamma, const TypeEnv& delta, const Cfe& g, TypeStats* stats = nullptr);
inline CfeType type_of(const Cfe& g, TypeStats* stats = nullptr) { return type_of({}, {}, g, stats); }

using Word = std::vector<TokenId>;
using WordSet = std::set<Word>;

/// Words of length <= max_len in the language of g.
WordSet denote_enumerate(const Cfe& g, const std::map<std::string, WordSet>& env, std::size_t max_len);

std::string to_string(const Cfe& g, const TokenNames& names);
std::size_t node_count(const Cfe& g);
/// Structural equality up to consistent renaming of bound variables.
bool alpha_equivalent(const Cfe& a, const Cfe& b);
/// Free variables of g.
std::set<std::string> free_vars(const Cfe& g);

}  // namespace lpfuse
