#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lpfuse/cfe.hpp"
#include "lpfuse/lexer.hpp"

namespace lpfuse {

class GrammarError : public std::runtime_error {
public:
    GrammarError(std::size_t line, std::size_t col, const std::string& msg);
    std::size_t line;
    std::size_t col;
};

/// Surface form of a grammar file:
///
///     token NAME = <regex> ;
///     skip = <regex> ;
///     start NAME ;
///     NAME ::= A b C | D | ;
///
/// `#` starts a comment. An empty alternative denotes the empty word.
struct GrammarFile {
    struct Loc {
        std::size_t line = 1;
        std::size_t col = 1;
    };
    struct LexDecl {
        bool skip = false;
        std::string name;  // empty for skip
        std::string regex;
        Loc where;
        Loc regex_at;
    };
    struct Rule {
        std::string name;
        std::vector<std::vector<std::string>> alts;
        std::vector<std::vector<Loc>> alt_locs;
        Loc where;
    };

    std::vector<LexDecl> lex;  // token and skip declarations in file order
    std::vector<Rule> rules;
    std::string start;  // empty if not declared
    Loc start_at;
};

GrammarFile parse_grammar_file(std::string_view text);

struct LoadOptions {
    bool strict_lexer = false;
    std::size_t max_fix_depth = 8;
    std::size_t size_warning = 10000;
};

struct LoadedGrammar {
    Lexer lexer;  // canonicalized
    Cfe cfe;
    TokenNames tokens;
    std::string start;
    std::vector<std::string> warnings;
};

/// Resolves names, builds the lexer and lowers the named rules to one closed
/// expression. A rule referenced while it is being expanded becomes a bound
/// variable; other references are inlined.
LoadedGrammar load_grammar_text(std::string_view text, const LoadOptions& opts = {});
LoadedGrammar load_grammar(const std::string& path, const LoadOptions& opts = {});

/// Nesting depth of Fix binders.
std::size_t fix_depth(const Cfe& g);

}  // namespace lpfuse
