#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lpfuse/regex.hpp"
#include "lpfuse/tokens.hpp"

namespace lpfuse {

enum class LexAction : std::uint8_t { Return, Skip };

struct LexRule {
    Regex pattern;
    LexAction action = LexAction::Return;
    TokenId token = kNoToken;  // unused for Skip
};

struct Lexer {
    std::vector<LexRule> rules;
    TokenNames tokens;

    /// Pattern of the Skip rule, or Bot when there is none.
    Regex skip() const;
    /// The Return rule for t, or nullptr.
    const LexRule* rule_for(TokenId t) const;
};

class LexerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CanonicalizeOptions {
    bool strict = false;
    std::vector<std::string>* warnings = nullptr;
};

/// Makes the rules pairwise disjoint with one Skip rule and one Return rule per
/// token. Earlier rules take priority on overlaps.
Lexer canonicalize_lexer(const Lexer& raw, const CanonicalizeOptions& opts = {});

struct Lexeme {
    TokenId token;
    std::size_t start;
    std::size_t end;
    bool operator==(const Lexeme& o) const {
        return token == o.token && start == o.start && end == o.end;
    }
};

struct LexError {
    std::size_t offset;
};

struct LexResult {
    std::vector<Lexeme> tokens;
    std::optional<LexError> error;
    bool ok() const { return !error.has_value(); }
};

/// Longest-match lexing by iterated derivatives over the rule list.
LexResult lex(const Lexer& L, std::string_view input);

/// Lexer compiled to a table DFA. Produces the same tokens as lex().
class LexerDfa {
public:
    explicit LexerDfa(const Lexer& L, std::size_t state_budget = 100000);

    LexResult lex(std::string_view input, ScanStats* stats = nullptr) const;
    /// Same as lex(), reusing the storage already held by out.
    void lex_into(std::string_view input, LexResult& out) const;

    /// Scans one lexeme starting at pos. Returns false on a lexing error.
    /// Skip matches are reported with token == kNoToken.
    bool scan(std::string_view input, std::size_t pos, Lexeme& out, ScanStats* stats = nullptr) const;

    /// True iff input[pos..] lexes completely into Skip matches.
    bool only_skip(std::string_view input, std::size_t pos, ScanStats* stats = nullptr) const;

    std::size_t state_count() const { return accept_.size(); }
    /// Byte -> class id for one state.
    const std::uint16_t* class_row(std::size_t s) const { return classes_.data() + s * 256; }
    /// Next state, or -1 when no rule can match any more.
    std::int32_t next(std::size_t s, unsigned char c) const { return next_[s * 256 + c]; }
    /// Rule accepted in state s, or -1.
    std::int32_t accept_rule(std::size_t s) const { return accept_[s]; }
    const Lexer& lexer() const { return lexer_; }

    /// Pull-style token source over one input.
    class Cursor {
    public:
        Cursor(const LexerDfa& dfa, std::string_view input, ScanStats* stats = nullptr)
            : dfa_(dfa), input_(input), stats_(stats) { fill(); }

        /// Current token, or nullptr at end of input or after an error.
        const Lexeme* peek() const { return has_ ? &cur_ : nullptr; }
        void advance() { fill(); }
        bool failed() const { return failed_; }
        std::size_t error_offset() const { return pos_; }
        std::size_t index() const { return index_; }

    private:
        void fill();
        void scan_next();

        const LexerDfa& dfa_;
        std::string_view input_;
        ScanStats* stats_;
        std::size_t pos_ = 0;
        std::size_t index_ = 0;
        bool started_ = false;
        bool has_ = false;
        bool failed_ = false;
        Lexeme cur_{};
    };

private:
    static constexpr std::int32_t kDead = -1;

    Lexer lexer_;
    std::vector<std::int32_t> next_;          // state * 256 + byte
    std::vector<std::int32_t> accept_;        // rule index or -1
    std::vector<std::uint16_t> classes_;      // state * 256 + byte
};

}  // namespace lpfuse
