#include "lpfuse/grammar_file.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace lpfuse {

GrammarError::GrammarError(std::size_t l, std::size_t c, const std::string& msg)
    : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), col(c) {}

namespace {

class Scanner {
public:
    explicit Scanner(std::string_view t) : text_(t) {}

    GrammarFile::Loc loc() const { return {line_, col_}; }
    bool done() {
        skip_space();
        return i_ >= text_.size();
    }

    [[noreturn]] void fail(const std::string& msg) const { throw GrammarError(line_, col_, msg); }
    [[noreturn]] static void fail_at(GrammarFile::Loc at, const std::string& msg) {
        throw GrammarError(at.line, at.col, msg);
    }

    void skip_space() {
        while (i_ < text_.size()) {
            char c = text_[i_];
            if (c == '#') {
                while (i_ < text_.size() && text_[i_] != '\n') bump();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                bump();
            } else {
                break;
            }
        }
    }

    bool peek_is(std::string_view s) {
        skip_space();
        return text_.substr(i_, s.size()) == s;
    }

    void expect(std::string_view s) {
        if (!peek_is(s)) fail("expected '" + std::string(s) + "'");
        for (std::size_t k = 0; k < s.size(); ++k) bump();
    }

    bool accept(std::string_view s) {
        if (!peek_is(s)) return false;
        for (std::size_t k = 0; k < s.size(); ++k) bump();
        return true;
    }

    static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    bool at_ident() {
        skip_space();
        return i_ < text_.size() && ident_start(text_[i_]);
    }

    std::string ident() {
        skip_space();
        if (i_ >= text_.size() || !ident_start(text_[i_])) fail("expected a name");
        std::string out;
        while (i_ < text_.size() && ident_char(text_[i_])) {
            out += text_[i_];
            bump();
        }
        return out;
    }

    /// Raw regex text up to the terminating `;`, respecting quotes and classes.
    std::string regex_text(GrammarFile::Loc& at) {
        skip_space();
        at = loc();
        std::string out;
        bool in_quote = false, in_class = false;
        while (i_ < text_.size()) {
            char c = text_[i_];
            if (!in_quote && !in_class) {
                if (c == ';') break;
                if (c == '#') {
                    skip_space();
                    out += ' ';
                    continue;
                }
            }
            if (c == '\\' && (in_quote || in_class) && i_ + 1 < text_.size()) {
                out += c;
                bump();
                out += text_[i_];
                bump();
                continue;
            }
            if (c == '"' && !in_class) in_quote = !in_quote;
            else if (c == '[' && !in_quote) in_class = true;
            else if (c == ']' && in_class) in_class = false;
            out += c;
            bump();
        }
        if (i_ >= text_.size()) fail("unterminated regex, expected ';'");
        bump();
        while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
        return out;
    }

private:
    void bump() {
        if (text_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
    }

    std::string_view text_;
    std::size_t i_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

}  // namespace

GrammarFile parse_grammar_file(std::string_view text) {
    GrammarFile gf;
    Scanner s(text);
    while (!s.done()) {
        auto at = s.loc();
        std::string word = s.ident();
        if (word == "token" && s.at_ident()) {
            GrammarFile::LexDecl d;
            d.where = at;
            d.name = s.ident();
            s.expect("=");
            d.regex = s.regex_text(d.regex_at);
            gf.lex.push_back(std::move(d));
            continue;
        }
        if (word == "skip" && s.peek_is("=")) {
            GrammarFile::LexDecl d;
            d.where = at;
            d.skip = true;
            s.expect("=");
            d.regex = s.regex_text(d.regex_at);
            gf.lex.push_back(std::move(d));
            continue;
        }
        if (word == "start" && s.at_ident()) {
            if (!gf.start.empty()) Scanner::fail_at(at, "start declared twice");
            gf.start_at = s.loc();
            gf.start = s.ident();
            s.expect(";");
            continue;
        }
        GrammarFile::Rule r;
        r.name = word;
        r.where = at;
        s.expect("::=");
        r.alts.emplace_back();
        r.alt_locs.emplace_back();
        for (;;) {
            if (s.accept(";")) break;
            if (s.accept("|")) {
                r.alts.emplace_back();
                r.alt_locs.emplace_back();
                continue;
            }
            if (s.done()) s.fail("unterminated rule '" + r.name + "', expected ';'");
            auto sym_at = s.loc();
            r.alts.back().push_back(s.ident());
            r.alt_locs.back().push_back(sym_at);
        }
        gf.rules.push_back(std::move(r));
    }
    return gf;
}

std::size_t fix_depth(const Cfe& g) {
    if (!g) return 0;
    std::size_t l = fix_depth(g->left), r = fix_depth(g->right);
    std::size_t d = std::max(l, r);
    return g->kind == CfeKind::Fix ? d + 1 : d;
}

namespace {

struct Lowering {
    const GrammarFile& gf;
    const std::map<std::string, std::size_t>& rule_index;
    const TokenNames& tokens;
    std::vector<std::string> open;
    std::set<std::string> referenced_open;

    Cfe lower_rule(std::size_t idx) {
        const auto& rule = gf.rules[idx];
        open.push_back(rule.name);
        Cfe body;
        for (const auto& alt : rule.alts) {
            Cfe e;
            for (const auto& sym : alt) {
                Cfe x = lower_symbol(sym);
                e = e ? cfe::seq(e, x) : x;
            }
            if (!e) e = cfe::eps();
            body = body ? cfe::alt(body, e) : e;
        }
        open.pop_back();
        if (referenced_open.erase(rule.name) > 0) return cfe::fix(rule.name, body);
        return body;
    }

    Cfe lower_symbol(const std::string& sym) {
        TokenId t = tokens.find(sym);
        if (t != kNoToken) return cfe::tok(t);
        for (const auto& o : open)
            if (o == sym) {
                referenced_open.insert(sym);
                return cfe::var(sym);
            }
        return lower_rule(rule_index.at(sym));
    }
};

}  // namespace

LoadedGrammar load_grammar_text(std::string_view text, const LoadOptions& opts) {
    GrammarFile gf = parse_grammar_file(text);
    LoadedGrammar out;

    std::map<std::string, GrammarFile::Loc> names;
    auto declare = [&](const std::string& n, GrammarFile::Loc at) {
        if (!names.emplace(n, at).second) Scanner::fail_at(at, "name '" + n + "' defined twice");
    };

    Lexer raw;
    for (const auto& d : gf.lex) {
        if (!d.skip) declare(d.name, d.where);
        Regex r;
        try {
            r = parse_regex(d.regex);
        } catch (const RegexSyntaxError& e) {
            Scanner::fail_at({d.regex_at.line, d.regex_at.col + e.offset}, e.what());
        }
        if (d.skip) {
            raw.rules.push_back({r, LexAction::Skip, kNoToken});
        } else {
            TokenId t = raw.tokens.intern(d.name);
            raw.rules.push_back({r, LexAction::Return, t});
        }
    }
    if (gf.rules.empty()) throw GrammarError(1, 1, "grammar has no rules");

    std::map<std::string, std::size_t> rule_index;
    for (std::size_t i = 0; i < gf.rules.size(); ++i) {
        declare(gf.rules[i].name, gf.rules[i].where);
        rule_index[gf.rules[i].name] = i;
    }
    for (const auto& r : gf.rules)
        for (std::size_t a = 0; a < r.alts.size(); ++a)
            for (std::size_t k = 0; k < r.alts[a].size(); ++k)
                if (!names.count(r.alts[a][k]))
                    Scanner::fail_at(r.alt_locs[a][k], "unresolved name '" + r.alts[a][k] + "'");

    std::string start = gf.start.empty() ? gf.rules.front().name : gf.start;
    if (!rule_index.count(start)) Scanner::fail_at(gf.start_at, "start symbol '" + start + "' is not a rule");

    if (raw.rules.empty()) throw GrammarError(1, 1, "grammar declares no tokens");
    CanonicalizeOptions copts;
    copts.strict = opts.strict_lexer;
    copts.warnings = &out.warnings;
    try {
        out.lexer = canonicalize_lexer(raw, copts);
    } catch (const LexerError& e) {
        throw GrammarError(1, 1, e.what());
    }
    out.tokens = raw.tokens;
    out.start = start;

    Lowering low{gf, rule_index, out.tokens, {}, {}};
    out.cfe = low.lower_rule(rule_index.at(start));

    std::size_t depth = fix_depth(out.cfe);
    if (depth > opts.max_fix_depth)
        throw GrammarError(gf.rules[rule_index.at(start)].where.line, 1,
                           "recursive rules nest " + std::to_string(depth) + " levels deep (limit " +
                               std::to_string(opts.max_fix_depth) +
                               "); break mutual recursion by merging rules or factoring shared suffixes");
    std::size_t size = node_count(out.cfe);
    if (size > opts.size_warning)
        out.warnings.push_back("lowered expression has " + std::to_string(size) +
                               " nodes; mutually recursive rules are duplicated when inlined");
    return out;
}

LoadedGrammar load_grammar(const std::string& path, const LoadOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GrammarError(0, 0, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_grammar_text(ss.str(), opts);
}

}  // namespace lpfuse
