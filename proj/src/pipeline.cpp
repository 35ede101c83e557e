#include "lpfuse/pipeline.hpp"

namespace lpfuse {

namespace {

NormalGrammar checked_dgnf(const LoadedGrammar& src, const NormalizeOptions& opts) {
    NormalGrammar G = trim_unreachable(normalize(src.cfe, src.tokens, opts));
    auto v = check_dgnf(G);
    if (!v.empty()) throw NormalizeError(std::string("normalized grammar is not in DGNF: ") + v.front().detail);
    return G;
}

}  // namespace

Toolchain::Toolchain(LoadedGrammar src, const NormalizeOptions& opts)
    : source(std::move(src)),
      type(type_of(source.cfe)),
      grammar(checked_dgnf(source, opts)),
      fused(fuse(source.lexer, grammar)),
      automaton(compile_automaton(fused)),
      dfa(source.lexer),
      parser(grammar) {}

UnfusedOutcome Toolchain::run_unfused(std::string_view input) const {
    LexResult lr;
    return run_unfused(input, lr);
}

UnfusedOutcome Toolchain::run_unfused(std::string_view input, LexResult& lr) const {
    UnfusedOutcome out;
    dfa.lex_into(input, lr);
    if (!lr.ok()) {
        out.lex_error = lr.error->offset;
        return out;
    }
    out.lexed = true;
    out.token_count = lr.tokens.size();
    out.parse = parser.parse(grammar.start, lr.tokens);
    out.consumed = out.parse.remainder == 0 ? 0 : lr.tokens[out.parse.remainder - 1].end;
    return out;
}

std::unique_ptr<Toolchain> build_toolchain(const std::string& grammar_path, const NormalizeOptions& opts) {
    return std::make_unique<Toolchain>(load_grammar(grammar_path), opts);
}

}  // namespace lpfuse
