#include "lpfuse/token_parser.hpp"

namespace lpfuse {

TokenParser::TokenParser(const NormalGrammar& G) : G_(G) {
    std::size_t max_tok = G.tokens.names.size();
    for (const auto& ps : G.prods)
        for (const auto& p : ps)
            if (p.kind == ProdKind::Tok && p.token + 1 > max_tok) max_tok = p.token + 1;
    ntok_ = max_tok;
    table_.assign(G.prods.size() * ntok_, -1);
    eps_.assign(G.prods.size(), 0);
    for (NtId n = 0; n < G.prods.size(); ++n)
        for (const auto& p : G.prods[n]) {
            if (p.kind == ProdKind::Eps) {
                eps_[n] = 1;
                continue;
            }
            if (p.kind != ProdKind::Tok) continue;
            auto slot = static_cast<std::int32_t>(tail_begin_.size());
            tail_begin_.push_back(static_cast<std::uint32_t>(tails_.size()));
            tails_.insert(tails_.end(), p.tail.rbegin(), p.tail.rend());
            tail_end_.push_back(static_cast<std::uint32_t>(tails_.size()));
            auto& cell = table_[static_cast<std::size_t>(n) * ntok_ + p.token];
            if (cell < 0) cell = slot;  // first production wins if the grammar is not deterministic
        }
}

TokenParseResult TokenParser::failure(std::size_t idx, NtId n, std::size_t steps) const {
    TokenParseResult r;
    r.remainder = idx;
    r.steps = steps;
    r.fail = ParseFail{idx, n, first_tokens(G_, n)};
    return r;
}

namespace {

struct VectorSource {
    const std::vector<Lexeme>& ts;
    std::size_t i = 0;
    const Lexeme* peek() const { return i < ts.size() ? &ts[i] : nullptr; }
    void advance() { ++i; }
};

}  // namespace

TokenParseResult TokenParser::parse(NtId start, const std::vector<Lexeme>& ts) const {
    VectorSource src{ts};
    return parse_source(start, src);
}

TokenParseResult parse_tokens(const NormalGrammar& G, NtId start, const TokenStream& ts) {
    return TokenParser(G).parse(start, ts.tokens);
}

}  // namespace lpfuse
