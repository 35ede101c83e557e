#include "lpfuse/fusion.hpp"

#include <sstream>

namespace lpfuse {

std::size_t FusedGrammar::production_count() const {
    std::size_t n = 0;
    for (const auto& ps : prods) n += ps.size();
    return n;
}

bool FusedGrammar::has_lookahead(NtId n) const {
    for (const auto& p : prods[n])
        if (p.kind == FusedKind::Lookahead) return true;
    return false;
}

MissingTokenRule::MissingTokenRule(TokenId t, const std::string& name)
    : std::runtime_error("token " + name + " has no lexer rule"), token(t) {}

FusedGrammar fuse(const Lexer& L, const NormalGrammar& G, NtId start) {
    FusedGrammar F;
    F.start = start;
    F.names = G.names;
    F.skip = L.skip();
    F.prods.resize(G.prods.size());
    for (NtId n = 0; n < G.prods.size(); ++n) {
        auto& out = F.prods[n];
        bool has_eps = false;
        for (const auto& p : G.prods[n]) {
            if (p.kind == ProdKind::Eps) {
                has_eps = true;
                continue;
            }
            if (p.kind == ProdKind::Var)
                throw std::logic_error("fusion requires a grammar without variable-headed productions");
            const LexRule* rule = L.rule_for(p.token);
            if (rule == nullptr) throw MissingTokenRule(p.token, G.tokens.name(p.token));
            out.push_back({FusedKind::Match, rule->pattern, p.tail, p.token});
        }
        if (!F.skip.is_bot()) out.push_back({FusedKind::Match, F.skip, {n}, kNoToken});
        if (has_eps) {
            std::vector<Regex> rs;
            for (const auto& q : out) rs.push_back(q.regex);
            out.push_back({FusedKind::Lookahead, Regex::neg(Regex::alt(rs)), {}, kNoToken});
        }
    }
    return F;
}

std::string dump(const FusedGrammar& F) {
    std::ostringstream os;
    auto line = [&](NtId n) {
        if (F.prods[n].empty()) {
            os << F.names[n] << " -> <none>\n";
            return;
        }
        for (const auto& p : F.prods[n]) {
            os << F.names[n] << " -> ";
            if (p.kind == FusedKind::Lookahead) {
                os << "?" << p.regex.to_string() << '\n';
                continue;
            }
            os << p.regex.to_string();
            for (NtId m : p.tail) os << ' ' << F.names[m];
            os << '\n';
        }
    };
    line(F.start);
    for (NtId n = 0; n < F.prods.size(); ++n)
        if (n != F.start) line(n);
    return os.str();
}

}  // namespace lpfuse
