#include "lpfuse/normalize.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

namespace lpfuse {

std::size_t NormalGrammar::production_count() const {
    std::size_t n = 0;
    for (const auto& ps : prods) n += ps.size();
    return n;
}

NtId NormalGrammar::add_nt(const std::string& name) {
    prods.emplace_back();
    std::string unique = name;
    if (std::find(names.begin(), names.end(), unique) != names.end()) {
        for (int k = 2;; ++k) {
            unique = name + "_" + std::to_string(k);
            if (std::find(names.begin(), names.end(), unique) == names.end()) break;
        }
    }
    names.push_back(unique);
    return static_cast<NtId>(prods.size() - 1);
}

NtId NormalGrammar::nt(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<NtId>(i);
    throw NormalizeError("no nonterminal named " + name);
}

namespace {

int head_rank(const Production& p) {
    return p.kind == ProdKind::Tok ? 0 : p.kind == ProdKind::Var ? 1 : 2;
}

bool prod_less(const Production& a, const Production& b) {
    if (head_rank(a) != head_rank(b)) return head_rank(a) < head_rank(b);
    if (a.token != b.token) return a.token < b.token;
    if (a.var != b.var) return a.var < b.var;
    return a.tail < b.tail;
}

void canonical_order(std::vector<Production>& ps) {
    std::stable_sort(ps.begin(), ps.end(), prod_less);
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
}

class Normalizer {
public:
    Normalizer(NormalGrammar& G, const NormalizeOptions& o) : G_(G), opts_(o) {}

    NtId run(const Cfe& g) {
        switch (g->kind) {
            case CfeKind::Eps: {
                NtId n = fresh();
                G_.prods[n] = {Production::eps()};
                return n;
            }
            case CfeKind::Tok: {
                NtId n = fresh();
                G_.prods[n] = {Production::tok(g->token)};
                return n;
            }
            case CfeKind::Bot: return fresh();
            case CfeKind::Var: {
                NtId n = fresh();
                G_.prods[n] = {Production::var_head(g->name)};
                return n;
            }
            case CfeKind::Seq: {
                NtId n1 = run(g->left);
                NtId n2;
                auto bound = scope_.find(g->right->kind == CfeKind::Var ? g->right->name : std::string());
                if (opts_.share_tail_vars && g->right->kind == CfeKind::Var && bound != scope_.end())
                    n2 = bound->second;
                else
                    n2 = run(g->right);
                NtId n = fresh();
                std::vector<Production> out;
                for (const auto& p : G_.prods[n1]) {
                    if (p.kind == ProdKind::Eps)
                        throw NormalizeError("sequence with a nullable left operand reached normalization");
                    Production q = p;
                    q.tail.push_back(n2);
                    out.push_back(std::move(q));
                }
                canonical_order(out);
                G_.prods[n] = std::move(out);
                return n;
            }
            case CfeKind::Alt: {
                NtId n1 = run(g->left);
                NtId n2 = run(g->right);
                NtId n = fresh();
                std::vector<Production> out = G_.prods[n1];
                out.insert(out.end(), G_.prods[n2].begin(), G_.prods[n2].end());
                canonical_order(out);
                G_.prods[n] = std::move(out);
                return n;
            }
            case CfeKind::Fix: {
                const std::string& alpha = g->name;
                NtId a = G_.add_nt(alpha);
                G_.var_nts[alpha] = a;
                auto saved = scope_.find(alpha) != scope_.end()
                                 ? std::optional<NtId>(scope_[alpha])
                                 : std::nullopt;
                scope_[alpha] = a;
                NtId watermark = static_cast<NtId>(G_.prods.size());
                NtId body = run(g->left);

                // (1) alpha takes the body's start productions
                G_.prods[a] = G_.prods[body];
                const std::vector<Production> alpha_prods = G_.prods[a];

                // (2) substitute alpha-headed productions; (3) drop what remains
                auto rewrite = [&](NtId m, bool substitute) {
                    std::vector<Production> out;
                    for (const auto& p : G_.prods[m]) {
                        if (p.kind != ProdKind::Var || p.var != alpha) {
                            out.push_back(p);
                            continue;
                        }
                        if (!substitute) continue;
                        for (const auto& q : alpha_prods) {
                            Production r = q;
                            r.tail.insert(r.tail.end(), p.tail.begin(), p.tail.end());
                            out.push_back(std::move(r));
                        }
                    }
                    canonical_order(out);
                    G_.prods[m] = std::move(out);
                };
                for (NtId m = watermark; m < G_.prods.size(); ++m) rewrite(m, true);
                rewrite(a, false);

                if (saved) scope_[alpha] = *saved;
                else scope_.erase(alpha);
                return a;
            }
        }
        return fresh();
    }

private:
    NtId fresh() { return G_.add_nt("n" + std::to_string(++counter_)); }

    NormalGrammar& G_;
    NormalizeOptions opts_;
    std::map<std::string, NtId> scope_;
    unsigned counter_ = 0;
};

}  // namespace

NormalGrammar normalize(const Cfe& g, const TokenNames& tokens, const NormalizeOptions& opts) {
    NormalGrammar G;
    G.tokens = tokens;
    Normalizer norm(G, opts);
    G.start = norm.run(g);
    for (std::size_t n = 0; n < G.prods.size(); ++n)
        for (const auto& p : G.prods[n])
            if (p.kind == ProdKind::Var)
                throw NormalizeError("InternalFormLeak: production " + G.names[n] + " -> " + p.var +
                                     " survived normalization");
    return G;
}

NormalGrammar trim_unreachable(const NormalGrammar& G) {
    std::vector<bool> seen(G.prods.size(), false);
    std::deque<NtId> work{G.start};
    seen[G.start] = true;
    while (!work.empty()) {
        NtId n = work.front();
        work.pop_front();
        for (const auto& p : G.prods[n])
            for (NtId m : p.tail)
                if (!seen[m]) {
                    seen[m] = true;
                    work.push_back(m);
                }
    }
    std::vector<NtId> remap(G.prods.size(), 0);
    NormalGrammar out;
    out.tokens = G.tokens;
    for (NtId n = 0; n < G.prods.size(); ++n)
        if (seen[n]) {
            remap[n] = static_cast<NtId>(out.prods.size());
            out.prods.emplace_back();
            out.names.push_back(G.names[n]);
        }
    for (NtId n = 0; n < G.prods.size(); ++n) {
        if (!seen[n]) continue;
        auto& dst = out.prods[remap[n]];
        for (const auto& p : G.prods[n]) {
            Production q = p;
            for (auto& m : q.tail) m = remap[m];
            dst.push_back(std::move(q));
        }
    }
    for (const auto& [v, n] : G.var_nts)
        if (seen[n]) out.var_nts[v] = remap[n];
    out.start = remap[G.start];
    return out;
}

const char* violation_kind_name(ViolationKind k) {
    switch (k) {
        case ViolationKind::InternalForm: return "InternalForm";
        case ViolationKind::ShapeViolation: return "ShapeViolation";
        case ViolationKind::Determinism: return "Determinism";
        case ViolationKind::GuardedEpsilon: return "GuardedEpsilon";
    }
    return "?";
}

TokenSet first_tokens(const NormalGrammar& G, NtId n) {
    TokenSet s;
    for (const auto& p : G.prods[n])
        if (p.kind == ProdKind::Tok) s.insert(p.token);
    return s;
}

std::vector<Violation> check_dgnf(const NormalGrammar& G) {
    std::vector<Violation> out;
    const std::size_t N = G.prods.size();

    for (NtId n = 0; n < N; ++n) {
        std::map<TokenId, std::size_t> heads;
        for (std::size_t i = 0; i < G.prods[n].size(); ++i) {
            const auto& p = G.prods[n][i];
            if (p.kind == ProdKind::Var) {
                out.push_back({ViolationKind::InternalForm, n, 0, kNoToken,
                               G.names[n] + " has a production headed by variable " + p.var});
                continue;
            }
            if (p.kind != ProdKind::Tok) continue;
            auto [it, fresh] = heads.emplace(p.token, i);
            if (!fresh)
                out.push_back({ViolationKind::Determinism, n, 0, p.token,
                               G.names[n] + " has two productions starting with " +
                                   G.tokens.name(p.token)});
        }
    }

    // Reachable nonterminals.
    std::vector<bool> reach(N, false);
    std::deque<NtId> work{G.start};
    if (N) reach[G.start] = true;
    while (!work.empty()) {
        NtId n = work.front();
        work.pop_front();
        for (const auto& p : G.prods[n])
            for (NtId m : p.tail)
                if (!reach[m]) {
                    reach[m] = true;
                    work.push_back(m);
                }
    }

    std::vector<bool> has_eps(N, false);
    for (NtId n = 0; n < N; ++n)
        for (const auto& p : G.prods[n])
            if (p.kind == ProdKind::Eps) has_eps[n] = true;

    // Adjacency over-approximation: (a, b) when b may directly follow a.
    std::vector<std::vector<bool>> adj(N, std::vector<bool>(N, false));
    std::deque<std::pair<NtId, NtId>> pending;
    auto add = [&](NtId a, NtId b) {
        if (!adj[a][b]) {
            adj[a][b] = true;
            pending.emplace_back(a, b);
        }
    };
    for (NtId n = 0; n < N; ++n) {
        if (!reach[n]) continue;
        for (const auto& p : G.prods[n])
            for (std::size_t i = 0; i + 1 < p.tail.size(); ++i) add(p.tail[i], p.tail[i + 1]);
    }
    while (!pending.empty()) {
        auto [a, b] = pending.front();
        pending.pop_front();
        for (const auto& p : G.prods[a])
            if (p.kind != ProdKind::Eps && !p.tail.empty()) add(p.tail.back(), b);
        if (has_eps[b])
            for (NtId c = 0; c < N; ++c)
                if (adj[b][c]) add(a, c);
        if (has_eps[a])
            for (NtId x = 0; x < N; ++x)
                if (adj[x][a]) add(x, b);
    }

    for (NtId a = 0; a < N; ++a) {
        if (!has_eps[a]) continue;
        TokenSet fa = first_tokens(G, a);
        for (NtId b = 0; b < N; ++b) {
            if (!adj[a][b]) continue;
            TokenSet clash = fa & first_tokens(G, b);
            for (TokenId t : clash.members())
                out.push_back({ViolationKind::GuardedEpsilon, a, b, t,
                               G.names[a] + " may derive the empty word before " + G.names[b] +
                                   " and both can start with " + G.tokens.name(t)});
        }
    }
    return out;
}

std::vector<std::size_t> min_lengths(const NormalGrammar& G) {
    const std::size_t N = G.prods.size();
    std::vector<std::size_t> len(N, kNoPos);
    bool changed = true;
    while (changed) {
        changed = false;
        for (NtId n = 0; n < N; ++n)
            for (const auto& p : G.prods[n]) {
                if (p.kind == ProdKind::Var) continue;
                std::size_t l = p.kind == ProdKind::Tok ? 1 : 0;
                for (NtId m : p.tail) {
                    if (len[m] == kNoPos) { l = kNoPos; break; }
                    l += len[m];
                }
                if (l < len[n]) {
                    len[n] = l;
                    changed = true;
                }
            }
    }
    return len;
}

WordSet expand_enumerate(const NormalGrammar& G, NtId n, std::size_t max_len,
                         std::map<Word, std::size_t>* derivations) {
    const auto minlen = min_lengths(G);
    WordSet out;
    std::map<Word, std::size_t> counts;
    Word prefix;
    std::vector<NtId> stack{n};
    std::size_t pending = minlen[n];
    if (pending == kNoPos || pending > max_len) return out;

    // Leftmost expansion; the stack holds the remaining sentential form reversed
    // and `pending` is the least number of tokens it still has to produce.
    std::function<void()> go = [&]() {
        if (stack.empty()) {
            out.insert(prefix);
            ++counts[prefix];
            return;
        }
        NtId top = stack.back();
        stack.pop_back();
        pending -= minlen[top];
        for (const auto& p : G.prods[top]) {
            if (p.kind == ProdKind::Var) continue;
            std::size_t tail_min = 0;
            bool dead = false;
            for (NtId m : p.tail) {
                if (minlen[m] == kNoPos) { dead = true; break; }
                tail_min += minlen[m];
            }
            std::size_t head = p.kind == ProdKind::Tok ? 1 : 0;
            if (dead || prefix.size() + head + pending + tail_min > max_len) continue;
            if (head) prefix.push_back(p.token);
            for (auto it = p.tail.rbegin(); it != p.tail.rend(); ++it) stack.push_back(*it);
            pending += tail_min;
            go();
            pending -= tail_min;
            stack.resize(stack.size() - p.tail.size());
            if (head) prefix.pop_back();
        }
        pending += minlen[top];
        stack.push_back(top);
    };
    go();
    if (derivations) *derivations = std::move(counts);
    return out;
}

std::string dump(const NormalGrammar& G) {
    std::ostringstream os;
    auto line = [&](NtId n) {
        if (G.prods[n].empty()) {
            os << G.names[n] << " -> <none>\n";
            return;
        }
        for (const auto& p : G.prods[n]) {
            os << G.names[n] << " ->";
            if (p.kind == ProdKind::Eps) os << " <eps>";
            else if (p.kind == ProdKind::Tok) os << ' ' << G.tokens.name(p.token);
            else os << " @" << p.var;
            for (NtId m : p.tail) os << ' ' << G.names[m];
            os << '\n';
        }
    };
    line(G.start);
    for (NtId n = 0; n < G.prods.size(); ++n)
        if (n != G.start) line(n);
    return os.str();
}

namespace {

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\r') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

ParsedGrammarText parse_grammar_text(std::string_view text, TokenNames tokens) {
    struct Line {
        std::string lhs;
        std::vector<std::string> rhs;
    };
    std::vector<Line> lines;
    std::istringstream is{std::string(text)};
    std::string raw;
    while (std::getline(is, raw)) {
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        auto words = split_ws(raw);
        if (words.empty()) continue;
        if (words.size() < 2 || (words[1] != "->" && words[1] != "::="))
            throw NormalizeError("malformed grammar line: " + raw);
        std::vector<std::string> alt;
        for (std::size_t i = 2; i <= words.size(); ++i) {
            if (i == words.size() || words[i] == "|") {
                lines.push_back({words[0], alt});
                alt.clear();
            } else {
                alt.push_back(words[i]);
            }
        }
    }
    ParsedGrammarText res;
    NormalGrammar& G = res.grammar;
    G.tokens = std::move(tokens);
    std::map<std::string, NtId> nts;
    for (const auto& l : lines)
        if (!nts.count(l.lhs)) nts[l.lhs] = G.add_nt(l.lhs);
    if (lines.empty()) throw NormalizeError("empty grammar");
    G.start = nts[lines.front().lhs];
    for (const auto& l : lines) {
        NtId n = nts[l.lhs];
        std::vector<std::string> rhs = l.rhs;
        if (rhs.size() == 1 && (rhs[0] == "<eps>" || rhs[0] == "eps")) rhs.clear();
        if (rhs.size() == 1 && rhs[0] == "<none>") continue;
        if (rhs.empty()) {
            G.prods[n].push_back(Production::eps());
            continue;
        }
        if (nts.count(rhs[0])) {
            res.shape_errors.push_back({ViolationKind::ShapeViolation, n, 0, kNoToken,
                                        l.lhs + " has a production starting with nonterminal " + rhs[0]});
            continue;
        }
        Production p = Production::tok(G.tokens.intern(rhs[0]));
        bool ok = true;
        for (std::size_t i = 1; i < rhs.size(); ++i) {
            auto it = nts.find(rhs[i]);
            if (it == nts.end()) {
                res.shape_errors.push_back({ViolationKind::ShapeViolation, n, 0, G.tokens.intern(rhs[i]),
                                            l.lhs + " has terminal " + rhs[i] + " after the head"});
                ok = false;
                break;
            }
            p.tail.push_back(it->second);
        }
        if (ok) G.prods[n].push_back(std::move(p));
    }
    return res;
}

bool isomorphic(const NormalGrammar& a, const NormalGrammar& b) {
    if (a.prods.size() != b.prods.size()) return false;
    std::vector<long> fwd(a.prods.size(), -1), bwd(b.prods.size(), -1);
    std::deque<std::pair<NtId, NtId>> work{{a.start, b.start}};
    fwd[a.start] = b.start;
    bwd[b.start] = a.start;
    auto key = [](const NormalGrammar& g, const Production& p) {
        return std::make_tuple(static_cast<int>(p.kind),
                               p.kind == ProdKind::Tok ? g.tokens.name(p.token) : p.var, p.tail.size());
    };
    while (!work.empty()) {
        auto [x, y] = work.front();
        work.pop_front();
        const auto& px = a.prods[x];
        const auto& py = b.prods[y];
        if (px.size() != py.size()) return false;
        // DGNF heads identify productions; match by (kind, head, arity).
        std::vector<bool> used(py.size(), false);
        for (const auto& p : px) {
            bool matched = false;
            for (std::size_t j = 0; j < py.size() && !matched; ++j) {
                if (used[j] || key(a, p) != key(b, py[j])) continue;
                bool consistent = true;
                for (std::size_t k = 0; k < p.tail.size() && consistent; ++k) {
                    NtId u = p.tail[k], v = py[j].tail[k];
                    if ((fwd[u] >= 0 && fwd[u] != static_cast<long>(v)) ||
                        (bwd[v] >= 0 && bwd[v] != static_cast<long>(u)))
                        consistent = false;
                }
                if (!consistent) continue;
                used[j] = true;
                matched = true;
                for (std::size_t k = 0; k < p.tail.size(); ++k) {
                    NtId u = p.tail[k], v = py[j].tail[k];
                    if (fwd[u] < 0) {
                        fwd[u] = v;
                        bwd[v] = u;
                        work.emplace_back(u, v);
                    }
                }
            }
            if (!matched) return false;
        }
    }
    // nonterminals unreachable from start must also be accounted for
    for (std::size_t i = 0; i < fwd.size(); ++i)
        if (fwd[i] < 0) return false;
    return true;
}

}  // namespace lpfuse
