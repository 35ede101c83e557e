#include "lpfuse/cfe.hpp"

#include <algorithm>
#include <atomic>
#include <optional>

namespace lpfuse {

namespace cfe {

namespace {

Cfe make(CfeKind k) {
    auto n = std::make_shared<CfeNode>();
    n->kind = k;
    return n;
}

}  // namespace

Cfe bot() {
    static const Cfe b = make(CfeKind::Bot);
    return b;
}

Cfe eps() {
    static const Cfe e = make(CfeKind::Eps);
    return e;
}

Cfe tok(TokenId t) {
    auto n = std::make_shared<CfeNode>();
    n->kind = CfeKind::Tok;
    n->token = t;
    return n;
}

Cfe var(const std::string& name) {
    auto n = std::make_shared<CfeNode>();
    n->kind = CfeKind::Var;
    n->name = name;
    return n;
}

Cfe seq(Cfe a, Cfe b) {
    auto n = std::make_shared<CfeNode>();
    n->kind = CfeKind::Seq;
    n->left = std::move(a);
    n->right = std::move(b);
    return n;
}

Cfe alt(Cfe a, Cfe b) {
    auto n = std::make_shared<CfeNode>();
    n->kind = CfeKind::Alt;
    n->left = std::move(a);
    n->right = std::move(b);
    return n;
}

Cfe fix(const std::string& name, Cfe body) {
    auto n = std::make_shared<CfeNode>();
    n->kind = CfeKind::Fix;
    n->name = name;
    n->left = std::move(body);
    return n;
}

std::string fresh_name(const std::string& prefix) {
    static std::atomic<unsigned> counter{0};
    return prefix + "%" + std::to_string(counter.fetch_add(1));
}

Cfe fix(const std::function<Cfe(Cfe)>& f) {
    std::string x = fresh_name("fix");
    return fix(x, f(var(x)));
}

Cfe star(Cfe e) {
    std::string x = fresh_name("star");
    return fix(x, alt(eps(), seq(std::move(e), var(x))));
}

}  // namespace cfe

// ---------------------------------------------------------------- types

CfeType seq_type(const CfeType& a, const CfeType& b) {
    CfeType t;
    t.null = a.null && b.null;
    t.first = a.null ? (a.first | b.first) : a.first;
    t.flast = b.null ? (b.flast | b.first | a.flast) : b.flast;
    return t;
}

CfeType alt_type(const CfeType& a, const CfeType& b) {
    return {a.null || b.null, a.first | b.first, a.flast | b.flast};
}

bool separable(const CfeType& a, const CfeType& b) {
    return !a.null && (a.flast & b.first).empty();
}

bool apart(const CfeType& a, const CfeType& b) {
    return (a.first & b.first).empty() && !(a.null && b.null);
}

const char* type_error_kind_name(TypeErrorKind k) {
    switch (k) {
        case TypeErrorKind::ApartnessViolation: return "ApartnessViolation";
        case TypeErrorKind::SeparabilityViolation: return "SeparabilityViolation";
        case TypeErrorKind::GuardedVarUse: return "GuardedVarUse";
        case TypeErrorKind::UnboundVar: return "UnboundVar";
    }
    return "?";
}

namespace {

std::string path_text(const std::vector<int>& path) {
    std::string s = "[";
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(path[i]);
    }
    return s + "]";
}

}  // namespace

TypeError::TypeError(TypeErrorKind k, std::vector<int> p, std::string detail, TokenSet toks,
                     std::string v, bool nl)
    : std::runtime_error(std::string(type_error_kind_name(k)) + " at " + path_text(p) + ": " + detail),
      kind(k), path(std::move(p)), tokens(toks), var(std::move(v)), nullable_left(nl) {}

namespace {

class Typer {
public:
    explicit Typer(TypeStats* stats) : stats_(stats) {}

    CfeType infer(const Cfe& g, const TypeEnv& gamma, const TypeEnv& delta, bool checked) {
        switch (g->kind) {
            case CfeKind::Bot: return CfeType::bot();
            case CfeKind::Eps: return CfeType::eps();
            case CfeKind::Tok: return CfeType::tok(g->token);
            case CfeKind::Var: {
                auto it = gamma.find(g->name);
                if (it != gamma.end()) return it->second;
                if (delta.count(g->name))
                    throw TypeError(TypeErrorKind::GuardedVarUse, path_,
                                    "variable " + g->name + " is used in a guarded position", {},
                                    g->name);
                throw TypeError(TypeErrorKind::UnboundVar, path_, "unbound variable " + g->name, {},
                                g->name);
            }
            case CfeKind::Seq: {
                path_.push_back(0);
                CfeType a = infer(g->left, gamma, delta, checked);
                path_.back() = 1;
                TypeEnv joined = gamma;
                for (const auto& [k, v] : delta) joined[k] = v;
                CfeType b = infer(g->right, joined, {}, checked);
                path_.pop_back();
                if (checked && !separable(a, b)) {
                    if (a.null)
                        throw TypeError(TypeErrorKind::SeparabilityViolation, path_,
                                        "left operand of a sequence is nullable", {}, {}, true);
                    throw TypeError(TypeErrorKind::SeparabilityViolation, path_,
                                    "tokens may both end the left operand and start the right",
                                    a.flast & b.first);
                }
                return seq_type(a, b);
            }
            case CfeKind::Alt: {
                path_.push_back(0);
                CfeType a = infer(g->left, gamma, delta, checked);
                path_.back() = 1;
                CfeType b = infer(g->right, gamma, delta, checked);
                path_.pop_back();
                if (checked && !apart(a, b)) {
                    if (a.null && b.null)
                        throw TypeError(TypeErrorKind::ApartnessViolation, path_,
                                        "both alternatives are nullable", a.first & b.first);
                    throw TypeError(TypeErrorKind::ApartnessViolation, path_,
                                    "alternatives share first tokens", a.first & b.first);
                }
                return alt_type(a, b);
            }
            case CfeKind::Fix: {
                TypeEnv g2 = gamma;
                g2.erase(g->name);
                TypeEnv d2 = delta;
                CfeType tau = CfeType::bot();
                std::size_t iters = 0;
                path_.push_back(0);
                for (;;) {
                    d2[g->name] = tau;
                    CfeType next = infer(g->left, g2, d2, false);
                    ++iters;
                    if (next == tau) break;
                    tau = next;
                }
                if (checked) {
                    d2[g->name] = tau;
                    infer(g->left, g2, d2, true);
                }
                path_.pop_back();
                if (stats_ && checked) {
                    ++stats_->fix_nodes;
                    stats_->max_fix_iterations = std::max(stats_->max_fix_iterations, iters);
                }
                return tau;
            }
        }
        return CfeType::bot();
    }

private:
    TypeStats* stats_;
    std::vector<int> path_;
};

}  // namespace

CfeType type_of(const TypeEnv& gamma, const TypeEnv& delta, const Cfe& g, TypeStats* stats) {
    Typer t(stats);
    return t.infer(g, gamma, delta, true);
}

// ---------------------------------------------------------------- denotation

namespace {

class Denoter {
public:
    explicit Denoter(std::size_t max_len) : max_(max_len) {}

    WordSet eval(const Cfe& g, std::map<std::string, WordSet>& env) {
        switch (g->kind) {
            case CfeKind::Bot: return {};
            case CfeKind::Eps: return {Word{}};
            case CfeKind::Tok:
                if (max_ == 0) return {};
                return {Word{g->token}};
            case CfeKind::Var: {
                auto it = env.find(g->name);
                return it == env.end() ? WordSet{} : it->second;
            }
            case CfeKind::Seq: {
                WordSet a = eval(g->left, env);
                if (a.empty()) return {};
                WordSet b = eval(g->right, env);
                std::vector<std::vector<const Word*>> by_len(max_ + 1);
                for (const auto& w : b) by_len[w.size()].push_back(&w);
                WordSet out;
                for (const auto& w1 : a)
                    for (std::size_t l = 0; l + w1.size() <= max_; ++l)
                        for (const Word* w2 : by_len[l]) {
                            Word w = w1;
                            w.insert(w.end(), w2->begin(), w2->end());
                            out.insert(std::move(w));
                        }
                return out;
            }
            case CfeKind::Alt: {
                WordSet a = eval(g->left, env);
                WordSet b = eval(g->right, env);
                a.insert(b.begin(), b.end());
                return a;
            }
            case CfeKind::Fix: {
                std::optional<WordSet> saved;
                auto it = env.find(g->name);
                if (it != env.end()) saved = it->second;
                WordSet cur;
                for (;;) {
                    env[g->name] = cur;
                    WordSet next = eval(g->left, env);
                    if (next == cur) break;
                    cur = std::move(next);
                }
                if (saved) env[g->name] = *saved;
                else env.erase(g->name);
                return cur;
            }
        }
        return {};
    }

private:
    std::size_t max_;
};

}  // namespace

WordSet denote_enumerate(const Cfe& g, const std::map<std::string, WordSet>& env, std::size_t max_len) {
    auto e = env;
    return Denoter(max_len).eval(g, e);
}

// ---------------------------------------------------------------- utilities

namespace {

void print(const Cfe& g, const TokenNames& names, int ctx, std::string& out) {
    // precedence: Alt 0, Seq 1, atom 2; Fix extends as far right as possible
    auto open = [&](int p) { if (p < ctx) out += "("; };
    auto close = [&](int p) { if (p < ctx) out += ")"; };
    switch (g->kind) {
        case CfeKind::Bot: out += "bot"; break;
        case CfeKind::Eps: out += "eps"; break;
        case CfeKind::Tok: out += names.name(g->token); break;
        case CfeKind::Var: out += g->name; break;
        case CfeKind::Seq:
            open(1);
            print(g->left, names, 1, out);
            out += " . ";
            print(g->right, names, 2, out);
            close(1);
            break;
        case CfeKind::Alt:
            open(0);
            print(g->left, names, 0, out);
            out += " | ";
            print(g->right, names, 1, out);
            close(0);
            break;
        case CfeKind::Fix:
            if (ctx > 0) out += "(";
            out += "mu " + g->name + ". ";
            print(g->left, names, 0, out);
            if (ctx > 0) out += ")";
            break;
    }
}

bool alpha_eq(const Cfe& a, const Cfe& b, std::vector<std::pair<std::string, std::string>>& bound) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case CfeKind::Bot:
        case CfeKind::Eps: return true;
        case CfeKind::Tok: return a->token == b->token;
        case CfeKind::Var:
            for (auto it = bound.rbegin(); it != bound.rend(); ++it) {
                bool l = it->first == a->name, r = it->second == b->name;
                if (l || r) return l && r;
            }
            return a->name == b->name;
        case CfeKind::Seq:
        case CfeKind::Alt:
            return alpha_eq(a->left, b->left, bound) && alpha_eq(a->right, b->right, bound);
        case CfeKind::Fix: {
            bound.emplace_back(a->name, b->name);
            bool ok = alpha_eq(a->left, b->left, bound);
            bound.pop_back();
            return ok;
        }
    }
    return false;
}

void collect_free(const Cfe& g, std::vector<std::string>& bound, std::set<std::string>& out) {
    switch (g->kind) {
        case CfeKind::Var:
            if (std::find(bound.begin(), bound.end(), g->name) == bound.end()) out.insert(g->name);
            break;
        case CfeKind::Seq:
        case CfeKind::Alt:
            collect_free(g->left, bound, out);
            collect_free(g->right, bound, out);
            break;
        case CfeKind::Fix:
            bound.push_back(g->name);
            collect_free(g->left, bound, out);
            bound.pop_back();
            break;
        default: break;
    }
}

}  // namespace

std::string to_string(const Cfe& g, const TokenNames& names) {
    std::string out;
    print(g, names, 0, out);
    return out;
}

std::size_t node_count(const Cfe& g) {
    switch (g->kind) {
        case CfeKind::Seq:
        case CfeKind::Alt: return 1 + node_count(g->left) + node_count(g->right);
        case CfeKind::Fix: return 1 + node_count(g->left);
        default: return 1;
    }
}

bool alpha_equivalent(const Cfe& a, const Cfe& b) {
    std::vector<std::pair<std::string, std::string>> bound;
    return alpha_eq(a, b, bound);
}

std::set<std::string> free_vars(const Cfe& g) {
    std::vector<std::string> bound;
    std::set<std::string> out;
    collect_free(g, bound, out);
    return out;
}

}  // namespace lpfuse
