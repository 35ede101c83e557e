#include "lpfuse/lexer.hpp"

#include <deque>
#include <map>
#include <unordered_map>

namespace lpfuse {

Regex Lexer::skip() const {
    for (const auto& r : rules)
        if (r.action == LexAction::Skip) return r.pattern;
    return Regex::bot();
}

const LexRule* Lexer::rule_for(TokenId t) const {
    for (const auto& r : rules)
        if (r.action == LexAction::Return && r.token == t) return &r;
    return nullptr;
}

Lexer canonicalize_lexer(const Lexer& raw, const CanonicalizeOptions& opts) {
    if (raw.rules.empty()) throw LexerError("lexer has no rules");

    auto label = [&](const LexRule& r) {
        return r.action == LexAction::Skip ? std::string("skip") : raw.tokens.name(r.token);
    };

    // Merge duplicate Return rules and all Skip rules at their first occurrence.
    std::vector<LexRule> merged;
    for (const auto& r : raw.rules) {
        if (is_empty_language(r.pattern))
            throw LexerError("rule " + label(r) + " matches nothing");
        if (r.pattern.nullable())
            throw LexerError("rule " + label(r) + " matches the empty string");
        bool folded = false;
        for (auto& m : merged) {
            bool same = m.action == r.action &&
                        (r.action == LexAction::Skip || m.token == r.token);
            if (same) {
                m.pattern = Regex::alt(m.pattern, r.pattern);
                folded = true;
                break;
            }
        }
        if (!folded) merged.push_back(r);
    }

    Lexer out;
    out.tokens = raw.tokens;
    Regex earlier = Regex::bot();
    for (const auto& r : merged) {
        LexRule nr = r;
        if (!is_empty_language(Regex::conj(r.pattern, earlier)))
            nr.pattern = Regex::conj(r.pattern, Regex::neg(earlier));
        earlier = Regex::alt(earlier, r.pattern);
        if (is_empty_language(nr.pattern)) {
            std::string msg = "rule " + label(r) + " is shadowed by earlier rules";
            if (opts.strict) throw LexerError(msg);
            if (opts.warnings) opts.warnings->push_back(msg);
            continue;
        }
        out.rules.push_back(nr);
    }
    return out;
}

// ---------------------------------------------------------------- reference lexer

namespace {

struct Live {
    Regex re;
    std::size_t rule;
};

}  // namespace

LexResult lex(const Lexer& L, std::string_view s) {
    LexResult res;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::vector<Live> live;
        for (std::size_t i = 0; i < L.rules.size(); ++i) live.push_back({L.rules[i].pattern, i});
        std::size_t best_rule = kNoPos;
        std::size_t best_end = pos;
        std::size_t i = pos;
        while (i < s.size()) {
            unsigned char c = static_cast<unsigned char>(s[i]);
            std::vector<Live> next;
            for (const auto& l : live) {
                Regex d = l.re.deriv(c);
                if (!d.is_bot()) next.push_back({d, l.rule});
            }
            if (next.empty()) break;
            ++i;
            live = std::move(next);
            for (const auto& l : live)
                if (l.re.nullable()) {
                    best_rule = l.rule;
                    best_end = i;
                    break;
                }
        }
        if (best_rule == kNoPos) {
            res.error = LexError{pos};
            return res;
        }
        const LexRule& rule = L.rules[best_rule];
        if (rule.action == LexAction::Return) res.tokens.push_back({rule.token, pos, best_end});
        pos = best_end;
    }
    return res;
}

// ---------------------------------------------------------------- DFA

namespace {

struct DfaKey {
    std::vector<std::pair<std::uint32_t, std::size_t>> items;  // (regex id, rule)
    bool operator<(const DfaKey& o) const { return items < o.items; }
};

}  // namespace

LexerDfa::LexerDfa(const Lexer& L, std::size_t budget) : lexer_(L) {
    using Vec = std::vector<Live>;
    std::map<DfaKey, std::int32_t> index;
    std::vector<Vec> states;
    auto key_of = [](const Vec& v) {
        DfaKey k;
        for (const auto& l : v) k.items.emplace_back(l.re.id(), l.rule);
        return k;
    };
    auto intern = [&](Vec v) -> std::int32_t {
        Vec pruned;
        for (auto& l : v)
            if (!is_empty_language(l.re)) pruned.push_back(l);
        if (pruned.empty()) return kDead;
        DfaKey k = key_of(pruned);
        auto it = index.find(k);
        if (it != index.end()) return it->second;
        if (states.size() >= budget) throw LexerError("lexer automaton exceeds state budget");
        auto id = static_cast<std::int32_t>(states.size());
        index.emplace(std::move(k), id);
        states.push_back(std::move(pruned));
        return id;
    };

    Vec init;
    for (std::size_t i = 0; i < L.rules.size(); ++i) init.push_back({L.rules[i].pattern, i});
    intern(init);

    for (std::size_t s = 0; s < states.size(); ++s) {
        std::vector<Regex> res;
        for (const auto& l : states[s]) res.push_back(l.re);
        auto parts = class_partition(res);
        auto table = class_table(parts);
        std::vector<std::int32_t> targets(parts.size());
        for (std::size_t p = 0; p < parts.size(); ++p) {
            unsigned char c = parts[p].first();
            Vec next;
            for (const auto& l : states[s]) next.push_back({l.re.deriv(c), l.rule});
            targets[p] = intern(std::move(next));
        }
        std::int32_t acc = -1;
        for (const auto& l : states[s])
            if (l.re.nullable()) {
                acc = static_cast<std::int32_t>(l.rule);
                break;
            }
        accept_.push_back(acc);
        for (unsigned c = 0; c < 256; ++c) {
            next_.push_back(targets[table[c]]);
            classes_.push_back(table[c]);
        }
    }
    // the initial state never accepts: patterns are not nullable
}

bool LexerDfa::scan(std::string_view in, std::size_t pos, Lexeme& out, ScanStats* stats) const {
    std::int32_t state = 0;
    std::int32_t best_rule = -1;
    std::size_t best_end = pos;
    std::size_t i = pos;
    const std::size_t n = in.size();
    for (;;) {
        if (i >= n) {
            if (stats) stats->reached_end = true;
            break;
        }
        if (stats) {
            ++stats->bytes_inspected;
            if (stats->record_probe(i, best_rule < 0, &classes_[static_cast<std::size_t>(state) * 256],
                                    best_rule >= 0 ? best_end : i))
                stats->probe_state.insert(stats->probe_state.end(),
                                          {3, state, best_rule, stats->rel(pos), stats->rel(best_end)});
        }
        std::int32_t nx = next_[static_cast<std::size_t>(state) * 256 + static_cast<unsigned char>(in[i])];
        if (nx == kDead) break;
        state = nx;
        ++i;
        if (accept_[static_cast<std::size_t>(state)] >= 0) {
            best_rule = accept_[static_cast<std::size_t>(state)];
            best_end = i;
        }
    }
    if (best_rule < 0) return false;
    const LexRule& r = lexer_.rules[static_cast<std::size_t>(best_rule)];
    out.token = r.action == LexAction::Return ? r.token : kNoToken;
    out.start = pos;
    out.end = best_end;
    return true;
}

namespace {

void lex_with(const LexerDfa& dfa, std::string_view in, LexResult& res, ScanStats* stats) {
    res.tokens.clear();
    res.error.reset();
    std::size_t pos = 0;
    Lexeme lx{};
    while (pos < in.size()) {
        if (!dfa.scan(in, pos, lx, stats)) {
            res.error = LexError{pos};
            return;
        }
        if (lx.token != kNoToken) res.tokens.push_back(lx);
        pos = lx.end;
    }
}

}  // namespace

LexResult LexerDfa::lex(std::string_view in, ScanStats* stats) const {
    LexResult res;
    lex_with(*this, in, res, stats);
    return res;
}

void LexerDfa::lex_into(std::string_view in, LexResult& out) const { lex_with(*this, in, out, nullptr); }

bool LexerDfa::only_skip(std::string_view in, std::size_t pos, ScanStats* stats) const {
    Lexeme lx{};
    const std::size_t from = pos;
    bool seen = stats && stats->probe_hit;
    auto note = [&] {
        if (stats && !seen && stats->probe_hit) stats->probe_state.insert(stats->probe_state.end(), {5, stats->rel(from)});
    };
    while (pos < in.size()) {
        bool ok = scan(in, pos, lx, stats) && lx.token == kNoToken;
        note();
        if (!ok) return false;
        seen = stats && stats->probe_hit;
        pos = lx.end;
    }
    if (stats) stats->reached_end = true;
    return true;
}

void LexerDfa::Cursor::fill() {
    bool seen = stats_ && stats_->probe_hit;
    std::size_t prev_end = started_ && has_ ? cur_.end : 0;
    scan_next();
    if (stats_ && !seen && stats_->probe_hit)
        stats_->probe_state.insert(stats_->probe_state.end(), {4, stats_->rel(prev_end)});
}

void LexerDfa::Cursor::scan_next() {
    if (started_ && has_) {
        pos_ = cur_.end;
        ++index_;
    }
    started_ = true;
    has_ = false;
    while (pos_ < input_.size()) {
        if (!dfa_.scan(input_, pos_, cur_, stats_)) {
            failed_ = true;
            return;
        }
        if (cur_.token != kNoToken) {
            has_ = true;
            return;
        }
        pos_ = cur_.end;
    }
    if (stats_) stats_->reached_end = true;
}

}  // namespace lpfuse
