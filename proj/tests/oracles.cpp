#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace oracle {

// ---------------------------------------------------------------- naive regex matching

namespace {

class NaiveMatcher {
public:
    explicit NaiveMatcher(std::string_view w) : w_(w) {}

    bool match(const Regex& r, std::size_t i, std::size_t j) {
        std::uint64_t key = (std::uint64_t(r.id()) << 24) | (std::uint64_t(i) << 12) | j;
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        bool v = compute(r, i, j);
        memo_[key] = v;
        return v;
    }

private:
    bool compute(const Regex& r, std::size_t i, std::size_t j) {
        const auto& k = r.children();
        switch (r.kind()) {
            case RegexKind::Bot: return false;
            case RegexKind::Eps: return i == j;
            case RegexKind::Class: return j == i + 1 && r.bytes().contains(static_cast<unsigned char>(w_[i]));
            case RegexKind::Seq:
                for (std::size_t m = i; m <= j; ++m)
                    if (match(k[0], i, m) && match(k[1], m, j)) return true;
                return false;
            case RegexKind::Alt:
                for (const auto& c : k)
                    if (match(c, i, j)) return true;
                return false;
            case RegexKind::And:
                for (const auto& c : k)
                    if (!match(c, i, j)) return false;
                return true;
            case RegexKind::Not: return !match(k[0], i, j);
            case RegexKind::Star:
                if (i == j) return true;
                for (std::size_t m = i + 1; m <= j; ++m)
                    if (match(k[0], i, m) && match(r, m, j)) return true;
                return false;
        }
        return false;
    }

    std::string_view w_;
    std::unordered_map<std::uint64_t, bool> memo_;
};

}  // namespace

bool naive_match(const Regex& r, std::string_view w) {
    NaiveMatcher m(w);
    return m.match(r, 0, w.size());
}

Regex random_regex(std::mt19937_64& rng, int depth, const std::vector<unsigned char>& alphabet) {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    auto leaf = [&]() {
        switch (pick(4)) {
            case 0: return Regex::eps();
            case 1: {
                ByteSet s;
                for (unsigned char c : alphabet)
                    if (pick(2)) s.insert(c);
                return s.empty() ? Regex::bot() : Regex::byte_class(s);
            }
            default: return Regex::byte(alphabet[static_cast<std::size_t>(pick(static_cast<int>(alphabet.size())))]);
        }
    };
    if (depth <= 0 || pick(5) == 0) return leaf();
    switch (pick(6)) {
        case 0: return Regex::seq(random_regex(rng, depth - 1, alphabet), random_regex(rng, depth - 1, alphabet));
        case 1: return Regex::alt(random_regex(rng, depth - 1, alphabet), random_regex(rng, depth - 1, alphabet));
        case 2: return Regex::star(random_regex(rng, depth - 1, alphabet));
        case 3: return Regex::conj(random_regex(rng, depth - 1, alphabet), random_regex(rng, depth - 1, alphabet));
        case 4: return Regex::neg(random_regex(rng, depth - 1, alphabet));
        default: return Regex::seq(random_regex(rng, depth - 1, alphabet), random_regex(rng, depth - 1, alphabet));
    }
}

std::vector<std::string> words_of_length(const std::vector<unsigned char>& alphabet, std::size_t n) {
    std::vector<std::string> out{""};
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<std::string> next;
        for (const auto& w : out)
            for (unsigned char c : alphabet) next.push_back(w + static_cast<char>(c));
        out.swap(next);
    }
    return out;
}

// ---------------------------------------------------------------- brute-force lexing

BruteLex brute_lex(const Lexer& L, std::string_view input) {
    BruteLex out;
    std::size_t pos = 0;
    while (pos < input.size()) {
        std::size_t best_end = pos;
        std::size_t best_rule = 0;
        NaiveMatcher m(input.substr(pos));
        for (std::size_t end = pos + 1; end <= input.size(); ++end) {
            for (std::size_t r = 0; r < L.rules.size(); ++r)
                if (m.match(L.rules[r].pattern, 0, end - pos)) {
                    best_end = end;
                    best_rule = r;
                    break;
                }
        }
        if (best_end == pos) {
            out.error = pos;
            return out;
        }
        if (L.rules[best_rule].action == LexAction::Return)
            out.tokens.push_back({L.rules[best_rule].token, pos, best_end});
        pos = best_end;
    }
    out.ok = true;
    return out;
}

TokenSet first_of_words(const WordSet& ws) {
    TokenSet s;
    for (const auto& w : ws)
        if (!w.empty()) s.insert(w.front());
    return s;
}

// ---------------------------------------------------------------- alphabets

std::vector<unsigned char> Alphabet::all() const {
    std::vector<unsigned char> v = live;
    v.insert(v.end(), dead.begin(), dead.end());
    return v;
}

Alphabet grammar_alphabet(const Toolchain& tc, std::size_t dead_count) {
    std::vector<std::vector<std::uint32_t>> sig(256);
    std::vector<bool> live(256, false);
    for (std::size_t s = 0; s < tc.dfa.state_count(); ++s) {
        const auto* row = tc.dfa.class_row(s);
        for (unsigned c = 0; c < 256; ++c) {
            sig[c].push_back(row[c]);
            if (tc.dfa.next(s, static_cast<unsigned char>(c)) >= 0) live[c] = true;
        }
    }
    const auto& A = tc.automaton;
    for (std::size_t s = 0; s < A.state_count(); ++s) {
        const auto* row = A.class_row(s);
        for (unsigned c = 0; c < 256; ++c) {
            sig[c].push_back(row[c]);
            if (A.next(s, static_cast<unsigned char>(c)) >= 0) live[c] = true;
        }
    }
    Alphabet out;
    std::map<std::vector<std::uint32_t>, unsigned> seen;
    for (unsigned c = 0; c < 256; ++c) {
        if (!live[c]) continue;
        if (seen.emplace(sig[c], c).second) out.live.push_back(static_cast<unsigned char>(c));
    }
    for (unsigned c : {0u, unsigned('A'), unsigned('%'), 0xffu})
        if (!live[c] && out.dead.size() < dead_count) out.dead.push_back(static_cast<unsigned char>(c));
    for (unsigned c = 0; c < 256 && out.dead.size() < dead_count; ++c)
        if (!live[c] && std::find(out.dead.begin(), out.dead.end(), c) == out.dead.end())
            out.dead.push_back(static_cast<unsigned char>(c));
    return out;
}

// ---------------------------------------------------------------- three-way runs

namespace {

struct LazyUnfused {
    bool accepted = false;
};

// Lexes on demand, so the scan stops where the parser stops.
LazyUnfused run_lazy_unfused(const Toolchain& tc, std::string_view input, ScanStats* stats) {
    LexerDfa::Cursor cur(tc.dfa, input, stats);
    TokenParseResult r = tc.parser.parse_source(tc.grammar.start, cur, stats);
    LazyUnfused out;
    out.accepted = r.ok() && !cur.failed() && cur.peek() == nullptr;
    return out;
}

// Already-read bytes are rescanned only from a pending rewind position, or
// from a position where an earlier rescan could stop, and always in a reader's
// start state: an automaton entry, a nonterminal's initial regex vector, or the
// lexer's initial state. The states visited from every such start determine
// what any rescan observes, so they stand in for the bytes themselves.
void append_trajectories(const Toolchain& tc, std::string_view input, std::vector<std::size_t> seeds,
                         std::size_t end, std::vector<std::int64_t>& fp) {
    constexpr std::int64_t kEnd = -1000;
    const auto& A = tc.automaton;
    std::set<std::size_t> starts;
    std::vector<std::pair<std::uint32_t, Regex>> live, next;
    auto at = [&](std::size_t i) { return static_cast<unsigned char>(input[i]); };
    auto reach = [&](std::size_t q) {
        if (q < end && starts.insert(q).second) seeds.push_back(q);
    };
    std::vector<std::size_t> initial;
    initial.swap(seeds);
    for (std::size_t q : initial) reach(q);
    std::map<std::size_t, std::vector<std::int64_t>> runs;
    while (!seeds.empty()) {
        std::size_t j = seeds.back();
        seeds.pop_back();
        auto& out = runs[j];
        for (NtId n = 0; n < A.nt_count(); ++n) {
            std::int32_t s = A.entry(n);
            for (std::size_t i = j; i < end && s >= 0; ++i) {
                s = A.next(static_cast<std::size_t>(s), at(i));
                out.push_back(s);
                if (s >= 0 && A.accept(static_cast<std::size_t>(s)) >= 0) reach(i + 1);
            }
            out.push_back(kEnd);

            live.clear();
            const auto& prods = tc.fused.prods[n];
            for (std::uint32_t o = 0; o < prods.size(); ++o)
                if (prods[o].kind == FusedKind::Match) live.emplace_back(o, prods[o].regex);
            for (std::size_t i = j; i < end && !live.empty(); ++i) {
                next.clear();
                for (const auto& [o, r] : live) {
                    Regex d = r.deriv(at(i));
                    if (!d.is_bot()) next.emplace_back(o, d);
                }
                live.swap(next);
                out.push_back(static_cast<std::int64_t>(live.size()));
                for (const auto& [o, r] : live) {
                    out.insert(out.end(), {o, r.id()});
                    if (r.nullable()) reach(i + 1);
                }
            }
            out.push_back(kEnd);
        }
        std::int32_t s = 0;
        for (std::size_t i = j; i < end && s >= 0; ++i) {
            s = tc.dfa.next(static_cast<std::size_t>(s), at(i));
            out.push_back(s);
            if (s >= 0 && tc.dfa.accept_rule(static_cast<std::size_t>(s)) >= 0) reach(i + 1);
        }
        out.push_back(kEnd);
    }
    for (const auto& [j, out] : runs) {
        fp.push_back(static_cast<std::int64_t>(j) - static_cast<std::int64_t>(end));
        fp.insert(fp.end(), out.begin(), out.end());
    }
}

std::string show(std::string_view s) {
    std::string out = "\"";
    for (unsigned char c : s) {
        if (c >= 32 && c < 127 && c != '"' && c != '\\') {
            out += static_cast<char>(c);
        } else {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\x%02x", c);
            out += buf;
        }
    }
    return out + "\"";
}

std::string show(const ParseOutcome& o) {
    std::ostringstream os;
    os << "{accepted=" << o.accepted << " consumed=" << o.consumed;
    if (o.failure) os << " fail@" << o.failure->offset << "/nt" << o.failure->nonterminal;
    os << " events=" << o.events.size() << "}";
    return os.str();
}

}  // namespace

ThreeWay run_three(const Toolchain& tc, std::string_view input, std::size_t probe_pos, bool with_events) {
    ThreeWay t;
    t.unfused = tc.run_unfused(input);
    t.unfused_full = t.unfused.accepted();

    ScanStats su, si, sa;
    su.probe_pos = si.probe_pos = sa.probe_pos = probe_pos;
    t.lazy_unfused_full = run_lazy_unfused(tc, input, &su).accepted;

    t.interp = fparse_interp(tc.fused, input, with_events, &si);
    t.interp_full = t.interp.accepted && tc.dfa.only_skip(input, t.interp.consumed, &si);
    t.automaton = run_automaton(tc.automaton, input, with_events, &sa);
    t.auto_full = t.automaton.accepted && tc.dfa.only_skip(input, t.automaton.consumed, &sa);

    t.reached_end = su.reached_end || si.reached_end || sa.reached_end;

    if (probe_pos != kNoPos) {
        t.probe_key.assign(256, 0);
        auto& fp = t.probe_fingerprint;
        auto rel = [&](std::size_t at) { return su.rel(at); };
        for (const ScanStats* s : {&su, &si, &sa}) {
            if (!s->probe_hit) {
                fp.push_back(-1);
                continue;
            }
            if (!s->probe_settled) t.probe_settled = false;
            for (unsigned c = 0; c < 256; ++c) t.probe_key[c] = t.probe_key[c] * 1000003u + s->probe_classes[c] + 1;
            fp.push_back(static_cast<std::int64_t>(s->probe_state.size()));
            fp.insert(fp.end(), s->probe_state.begin(), s->probe_state.end());
        }
        // Outcomes of runs that stopped before the probe are fixed; keep them relative.
        if (!su.probe_hit)
            fp.insert(fp.end(), {t.unfused_full, t.lazy_unfused_full, rel(t.unfused.consumed)});
        for (auto [s, o, full] : {std::tuple{&si, &t.interp, t.interp_full}, std::tuple{&sa, &t.automaton, t.auto_full}})
            if (!s->probe_hit)
                fp.insert(fp.end(), {o->accepted, full, rel(o->consumed), o->failure ? rel(o->failure->offset) : 0,
                                     o->failure ? o->failure->nonterminal : -1});
        std::vector<std::size_t> seeds;
        for (const ScanStats* s : {&su, &si, &sa})
            if (s->probe_hit) seeds.push_back(s->probe_rewind);
        append_trajectories(tc, input, seeds, probe_pos, fp);
    }
    return t;
}

std::string ThreeWay::discrepancy() const {
    std::ostringstream os;
    if (!(interp == automaton)) os << "interp " << show(interp) << " vs automaton " << show(automaton) << "; ";
    if (interp_full != auto_full) os << "fused acceptance differs; ";
    if (lazy_unfused_full != unfused_full) os << "on-demand and eager lexing disagree; ";
    if (unfused_full != interp_full)
        os << "unfused " << (unfused_full ? "accepts" : "rejects") << " but fused "
           << (interp_full ? "accepts" : "rejects") << "; ";
    if (unfused_full && interp_full && unfused.consumed != interp.consumed)
        os << "consumed " << unfused.consumed << " vs " << interp.consumed << "; ";
    return os.str();
}

// ---------------------------------------------------------------- exhaustive enumeration

namespace {

struct VectorHash {
    std::size_t operator()(const std::vector<std::int64_t>& v) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int64_t x : v) h = (h ^ static_cast<std::uint64_t>(x)) * 1099511628211ull;
        return static_cast<std::size_t>(h);
    }
};

struct Exhaustive {
    const Toolchain& tc;
    const std::vector<unsigned char>& alphabet;
    std::size_t max_len;
    std::chrono::steady_clock::time_point deadline;
    ExhaustiveReport report;
    std::string buf;
    // configuration -> longest extension already explored from it
    std::unordered_map<std::vector<std::int64_t>, std::size_t, VectorHash> explored;

    bool out_of_time() {
        if ((report.strings_checked & 1023) == 0 && std::chrono::steady_clock::now() > deadline)
            report.budget_exhausted = true;
        return report.budget_exhausted;
    }

    void record(const ThreeWay& t) {
        ++report.strings_checked;
        std::string d = t.discrepancy();
        if (!d.empty()) {
            if (report.discrepancies++ == 0) report.first_failure = show(buf) + ": " + d;
        }
    }

    // buf holds a prefix that some pipeline read to its end; try each extension.
    void extend() {
        if (buf.size() >= max_len || out_of_time()) return;
        std::size_t p = buf.size();
        buf.push_back(static_cast<char>(alphabet[0]));
        ThreeWay first = run_three(tc, buf, p);
        buf.pop_back();

        std::size_t room = max_len - p;
        auto [it, fresh] = explored.try_emplace(first.probe_fingerprint, room);
        if (!fresh) {
            if (it->second >= room) {
                ++report.configurations_reused;
                return;
            }
            it->second = room;
        }

        std::vector<unsigned char> children;
        if (first.probe_settled) {
            std::vector<std::uint64_t> keys;
            for (unsigned char c : alphabet) {
                std::uint64_t k = first.probe_key[c];
                if (std::find(keys.begin(), keys.end(), k) != keys.end()) continue;
                keys.push_back(k);
                children.push_back(c);
            }
        } else {
            children = alphabet;
        }

        for (unsigned char c : children) {
            buf.push_back(static_cast<char>(c));
            ThreeWay t = c == alphabet[0] ? first : run_three(tc, buf);
            record(t);
            if (t.reached_end) extend();
            buf.pop_back();
            if (report.budget_exhausted) return;
        }
    }
};

}  // namespace

ExhaustiveReport exhaustive_three_way(const Toolchain& tc, const std::vector<unsigned char>& alphabet,
                                      std::size_t max_len, double time_budget_seconds) {
    Exhaustive ex{tc, alphabet, max_len,
                  std::chrono::steady_clock::now() +
                      std::chrono::microseconds(static_cast<long long>(time_budget_seconds * 1e6)),
                  {}, {}, {}};
    ThreeWay root = run_three(tc, "");
    ex.record(root);
    if (root.reached_end) ex.extend();
    return ex.report;
}

// ---------------------------------------------------------------- sampled inputs

std::vector<std::string> sampled_valid_words(const Toolchain& tc, std::size_t count, std::size_t max_tokens,
                                             std::uint64_t seed) {
    WordSampler sampler(tc.grammar, tc.source.lexer, seed);
    std::vector<std::string> out;
    std::size_t attempts = 0;
    while (out.size() < count && attempts < count * 50) {
        ++attempts;
        auto w = sampler.sample(max_tokens);
        if (!w) continue;
        std::vector<Lexeme> toks;
        if (w->size() <= 64) {
            BruteLex bl = brute_lex(tc.source.lexer, *w);
            if (!bl.ok) continue;
            toks = bl.tokens;
        } else {
            LexResult lr = lex(tc.source.lexer, *w);
            if (!lr.ok()) continue;
            toks = lr.tokens;
        }
        if (toks.size() != sampler.last_tokens().size()) continue;
        bool same = true;
        for (std::size_t i = 0; i < toks.size(); ++i)
            if (toks[i].token != sampler.last_tokens()[i]) same = false;
        if (same) out.push_back(*w);
    }
    return out;
}

std::vector<std::string> random_inputs(const Toolchain& tc, std::size_t count, std::size_t max_len,
                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Alphabet alpha = grammar_alphabet(tc);
    std::vector<unsigned char> bytes;
    // Any member of a live class, not just its representative.
    for (unsigned c = 0; c < 256; ++c) {
        bool live = false;
        for (std::size_t s = 0; s < tc.automaton.state_count() && !live; ++s)
            if (tc.automaton.next(s, static_cast<unsigned char>(c)) >= 0) live = true;
        for (std::size_t s = 0; s < tc.dfa.state_count() && !live; ++s)
            if (tc.dfa.next(s, static_cast<unsigned char>(c)) >= 0) live = true;
        if (live) bytes.push_back(static_cast<unsigned char>(c));
    }
    bytes.insert(bytes.end(), alpha.dead.begin(), alpha.dead.end());
    auto any_byte = [&]() { return static_cast<char>(bytes[rng() % bytes.size()]); };
    auto rep_byte = [&]() {
        auto all = alpha.all();
        return static_cast<char>(all[rng() % all.size()]);
    };

    WordSampler sampler(tc.grammar, tc.source.lexer, seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<std::string> out;
    while (out.size() < count) {
        std::string s;
        switch (rng() % 3) {
            case 0: {
                std::size_t n = rng() % (max_len + 1);
                for (std::size_t i = 0; i < n; ++i) s += (rng() % 2) ? rep_byte() : any_byte();
                break;
            }
            default: {
                auto w = sampler.sample(1 + rng() % 40);
                if (!w) continue;
                s = *w;
                std::size_t edits = rng() % 4;
                for (std::size_t e = 0; e < edits; ++e) {
                    std::size_t at = s.empty() ? 0 : rng() % (s.size() + 1);
                    switch (rng() % 3) {
                        case 0: s.insert(s.begin() + static_cast<std::ptrdiff_t>(at), rep_byte()); break;
                        case 1:
                            if (at < s.size()) s.erase(at, 1);
                            break;
                        default:
                            if (at < s.size()) s[at] = any_byte();
                    }
                }
                if (s.size() > max_len) s.resize(max_len);
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string grammar_path(const std::string& name) { return std::string(LPFUSE_GRAMMAR_DIR) + "/" + name + ".lpf"; }

// ---------------------------------------------------------------- running example

Running running_example() {
    Running r;
    r.LPAR = r.tokens.intern("LPAR");
    r.RPAR = r.tokens.intern("RPAR");
    r.ATOM = r.tokens.intern("ATOM");
    using namespace lpfuse::cfe;
    Cfe sexps = fix("sexps", alt(eps(), seq(var("sexp"), var("sexps"))));
    r.sexp = fix("sexp", alt(seq(seq(tok(r.LPAR), sexps), tok(r.RPAR)), tok(r.ATOM)));

    Lexer raw;
    raw.tokens = r.tokens;
    raw.rules.push_back({parse_regex("[a-z]+"), LexAction::Return, r.ATOM});
    raw.rules.push_back({parse_regex("\" \" | \"\\n\""), LexAction::Skip, kNoToken});
    raw.rules.push_back({parse_regex("\"(\""), LexAction::Return, r.LPAR});
    raw.rules.push_back({parse_regex("\")\""), LexAction::Return, r.RPAR});
    r.lexer = canonicalize_lexer(raw);
    return r;
}

}  // namespace oracle
