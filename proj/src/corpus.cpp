#include "lpfuse/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <stdexcept>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace lpfuse {

std::optional<CorpusKind> corpus_kind_from_name(std::string_view name) {
    if (name == "sexp") return CorpusKind::Sexp;
    if (name == "csv") return CorpusKind::Csv;
    if (name == "json") return CorpusKind::Json;
    return std::nullopt;
}

const char* corpus_kind_name(CorpusKind k) {
    switch (k) {
        case CorpusKind::Sexp: return "sexp";
        case CorpusKind::Csv: return "csv";
        case CorpusKind::Json: return "json";
    }
    return "?";
}

namespace {

using Rng = std::mt19937_64;

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::string word(Rng& rng, std::size_t lo, std::size_t hi) {
    std::string w;
    std::size_t n = uniform(rng, lo, hi);
    for (std::size_t i = 0; i < n; ++i) w += static_cast<char>('a' + uniform(rng, 0, 25));
    return w;
}

void sexp_item(Rng& rng, std::string& out, int depth) {
    if (depth <= 0 || coin(rng, 0.55)) {
        out += word(rng, 1, 8);
        return;
    }
    out += '(';
    std::size_t n = uniform(rng, 0, 5);
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += coin(rng, 0.1) ? '\n' : ' ';
        sexp_item(rng, out, depth - 1);
    }
    out += ')';
}

void pad(Rng& rng, std::string& out, std::size_t n, const char* fill) {
    std::size_t k = std::char_traits<char>::length(fill);
    for (std::size_t i = 0; i < n; ++i) out += fill[uniform(rng, 0, k - 1)];
}

std::string gen_sexp(std::size_t bytes, Rng& rng) {
    if (bytes < 2) throw std::invalid_argument("sexp corpus needs at least 2 bytes");
    std::string out = "(";
    std::size_t budget = bytes - 2;
    std::string item;
    bool first = true;
    for (;;) {
        item.clear();
        if (!first) item += coin(rng, 0.1) ? '\n' : ' ';
        sexp_item(rng, item, 6);
        if (out.size() - 1 + item.size() + 16 > budget) break;
        out += item;
        first = false;
    }
    pad(rng, out, budget - (out.size() - 1), " \n");
    out += ')';
    return out;
}

std::string csv_field(Rng& rng) {
    switch (uniform(rng, 0, 5)) {
        case 0: return "";
        case 1: return std::to_string(uniform(rng, 0, 99999));
        case 2: {
            std::string f = "\"";
            std::size_t n = uniform(rng, 0, 4);
            for (std::size_t i = 0; i < n; ++i) {
                switch (uniform(rng, 0, 4)) {
                    case 0: f += "\"\""; break;
                    case 1: f += ", "; break;
                    case 2: f += "\r\n"; break;
                    default: f += word(rng, 1, 6);
                }
            }
            return f + "\"";
        }
        default: return word(rng, 1, 10);
    }
}

std::string gen_csv(std::size_t bytes, Rng& rng) {
    std::string out;
    std::string row;
    for (;;) {
        row.clear();
        std::size_t n = uniform(rng, 3, 8);
        for (std::size_t i = 0; i < n; ++i) {
            if (i) row += ',';
            row += csv_field(rng);
        }
        row += "\r\n";
        if (out.size() + row.size() + 64 > bytes) break;
        out += row;
    }
    std::size_t rest = bytes - out.size();
    if (rest >= 2) {
        out.append(rest - 2, 'x');
        out += "\r\n";
    } else if (rest == 1) {
        throw std::invalid_argument("csv corpus size must not be 1");
    }
    return out;
}

std::string json_string(Rng& rng) {
    std::string s = "\"";
    std::size_t n = uniform(rng, 0, 6);
    for (std::size_t i = 0; i < n; ++i) {
        switch (uniform(rng, 0, 9)) {
            case 0: s += "\\n"; break;
            case 1: s += "\\\""; break;
            case 2: s += "\\u00e9"; break;
            case 3: s += "\xc3\xa9"; break;
            default: s += word(rng, 1, 6);
        }
    }
    return s + "\"";
}

std::string json_number(Rng& rng) {
    std::string s;
    if (coin(rng, 0.2)) s += '-';
    s += std::to_string(uniform(rng, 0, 100000));
    if (coin(rng, 0.3)) s += "." + std::to_string(uniform(rng, 0, 999));
    if (coin(rng, 0.1)) s += "e" + std::string(coin(rng, 0.5) ? "-" : "") + std::to_string(uniform(rng, 1, 30));
    return s;
}

void json_value(Rng& rng, std::string& out, int depth) {
    std::size_t pick = depth <= 0 ? uniform(rng, 2, 6) : uniform(rng, 0, 6);
    switch (pick) {
        case 0: {
            out += '{';
            std::size_t n = uniform(rng, 0, 4);
            for (std::size_t i = 0; i < n; ++i) {
                if (i) out += ", ";
                out += json_string(rng);
                out += ": ";
                json_value(rng, out, depth - 1);
            }
            out += '}';
            return;
        }
        case 1: {
            out += '[';
            std::size_t n = uniform(rng, 0, 4);
            for (std::size_t i = 0; i < n; ++i) {
                if (i) out += ',';
                json_value(rng, out, depth - 1);
            }
            out += ']';
            return;
        }
        case 2: out += json_string(rng); return;
        case 3: out += json_number(rng); return;
        case 4: out += "true"; return;
        case 5: out += "false"; return;
        default: out += "null"; return;
    }
}

std::string json_message(Rng& rng) {
    std::string m = "{\"id\": " + std::to_string(uniform(rng, 0, 1u << 30));
    m += ", \"name\": " + json_string(rng);
    m += ", \"active\": " + std::string(coin(rng, 0.5) ? "true" : "false");
    m += ", \"score\": " + json_number(rng);
    m += ", \"tags\": [";
    std::size_t n = uniform(rng, 0, 4);
    for (std::size_t i = 0; i < n; ++i) {
        if (i) m += ", ";
        m += json_string(rng);
    }
    m += "], \"payload\": ";
    json_value(rng, m, 3);
    m += "}";
    return m;
}

std::string gen_json(std::size_t bytes, Rng& rng) {
    if (bytes < 2) throw std::invalid_argument("json corpus needs at least 2 bytes");
    std::string out = "[";
    std::size_t budget = bytes - 2;
    bool first = true;
    std::string msg;
    for (;;) {
        msg = first ? "\n" : ",\n";
        msg += json_message(rng);
        if (out.size() - 1 + msg.size() + 16 > budget) break;
        out += msg;
        first = false;
    }
    pad(rng, out, budget - (out.size() - 1), " \n\t");
    out += ']';
    return out;
}

}  // namespace

std::string generate_corpus(CorpusKind kind, std::size_t bytes, std::uint64_t seed) {
    Rng rng(seed);
    switch (kind) {
        case CorpusKind::Sexp: return gen_sexp(bytes, rng);
        case CorpusKind::Csv: return gen_csv(bytes, rng);
        case CorpusKind::Json: return gen_json(bytes, rng);
    }
    return {};
}

// ---------------------------------------------------------------- sampler

WordSampler::WordSampler(const NormalGrammar& G, const Lexer& L, std::uint64_t seed)
    : G_(G), L_(L), min_len_(min_lengths(G)), rng_(seed) {}

std::optional<std::string> WordSampler::sample_regex(const Regex& start, std::size_t soft_cap) {
    Regex r = start;
    std::string out;
    while (out.size() < soft_cap * 8) {
        if (r.nullable() && (out.size() >= soft_cap || coin(rng_, 0.3))) return out;
        auto parts = class_partition({r});
        std::vector<const ByteSet*> viable;
        for (const auto& p : parts)
            if (!is_empty_language(r.deriv(p.first()))) viable.push_back(&p);
        if (viable.empty()) return r.nullable() ? std::optional<std::string>(out) : std::nullopt;
        const ByteSet& cls = *viable[uniform(rng_, 0, viable.size() - 1)];
        std::size_t k = uniform(rng_, 0, cls.size() - 1);
        unsigned c = 0;
        for (unsigned b = 0; b < 256; ++b)
            if (cls.contains(static_cast<unsigned char>(b)) && k-- == 0) {
                c = b;
                break;
            }
        out += static_cast<char>(c);
        r = r.deriv(static_cast<unsigned char>(c));
    }
    return std::nullopt;
}

std::optional<std::string> WordSampler::sample(std::size_t max_tokens) {
    std::vector<TokenId> word;
    std::vector<NtId> stack{G_.start};
    std::size_t pending = min_len_[G_.start];
    if (pending == kNoPos) return std::nullopt;
    while (!stack.empty()) {
        NtId n = stack.back();
        stack.pop_back();
        pending -= min_len_[n];
        const auto& ps = G_.prods[n];
        auto cost = [&](const Production& p) {
            if (p.kind == ProdKind::Eps) return std::size_t{0};
            std::size_t c = 1;
            for (NtId m : p.tail) {
                if (min_len_[m] == kNoPos) return kNoPos;
                c += min_len_[m];
            }
            return c;
        };
        std::vector<const Production*> ok;
        for (const auto& p : ps)
            if (cost(p) != kNoPos) ok.push_back(&p);
        if (ok.empty()) return std::nullopt;
        const Production* pick;
        if (word.size() + pending >= max_tokens) {
            pick = *std::min_element(ok.begin(), ok.end(),
                                     [&](const Production* a, const Production* b) { return cost(*a) < cost(*b); });
        } else {
            pick = ok[uniform(rng_, 0, ok.size() - 1)];
        }
        if (pick->kind == ProdKind::Eps) continue;
        word.push_back(pick->token);
        for (NtId m : pick->tail) pending += min_len_[m];
        stack.insert(stack.end(), pick->tail.rbegin(), pick->tail.rend());
    }

    Regex skip = L_.skip();
    std::string out;
    for (std::size_t i = 0; i <= word.size(); ++i) {
        if (!skip.is_bot() && coin(rng_, 0.4)) {
            auto s = sample_regex(skip, 2);
            if (!s) return std::nullopt;
            out += *s;
        }
        if (i == word.size()) break;
        const LexRule* rule = L_.rule_for(word[i]);
        if (rule == nullptr) return std::nullopt;
        auto t = sample_regex(rule->pattern);
        if (!t) return std::nullopt;
        out += *t;
    }
    last_tokens_ = std::move(word);
    return out;
}

// ---------------------------------------------------------------- bench

const char* pipeline_name(Pipeline p) {
    switch (p) {
        case Pipeline::Unfused: return "unfused";
        case Pipeline::Interp: return "interp";
        case Pipeline::Auto: return "auto";
    }
    return "?";
}

namespace {

double timed_run(const Toolchain& tc, Pipeline p, std::string_view input, LexResult& tokens, RunScratch& scratch) {
    using Clock = std::chrono::steady_clock;
    bool ok = false;
    auto t0 = Clock::now();
    switch (p) {
        case Pipeline::Unfused: ok = tc.run_unfused(input, tokens).accepted(); break;
        case Pipeline::Interp: ok = tc.fused_accepts(input, fparse_interp(tc.fused, input)); break;
        case Pipeline::Auto: ok = tc.fused_accepts(input, run_automaton_fast(tc.automaton, input, scratch)); break;
    }
    auto t1 = Clock::now();
    if (!ok) throw std::runtime_error(std::string(pipeline_name(p)) + " rejected the input");
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

double time_pipeline(const Toolchain& tc, Pipeline p, std::string_view input, Timing mode) {
    if (mode == Timing::Steady) {
        thread_local LexResult tokens;
        thread_local RunScratch scratch;
        return timed_run(tc, p, input, tokens, scratch);
    }
#if defined(__GLIBC__)
    static const bool pinned = mallopt(M_MMAP_THRESHOLD, 128 * 1024) != 0;
    (void)pinned;
#endif
    LexResult tokens;
    RunScratch scratch;
    return timed_run(tc, p, input, tokens, scratch);
}

BenchRow bench_one(const Toolchain& tc, Pipeline p, std::string_view input, int repeat, Timing mode) {
    std::vector<double> ts;
    for (int i = 0; i < std::max(1, repeat); ++i) ts.push_back(time_pipeline(tc, p, input, mode));
    std::sort(ts.begin(), ts.end());
    double med = ts[ts.size() / 2];
    return {pipeline_name(p), input.size(), med, static_cast<double>(input.size()) / 1e6 / med};
}

std::string bench_csv_header() { return "pipeline,bytes,seconds,mbps"; }

std::string bench_csv_row(const BenchRow& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%zu,%.6f,%.1f", r.pipeline.c_str(), r.bytes, r.seconds, r.mbps);
    return buf;
}

}  // namespace lpfuse
