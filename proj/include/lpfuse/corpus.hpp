#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lpfuse/pipeline.hpp"

namespace lpfuse {

enum class CorpusKind { Sexp, Csv, Json };

std::optional<CorpusKind> corpus_kind_from_name(std::string_view name);
const char* corpus_kind_name(CorpusKind k);

/// A valid document of exactly `bytes` bytes for the shipped grammar of the
/// given kind.
std::string generate_corpus(CorpusKind kind, std::size_t bytes, std::uint64_t seed = 1);

/// Random valid inputs: a random derivation of the normalized grammar with
/// every token rendered by a random walk over its regex, and skip text
/// inserted between tokens when the lexer has a skip rule.
class WordSampler {
public:
    WordSampler(const NormalGrammar& G, const Lexer& L, std::uint64_t seed);

    /// A derivation of at most roughly `max_tokens` tokens, rendered to bytes.
    std::optional<std::string> sample(std::size_t max_tokens);
    /// A random member of L(r), or nullopt if the walk does not terminate.
    std::optional<std::string> sample_regex(const Regex& r, std::size_t soft_cap = 8);

    /// Token sequence behind the most recent successful sample().
    const std::vector<TokenId>& last_tokens() const { return last_tokens_; }

    std::mt19937_64& rng() { return rng_; }

private:
    const NormalGrammar& G_;
    const Lexer& L_;
    std::vector<std::size_t> min_len_;
    std::mt19937_64 rng_;
    std::vector<TokenId> last_tokens_;
};

struct BenchRow {
    std::string pipeline;
    std::size_t bytes;
    double seconds;
    double mbps;
};

enum class Pipeline { Unfused, Interp, Auto };
const char* pipeline_name(Pipeline p);

/// OneShot runs allocate their buffers fresh. On glibc the first OneShot call
/// pins the mmap threshold at its 128 KiB startup value, so every large buffer
/// is freshly mapped whatever its size. Steady runs reuse per-thread token and
/// stack buffers.
enum class Timing { OneShot, Steady };

/// Wall time of one full-acceptance run; throws if the input is rejected.
double time_pipeline(const Toolchain& tc, Pipeline p, std::string_view input, Timing mode = Timing::OneShot);

/// Median of `repeat` runs.
BenchRow bench_one(const Toolchain& tc, Pipeline p, std::string_view input, int repeat,
                   Timing mode = Timing::OneShot);

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& r);

}  // namespace lpfuse
