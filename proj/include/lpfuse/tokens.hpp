#pragma once

#include <bitset>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace lpfuse {

using TokenId = std::uint32_t;
using NtId = std::uint32_t;

inline constexpr std::size_t kMaxTokens = 256;
inline constexpr std::size_t kNoPos = std::numeric_limits<std::size_t>::max();

/// Finite set of token ids.
class TokenSet {
public:
    TokenSet() = default;
    static TokenSet of(TokenId t) { TokenSet s; s.insert(t); return s; }

    void insert(TokenId t) { bits_.set(t); }
    bool contains(TokenId t) const { return t < kMaxTokens && bits_.test(t); }
    bool empty() const { return bits_.none(); }
    std::size_t size() const { return bits_.count(); }

    TokenSet operator|(const TokenSet& o) const { TokenSet s; s.bits_ = bits_ | o.bits_; return s; }
    TokenSet operator&(const TokenSet& o) const { TokenSet s; s.bits_ = bits_ & o.bits_; return s; }
    TokenSet& operator|=(const TokenSet& o) { bits_ |= o.bits_; return *this; }
    bool operator==(const TokenSet& o) const { return bits_ == o.bits_; }
    bool operator!=(const TokenSet& o) const { return bits_ != o.bits_; }

    std::vector<TokenId> members() const {
        std::vector<TokenId> out;
        for (std::size_t i = 0; i < kMaxTokens; ++i)
            if (bits_.test(i)) out.push_back(static_cast<TokenId>(i));
        return out;
    }

private:
    std::bitset<kMaxTokens> bits_;
};

/// Token id -> display name.
struct TokenNames {
    std::vector<std::string> names;

    std::string name(TokenId t) const {
        return t < names.size() ? names[t] : "T" + std::to_string(t);
    }
    /// Id for a name, registering it if new.
    TokenId intern(const std::string& n) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == n) return static_cast<TokenId>(i);
        names.push_back(n);
        return static_cast<TokenId>(names.size() - 1);
    }
    /// Id for a name or kNoToken.
    TokenId find(const std::string& n) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == n) return static_cast<TokenId>(i);
        return std::numeric_limits<TokenId>::max();
    }
    std::string format(const TokenSet& s) const {
        std::string out = "{";
        bool first = true;
        for (TokenId t : s.members()) {
            if (!first) out += ",";
            out += name(t);
            first = false;
        }
        return out + "}";
    }
};

inline constexpr TokenId kNoToken = std::numeric_limits<TokenId>::max();

/// Instrumentation shared by the byte-level scanners.
///
/// `probe_pos` selects one input position; the first time a scanner reads that
/// byte it records whether a rewind to an earlier position was still possible
/// (`probe_settled == false`), the earliest position it may still revisit, the
/// byte classes that its current state distinguishes, and its configuration
/// with offsets taken relative to `probe_pos`. Callers layered on a scanner
/// append their own context to `probe_state` once the probe is hit.
struct ScanStats {
    std::size_t bytes_inspected = 0;
    bool reached_end = false;

    std::size_t probe_pos = kNoPos;
    bool probe_hit = false;
    bool probe_settled = false;
    std::size_t probe_rewind = kNoPos;
    std::vector<std::uint16_t> probe_classes;
    std::vector<std::int64_t> probe_state;

    /// True when this call is the first read of the probed byte.
    bool record_probe(std::size_t pos, bool settled, const std::uint16_t* classes, std::size_t rewind) {
        if (pos != probe_pos || probe_hit) return false;
        probe_hit = true;
        probe_settled = settled;
        probe_rewind = rewind;
        probe_classes.assign(classes, classes + 256);
        return true;
    }
    std::int64_t rel(std::size_t at) const {
        return static_cast<std::int64_t>(at) - static_cast<std::int64_t>(probe_pos);
    }
};

}  // namespace lpfuse
