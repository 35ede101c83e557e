#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lpfuse {

/// A set of byte values 0-255.
class ByteSet {
public:
    ByteSet() = default;

    static ByteSet single(unsigned char c) { ByteSet s; s.bits_.set(c); return s; }
    static ByteSet range(unsigned char lo, unsigned char hi);
    static ByteSet all() { ByteSet s; s.bits_.set(); return s; }

    bool contains(unsigned char c) const { return bits_.test(c); }
    void insert(unsigned char c) { bits_.set(c); }
    void insert_range(unsigned char lo, unsigned char hi);
    bool empty() const { return bits_.none(); }
    std::size_t size() const { return bits_.count(); }
    /// Smallest member; undefined for the empty set.
    unsigned char first() const;

    ByteSet operator|(const ByteSet& o) const { ByteSet s; s.bits_ = bits_ | o.bits_; return s; }
    ByteSet operator&(const ByteSet& o) const { ByteSet s; s.bits_ = bits_ & o.bits_; return s; }
    ByteSet operator~() const { ByteSet s; s.bits_ = ~bits_; return s; }
    bool operator==(const ByteSet& o) const { return bits_ == o.bits_; }

    /// Total order used for canonical sorting.
    int compare(const ByteSet& o) const;
    std::size_t hash() const;

    /// Maximal runs of consecutive members as [lo, hi] pairs.
    std::vector<std::pair<unsigned char, unsigned char>> ranges() const;

private:
    std::bitset<256> bits_;
};

enum class RegexKind : std::uint8_t { Bot, Eps, Class, Seq, Alt, Star, And, Not };

struct RegexNode;

/// Extended regular expression over bytes.
///
/// Values are hash-consed: every constructor canonicalizes its result and
/// returns the unique node for that canonical form, so equality is pointer
/// identity and hashing is O(1). Nodes are immutable and live for the whole
/// process.
class Regex {
public:
    Regex();  // Bot

    static Regex bot();
    static Regex eps();
    static Regex byte_class(const ByteSet& s);
    static Regex byte(unsigned char c) { return byte_class(ByteSet::single(c)); }
    static Regex literal(std::string_view bytes);
    static Regex seq(Regex a, Regex b);
    static Regex alt(Regex a, Regex b);
    static Regex alt(const std::vector<Regex>& rs);
    static Regex star(Regex r);
    static Regex plus(Regex r) { return seq(r, star(r)); }
    static Regex opt(Regex r) { return alt(eps(), r); }
    static Regex conj(Regex a, Regex b);
    static Regex neg(Regex r);
    /// Complement of the empty language (every string).
    static Regex any_string() { return neg(bot()); }

    RegexKind kind() const;
    bool is_bot() const { return kind() == RegexKind::Bot; }
    bool nullable() const;
    /// Class members; meaningful only for RegexKind::Class.
    const ByteSet& bytes() const;
    /// Children in canonical order (Seq: two, Star/Not: one, Alt/And: two or more).
    const std::vector<Regex>& children() const;

    /// Brzozowski derivative with respect to one byte, canonicalized.
    Regex deriv(unsigned char c) const;

    /// Unique id of the canonical node (allocation order within this process).
    std::uint32_t id() const;
    std::size_t hash() const;

    bool operator==(const Regex& o) const { return node_ == o.node_; }
    bool operator!=(const Regex& o) const { return node_ != o.node_; }

    /// Structural total order over canonical forms, stable across runs.
    static int compare(const Regex& a, const Regex& b);

    /// Concrete syntax accepted by parse_regex.
    std::string to_string() const;

    const RegexNode* node() const { return node_; }

private:
    explicit Regex(const RegexNode* n) : node_(n) {}
    friend class RegexFactory;
    const RegexNode* node_;
};

struct RegexHash {
    std::size_t operator()(const Regex& r) const { return r.hash(); }
};

struct RegexLess {
    bool operator()(const Regex& a, const Regex& b) const { return Regex::compare(a, b) < 0; }
};

inline bool nullable(const Regex& r) { return r.nullable(); }
inline Regex deriv(const Regex& r, unsigned char c) { return r.deriv(c); }

/// Thrown when a derivative closure grows past the exploration budget.
class RegexBudgetExceeded : public std::runtime_error {
public:
    explicit RegexBudgetExceeded(std::size_t states);
    std::size_t states;
};

inline constexpr std::size_t kEmptinessStateBudget = 100000;

/// True iff the language of r is empty. Explores the derivative closure;
/// throws RegexBudgetExceeded past `budget` distinct states. Results are cached.
bool is_empty_language(const Regex& r, std::size_t budget = kEmptinessStateBudget);

/// Partition of all 256 bytes such that bytes in one class have equal
/// derivatives for every regex in rs. Classes are sorted by smallest member.
std::vector<ByteSet> class_partition(const std::vector<Regex>& rs);

/// Same partition as a byte -> class index table.
std::array<std::uint16_t, 256> class_table(const std::vector<ByteSet>& partition);

/// Every distinct regex reachable from r by repeated derivatives.
/// Throws RegexBudgetExceeded past `budget` states.
std::vector<Regex> derivative_closure(const Regex& r, std::size_t budget);

/// Membership by folding derivatives over the word.
bool matches(const Regex& r, std::string_view word);

class RegexSyntaxError : public std::runtime_error {
public:
    RegexSyntaxError(std::size_t offset, const std::string& what);
    std::size_t offset;
};

/// Parses the concrete regex syntax:
///   juxtaposition = sequence, `|` alternation, `&` intersection, `!r` complement,
///   postfix `*` `+` `?`, `[a-z]` / `[^...]` classes, `"..."` literals with
///   escapes \n \t \r \\ \" \xNN, parentheses for grouping.
/// Precedence from tightest: postfix, `!`, sequence, `&`, `|`.
Regex parse_regex(std::string_view text);

/// Quotes one byte for display inside a literal or class.
std::string escape_byte(unsigned char c, bool in_class);

}  // namespace lpfuse

template <>
struct std::hash<lpfuse::Regex> {
    std::size_t operator()(const lpfuse::Regex& r) const { return r.hash(); }
};
