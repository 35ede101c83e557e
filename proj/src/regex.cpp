#include "lpfuse/regex.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

namespace lpfuse {

// ---------------------------------------------------------------- ByteSet

ByteSet ByteSet::range(unsigned char lo, unsigned char hi) {
    ByteSet s;
    s.insert_range(lo, hi);
    return s;
}

void ByteSet::insert_range(unsigned char lo, unsigned char hi) {
    for (unsigned c = lo; c <= hi; ++c) bits_.set(c);
}

unsigned char ByteSet::first() const {
    for (unsigned c = 0; c < 256; ++c)
        if (bits_.test(c)) return static_cast<unsigned char>(c);
    return 0;
}

int ByteSet::compare(const ByteSet& o) const {
    for (unsigned c = 0; c < 256; ++c) {
        bool a = bits_.test(c), b = o.bits_.test(c);
        if (a != b) return a ? -1 : 1;
    }
    return 0;
}

std::size_t ByteSet::hash() const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (unsigned w = 0; w < 256; w += 64) {
        std::uint64_t word = 0;
        for (unsigned b = 0; b < 64; ++b)
            if (bits_.test(w + b)) word |= (std::uint64_t{1} << b);
        h ^= word + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

std::vector<std::pair<unsigned char, unsigned char>> ByteSet::ranges() const {
    std::vector<std::pair<unsigned char, unsigned char>> out;
    unsigned c = 0;
    while (c < 256) {
        if (!bits_.test(c)) { ++c; continue; }
        unsigned lo = c;
        while (c + 1 < 256 && bits_.test(c + 1)) ++c;
        out.emplace_back(static_cast<unsigned char>(lo), static_cast<unsigned char>(c));
        ++c;
    }
    return out;
}

// ---------------------------------------------------------------- nodes

using DerivTable = std::array<std::atomic<const RegexNode*>, 256>;

struct RegexNode {
    RegexKind kind;
    bool nullable;
    std::uint32_t id;
    std::size_t hash;
    ByteSet bytes;
    std::vector<Regex> kids;
    mutable std::atomic<DerivTable*> derivs{nullptr};
};

namespace {

struct NodeKey {
    RegexKind kind;
    const ByteSet* bytes;
    const std::vector<Regex>* kids;
    std::size_t hash;
};

std::size_t mix(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

std::size_t key_hash(RegexKind kind, const ByteSet& bytes, const std::vector<Regex>& kids) {
    std::size_t h = static_cast<std::size_t>(kind) * 0x100000001b3ull;
    if (kind == RegexKind::Class) h = mix(h, bytes.hash());
    for (const auto& k : kids) h = mix(h, k.id());
    return h;
}

struct KeyHash {
    using is_transparent = void;
    std::size_t operator()(const RegexNode* n) const { return n->hash; }
    std::size_t operator()(const NodeKey& k) const { return k.hash; }
};

struct KeyEq {
    using is_transparent = void;
    static bool same(RegexKind ka, const ByteSet& ba, const std::vector<Regex>& ca, RegexKind kb,
                     const ByteSet& bb, const std::vector<Regex>& cb) {
        return ka == kb && ba == bb && ca == cb;
    }
    bool operator()(const RegexNode* a, const RegexNode* b) const { return a == b; }
    bool operator()(const NodeKey& a, const RegexNode* b) const {
        return same(a.kind, *a.bytes, *a.kids, b->kind, b->bytes, b->kids);
    }
    bool operator()(const RegexNode* a, const NodeKey& b) const { return (*this)(b, a); }
};

}  // namespace

class RegexFactory {
public:
    static RegexFactory& instance() {
        static RegexFactory* f = new RegexFactory();
        return *f;
    }

    Regex make(RegexKind kind, const ByteSet& bytes, std::vector<Regex> kids) {
        std::size_t h = key_hash(kind, bytes, kids);
        NodeKey key{kind, &bytes, &kids, h};
        std::lock_guard<std::mutex> lock(mu_);
        auto it = table_.find(key);
        if (it != table_.end()) return Regex(*it);
        auto* n = new RegexNode();
        n->kind = kind;
        n->bytes = bytes;
        n->kids = std::move(kids);
        n->id = next_id_++;
        n->hash = h;
        n->nullable = compute_nullable(*n);
        table_.insert(n);
        return Regex(n);
    }

    static Regex wrap(const RegexNode* n) { return Regex(n); }

    Regex bot;
    Regex eps;

private:
    RegexFactory() : bot(nullptr), eps(nullptr) {
        bot = make(RegexKind::Bot, ByteSet{}, {});
        eps = make(RegexKind::Eps, ByteSet{}, {});
    }

    static bool compute_nullable(const RegexNode& n) {
        switch (n.kind) {
            case RegexKind::Bot: return false;
            case RegexKind::Eps: return true;
            case RegexKind::Class: return false;
            case RegexKind::Star: return true;
            case RegexKind::Not: return !n.kids[0].nullable();
            case RegexKind::Seq:
            case RegexKind::And:
                return std::all_of(n.kids.begin(), n.kids.end(),
                                   [](const Regex& r) { return r.nullable(); });
            case RegexKind::Alt:
                return std::any_of(n.kids.begin(), n.kids.end(),
                                   [](const Regex& r) { return r.nullable(); });
        }
        return false;
    }

    std::mutex mu_;
    std::unordered_set<const RegexNode*, KeyHash, KeyEq> table_;
    std::uint32_t next_id_ = 0;
};

// ---------------------------------------------------------------- constructors

Regex::Regex() : node_(RegexFactory::instance().bot.node_) {}

Regex Regex::bot() { return RegexFactory::instance().bot; }
Regex Regex::eps() { return RegexFactory::instance().eps; }

Regex Regex::byte_class(const ByteSet& s) {
    if (s.empty()) return bot();
    return RegexFactory::instance().make(RegexKind::Class, s, {});
}

Regex Regex::literal(std::string_view bytes) {
    Regex r = eps();
    for (auto it = bytes.rbegin(); it != bytes.rend(); ++it)
        r = seq(byte(static_cast<unsigned char>(*it)), r);
    return r;
}

Regex Regex::seq(Regex a, Regex b) {
    if (a.is_bot() || b.is_bot()) return bot();
    if (a.kind() == RegexKind::Eps) return b;
    if (b.kind() == RegexKind::Eps) return a;
    if (a.kind() == RegexKind::Seq) return seq(a.children()[0], seq(a.children()[1], b));
    return RegexFactory::instance().make(RegexKind::Seq, ByteSet{}, {a, b});
}

namespace {

void sort_unique(std::vector<Regex>& v) {
    std::sort(v.begin(), v.end(), RegexLess{});
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

Regex Regex::alt(Regex a, Regex b) { return alt(std::vector<Regex>{a, b}); }

Regex Regex::alt(const std::vector<Regex>& rs) {
    std::vector<Regex> flat;
    ByteSet cls;
    bool have_cls = false;
    std::vector<Regex> work(rs.rbegin(), rs.rend());
    while (!work.empty()) {
        Regex r = work.back();
        work.pop_back();
        switch (r.kind()) {
            case RegexKind::Bot: break;
            case RegexKind::Alt:
                for (auto it = r.children().rbegin(); it != r.children().rend(); ++it)
                    work.push_back(*it);
                break;
            case RegexKind::Class:
                cls = cls | r.bytes();
                have_cls = true;
                break;
            case RegexKind::Not:
                if (r.children()[0].is_bot()) return r;
                flat.push_back(r);
                break;
            default: flat.push_back(r);
        }
    }
    if (have_cls) flat.push_back(byte_class(cls));
    sort_unique(flat);
    if (flat.empty()) return bot();
    if (flat.size() == 1) return flat[0];
    return RegexFactory::instance().make(RegexKind::Alt, ByteSet{}, std::move(flat));
}

Regex Regex::conj(Regex a, Regex b) {
    std::vector<Regex> flat;
    ByteSet cls = ByteSet::all();
    bool have_cls = false;
    bool have_eps = false;
    std::vector<Regex> work{b, a};
    while (!work.empty()) {
        Regex r = work.back();
        work.pop_back();
        switch (r.kind()) {
            case RegexKind::Bot: return bot();
            case RegexKind::And:
                for (auto it = r.children().rbegin(); it != r.children().rend(); ++it)
                    work.push_back(*it);
                break;
            case RegexKind::Class:
                cls = cls & r.bytes();
                have_cls = true;
                break;
            case RegexKind::Eps: have_eps = true; break;
            case RegexKind::Not:
                if (r.children()[0].is_bot()) break;
                flat.push_back(r);
                break;
            default: flat.push_back(r);
        }
    }
    if (have_cls) {
        if (cls.empty() || have_eps) return bot();
        flat.push_back(byte_class(cls));
    }
    if (have_eps) {
        for (const auto& r : flat)
            if (!r.nullable()) return bot();
        return eps();
    }
    sort_unique(flat);
    for (const auto& r : flat)
        if (r.kind() == RegexKind::Not &&
            std::binary_search(flat.begin(), flat.end(), r.children()[0], RegexLess{}))
            return bot();
    if (flat.empty()) return any_string();
    if (flat.size() == 1) return flat[0];
    return RegexFactory::instance().make(RegexKind::And, ByteSet{}, std::move(flat));
}

Regex Regex::star(Regex r) {
    if (r.kind() == RegexKind::Star) return r;
    if (r.kind() == RegexKind::Eps || r.is_bot()) return eps();
    return RegexFactory::instance().make(RegexKind::Star, ByteSet{}, {r});
}

Regex Regex::neg(Regex r) {
    if (r.kind() == RegexKind::Not) return r.children()[0];
    return RegexFactory::instance().make(RegexKind::Not, ByteSet{}, {r});
}

// ---------------------------------------------------------------- accessors

RegexKind Regex::kind() const { return node_->kind; }
bool Regex::nullable() const { return node_->nullable; }
const ByteSet& Regex::bytes() const { return node_->bytes; }
const std::vector<Regex>& Regex::children() const { return node_->kids; }
std::uint32_t Regex::id() const { return node_->id; }
std::size_t Regex::hash() const { return node_->hash; }

int Regex::compare(const Regex& a, const Regex& b) {
    if (a == b) return 0;
    if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
    if (a.kind() == RegexKind::Class) return a.bytes().compare(b.bytes());
    const auto& ka = a.children();
    const auto& kb = b.children();
    std::size_t n = std::min(ka.size(), kb.size());
    for (std::size_t i = 0; i < n; ++i) {
        int c = compare(ka[i], kb[i]);
        if (c != 0) return c;
    }
    if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
    return 0;
}

// ---------------------------------------------------------------- derivatives

namespace {

Regex compute_deriv(const Regex& r, unsigned char c) {
    const auto& k = r.children();
    switch (r.kind()) {
        case RegexKind::Bot:
        case RegexKind::Eps: return Regex::bot();
        case RegexKind::Class: return r.bytes().contains(c) ? Regex::eps() : Regex::bot();
        case RegexKind::Seq: {
            Regex head = Regex::seq(k[0].deriv(c), k[1]);
            return k[0].nullable() ? Regex::alt(head, k[1].deriv(c)) : head;
        }
        case RegexKind::Alt: {
            std::vector<Regex> ds;
            ds.reserve(k.size());
            for (const auto& x : k) ds.push_back(x.deriv(c));
            return Regex::alt(ds);
        }
        case RegexKind::Star: return Regex::seq(k[0].deriv(c), r);
        case RegexKind::And: {
            Regex acc = Regex::any_string();
            for (const auto& x : k) acc = Regex::conj(acc, x.deriv(c));
            return acc;
        }
        case RegexKind::Not: return Regex::neg(k[0].deriv(c));
    }
    return Regex::bot();
}

}  // namespace

Regex Regex::deriv(unsigned char c) const {
    DerivTable* table = node_->derivs.load(std::memory_order_acquire);
    if (table == nullptr) {
        auto fresh = std::make_unique<DerivTable>();
        for (auto& slot : *fresh) slot.store(nullptr, std::memory_order_relaxed);
        DerivTable* expected = nullptr;
        if (node_->derivs.compare_exchange_strong(expected, fresh.get(), std::memory_order_acq_rel))
            table = fresh.release();
        else
            table = expected;
    }
    const RegexNode* cached = (*table)[c].load(std::memory_order_acquire);
    if (cached != nullptr) return RegexFactory::wrap(cached);
    Regex d = compute_deriv(*this, c);
    (*table)[c].store(d.node(), std::memory_order_release);
    return d;
}

bool matches(const Regex& r, std::string_view word) {
    Regex cur = r;
    for (char ch : word) {
        cur = cur.deriv(static_cast<unsigned char>(ch));
        if (cur.is_bot()) return false;
    }
    return cur.nullable();
}

// ---------------------------------------------------------------- class partition

namespace {

using Labels = std::array<std::uint16_t, 256>;

Labels trivial_labels() {
    Labels l{};
    l.fill(0);
    return l;
}

Labels refine(const Labels& a, const Labels& b) {
    Labels out{};
    std::unordered_map<std::uint32_t, std::uint16_t> ids;
    for (unsigned c = 0; c < 256; ++c) {
        std::uint32_t key = (std::uint32_t{a[c]} << 16) | b[c];
        auto [it, fresh] = ids.emplace(key, static_cast<std::uint16_t>(ids.size()));
        out[c] = it->second;
    }
    return out;
}

Labels approx_classes(const Regex& r) {
    const auto& k = r.children();
    switch (r.kind()) {
        case RegexKind::Bot:
        case RegexKind::Eps: return trivial_labels();
        case RegexKind::Class: {
            Labels l{};
            unsigned char f = r.bytes().first();
            for (unsigned c = 0; c < 256; ++c)
                l[c] = (r.bytes().contains(static_cast<unsigned char>(c)) ==
                        r.bytes().contains(f))
                           ? 0
                           : 1;
            return l;
        }
        case RegexKind::Seq:
            if (k[0].nullable()) return refine(approx_classes(k[0]), approx_classes(k[1]));
            return approx_classes(k[0]);
        case RegexKind::Star:
        case RegexKind::Not: return approx_classes(k[0]);
        case RegexKind::Alt:
        case RegexKind::And: {
            Labels l = trivial_labels();
            for (const auto& x : k) l = refine(l, approx_classes(x));
            return l;
        }
    }
    return trivial_labels();
}

}  // namespace

std::vector<ByteSet> class_partition(const std::vector<Regex>& rs) {
    Labels l = trivial_labels();
    for (const auto& r : rs) l = refine(l, approx_classes(r));
    std::vector<ByteSet> out;
    std::vector<int> slot;
    for (unsigned c = 0; c < 256; ++c) {
        if (l[c] >= slot.size()) slot.resize(l[c] + 1, -1);
        if (slot[l[c]] < 0) {
            slot[l[c]] = static_cast<int>(out.size());
            out.emplace_back();
        }
        out[slot[l[c]]].insert(static_cast<unsigned char>(c));
    }
    return out;
}

std::array<std::uint16_t, 256> class_table(const std::vector<ByteSet>& partition) {
    std::array<std::uint16_t, 256> t{};
    for (std::size_t i = 0; i < partition.size(); ++i)
        for (unsigned c = 0; c < 256; ++c)
            if (partition[i].contains(static_cast<unsigned char>(c)))
                t[c] = static_cast<std::uint16_t>(i);
    return t;
}

// ---------------------------------------------------------------- closure / emptiness

RegexBudgetExceeded::RegexBudgetExceeded(std::size_t n)
    : std::runtime_error("derivative closure exceeded " + std::to_string(n) + " states"),
      states(n) {}

namespace {

template <typename Visit>
void explore(const Regex& r, std::size_t budget, Visit&& visit) {
    std::unordered_set<Regex, RegexHash> seen{r};
    std::deque<Regex> queue{r};
    while (!queue.empty()) {
        Regex cur = queue.front();
        queue.pop_front();
        if (!visit(cur)) return;
        for (const auto& cls : class_partition({cur})) {
            Regex d = cur.deriv(cls.first());
            if (seen.insert(d).second) {
                if (seen.size() > budget) throw RegexBudgetExceeded(budget);
                queue.push_back(d);
            }
        }
    }
}

}  // namespace

std::vector<Regex> derivative_closure(const Regex& r, std::size_t budget) {
    std::vector<Regex> out;
    explore(r, budget, [&](const Regex& x) {
        out.push_back(x);
        return true;
    });
    return out;
}

bool is_empty_language(const Regex& r, std::size_t budget) {
    if (r.is_bot()) return true;
    if (r.nullable()) return false;
    static std::mutex mu;
    static std::unordered_map<std::uint32_t, bool> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(r.id());
        if (it != cache.end()) return it->second;
    }
    bool empty = true;
    explore(r, budget, [&](const Regex& x) {
        if (x.nullable()) empty = false;
        return empty;
    });
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(r.id(), empty);
    return empty;
}

// ---------------------------------------------------------------- printing

std::string escape_byte(unsigned char c, bool in_class) {
    switch (c) {
        case '\n': return "\\n";
        case '\t': return "\\t";
        case '\r': return "\\r";
        case '\\': return "\\\\";
        case '"': return in_class ? "\"" : "\\\"";
        default: break;
    }
    if (in_class && (c == ']' || c == '-' || c == '^' || c == '[')) return std::string("\\") + char(c);
    if (c < 0x20 || c >= 0x7f) {
        static const char* hex = "0123456789abcdef";
        return std::string("\\x") + hex[c >> 4] + hex[c & 15];
    }
    return std::string(1, static_cast<char>(c));
}

namespace {

enum Prec { kAlt = 0, kAnd = 1, kSeq = 2, kNot = 3, kPostfix = 4, kAtom = 5 };

std::string class_body(const ByteSet& s) {
    std::string out;
    for (auto [lo, hi] : s.ranges()) {
        out += escape_byte(lo, true);
        if (hi == lo) continue;
        if (hi > lo + 1) out += '-';
        out += escape_byte(hi, true);
    }
    return out;
}

std::string print_class(const ByteSet& s) {
    if (s.size() == 1) return "\"" + escape_byte(s.first(), false) + "\"";
    if (s.size() == 256) return "[\\x00-\\xff]";
    if (s.size() > 128) return "[^" + class_body(~s) + "]";
    return "[" + class_body(s) + "]";
}

std::string print(const Regex& r, int ctx);

std::string wrap(std::string s, int prec, int ctx) {
    return prec < ctx ? "(" + s + ")" : s;
}

std::string print_seq(const Regex& r, int ctx) {
    std::vector<Regex> items;
    Regex cur = r;
    while (cur.kind() == RegexKind::Seq) {
        items.push_back(cur.children()[0]);
        cur = cur.children()[1];
    }
    items.push_back(cur);

    std::vector<std::string> parts;
    std::string lit;
    auto flush = [&] {
        if (!lit.empty()) parts.push_back("\"" + lit + "\"");
        lit.clear();
    };
    std::size_t i = 0;
    while (i < items.size()) {
        // r r* prints as r+
        bool grouped = false;
        for (std::size_t len = 1; i + len < items.size() && !grouped; ++len) {
            const Regex& next = items[i + len];
            if (next.kind() != RegexKind::Star) continue;
            Regex body = items[i + len - 1];
            for (std::size_t j = i + len - 1; j-- > i;) body = Regex::seq(items[j], body);
            if (next.children()[0] == body) {
                flush();
                parts.push_back(print(body, kAtom) + "+");
                i += len + 1;
                grouped = true;
            }
        }
        if (grouped) continue;
        const Regex& x = items[i];
        if (x.kind() == RegexKind::Class && x.bytes().size() == 1) {
            lit += escape_byte(x.bytes().first(), false);
        } else {
            flush();
            parts.push_back(print(x, kNot));
        }
        ++i;
    }
    flush();
    std::string out;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        if (p) out += ' ';
        out += parts[p];
    }
    return wrap(out, parts.size() == 1 ? kPostfix : kSeq, ctx);
}

std::string print(const Regex& r, int ctx) {
    const auto& k = r.children();
    switch (r.kind()) {
        case RegexKind::Bot: return wrap("!\"\" & \"\"", kAnd, ctx);
        case RegexKind::Eps: return "\"\"";
        case RegexKind::Class: return print_class(r.bytes());
        case RegexKind::Seq: return print_seq(r, ctx);
        case RegexKind::Star: return print(k[0], kAtom) + "*";
        case RegexKind::Not: return wrap("!" + print(k[0], kNot), kNot, ctx);
        case RegexKind::And: {
            std::string out;
            for (std::size_t i = 0; i < k.size(); ++i) {
                if (i) out += " & ";
                out += print(k[i], kSeq);
            }
            return wrap(out, kAnd, ctx);
        }
        case RegexKind::Alt: {
            std::vector<Regex> rest;
            bool has_eps = false;
            for (const auto& x : k) {
                if (x.kind() == RegexKind::Eps) has_eps = true;
                else rest.push_back(x);
            }
            if (has_eps) {
                Regex body = Regex::alt(rest);
                return print(body, kAtom) + "?";
            }
            std::string out;
            for (std::size_t i = 0; i < k.size(); ++i) {
                if (i) out += " | ";
                out += print(k[i], kAnd);
            }
            return wrap(out, kAlt, ctx);
        }
    }
    return "";
}

}  // namespace

std::string Regex::to_string() const { return print(*this, kAlt); }

// ---------------------------------------------------------------- parsing

RegexSyntaxError::RegexSyntaxError(std::size_t off, const std::string& what)
    : std::runtime_error("regex syntax error at offset " + std::to_string(off) + ": " + what),
      offset(off) {}

namespace {

class RegexParser {
public:
    explicit RegexParser(std::string_view t) : text_(t) {}

    Regex parse() {
        Regex r = parse_alt();
        skip_ws();
        if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return r;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw RegexSyntaxError(pos_, what); }

    void skip_ws() {
        while (pos_ < text_.size() &&
               (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
            ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool starts_atom() {
        skip_ws();
        if (pos_ >= text_.size()) return false;
        char c = text_[pos_];
        return c == '(' || c == '"' || c == '[' || c == '!';
    }

    Regex parse_alt() {
        Regex r = parse_and();
        while (peek('|')) {
            ++pos_;
            r = Regex::alt(r, parse_and());
        }
        return r;
    }

    Regex parse_and() {
        Regex r = parse_seq();
        while (peek('&')) {
            ++pos_;
            r = Regex::conj(r, parse_seq());
        }
        return r;
    }

    Regex parse_seq() {
        if (!starts_atom()) fail("expected an expression");
        std::vector<Regex> items;
        while (starts_atom()) items.push_back(parse_unary());
        Regex r = Regex::eps();
        for (auto it = items.rbegin(); it != items.rend(); ++it) r = Regex::seq(*it, r);
        return r;
    }

    Regex parse_unary() {
        if (peek('!')) {
            ++pos_;
            if (!starts_atom()) fail("expected an expression after '!'");
            return Regex::neg(parse_unary());
        }
        return parse_postfix();
    }

    Regex parse_postfix() {
        Regex r = parse_atom();
        for (;;) {
            if (peek('*')) { ++pos_; r = Regex::star(r); }
            else if (peek('+')) { ++pos_; r = Regex::plus(r); }
            else if (peek('?')) { ++pos_; r = Regex::opt(r); }
            else return r;
        }
    }

    Regex parse_atom() {
        skip_ws();
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Regex r = parse_alt();
            if (!peek(')')) fail("expected ')'");
            ++pos_;
            return r;
        }
        if (c == '"') return parse_literal();
        if (c == '[') return parse_class();
        fail("expected an expression");
    }

    unsigned char parse_escape() {
        // pos_ is just past the backslash
        if (pos_ >= text_.size()) fail("unterminated escape");
        char e = text_[pos_++];
        switch (e) {
            case 'n': return '\n';
            case 't': return '\t';
            case 'r': return '\r';
            case '0': return '\0';
            case 'x': {
                auto digit = [&](char h) -> int {
                    if (h >= '0' && h <= '9') return h - '0';
                    if (h >= 'a' && h <= 'f') return h - 'a' + 10;
                    if (h >= 'A' && h <= 'F') return h - 'A' + 10;
                    return -1;
                };
                if (pos_ + 2 > text_.size()) fail("truncated \\x escape");
                int hi = digit(text_[pos_]), lo = digit(text_[pos_ + 1]);
                if (hi < 0 || lo < 0) fail("bad \\x escape");
                pos_ += 2;
                return static_cast<unsigned char>(hi * 16 + lo);
            }
            case '\\': case '"': case ']': case '[': case '-': case '^': return static_cast<unsigned char>(e);
            default: --pos_; fail(std::string("unknown escape \\") + e);
        }
    }

    Regex parse_literal() {
        ++pos_;  // opening quote
        std::string bytes;
        for (;;) {
            if (pos_ >= text_.size()) fail("unterminated string literal");
            char c = text_[pos_++];
            if (c == '"') break;
            if (c == '\\') bytes += static_cast<char>(parse_escape());
            else bytes += c;
        }
        return Regex::literal(bytes);
    }

    Regex parse_class() {
        std::size_t start = pos_;
        ++pos_;  // '['
        bool negated = false;
        if (pos_ < text_.size() && text_[pos_] == '^') {
            negated = true;
            ++pos_;
        }
        ByteSet set;
        auto next_byte = [&]() -> unsigned char {
            char c = text_[pos_++];
            if (c == '\\') return parse_escape();
            return static_cast<unsigned char>(c);
        };
        for (;;) {
            if (pos_ >= text_.size()) fail("unterminated character class");
            if (text_[pos_] == ']') { ++pos_; break; }
            unsigned char lo = next_byte();
            if (pos_ + 1 < text_.size() && text_[pos_] == '-' && text_[pos_ + 1] != ']') {
                ++pos_;
                if (pos_ >= text_.size()) fail("unterminated character class");
                unsigned char hi = next_byte();
                if (hi < lo) fail("inverted range in character class");
                set.insert_range(lo, hi);
            } else {
                set.insert(lo);
            }
        }
        if (negated) set = ~set;
        if (set.empty()) {
            pos_ = start;
            fail("empty character class");
        }
        return Regex::byte_class(set);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Regex parse_regex(std::string_view text) { return RegexParser(text).parse(); }

}  // namespace lpfuse
