#include "lpfuse/engine.hpp"

#include <map>
#include <sstream>

namespace lpfuse {

// ---------------------------------------------------------------- interpreter

namespace {

enum class Cont : std::uint8_t { No, Back, On };

std::vector<std::uint16_t> live_classes(const std::vector<std::pair<std::uint32_t, Regex>>& live) {
    std::vector<Regex> rs;
    rs.reserve(live.size());
    for (const auto& [o, r] : live) rs.push_back(r);
    auto t = class_table(class_partition(rs));
    return {t.begin(), t.end()};
}

}  // namespace

ParseOutcome fparse_interp(const FusedGrammar& F, std::string_view input, bool emit_events,
                           ScanStats* stats) {
    return fparse_interp_from(F, F.start, input, emit_events, stats);
}

ParseOutcome fparse_interp_from(const FusedGrammar& F, NtId start, std::string_view input,
                                bool emit_events, ScanStats* stats) {
    ParseOutcome out;
    std::vector<NtId> stack{start};
    std::vector<std::pair<std::uint32_t, Regex>> live, next;
    std::size_t pos = 0;
    const std::size_t len = input.size();

    while (!stack.empty()) {
        NtId n = stack.back();
        stack.pop_back();
        live.clear();
        const auto& prods = F.prods[n];
        for (std::uint32_t o = 0; o < prods.size(); ++o)
            if (prods[o].kind == FusedKind::Match) live.emplace_back(o, prods[o].regex);

        Cont k = F.has_lookahead(n) ? Cont::Back : Cont::No;
        std::uint32_t on_prod = 0;
        std::size_t best = pos;
        std::size_t i = pos;
        for (;;) {
            if (i >= len) {
                if (stats) stats->reached_end = true;
                break;
            }
            auto c = static_cast<unsigned char>(input[i]);
            if (stats) {
                ++stats->bytes_inspected;
                if (stats->probe_pos == i && !stats->probe_hit) {
                    auto cls = live_classes(live);
                    std::size_t back = k == Cont::Back ? pos : k == Cont::On ? best : i;
                    stats->record_probe(i, k == Cont::No, cls.data(), back);
                    auto& st = stats->probe_state;
                    st.insert(st.end(), {1, n, static_cast<std::int64_t>(k), on_prod, stats->rel(pos),
                                         stats->rel(best), static_cast<std::int64_t>(live.size())});
                    for (const auto& [o, r] : live) st.insert(st.end(), {o, r.id()});
                    st.insert(st.end(), stack.begin(), stack.end());
                }
            }
            next.clear();
            for (const auto& [o, r] : live) {
                Regex d = r.deriv(c);
                if (!d.is_bot()) next.emplace_back(o, d);
            }
            if (next.empty()) break;
            ++i;
            live.swap(next);
            for (const auto& [o, r] : live)
                if (r.nullable()) {
                    k = Cont::On;
                    on_prod = o;
                    best = i;
                    break;
                }
        }

        switch (k) {
            case Cont::No:
                out.accepted = false;
                out.consumed = pos;
                out.failure = ParseFailure{pos, n};
                return out;
            case Cont::Back: break;
            case Cont::On: {
                if (emit_events) out.events.push_back({n, on_prod, pos, best});
                pos = best;
                const auto& tail = prods[on_prod].tail;
                stack.insert(stack.end(), tail.rbegin(), tail.rend());
                break;
            }
        }
    }
    out.accepted = true;
    out.consumed = pos;
    return out;
}

// ---------------------------------------------------------------- compilation

StateBudgetExceeded::StateBudgetExceeded(std::size_t n)
    : std::runtime_error("automaton exceeds " + std::to_string(n) + " states") {}

namespace {

struct StateKey {
    NtId nt;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> live;  // (ordinal, regex id)
    bool operator<(const StateKey& o) const {
        if (nt != o.nt) return nt < o.nt;
        return live < o.live;
    }
};

}  // namespace

CompiledAutomaton compile_automaton(const FusedGrammar& F, std::size_t budget) {
    budget = std::min<std::size_t>(budget, CompiledAutomaton::kStateMask);
    CompiledAutomaton A;
    A.start_ = F.start;
    A.names_ = F.names;
    const std::size_t N = F.prods.size();

    std::vector<std::vector<std::int32_t>> slot_of(N);
    for (NtId n = 0; n < N; ++n) {
        slot_of[n].assign(F.prods[n].size(), -1);
        A.lookahead_.push_back(F.has_lookahead(n) ? 1 : 0);
        for (std::uint32_t o = 0; o < F.prods[n].size(); ++o) {
            const auto& p = F.prods[n][o];
            if (p.kind != FusedKind::Match) continue;
            slot_of[n][o] = static_cast<std::int32_t>(A.slot_nt_.size());
            A.slot_nt_.push_back(n);
            A.slot_ord_.push_back(o);
            A.tail_begin_.push_back(static_cast<std::uint32_t>(A.tails_.size()));
            A.tails_.insert(A.tails_.end(), p.tail.rbegin(), p.tail.rend());
            A.tail_end_.push_back(static_cast<std::uint32_t>(A.tails_.size()));
        }
    }

    std::map<StateKey, std::int32_t> index;
    using Live = std::vector<std::pair<std::uint32_t, Regex>>;
    auto intern = [&](NtId n, Live live, bool entry) -> std::int32_t {
        Live kept;
        for (auto& e : live)
            if (!e.second.is_bot() && !is_empty_language(e.second)) kept.push_back(e);
        if (kept.empty() && !entry) return CompiledAutomaton::kExhaust;
        StateKey key{n, {}};
        for (const auto& [o, r] : kept) key.live.emplace_back(o, r.id());
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        if (A.states_.size() >= budget) throw StateBudgetExceeded(budget);
        auto id = static_cast<std::int32_t>(A.states_.size());
        index.emplace(std::move(key), id);
        std::int32_t acc = -1;
        for (const auto& [o, r] : kept)
            if (r.nullable()) {
                acc = slot_of[n][o];
                break;
            }
        A.states_.push_back({n, std::move(kept), A.lookahead_[n] != 0, {}, {}});
        A.accept_.push_back(acc);
        return id;
    };

    for (NtId n = 0; n < N; ++n) {
        Live live;
        for (std::uint32_t o = 0; o < F.prods[n].size(); ++o)
            if (F.prods[n][o].kind == FusedKind::Match) live.emplace_back(o, F.prods[n][o].regex);
        A.entry_.push_back(intern(n, std::move(live), true));
    }

    for (std::size_t s = 0; s < A.states_.size(); ++s) {
        std::vector<Regex> rs;
        for (const auto& [o, r] : A.states_[s].live) rs.push_back(r);
        auto parts = class_partition(rs);
        std::vector<std::int32_t> targets(parts.size(), CompiledAutomaton::kExhaust);
        for (std::size_t p = 0; p < parts.size(); ++p) {
            if (rs.empty()) break;
            unsigned char c = parts[p].first();
            Live next;
            for (const auto& [o, r] : A.states_[s].live) next.emplace_back(o, r.deriv(c));
            targets[p] = intern(A.states_[s].nt, std::move(next), false);
        }
        A.states_[s].classes = parts;
        A.states_[s].class_target = targets;
    }

    const std::size_t S = A.states_.size();
    A.next_.assign(S * 256, CompiledAutomaton::kExhaust);
    A.class_ids_.assign(S * 256, 0);
    A.terminal_.assign(S, 1);
    for (std::size_t s = 0; s < S; ++s) {
        const auto& st = A.states_[s];
        auto table = class_table(st.classes);
        for (unsigned c = 0; c < 256; ++c) {
            A.class_ids_[s * 256 + c] = table[c];
            A.next_[s * 256 + c] = st.class_target[table[c]];
            if (st.class_target[table[c]] != CompiledAutomaton::kExhaust) A.terminal_[s] = 0;
        }
    }
    A.step_.resize(A.next_.size());
    for (std::size_t k = 0; k < A.next_.size(); ++k) {
        std::int32_t t = A.next_[k];
        std::int32_t packed = t;
        if (t >= 0) {
            if (A.accept_[static_cast<std::size_t>(t)] >= 0) packed |= CompiledAutomaton::kCommits;
            if (A.terminal_[static_cast<std::size_t>(t)]) packed |= CompiledAutomaton::kEnds;
        }
        A.step_[k] = packed;
    }
    return A;
}

// ---------------------------------------------------------------- runtime

namespace {

constexpr std::int32_t kNo = -1;
constexpr std::int32_t kBack = -2;

template <bool kEvents, bool kStats>
ParseOutcome run_impl(const CompiledAutomaton& A, NtId start, std::string_view input,
                      std::vector<NtId>& stack, ScanStats* stats) {
    ParseOutcome out;
    if (stack.size() < 64) stack.resize(64);
    std::size_t top = 0;
    stack[top++] = start;
    const auto* data = reinterpret_cast<const unsigned char*>(input.data());
    const std::size_t len = input.size();
    const std::int32_t* step = A.step_table();
    const std::int32_t* accept = A.accept_table();
    std::size_t pos = 0;

    while (top != 0) {
        NtId n = stack[--top];
        auto s = static_cast<std::size_t>(A.entry(n));
        std::int32_t best_slot = A.has_lookahead(n) ? kBack : kNo;
        std::size_t best = pos;
        std::size_t i = pos;
        if (!A.terminal(s)) {
            for (;;) {
                if (i >= len) {
                    if constexpr (kStats) stats->reached_end = true;
                    break;
                }
                if constexpr (kStats) {
                    ++stats->bytes_inspected;
                    if (stats->record_probe(i, best_slot == kNo, A.class_row(s),
                                            best_slot == kBack ? pos : best_slot >= 0 ? best : i)) {
                        auto& st = stats->probe_state;
                        st.insert(st.end(), {2, static_cast<std::int64_t>(s), best_slot, stats->rel(pos),
                                             stats->rel(best)});
                        st.insert(st.end(), stack.begin(), stack.begin() + static_cast<std::ptrdiff_t>(top));
                    }
                }
                std::int32_t t = step[s * 256 + data[i]];
                if (t < 0) break;
                s = static_cast<std::size_t>(t & CompiledAutomaton::kStateMask);
                ++i;
                if (t & CompiledAutomaton::kCommits) {
                    best_slot = accept[s];
                    best = i;
                    if (t & CompiledAutomaton::kEnds) break;
                }
            }
        }
        if (best_slot == kNo) {
            out.consumed = pos;
            out.failure = ParseFailure{pos, n};
            return out;
        }
        if (best_slot == kBack) continue;
        auto slot = static_cast<std::size_t>(best_slot);
        if constexpr (kEvents) out.events.push_back({n, A.slot_ordinal(slot), pos, best});
        pos = best;
        const NtId* tail = A.slot_tail_begin(slot);
        const NtId* tail_end = A.slot_tail_end(slot);
        if (top + static_cast<std::size_t>(tail_end - tail) > stack.size()) stack.resize(2 * stack.size() + 16);
        while (tail != tail_end) stack[top++] = *tail++;
    }
    out.accepted = true;
    out.consumed = pos;
    return out;
}

}  // namespace

ParseOutcome run_automaton(const CompiledAutomaton& A, std::string_view input, bool emit_events,
                           ScanStats* stats) {
    return run_automaton_from(A, A.start(), input, emit_events, stats);
}

ParseOutcome run_automaton_from(const CompiledAutomaton& A, NtId start, std::string_view input,
                                bool emit_events, ScanStats* stats) {
    std::vector<NtId> stack;
    if (stats) {
        return emit_events ? run_impl<true, true>(A, start, input, stack, stats)
                           : run_impl<false, true>(A, start, input, stack, stats);
    }
    return emit_events ? run_impl<true, false>(A, start, input, stack, nullptr)
                       : run_impl<false, false>(A, start, input, stack, nullptr);
}

ParseOutcome run_automaton_fast(const CompiledAutomaton& A, std::string_view input, RunScratch& scratch) {
    return run_impl<false, false>(A, A.start(), input, scratch.stack, nullptr);
}

// ---------------------------------------------------------------- dump

namespace {

std::string quoted(unsigned char c) {
    if (c == '\'') return "'\\''";
    return "'" + escape_byte(c, false) + "'";
}

std::string ranges_text(const ByteSet& s) {
    std::string out;
    for (auto [lo, hi] : s.ranges()) {
        if (!out.empty()) out += ' ';
        out += quoted(lo);
        if (hi != lo) out += ".." + quoted(hi);
    }
    return out;
}

}  // namespace

std::string dump(const CompiledAutomaton& A) {
    std::ostringstream os;
    os << "states " << A.state_count() << "\n";
    for (NtId n = 0; n < A.nt_count(); ++n)
        os << "entry " << A.names()[n] << " = s" << A.entry(n) << (A.has_lookahead(n) ? " (back)" : "")
           << "\n";
    for (std::size_t s = 0; s < A.state_count(); ++s) {
        const auto& st = A.state(s);
        os << "s" << s << " [" << A.names()[st.nt] << "]";
        if (A.accept(s) >= 0) os << " commits p" << A.slot_ordinal(static_cast<std::size_t>(A.accept(s)));
        os << "\n";
        for (const auto& [o, r] : st.live) os << "  live p" << o << " " << r.to_string() << "\n";
        for (std::size_t c = 0; c < st.classes.size(); ++c) {
            os << "  " << ranges_text(st.classes[c]) << " -> ";
            std::int32_t t = st.class_target[c];
            if (t == CompiledAutomaton::kExhaust) {
                os << "exhaust\n";
                continue;
            }
            std::int32_t acc = A.accept(static_cast<std::size_t>(t));
            if (acc >= 0) os << "commit p" << A.slot_ordinal(static_cast<std::size_t>(acc)) << ", ";
            os << "goto s" << t << "\n";
        }
    }
    return os.str();
}

}  // namespace lpfuse
