#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lpfuse/fusion.hpp"

namespace lpfuse {

struct ParseEvent {
    NtId nonterminal;
    std::uint32_t production;  // ordinal within the nonterminal's fused productions
    std::size_t start;
    std::size_t end;
    bool operator==(const ParseEvent& o) const {
        return nonterminal == o.nonterminal && production == o.production && start == o.start &&
               end == o.end;
    }
};

struct ParseFailure {
    std::size_t offset;
    NtId nonterminal;
    bool operator==(const ParseFailure& o) const {
        return offset == o.offset && nonterminal == o.nonterminal;
    }
};

struct ParseOutcome {
    bool accepted = false;
    std::size_t consumed = 0;
    std::optional<ParseFailure> failure;
    std::vector<ParseEvent> events;

    bool operator==(const ParseOutcome& o) const {
        return accepted == o.accepted && consumed == o.consumed && failure == o.failure &&
               events == o.events;
    }
};

/// Direct interpreter over a fused grammar: per-byte derivatives of the live
/// regexes, longest match, and an explicit stack of pending nonterminals.
ParseOutcome fparse_interp(const FusedGrammar& F, std::string_view input, bool emit_events = false,
                           ScanStats* stats = nullptr);
ParseOutcome fparse_interp_from(const FusedGrammar& F, NtId start, std::string_view input,
                                bool emit_events = false, ScanStats* stats = nullptr);

class StateBudgetExceeded : public std::runtime_error {
public:
    explicit StateBudgetExceeded(std::size_t n);
};

inline constexpr std::size_t kAutomatonStateBudget = 1000000;

/// Precompiled fused parser. Each state is a nonterminal together with the
/// vector of live (production, regex) pairs; bytes are dispatched through a
/// per-state class table.
class CompiledAutomaton {
public:
    static constexpr std::int32_t kExhaust = -1;

    struct State {
        NtId nt;
        std::vector<std::pair<std::uint32_t, Regex>> live;  // (production ordinal, derivative)
        bool lookahead;                                      // nonterminal has a lookahead production
        std::vector<ByteSet> classes;
        std::vector<std::int32_t> class_target;              // per class: state or kExhaust
    };

    std::size_t state_count() const { return states_.size(); }
    const State& state(std::size_t s) const { return states_[s]; }
    std::int32_t entry(NtId n) const { return entry_[n]; }
    NtId start() const { return start_; }
    std::size_t nt_count() const { return entry_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    /// Transition for byte c from state s: target state or kExhaust.
    std::int32_t next(std::size_t s, unsigned char c) const { return next_[s * 256 + c]; }
    /// Global production slot committed on entering s, or -1.
    std::int32_t accept(std::size_t s) const { return accept_[s]; }
    bool terminal(std::size_t s) const { return terminal_[s] != 0; }
    bool has_lookahead(NtId n) const { return lookahead_[n] != 0; }

    /// Production slot metadata.
    NtId slot_nt(std::size_t slot) const { return slot_nt_[slot]; }
    std::uint32_t slot_ordinal(std::size_t slot) const { return slot_ord_[slot]; }
    const NtId* slot_tail_begin(std::size_t slot) const { return tails_.data() + tail_begin_[slot]; }
    const NtId* slot_tail_end(std::size_t slot) const { return tails_.data() + tail_end_[slot]; }
    std::size_t slot_count() const { return slot_nt_.size(); }

    const std::uint16_t* class_row(std::size_t s) const { return class_ids_.data() + s * 256; }

    /// Packed transitions, 256 per state: kExhaust, or the target state with
    /// kCommits set when the target commits a slot and kEnds set when the
    /// target has no outgoing transitions.
    static constexpr std::int32_t kCommits = 1 << 29;
    static constexpr std::int32_t kEnds = 1 << 30;
    static constexpr std::int32_t kStateMask = kCommits - 1;
    const std::int32_t* step_table() const { return step_.data(); }
    const std::int32_t* accept_table() const { return accept_.data(); }

private:
    friend CompiledAutomaton compile_automaton(const FusedGrammar& F, std::size_t budget);

    NtId start_ = 0;
    std::vector<std::string> names_;
    std::vector<State> states_;
    std::vector<std::int32_t> entry_;
    std::vector<std::uint8_t> lookahead_;
    std::vector<std::int32_t> next_;
    std::vector<std::int32_t> step_;
    std::vector<std::uint16_t> class_ids_;
    std::vector<std::int32_t> accept_;
    std::vector<std::uint8_t> terminal_;
    std::vector<NtId> slot_nt_;
    std::vector<std::uint32_t> slot_ord_;
    std::vector<std::uint32_t> tail_begin_, tail_end_;
    std::vector<NtId> tails_;  // stored reversed, ready to push
};

CompiledAutomaton compile_automaton(const FusedGrammar& F, std::size_t budget = kAutomatonStateBudget);

/// Reusable buffers so repeated runs do not allocate.
struct RunScratch {
    std::vector<NtId> stack;
};

ParseOutcome run_automaton(const CompiledAutomaton& A, std::string_view input, bool emit_events = false,
                           ScanStats* stats = nullptr);
ParseOutcome run_automaton_from(const CompiledAutomaton& A, NtId start, std::string_view input,
                                bool emit_events = false, ScanStats* stats = nullptr);
/// Recognition only; reuses `scratch` and performs no allocation once it is warm.
ParseOutcome run_automaton_fast(const CompiledAutomaton& A, std::string_view input, RunScratch& scratch);

/// Per-state listing of class ranges and actions.
std::string dump(const CompiledAutomaton& A);

enum class EmitBackend { Pseudo, Cpp };

/// Source text with one function per automaton state.
std::string emit_source(const CompiledAutomaton& A, const FusedGrammar& F,
                        EmitBackend backend = EmitBackend::Pseudo);

/// Number of state functions emit_source produces.
std::size_t emitted_function_count(const CompiledAutomaton& A);

}  // namespace lpfuse
