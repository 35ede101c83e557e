#include <sstream>

#include "lpfuse/engine.hpp"

namespace lpfuse {

namespace {

std::string pseudo_char(unsigned b) {
    if (b == 0) return "'\\000'";
    if (b == '\n') return "'\\n'";
    if (b == '\t') return "'\\t'";
    if (b == '\r') return "'\\r'";
    if (b == '\'' || b == '\\') return std::string("'\\") + static_cast<char>(b) + "'";
    if (b >= 32 && b < 127) return std::string("'") + static_cast<char>(b) + "'";
    static const char* hex = "0123456789abcdef";
    return std::string("'\\x") + hex[b >> 4] + hex[b & 15] + "'";
}

std::string cpp_char(unsigned b) {
    if (b >= 32 && b < 127 && b != '\'' && b != '\\') return std::string("'") + static_cast<char>(b) + "'";
    return std::to_string(b);
}

// Byte ranges of a class with byte 0 split off, since it needs the end-of-input guard.
std::vector<std::pair<unsigned, unsigned>> arm_ranges(const ByteSet& cls) {
    std::vector<std::pair<unsigned, unsigned>> out;
    for (auto [lo, hi] : cls.ranges()) {
        if (lo == 0 && hi > 0) {
            out.emplace_back(1u, unsigned(hi));
            continue;
        }
        if (lo == 0) continue;
        out.emplace_back(lo, hi);
    }
    return out;
}

struct EmitInfo {
    std::vector<std::uint8_t> has_incoming;
    std::vector<std::int32_t> entry_for;  // nonterminal whose entry state this is, or -1
};

EmitInfo analyse(const CompiledAutomaton& A) {
    EmitInfo info;
    info.has_incoming.assign(A.state_count(), 0);
    info.entry_for.assign(A.state_count(), -1);
    for (std::size_t s = 0; s < A.state_count(); ++s)
        for (auto t : A.state(s).class_target)
            if (t >= 0) info.has_incoming[static_cast<std::size_t>(t)] = 1;
    for (NtId n = 0; n < A.nt_count(); ++n) {
        auto e = static_cast<std::size_t>(A.entry(n));
        if (info.entry_for[e] < 0) info.entry_for[e] = static_cast<std::int32_t>(n);
    }
    return info;
}

// Continuation known without looking at runtime state: only for entry states no
// transition leads back into.
const char* static_exit(const CompiledAutomaton& A, const EmitInfo& info, std::size_t s) {
    if (info.has_incoming[s] || info.entry_for[s] < 0) return nullptr;
    return A.has_lookahead(static_cast<NtId>(info.entry_for[s])) ? "back" : "no";
}

std::string pseudo_action(const CompiledAutomaton& A, std::int32_t t, const char* exit_text) {
    if (t == CompiledAutomaton::kExhaust) return exit_text;
    std::ostringstream os;
    auto ts = static_cast<std::size_t>(t);
    std::int32_t acc = A.accept(ts);
    std::string k = "k";
    if (acc >= 0) {
        auto slot = static_cast<std::size_t>(acc);
        k = "(on p" + std::to_string(A.slot_ordinal(slot)) + " (i + 1))";
    }
    os << "parse_" << t << " r (i + 1) len s " << k;
    return os.str();
}

std::string emit_pseudo(const CompiledAutomaton& A) {
    auto info = analyse(A);
    std::ostringstream os;
    for (std::size_t s = 0; s < A.state_count(); ++s) {
        const auto& st = A.state(s);
        const char* fixed = static_exit(A, info, s);
        std::string exit_text = fixed == nullptr ? "step k" : std::string(fixed) == "back" ? "r" : "fail r";
        os << (s == 0 ? "let rec" : "and") << " parse_" << s << " r i len s k = match s.[i] with";
        os << "  (* " << A.names()[st.nt] << " *)\n";
        std::string nul_action = exit_text;
        for (std::size_t c = 0; c < st.classes.size(); ++c) {
            std::string action = pseudo_action(A, st.class_target[c], exit_text.c_str());
            if (st.classes[c].contains(0)) nul_action = action;
            auto rs = arm_ranges(st.classes[c]);
            if (rs.empty() || st.class_target[c] == CompiledAutomaton::kExhaust) continue;
            os << "   |";
            for (std::size_t j = 0; j < rs.size(); ++j) {
                if (j) os << "|";
                os << ' ' << pseudo_char(rs[j].first);
                if (rs[j].second != rs[j].first) os << ".." << pseudo_char(rs[j].second);
                os << ' ';
            }
            os << "-> " << action << "\n";
        }
        os << "   | '\\000' -> if i = len then " << exit_text << " else " << nul_action << "\n";
        os << "   | _ -> " << exit_text << "\n";
    }
    return os.str();
}

std::string cpp_action(const CompiledAutomaton& A, std::int32_t t, const std::string& exit_text) {
    if (t == CompiledAutomaton::kExhaust) return "return " + exit_text + ";";
    auto ts = static_cast<std::size_t>(t);
    std::int32_t acc = A.accept(ts);
    if (acc >= 0) {
        std::string res = "Res{" + std::to_string(acc) + ", i + 1}";
        return "return parse_" + std::to_string(t) + "(c, i + 1, " + res + ");";
    }
    return "return parse_" + std::to_string(t) + "(c, i + 1, best);";
}

std::string emit_cpp(const CompiledAutomaton& A) {
    auto info = analyse(A);
    std::ostringstream os;
    os << "// Generated parser: one function per automaton state.\n"
          "// The input buffer must hold a NUL byte at index len.\n"
          "#include <cstddef>\n#include <cstdint>\n#include <vector>\n\n"
          "namespace lpfuse_generated {\n\n"
          "struct Ctx {\n    const unsigned char* s;\n    std::size_t len;\n};\n"
          "struct Res {\n    std::int32_t slot;  // -1 fail, -2 back, otherwise committed production slot\n"
          "    std::size_t pos;\n};\n"
          "struct Outcome {\n    bool accepted;\n    std::size_t consumed;\n    std::uint32_t failed_nt;\n};\n\n";
    for (std::size_t s = 0; s < A.state_count(); ++s)
        os << "static Res parse_" << s << "(const Ctx& c, std::size_t i, Res best);\n";
    os << "\n";
    for (std::size_t s = 0; s < A.state_count(); ++s) {
        const auto& st = A.state(s);
        const char* fixed = static_exit(A, info, s);
        std::string exit_text = "best";
        if (fixed != nullptr)
            exit_text = std::string(fixed) == "back" ? "Res{-2, best.pos}" : "Res{-1, best.pos}";
        os << "// " << A.names()[st.nt] << "\n";
        os << "static Res parse_" << s << "(const Ctx& c, std::size_t i, Res best) {\n";
        os << "    switch (c.s[i]) {\n";
        std::string nul_action = "return " + exit_text + ";";
        for (std::size_t cl = 0; cl < st.classes.size(); ++cl) {
            std::string action = cpp_action(A, st.class_target[cl], exit_text);
            if (st.classes[cl].contains(0)) nul_action = action;
            if (st.class_target[cl] == CompiledAutomaton::kExhaust) continue;
            auto rs = arm_ranges(st.classes[cl]);
            if (rs.empty()) continue;
            for (auto [lo, hi] : rs) {
                os << "        case " << cpp_char(lo);
                if (hi != lo) os << " ... " << cpp_char(hi);
                os << ":\n";
            }
            os << "            " << action << "\n";
        }
        os << "        case 0:\n            if (i == c.len) return " << exit_text << ";\n            "
           << nul_action << "\n";
        os << "        default:\n            return " << exit_text << ";\n";
        os << "    }\n}\n\n";
    }

    os << "static const std::int32_t kEntry[] = {";
    for (NtId n = 0; n < A.nt_count(); ++n) os << (n ? ", " : "") << A.entry(n);
    os << "};\nstatic const bool kLookahead[] = {";
    for (NtId n = 0; n < A.nt_count(); ++n) os << (n ? ", " : "") << (A.has_lookahead(n) ? "true" : "false");
    os << "};\n";
    os << "static const std::uint32_t kTailBegin[] = {";
    std::vector<NtId> tails;
    std::vector<std::size_t> ends;
    for (std::size_t slot = 0; slot < A.slot_count(); ++slot) {
        os << (slot ? ", " : "") << tails.size();
        tails.insert(tails.end(), A.slot_tail_begin(slot), A.slot_tail_end(slot));
        ends.push_back(tails.size());
    }
    if (A.slot_count() == 0) os << "0";
    os << "};\nstatic const std::uint32_t kTailEnd[] = {";
    for (std::size_t slot = 0; slot < ends.size(); ++slot) os << (slot ? ", " : "") << ends[slot];
    if (ends.empty()) os << "0";
    os << "};\nstatic const std::uint32_t kTails[] = {";
    for (std::size_t j = 0; j < tails.size(); ++j) os << (j ? ", " : "") << tails[j];
    if (tails.empty()) os << "0";
    os << "};\n\n";

    os << "static Res enter(std::uint32_t n, const Ctx& c, std::size_t i) {\n"
          "    Res k{kLookahead[n] ? -2 : -1, i};\n"
          "    switch (kEntry[n]) {\n";
    std::vector<std::uint8_t> seen(A.state_count(), 0);
    for (NtId n = 0; n < A.nt_count(); ++n) {
        auto e = static_cast<std::size_t>(A.entry(n));
        if (seen[e]) continue;
        seen[e] = 1;
        os << "        case " << e << ": return parse_" << e << "(c, i, k);\n";
    }
    os << "        default: return k;\n    }\n}\n\n";

    os << "inline Outcome parse(const char* text, std::size_t len) {\n"
          "    Ctx c{reinterpret_cast<const unsigned char*>(text), len};\n"
          "    std::vector<std::uint32_t> stack{"
       << A.start()
       << "u};\n"
          "    std::size_t pos = 0;\n"
          "    while (!stack.empty()) {\n"
          "        std::uint32_t n = stack.back();\n"
          "        stack.pop_back();\n"
          "        Res r = enter(n, c, pos);\n"
          "        if (r.slot == -1) return Outcome{false, pos, n};\n"
          "        if (r.slot == -2) continue;\n"
          "        pos = r.pos;\n"
          "        auto slot = static_cast<std::size_t>(r.slot);\n"
          "        stack.insert(stack.end(), kTails + kTailBegin[slot], kTails + kTailEnd[slot]);\n"
          "    }\n"
          "    return Outcome{true, pos, 0};\n"
          "}\n\n"
          "}  // namespace lpfuse_generated\n";
    return os.str();
}

}  // namespace

std::string emit_source(const CompiledAutomaton& A, const FusedGrammar& F, EmitBackend backend) {
    (void)F;
    return backend == EmitBackend::Cpp ? emit_cpp(A) : emit_pseudo(A);
}

std::size_t emitted_function_count(const CompiledAutomaton& A) { return A.state_count(); }

}  // namespace lpfuse
