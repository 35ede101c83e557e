#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "lpfuse/corpus.hpp"
#include "lpfuse/pipeline.hpp"

namespace fs = std::filesystem;
using namespace lpfuse;

namespace {

enum Exit { kOk = 0, kGrammarError = 1, kParseFailure = 2, kInternal = 3 };

struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

NormalGrammar normalized(const LoadedGrammar& g, bool literal, bool trim) {
    type_of(g.cfe);
    NormalizeOptions opts;
    opts.share_tail_vars = !literal;
    NormalGrammar G = normalize(g.cfe, g.tokens, opts);
    return trim ? trim_unreachable(G) : G;
}

void require_dgnf(const NormalGrammar& G) {
    auto v = check_dgnf(trim_unreachable(G));
    if (!v.empty())
        throw InternalError(std::string("normalized grammar violates DGNF: ") + violation_kind_name(v.front().kind) +
                            " " + v.front().detail);
}

void print_warnings(const LoadedGrammar& g) {
    for (const auto& w : g.warnings) std::cerr << "warning: " << w << "\n";
}

std::string format_word(const Word& w, const TokenNames& names) {
    if (w.empty()) return "<eps>";
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ' ';
        out += names.name(w[i]);
    }
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(static_cast<std::size_t>(std::stoul(item)));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lexer-parser fusion toolkit"};
    app.require_subcommand(1);

    std::string grammar_path;
    auto add_grammar = [&](CLI::App* sub) {
        sub->add_option("grammar", grammar_path, "grammar file")->required()->check(CLI::ExistingFile);
    };

    auto* check = app.add_subcommand("check", "type-check the grammar and print its type");
    add_grammar(check);

    bool no_trim = false, raw = false, stats = false;
    auto* norm = app.add_subcommand("normalize", "print the DGNF grammar");
    add_grammar(norm);
    norm->add_flag("--no-trim", no_trim, "use the literal normalization rules (no tail-variable sharing)");
    norm->add_flag("--raw", raw, "literal rules and no removal of unreachable nonterminals");
    norm->add_flag("--stats", stats, "print nonterminal and production counts to stderr");

    auto* fuse_cmd = app.add_subcommand("fuse", "print the fused grammar");
    add_grammar(fuse_cmd);

    std::string out_path;
    bool emit = false;
    std::string emit_backend = "pseudo";
    auto* compile = app.add_subcommand("compile", "compile the fused grammar to an automaton");
    add_grammar(compile);
    compile->add_option("-o,--output", out_path, "output file (default stdout)");
    compile->add_flag("--emit-source", emit, "write generated source instead of the automaton listing");
    compile->add_option("--lang", emit_backend, "generated source language")->check(CLI::IsMember({"pseudo", "cpp"}));

    std::string input_path;
    std::string backend = "auto";
    bool events = false;
    auto* run = app.add_subcommand("run", "parse an input file (or stdin)");
    add_grammar(run);
    run->add_option("input", input_path, "input file, '-' for stdin");
    run->add_option("--backend", backend, "execution engine")->check(CLI::IsMember({"interp", "auto", "unfused"}));
    run->add_flag("--events", events, "print one line per committed match");

    std::size_t max_len = 4;
    std::string side = "dgnf";
    auto* enumerate = app.add_subcommand("enumerate", "print all token words up to a length");
    add_grammar(enumerate);
    enumerate->add_option("--max-len", max_len, "maximum word length");
    enumerate->add_option("--side", side, "expression semantics or grammar expansion")
        ->check(CLI::IsMember({"cfe", "dgnf"}));

    std::string corpus_dir = "corpus";
    std::string sizes_text = "1,2,4,8";
    std::string pipelines_text = "unfused,interp,auto";
    std::string kind_name;
    int repeat = 5;
    bool generate = false;
    bool steady = false;
    std::uint64_t seed = 1;
    auto* bench = app.add_subcommand("bench", "measure throughput of the three pipelines");
    add_grammar(bench);
    bench->add_option("--corpus-dir", corpus_dir, "directory holding <kind>_<N>mb.txt files");
    bench->add_flag("--generate", generate, "write corpus files before measuring");
    bench->add_option("--sizes", sizes_text, "comma-separated sizes in MiB");
    bench->add_option("--repeat", repeat, "runs per measurement (median reported)");
    bench->add_option("--pipelines", pipelines_text, "comma-separated subset of unfused,interp,auto");
    bench->add_option("--kind", kind_name, "corpus kind (default: grammar file name)");
    bench->add_option("--seed", seed, "generator seed");
    bench->add_flag("--steady", steady, "reuse buffers across runs instead of timing one-shot parses");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kGrammarError;
    }

    try {
        LoadedGrammar g = load_grammar(grammar_path);
        print_warnings(g);

        if (*check) {
            TypeStats ts;
            CfeType t = type_of(g.cfe, &ts);
            std::cout << "null=" << (t.null ? "true" : "false") << " first=" << g.tokens.format(t.first)
                      << " flast=" << g.tokens.format(t.flast) << "\n";
            std::cerr << "fix nodes " << ts.fix_nodes << ", max iterations " << ts.max_fix_iterations
                      << ", expression nodes " << node_count(g.cfe) << "\n";
            return kOk;
        }

        if (*norm) {
            NormalGrammar G = normalized(g, no_trim || raw, !raw);
            require_dgnf(G);
            std::cout << dump(G);
            if (stats)
                std::cerr << "nonterminals " << G.nt_count() << ", productions " << G.production_count() << "\n";
            return kOk;
        }

        if (*enumerate) {
            WordSet ws;
            if (side == "cfe") {
                type_of(g.cfe);
                ws = denote_enumerate(g.cfe, {}, max_len);
            } else {
                NormalGrammar G = normalized(g, false, true);
                ws = expand_enumerate(G, G.start, max_len);
            }
            for (const auto& w : ws) std::cout << format_word(w, g.tokens) << "\n";
            std::cerr << ws.size() << " words\n";
            return kOk;
        }

        NormalGrammar G = normalized(g, false, true);
        require_dgnf(G);
        FusedGrammar F = fuse(g.lexer, G);

        if (*fuse_cmd) {
            std::cout << dump(F);
            return kOk;
        }

        if (*compile) {
            CompiledAutomaton A = compile_automaton(F);
            std::cerr << A.state_count() << " states\n";
            if (emit)
                write_output(out_path, emit_source(A, F, emit_backend == "cpp" ? EmitBackend::Cpp : EmitBackend::Pseudo));
            else
                write_output(out_path, dump(A));
            return kOk;
        }

        if (*run) {
            Toolchain tc(std::move(g));
            std::string input = read_input(input_path);
            if (backend == "unfused") {
                UnfusedOutcome u = tc.run_unfused(input);
                if (!u.lexed) {
                    std::cout << "accepted=false consumed=0 offset=" << u.lex_error << " reason=lex\n";
                    return kParseFailure;
                }
                bool ok = u.accepted();
                std::cout << "accepted=" << (ok ? "true" : "false") << " consumed=" << u.consumed;
                if (!u.parse.ok())
                    std::cout << " token=" << u.parse.fail->token_index
                              << " nonterminal=" << tc.grammar.names[u.parse.fail->nonterminal];
                else if (!ok)
                    std::cout << " token=" << u.parse.remainder << " reason=trailing";
                std::cout << "\n";
                return ok ? kOk : kParseFailure;
            }
            ParseOutcome o = backend == "interp" ? fparse_interp(tc.fused, input, events)
                                                 : run_automaton(tc.automaton, input, events);
            for (const auto& e : o.events)
                std::cout << "event " << tc.fused.names[e.nonterminal] << " " << e.production << " " << e.start
                          << " " << e.end << "\n";
            bool ok = tc.fused_accepts(input, o);
            std::cout << "accepted=" << (ok ? "true" : "false") << " consumed=" << o.consumed;
            if (o.failure)
                std::cout << " offset=" << o.failure->offset
                          << " nonterminal=" << tc.fused.names[o.failure->nonterminal];
            else if (!ok)
                std::cout << " offset=" << o.consumed << " reason=trailing";
            std::cout << "\n";
            return ok ? kOk : kParseFailure;
        }

        if (*bench) {
            std::string stem = fs::path(grammar_path).stem().string();
            auto kind = corpus_kind_from_name(kind_name.empty() ? stem : kind_name);
            if (!kind) throw std::runtime_error("unknown corpus kind '" + (kind_name.empty() ? stem : kind_name) + "'");
            std::vector<Pipeline> pipes;
            std::stringstream ps(pipelines_text);
            std::string item;
            while (std::getline(ps, item, ',')) {
                if (item == "unfused") pipes.push_back(Pipeline::Unfused);
                else if (item == "interp") pipes.push_back(Pipeline::Interp);
                else if (item == "auto") pipes.push_back(Pipeline::Auto);
                else throw std::runtime_error("unknown pipeline '" + item + "'");
            }
            Toolchain tc(std::move(g));
            auto sizes = parse_sizes(sizes_text);
            std::vector<std::string> inputs;
            for (std::size_t mb : sizes) {
                fs::path file = fs::path(corpus_dir) / (std::string(corpus_kind_name(*kind)) + "_" +
                                                        std::to_string(mb) + "mb.txt");
                if (generate) {
                    fs::create_directories(corpus_dir);
                    write_output(file.string(), generate_corpus(*kind, mb << 20, seed));
                }
                inputs.push_back(read_input(file.string()));
            }
            // Every pipeline must accept every file before any timing is reported.
            for (const auto& in : inputs)
                for (Pipeline p : pipes) {
                    try {
                        time_pipeline(tc, p, in);
                    } catch (const std::runtime_error& e) {
                        std::cerr << "error: " << e.what() << " (" << in.size() << " bytes)\n";
                        return kParseFailure;
                    }
                }
            std::cout << bench_csv_header() << "\n";
            for (const auto& in : inputs)
                for (Pipeline p : pipes)
                    std::cout << bench_csv_row(bench_one(tc, p, in, repeat, steady ? Timing::Steady : Timing::OneShot))
                              << std::endl;
            return kOk;
        }
    } catch (const GrammarError& e) {
        std::cerr << "grammar error: " << grammar_path << ":" << e.what() << "\n";
        return kGrammarError;
    } catch (const TypeError& e) {
        std::cerr << "type error: " << type_error_kind_name(e.kind) << ": " << e.what() << "\n";
        return kGrammarError;
    } catch (const MissingTokenRule& e) {
        std::cerr << "fusion error: " << e.what() << "\n";
        return kGrammarError;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    } catch (const NormalizeError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    } catch (const StateBudgetExceeded& e) {
        std::cerr << "compile error: " << e.what() << "\n";
        return kGrammarError;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kGrammarError;
    }
    return kOk;
}
