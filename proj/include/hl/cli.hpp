#pragma once

// Command implementations behind the `hl` executable. Each command reads its
// inputs, writes one JSON report and returns an exit code, so the commands can
// be driven in-process as well as from the command line.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hl/experiments.hpp"
#include "hl/requests.hpp"
#include "hl/trace_domain.hpp"

namespace hl::cli {

namespace fs = std::filesystem;

enum ExitCode : int { Holds = 0, Fails = 1, Error = 2 };

struct RunConfig {
    std::string command;
    std::string program;      // program file
    std::string space;        // space file or inline JSON
    std::size_t max_length = 8;
    std::string rule;          // defaults to "upper"
    std::string pre;          // triple or hyperset file, or inline JSON
    std::string post;         // explicit consequent set for lower rules
    std::string post_oracle;  // oracle name, or a file / inline JSON
    std::string request;      // full rule request; the other fields override it
    std::string lattice = "diamond";
    std::string op;
    std::string set = "[]";
    std::string data = "data/selftest";
    std::string filter;
    bool compact = false;
};

struct CommandResult {
    int code = Holds;
    std::string out;
    std::string err;
};

// ============================================================================
// Input helpers
// ============================================================================

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(origin + ": " + e.what());
    }
}

inline bool looks_inline(const std::string& arg) {
    auto p = arg.find_first_not_of(" \t\n");
    return p != std::string::npos && (arg[p] == '{' || arg[p] == '[' || arg[p] == '"');
}

/// Inline JSON, or the JSON content of a file.
inline json json_arg(const std::string& arg) {
    if (looks_inline(arg)) return parse_json(arg, "inline argument");
    return parse_json(read_file(arg), arg);
}

/// A name, inline JSON, or a file holding JSON; names pass through as strings.
inline json name_or_json(const std::string& arg) {
    if (looks_inline(arg)) return parse_json(arg, "inline argument");
    if (fs::is_regular_file(arg)) return parse_json(read_file(arg), arg);
    return arg;
}

inline std::string render(const json& j, bool compact) { return (compact ? j.dump() : j.dump(2)) + "\n"; }

inline Stmt checked_program(const std::string& text, const StateSpace& sp) {
    Stmt s = parse(text);
    if (validate_breaks(s)) throw InputError("break outside of a loop");
    check_bound(s, sp);
    return s;
}

inline json trace_to_json(const StateSpace& sp, const Trace& t) {
    json out = json::array();
    for (State s : t) out.push_back(state_to_json(sp, s));
    return out;
}

inline json traces_to_json(const StateSpace& sp, const std::set<Trace>& ts) {
    json out = json::array();
    for (auto& t : ts) out.push_back(trace_to_json(sp, t));
    return out;
}

inline std::set<Trace> traces_from_json(const StateSpace& sp, const json& j) {
    std::set<Trace> out;
    for (auto& t : j) {
        Trace tr;
        for (auto& s : t) tr.push_back(state_from_json(sp, s));
        out.insert(tr);
    }
    return out;
}

// ============================================================================
// Reports
// ============================================================================

inline json sem_report(const Stmt& s, const StateSpace& sp) {
    SemTriple t = sem(s, sp);
    return {{"program", to_string(s)}, {"space", space_to_json(sp)}, {"triple", triple_to_json(sp, t)},
            {"oracle_agrees", oracle_sem(s, sp) == t}};
}

inline json trace_report(const Stmt& s, const StateSpace& sp, std::size_t max_length) {
    TraceSet t = trace_sem(s, sp, max_length);
    json out = {{"program", to_string(s)},
                {"space", space_to_json(sp)},
                {"max_length", max_length},
                {"traces", traces_to_json(sp, t.e)},
                {"break_traces", traces_to_json(sp, t.br)},
                {"div_starts", set_to_json(sp, t.div_starts)},
                {"truncated", t.truncated}};
    // The abstraction is only comparable when no trace was dropped.
    out["abstraction_matches_sem"] = t.truncated ? json(nullptr) : json(abstract_to_rel(t, sp.size()) == sem(s, sp));
    return out;
}

inline json abstract_report(const ChainPoset& cp, const std::string& op, const json& input) {
    HyperSubset in = subset_from_json(cp.poset, input);
    HyperSubset out = make_operator(op, cp)(in);
    return {{"op", op}, {"input", subset_to_json(cp.poset, in)}, {"output", subset_to_json(cp.poset, out)}};
}

inline json laws_report(const ChainPoset& cp, const std::string& op) {
    LawReport r = check_laws(cp.poset.size(), make_operator(op, cp));
    json out = law_report_to_json(cp.poset, r);
    out["op"] = op;
    out["upper_closure"] = r.upper_closure();
    out["lower_closure"] = r.lower_closure();
    return out;
}

// ============================================================================
// Commands
// ============================================================================

namespace detail {

inline StateSpace space_of(const RunConfig& cfg) {
    if (cfg.space.empty()) throw InputError("--space is required");
    return space_from_json(json_arg(cfg.space));
}

inline std::string program_text(const RunConfig& cfg) {
    if (cfg.program.empty()) throw InputError("--program is required");
    return read_file(cfg.program);
}

template <class F>
CommandResult guarded(F&& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        return {Error, "", std::string("error: ") + e.what() + "\n"};
    }
}

} // namespace detail

inline CommandResult cmd_sem(const RunConfig& cfg) {
    return detail::guarded([&] {
        StateSpace sp = detail::space_of(cfg);
        return CommandResult{Holds, render(sem_report(checked_program(detail::program_text(cfg), sp), sp), cfg.compact), ""};
    });
}

inline CommandResult cmd_trace(const RunConfig& cfg) {
    return detail::guarded([&] {
        StateSpace sp = detail::space_of(cfg);
        Stmt s = checked_program(detail::program_text(cfg), sp);
        return CommandResult{Holds, render(trace_report(s, sp, cfg.max_length), cfg.compact), ""};
    });
}

/// post(sem S, P) for one precondition triple, "init" by default.
inline CommandResult cmd_post(const RunConfig& cfg) {
    return detail::guarded([&] {
        StateSpace sp = detail::space_of(cfg);
        Stmt s = checked_program(detail::program_text(cfg), sp);
        SemTriple p = triple_from_json(sp, cfg.pre.empty() ? json("init") : json_arg(cfg.pre));
        SemTriple r = post(sem(s, sp), p);
        json out = {{"program", to_string(s)}, {"pre", triple_to_json(sp, p)}, {"post", triple_to_json(sp, r)},
                    {"structural_agrees", post_structural(s, p, sp) == r}};
        return CommandResult{Holds, render(out, cfg.compact), ""};
    });
}

/// Post(sem S, P) for a set of preconditions, {init} by default.
inline CommandResult cmd_hyper_post(const RunConfig& cfg) {
    return detail::guarded([&] {
        StateSpace sp = detail::space_of(cfg);
        Stmt s = checked_program(detail::program_text(cfg), sp);
        HyperSet pre = hyper_from_json(sp, cfg.pre.empty() ? json::array({"init"}) : json_arg(cfg.pre));
        HyperSet r = Post(sem(s, sp), pre);
        json out = {{"program", to_string(s)}, {"pre", hyper_to_json(sp, pre)}, {"post", hyper_to_json(sp, r)},
                    {"structural_agrees", Post_structural(s, pre, sp) == r}};
        return CommandResult{Holds, render(out, cfg.compact), ""};
    });
}

/// The rule request assembled from --request and the individual flags.
inline json check_request(const RunConfig& cfg) {
    json req = cfg.request.empty() ? json::object() : json_arg(cfg.request);
    if (!req.is_object()) throw InputError("a rule request is a JSON object");
    if (!cfg.rule.empty()) req["rule"] = cfg.rule;
    if (!req.contains("rule")) req["rule"] = "upper";
    if (!cfg.program.empty()) req["program"] = read_file(cfg.program);
    if (!cfg.space.empty()) req["space"] = json_arg(cfg.space);
    if (!cfg.pre.empty()) req["pre"] = json_arg(cfg.pre);
    if (!cfg.post.empty()) req["post"] = json_arg(cfg.post);
    if (!cfg.post_oracle.empty()) req["post_oracle"] = name_or_json(cfg.post_oracle);
    return req;
}

inline CommandResult cmd_check(const RunConfig& cfg) {
    return detail::guarded([&] {
        RuleOutcome o = run_rule(check_request(cfg));
        json out = report_to_json(o.space, o.report);
        return CommandResult{o.report.holds ? Holds : Fails, render(out, cfg.compact), ""};
    });
}

inline CommandResult cmd_abstract(const RunConfig& cfg) {
    return detail::guarded([&] {
        if (cfg.op.empty()) throw InputError("--op is required");
        ChainPoset cp = lattice_from_json(name_or_json(cfg.lattice));
        return CommandResult{Holds, render(abstract_report(cp, cfg.op, json_arg(cfg.set)), cfg.compact), ""};
    });
}

/// Exhaustive closure-law report for one operator, or for every operator that
/// applies to the lattice when --op is omitted.
inline CommandResult cmd_lattice_lab(const RunConfig& cfg) {
    return detail::guarded([&] {
        ChainPoset cp = lattice_from_json(name_or_json(cfg.lattice));
        json out = {{"elements", cp.poset.names_of(cp.poset.all())}};
        if (!cfg.op.empty()) {
            out["laws"] = json::array({laws_report(cp, cfg.op)});
        } else {
            out["laws"] = json::array();
            for (auto& op : operator_names()) {
                try {
                    out["laws"].push_back(laws_report(cp, op));
                } catch (const MalformedLattice& e) {
                    out["laws"].push_back({{"op", op}, {"error", e.what()}});
                }
            }
        }
        return CommandResult{Holds, render(out, cfg.compact), ""};
    });
}

// ============================================================================
// Self-test corpus
// ============================================================================

/// Each corpus file is one suite: {"about": text, "cases": [case, ...]}. A case
/// has a "kind" (sem, trace, check, abstract, laws, builtin) and may carry
/// "expect_error", a message fragment that the case must fail with.
struct CaseOutcome {
    bool passed = false;
    std::string detail;
};

namespace detail {

inline void expect_eq(std::vector<std::string>& problems, const std::string& what, const json& got, const json& want) {
    if (got != want) problems.push_back(what + ": got " + got.dump() + ", want " + want.dump());
}

inline std::vector<std::string> run_sem_case(const json& c) {
    StateSpace sp = space_from_json(c.at("space"));
    Stmt s = checked_program(c.at("program").get<std::string>(), sp);
    SemTriple want = triple_from_json(sp, c.at("expect"));
    std::vector<std::string> problems;
    expect_eq(problems, "sem", triple_to_json(sp, sem(s, sp)), triple_to_json(sp, want));
    expect_eq(problems, "oracle_sem", triple_to_json(sp, oracle_sem(s, sp)), triple_to_json(sp, want));
    return problems;
}

inline std::vector<std::string> run_trace_case(const json& c) {
    StateSpace sp = space_from_json(c.at("space"));
    Stmt s = checked_program(c.at("program").get<std::string>(), sp);
    TraceSet t = trace_sem(s, sp, c.at("L").get<std::size_t>());
    std::vector<std::string> problems;
    expect_eq(problems, "traces", traces_to_json(sp, t.e), traces_to_json(sp, traces_from_json(sp, c.at("expect_traces"))));
    if (c.contains("expect_break_traces"))
        expect_eq(problems, "break traces", traces_to_json(sp, t.br),
                  traces_to_json(sp, traces_from_json(sp, c.at("expect_break_traces"))));
    if (c.contains("expect_div_starts"))
        expect_eq(problems, "div_starts", set_to_json(sp, t.div_starts),
                  set_to_json(sp, set_from_json(sp, c.at("expect_div_starts"))));
    if (c.contains("expect_truncated")) expect_eq(problems, "truncated", t.truncated, c.at("expect_truncated"));
    return problems;
}

inline std::vector<std::string> run_check_case(const json& c) {
    json req = c;
    req.erase("kind");
    req.erase("expect");
    RuleOutcome o = run_rule(req);
    std::vector<std::string> problems;
    expect_eq(problems, "verdict", o.report.holds ? "holds" : "fails", c.at("expect"));
    if (!o.report.holds && o.report.witnesses.empty()) problems.push_back("failure without a witness");
    return problems;
}

inline std::vector<std::string> run_abstract_case(const json& c) {
    ChainPoset cp = lattice_from_json(c.at("lattice"));
    json r = abstract_report(cp, c.at("op").get<std::string>(), c.at("input"));
    std::vector<std::string> problems;
    json want = subset_to_json(cp.poset, subset_from_json(cp.poset, c.at("expect")));
    expect_eq(problems, c.at("op").get<std::string>() + " " + c.at("input").dump(), r.at("output"), want);
    return problems;
}

inline std::vector<std::string> run_laws_case(const json& c) {
    ChainPoset cp = lattice_from_json(c.at("lattice"));
    json r = laws_report(cp, c.at("op").get<std::string>());
    std::vector<std::string> problems;
    for (auto& [key, want] : c.at("expect").items()) {
        if (!r.contains(key)) throw InputError("law report has no field '" + key + "'");
        expect_eq(problems, c.at("op").get<std::string>() + "." + key, r.at(key), want);
    }
    return problems;
}

inline json run_builtin(const std::string& name) {
    if (name == "if_cross") {
        IfWitness w = if_cross_witness();
        return {{"tied", w.tied.size()}, {"cross", w.cross.size()}, {"strict", w.strict()}};
    }
    if (name == "weak_while") {
        WeakWitness w = weak_while_witness();
        return {{"weak", w.weak_size}, {"exact", w.exact_size}, {"strict", w.strict()}};
    }
    if (name == "forall_exists_incompleteness") {
        IncompletenessWitness w = forall_exists_incompleteness();
        return {{"upper_holds", w.upper_holds}, {"tried", w.invariants_tried}, {"valid", w.invariants_valid}};
    }
    if (name == "post_pre_tilde_galois") return {{"ok", check_post_pre_tilde_galois().ok()}};
    if (name == "Post_Pre_galois") return {{"ok", check_Post_Pre_galois(2024).ok()}};
    if (name == "chain_star_iterations") {
        ChainPoset cp = catalog::chain_limit();
        HyperSubset xs = cp.poset.none();
        for (auto& f : cp.families)
            if (f.name != "Y")
                for (std::size_t e : f.elements) xs.set(e);
        auto star = iterate_star(cp, xs, [](const ChainPoset& c, const HyperSubset& x) { return chain_down(c, x); });
        return {{"iterations", star.iterations}, {"result", subset_to_json(cp.poset, star.result)}};
    }
    throw InputError("unknown builtin '" + name + "'");
}

inline std::vector<std::string> run_builtin_case(const json& c) {
    json r = run_builtin(c.at("name").get<std::string>());
    std::vector<std::string> problems;
    for (auto& [key, want] : c.at("expect").items()) expect_eq(problems, key, r.value(key, json(nullptr)), want);
    return problems;
}

inline std::string join_lines(const std::vector<std::string>& xs) {
    std::string out;
    for (auto& x : xs) out += (out.empty() ? "" : "; ") + x;
    return out;
}

} // namespace detail

inline CaseOutcome run_case(const json& c) {
    std::optional<std::string> expect_error;
    if (c.contains("expect_error")) expect_error = c.at("expect_error").get<std::string>();
    std::vector<std::string> problems;
    try {
        std::string kind = c.at("kind").get<std::string>();
        if (kind == "sem") problems = detail::run_sem_case(c);
        else if (kind == "trace") problems = detail::run_trace_case(c);
        else if (kind == "check") problems = detail::run_check_case(c);
        else if (kind == "abstract") problems = detail::run_abstract_case(c);
        else if (kind == "laws") problems = detail::run_laws_case(c);
        else if (kind == "builtin") problems = detail::run_builtin_case(c);
        else throw InputError("unknown case kind '" + kind + "'");
    } catch (const MalformedLattice& e) {
        std::string msg = std::string("construction error: ") + e.what();
        if (expect_error && msg.find(*expect_error) != std::string::npos) return {true, msg};
        return {false, msg};
    } catch (const std::exception& e) {
        std::string msg = std::string("error: ") + e.what();
        if (expect_error && msg.find(*expect_error) != std::string::npos) return {true, msg};
        return {false, msg};
    }
    if (expect_error) return {false, "expected an error containing '" + *expect_error + "'"};
    return {problems.empty(), detail::join_lines(problems)};
}

struct SuiteOutcome {
    std::string name;
    std::size_t cases = 0;
    std::size_t failed = 0;
    std::vector<std::string> failures;
    double millis = 0;
};

inline SuiteOutcome run_suite(const fs::path& file) {
    SuiteOutcome s;
    s.name = file.stem().string();
    auto start = std::chrono::steady_clock::now();
    try {
        json suite = parse_json(read_file(file.string()), file.string());
        const json& cases = suite.at("cases");
        for (std::size_t i = 0; i < cases.size(); ++i) {
            CaseOutcome o = run_case(cases[i]);
            ++s.cases;
            if (!o.passed) {
                ++s.failed;
                s.failures.push_back("case " + std::to_string(i) + ": " + o.detail);
            }
        }
    } catch (const std::exception& e) {
        ++s.failed;
        s.failures.push_back(std::string("unreadable suite: ") + e.what());
    }
    s.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return s;
}

inline std::vector<fs::path> suite_files(const std::string& dir, const std::string& filter) {
    if (!fs::is_directory(dir)) throw InputError("no corpus directory '" + dir + "'");
    std::vector<fs::path> out;
    for (auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json" && entry.path().stem().string().find(filter) != std::string::npos)
            out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

/// Runs every suite in the corpus whose name contains the filter. Exits nonzero
/// iff a suite fails or nothing matches.
inline CommandResult cmd_selftest(const RunConfig& cfg) {
    return detail::guarded([&] {
        auto files = suite_files(cfg.data, cfg.filter);
        if (files.empty()) throw InputError("no suites match '" + cfg.filter + "'");
        std::ostringstream out;
        std::size_t failed = 0;
        for (auto& f : files) {
            SuiteOutcome s = run_suite(f);
            out << (s.failed ? "FAIL " : "PASS ") << s.name << " (" << s.cases << " cases, "
                << static_cast<long>(s.millis) << " ms)\n";
            for (auto& msg : s.failures) out << "  " << msg << "\n";
            if (s.failed) ++failed;
        }
        out << files.size() << " suites, " << failed << " failed\n";
        return CommandResult{failed ? Fails : Holds, out.str(), ""};
    });
}

inline CommandResult run(const RunConfig& cfg) {
    if (cfg.command == "sem") return cmd_sem(cfg);
    if (cfg.command == "trace") return cmd_trace(cfg);
    if (cfg.command == "post") return cmd_post(cfg);
    if (cfg.command == "hyper-post") return cmd_hyper_post(cfg);
    if (cfg.command == "check") return cmd_check(cfg);
    if (cfg.command == "abstract") return cmd_abstract(cfg);
    if (cfg.command == "lattice-lab") return cmd_lattice_lab(cfg);
    if (cfg.command == "selftest") return cmd_selftest(cfg);
    return {Error, "", "error: unknown command '" + cfg.command + "'\n"};
}

} // namespace hl::cli
