#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "hl/cli.hpp"
#include "reference_semantics.hpp"

using namespace hl;
using namespace hl::cli;
namespace fs = std::filesystem;

namespace {

const std::string corpus = std::string(HL_SOURCE_DIR) + "/data/selftest";

// A scratch directory removed at scope exit.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("hl_cli_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name) << text;
        return (path / name).string();
    }
};

RunConfig with_program(const TempDir& d, const std::string& command, const std::string& program, const std::string& space) {
    RunConfig cfg;
    cfg.command = command;
    cfg.program = d.write("prog.w", program);
    cfg.space = space;
    cfg.compact = true;
    return cfg;
}

const char* y_space = R"({"vars": ["y"], "lo": -3, "hi": 3})";
const char* lh_space = R"({"vars": ["l", "h"], "lo": 0, "hi": 1})";

} // namespace

// ============================================================================
// JSON encodings
// ============================================================================

TEST_CASE("spaces round-trip through JSON", "[cli][json]") {
    StateSpace sp({"x", "y"}, std::vector<Value>{-1, 0}, std::vector<Value>{1, 3}, Arith::Wrap);
    StateSpace back = space_from_json(space_to_json(sp));
    CHECK(back.vars() == sp.vars());
    CHECK(back.size() == sp.size());
    CHECK(back.arith() == Arith::Wrap);
    CHECK(space_to_json(back) == space_to_json(sp));
}

TEST_CASE("triples and hypersets round-trip through JSON", "[cli][json][property]") {
    ProgramGen g(17);
    StateSpace sp({"x"}, 0, 3);
    for (int i = 0; i < 100; ++i) {
        SemTriple t = g.triple(sp.size());
        CHECK(triple_from_json(sp, triple_to_json(sp, t)) == t);
        HyperSet h{t, g.triple(sp.size()), g.triple(sp.size())};
        CHECK(hyper_from_json(sp, hyper_to_json(sp, h)) == h);
    }
}

TEST_CASE("triple shorthands expand to their relations", "[cli][json]") {
    StateSpace sp({"x"}, 0, 2);
    CHECK(triple_from_json(sp, "init") == prim_init(sp));
    SemTriple any = triple_from_json(sp, json::parse(R"({"any_to": [[1]]})"));
    CHECK(any.e.size() == 3);
    for (State a = 0; a < 3; ++a) CHECK(any.e.contains(a, 1));
    SemTriple diag = triple_from_json(sp, json::parse(R"({"diag": [[0], [2]]})"));
    CHECK(diag.e == Rel::diagonal(set_from_json(sp, json::parse("[[0], [2]]"))));
    CHECK_THROWS_AS(triple_from_json(sp, "nothing"), InputError);
    CHECK_THROWS_AS(state_from_json(sp, json::parse("[0, 1]")), InputError);
}

TEST_CASE("named oracles parse and reject unknown names", "[cli][json]") {
    StateSpace sp = space_from_json(json::parse(lh_space));
    CHECK(oracle_from_json(sp, "NI(l)").name == "NI(l)");
    CHECK(oracle_from_json(sp, "terminating")(prim_init(sp)));
    CHECK_THROWS_AS(oracle_from_json(sp, "GNI(l)"), InputError);
    CHECK_THROWS_AS(oracle_from_json(sp, "secret"), InputError);
    CHECK_THROWS_AS(oracle_from_json(sp, "NI(z)"), UnboundVariable);
}

TEST_CASE("inline lattices build and reject malformed chains", "[cli][json]") {
    json ok = json::parse(R"({"elements": ["a", "b"], "order": [["a", "b"]],
                              "families": [{"family": "f", "elements": ["a", "b"], "limit": "b"}]})");
    ChainPoset cp = chain_poset_from_json(ok);
    CHECK(cp.families.size() == 1);
    CHECK_FALSE(cp.families[0].descending);
    json bad = ok;
    bad["order"] = json::array();
    CHECK_THROWS_AS(chain_poset_from_json(bad), MalformedLattice);
    CHECK_THROWS_AS(lattice_from_json("cube"), InputError);
}

// ============================================================================
// Commands
// ============================================================================

TEST_CASE("sem command reports the countdown triple", "[cli][sem]") {
    TempDir d("sem");
    CommandResult r = cmd_sem(with_program(d, "sem", ref::countdown, y_space));
    REQUIRE(r.code == Holds);
    json out = json::parse(r.out);
    StateSpace sp = space_from_json(out.at("space"));
    CHECK(triple_from_json(sp, out.at("triple")) == ref::countdown_sem(sp));
    CHECK(out.at("oracle_agrees") == true);
}

TEST_CASE("sem command of skip is the identity", "[cli][sem]") {
    TempDir d("skip");
    json out = json::parse(cmd_sem(with_program(d, "sem", "skip", R"({"vars": ["y"], "lo": 0, "hi": 1})")).out);
    CHECK(out.at("triple").at("e") == json::parse("[[[0], [0]], [[1], [1]]]"));
}

TEST_CASE("sem output is byte-stable", "[cli][sem][property]") {
    TempDir d("stable");
    for (bool compact : {true, false}) {
        RunConfig cfg = with_program(d, "sem", ref::random_nested_countdown, R"({"vars": ["x", "y"], "lo": -2, "hi": 2})");
        cfg.compact = compact;
        CommandResult a = run(cfg), b = run(cfg);
        CHECK(a.out == b.out);
        CHECK(json::parse(a.out).dump(compact ? -1 : 2) + "\n" == a.out);
    }
}

TEST_CASE("parse and space errors exit with code 2", "[cli][errors]") {
    TempDir d("errors");
    CHECK(cmd_sem(with_program(d, "sem", "x = ", y_space)).code == Error);
    CHECK(cmd_sem(with_program(d, "sem", "z = 1", y_space)).code == Error);
    CHECK(cmd_sem(with_program(d, "sem", "break", y_space)).code == Error);
    CommandResult r = cmd_sem(with_program(d, "sem", "skip", R"({"vars": ["y"], "lo": 3, "hi": 1})"));
    CHECK(r.code == Error);
    CHECK(r.err.find("empty range") != std::string::npos);
    RunConfig missing;
    missing.command = "sem";
    missing.program = (d.path / "absent.w").string();
    missing.space = y_space;
    CHECK(run(missing).code == Error);
    missing.command = "frobnicate";
    CHECK(run(missing).code == Error);
}

TEST_CASE("trace command reports traces, divergence and the abstraction check", "[cli][trace]") {
    TempDir d("trace");
    RunConfig cfg = with_program(d, "trace", ref::skip_by_two, R"({"vars": ["x"], "lo": -4, "hi": 5})");
    cfg.max_length = 10;
    json out = json::parse(cmd_trace(cfg).out);
    CHECK(out.at("traces").size() == 7);
    CHECK(out.at("div_starts") == json::parse("[[3], [4], [5]]"));
    CHECK(out.at("truncated") == true);
    CHECK(out.at("abstraction_matches_sem").is_null());

    RunConfig flat = with_program(d, "trace", "x = x + 1; x = x - 1", R"({"vars": ["x"], "lo": 0, "hi": 2})");
    json f = json::parse(cmd_trace(flat).out);
    CHECK(f.at("truncated") == false);
    CHECK(f.at("abstraction_matches_sem") == true);
}

TEST_CASE("post and hyper-post commands agree with the transformers", "[cli][post]") {
    TempDir d("post");
    RunConfig cfg = with_program(d, "post", ref::countdown, y_space);
    cfg.pre = R"({"diag": [[2]]})";
    json p = json::parse(cmd_post(cfg).out);
    CHECK(p.at("post").at("e") == json::parse("[[[2], [0]]]"));
    CHECK(p.at("structural_agrees") == true);

    cfg.command = "hyper-post";
    cfg.program = d.write("prog.w", ref::reset_countdown);
    cfg.pre = R"(["init", {"diag": [[2]]}])";
    json h = json::parse(run(cfg).out);
    CHECK(h.at("post").size() == 2);
    CHECK(h.at("structural_agrees") == true);
}

TEST_CASE("check command exit codes follow the verdict", "[cli][check]") {
    TempDir d("check");
    RunConfig cfg = with_program(d, "check", "l = h", lh_space);
    cfg.pre = R"(["init"])";
    cfg.post_oracle = "NI(l)";
    CommandResult fails = cmd_check(cfg);
    CHECK(fails.code == Fails);
    json out = json::parse(fails.out);
    CHECK(out.at("verdict") == "fails");
    CHECK_FALSE(out.at("witnesses").empty());

    cfg.pre = "[]";
    CHECK(cmd_check(cfg).code == Holds);

    cfg.post_oracle = "NI(";
    CHECK(cmd_check(cfg).code == Error);
}

TEST_CASE("check command reads full requests with flag overrides", "[cli][check]") {
    TempDir d("request");
    json req = {{"rule", "principal_ideal"},
                {"program", "while (x > 10) { x = x - 1 }"},
                {"space", {{"vars", {"x"}}, {"lo", 0}, {"hi", 13}}},
                {"pre", json::parse(R"([{"any_to": [[11]]}, {"any_to": [[12]]}, {"any_to": [[13]]}])")},
                {"generator", {{"any_to", json::parse("[[0],[1],[2],[3],[4],[5],[6],[7],[8],[9],[10]]")}}}};
    RunConfig cfg;
    cfg.command = "check";
    cfg.request = d.write("req.json", req.dump());
    CHECK(run(cfg).code == Holds);
    cfg.rule = "frontier_rho";
    CHECK(run(cfg).code == Error);
    CHECK(run_rule(req).report.holds);
    req["rule"] = "no_such_rule";
    CHECK_THROWS_AS(run_rule(req), InputError);
}

TEST_CASE("abstract and lattice-lab commands", "[cli][abstract]") {
    RunConfig cfg;
    cfg.command = "abstract";
    cfg.lattice = "diamond";
    cfg.op = "frontier_min";
    cfg.set = R"(["0", "1", "top"])";
    cfg.compact = true;
    CHECK(json::parse(run(cfg).out).at("output") == json::parse(R"(["0", "1"])"));
    cfg.op = "rotate";
    CHECK(run(cfg).code == Error);

    cfg.command = "lattice-lab";
    cfg.lattice = "two-chains";
    cfg.op.clear();
    json lab = json::parse(run(cfg).out);
    CHECK(lab.at("laws").size() == operator_names().size());
    // Lattice operators are reported as errors on a poset without joins.
    bool saw_error = false;
    for (auto& l : lab.at("laws")) saw_error |= l.contains("error");
    CHECK(saw_error);
}

// ============================================================================
// Self-test corpus
// ============================================================================

TEST_CASE("the shipped corpus passes", "[cli][selftest]") {
    RunConfig cfg;
    cfg.command = "selftest";
    cfg.data = corpus;
    CommandResult r = run(cfg);
    INFO(r.out << r.err);
    CHECK(r.code == Holds);
    CHECK(r.out.find(" 0 failed") != std::string::npos);
}

TEST_CASE("the filter selects suites by name", "[cli][selftest]") {
    RunConfig cfg;
    cfg.command = "selftest";
    cfg.data = corpus;
    cfg.filter = "frontier";
    CommandResult r = run(cfg);
    CHECK(r.code == Holds);
    CHECK(r.out.find("frontier_nonmonotone") != std::string::npos);
    CHECK(r.out.find("sem_countdown") == std::string::npos);
    cfg.filter = "no-suite-has-this-name";
    CHECK(run(cfg).code == Error);
}

TEST_CASE("a corrupted lattice file is reported as a construction error", "[cli][selftest]") {
    TempDir d("corrupt");
    d.write("broken.json", R"({"about": "", "cases": [{"kind": "abstract", "op": "chain_down", "input": [], "expect": [],
        "lattice": {"elements": ["a", "b"], "families": [{"family": "f", "elements": ["a", "b"]}]}}]})");
    RunConfig cfg;
    cfg.command = "selftest";
    cfg.data = d.path.string();
    CommandResult r = run(cfg);
    CHECK(r.code == Fails);
    CHECK(r.out.find("FAIL broken") != std::string::npos);
    CHECK(r.out.find("construction error") != std::string::npos);
}

TEST_CASE("a wrong expectation fails its suite", "[cli][selftest]") {
    TempDir d("wrong");
    json suite = json::parse(std::ifstream(corpus + "/sem_countdown.json"));
    suite["cases"][0]["expect"]["inf"] = json::array();
    d.write("sem_countdown.json", suite.dump());
    d.write("garbage.json", "{ not json");
    RunConfig cfg;
    cfg.command = "selftest";
    cfg.data = d.path.string();
    CommandResult r = run(cfg);
    CHECK(r.code == Fails);
    CHECK(r.out.find("2 suites, 2 failed") != std::string::npos);
    CHECK(r.out.find("unreadable suite") != std::string::npos);
}
