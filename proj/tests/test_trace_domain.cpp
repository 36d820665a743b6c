#include <catch_amalgamated.hpp>

#include "hl/experiments.hpp"
#include "hl/trace_domain.hpp"
#include "reference_semantics.hpp"

using namespace hl;

namespace {

Trace of_values(const StateSpace& sp, std::vector<Value> xs) {
    Trace t;
    for (Value v : xs) t.push_back(sp.encode({v}));
    return t;
}

} // namespace

// ============================================================================
// Trace semantics
// ============================================================================

TEST_CASE("skip traces are stuttering pairs", "[trace]") {
    StateSpace sp({"x"}, 0, 2);
    TraceSet t = trace_sem(skip(), sp);
    std::set<Trace> want;
    for (State s = 0; s < sp.size(); ++s) want.insert(Trace{s, s});
    CHECK(t.e == want);
    CHECK(t.br.empty());
    CHECK_FALSE(t.truncated);
}

TEST_CASE("break traces end in the break component", "[trace]") {
    StateSpace sp({"x"}, 0, 1);
    TraceSet t = trace_sem(parse("while (true) { x = 1; break }"), sp);
    CHECK(t.e == std::set<Trace>{{0, 1}, {1, 1}});
    CHECK(t.br.empty());
}

TEST_CASE("skip-by-two loop contains the even and odd runs", "[trace][examples]") {
    StateSpace sp({"x"}, -4, 5);
    TraceSet t = trace_sem(parse(ref::skip_by_two), sp, 8);
    CHECK(t.e.count(of_values(sp, {-2, 0, 2})));
    CHECK(t.e.count(of_values(sp, {-3, -1, 1})));
    CHECK(t.br.empty());
}

TEST_CASE("skip-by-two loop finite traces are exactly the two run families", "[trace][examples]") {
    StateSpace sp({"x"}, -4, 5);
    TraceSet t = trace_sem(parse(ref::skip_by_two), sp, 10);
    // Runs climb by two from each start until they stop at 2 (even) or break at 1 (odd).
    std::set<Trace> want;
    for (Value start = -4; start <= 2; ++start) {
        std::vector<Value> run;
        Value stop = start % 2 == 0 ? 2 : 1;
        for (Value v = start; v <= stop; v += 2) run.push_back(v);
        want.insert(of_values(sp, run));
    }
    CHECK(want.size() == 7);
    CHECK(t.e == want);
    CHECK(t.br.empty());
}

TEST_CASE("skip-by-two loop diverges above 2 under saturation", "[trace][examples]") {
    StateSpace sp({"x"}, -4, 5);
    TraceSet t = trace_sem(parse(ref::skip_by_two), sp, 8);
    for (Value v : {3, 4, 5}) CHECK(t.div_starts.test(sp.encode({v})));
    CHECK(t.div_starts.count() == 3);
    CHECK(t.truncated);
}

TEST_CASE("trace dump uses one line per trace", "[trace][format]") {
    StateSpace sp({"x"}, -4, 5);
    TraceSet t = trace_sem(parse(ref::skip_by_two), sp, 8);
    std::string d = dump(t.e, sp);
    CHECK(d.find("x:-3;x:-1;x:1\n") != std::string::npos);
    CHECK(d.find("x:-2;x:0;x:2\n") != std::string::npos);
    CHECK(std::count(d.begin(), d.end(), '\n') == static_cast<long>(t.e.size()));
}

TEST_CASE("maximal length below one is rejected", "[trace][errors]") {
    StateSpace sp({"x"}, 0, 1);
    CHECK_THROWS_AS(trace_sem(skip(), sp, 0), std::invalid_argument);
}

TEST_CASE("short bounds raise the truncation flag", "[trace]") {
    StateSpace sp({"x"}, 0, 3);
    Stmt s = parse("x = 0; x = 1; x = 2");
    CHECK(trace_sem(s, sp, 4).truncated == false);
    TraceSet cut = trace_sem(s, sp, 3);
    CHECK(cut.truncated);
    CHECK(cut.e.empty());
}

TEST_CASE("trace budget raises the truncation flag", "[trace]") {
    StateSpace sp({"x", "y"}, 0, 4);
    TraceSet t = trace_sem(parse("x = [-oo, oo]; y = [-oo, oo]"), sp, TraceLimits{8, 50});
    CHECK(t.truncated);
    CHECK(t.e.size() <= 50);
}

// ============================================================================
// Abstraction to relations
// ============================================================================

TEST_CASE("stuttering traces abstract to the identity", "[trace][abstraction]") {
    StateSpace sp({"x"}, 0, 2);
    CHECK(abstract_to_rel(trace_sem(skip(), sp), sp.size()).e == Rel::identity(3));
}

TEST_CASE("countdown traces abstract to the reset relation", "[trace][abstraction]") {
    StateSpace sp({"y"}, 0, 2);
    SemTriple r = abstract_to_rel(trace_sem(parse(ref::countdown), sp), sp.size());
    CHECK(r == ref::countdown_sem(sp));
}

TEST_CASE("the empty trace set abstracts to the empty relation", "[trace][abstraction]") {
    TraceSet t;
    t.div_starts = StateSet(3);
    SemTriple r = abstract_to_rel(t, 3);
    CHECK(r.e.empty());
    CHECK(r.br.empty());
    CHECK(r.inf.none());
}

// ============================================================================
// Properties
// ============================================================================

TEST_CASE("concatenation is associative with singleton units", "[trace][property]") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<State> st(0, 3);
    std::uniform_int_distribution<std::size_t> len(1, 4);
    auto make = [&](State first) {
        Trace t{first};
        for (std::size_t i = 1, n = len(rng); i < n; ++i) t.push_back(st(rng));
        return t;
    };
    for (int i = 0; i < 200; ++i) {
        Trace a = make(st(rng));
        Trace b = make(a.back());
        Trace c = make(b.back());
        CHECK(concat(concat(a, b), c) == concat(a, concat(b, c)));
        CHECK(concat(Trace{a.front()}, a) == a);
        CHECK(concat(a, Trace{a.back()}) == a);
    }
    CHECK_THROWS_AS(concat(Trace{0}, Trace{1}), std::invalid_argument);
}

TEST_CASE("loop-free programs are never truncated and commute with the abstraction", "[trace][property]") {
    GenConfig cfg;
    cfg.loops = false;
    auto cases = random_programs(300, 700, cfg);
    for (auto& c : cases) CHECK_FALSE(trace_sem(c.program, c.space, 10).truncated);
    Tally t = check_trace_commutation(cases, TraceLimits{10, 200000});
    INFO(t.summary());
    CHECK(t.ok());
    CHECK(t.skipped == 0);
}

TEST_CASE("unflagged loops commute with the abstraction", "[trace][property]") {
    GenConfig cfg;
    cfg.max_depth = 3;
    cfg.max_values = 3;
    cfg.min_lo = 0;
    Tally t = check_trace_commutation(random_programs(300, 800, cfg), TraceLimits{10, 200000});
    INFO(t.summary());
    CHECK(t.ok());
    CHECK(t.checked > 150);
}
