#include <catch_amalgamated.hpp>

#include "hl/experiments.hpp"
#include "hl/interpreter.hpp"
#include "reference_semantics.hpp"

using namespace hl;

namespace {

// Loop-head states reachable from each start by simulating the guarded body.
Rel simulated_entry(const StateSpace& sp, const Stmt& loop_stmt) {
    SemTriple body = sem(loop_stmt->first, sp);
    StateSet guard = satisfying(sp, loop_stmt->cond);
    Rel out(sp.size());
    for (State s = 0; s < sp.size(); ++s) {
        std::vector<State> work{s};
        out.insert(s, s);
        while (!work.empty()) {
            State a = work.back();
            work.pop_back();
            if (!guard.test(a)) continue;
            body.e.row(a).for_each([&](std::size_t b) {
                if (!out.contains(s, b)) {
                    out.insert(s, b);
                    work.push_back(b);
                }
            });
        }
    }
    return out;
}

} // namespace

// ============================================================================
// Fixpoint engine
// ============================================================================

TEST_CASE("lfp of the identity is bottom after one iteration", "[interp][fixpoint]") {
    auto r = lfp([](const Rel& x) { return x; }, Rel(3));
    CHECK(r.stabilized);
    CHECK(r.iterations == 1);
    CHECK(r.result.empty());
}

TEST_CASE("gfp of the identity is top", "[interp][fixpoint]") {
    auto r = gfp([](const StateSet& x) { return x; }, StateSet(4, true));
    CHECK(r.stabilized);
    CHECK(r.result.count() == 4);
}

TEST_CASE("a non-monotone step is reported with its iterate", "[interp][fixpoint][errors]") {
    auto flip = [](const StateSet& x) { return x.complement(); };
    CHECK_THROWS_AS(lfp(flip, StateSet(3, true)), NonMonotoneStep);
    try {
        lfp([](const StateSet& x) { return x.complement(); }, StateSet(2, true));
    } catch (const NonMonotoneStep& e) {
        CHECK(e.iterate == 1);
    }
}

TEST_CASE("iteration cap reports non-stabilization", "[interp][fixpoint]") {
    std::size_t n = 6;
    Rel step(n);
    for (State s = 0; s + 1 < n; ++s) step.insert(s, s + 1);
    auto r = lfp([&](const Rel& x) { return Rel::identity(n) | x.then(step); }, Rel(n), 2);
    CHECK_FALSE(r.stabilized);
    CHECK(loop_entry_forward(step).stabilized);
}

TEST_CASE("loop entry of a never-entered loop is init", "[interp][fixpoint]") {
    StateSpace sp({"x"}, -2, 2);
    Stmt s = parse("while (false) skip");
    LoopParts p = loop_parts(sp, s->cond, sem(s->first, sp));
    CHECK(p.entry == Rel::identity(sp.size()));
    CHECK(sem(s, sp) == prim_init(sp));
}

TEST_CASE("loop entry of the countdown matches simulation", "[interp][fixpoint]") {
    StateSpace sp({"y"}, -3, 3);
    Stmt s = parse(ref::countdown);
    LoopParts p = loop_parts(sp, s->cond, sem(s->first, sp));
    CHECK(p.entry == simulated_entry(sp, s));
    // From y = 3 the head sees 3, 2, 1, 0.
    CHECK(p.entry.row(sp.encode({3})).count() == 4);
}

TEST_CASE("divergence gfp of the countdown is the negative half", "[interp][fixpoint]") {
    StateSpace sp({"y"}, -3, 3);
    Stmt s = parse(ref::countdown);
    LoopParts p = loop_parts(sp, s->cond, sem(s->first, sp));
    CHECK(p.forever == satisfying(sp, parse_bexpr("y < 0")));
}

TEST_CASE("divergence gfp of a decrementing loop on x", "[interp][fixpoint]") {
    StateSpace sp({"x"}, -2, 2);
    Stmt s = parse("while (x != 0) x = x - 1");
    CHECK(sem(s, sp).inf == satisfying(sp, parse_bexpr("x < 0")));
}

// ============================================================================
// Worked examples
// ============================================================================

TEST_CASE("countdown semantics over y in [-3,3]", "[interp][examples]") {
    StateSpace sp({"y"}, -3, 3);
    CHECK(sem(parse(ref::countdown), sp) == ref::countdown_sem(sp));
}

TEST_CASE("reset then countdown over y in [-3,3]", "[interp][examples]") {
    StateSpace sp({"y"}, -3, 3);
    CHECK(sem(parse(ref::reset_countdown), sp) == ref::reset_countdown_sem(sp));
}

TEST_CASE("nested countdown over x,y in [-2,2]", "[interp][examples]") {
    StateSpace sp({"x", "y"}, -2, 2);
    Stmt s = parse(ref::nested_countdown);
    CHECK(sem(s, sp) == ref::nested_countdown_sem(sp));
    CHECK(oracle_sem(s, sp) == ref::nested_countdown_sem(sp));
}

TEST_CASE("random start then nested countdown over x,y in [-2,2]", "[interp][examples]") {
    StateSpace sp({"x", "y"}, -2, 2);
    SemTriple s = sem(parse(ref::random_nested_countdown), sp);
    CHECK(s == ref::random_nested_countdown_sem(sp));
    CHECK(s.inf.count() == sp.size());
}

TEST_CASE("skip and a bare break loop", "[interp][examples]") {
    StateSpace sp({"x"}, 0, 2);
    CHECK(sem(skip(), sp) == prim_init(sp));
    CHECK(oracle_sem(skip(), sp) == prim_init(sp));
    SemTriple w = sem(parse("while (true) break"), sp);
    CHECK(w.e == Rel::identity(3));
    CHECK(w.br.empty());
    CHECK(w.inf.none());
}

TEST_CASE("break leaves only the closest loop", "[interp][examples]") {
    StateSpace sp({"x"}, 0, 2);
    Stmt s = parse("while (x < 2) { while (true) { break }; x = x + 1 }");
    SemTriple t = sem(s, sp);
    CHECK(t.inf.none());
    for (State a = 0; a < sp.size(); ++a) CHECK(t.e.row(a).elements() == std::vector<std::size_t>{sp.encode({2})});
    CHECK(t == oracle_sem(s, sp));
}

TEST_CASE("conditional joins the guarded branches", "[interp][examples]") {
    StateSpace sp({"y"}, -3, 3);
    Stmt s = parse("if (y >= 0) { while (y != 0) { y = y - 1 } } else { y = 0 }");
    SemTriple yes = compose(prim_test(sp, s->cond), sem(s->first, sp));
    SemTriple no = compose(prim_test(sp, bnot(s->cond)), sem(s->second, sp));
    CHECK(sem(s, sp) == join(yes, no));
}

TEST_CASE("unbound variables surface from the semantics", "[interp][errors]") {
    StateSpace sp({"x"}, 0, 1);
    CHECK_THROWS_AS(sem(parse("y = 1"), sp), UnboundVariable);
}

// ============================================================================
// Properties over generated programs
// ============================================================================

TEST_CASE("structural semantics equals the configuration-graph oracle", "[interp][property]") {
    Tally t = check_sem_vs_oracle(random_programs(500, 1));
    INFO(t.summary());
    CHECK(t.ok());
    CHECK(t.checked == 500);
}

TEST_CASE("wrap and prune modes also agree with the oracle", "[interp][property]") {
    for (auto& c : random_programs(150, 9000)) {
        for (Arith mode : {Arith::Wrap, Arith::Prune}) {
            StateSpace sp(c.space.vars(), c.space.lo(0), c.space.hi(0), mode);
            INFO(c.describe() << " mode " << to_string(mode));
            CHECK(sem(c.program, sp) == oracle_sem(c.program, sp));
        }
    }
}

TEST_CASE("forward and backward loop-entry fixpoints agree", "[interp][property]") {
    for (auto& c : random_loops(150, 300)) {
        SemTriple step = compose(prim_test(c.space, c.program->cond), sem(c.program->first, c.space));
        CHECK(loop_entry_forward(step.e).result == loop_entry_backward(step.e).result);
    }
}

TEST_CASE("powers of the guarded body commute", "[interp][property]") {
    for (auto& c : random_loops(60, 400)) {
        SemTriple step = compose(prim_test(c.space, c.program->cond), sem(c.program->first, c.space));
        for (std::size_t d = 0; d <= 6; ++d) CHECK(step.e.then(power(step.e, d)) == power(step.e, d).then(step.e));
    }
}

TEST_CASE("always-false guards give the exit test alone", "[interp][property]") {
    for (auto& c : random_programs(50, 500)) {
        Stmt w = loop(bfalse(), c.program);
        CHECK(sem(w, c.space) == prim_init(c.space));
    }
}

TEST_CASE("fixpoint iterations stay within the lattice height", "[interp][property]") {
    for (auto& c : random_loops(100, 600)) {
        LoopParts p = loop_parts(c.space, c.program->cond, sem(c.program->first, c.space));
        std::size_t n = c.space.size();
        CHECK(p.entry_iterations <= n * n + 1);
        CHECK(p.forever_iterations <= n + 1);
    }
}
