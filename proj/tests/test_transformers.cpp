#include <catch_amalgamated.hpp>

#include "hl/experiments.hpp"
#include "hl/transformers.hpp"
#include "reference_semantics.hpp"

using namespace hl;

namespace {

SemTriple on(const StateSpace& sp, const char* cond) { return prim_test(sp, parse_bexpr(cond)); }

bool subset(const HyperSet& a, const HyperSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

} // namespace

// ============================================================================
// post
// ============================================================================

TEST_CASE("post from init is the semantics itself", "[transformers][post]") {
    for (auto& c : random_programs(40, 1200)) {
        SemTriple s = sem(c.program, c.space);
        CHECK(post(s, prim_init(c.space)) == s);
    }
}

TEST_CASE("purely divergent preconditions are absorbed", "[transformers][post]") {
    StateSpace sp({"y"}, -3, 3);
    SemTriple s = sem(parse(ref::countdown), sp);
    SemTriple p = bottom(sp.size());
    p.inf.set(0);
    p.inf.set(4);
    CHECK(post(s, p) == p);
}

TEST_CASE("countdown from y == 2 terminates at y == 0", "[transformers][post]") {
    StateSpace sp({"y"}, -3, 3);
    SemTriple r = post(sem(parse(ref::countdown), sp), on(sp, "y == 2"));
    Rel want(sp.size());
    want.insert(sp.encode({2}), sp.encode({0}));
    CHECK(r.e == want);
    CHECK(r.inf.none());
    CHECK(r.br.empty());
}

TEST_CASE("post preserves joins of preconditions", "[transformers][post][property]") {
    ProgramGen g(31);
    for (auto& c : random_programs(60, 1300)) {
        if (c.space.size() > 9) continue;
        SemTriple s = sem(c.program, c.space);
        std::size_t n = c.space.size();
        SemTriple a = g.triple(n), b = g.triple(n);
        CHECK(post(s, join(a, b)) == join(post(s, a), post(s, b)));
        CHECK(post(s, bottom(n)) == bottom(n));
    }
}

// ============================================================================
// pre_tilde and the adjunctions
// ============================================================================

TEST_CASE("pre_tilde of top is top", "[transformers][pre]") {
    for (auto& c : random_programs(30, 1400)) {
        SemTriple t = top(c.space);
        CHECK(pre_tilde(sem(c.program, c.space), t) == t);
    }
}

TEST_CASE("pre_tilde is the largest precondition routing into the target", "[transformers][pre]") {
    StateSpace sp({"y"}, 0, 3);
    SemTriple s = sem(parse(ref::countdown), sp);
    SemTriple q = only_e(Rel(sp.size()));
    q.e.insert(sp.encode({2}), sp.encode({0}));
    SemTriple p = pre_tilde(s, q);
    // Pair by pair: a single pair enters the precondition iff its post stays below q.
    for (State a = 0; a < sp.size(); ++a)
        for (State b = 0; b < sp.size(); ++b) {
            Rel one(sp.size());
            one.insert(a, b);
            CHECK(p.e.contains(a, b) == leq(post(s, only_e(one)), q));
        }
    CHECK(p.e.size() == sp.size());
    CHECK(p.e.row(sp.encode({2})).count() == sp.size());
    CHECK(leq(post(s, p), q));
}

TEST_CASE("post and pre_tilde form a Galois connection on two states", "[transformers][galois]") {
    Tally t = check_post_pre_tilde_galois();
    INFO(t.summary());
    CHECK(t.ok());
    CHECK(t.checked == two_state_programs().size());
}

TEST_CASE("Post and Pre form a Galois connection on two states", "[transformers][galois]") {
    Tally t = check_Post_Pre_galois(2024);
    INFO(t.summary());
    CHECK(t.ok());
}

TEST_CASE("Pre refuses spaces too large to enumerate", "[transformers][pre][errors]") {
    StateSpace sp({"x"}, 0, 2);
    CHECK_THROWS_AS(Pre(prim_init(sp), HyperOracle::of({})), std::invalid_argument);
}

// ============================================================================
// Post
// ============================================================================

TEST_CASE("Post of init is the singleton semantics", "[transformers][Post]") {
    StateSpace sp({"y"}, -3, 3);
    SemTriple s = sem(parse(ref::countdown), sp);
    CHECK(Post(s, {prim_init(sp)}) == HyperSet{s});
    CHECK(Post(s, {}).empty());
}

TEST_CASE("Post maps two preconditions to their two images", "[transformers][Post]") {
    StateSpace sp({"y"}, -3, 3);
    SemTriple s = sem(parse(ref::reset_countdown), sp);
    SemTriple p1 = prim_init(sp), p2 = on(sp, "y == 2");
    HyperSet out = Post(s, {p1, p2});
    REQUIRE(out.size() == 2);
    CHECK(out.count(ref::reset_countdown_sem(sp)));
    SemTriple want = bottom(sp.size());
    want.e.insert(sp.encode({2}), sp.encode({0}));
    want.inf.set(sp.encode({2}));
    CHECK(out.count(want));
}

TEST_CASE("Post does not preserve joins of semantics", "[transformers][Post]") {
    StateSpace sp({"x"}, 0, 2);
    SemTriple down = sem(parse("while (x != 0) { x = x - 1 }"), sp);
    SemTriple up = sem(parse("while (x != 2) { x = x + 1 }"), sp);
    HyperSet pre{prim_init(sp)};
    HyperSet joined = Post(join(down, up), pre);
    HyperSet separate = Post(down, pre);
    for (auto& t : Post(up, pre)) separate.insert(t);
    CHECK(joined.size() == 1);
    CHECK(separate.size() == 2);
    CHECK(joined != separate);
}

// ============================================================================
// Structural calculus
// ============================================================================

TEST_CASE("structural post and Post agree with composition on generated programs", "[transformers][calculus][property]") {
    Tally t = check_post_calculus(random_programs(500, 1));
    INFO(t.summary());
    CHECK(t.ok());
    CHECK(t.checked >= 2000);
}

TEST_CASE("structural Post of a conditional has one element per precondition", "[transformers][calculus]") {
    for (auto& c : random_programs(60, 1500)) {
        Stmt s = ite(btrue(), c.program, skip());
        for (auto& p : random_preconditions(c, 3)) CHECK(Post_structural(s, {p}, c.space).size() == 1);
    }
    IfWitness w = if_cross_witness();
    CHECK(w.tied.size() == w.pre.size());
}

TEST_CASE("tied conditional is strictly inside the cross product", "[transformers][calculus]") {
    IfWitness w = if_cross_witness();
    CHECK(w.tied.size() == 2);
    CHECK(w.cross.size() == 4);
    CHECK(w.strict());
}

TEST_CASE("a never-entered loop leaves every precondition unchanged", "[transformers][calculus]") {
    for (auto& c : random_programs(40, 1600)) {
        HyperSet pre = random_preconditions(c, 3);
        CHECK(Post_structural(loop(bfalse(), c.program), pre, c.space) == pre);
    }
}

// ============================================================================
// Weak loop semantics
// ============================================================================

TEST_CASE("exact loop posts lie inside the weak loop semantics", "[transformers][weak][property]") {
    Tally t = check_weak_inclusion(random_loops(300, 2000));
    INFO(t.summary());
    CHECK(t.ok());
}

TEST_CASE("weak loop semantics strictly over-approximates the countdown", "[transformers][weak]") {
    WeakWitness w = weak_while_witness();
    CHECK(w.included);
    CHECK(w.exact_size == 1);
    CHECK(w.weak_size == 4);
    CHECK(w.strict());
    CHECK(w.stabilization > 0);
}

TEST_CASE("weak loop semantics of no precondition is empty", "[transformers][weak]") {
    StateSpace sp({"y"}, -3, 3);
    Stmt s = parse(ref::countdown);
    WeakWhile w = Post_weak_while(s->cond, s->first, {}, sp);
    CHECK(w.result.empty());
    CHECK(w.stabilization == 0);
}

TEST_CASE("weak iterates of the countdown shrink toward zero", "[transformers][weak]") {
    StateSpace sp({"y"}, 0, 3);
    Stmt s = parse(ref::countdown);
    WeakWhile w = Post_weak_while(s->cond, s->first, {prim_init(sp)}, sp);
    // Iterate k maps y to max(y - k, 0); the exit test keeps the runs that reached 0.
    REQUIRE(w.iterates.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        Rel it(sp.size());
        for (Value y = 0; y <= 3; ++y) it.insert(sp.encode({y}), sp.encode({std::max<Value>(y - Value(k), 0)}));
        CHECK(w.iterates.count(only_e(it)));
    }
    CHECK(subset(e_projection(Post(sem(s, sp), {prim_init(sp)})), w.result));
}
