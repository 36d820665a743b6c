#pragma once

// Executable property checks over seeded random programs, and the pinned
// witnesses for strictness and incompleteness results. Shared by the test
// suite, the acceptance runner and the CLI self-test.

#include <sstream>
#include <string>
#include <vector>

#include "hl/gen.hpp"
#include "hl/hyperlogic.hpp"
#include "hl/trace_domain.hpp"

namespace hl {

/// Outcome of a batch of checks: how many ran, how many were skipped, and
/// a description of each discrepancy.
struct Tally {
    std::size_t checked = 0;
    std::size_t skipped = 0;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
    void fail(std::string why) { failures.push_back(std::move(why)); }
    void expect(bool cond, const std::string& why) {
        ++checked;
        if (!cond) fail(why);
    }
    std::string summary() const {
        std::ostringstream os;
        os << checked << " checked, " << skipped << " skipped, " << failures.size() << " discrepancies";
        if (!failures.empty()) os << " (first: " << failures.front() << ")";
        return os.str();
    }
};

struct RandomCase {
    std::uint64_t seed;
    StateSpace space;
    Stmt program;

    std::string describe() const { return "seed " + std::to_string(seed) + ": " + to_string(program); }
};

/// `count` programs with consecutive seeds starting at `first_seed`.
inline std::vector<RandomCase> random_programs(std::size_t count, std::uint64_t first_seed, GenConfig cfg = {}) {
    std::vector<RandomCase> out;
    for (std::size_t i = 0; i < count; ++i) {
        ProgramGen g(first_seed + i, cfg);
        StateSpace sp = g.space();
        Stmt s = g.program(sp);
        out.push_back({first_seed + i, sp, s});
    }
    return out;
}

/// Random loops `while (B) S` with break-free bodies.
inline std::vector<RandomCase> random_loops(std::size_t count, std::uint64_t first_seed, GenConfig cfg = {}) {
    cfg.breaks = false;
    std::vector<RandomCase> out;
    for (std::size_t i = 0; i < count; ++i) {
        ProgramGen g(first_seed + i, cfg);
        StateSpace sp = g.space();
        GenConfig inner = cfg;
        inner.max_depth = cfg.max_depth > 1 ? cfg.max_depth - 1 : 1;
        ProgramGen body_gen(first_seed + i + 0x9e3779b97f4a7c15ull, inner);
        Stmt body = body_gen.program(sp);
        out.push_back({first_seed + i, sp, loop(g.condition(sp), body)});
    }
    return out;
}

/// A few preconditions for a case: init plus random triples.
inline HyperSet random_preconditions(const RandomCase& c, std::size_t extra, bool e_only_triples = false) {
    ProgramGen g(c.seed * 7919 + 17);
    HyperSet out{prim_init(c.space)};
    for (std::size_t i = 0; i < extra; ++i) {
        SemTriple t = g.triple(c.space.size(), 0.25, !e_only_triples, !e_only_triples);
        out.insert(t);
    }
    return out;
}

// ============================================================================
// Semantics
// ============================================================================

inline Tally check_sem_vs_oracle(const std::vector<RandomCase>& cases) {
    Tally t;
    for (auto& c : cases) t.expect(sem(c.program, c.space) == oracle_sem(c.program, c.space), c.describe());
    return t;
}

/// Structural post and Post against composition with the computed semantics.
inline Tally check_post_calculus(const std::vector<RandomCase>& cases) {
    Tally t;
    for (auto& c : cases) {
        SemTriple s = sem(c.program, c.space);
        HyperSet pre = random_preconditions(c, 3);
        t.expect(Post_structural(c.program, pre, c.space) == Post(s, pre), "Post " + c.describe());
        for (auto& p : pre) t.expect(post_structural(c.program, p, c.space) == post(s, p), "post " + c.describe());
    }
    return t;
}

/// Finite traces abstracted to first and last states agree with the relational
/// semantics, whenever no trace was cut at the length bound.
inline Tally check_trace_commutation(const std::vector<RandomCase>& cases, TraceLimits lim = {}) {
    Tally t;
    for (auto& c : cases) {
        TraceSet ts = trace_sem(c.program, c.space, lim);
        if (ts.truncated) {
            ++t.skipped;
            continue;
        }
        t.expect(abstract_to_rel(ts, c.space.size()) == sem(c.program, c.space), c.describe());
    }
    return t;
}

// ============================================================================
// Galois connections on two-state spaces
// ============================================================================

/// Programs over x in [0,1] used for the exhaustive adjunction checks.
inline std::vector<Stmt> two_state_programs() {
    std::vector<std::string> src{"skip", "x = 1 - x", "x = [0,1]", "x = 0",
                                 "while (x != 0) { x = x - 1 }", "while (x == 1) { skip }",
                                 "while (x == 0) { x = [0,1]; if (x == 1) { break } else { skip } }",
                                 "if (x == 0) { x = 1 } else { while (true) { skip } }"};
    std::vector<Stmt> out;
    for (auto& s : src) out.push_back(parse(s));
    return out;
}

/// post(S,p) <= q  iff  p <= pre_tilde(S,q), for every pair of triples.
inline Tally check_post_pre_tilde_galois() {
    Tally t;
    StateSpace sp({"x"}, 0, 1);
    auto all = enumerate_triples(sp.size());
    for (auto& prog : two_state_programs()) {
        SemTriple s = sem(prog, sp);
        std::vector<SemTriple> posts, pres;
        for (auto& x : all) {
            posts.push_back(post(s, x));
            pres.push_back(pre_tilde(s, x));
        }
        std::size_t bad = 0;
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = 0; j < all.size(); ++j)
                if (leq(posts[i], all[j]) != leq(all[i], pres[j])) ++bad;
        t.expect(bad == 0, to_string(prog) + ": " + std::to_string(bad) + " violating pairs");
    }
    return t;
}

/// Post(S)P subset Q  iff  P subset Pre(S)Q, on random hyperproperties and on all singletons.
inline Tally check_Post_Pre_galois(std::uint64_t seed, std::size_t rounds = 40) {
    Tally t;
    StateSpace sp({"x"}, 0, 1);
    auto all = enumerate_triples(sp.size());
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution half(0.5), rare(0.02);
    for (auto& prog : two_state_programs()) {
        SemTriple s = sem(prog, sp);
        for (std::size_t r = 0; r < rounds; ++r) {
            HyperSet q;
            for (auto& x : all)
                if (half(rng)) q.insert(x);
            HyperSet back = Pre(s, HyperOracle::of(q));
            HyperSet p;
            for (auto& x : all)
                if (rare(rng) && (back.count(x) || half(rng))) p.insert(x);
            auto subset = [](const HyperSet& a, const HyperSet& b) {
                return std::includes(b.begin(), b.end(), a.begin(), a.end());
            };
            t.expect(subset(Post(s, p), q) == subset(p, back), to_string(prog) + " round " + std::to_string(r));
            if (r == 0)
                for (auto& x : all) t.expect(q.count(post(s, x)) == back.count(x), to_string(prog) + " singleton");
        }
    }
    return t;
}

// ============================================================================
// Conditional: tied branches versus the cross product
// ============================================================================

struct IfWitness {
    Stmt program;
    HyperSet pre;
    HyperSet tied;
    HyperSet cross;
    bool strict() const {
        return tied.size() < cross.size() && std::includes(cross.begin(), cross.end(), tied.begin(), tied.end());
    }
};

/// `if (x == 0) x = 1 else x = 0` on x in [0,1] from the two point preconditions.
inline IfWitness if_cross_witness() {
    StateSpace sp({"x"}, 0, 1);
    Stmt s = parse("if (x == 0) { x = 1 } else { x = 0 }");
    HyperSet pre;
    for (State a = 0; a < sp.size(); ++a) {
        StateSet one(sp.size());
        one.set(a);
        pre.insert(only_e(Rel::diagonal(one)));
    }
    return {s, pre, Post_structural(s, pre, sp), Post_if_cross(s->cond, s->first, s->second, pre, sp)};
}

// ============================================================================
// Weak loop semantics
// ============================================================================

/// The terminating part of the exact loop post is among the weak results.
inline Tally check_weak_inclusion(const std::vector<RandomCase>& loops) {
    Tally t;
    for (auto& c : loops) {
        HyperSet pre = random_preconditions(c, 2);
        WeakWhile w = Post_weak_while(c.program->cond, c.program->first, pre, c.space);
        HyperSet exact = e_projection(Post(sem(c.program, c.space), pre));
        t.expect(std::includes(w.result.begin(), w.result.end(), exact.begin(), exact.end()), c.describe());
    }
    return t;
}

struct WeakWitness {
    std::size_t weak_size = 0;
    std::size_t exact_size = 0;
    std::size_t stabilization = 0;
    bool included = false;
    bool strict() const { return included && weak_size > exact_size; }
};

/// `while (y != 0) y = y - 1` over y in [-3,3] from init.
inline WeakWitness weak_while_witness() {
    StateSpace sp({"y"}, -3, 3);
    Stmt s = parse("while (y != 0) { y = y - 1 }");
    HyperSet pre{prim_init(sp)};
    WeakWhile w = Post_weak_while(s->cond, s->first, pre, sp);
    HyperSet exact = e_projection(Post(sem(s, sp), pre));
    bool inc = std::includes(w.result.begin(), w.result.end(), exact.begin(), exact.end());
    return {w.result.size(), exact.size(), w.stabilization, inc};
}

// ============================================================================
// Rules on random instances
// ============================================================================

/// Random consequents on terminating components: an ideal below a random
/// relation, the exact posts, and the weak results.
inline std::vector<HyperOracle> random_e_oracles(const RandomCase& c, const HyperSet& pre) {
    ProgramGen g(c.seed * 104729 + 3);
    Rel bound = g.triple(c.space.size(), 0.6, false, false).e;
    HyperSet exact = e_projection(Post(sem(c.program, c.space), pre));
    HyperSet weak = Post_weak_while(c.program->cond, c.program->first, pre, c.space).result;
    return {{"ideal", [bound](const SemTriple& t) { return t.e.subset_of(bound); }},
            HyperOracle::of(exact, "exact"), HyperOracle::of(weak, "weak")};
}

/// The forall-exists rule with the canonical invariant holds exactly when the
/// weak loop semantics meets the consequent, and never contradicts the direct check.
inline Tally check_forall_exists(const std::vector<RandomCase>& loops) {
    Tally t;
    for (auto& c : loops) {
        HyperSet pre = random_preconditions(c, 1, true);
        HyperSet inv = canonical_invariant(pre, c.program, c.space);
        HyperSet weak = Post_weak_while(c.program->cond, c.program->first, pre, c.space).result;
        for (auto& q : random_e_oracles(c, pre)) {
            RuleReport r = rule_forall_exists(pre, c.program, c.space, q, inv);
            bool weak_holds = std::all_of(weak.begin(), weak.end(), [&](const SemTriple& x) { return q(x); });
            t.expect(r.holds == weak_holds, "relative completeness " + q.name + " " + c.describe());
            t.expect(r.sound(), "soundness " + q.name + " " + c.describe());
        }
    }
    return t;
}

/// Single-precondition triples: the lower and upper readings coincide.
inline Tally check_singleton_coincidence(const std::vector<RandomCase>& cases) {
    Tally t;
    for (auto& c : cases) {
        SemTriple s = sem(c.program, c.space);
        HyperSet pre = random_preconditions(c, 2);
        ProgramGen g(c.seed + 11);
        for (auto& p : pre) {
            for (const SemTriple& q : {post(s, p), g.triple(c.space.size())}) {
                bool upper = check_upper({p}, s, HyperOracle::of({q})).holds;
                bool lower = check_lower({p}, s, {q}).holds;
                t.expect(upper == lower, c.describe());
            }
        }
    }
    return t;
}

/// An upper triple fails iff some precondition maps into the complement, and the
/// reported witness does so.
inline Tally check_negation_duality(const std::vector<RandomCase>& cases) {
    Tally t;
    for (auto& c : cases) {
        SemTriple s = sem(c.program, c.space);
        HyperSet pre = random_preconditions(c, 2);
        ProgramGen g(c.seed + 23);
        Rel bound = g.triple(c.space.size(), 0.7, false, false).e;
        std::vector<HyperOracle> oracles{
            {"terminating", [](const SemTriple& x) { return x.inf.none(); }},
            {"ideal", [bound](const SemTriple& x) { return x.e.subset_of(bound); }},
            HyperOracle::of(Post(s, pre), "exact")};
        for (auto& q : oracles) {
            bool holds = check_upper(pre, s, q).holds;
            Negation n = negate_upper(pre, c.program, c.space, q);
            t.expect(n.fails == !holds, "verdict " + q.name + " " + c.describe());
            if (n.witness)
                t.expect(n.witness->size() == 1 && pre.count(*n.witness->begin()) &&
                             check_upper(*n.witness, s, negate(q)).holds,
                         "witness " + q.name + " " + c.describe());
        }
    }
    return t;
}

// ============================================================================
// Incompleteness of the forall-exists rule for the exact semantics
// ============================================================================

struct IncompletenessWitness {
    bool upper_holds = false;
    std::size_t invariants_tried = 0;
    std::size_t invariants_valid = 0;
};

/// `while (x != 0) x = x - 1` over x in [0,1] from init, with the consequent
/// holding exactly the true terminating post. The triple holds, yet no set of
/// terminating triples satisfies the rule's premises.
inline IncompletenessWitness forall_exists_incompleteness() {
    StateSpace sp({"x"}, 0, 1);
    Stmt s = parse("while (x != 0) { x = x - 1 }");
    HyperSet pre{prim_init(sp)};
    HyperSet q{e_only(post(sem(s, sp), prim_init(sp)))};
    HyperOracle oracle = HyperOracle::of(q, "exact");
    IncompletenessWitness w;
    w.upper_holds = check_upper(e_projection(pre), sem(s, sp), oracle).holds;
    std::vector<SemTriple> candidates;
    for (std::size_t m = 0; m < 16; ++m) {
        Rel r(2);
        for (std::size_t i = 0; i < 4; ++i)
            if (m >> i & 1) r.insert(i / 2, i % 2);
        candidates.push_back(only_e(r));
    }
    for (std::size_t mask = 0; mask < (std::size_t{1} << candidates.size()); ++mask) {
        HyperSet inv;
        for (std::size_t i = 0; i < candidates.size(); ++i)
            if (mask >> i & 1) inv.insert(candidates[i]);
        ++w.invariants_tried;
        if (rule_forall_exists(pre, s, sp, oracle, inv).holds) ++w.invariants_valid;
    }
    return w;
}

} // namespace hl
