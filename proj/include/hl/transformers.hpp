#pragma once

// Execution-property transformer post, its adjoint, the hyper transformer
// Post, and the weak hypercollecting semantics of loops.

#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hl/interpreter.hpp"

namespace hl {

using HyperSet = std::set<SemTriple>;

/// Membership predicate on semantics, used for consequents.
struct HyperOracle {
    std::string name;
    std::function<bool(const SemTriple&)> member;

    bool operator()(const SemTriple& t) const { return member(t); }

    static HyperOracle of(const HyperSet& q, std::string name = "explicit") {
        return {std::move(name), [q](const SemTriple& t) { return q.count(t) > 0; }};
    }
};

// ============================================================================
// post and its adjoint
// ============================================================================

/// Strongest postcondition of precondition p under the semantics s.
inline SemTriple post(const SemTriple& s, const SemTriple& p) { return compose(p, s); }

/// Largest p with post(s, p) below q.
inline SemTriple pre_tilde(const SemTriple& s, const SemTriple& q) {
    std::size_t n = q.e.states();
    SemTriple p{Rel(n), q.inf, q.br};
    for (State a = 0; a < n; ++a)
        for (State b = 0; b < n; ++b) {
            bool ok = s.e.row(b).subset_of(q.e.row(a)) && (!s.inf.test(b) || q.inf.test(a)) &&
                      s.br.row(b).subset_of(q.br.row(a));
            if (ok) p.e.insert(a, b);
        }
    return p;
}

/// Elementwise image.
inline HyperSet Post(const SemTriple& s, const HyperSet& ps) {
    HyperSet out;
    for (auto& p : ps) out.insert(post(s, p));
    return out;
}

/// Every triple over a space of n states. Only used for n <= 2.
inline std::vector<SemTriple> enumerate_triples(std::size_t n) {
    if (n > 2) throw std::invalid_argument("exhaustive enumeration needs at most 2 states");
    std::size_t rel_bits = n * n;
    std::vector<SemTriple> out;
    auto rel_of = [&](std::size_t mask) {
        Rel r(n);
        for (std::size_t i = 0; i < rel_bits; ++i)
            if (mask >> i & 1) r.insert(i / n, i % n);
        return r;
    };
    for (std::size_t e = 0; e < (std::size_t{1} << rel_bits); ++e)
        for (std::size_t inf = 0; inf < (std::size_t{1} << n); ++inf)
            for (std::size_t br = 0; br < (std::size_t{1} << rel_bits); ++br) {
                StateSet d(n);
                for (std::size_t i = 0; i < n; ++i)
                    if (inf >> i & 1) d.set(i);
                out.push_back({rel_of(e), d, rel_of(br)});
            }
    return out;
}

/// Preimage of a hyperproperty, by enumeration of every triple (toy spaces only).
inline HyperSet Pre(const SemTriple& s, const HyperOracle& q) {
    HyperSet out;
    for (auto& p : enumerate_triples(s.e.states()))
        if (q(post(s, p))) out.insert(p);
    return out;
}

// ============================================================================
// Structural post (execution property calculus)
// ============================================================================

/// post computed by structural recursion on the statement, without building
/// the statement's semantics first.
inline SemTriple post_structural(const Stmt& s, const SemTriple& p, const StateSpace& sp) {
    std::size_t n = sp.size();
    switch (s->kind) {
    case SKind::Assign:
    case SKind::RandAssign:
    case SKind::Skip:
    case SKind::BoolTest: {
        SemTriple b = sem(s, sp);
        return {p.e.then(b.e), p.inf, p.br};
    }
    case SKind::Break: return {Rel(n), p.inf, p.br | p.e};
    case SKind::Seq: return post_structural(s->second, post_structural(s->first, p, sp), sp);
    case SKind::If:
        return join(post_structural(s->first, post_structural(test(s->cond), p, sp), sp),
                    post_structural(s->second, post_structural(test(bnot(s->cond)), p, sp), sp));
    case SKind::While: {
        Stmt step = seq(test(s->cond), s->first);
        auto from = [&](const Rel& r) { return post_structural(step, SemTriple{r, StateSet(n), Rel(n)}, sp); };
        // Pairs reaching the loop head.
        Rel reach = lfp([&](const Rel& x) { return p.e | from(x).e; }, Rel(n), n * n + 2).result;
        SemTriple after = from(reach);
        Rel once = from(Rel::identity(n)).e;
        StateSet forever = infinite_iteration(once).result;
        SemTriple out;
        out.e = reach.then(Rel::diagonal(satisfying(sp, bnot(s->cond)))) | after.br;
        out.inf = p.inf | after.inf | p.e.preimage(forever);
        out.br = p.br;
        return out;
    }
    }
    throw std::logic_error("unknown statement kind");
}

// ============================================================================
// Structural Post (hyper property calculus)
// ============================================================================

namespace detail {
inline const SemTriple& only(const HyperSet& h) {
    if (h.size() != 1) throw std::logic_error("expected a singleton");
    return *h.begin();
}
} // namespace detail

/// Post computed by the hyper calculus: basic statements map elementwise,
/// conditionals tie both branches per precondition, loops use singleton fixpoints.
inline HyperSet Post_structural(const Stmt& s, const HyperSet& ps, const StateSpace& sp) {
    std::size_t n = sp.size();
    switch (s->kind) {
    case SKind::Assign:
    case SKind::RandAssign:
    case SKind::Skip:
    case SKind::BoolTest:
    case SKind::Break: {
        HyperSet out;
        for (auto& p : ps) out.insert(post_structural(s, p, sp));
        return out;
    }
    case SKind::Seq: return Post_structural(s->second, Post_structural(s->first, ps, sp), sp);
    case SKind::If: {
        Stmt yes = seq(test(s->cond), s->first);
        Stmt no = seq(test(bnot(s->cond)), s->second);
        HyperSet out;
        for (auto& p : ps)
            out.insert(join(detail::only(Post_structural(yes, {p}, sp)), detail::only(Post_structural(no, {p}, sp))));
        return out;
    }
    case SKind::While: {
        Stmt step = seq(test(s->cond), s->first);
        auto through = [&](const Rel& r) {
            return detail::only(Post_structural(step, {SemTriple{r, StateSet(n), Rel(n)}}, sp));
        };
        SemTriple once = through(Rel::identity(n));
        StateSet forever = infinite_iteration(once.e).result;
        Rel exit_test = Rel::diagonal(satisfying(sp, bnot(s->cond)));
        HyperSet out;
        for (auto& p : ps) {
            // Singleton fixpoint {X} = {P.e} u Post(B;S){X}.
            Rel reach = lfp([&](const Rel& x) { return p.e | through(x).e; }, Rel(n), n * n + 2).result;
            SemTriple after = through(reach);
            out.insert(SemTriple{reach.then(exit_test) | after.br, p.inf | after.inf | p.e.preimage(forever), p.br});
        }
        return out;
    }
    }
    throw std::logic_error("unknown statement kind");
}

/// Cross-product approximation of a conditional: every pairing of a then-result
/// with an else-result, rather than the pairing per precondition.
inline HyperSet Post_if_cross(const BExpr& b, const Stmt& s1, const Stmt& s2, const HyperSet& ps,
                              const StateSpace& sp) {
    HyperSet yes = Post(sem(seq(test(b), s1), sp), ps);
    HyperSet no = Post(sem(seq(test(bnot(b)), s2), sp), ps);
    HyperSet out;
    for (auto& q1 : yes)
        for (auto& q2 : no) out.insert(join(q1, q2));
    return out;
}

// ============================================================================
// Weak hypercollecting loop semantics (terminating component only)
// ============================================================================

/// Terminating part of a triple, with divergence and breaks erased.
inline SemTriple e_only(const SemTriple& t) { return only_e(t.e); }

inline HyperSet e_projection(const HyperSet& h) {
    HyperSet out;
    for (auto& t : h) out.insert(e_only(t));
    return out;
}

struct WeakWhile {
    HyperSet iterates;     // {X^n(P) | P in pre, n}
    HyperSet result;       // exit test applied to each iterate
    std::size_t stabilization = 0;
};

/// One application of `if (B) S else skip` on the terminating component.
inline Rel weak_step(const Rel& x, const SemTriple& guarded_body, const Rel& exit_test) {
    return x.then(guarded_body.e | exit_test);
}

/// Iterates X^0 = P.e, X^(n+1) = post(if (B) S else skip)_e X^n collected over all
/// P until the collection stops growing, then filtered by the exit test.
inline WeakWhile Post_weak_while(const BExpr& b, const Stmt& body, const HyperSet& ps, const StateSpace& sp) {
    SemTriple step = sem(seq(test(b), body), sp);
    Rel exit_test = Rel::diagonal(satisfying(sp, bnot(b)));
    WeakWhile w;
    HyperSet frontier;
    for (auto& p : ps) frontier.insert(e_only(p));
    w.iterates = frontier;
    while (!frontier.empty()) {
        ++w.stabilization;
        HyperSet next;
        for (auto& x : frontier) {
            SemTriple y = only_e(weak_step(x.e, step, exit_test));
            if (w.iterates.insert(y).second) next.insert(y);
        }
        frontier = std::move(next);
    }
    for (auto& x : w.iterates) w.result.insert(only_e(x.e.then(exit_test)));
    return w;
}

} // namespace hl
