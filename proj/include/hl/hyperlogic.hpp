#pragma once

// Upper and lower hyper-triples and certificate checkers for the proof rules.

#include <algorithm>
#include <bit>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hl/transformers.hpp"

namespace hl {

enum class Polarity { Upper, Lower };

/// {|pre|} stmt {|post|}: upper means every image is in post, lower means
/// every element of post is the image of some precondition.
struct Triple {
    HyperSet pre;
    Stmt stmt;
    HyperOracle post;
    std::optional<HyperSet> post_set; // required for the lower polarity
    Polarity polarity = Polarity::Upper;
};

struct Witness {
    SemTriple input;
    SemTriple output;
    std::string note;
};

struct RuleReport {
    std::string rule;
    bool holds = true;
    std::vector<Witness> witnesses{};
    std::vector<std::string> diagnostics{};
    // Verdict of the conclusion computed directly from the semantics, when the
    // checker computes it.
    std::optional<bool> direct{};
    // Whether the rule is complete, so that the premise verdict must match `direct`.
    bool complete = false;

    bool agrees() const { return !direct || !complete || *direct == holds; }
    // Soundness: a premise verdict of "holds" must never contradict the direct check.
    bool sound() const { return !direct || !holds || *direct; }

    void fail(Witness w, const std::string& why) {
        holds = false;
        witnesses.push_back(std::move(w));
        diagnostics.push_back(why);
    }
};

// ============================================================================
// Direct triple checks
// ============================================================================

inline RuleReport check_upper(const HyperSet& pre, const SemTriple& s, const HyperOracle& q) {
    RuleReport r{"upper"};
    for (auto& p : pre) {
        SemTriple img = post(s, p);
        if (!q(img)) r.fail({p, img, "post not in " + q.name}, "image of a precondition falls outside " + q.name);
    }
    r.direct = r.holds;
    r.complete = true;
    return r;
}

inline RuleReport check_upper(const HyperSet& pre, const Stmt& s, const StateSpace& sp, const HyperOracle& q) {
    return check_upper(pre, sem(s, sp), q);
}

inline RuleReport check_lower(const HyperSet& pre, const SemTriple& s, const HyperSet& q) {
    RuleReport r{"lower"};
    HyperSet images = Post(s, pre);
    std::size_t n = s.e.states();
    for (auto& x : q)
        if (!images.count(x)) r.fail({bottom(n), x, "unreached"}, "an element of the consequent is no precondition's image");
    r.direct = r.holds;
    r.complete = true;
    return r;
}

inline RuleReport check_lower(const HyperSet& pre, const Stmt& s, const StateSpace& sp, const HyperSet& q) {
    return check_lower(pre, sem(s, sp), q);
}

inline RuleReport check(const Triple& t, const StateSpace& sp) {
    if (t.polarity == Polarity::Upper) return check_upper(t.pre, t.stmt, sp, t.post);
    if (!t.post_set) throw std::invalid_argument("lower triples need an explicit consequent");
    return check_lower(t.pre, t.stmt, sp, *t.post_set);
}

/// Complement of a consequent.
inline HyperOracle negate(const HyperOracle& q) {
    return {"not(" + q.name + ")", [q](const SemTriple& t) { return !q(t); }};
}

struct Negation {
    bool fails = false;
    std::optional<HyperSet> witness;
};

/// An upper triple fails iff some nonempty sub-antecedent lands entirely in the
/// complement; the witness is a single failing precondition.
inline Negation negate_upper(const HyperSet& pre, const Stmt& s, const StateSpace& sp, const HyperOracle& q) {
    SemTriple t = sem(s, sp);
    for (auto& p : pre)
        if (!q(post(t, p))) return {true, HyperSet{p}};
    return {false, std::nullopt};
}

// ============================================================================
// Loop decomposition shared by the loop rules
// ============================================================================

struct LoopPieces {
    Rel reach;          // pairs reaching the loop head
    std::size_t reach_iterations = 0;
    Rel exit_e;         // exits through the test
    Rel exit_br;        // exits through a break of the body
    StateSet body_inf;  // divergence inside a body iteration
    StateSet forever;   // infinitely many iterations
    std::size_t forever_iterations = 0;
};

inline LoopPieces loop_pieces(const SemTriple& p, const LoopParts& parts) {
    std::size_t n = parts.entry.states();
    LoopPieces lp;
    auto f = lfp([&](const Rel& x) { return p.e | x.then(parts.step.e); }, Rel(n), n * n + 2);
    lp.reach = f.result;
    lp.reach_iterations = f.iterations;
    lp.exit_e = lp.reach.then(parts.exit_test);
    lp.exit_br = lp.reach.then(parts.step.br);
    lp.body_inf = lp.reach.preimage(parts.step.inf) | p.inf;
    lp.forever = p.e.preimage(parts.forever);
    lp.forever_iterations = parts.forever_iterations;
    return lp;
}

inline SemTriple loop_result(const SemTriple& p, const LoopPieces& lp) {
    return {lp.exit_e | lp.exit_br, lp.body_inf | lp.forever, p.br};
}

namespace detail {
inline void require(const Stmt& s, SKind k, const char* what) {
    if (s->kind != k) throw std::invalid_argument(std::string("rule needs ") + what);
}
inline std::string count_note(const char* what, std::size_t k) { return std::string(what) + ": " + std::to_string(k); }
} // namespace detail

// ============================================================================
// Structural rules
// ============================================================================

/// Sequencing through an intermediate hyperproperty (defaults to the exact one).
inline RuleReport rule_seq(const HyperSet& pre, const Stmt& s, const StateSpace& sp, const HyperOracle& q,
                           std::optional<HyperSet> middle = std::nullopt) {
    detail::require(s, SKind::Seq, "a sequence");
    RuleReport r{"seq"};
    SemTriple s1 = sem(s->first, sp), s2 = sem(s->second, sp);
    bool given = middle.has_value();
    HyperSet mid = given ? *middle : Post(s1, pre);
    auto first = check_upper(pre, s1, HyperOracle::of(mid, "intermediate"));
    for (auto& w : first.witnesses) r.fail(w, "first component leaves the intermediate property");
    auto second = check_upper(mid, s2, q);
    for (auto& w : second.witnesses) r.fail(w, "second component leaves the consequent");
    r.diagnostics.push_back(detail::count_note("intermediate size", mid.size()));
    r.direct = check_upper(pre, sem(s, sp), q).holds;
    r.complete = !given;
    return r;
}

/// Conditional: both guarded branches tied per precondition.
inline RuleReport rule_if_upper(const HyperSet& pre, const Stmt& s, const StateSpace& sp, const HyperOracle& q) {
    detail::require(s, SKind::If, "a conditional");
    RuleReport r{"if_upper"};
    SemTriple yes = sem(seq(test(s->cond), s->first), sp);
    SemTriple no = sem(seq(test(bnot(s->cond)), s->second), sp);
    for (auto& p : pre) {
        SemTriple joined = join(post(yes, p), post(no, p));
        if (!q(joined)) r.fail({p, joined, "Q1 join Q2"}, "joined branch posts fall outside " + q.name);
    }
    r.direct = check_upper(pre, sem(s, sp), q).holds;
    r.complete = true;
    return r;
}

inline RuleReport rule_if_lower(const HyperSet& pre, const Stmt& s, const StateSpace& sp, const HyperSet& q) {
    detail::require(s, SKind::If, "a conditional");
    RuleReport r{"if_lower"};
    SemTriple yes = sem(seq(test(s->cond), s->first), sp);
    SemTriple no = sem(seq(test(bnot(s->cond)), s->second), sp);
    HyperSet reached;
    for (auto& p : pre) reached.insert(join(post(yes, p), post(no, p)));
    for (auto& x : q)
        if (!reached.count(x)) r.fail({bottom(sp), x, "unreached"}, "no precondition yields this joined branch post");
    r.direct = check_lower(pre, sem(s, sp), q).holds;
    r.complete = true;
    return r;
}

/// Loop: exact loop-head fixpoint per precondition, then exit, break and divergence parts.
inline RuleReport rule_while_upper(const HyperSet& pre, const Stmt& s, const StateSpace& sp, const HyperOracle& q) {
    detail::require(s, SKind::While, "a loop");
    RuleReport r{"while_upper"};
    LoopParts parts = loop_parts(sp, s->cond, sem(s->first, sp));
    for (auto& p : pre) {
        LoopPieces lp = loop_pieces(p, parts);
        SemTriple out = loop_result(p, lp);
        if (!q(out)) r.fail({p, out, "loop post"}, "loop post assembled from exact fixpoints falls outside " + q.name);
    }
    r.diagnostics.push_back(detail::count_note("divergence gfp iterations", parts.forever_iterations));
    r.direct = check_upper(pre, sem(s, sp), q).holds;
    r.complete = true;
    return r;
}

inline RuleReport rule_while_lower(const HyperSet& pre, const Stmt& s, const StateSpace& sp, const HyperSet& q) {
    detail::require(s, SKind::While, "a loop");
    RuleReport r{"while_lower"};
    LoopParts parts = loop_parts(sp, s->cond, sem(s->first, sp));
    HyperSet reached;
    for (auto& p : pre) reached.insert(loop_result(p, loop_pieces(p, parts)));
    for (auto& x : q)
        if (!reached.count(x)) r.fail({bottom(sp), x, "unreached"}, "no precondition yields this loop post");
    r.direct = check_lower(pre, sem(s, sp), q).holds;
    r.complete = true;
    return r;
}

/// Upper consequence: strengthen the antecedent, weaken the consequent.
inline RuleReport rule_consequence_upper(const HyperSet& pre, const Stmt& s, const StateSpace& sp,
                                         const HyperOracle& q, const HyperSet& pre2, const HyperSet& q2) {
    RuleReport r{"consequence_upper"};
    SemTriple t = sem(s, sp);
    for (auto& p : pre)
        if (!pre2.count(p)) r.fail({p, post(t, p), "not in the wider antecedent"}, "antecedent not included");
    auto inner = check_upper(pre2, t, HyperOracle::of(q2, "inner consequent"));
    for (auto& w : inner.witnesses) r.fail(w, "inner triple fails");
    for (auto& x : q2)
        if (!q(x)) r.fail({bottom(sp), x, "not in the consequent"}, "inner consequent not included");
    r.direct = check_upper(pre, t, q).holds;
    return r;
}

/// Lower consequence: weaken the antecedent, strengthen the consequent.
inline RuleReport rule_consequence_lower(const HyperSet& pre, const Stmt& s, const StateSpace& sp, const HyperSet& q,
                                         const HyperSet& pre2, const HyperSet& q2) {
    RuleReport r{"consequence_lower"};
    SemTriple t = sem(s, sp);
    for (auto& p : pre2)
        if (!pre.count(p)) r.fail({p, post(t, p), "not in the antecedent"}, "inner antecedent not included");
    auto inner = check_lower(pre2, t, q2);
    for (auto& w : inner.witnesses) r.fail(w, "inner triple fails");
    for (auto& x : q)
        if (!q2.count(x)) r.fail({bottom(sp), x, "not in the inner consequent"}, "consequent not included");
    r.direct = check_lower(pre, t, q).holds;
    return r;
}

// ============================================================================
// Nondeterministic choice
// ============================================================================

inline const std::string choice_variable = "c";

/// The space extended with the choice variable ranging over [0,1].
inline StateSpace with_choice_variable(const StateSpace& sp) {
    std::vector<std::string> vars = sp.vars();
    if (std::find(vars.begin(), vars.end(), choice_variable) != vars.end())
        throw std::invalid_argument("choice variable 'c' already used");
    std::vector<Value> lo, hi;
    for (std::size_t k = 0; k < vars.size(); ++k) {
        lo.push_back(sp.lo(k));
        hi.push_back(sp.hi(k));
    }
    vars.push_back(choice_variable);
    lo.push_back(0);
    hi.push_back(1);
    return StateSpace(vars, lo, hi, sp.arith());
}

/// `c = [0,1]; if (c != 0) s1 else s2`.
inline Stmt desugar_choice(const Stmt& s1, const Stmt& s2) {
    return seq(rand_assign(choice_variable, 0, 1), ite(cmp(CmpOp::Ne, var(choice_variable), cst(0)), s1, s2));
}

/// Semantics over the extended space with the choice variable forgotten at both ends.
inline SemTriple project_choice(const SemTriple& t, const StateSpace& ext, const StateSpace& sp) {
    std::size_t n = sp.size(), m = ext.size();
    std::size_t kv = sp.vars().size();
    auto drop = [&](State s) {
        auto v = ext.decode(s);
        v.resize(kv);
        return sp.encode(v);
    };
    std::vector<State> base(m);
    for (State s = 0; s < m; ++s) base[s] = drop(s);
    SemTriple out = bottom(n);
    for (State a = 0; a < m; ++a) {
        t.e.row(a).for_each([&](std::size_t b) { out.e.insert(base[a], base[b]); });
        t.br.row(a).for_each([&](std::size_t b) { out.br.insert(base[a], base[b]); });
        if (t.inf.test(a)) out.inf.set(base[a]);
    }
    return out;
}

inline SemTriple choice_sem(const Stmt& s1, const Stmt& s2, const StateSpace& sp) {
    StateSpace ext = with_choice_variable(sp);
    return project_choice(sem(desugar_choice(s1, s2), ext), ext, sp);
}

inline RuleReport rule_choice(const HyperSet& pre, const Stmt& s1, const Stmt& s2, const StateSpace& sp,
                              const HyperOracle& q) {
    RuleReport r{"choice"};
    SemTriple a = sem(s1, sp), b = sem(s2, sp);
    for (auto& p : pre) {
        SemTriple joined = join(post(a, p), post(b, p));
        if (!q(joined)) r.fail({p, joined, "Q1 join Q2"}, "joined alternative posts fall outside " + q.name);
    }
    r.direct = check_upper(pre, choice_sem(s1, s2, sp), q).holds;
    r.complete = true;
    return r;
}

// ============================================================================
// Forall-exists loop rule (terminating component)
// ============================================================================

/// Premises: pre included in the invariant, the invariant closed under
/// `if (B) S else skip`, and the exit test mapping the invariant into the consequent.
/// Everything is read on the terminating component.
inline RuleReport rule_forall_exists(const HyperSet& pre, const Stmt& s, const StateSpace& sp, const HyperOracle& q,
                                     const HyperSet& invariant) {
    detail::require(s, SKind::While, "a loop");
    RuleReport r{"forall_exists"};
    SemTriple step = sem(seq(test(s->cond), s->first), sp);
    Rel exit_test = Rel::diagonal(satisfying(sp, bnot(s->cond)));
    HyperSet inv = e_projection(invariant);
    for (auto& p : pre)
        if (!inv.count(e_only(p))) r.fail({p, e_only(p), "not in the invariant"}, "antecedent not included in the invariant");
    for (auto& i : inv) {
        SemTriple next = only_e(weak_step(i.e, step, exit_test));
        if (!inv.count(next)) r.fail({i, next, "step leaves the invariant"}, "invariant not preserved by one iteration");
    }
    for (auto& i : inv) {
        SemTriple out = only_e(i.e.then(exit_test));
        if (!q(out)) r.fail({i, out, "exit leaves the consequent"}, "exit test maps the invariant outside " + q.name);
    }
    SemTriple loop = sem(s, sp);
    bool direct = true;
    for (auto& p : pre)
        if (!q(e_only(post(loop, p)))) direct = false;
    r.direct = direct;
    return r;
}

/// The invariant {X^n(P)} used for completeness relative to the weak loop semantics.
inline HyperSet canonical_invariant(const HyperSet& pre, const Stmt& s, const StateSpace& sp) {
    detail::require(s, SKind::While, "a loop");
    return Post_weak_while(s->cond, s->first, pre, sp).iterates;
}

// ============================================================================
// Principal ideal and filter reductions
// ============================================================================

inline SemTriple join_all(const HyperSet& h, std::size_t n) {
    SemTriple out = bottom(n);
    for (auto& t : h) out = join(out, t);
    return out;
}

/// Consequent is the principal ideal of `top`: reduces to one execution-property check.
inline RuleReport rule_principal_ideal(const HyperSet& pre, const Stmt& s, const StateSpace& sp, const SemTriple& top) {
    RuleReport r{"principal_ideal"};
    SemTriple t = sem(s, sp);
    SemTriple all = join_all(pre, sp.size());
    SemTriple img = post(t, all);
    if (!leq(img, top)) r.fail({all, img, "post of the joined antecedent"}, "post of the joined antecedent exceeds the generator");
    HyperOracle ideal{"principal ideal", [top](const SemTriple& x) { return leq(x, top); }};
    r.direct = check_upper(pre, t, ideal).holds;
    r.complete = true;
    return r;
}

/// Consequent is the principal filter of `bottom_elt`: every image must be above it.
inline RuleReport rule_principal_filter(const HyperSet& pre, const Stmt& s, const StateSpace& sp,
                                        const SemTriple& bottom_elt) {
    RuleReport r{"principal_filter"};
    SemTriple t = sem(s, sp);
    for (auto& p : pre) {
        SemTriple img = post(t, p);
        if (!leq(bottom_elt, img)) r.fail({p, img, "below the generator"}, "an image is not above the generator");
    }
    HyperOracle filter{"principal filter", [bottom_elt](const SemTriple& x) { return leq(bottom_elt, x); }};
    r.direct = check_upper(pre, t, filter).holds;
    r.complete = true;
    return r;
}

// ============================================================================
// Order-theoretic helpers on explicit sets of triples
// ============================================================================

inline std::size_t weight(const SemTriple& t) { return t.e.size() + t.inf.count() + t.br.size(); }

/// Whether every triple between lo and hi belongs to h (counts members of the interval).
inline bool interval_inside(const SemTriple& lo, const SemTriple& hi, const HyperSet& h) {
    if (!leq(lo, hi)) return true;
    std::size_t gap = weight(hi) - weight(lo);
    if (gap >= 63) return false;
    std::size_t need = std::size_t{1} << gap;
    if (h.size() < need) return false;
    std::size_t found = 0;
    for (auto& x : h)
        if (leq(lo, x) && leq(x, hi)) ++found;
    return found == need;
}

inline HyperSet minimal_elements(const HyperSet& h) {
    HyperSet out;
    for (auto& x : h) {
        bool minimal = true;
        for (auto& y : h)
            if (!(y == x) && leq(y, x)) {
                minimal = false;
                break;
            }
        if (minimal) out.insert(x);
    }
    return out;
}

/// Elements of h above f whose whole interval from f stays inside h.
inline HyperSet phi_between(const SemTriple& f, const HyperSet& h) {
    HyperSet out;
    for (auto& x : h)
        if (leq(f, x) && interval_inside(f, x, h)) out.insert(x);
    return out;
}

inline HyperSet rho_frontier(const HyperSet& h) {
    HyperSet out;
    for (auto& f : minimal_elements(h))
        for (auto& x : phi_between(f, h)) out.insert(x);
    return out;
}

/// h equals the intersection of its down-closure and up-closure.
inline std::optional<std::pair<SemTriple, SemTriple>> convexity_gap(const HyperSet& h) {
    for (auto& a : h)
        for (auto& b : h)
            if (leq(a, b) && !interval_inside(a, b, h)) return std::make_pair(a, b);
    return std::nullopt;
}

// ============================================================================
// Conjunctive and frontier rules
// ============================================================================

/// Consequent split into its down-closure and up-closure.
inline RuleReport rule_conjunctive(const HyperSet& pre, const Stmt& s, const StateSpace& sp, const HyperSet& q) {
    RuleReport r{"conjunctive"};
    if (auto gap = convexity_gap(q)) {
        r.fail({gap->first, gap->second, "interval escapes the consequent"},
               "consequent is not the meet of its order ideal and order filter");
    }
    SemTriple t = sem(s, sp);
    for (auto& p : pre) {
        SemTriple img = post(t, p);
        bool below = std::any_of(q.begin(), q.end(), [&](const SemTriple& x) { return leq(img, x); });
        bool above = std::any_of(q.begin(), q.end(), [&](const SemTriple& x) { return leq(x, img); });
        if (!below) r.fail({p, img, "outside the order ideal"}, "image not below any consequent element");
        if (!above) r.fail({p, img, "outside the order filter"}, "image not above any consequent element");
    }
    r.direct = check_upper(pre, t, HyperOracle::of(q)).holds;
    r.complete = !convexity_gap(q).has_value();
    return r;
}

using FrontierPartition = std::map<SemTriple, HyperSet>;

/// Assigns each precondition to the first frontier element whose convex slice
/// contains its image, falling back to the first frontier element below it.
inline FrontierPartition frontier_partition(const HyperSet& pre, const Stmt& s, const StateSpace& sp, const HyperSet& q) {
    SemTriple t = sem(s, sp);
    HyperSet front = minimal_elements(q);
    std::map<SemTriple, HyperSet> slices;
    for (auto& f : front) slices[f] = phi_between(f, q);
    FrontierPartition part;
    for (auto& f : front) part[f];
    for (auto& p : pre) {
        SemTriple img = post(t, p);
        const SemTriple* pick = nullptr;
        for (auto& f : front)
            if (slices[f].count(img)) {
                pick = &f;
                break;
            }
        for (auto it = front.begin(); !pick && it != front.end(); ++it)
            if (leq(*it, img)) pick = &*it;
        if (pick) part[*pick].insert(p);
    }
    return part;
}

/// Frontier elimination: each block of the partition is checked against the convex
/// slice of the consequent above its frontier element. Without a supplied partition
/// the canonical one is used, which makes the rule complete.
inline RuleReport rule_frontier_rho(const HyperSet& pre, const Stmt& s, const StateSpace& sp, const HyperSet& q,
                                    std::optional<FrontierPartition> given = std::nullopt) {
    RuleReport r{"frontier_rho"};
    bool fixed = rho_frontier(q) == q;
    FrontierPartition part = given ? *given : frontier_partition(pre, s, sp, q);
    if (!fixed) {
        auto off = q.begin();
        HyperSet kept = rho_frontier(q);
        while (off != q.end() && kept.count(*off)) ++off;
        r.fail({*off, *off, "not kept by frontier elimination"}, "consequent is not fixed by frontier elimination");
    }
    SemTriple t = sem(s, sp);
    HyperSet front = minimal_elements(q);
    HyperSet covered;
    for (auto& [f, xs] : part) {
        if (!front.count(f)) {
            r.fail({f, f, "not a frontier element"}, "partition key is not a minimal consequent element");
            continue;
        }
        HyperSet slice = phi_between(f, q);
        for (auto& p : xs) {
            covered.insert(p);
            SemTriple img = post(t, p);
            bool upper = std::any_of(slice.begin(), slice.end(), [&](const SemTriple& x) { return leq(img, x); });
            if (!upper) r.fail({p, img, "no convex slice element above"}, "upper premise fails for a partition block");
            if (!leq(f, img)) r.fail({p, img, "not above the frontier element"}, "lower premise fails for a partition block");
        }
    }
    for (auto& p : pre)
        if (!covered.count(p)) r.fail({p, post(t, p), "uncovered"}, "partition does not cover the antecedent");
    r.direct = check_upper(pre, t, HyperOracle::of(q)).holds;
    r.complete = fixed && !given;
    return r;
}

} // namespace hl
