#pragma once

// Structural fixpoint semantics, the Kleene engine behind it, and an
// independent small-step oracle.

#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hl/lang.hpp"
#include "hl/rel_domain.hpp"

namespace hl {

// ============================================================================
// Kleene iteration
// ============================================================================

template <class T> struct FixpointReport {
    std::size_t iterations = 0;
    bool stabilized = false;
    T result;
};

class NonMonotoneStep : public std::logic_error {
public:
    explicit NonMonotoneStep(std::size_t iterate)
        : std::logic_error("iterate " + std::to_string(iterate) + " is not above its predecessor"), iterate(iterate) {}
    std::size_t iterate;
};

/// Least fixpoint of f by iteration from bottom. Each step must increase.
/// `iterations` counts applications of f, including the one that confirms stability.
template <class T, class F>
FixpointReport<T> lfp(F&& f, T bottom, std::size_t cap = std::numeric_limits<std::size_t>::max()) {
    T x = std::move(bottom);
    for (std::size_t it = 1; it <= cap; ++it) {
        T y = f(x);
        if (!leq(x, y)) throw NonMonotoneStep(it);
        if (y == x) return {it, true, std::move(x)};
        x = std::move(y);
    }
    return {cap, false, std::move(x)};
}

/// Greatest fixpoint of f by iteration from top. Each step must decrease.
template <class T, class F>
FixpointReport<T> gfp(F&& f, T top, std::size_t cap = std::numeric_limits<std::size_t>::max()) {
    T x = std::move(top);
    for (std::size_t it = 1; it <= cap; ++it) {
        T y = f(x);
        if (!leq(y, x)) throw NonMonotoneStep(it);
        if (y == x) return {it, true, std::move(x)};
        x = std::move(y);
    }
    return {cap, false, std::move(x)};
}

// ============================================================================
// Loop building blocks
// ============================================================================

/// Pairs (entry state, state reaching the loop head): lfp X. 1 u X;step.
inline FixpointReport<Rel> loop_entry_forward(const Rel& step) {
    std::size_t n = step.states();
    Rel id = Rel::identity(n);
    return lfp([&](const Rel& x) { return id | x.then(step); }, Rel(n), n * n + 2);
}

/// Same relation computed by prefixing steps: lfp X. 1 u step;X.
inline FixpointReport<Rel> loop_entry_backward(const Rel& step) {
    std::size_t n = step.states();
    Rel id = Rel::identity(n);
    return lfp([&](const Rel& x) { return id | step.then(x); }, Rel(n), n * n + 2);
}

/// States admitting an infinite sequence of step transitions: gfp X. pre(step, X).
inline FixpointReport<StateSet> infinite_iteration(const Rel& step) {
    std::size_t n = step.states();
    return gfp([&](const StateSet& x) { return step.preimage(x); }, StateSet(n, true), n + 2);
}

/// X^0 = 1, X^(k+1) = X;X^k.
inline Rel power(const Rel& x, std::size_t k) {
    Rel r = Rel::identity(x.states());
    for (std::size_t i = 0; i < k; ++i) r = x.then(r);
    return r;
}

/// Guarded body of a loop: test(B) followed by the body semantics.
struct LoopParts {
    SemTriple step;       // B;S
    Rel exit_test;        // test(!B)
    Rel entry;            // reachable loop heads
    std::size_t entry_iterations = 0;
    StateSet forever;     // infinitely many body iterations
    std::size_t forever_iterations = 0;
};

inline SemTriple while_from_parts(const LoopParts& p) {
    std::size_t n = p.entry.states();
    SemTriple out;
    out.e = p.entry.then(p.exit_test | p.step.br);
    out.inf = p.entry.preimage(p.step.inf) | p.forever;
    out.br = Rel(n);
    return out;
}

inline LoopParts loop_parts(const StateSpace& sp, const BExpr& b, const SemTriple& body) {
    LoopParts p;
    p.step = compose(prim_test(sp, b), body);
    p.exit_test = prim_test(sp, bnot(b)).e;
    auto entry = loop_entry_forward(p.step.e);
    if (!entry.stabilized) throw std::logic_error("loop entry iteration did not stabilize");
    p.entry = std::move(entry.result);
    p.entry_iterations = entry.iterations;
    auto forever = infinite_iteration(p.step.e);
    if (!forever.stabilized) throw std::logic_error("divergence iteration did not stabilize");
    p.forever = std::move(forever.result);
    p.forever_iterations = forever.iterations;
    return p;
}

// ============================================================================
// Structural semantics
// ============================================================================

inline SemTriple sem(const Stmt& s, const StateSpace& sp) {
    switch (s->kind) {
    case SKind::Assign: return prim_assign(sp, s->target, s->rhs);
    case SKind::RandAssign: return prim_rassign(sp, s->target, s->lo, s->hi);
    case SKind::Skip: return prim_skip(sp);
    case SKind::Break: return prim_break(sp);
    case SKind::BoolTest: return prim_test(sp, s->cond);
    case SKind::Seq: return compose(sem(s->first, sp), sem(s->second, sp));
    case SKind::If:
        return join(compose(prim_test(sp, s->cond), sem(s->first, sp)),
                    compose(prim_test(sp, bnot(s->cond)), sem(s->second, sp)));
    case SKind::While: return while_from_parts(loop_parts(sp, s->cond, sem(s->first, sp)));
    }
    throw std::logic_error("unknown statement kind");
}

// ============================================================================
// Small-step oracle
// ============================================================================

namespace detail {

/// Control-flow graph with one node per control point.
struct Cfg {
    enum class Op { Exit, BreakExit, Assign, Rand, Jump, Branch, Assume };
    struct Node {
        Op op;
        std::size_t var = 0;
        AExpr rhs{};
        std::optional<Value> lo{}, hi{};
        BExpr cond{};
        std::size_t next = 0, other = 0;
    };
    static constexpr std::size_t exit = 0, break_exit = 1;
    std::vector<Node> nodes{{Op::Exit}, {Op::BreakExit}};

    std::size_t add(Node n) {
        nodes.push_back(std::move(n));
        return nodes.size() - 1;
    }

    // Returns the entry node of s, continuing at `next` and jumping to `out` on break.
    std::size_t build(const Stmt& s, const StateSpace& sp, std::size_t next, std::size_t out) {
        switch (s->kind) {
        case SKind::Assign: return add({Op::Assign, sp.require(s->target), s->rhs, {}, {}, {}, next, 0});
        case SKind::RandAssign: return add({Op::Rand, sp.require(s->target), {}, s->lo, s->hi, {}, next, 0});
        case SKind::Skip: return add({Op::Jump, 0, {}, {}, {}, {}, next, 0});
        case SKind::Break: return add({Op::Jump, 0, {}, {}, {}, {}, out, 0});
        case SKind::BoolTest: return add({Op::Assume, 0, {}, {}, {}, s->cond, next, 0});
        case SKind::Seq: {
            std::size_t second = build(s->second, sp, next, out);
            return build(s->first, sp, second, out);
        }
        case SKind::If: {
            std::size_t t = build(s->first, sp, next, out);
            std::size_t f = build(s->second, sp, next, out);
            return add({Op::Branch, 0, {}, {}, {}, s->cond, t, f});
        }
        case SKind::While: {
            std::size_t head = add({Op::Branch, 0, {}, {}, {}, s->cond, 0, next});
            std::size_t body = build(s->first, sp, head, next);
            nodes[head].next = body;
            return head;
        }
        }
        throw std::logic_error("unknown statement kind");
    }
};

} // namespace detail

/// Explicit configuration graph over <control point, state>.
class ConfigGraph {
public:
    ConfigGraph(const Stmt& s, const StateSpace& sp) : sp_(sp) {
        check_bound(s, sp);
        entry_ = cfg_.build(s, sp, detail::Cfg::exit, detail::Cfg::break_exit);
        std::size_t n = sp.size();
        succ_.resize(cfg_.nodes.size() * n);
        for (std::size_t pc = 0; pc < cfg_.nodes.size(); ++pc) {
            const auto& nd = cfg_.nodes[pc];
            for (State st = 0; st < n; ++st) {
                auto& out = succ_[pc * n + st];
                using Op = detail::Cfg::Op;
                switch (nd.op) {
                case Op::Exit:
                case Op::BreakExit: break;
                case Op::Assign:
                    for (State t : assign_successors(sp, st, nd.var, nd.rhs)) out.push_back(nd.next * n + t);
                    break;
                case Op::Rand:
                    for (State t : rand_successors(sp, st, nd.var, nd.lo, nd.hi)) out.push_back(nd.next * n + t);
                    break;
                case Op::Jump: out.push_back(nd.next * n + st); break;
                case Op::Branch: out.push_back((eval(nd.cond, sp, st) ? nd.next : nd.other) * n + st); break;
                case Op::Assume:
                    if (eval(nd.cond, sp, st)) out.push_back(nd.next * n + st);
                    break;
                }
            }
        }
    }

    std::size_t node_count() const { return succ_.size(); }
    std::size_t config(std::size_t pc, State s) const { return pc * sp_.size() + s; }
    std::size_t entry() const { return entry_; }
    const std::vector<std::size_t>& successors(std::size_t c) const { return succ_[c]; }

    std::vector<char> reachable_from(std::size_t c) const {
        std::vector<char> seen(succ_.size(), 0);
        std::vector<std::size_t> stack{c};
        seen[c] = 1;
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v : succ_[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
        }
        return seen;
    }

    /// Marks configurations lying on a cycle (non-trivial SCC or self loop), via Tarjan.
    std::vector<char> on_cycle() const {
        std::size_t m = succ_.size();
        const std::size_t unvisited = std::numeric_limits<std::size_t>::max();
        std::vector<std::size_t> index(m, unvisited), low(m, 0);
        std::vector<char> on_stack(m, 0), cyc(m, 0);
        std::vector<std::size_t> stack;
        std::size_t counter = 0;
        struct Frame {
            std::size_t v, next_edge;
        };
        for (std::size_t root = 0; root < m; ++root) {
            if (index[root] != unvisited) continue;
            std::vector<Frame> call{{root, 0}};
            index[root] = low[root] = counter++;
            stack.push_back(root);
            on_stack[root] = 1;
            while (!call.empty()) {
                Frame& fr = call.back();
                std::size_t v = fr.v;
                if (fr.next_edge < succ_[v].size()) {
                    std::size_t w = succ_[v][fr.next_edge++];
                    if (index[w] == unvisited) {
                        index[w] = low[w] = counter++;
                        stack.push_back(w);
                        on_stack[w] = 1;
                        call.push_back({w, 0});
                    } else if (on_stack[w]) {
                        low[v] = std::min(low[v], index[w]);
                    }
                    continue;
                }
                if (low[v] == index[v]) {
                    std::vector<std::size_t> comp;
                    std::size_t w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp.push_back(w);
                    } while (w != v);
                    bool cyclic = comp.size() > 1;
                    if (!cyclic)
                        for (std::size_t x : succ_[v]) cyclic = cyclic || x == v;
                    if (cyclic)
                        for (std::size_t x : comp) cyc[x] = 1;
                }
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
        }
        return cyc;
    }

private:
    const StateSpace& sp_;
    detail::Cfg cfg_;
    std::size_t entry_ = 0;
    std::vector<std::vector<std::size_t>> succ_;
};

/// Semantics read off the configuration graph: e and br from the two exit
/// nodes, inf from reachability of a cycle.
inline SemTriple oracle_sem(const Stmt& s, const StateSpace& sp) {
    ConfigGraph g(s, sp);
    std::size_t n = sp.size();
    SemTriple out = bottom(sp);
    auto cyc = g.on_cycle();
    for (State st = 0; st < n; ++st) {
        auto seen = g.reachable_from(g.config(g.entry(), st));
        for (State t = 0; t < n; ++t) {
            if (seen[g.config(detail::Cfg::exit, t)]) out.e.insert(st, t);
            if (seen[g.config(detail::Cfg::break_exit, t)]) out.br.insert(st, t);
        }
        for (std::size_t c = 0; c < seen.size(); ++c)
            if (seen[c] && cyc[c]) {
                out.inf.set(st);
                break;
            }
    }
    return out;
}

} // namespace hl
