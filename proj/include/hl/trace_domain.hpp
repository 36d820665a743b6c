#pragma once

// Bounded finite-trace semantics and its abstraction onto relations.

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hl/interpreter.hpp"

namespace hl {

using Trace = std::vector<State>;

/// Finite traces split by how they end, with the divergent start states
/// standing in for infinite traces.
struct TraceSet {
    std::set<Trace> e;
    std::set<Trace> br;
    StateSet div_starts;
    // Set when a trace longer than the bound (or the trace budget) was dropped.
    bool truncated = false;

    bool operator==(const TraceSet&) const = default;
};

struct TraceLimits {
    std::size_t max_length = 8;
    std::size_t max_traces = 200000;
};

/// Joins traces that share the boundary state: (p s) ; (s q) = p s q.
inline Trace concat(const Trace& a, const Trace& b) {
    if (a.empty() || b.empty() || a.back() != b.front()) throw std::invalid_argument("traces do not meet");
    Trace out(a);
    out.insert(out.end(), b.begin() + 1, b.end());
    return out;
}

namespace detail {

class TraceBuilder {
public:
    TraceBuilder(const StateSpace& sp, TraceLimits lim) : sp_(sp), lim_(lim) {}

    bool truncated() const { return truncated_; }

    struct Parts {
        std::set<Trace> e, br;
    };

    Parts run(const Stmt& s) {
        switch (s->kind) {
        case SKind::Skip: return {pairs([&](State a) { return std::vector<State>{a}; }), {}};
        case SKind::Assign: {
            std::size_t k = sp_.require(s->target);
            return {pairs([&](State a) { return assign_successors(sp_, a, k, s->rhs); }), {}};
        }
        case SKind::RandAssign: {
            std::size_t k = sp_.require(s->target);
            return {pairs([&](State a) { return rand_successors(sp_, a, k, s->lo, s->hi); }), {}};
        }
        case SKind::BoolTest: return {singletons(satisfying(sp_, s->cond)), {}};
        case SKind::Break: return {{}, singletons(StateSet(sp_.size(), true))};
        case SKind::Seq: {
            Parts a = run(s->first);
            Parts b = run(s->second);
            Parts out;
            out.e = cat(a.e, b.e);
            out.br = a.br;
            for (auto& t : cat(a.e, b.br)) out.br.insert(t);
            return out;
        }
        case SKind::If: {
            Parts a = guarded(s->cond, s->first);
            Parts b = guarded(bnot(s->cond), s->second);
            a.e.insert(b.e.begin(), b.e.end());
            a.br.insert(b.br.begin(), b.br.end());
            return a;
        }
        case SKind::While: {
            Parts step = guarded(s->cond, s->first);
            // Traces reaching the loop head, grown one body iteration at a time.
            std::set<Trace> reach = singletons(StateSet(sp_.size(), true));
            std::set<Trace> frontier = reach;
            while (!frontier.empty()) {
                std::set<Trace> next;
                for (auto& t : cat(frontier, step.e))
                    if (reach.insert(t).second) next.insert(t);
                frontier = std::move(next);
            }
            std::set<Trace> exits = singletons(satisfying(sp_, bnot(s->cond)));
            exits.insert(step.br.begin(), step.br.end());
            return {cat(reach, exits), {}};
        }
        }
        throw std::logic_error("unknown statement kind");
    }

private:
    const StateSpace& sp_;
    TraceLimits lim_;
    bool truncated_ = false;

    Parts guarded(const BExpr& b, const Stmt& body) {
        Parts inner = run(body);
        StateSet ok = satisfying(sp_, b);
        Parts out;
        for (auto& t : inner.e)
            if (ok.test(t.front())) out.e.insert(t);
        for (auto& t : inner.br)
            if (ok.test(t.front())) out.br.insert(t);
        return out;
    }

    std::set<Trace> singletons(const StateSet& s) {
        std::set<Trace> out;
        s.for_each([&](std::size_t i) { out.insert(Trace{i}); });
        return out;
    }

    template <class F> std::set<Trace> pairs(F&& succ) {
        std::set<Trace> out;
        for (State a = 0; a < sp_.size(); ++a)
            for (State b : succ(a)) keep(out, Trace{a, b});
        return out;
    }

    void keep(std::set<Trace>& out, Trace t) {
        if (t.size() > lim_.max_length || out.size() >= lim_.max_traces) {
            truncated_ = true;
            return;
        }
        out.insert(std::move(t));
    }

    std::set<Trace> cat(const std::set<Trace>& a, const std::set<Trace>& b) {
        std::map<State, std::vector<const Trace*>> by_first;
        for (auto& t : b) by_first[t.front()].push_back(&t);
        std::set<Trace> out;
        for (auto& x : a) {
            auto it = by_first.find(x.back());
            if (it == by_first.end()) continue;
            for (const Trace* y : it->second) {
                if (x.size() + y->size() - 1 > lim_.max_length) {
                    truncated_ = true;
                    continue;
                }
                keep(out, concat(x, *y));
            }
        }
        return out;
    }
};

} // namespace detail

/// Finite-trace semantics up to the length bound. Infinite behaviour is
/// represented by the divergent start states of the relational semantics.
inline TraceSet trace_sem(const Stmt& s, const StateSpace& sp, TraceLimits lim = {}) {
    if (lim.max_length < 1) throw std::invalid_argument("maximal trace length must be at least 1");
    check_bound(s, sp);
    detail::TraceBuilder tb(sp, lim);
    auto parts = tb.run(s);
    TraceSet out;
    out.e = std::move(parts.e);
    out.br = std::move(parts.br);
    out.div_starts = sem(s, sp).inf;
    out.truncated = tb.truncated();
    return out;
}

inline TraceSet trace_sem(const Stmt& s, const StateSpace& sp, std::size_t max_length) {
    return trace_sem(s, sp, TraceLimits{max_length, TraceLimits{}.max_traces});
}

/// First/last state abstraction of the finite traces; divergence passes through.
inline SemTriple abstract_to_rel(const TraceSet& t, std::size_t n) {
    SemTriple out = bottom(n);
    for (auto& x : t.e) out.e.insert(x.front(), x.back());
    for (auto& x : t.br) out.br.insert(x.front(), x.back());
    if (t.div_starts.size() == n) out.inf = t.div_starts;
    return out;
}

inline std::string show_trace(const Trace& t, const StateSpace& sp) {
    std::string out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ";";
        out += sp.show(t[i]);
    }
    return out;
}

/// One trace per line in canonical order.
inline std::string dump(const std::set<Trace>& ts, const StateSpace& sp) {
    std::string out;
    for (auto& t : ts) out += show_trace(t, sp) + "\n";
    return out;
}

} // namespace hl
