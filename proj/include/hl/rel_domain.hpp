#pragma once

// Relational instance of the abstract domain over a bounded state space.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hl/lang.hpp"

namespace hl {

// ============================================================================
// Bit vectors
// ============================================================================

/// Fixed-width dynamic bit vector used for state sets and relation rows.
class Bits {
public:
    Bits() = default;
    explicit Bits(std::size_t n, bool fill = false) : n_(n), w_((n + 63) / 64, fill ? ~std::uint64_t{0} : 0) {
        trim();
    }

    std::size_t size() const { return n_; }
    bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    void assign(std::size_t i, bool v) { v ? set(i) : reset(i); }

    bool none() const {
        for (auto w : w_)
            if (w) return false;
        return true;
    }
    bool any() const { return !none(); }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    Bits& operator|=(const Bits& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    Bits& operator&=(const Bits& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    Bits& operator-=(const Bits& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
        return *this;
    }
    friend Bits operator|(Bits a, const Bits& b) { return a |= b; }
    friend Bits operator&(Bits a, const Bits& b) { return a &= b; }
    friend Bits operator-(Bits a, const Bits& b) { return a -= b; }
    Bits complement() const {
        Bits r(*this);
        for (auto& w : r.w_) w = ~w;
        r.trim();
        return r;
    }

    bool subset_of(const Bits& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }
    bool intersects(const Bits& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }

    template <class F> void for_each(F&& f) const {
        for (std::size_t k = 0; k < w_.size(); ++k) {
            std::uint64_t w = w_[k];
            while (w) {
                std::size_t b = static_cast<std::size_t>(std::countr_zero(w));
                f(k * 64 + b);
                w &= w - 1;
            }
        }
    }
    std::vector<std::size_t> elements() const {
        std::vector<std::size_t> out;
        for_each([&](std::size_t i) { out.push_back(i); });
        return out;
    }

    bool operator==(const Bits& o) const = default;
    // Total order: lexicographic on the ascending element lists.
    std::strong_ordering operator<=>(const Bits& o) const {
        if (auto c = n_ <=> o.n_; c != 0) return c;
        for (std::size_t k = 0; k < w_.size(); ++k) {
            std::uint64_t a = w_[k], b = o.w_[k];
            if (a == b) continue;
            std::uint64_t diff = a ^ b;
            std::uint64_t low = diff & (~diff + 1);
            // The set holding the lowest differing element sorts first unless the
            // other set stops there (a proper prefix sorts first).
            bool in_a = a & low;
            const Bits& other = in_a ? o : *this;
            bool other_continues = (other.w_[k] & ~(low | (low - 1))) != 0;
            for (std::size_t j = k + 1; !other_continues && j < w_.size(); ++j) other_continues = other.w_[j] != 0;
            bool a_first = in_a == other_continues;
            return a_first ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        return std::strong_ordering::equal;
    }

    const std::vector<std::uint64_t>& words() const { return w_; }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;

    void trim() {
        if (n_ % 64 && !w_.empty()) w_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
    }
};

// ============================================================================
// State space
// ============================================================================

enum class Arith { Saturate, Wrap, Prune };

inline std::string to_string(Arith a) {
    switch (a) {
    case Arith::Saturate: return "saturate";
    case Arith::Wrap: return "wrap";
    case Arith::Prune: return "prune";
    }
    return "?";
}

inline Arith arith_from_string(const std::string& s) {
    if (s == "saturate") return Arith::Saturate;
    if (s == "wrap") return Arith::Wrap;
    if (s == "prune") return Arith::Prune;
    throw std::invalid_argument("unknown arithmetic mode '" + s + "'");
}

class UnboundVariable : public std::runtime_error {
public:
    explicit UnboundVariable(const std::string& v) : std::runtime_error("unbound variable '" + v + "'"), name(v) {}
    std::string name;
};

using Value = std::int64_t;
using State = std::size_t; // index into the enumerated state space

/// Finite universe of states: each variable ranges over [lo, hi].
/// States are numbered lexicographically on the variable list.
class StateSpace {
public:
    static constexpr std::size_t max_states = 4096;

    StateSpace(std::vector<std::string> vars, Value lo, Value hi, Arith mode = Arith::Saturate)
        : StateSpace(vars, std::vector<Value>(vars.size(), lo), std::vector<Value>(vars.size(), hi), mode) {}

    StateSpace(std::vector<std::string> vars, std::vector<Value> lo, std::vector<Value> hi,
               Arith mode = Arith::Saturate)
        : vars_(std::move(vars)), lo_(std::move(lo)), hi_(std::move(hi)), mode_(mode) {
        if (vars_.empty()) throw std::invalid_argument("state space needs at least one variable");
        if (lo_.size() != vars_.size() || hi_.size() != vars_.size())
            throw std::invalid_argument("bounds do not match the variable list");
        std::size_t total = 1;
        for (std::size_t k = 0; k < vars_.size(); ++k) {
            if (lo_[k] > hi_[k]) throw std::invalid_argument("empty range for variable '" + vars_[k] + "'");
            for (std::size_t j = 0; j < k; ++j)
                if (vars_[j] == vars_[k]) throw std::invalid_argument("duplicate variable '" + vars_[k] + "'");
            auto width = static_cast<std::size_t>(hi_[k] - lo_[k] + 1);
            if (width > max_states || total * width > max_states)
                throw std::invalid_argument("state space exceeds " + std::to_string(max_states) + " states");
            total *= width;
        }
        size_ = total;
        values_.resize(size_ * vars_.size());
        for (std::size_t s = 0; s < size_; ++s) {
            std::size_t rem = s;
            for (std::size_t k = vars_.size(); k-- > 0;) {
                auto width = static_cast<std::size_t>(hi_[k] - lo_[k] + 1);
                values_[s * vars_.size() + k] = lo_[k] + static_cast<Value>(rem % width);
                rem /= width;
            }
        }
    }

    const std::vector<std::string>& vars() const { return vars_; }
    Value lo(std::size_t k) const { return lo_[k]; }
    Value hi(std::size_t k) const { return hi_[k]; }
    Arith arith() const { return mode_; }
    std::size_t size() const { return size_; }

    int index_of(const std::string& v) const {
        for (std::size_t k = 0; k < vars_.size(); ++k)
            if (vars_[k] == v) return static_cast<int>(k);
        return -1;
    }
    std::size_t require(const std::string& v) const {
        int k = index_of(v);
        if (k < 0) throw UnboundVariable(v);
        return static_cast<std::size_t>(k);
    }

    Value value(State s, std::size_t k) const { return values_[s * vars_.size() + k]; }
    const Value* values(State s) const { return &values_[s * vars_.size()]; }

    State encode(const std::vector<Value>& vals) const {
        if (vals.size() != vars_.size()) throw std::invalid_argument("state arity mismatch");
        std::size_t idx = 0;
        for (std::size_t k = 0; k < vars_.size(); ++k) {
            if (vals[k] < lo_[k] || vals[k] > hi_[k])
                throw std::out_of_range("value " + std::to_string(vals[k]) + " outside the range of '" +
                                        vars_[k] + "'");
            idx = idx * static_cast<std::size_t>(hi_[k] - lo_[k] + 1) + static_cast<std::size_t>(vals[k] - lo_[k]);
        }
        return idx;
    }
    std::vector<Value> decode(State s) const { return {values(s), values(s) + vars_.size()}; }

    /// State equal to s except that variable k holds v (v must be in range).
    State with(State s, std::size_t k, Value v) const {
        std::size_t stride = 1;
        for (std::size_t j = vars_.size(); j-- > k + 1;) stride *= static_cast<std::size_t>(hi_[j] - lo_[j] + 1);
        return s + static_cast<std::size_t>(v - value(s, k)) * stride;
    }

    /// Maps an arithmetic result into the range of variable k per the arithmetic mode.
    std::optional<Value> fit(Value v, std::size_t k) const {
        if (v >= lo_[k] && v <= hi_[k]) return v;
        switch (mode_) {
        case Arith::Saturate: return std::clamp(v, lo_[k], hi_[k]);
        case Arith::Wrap: {
            Value m = hi_[k] - lo_[k] + 1;
            return lo_[k] + (((v - lo_[k]) % m) + m) % m;
        }
        case Arith::Prune: return std::nullopt;
        }
        return std::nullopt;
    }

    std::string show(State s) const {
        std::string out;
        for (std::size_t k = 0; k < vars_.size(); ++k) {
            if (k) out += ",";
            out += vars_[k] + ":" + std::to_string(value(s, k));
        }
        return out;
    }

    bool operator==(const StateSpace& o) const {
        return vars_ == o.vars_ && lo_ == o.lo_ && hi_ == o.hi_ && mode_ == o.mode_;
    }

private:
    std::vector<std::string> vars_;
    std::vector<Value> lo_, hi_;
    Arith mode_;
    std::size_t size_ = 0;
    std::vector<Value> values_;
};

// ============================================================================
// Expression evaluation
// ============================================================================

inline Value eval(const AExpr& e, const StateSpace& sp, State s) {
    switch (e->kind) {
    case AKind::Const: return e->value;
    case AKind::Var: return sp.value(s, sp.require(e->name));
    case AKind::Neg: return -eval(e->lhs, sp, s);
    case AKind::Add: return eval(e->lhs, sp, s) + eval(e->rhs, sp, s);
    case AKind::Sub: return eval(e->lhs, sp, s) - eval(e->rhs, sp, s);
    case AKind::Mul: return eval(e->lhs, sp, s) * eval(e->rhs, sp, s);
    }
    return 0;
}

inline bool eval(const BExpr& e, const StateSpace& sp, State s) {
    switch (e->kind) {
    case BKind::True: return true;
    case BKind::False: return false;
    case BKind::Not: return !eval(e->lhs, sp, s);
    case BKind::And: return eval(e->lhs, sp, s) && eval(e->rhs, sp, s);
    case BKind::Or: return eval(e->lhs, sp, s) || eval(e->rhs, sp, s);
    case BKind::Cmp: {
        Value a = eval(e->a, sp, s), b = eval(e->b, sp, s);
        switch (e->op) {
        case CmpOp::Eq: return a == b;
        case CmpOp::Ne: return a != b;
        case CmpOp::Lt: return a < b;
        case CmpOp::Le: return a <= b;
        case CmpOp::Gt: return a > b;
        case CmpOp::Ge: return a >= b;
        }
    }
    }
    return false;
}

/// Throws UnboundVariable if the statement mentions a variable outside the space.
inline void check_bound(const Stmt& s, const StateSpace& sp) {
    for (const auto& v : variables(s)) sp.require(v);
}

/// Successor states of a single assignment step (empty when pruned).
inline std::vector<State> assign_successors(const StateSpace& sp, State s, std::size_t k, const AExpr& e) {
    if (auto v = sp.fit(eval(e, sp, s), k)) return {sp.with(s, k, *v)};
    return {};
}

inline std::vector<State> rand_successors(const StateSpace& sp, State s, std::size_t k,
                                          const std::optional<Value>& lo, const std::optional<Value>& hi) {
    Value a = lo ? std::max(*lo, sp.lo(k)) : sp.lo(k);
    Value b = hi ? std::min(*hi, sp.hi(k)) : sp.hi(k);
    std::vector<State> out;
    for (Value v = a; v <= b; ++v) out.push_back(sp.with(s, k, v));
    return out;
}

// ============================================================================
// Relations
// ============================================================================

using StateSet = Bits;

/// Binary relation on states, stored as one successor row per state.
class Rel {
public:
    Rel() = default;
    explicit Rel(std::size_t n) : rows_(n, Bits(n)) {}

    static Rel identity(std::size_t n) {
        Rel r(n);
        for (std::size_t i = 0; i < n; ++i) r.rows_[i].set(i);
        return r;
    }
    static Rel full(std::size_t n) {
        Rel r(n);
        for (auto& row : r.rows_) row = Bits(n, true);
        return r;
    }
    /// Identity restricted to a set of states.
    static Rel diagonal(const StateSet& s) {
        Rel r(s.size());
        s.for_each([&](std::size_t i) { r.rows_[i].set(i); });
        return r;
    }

    std::size_t states() const { return rows_.size(); }
    bool contains(State a, State b) const { return rows_[a].test(b); }
    void insert(State a, State b) { rows_[a].set(b); }
    void erase(State a, State b) { rows_[a].reset(b); }
    const Bits& row(State a) const { return rows_[a]; }
    Bits& row(State a) { return rows_[a]; }

    bool empty() const {
        for (const auto& r : rows_)
            if (r.any()) return false;
        return true;
    }
    std::size_t size() const {
        std::size_t c = 0;
        for (const auto& r : rows_) c += r.count();
        return c;
    }

    Rel& operator|=(const Rel& o) {
        for (std::size_t i = 0; i < rows_.size(); ++i) rows_[i] |= o.rows_[i];
        return *this;
    }
    Rel& operator&=(const Rel& o) {
        for (std::size_t i = 0; i < rows_.size(); ++i) rows_[i] &= o.rows_[i];
        return *this;
    }
    friend Rel operator|(Rel a, const Rel& b) { return a |= b; }
    friend Rel operator&(Rel a, const Rel& b) { return a &= b; }

    bool subset_of(const Rel& o) const {
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (!rows_[i].subset_of(o.rows_[i])) return false;
        return true;
    }

    /// Relational composition: first this, then o.
    Rel then(const Rel& o) const {
        Rel r(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) rows_[i].for_each([&](std::size_t j) { r.rows_[i] |= o.rows_[j]; });
        return r;
    }

    /// States with at least one successor in s.
    StateSet preimage(const StateSet& s) const {
        StateSet out(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (rows_[i].intersects(s)) out.set(i);
        return out;
    }
    StateSet image(const StateSet& s) const {
        StateSet out(rows_.size());
        s.for_each([&](std::size_t i) { out |= rows_[i]; });
        return out;
    }
    StateSet domain() const {
        StateSet out(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (rows_[i].any()) out.set(i);
        return out;
    }

    template <class F> void for_each(F&& f) const {
        for (std::size_t i = 0; i < rows_.size(); ++i) rows_[i].for_each([&](std::size_t j) { f(i, j); });
    }
    std::vector<std::pair<State, State>> pairs() const {
        std::vector<std::pair<State, State>> out;
        for_each([&](State a, State b) { out.emplace_back(a, b); });
        return out;
    }

    bool operator==(const Rel& o) const = default;
    std::strong_ordering operator<=>(const Rel& o) const {
        if (auto c = rows_.size() <=> o.rows_.size(); c != 0) return c;
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (auto c = rows_[i] <=> o.rows_[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }

private:
    std::vector<Bits> rows_;
};

// ============================================================================
// Semantic triples
// ============================================================================

/// Execution property: terminating pairs, divergent start states, break pairs.
struct SemTriple {
    Rel e;
    StateSet inf;
    Rel br;

    bool operator==(const SemTriple&) const = default;
    std::strong_ordering operator<=>(const SemTriple& o) const {
        if (auto c = e <=> o.e; c != 0) return c;
        if (auto c = inf <=> o.inf; c != 0) return c;
        return br <=> o.br;
    }
};

inline SemTriple bottom(std::size_t n) { return {Rel(n), StateSet(n), Rel(n)}; }
inline SemTriple bottom(const StateSpace& sp) { return bottom(sp.size()); }
inline SemTriple top(const StateSpace& sp) {
    return {Rel::full(sp.size()), StateSet(sp.size(), true), Rel::full(sp.size())};
}

inline SemTriple join(const SemTriple& a, const SemTriple& b) { return {a.e | b.e, a.inf | b.inf, a.br | b.br}; }
inline SemTriple meet(const SemTriple& a, const SemTriple& b) { return {a.e & b.e, a.inf & b.inf, a.br & b.br}; }

/// Componentwise inclusion on all three fields.
inline bool leq(const SemTriple& a, const SemTriple& b) {
    return a.e.subset_of(b.e) && a.inf.subset_of(b.inf) && a.br.subset_of(b.br);
}
inline bool leq(const Rel& a, const Rel& b) { return a.subset_of(b); }
inline bool leq(const Bits& a, const Bits& b) { return a.subset_of(b); }

/// Sequential composition of execution properties.
inline SemTriple compose(const SemTriple& t1, const SemTriple& t2) {
    return {t1.e.then(t2.e), t1.inf | t1.e.preimage(t2.inf), t1.br | t1.e.then(t2.br)};
}

inline SemTriple only_e(Rel e) {
    std::size_t n = e.states();
    return {std::move(e), StateSet(n), Rel(n)};
}

// ============================================================================
// Primitives
// ============================================================================

inline SemTriple prim_init(const StateSpace& sp) { return only_e(Rel::identity(sp.size())); }
inline SemTriple prim_skip(const StateSpace& sp) { return prim_init(sp); }
inline SemTriple prim_break(const StateSpace& sp) {
    return {Rel(sp.size()), StateSet(sp.size()), Rel::identity(sp.size())};
}

inline SemTriple prim_assign(const StateSpace& sp, const std::string& x, const AExpr& rhs) {
    std::size_t k = sp.require(x);
    std::set<std::string> used;
    collect_vars(rhs, used);
    for (const auto& v : used) sp.require(v);
    Rel r(sp.size());
    for (State s = 0; s < sp.size(); ++s)
        for (State t : assign_successors(sp, s, k, rhs)) r.insert(s, t);
    return only_e(std::move(r));
}

inline SemTriple prim_rassign(const StateSpace& sp, const std::string& x, std::optional<Value> lo,
                              std::optional<Value> hi) {
    std::size_t k = sp.require(x);
    Rel r(sp.size());
    for (State s = 0; s < sp.size(); ++s)
        for (State t : rand_successors(sp, s, k, lo, hi)) r.insert(s, t);
    return only_e(std::move(r));
}

inline StateSet satisfying(const StateSpace& sp, const BExpr& b) {
    std::set<std::string> used;
    collect_vars(b, used);
    for (const auto& v : used) sp.require(v);
    StateSet out(sp.size());
    for (State s = 0; s < sp.size(); ++s)
        if (eval(b, sp, s)) out.set(s);
    return out;
}

inline SemTriple prim_test(const StateSpace& sp, const BExpr& b) { return only_e(Rel::diagonal(satisfying(sp, b))); }

} // namespace hl
