#pragma once

// Seeded random generation of programs, spaces, triples and hyperproperties.

#include <random>
#include <string>
#include <vector>

#include "hl/transformers.hpp"

namespace hl {

struct GenConfig {
    std::size_t max_depth = 4;
    std::size_t max_vars = 2;
    std::size_t max_values = 5;
    Value min_lo = -2;
    bool loops = true;
    bool breaks = true;
};

class ProgramGen {
public:
    explicit ProgramGen(std::uint64_t seed, GenConfig cfg = {}) : rng_(seed), cfg_(cfg) {}

    std::mt19937_64& rng() { return rng_; }

    StateSpace space() {
        static const std::vector<std::string> names{"x", "y", "z"};
        std::size_t k = pick(1, cfg_.max_vars);
        std::vector<std::string> vars(names.begin(), names.begin() + k);
        Value lo = pick_value(cfg_.min_lo, 0);
        Value hi = lo + pick_value(1, Value(cfg_.max_values) - 1);
        return StateSpace(vars, lo, hi, Arith::Saturate);
    }

    /// A program over the variables of sp whose AST depth is at most the configured bound.
    Stmt program(const StateSpace& sp) {
        vars_ = sp.vars();
        lo_ = sp.lo(0);
        hi_ = sp.hi(0);
        return stmt(pick(std::min<std::size_t>(2, cfg_.max_depth), cfg_.max_depth), false);
    }

    BExpr condition(const StateSpace& sp) {
        vars_ = sp.vars();
        lo_ = sp.lo(0);
        hi_ = sp.hi(0);
        return bexpr(2);
    }

    /// Random triple over n states; each pair or state is present with probability density.
    SemTriple triple(std::size_t n, double density = 0.3, bool with_inf = true, bool with_br = true) {
        SemTriple t = bottom(n);
        std::bernoulli_distribution coin(density);
        for (State a = 0; a < n; ++a) {
            for (State b = 0; b < n; ++b) {
                if (coin(rng_)) t.e.insert(a, b);
                if (with_br && coin(rng_)) t.br.insert(a, b);
            }
            if (with_inf && coin(rng_)) t.inf.set(a);
        }
        return t;
    }

    HyperSet hyper(std::size_t n, std::size_t count, double density = 0.3) {
        HyperSet out;
        for (std::size_t i = 0; i < count; ++i) out.insert(triple(n, density));
        return out;
    }

    std::size_t pick(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
    Value pick_value(Value lo, Value hi) { return std::uniform_int_distribution<Value>(lo, hi)(rng_); }

private:
    std::mt19937_64 rng_;
    GenConfig cfg_;
    std::vector<std::string> vars_;
    Value lo_ = 0, hi_ = 0;

    std::string some_var() { return vars_[pick(0, vars_.size() - 1)]; }

    AExpr atom() { return pick(0, 2) == 0 ? cst(pick_value(lo_, hi_)) : var(some_var()); }

    AExpr aexpr(std::size_t d) {
        if (d == 0 || pick(0, 2) == 0) return atom();
        switch (pick(0, 3)) {
        case 0: return abin(AKind::Add, aexpr(d - 1), atom());
        case 1: return abin(AKind::Sub, aexpr(d - 1), atom());
        case 2: return abin(AKind::Mul, atom(), atom());
        default: return neg(atom());
        }
    }

    BExpr bexpr(std::size_t d) {
        if (d == 0 || pick(0, 3) != 0) {
            if (pick(0, 15) == 0) return pick(0, 1) ? btrue() : bfalse();
            return cmp(static_cast<CmpOp>(pick(0, 5)), var(some_var()), atom());
        }
        switch (pick(0, 2)) {
        case 0: return bnot(bexpr(d - 1));
        case 1: return band(bexpr(d - 1), bexpr(d - 1));
        default: return bor(bexpr(d - 1), bexpr(d - 1));
        }
    }

    Stmt basic(bool in_loop) {
        std::size_t k = pick(0, in_loop && cfg_.breaks ? 9 : 8);
        if (k <= 4) return assign(some_var(), aexpr(1));
        if (k <= 6) {
            Value a = pick_value(lo_, hi_), b = pick_value(lo_, hi_);
            if (a > b) std::swap(a, b);
            if (pick(0, 3) == 0) return rand_assign(some_var(), std::nullopt, std::nullopt);
            return rand_assign(some_var(), a, b);
        }
        if (k <= 8) return skip();
        return brk();
    }

    Stmt stmt(std::size_t d, bool in_loop) {
        if (d <= 1) return basic(in_loop);
        std::size_t k = pick(0, cfg_.loops ? 6 : 4);
        switch (k) {
        case 0: return basic(in_loop);
        case 1:
        case 2: return seq(stmt(d - 1, in_loop), stmt(pick(1, d - 1), in_loop));
        case 3:
        case 4: return ite(bexpr(1), stmt(d - 1, in_loop), stmt(pick(1, d - 1), in_loop));
        default: return loop(bexpr(1), stmt(d - 1, true));
        }
    }
};

} // namespace hl
