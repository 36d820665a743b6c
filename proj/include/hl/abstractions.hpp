#pragma once

// Abstractions of hyperproperties on finitely presented posets and lattices,
// hyperproperty families, and closure-law checks.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hl/transformers.hpp"

namespace hl {

using HyperSubset = Bits;

class MalformedLattice : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// ============================================================================
// Posets and lattices
// ============================================================================

/// Finite partial order with up-set and down-set rows per element.
class Poset {
public:
    Poset() = default;

    /// Order generated by `below` pairs (lesser, greater), closed reflexively and transitively.
    Poset(std::vector<std::string> names, const std::vector<std::pair<std::string, std::string>>& below)
        : names_(std::move(names)) {
        init_rows();
        for (auto& [a, b] : below) up_[index(a)].set(index(b));
        for (std::size_t k = 0; k < size(); ++k)
            for (std::size_t i = 0; i < size(); ++i)
                if (up_[i].test(k)) up_[i] |= up_[k];
        finish();
    }

    /// Order given by a predicate, which must already be a partial order.
    static Poset from_leq(std::vector<std::string> names, const std::function<bool(std::size_t, std::size_t)>& leq) {
        Poset p;
        p.names_ = std::move(names);
        p.init_rows();
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t j = 0; j < p.size(); ++j)
                if (leq(i, j)) p.up_[i].set(j);
        for (std::size_t i = 0; i < p.size(); ++i)
            p.up_[i].for_each([&](std::size_t j) {
                if (!p.up_[j].subset_of(p.up_[i])) throw MalformedLattice("order is not transitive at " + p.names_[i]);
            });
        p.finish();
        return p;
    }

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_[i]; }
    const std::vector<std::string>& names() const { return names_; }
    std::size_t index(const std::string& n) const {
        auto it = ids_.find(n);
        if (it == ids_.end()) throw MalformedLattice("unknown element '" + n + "'");
        return it->second;
    }
    bool leq(std::size_t i, std::size_t j) const { return up_[i].test(j); }
    const Bits& up(std::size_t i) const { return up_[i]; }
    const Bits& down(std::size_t i) const { return down_[i]; }

    HyperSubset none() const { return HyperSubset(size()); }
    HyperSubset all() const { return HyperSubset(size(), true); }
    HyperSubset subset(const std::vector<std::string>& elems) const {
        HyperSubset h = none();
        for (auto& e : elems) h.set(index(e));
        return h;
    }
    std::vector<std::string> names_of(const HyperSubset& h) const {
        std::vector<std::string> out;
        h.for_each([&](std::size_t i) { out.push_back(names_[i]); });
        return out;
    }
    std::string show(const HyperSubset& h) const {
        std::string out = "{";
        bool first = true;
        h.for_each([&](std::size_t i) {
            if (!first) out += ",";
            out += names_[i];
            first = false;
        });
        return out + "}";
    }

private:
    std::vector<std::string> names_;
    std::map<std::string, std::size_t> ids_;
    std::vector<Bits> up_, down_;

    void init_rows() {
        ids_.clear();
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (!ids_.emplace(names_[i], i).second) throw MalformedLattice("duplicate element '" + names_[i] + "'");
        up_.assign(size(), Bits(size()));
        for (std::size_t i = 0; i < size(); ++i) up_[i].set(i);
    }

    void finish() {
        down_.assign(size(), Bits(size()));
        for (std::size_t i = 0; i < size(); ++i) up_[i].for_each([&](std::size_t j) { down_[j].set(i); });
        for (std::size_t i = 0; i < size(); ++i) {
            Bits both = up_[i] & down_[i];
            if (both.count() != 1) throw MalformedLattice("order is not antisymmetric at " + names_[i]);
        }
    }
};

/// Finite lattice: a poset in which every pair has a join and a meet.
class ToyLattice : public Poset {
public:
    ToyLattice() = default;

    explicit ToyLattice(Poset p) : Poset(std::move(p)) {
        std::size_t n = size();
        if (n == 0) throw MalformedLattice("empty lattice");
        std::vector<std::size_t> ups(n), downs(n);
        for (std::size_t i = 0; i < n; ++i) {
            ups[i] = up(i).count();
            downs[i] = down(i).count();
        }
        join_.assign(n * n, 0);
        meet_.assign(n * n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                join_[i * n + j] = join_[j * n + i] = extremum(up(i) & up(j), ups, true, i, j);
                meet_[i * n + j] = meet_[j * n + i] = extremum(down(i) & down(j), downs, false, i, j);
            }
        bot_ = top_ = 0;
        for (std::size_t i = 1; i < n; ++i) {
            bot_ = meet(bot_, i);
            top_ = join(top_, i);
        }
    }

    ToyLattice(std::vector<std::string> names, const std::vector<std::pair<std::string, std::string>>& below)
        : ToyLattice(Poset(std::move(names), below)) {}

    /// Subsets of a base of k named atoms ordered by inclusion; element i is the bitmask i.
    static ToyLattice powerset(std::size_t k, std::vector<std::string> atoms = {}) {
        if (k > 10) throw std::invalid_argument("powerset base too large");
        if (atoms.empty())
            for (std::size_t a = 0; a < k; ++a) atoms.push_back(std::string(1, char('a' + a)));
        std::vector<std::string> names;
        for (std::size_t m = 0; m < (std::size_t{1} << k); ++m) {
            std::string s = "{";
            for (std::size_t a = 0; a < k; ++a)
                if (m >> a & 1) s += (s.size() > 1 ? "," : "") + atoms[a];
            names.push_back(s + "}");
        }
        return ToyLattice(Poset::from_leq(names, [](std::size_t i, std::size_t j) { return (i & ~j) == 0; }));
    }

    std::size_t bot() const { return bot_; }
    std::size_t top() const { return top_; }
    std::size_t join(std::size_t i, std::size_t j) const { return join_[i * size() + j]; }
    std::size_t meet(std::size_t i, std::size_t j) const { return meet_[i * size() + j]; }

    std::size_t join_all(const HyperSubset& h) const {
        std::size_t out = bot_;
        h.for_each([&](std::size_t i) { out = join(out, i); });
        return out;
    }
    std::size_t meet_all(const HyperSubset& h) const {
        std::size_t out = top_;
        h.for_each([&](std::size_t i) { out = meet(out, i); });
        return out;
    }

private:
    std::vector<std::size_t> join_, meet_;
    std::size_t bot_ = 0, top_ = 0;

    std::size_t extremum(const Bits& bounds, const std::vector<std::size_t>& weight, bool least, std::size_t i,
                         std::size_t j) const {
        std::optional<std::size_t> best;
        bounds.for_each([&](std::size_t k) {
            if (!best || weight[k] > weight[*best]) best = k;
        });
        if (!best || !bounds.subset_of(least ? up(*best) : down(*best)))
            throw MalformedLattice(std::string("no ") + (least ? "join" : "meet") + " for " + name(i) + " and " + name(j));
        return *best;
    }
};

// ============================================================================
// Declared chain families
// ============================================================================

/// A finite stand-in for an infinite chain: its listed elements, and the limit
/// (glb of a descending family, lub of an ascending one) if the limit exists.
struct ChainFamily {
    std::string name;
    std::vector<std::size_t> elements;
    std::optional<std::size_t> limit;
    bool descending = true;
};

struct ChainPoset {
    Poset poset;
    std::vector<ChainFamily> families;

    ChainPoset() = default;
    ChainPoset(Poset p, std::vector<ChainFamily> fams) : poset(std::move(p)), families(std::move(fams)) { validate(); }

    void validate() const {
        for (auto& f : families) {
            if (f.elements.size() < 2) throw MalformedLattice("family " + f.name + " needs at least two elements");
            for (std::size_t k = 0; k + 1 < f.elements.size(); ++k) {
                std::size_t a = f.elements[k], b = f.elements[k + 1];
                bool ok = f.descending ? poset.leq(b, a) && a != b : poset.leq(a, b) && a != b;
                if (!ok) throw MalformedLattice("family " + f.name + " is not a strict chain in its declared direction");
            }
            if (f.limit)
                for (std::size_t e : f.elements) {
                    bool bound = f.descending ? poset.leq(*f.limit, e) : poset.leq(e, *f.limit);
                    if (!bound) throw MalformedLattice("limit of family " + f.name + " does not bound it");
                }
        }
    }

    /// Builds a family, inferring its direction from the first two elements.
    ChainFamily family(const std::string& name, const std::vector<std::string>& elems,
                       std::optional<std::string> limit) const {
        ChainFamily f{name, {}, std::nullopt, true};
        for (auto& e : elems) f.elements.push_back(poset.index(e));
        if (limit) f.limit = poset.index(*limit);
        if (f.elements.size() >= 2) f.descending = poset.leq(f.elements[1], f.elements[0]);
        return f;
    }
};

namespace detail {
inline bool contains_all(const HyperSubset& p, const ChainFamily& f) {
    return std::all_of(f.elements.begin(), f.elements.end(), [&](std::size_t e) { return p.test(e); });
}
} // namespace detail

// ============================================================================
// Join abstraction and images
// ============================================================================

inline std::size_t alpha_join(const ToyLattice& l, const HyperSubset& p) { return l.join_all(p); }
inline HyperSubset gamma_join(const ToyLattice& l, std::size_t x) { return l.down(x); }

inline HyperSubset homomorphic(const Poset& l, const std::function<std::size_t(std::size_t)>& h, const HyperSubset& p) {
    HyperSubset out = l.none();
    p.for_each([&](std::size_t i) { out.set(h(i)); });
    return out;
}

template <class T, class F> std::set<T> homomorphic(F&& h, const std::set<T>& p) {
    std::set<T> out;
    for (auto& x : p) out.insert(h(x));
    return out;
}

inline HyperSubset eliminate(const HyperSubset& p, const HyperSubset& keep) { return p & keep; }

template <class T, class F> std::set<T> eliminate(const std::set<T>& p, F&& keep) {
    std::set<T> out;
    for (auto& x : p)
        if (keep(x)) out.insert(x);
    return out;
}

// ============================================================================
// Ideals, filters, frontiers
// ============================================================================

inline HyperSubset principal_ideal(const ToyLattice& l, const HyperSubset& p) { return l.down(l.join_all(p)); }
inline HyperSubset principal_filter(const ToyLattice& l, const HyperSubset& p) { return l.up(l.meet_all(p)); }

inline HyperSubset order_ideal(const Poset& l, const HyperSubset& p) {
    HyperSubset out = l.none();
    p.for_each([&](std::size_t i) { out |= l.down(i); });
    return out;
}

inline HyperSubset order_filter(const Poset& l, const HyperSubset& p) {
    HyperSubset out = l.none();
    p.for_each([&](std::size_t i) { out |= l.up(i); });
    return out;
}

/// Minimal elements. A descending family contained in p stands for an infinite
/// chain continuing below, so none of its elements is minimal.
inline HyperSubset frontier_min(const Poset& l, const HyperSubset& p, const std::vector<ChainFamily>& fams = {}) {
    HyperSubset out = l.none();
    p.for_each([&](std::size_t i) {
        if ((l.down(i) & p).count() == 1) out.set(i);
    });
    for (auto& f : fams)
        if (f.descending && detail::contains_all(p, f))
            for (std::size_t e : f.elements) out.reset(e);
    return out;
}

inline HyperSubset frontier_max(const Poset& l, const HyperSubset& p, const std::vector<ChainFamily>& fams = {}) {
    HyperSubset out = l.none();
    p.for_each([&](std::size_t i) {
        if ((l.up(i) & p).count() == 1) out.set(i);
    });
    for (auto& f : fams)
        if (!f.descending && detail::contains_all(p, f))
            for (std::size_t e : f.elements) out.reset(e);
    return out;
}

/// Up-closure of the minimal frontier.
inline HyperSubset frontier_filter_min(const Poset& l, const HyperSubset& p, const std::vector<ChainFamily>& fams = {}) {
    return order_filter(l, frontier_min(l, p, fams));
}

/// Down-closure of the maximal frontier.
inline HyperSubset frontier_ideal_max(const Poset& l, const HyperSubset& p, const std::vector<ChainFamily>& fams = {}) {
    return order_ideal(l, frontier_max(l, p, fams));
}

// ============================================================================
// Chain limits
// ============================================================================

/// Adds the limit of every declared descending family contained in p. Finite
/// chains already contain their glb.
inline HyperSubset chain_down(const ChainPoset& cp, const HyperSubset& p) {
    HyperSubset out = p;
    for (auto& f : cp.families)
        if (f.descending && f.limit && detail::contains_all(p, f)) out.set(*f.limit);
    return out;
}

inline HyperSubset chain_up(const ChainPoset& cp, const HyperSubset& p) {
    HyperSubset out = p;
    for (auto& f : cp.families)
        if (!f.descending && f.limit && detail::contains_all(p, f)) out.set(*f.limit);
    return out;
}

struct StarResult {
    HyperSubset result;
    std::size_t iterations = 0;
};

template <class Op> StarResult iterate_star(const ChainPoset& cp, const HyperSubset& p, Op&& op) {
    std::size_t cap = cp.families.size() + cp.poset.size() + 1;
    HyperSubset x = p;
    for (std::size_t it = 1; it <= cap; ++it) {
        HyperSubset y = op(cp, x);
        if (y == x) return {x, it};
        x = std::move(y);
    }
    throw std::logic_error("chain-limit closure did not stabilize");
}

inline HyperSubset chain_down_star(const ChainPoset& cp, const HyperSubset& p) {
    return iterate_star(cp, p, [](const ChainPoset& c, const HyperSubset& x) { return chain_down(c, x); }).result;
}

inline HyperSubset chain_up_star(const ChainPoset& cp, const HyperSubset& p) {
    return iterate_star(cp, p, [](const ChainPoset& c, const HyperSubset& x) { return chain_up(c, x); }).result;
}

// ============================================================================
// Conjunctive abstraction and frontier elimination
// ============================================================================

using SubsetOp = std::function<HyperSubset(const HyperSubset&)>;

inline HyperSubset conjunctive(const SubsetOp& a1, const SubsetOp& a2, const HyperSubset& p) { return a1(p) & a2(p); }

/// Elements whose whole down-set lies in p.
inline HyperSubset rho_subseteq(const Poset& l, const HyperSubset& p) {
    HyperSubset out = l.none();
    p.for_each([&](std::size_t i) {
        if (l.down(i).subset_of(p)) out.set(i);
    });
    return out;
}

/// Elements of x above f whose interval from f lies in x.
inline HyperSubset phi_subseteq(const Poset& l, std::size_t f, const HyperSubset& x) {
    HyperSubset out = l.none();
    (l.up(f) & x).for_each([&](std::size_t i) {
        if ((l.up(f) & l.down(i)).subset_of(x)) out.set(i);
    });
    return out;
}

inline HyperSubset rho_frontier(const Poset& l, const HyperSubset& p) {
    HyperSubset out = l.none();
    frontier_min(l, p).for_each([&](std::size_t f) { out |= phi_subseteq(l, f, p); });
    return out;
}

// ============================================================================
// Hyperproperty families
// ============================================================================

/// Sets of executions drawn from a base of k executions, as bitmasks over the base.
inline bool in_aeh(const Rel& a, std::size_t mask) {
    for (std::size_t i = 0; i < a.states(); ++i) {
        if (!(mask >> i & 1)) continue;
        bool found = false;
        for (std::size_t j = 0; j < a.states() && !found; ++j) found = (mask >> j & 1) && a.contains(i, j);
        if (!found) return false;
    }
    return true;
}

inline bool in_aah(const Rel& a, std::size_t mask) {
    for (std::size_t i = 0; i < a.states(); ++i)
        for (std::size_t j = 0; j < a.states(); ++j)
            if ((mask >> i & 1) && (mask >> j & 1) && !a.contains(i, j)) return false;
    return true;
}

inline bool in_eah(const Rel& a, std::size_t mask) {
    for (std::size_t i = 0; i < a.states(); ++i) {
        if (!(mask >> i & 1)) continue;
        bool all = true;
        for (std::size_t j = 0; j < a.states() && all; ++j) all = !(mask >> j & 1) || a.contains(i, j);
        if (all) return true;
    }
    return false;
}

enum class Quantifiers { AE, AA, EA };

/// Family as a hyper-subset of the powerset lattice over the base of `a`.
inline HyperSubset family(Quantifiers q, const Rel& a) {
    std::size_t n = std::size_t{1} << a.states();
    HyperSubset out(n);
    for (std::size_t m = 0; m < n; ++m) {
        bool in = q == Quantifiers::AE ? in_aeh(a, m) : q == Quantifiers::AA ? in_aah(a, m) : in_eah(a, m);
        if (in) out.set(m);
    }
    return out;
}

namespace detail {
struct Flow {
    std::size_t low, high;
};
inline Flow flow(const StateSpace& sp, const std::string& low, const std::string& high) {
    return {sp.require(low), sp.require(high)};
}
} // namespace detail

/// Noninterference on terminating executions: equal low inputs give equal low outputs.
inline HyperOracle noninterference(const StateSpace& sp, const std::string& low) {
    std::size_t l = sp.require(low);
    return {"NI(" + low + ")", [sp, l](const SemTriple& t) {
                auto ex = t.e.pairs();
                for (auto& [a1, b1] : ex)
                    for (auto& [a2, b2] : ex)
                        if (sp.value(a1, l) == sp.value(a2, l) && sp.value(b1, l) != sp.value(b2, l)) return false;
                return true;
            }};
}

/// Generalized noninterference: for two executions agreeing on low input, a third
/// combines the first's low input and output with the second's high input.
inline HyperOracle generalized_noninterference(const StateSpace& sp, const std::string& low, const std::string& high) {
    auto f = detail::flow(sp, low, high);
    return {"GNI(" + low + "," + high + ")", [sp, f](const SemTriple& t) {
                auto ex = t.e.pairs();
                for (auto& [a1, b1] : ex)
                    for (auto& [a2, b2] : ex) {
                        if (sp.value(a1, f.low) != sp.value(a2, f.low)) continue;
                        bool found = false;
                        for (auto& [a3, b3] : ex)
                            if (sp.value(a3, f.low) == sp.value(a1, f.low) && sp.value(a3, f.high) == sp.value(a2, f.high) &&
                                sp.value(b3, f.low) == sp.value(b1, f.low)) {
                                found = true;
                                break;
                            }
                        if (!found) return false;
                    }
                return true;
            }};
}

/// Generalized dependency, the negation of generalized noninterference.
inline HyperOracle generalized_dependency(const StateSpace& sp, const std::string& low, const std::string& high) {
    auto f = detail::flow(sp, low, high);
    return {"GD(" + low + "," + high + ")", [sp, f](const SemTriple& t) {
                auto ex = t.e.pairs();
                for (auto& [a1, b1] : ex)
                    for (auto& [a2, b2] : ex) {
                        bool all = true;
                        for (auto& [a3, b3] : ex) {
                            bool same_low = sp.value(a1, f.low) == sp.value(a2, f.low) &&
                                            sp.value(a2, f.low) == sp.value(a3, f.low);
                            if (same_low && sp.value(a3, f.high) == sp.value(a2, f.high) &&
                                sp.value(b3, f.low) == sp.value(b1, f.low)) {
                                all = false;
                                break;
                            }
                        }
                        if (all) return true;
                    }
                return false;
            }};
}

// ============================================================================
// Exhaustive law checks on the subsets of a small carrier
// ============================================================================

struct LawReport {
    bool extensive = true;
    bool reductive = true;
    bool monotone = true;
    bool idempotent = true;
    std::optional<HyperSubset> counterexample;
    std::size_t subsets = 0;

    bool upper_closure() const { return extensive && monotone && idempotent; }
    bool lower_closure() const { return reductive && monotone && idempotent; }
};

inline HyperSubset subset_of_mask(std::size_t n, std::uint64_t mask) {
    HyperSubset h(n);
    for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) h.set(i);
    return h;
}

/// Checks the closure laws of op on every subset of an n-element carrier (n <= 20).
/// Monotonicity is checked on single-element additions, which generate inclusion.
inline LawReport check_laws(std::size_t n, const SubsetOp& op) {
    if (n > 20) throw std::invalid_argument("carrier too large for exhaustive checks");
    LawReport r;
    std::uint64_t total = std::uint64_t{1} << n;
    std::vector<HyperSubset> image(total);
    for (std::uint64_t m = 0; m < total; ++m) image[m] = op(subset_of_mask(n, m));
    auto mask_of = [&](const HyperSubset& h) {
        std::uint64_t m = 0;
        h.for_each([&](std::size_t i) { m |= std::uint64_t{1} << i; });
        return m;
    };
    auto note = [&](std::uint64_t m) {
        if (!r.counterexample) r.counterexample = subset_of_mask(n, m);
    };
    for (std::uint64_t m = 0; m < total; ++m) {
        HyperSubset p = subset_of_mask(n, m);
        const HyperSubset& q = image[m];
        if (!p.subset_of(q)) r.extensive = false;
        if (!q.subset_of(p)) r.reductive = false;
        if (!(image[mask_of(q)] == q)) {
            r.idempotent = false;
            note(m);
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!(m >> i & 1) && !q.subset_of(image[m | (std::uint64_t{1} << i)])) {
                r.monotone = false;
                note(m);
            }
    }
    r.subsets = total;
    return r;
}

} // namespace hl
