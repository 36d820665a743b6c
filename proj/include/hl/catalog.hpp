#pragma once

// Small posets and lattices on which the abstraction operators show their
// characteristic behaviours.

#include <string>
#include <vector>

#include "hl/abstractions.hpp"

namespace hl::catalog {

/// {bot, 0, 1, top} with 0 and 1 incomparable.
inline ToyLattice diamond() {
    return ToyLattice({"bot", "0", "1", "top"}, {{"bot", "0"}, {"bot", "1"}, {"0", "top"}, {"1", "top"}});
}

/// Finite skeleton of three infinite descending chains X^i1 > X^i2 > ... whose glbs
/// Y^i form a fourth descending chain with glb bot, all below top. Each chain is
/// cut to three elements and declared as a family with its limit.
inline ChainPoset chain_limit() {
    std::vector<std::string> names{"top"};
    std::vector<std::pair<std::string, std::string>> below;
    auto x = [](int i, int j) { return "X" + std::to_string(i) + std::to_string(j); };
    auto y = [](int i) { return "Y" + std::to_string(i); };
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) names.push_back(x(i, j));
    for (int i = 1; i <= 3; ++i) names.push_back(y(i));
    names.push_back("bot");
    for (int i = 1; i <= 3; ++i) {
        below.emplace_back(x(i, 1), "top");
        below.emplace_back(x(i, 2), x(i, 1));
        below.emplace_back(x(i, 3), x(i, 2));
        below.emplace_back(y(i), x(i, 3));
    }
    below.emplace_back("Y2", "Y1");
    below.emplace_back("Y3", "Y2");
    below.emplace_back("bot", "Y3");
    ChainPoset cp;
    cp.poset = ToyLattice(names, below);
    for (int i = 1; i <= 3; ++i)
        cp.families.push_back(cp.family("X" + std::to_string(i), {x(i, 1), x(i, 2), x(i, 3)}, y(i)));
    cp.families.push_back(cp.family("Y", {"Y1", "Y2", "Y3"}, "bot"));
    cp.validate();
    return cp;
}

/// Finite skeleton of the subsets of the naturals ordered by inclusion, restricted to
/// the ascending chain {} < {0} < {0,1} < {0,1,2} whose lub N is not finite.
inline ChainPoset finite_subsets() {
    ChainPoset cp;
    cp.poset = Poset({"{}", "{0}", "{0,1}", "{0,1,2}", "N"},
                     {{"{}", "{0}"}, {"{0}", "{0,1}"}, {"{0,1}", "{0,1,2}"}, {"{0,1,2}", "N"}});
    cp.families.push_back(cp.family("prefixes", {"{}", "{0}", "{0,1}", "{0,1,2}"}, "N"));
    cp.validate();
    return cp;
}

/// The finite-cardinality elements of finite_subsets(), i.e. everything but N.
inline HyperSubset finite_only(const ChainPoset& cp) { return cp.poset.subset({"{}", "{0}", "{0,1}", "{0,1,2}"}); }

/// Two incomparable infinite descending chains a0 > a1 > ... and b0 > b1 > ...,
/// each cut to three elements, without limits.
inline ChainPoset two_chains() {
    ChainPoset cp;
    cp.poset = Poset({"a0", "a1", "a2", "b0", "b1", "b2"}, {{"a1", "a0"}, {"a2", "a1"}, {"b1", "b0"}, {"b2", "b1"}});
    cp.families.push_back(cp.family("a", {"a0", "a1", "a2"}, std::nullopt));
    cp.families.push_back(cp.family("b", {"b0", "b1", "b2"}, std::nullopt));
    cp.validate();
    return cp;
}

/// Subsets of the states of one variable x in [lo, hi], ordered by inclusion.
/// Element i is the set whose bitmask over the states is i.
inline ToyLattice state_powerset(const StateSpace& sp) {
    std::vector<std::string> atoms;
    for (State s = 0; s < sp.size(); ++s) atoms.push_back(std::to_string(sp.value(s, 0)));
    return ToyLattice::powerset(sp.size(), atoms);
}

} // namespace hl::catalog
