#pragma once

// Dispatch of rule-check requests and abstraction operators described in JSON.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hl/catalog.hpp"
#include "hl/json_io.hpp"

namespace hl {

// ============================================================================
// Rule requests
// ============================================================================

struct RuleOutcome {
    StateSpace space;
    RuleReport report;
};

inline const std::vector<std::string>& rule_names() {
    static const std::vector<std::string> names{
        "upper",           "lower",         "seq",         "if_upper",       "if_lower",
        "while_upper",     "while_lower",   "consequence_upper", "consequence_lower", "choice",
        "forall_exists",   "principal_ideal", "principal_filter", "conjunctive", "frontier_rho"};
    return names;
}

namespace detail {
inline const json& field(const json& req, const char* key) {
    if (!req.contains(key)) throw InputError(std::string("request needs \"") + key + "\"");
    return req.at(key);
}

inline Stmt program_of(const json& v) {
    Stmt s = parse(v.get<std::string>());
    if (auto bad = validate_breaks(s)) throw InputError("break outside of a loop");
    return s;
}
} // namespace detail

/// Runs the rule named in `req["rule"]`. Upper rules read the consequent from
/// "post_oracle"; lower rules and the set-based rules read an explicit "post".
inline RuleOutcome run_rule(const json& req) {
    using detail::field;
    std::string rule = field(req, "rule").get<std::string>();
    StateSpace sp = space_from_json(field(req, "space"));
    HyperSet pre = req.contains("pre") ? hyper_from_json(sp, req.at("pre")) : HyperSet{};
    auto oracle = [&] { return oracle_from_json(sp, field(req, "post_oracle")); };
    auto post_set = [&] { return hyper_from_json(sp, field(req, "post")); };

    if (rule == "choice") {
        auto alts = field(req, "choice");
        if (!alts.is_array() || alts.size() != 2) throw InputError("\"choice\" lists two programs");
        return {sp, rule_choice(pre, detail::program_of(alts[0]), detail::program_of(alts[1]), sp, oracle())};
    }
    Stmt s = detail::program_of(field(req, "program"));
    check_bound(s, sp);
    RuleReport r;
    if (rule == "upper") r = check_upper(pre, s, sp, oracle());
    else if (rule == "lower") r = check_lower(pre, s, sp, post_set());
    else if (rule == "seq") {
        std::optional<HyperSet> middle;
        if (req.contains("middle")) middle = hyper_from_json(sp, req.at("middle"));
        r = rule_seq(pre, s, sp, oracle(), middle);
    } else if (rule == "if_upper") r = rule_if_upper(pre, s, sp, oracle());
    else if (rule == "if_lower") r = rule_if_lower(pre, s, sp, post_set());
    else if (rule == "while_upper") r = rule_while_upper(pre, s, sp, oracle());
    else if (rule == "while_lower") r = rule_while_lower(pre, s, sp, post_set());
    else if (rule == "consequence_upper")
        r = rule_consequence_upper(pre, s, sp, oracle(), hyper_from_json(sp, field(req, "inner_pre")),
                                   hyper_from_json(sp, field(req, "inner_post")));
    else if (rule == "consequence_lower")
        r = rule_consequence_lower(pre, s, sp, post_set(), hyper_from_json(sp, field(req, "inner_pre")),
                                   hyper_from_json(sp, field(req, "inner_post")));
    else if (rule == "forall_exists") {
        HyperSet inv = req.contains("invariant") ? hyper_from_json(sp, req.at("invariant")) : canonical_invariant(pre, s, sp);
        r = rule_forall_exists(pre, s, sp, oracle(), inv);
    } else if (rule == "principal_ideal") r = rule_principal_ideal(pre, s, sp, triple_from_json(sp, field(req, "generator")));
    else if (rule == "principal_filter")
        r = rule_principal_filter(pre, s, sp, triple_from_json(sp, field(req, "generator")));
    else if (rule == "conjunctive") r = rule_conjunctive(pre, s, sp, post_set());
    else if (rule == "frontier_rho") r = rule_frontier_rho(pre, s, sp, post_set());
    else throw InputError("unknown rule '" + rule + "'");
    return {sp, r};
}

// ============================================================================
// Abstraction operators
// ============================================================================

/// A named lattice from the catalog ("diamond", "chain-limit", "finite-subsets",
/// "two-chains", "powerset:K") or an inline description.
inline ChainPoset lattice_from_json(const json& j) {
    if (j.is_object()) return chain_poset_from_json(j);
    std::string name = j.get<std::string>();
    if (name == "diamond") return {catalog::diamond(), {}};
    if (name == "chain-limit") return catalog::chain_limit();
    if (name == "finite-subsets") return catalog::finite_subsets();
    if (name == "two-chains") return catalog::two_chains();
    if (name.rfind("powerset:", 0) == 0) return {ToyLattice::powerset(std::stoul(name.substr(9))), {}};
    throw InputError("unknown lattice '" + name + "'");
}

inline const std::vector<std::string>& operator_names() {
    static const std::vector<std::string> names{
        "order_ideal",     "order_filter",      "frontier_min",    "frontier_max",  "frontier_filter_min",
        "frontier_ideal_max", "chain_down",     "chain_up",        "chain_down_star", "chain_up_star",
        "rho_subseteq",    "rho_frontier",      "principal_ideal", "principal_filter", "convex_hull",
        "alpha_join"};
    return names;
}

/// The operator as a function on subsets of the carrier of cp. Lattice operators
/// build the join and meet tables and reject posets that are not lattices.
inline SubsetOp make_operator(const std::string& name, const ChainPoset& cp) {
    const Poset& l = cp.poset;
    auto fams = cp.families;
    if (name == "order_ideal") return [&l](const HyperSubset& p) { return order_ideal(l, p); };
    if (name == "order_filter") return [&l](const HyperSubset& p) { return order_filter(l, p); };
    if (name == "frontier_min") return [&l, fams](const HyperSubset& p) { return frontier_min(l, p, fams); };
    if (name == "frontier_max") return [&l, fams](const HyperSubset& p) { return frontier_max(l, p, fams); };
    if (name == "frontier_filter_min") return [&l, fams](const HyperSubset& p) { return frontier_filter_min(l, p, fams); };
    if (name == "frontier_ideal_max") return [&l, fams](const HyperSubset& p) { return frontier_ideal_max(l, p, fams); };
    if (name == "chain_down") return [&cp](const HyperSubset& p) { return chain_down(cp, p); };
    if (name == "chain_up") return [&cp](const HyperSubset& p) { return chain_up(cp, p); };
    if (name == "chain_down_star") return [&cp](const HyperSubset& p) { return chain_down_star(cp, p); };
    if (name == "chain_up_star") return [&cp](const HyperSubset& p) { return chain_up_star(cp, p); };
    if (name == "rho_subseteq") return [&l](const HyperSubset& p) { return rho_subseteq(l, p); };
    if (name == "rho_frontier") return [&l](const HyperSubset& p) { return rho_frontier(l, p); };
    if (name == "convex_hull")
        return [&l](const HyperSubset& p) {
            return conjunctive([&](const HyperSubset& x) { return order_ideal(l, x); },
                               [&](const HyperSubset& x) { return order_filter(l, x); }, p);
        };
    auto lat = std::make_shared<ToyLattice>(l);
    if (name == "principal_ideal") return [lat](const HyperSubset& p) { return principal_ideal(*lat, p); };
    if (name == "principal_filter") return [lat](const HyperSubset& p) { return principal_filter(*lat, p); };
    if (name == "alpha_join")
        return [lat](const HyperSubset& p) {
            HyperSubset out = lat->none();
            out.set(alpha_join(*lat, p));
            return out;
        };
    throw InputError("unknown operator '" + name + "'");
}

inline json law_report_to_json(const Poset& l, const LawReport& r) {
    json out = {{"extensive", r.extensive}, {"reductive", r.reductive}, {"monotone", r.monotone},
                {"idempotent", r.idempotent}, {"subsets", r.subsets}};
    out["counterexample"] = r.counterexample ? subset_to_json(l, *r.counterexample) : json(nullptr);
    return out;
}

} // namespace hl
