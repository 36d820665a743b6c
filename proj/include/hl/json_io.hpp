#pragma once

// JSON encodings of spaces, states, triples, hyperproperties, oracles, lattice
// descriptions and rule reports. Object keys are sorted and relations are
// listed in state order, so equal inputs always serialize to identical bytes.

#include <json.hpp>

#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

#include "hl/abstractions.hpp"
#include "hl/hyperlogic.hpp"

namespace hl {

using json = nlohmann::json;

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ============================================================================
// Spaces and states
// ============================================================================

inline StateSpace space_from_json(const json& j) {
    if (!j.is_object() || !j.contains("vars")) throw InputError("space needs a \"vars\" list");
    auto vars = j.at("vars").get<std::vector<std::string>>();
    Arith mode = arith_from_string(j.value("arith", std::string("saturate")));
    auto bounds = [&](const char* key) {
        const json& b = j.at(key);
        if (b.is_array()) return b.get<std::vector<Value>>();
        return std::vector<Value>(vars.size(), b.get<Value>());
    };
    return StateSpace(vars, bounds("lo"), bounds("hi"), mode);
}

inline json space_to_json(const StateSpace& sp) {
    std::vector<Value> lo, hi;
    for (std::size_t k = 0; k < sp.vars().size(); ++k) {
        lo.push_back(sp.lo(k));
        hi.push_back(sp.hi(k));
    }
    return {{"vars", sp.vars()}, {"lo", lo}, {"hi", hi}, {"arith", to_string(sp.arith())}};
}

inline json state_to_json(const StateSpace& sp, State s) { return sp.decode(s); }

inline State state_from_json(const StateSpace& sp, const json& j) {
    auto vals = j.get<std::vector<Value>>();
    if (vals.size() != sp.vars().size()) throw InputError("state " + j.dump() + " has the wrong arity");
    return sp.encode(vals);
}

// ============================================================================
// Triples and hyperproperties
// ============================================================================

inline json rel_to_json(const StateSpace& sp, const Rel& r) {
    json out = json::array();
    for (auto& [a, b] : r.pairs()) out.push_back({state_to_json(sp, a), state_to_json(sp, b)});
    return out;
}

inline json set_to_json(const StateSpace& sp, const StateSet& s) {
    json out = json::array();
    s.for_each([&](std::size_t i) { out.push_back(state_to_json(sp, i)); });
    return out;
}

inline json triple_to_json(const StateSpace& sp, const SemTriple& t) {
    return {{"e", rel_to_json(sp, t.e)}, {"inf", set_to_json(sp, t.inf)}, {"br", rel_to_json(sp, t.br)}};
}

inline Rel rel_from_json(const StateSpace& sp, const json& j) {
    Rel r(sp.size());
    for (auto& p : j) {
        if (!p.is_array() || p.size() != 2) throw InputError("relation entries are [state, state] pairs");
        r.insert(state_from_json(sp, p[0]), state_from_json(sp, p[1]));
    }
    return r;
}

inline StateSet set_from_json(const StateSpace& sp, const json& j) {
    StateSet s(sp.size());
    for (auto& x : j) s.set(state_from_json(sp, x));
    return s;
}

/// A triple in explicit form, or one of the shorthands "init", {"any_to": states}
/// (every start paired with each listed state) and {"diag": states}.
inline SemTriple triple_from_json(const StateSpace& sp, const json& j) {
    std::size_t n = sp.size();
    if (j.is_string()) {
        if (j.get<std::string>() == "init") return prim_init(sp);
        throw InputError("unknown triple shorthand " + j.dump());
    }
    if (!j.is_object()) throw InputError("a triple is an object or \"init\"");
    if (j.contains("any_to")) {
        Rel r(n);
        StateSet to = set_from_json(sp, j.at("any_to"));
        for (State a = 0; a < n; ++a) r.row(a) = to;
        return only_e(r);
    }
    if (j.contains("diag")) return only_e(Rel::diagonal(set_from_json(sp, j.at("diag"))));
    SemTriple t = bottom(n);
    if (j.contains("e")) t.e = rel_from_json(sp, j.at("e"));
    if (j.contains("inf")) t.inf = set_from_json(sp, j.at("inf"));
    if (j.contains("br")) t.br = rel_from_json(sp, j.at("br"));
    return t;
}

inline json hyper_to_json(const StateSpace& sp, const HyperSet& h) {
    json out = json::array();
    for (auto& t : h) out.push_back(triple_to_json(sp, t));
    return out;
}

inline HyperSet hyper_from_json(const StateSpace& sp, const json& j) {
    if (!j.is_array()) return {triple_from_json(sp, j)};
    HyperSet out;
    for (auto& t : j) out.insert(triple_from_json(sp, t));
    return out;
}

// ============================================================================
// Oracles
// ============================================================================

/// Named oracles: NI(l), GNI(l,h), GD(l,h), terminating, no_break, any. Objects
/// {"ideal": t} and {"filter": t} give principal ideals and filters; an array is
/// an explicit set.
inline HyperOracle oracle_from_json(const StateSpace& sp, const json& j) {
    if (j.is_array()) return HyperOracle::of(hyper_from_json(sp, j));
    if (j.is_object()) {
        if (j.contains("ideal")) {
            SemTriple g = triple_from_json(sp, j.at("ideal"));
            return {"ideal", [g](const SemTriple& t) { return leq(t, g); }};
        }
        if (j.contains("filter")) {
            SemTriple g = triple_from_json(sp, j.at("filter"));
            return {"filter", [g](const SemTriple& t) { return leq(g, t); }};
        }
        throw InputError("unknown oracle object " + j.dump());
    }
    std::string name = j.get<std::string>();
    if (name == "terminating") return {name, [](const SemTriple& t) { return t.inf.none(); }};
    if (name == "no_break") return {name, [](const SemTriple& t) { return t.br.empty(); }};
    if (name == "any") return {name, [](const SemTriple&) { return true; }};
    static const std::regex call(R"(\s*(NI|GNI|GD)\s*\(\s*(\w+)\s*(?:,\s*(\w+)\s*)?\))");
    std::smatch m;
    if (std::regex_match(name, m, call)) {
        if (m[1] == "NI") return noninterference(sp, m[2]);
        if (!m[3].matched) throw InputError(std::string(m[1]) + " needs a low and a high variable");
        if (m[1] == "GNI") return generalized_noninterference(sp, m[2], m[3]);
        return generalized_dependency(sp, m[2], m[3]);
    }
    throw InputError("unknown oracle '" + name + "'");
}

// ============================================================================
// Reports
// ============================================================================

inline json report_to_json(const StateSpace& sp, const RuleReport& r) {
    json w = json::array();
    for (auto& x : r.witnesses)
        w.push_back({{"input", triple_to_json(sp, x.input)}, {"output", triple_to_json(sp, x.output)}, {"note", x.note}});
    json out = {{"rule", r.rule},
                {"verdict", r.holds ? "holds" : "fails"},
                {"witnesses", w},
                {"diagnostics", r.diagnostics},
                {"complete", r.complete}};
    out["direct"] = r.direct ? json(*r.direct ? "holds" : "fails") : json(nullptr);
    return out;
}

// ============================================================================
// Lattice descriptions
// ============================================================================

/// {"elements": [...], "order": [[lesser, greater], ...], "families": [{"family": name,
///  "elements": [...], "limit": name}]}.
inline ChainPoset chain_poset_from_json(const json& j) {
    if (!j.is_object() || !j.contains("elements")) throw InputError("lattice needs an \"elements\" list");
    auto names = j.at("elements").get<std::vector<std::string>>();
    std::vector<std::pair<std::string, std::string>> below;
    for (auto& p : j.value("order", json::array())) {
        if (!p.is_array() || p.size() != 2) throw InputError("order entries are [lesser, greater] pairs");
        below.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
    }
    ChainPoset cp;
    cp.poset = Poset(names, below);
    for (auto& f : j.value("families", json::array())) {
        std::optional<std::string> limit;
        if (f.contains("limit") && !f.at("limit").is_null()) limit = f.at("limit").get<std::string>();
        cp.families.push_back(cp.family(f.at("family").get<std::string>(), f.at("elements").get<std::vector<std::string>>(), limit));
    }
    cp.validate();
    return cp;
}

inline json subset_to_json(const Poset& l, const HyperSubset& h) { return l.names_of(h); }

inline HyperSubset subset_from_json(const Poset& l, const json& j) { return l.subset(j.get<std::vector<std::string>>()); }

} // namespace hl
