#!/usr/bin/env python3
"""Writes the self-test corpus in data/selftest.

Expected semantics come from closed-form descriptions of each program and
expected traces from a direct simulation, both independent of the C++ code.
Run from the repository root: python3 tools/make_corpus.py
"""

import itertools
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "selftest"


def states(lo, hi, nvars):
    return [list(s) for s in itertools.product(range(lo, hi + 1), repeat=nvars)]


def triple(space_states, exits, diverges):
    e, inf = [], []
    for s in space_states:
        for t in exits(s):
            e.append([s, t])
        if diverges(s):
            inf.append(s)
    return {"e": e, "inf": inf, "br": []}


def space(names, lo, hi):
    return {"vars": names, "lo": lo, "hi": hi}


COUNTDOWN = "while (y != 0) { y = y - 1 }"
RESET_COUNTDOWN = "y = [-oo, oo]; " + COUNTDOWN
NESTED = "while (x != 0) { y = [-oo, oo]; while (y != 0) { y = y - 1 }; x = x - 1 }"
RANDOM_NESTED = "x = [-oo, oo]; " + NESTED
SKIP_BY_TWO = "while (x != 2) { if (x == 1) { break } else { x = x + 2 } }"


def sem_suites():
    y = states(-3, 3, 1)
    xy = states(-2, 2, 2)
    yield "sem_countdown", "single countdown loop over y in [-3,3]", [
        {"kind": "sem", "program": COUNTDOWN, "space": space(["y"], -3, 3),
         "expect": triple(y, lambda s: [[0]] if s[0] >= 0 else [], lambda s: s[0] < 0)},
        {"kind": "sem", "program": "skip", "space": space(["y"], 0, 1),
         "expect": triple(states(0, 1, 1), lambda s: [s], lambda s: False)},
    ]
    yield "sem_reset_countdown", "random reset followed by the countdown over y in [-3,3]", [
        {"kind": "sem", "program": RESET_COUNTDOWN, "space": space(["y"], -3, 3),
         "expect": triple(y, lambda s: [[0]], lambda s: True)},
    ]
    yield "sem_nested_countdown", "countdown on x around a random countdown on y, x,y in [-2,2]", [
        {"kind": "sem", "program": NESTED, "space": space(["x", "y"], -2, 2),
         "expect": triple(xy, lambda s: [s] if s[0] == 0 else ([[0, 0]] if s[0] > 0 else []),
                          lambda s: s[0] != 0)},
    ]
    yield "sem_random_nested_countdown", "random start for the nested countdown, x,y in [-2,2]", [
        {"kind": "sem", "program": RANDOM_NESTED, "space": space(["x", "y"], -2, 2),
         "expect": triple(xy, lambda s: sorted([[0, s[1]], [0, 0]]), lambda s: True)},
    ]


def skip_by_two_runs(lo, hi, max_length):
    """Simulates the loop state by state with saturating addition."""
    done, diverging = [], []
    for start in range(lo, hi + 1):
        run, x, seen = [[start]], start, {start}
        while x != 2 and x != 1:
            x = min(x + 2, hi)
            if x in seen:
                break
            seen.add(x)
            run.append([x])
        if x in (1, 2) and len(run) <= max_length:
            done.append(run)
        elif x not in (1, 2):
            diverging.append([start])
    return done, diverging


def trace_suites():
    done, diverging = skip_by_two_runs(-4, 5, 10)
    yield "trace_skip_by_two", "climbing by two with an early exit at 1, x in [-4,5], length bound 10", [
        {"kind": "trace", "program": SKIP_BY_TWO, "space": space(["x"], -4, 5), "L": 10,
         "expect_traces": done, "expect_break_traces": [], "expect_div_starts": diverging,
         "expect_truncated": True},
        {"kind": "trace", "program": "skip", "space": space(["x"], 0, 2), "L": 2,
         "expect_traces": [[[v], [v]] for v in range(3)], "expect_truncated": False},
    ]


def point(v):
    return {"any_to": [[v]]}


def check_suites():
    x = space(["x"], 0, 13)
    loop = "while (x > 10) { x = x - 1 }"
    pre = [point(n) for n in (11, 12, 13)]
    yield "check_principal_ideal", "loop above ten reduced to one ideal generator", [
        {"kind": "check", "rule": "principal_ideal", "program": loop, "space": x, "pre": pre,
         "generator": {"any_to": [[v] for v in range(0, 11)]}, "expect": "holds"},
        {"kind": "check", "rule": "principal_ideal", "program": loop, "space": x, "pre": pre,
         "generator": {"any_to": [[v] for v in range(0, 10)]}, "expect": "fails"},
    ]
    lh = space(["l", "h"], 0, 1)
    yield "check_noninterference", "copying a high input into a low output", [
        {"kind": "check", "rule": "upper", "program": "l = h", "space": lh, "pre": ["init"],
         "post_oracle": "NI(l)", "expect": "fails"},
        {"kind": "check", "rule": "upper", "program": "l = 0", "space": lh, "pre": ["init"],
         "post_oracle": "NI(l)", "expect": "holds"},
        {"kind": "check", "rule": "upper", "program": "l = h", "space": lh, "pre": [],
         "post_oracle": "NI(l)", "expect": "holds"},
        {"kind": "check", "rule": "upper", "program": "l = h", "space": lh, "pre": ["init"],
         "post_oracle": "GNI(l, h)", "expect": "fails"},
    ]


def builtin_suites():
    yield "calculus_if_cross", "tied conditional against the cross product", [
        {"kind": "builtin", "name": "if_cross", "expect": {"tied": 2, "cross": 4, "strict": True}},
    ]
    yield "calculus_weak_while", "weak loop semantics of the countdown from init", [
        {"kind": "builtin", "name": "weak_while", "expect": {"weak": 4, "exact": 1, "strict": True}},
    ]
    yield "rules_forall_exists", "forall-exists rule cannot prove the exact countdown post", [
        {"kind": "builtin", "name": "forall_exists_incompleteness",
         "expect": {"upper_holds": True, "tried": 65536, "valid": 0}},
    ]
    yield "galois_transformers", "adjunctions between forward and backward transformers on two states", [
        {"kind": "builtin", "name": "post_pre_tilde_galois", "expect": {"ok": True}},
        {"kind": "builtin", "name": "Post_Pre_galois", "expect": {"ok": True}},
    ]


def lattice_suites():
    yield "frontier_nonmonotone", "minimal frontier on the diamond is not monotone", [
        {"kind": "abstract", "lattice": "diamond", "op": "frontier_min", "input": ["top"], "expect": ["top"]},
        {"kind": "abstract", "lattice": "diamond", "op": "frontier_min", "input": ["0", "1", "top"],
         "expect": ["0", "1"]},
        {"kind": "laws", "lattice": "diamond", "op": "frontier_min", "expect": {"monotone": False}},
    ]
    finite = ["{}", "{0}", "{0,1}", "{0,1,2}"]
    yield "frontier_order_ideal", "finite subsets of the naturals: no maximal frontier, nonempty ideal", [
        {"kind": "abstract", "lattice": "finite-subsets", "op": "frontier_max", "input": finite, "expect": []},
        {"kind": "abstract", "lattice": "finite-subsets", "op": "order_ideal", "input": finite, "expect": finite},
        {"kind": "abstract", "lattice": "finite-subsets", "op": "chain_up", "input": finite,
         "expect": finite + ["N"]},
    ]
    yield "frontier_two_chains", "two descending chains without limits", [
        {"kind": "abstract", "lattice": "two-chains", "op": "frontier_filter_min",
         "input": ["a0", "a1", "a2", "b0", "b1", "b2"], "expect": []},
        {"kind": "abstract", "lattice": "two-chains", "op": "frontier_filter_min",
         "input": ["a0", "a1", "a2", "b0"], "expect": ["b0"]},
    ]
    xs = ["X%d%d" % (i, j) for i in (1, 2, 3) for j in (1, 2, 3)]
    ys = ["Y1", "Y2", "Y3"]
    yield "chain_limit", "limits of limits: one step of chain closure is not enough", [
        {"kind": "abstract", "lattice": "chain-limit", "op": "chain_down", "input": xs, "expect": xs + ys},
        {"kind": "abstract", "lattice": "chain-limit", "op": "chain_down", "input": xs + ys,
         "expect": xs + ys + ["bot"]},
        {"kind": "abstract", "lattice": "chain-limit", "op": "chain_down_star", "input": xs,
         "expect": xs + ys + ["bot"]},
        {"kind": "laws", "lattice": "chain-limit", "op": "chain_down", "expect": {"idempotent": False}},
        {"kind": "laws", "lattice": "chain-limit", "op": "chain_down_star", "expect": {"upper_closure": True}},
        {"kind": "builtin", "name": "chain_star_iterations", "expect": {"iterations": 3}},
    ]
    uppers = ["order_ideal", "order_filter", "principal_ideal", "principal_filter", "frontier_filter_min",
              "frontier_ideal_max", "convex_hull"]
    yield "laws_powerset", "closure laws on all 65536 subsets of the 16-element powerset lattice", [
        {"kind": "laws", "lattice": "powerset:4", "op": op,
         "expect": {"upper_closure": True, "subsets": 65536}} for op in uppers
    ] + [
        {"kind": "laws", "lattice": "powerset:4", "op": "rho_subseteq", "expect": {"lower_closure": True}},
        {"kind": "laws", "lattice": "powerset:4", "op": "rho_frontier",
         "expect": {"reductive": True, "idempotent": True}},
    ]
    yield "lattice_malformed", "a declared chain that is not a chain is rejected", [
        {"kind": "abstract", "op": "chain_down", "input": [],
         "lattice": {"elements": ["a", "b", "c"], "order": [["a", "c"], ["b", "c"]],
                     "families": [{"family": "f", "elements": ["a", "b"], "limit": None}]},
         "expect": [], "expect_error": "construction error"},
    ]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for gen in (sem_suites, trace_suites, check_suites, builtin_suites, lattice_suites):
        for name, about, cases in gen():
            text = json.dumps({"about": about, "cases": cases}, indent=2, sort_keys=True)
            (OUT / (name + ".json")).write_text(text + "\n")


if __name__ == "__main__":
    main()
