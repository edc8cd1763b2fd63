"""Shared fabricators and independent reference oracles for the test suite."""

from __future__ import annotations

import random
from itertools import combinations

import pytest

from setpack23 import build_conflict_graph, is_local_improvement, parse_instance
from setpack23.conflict import ConflictGraph
from setpack23.instance import Instance, PackSet, generate_random
from setpack23.normalize import AnalysisTuple, analysis_tuple


def chain_instance() -> Instance:
    """Four sets whose conflict graph is a path: 3-set, 2-set, 3-set, 2-set."""
    return parse_instance("1 2 3\n3 4\n4 5 6\n6 7\n")


def instance_from_sets(raw: list[tuple[int, ...]]) -> Instance:
    """Build an instance from explicit element tuples without re-interning."""
    universe = max((e for s in raw for e in s), default=-1) + 1
    return Instance(tuple(PackSet(i, s) for i, s in enumerate(raw)), universe)


def brute_force_optimum(instance: Instance) -> int:
    """Exhaustive maximum packing weight; only for small instances."""
    sets = instance.sets
    best = 0
    for r in range(len(sets) + 1):
        for combo in combinations(sets, r):
            used: set[int] = set()
            ok = True
            for s in combo:
                if used & set(s.elements):
                    ok = False
                    break
                used |= set(s.elements)
            if ok:
                best = max(best, sum(s.weight for s in combo))
    return best


def brute_force_improvement_exists(g: ConflictGraph, A: frozenset[int], tau: int) -> bool:
    """Reference check over ALL vertex subsets up to size tau, including
    subsets that touch the solution itself."""
    verts = list(range(g.n))
    for r in range(1, tau + 1):
        for combo in combinations(verts, r):
            if is_local_improvement(g, A, combo):
                return True
    return False


def random_packing(g: ConflictGraph, rng: random.Random) -> frozenset[int]:
    """A random maximal independent set in the conflict graph."""
    order = list(range(g.n))
    rng.shuffle(order)
    chosen_mask = 0
    chosen = []
    for v in order:
        if not g.adj_mask(v) & chosen_mask:
            chosen.append(v)
            chosen_mask |= 1 << v
    return frozenset(chosen)


# -- gadget states with a known small improving binocular ---------------------

def binocular_gadget(kind: str, rng: random.Random) -> tuple[Instance, frozenset[int]]:
    """An (instance, solution) pair whose search graph contains an improving
    minimal binocular of at most four edges.

    ``double_loop``: one solution 3-set with two disjoint outside 3-sets each
    meeting it in one element (two loops at one vertex).  ``theta``: two
    solution 3-sets and three disjoint outside 3-sets each meeting both
    (three parallel edges).  ``dumbbell``: a loop at each of two solution
    3-sets plus one outside set meeting both (loop-edge-loop).
    """
    fresh = iter(range(100, 1000))

    def pad(k: int) -> list[int]:
        return [next(fresh) for _ in range(k)]

    if kind == "double_loop":
        a0 = (0, 1, 2)
        raw = [a0, tuple([0] + pad(2)), tuple([1] + pad(2))]
        if rng.random() < 0.5:
            raw.append(tuple([2] + pad(2)))  # optional third loop
        solution = {0}
    elif kind == "theta":
        a0, a1 = (0, 1, 2), (3, 4, 5)
        raw = [a0, a1]
        picks = rng.sample([0, 1, 2], 3), rng.sample([3, 4, 5], 3)
        for i in range(3):
            raw.append((picks[0][i], picks[1][i], pad(1)[0]))
        solution = {0, 1}
    elif kind == "dumbbell":
        a0, a1 = (0, 1, 2), (3, 4, 5)
        raw = [a0, a1,
               tuple([0] + pad(2)), tuple([3] + pad(2)),
               (1, 4, pad(1)[0])]
        solution = {0, 1}
    else:
        raise ValueError(kind)
    if rng.random() < 0.4:
        raw.append(tuple(pad(2)))  # disjoint distractor 2-set
    # Random relabeling of the universe; structure is untouched.
    tokens = sorted({e for s in raw for e in s})
    relabel = dict(zip(tokens, rng.sample(range(len(tokens)), len(tokens))))
    instance = instance_from_sets([tuple(relabel[e] for e in s) for s in raw])
    return instance, frozenset(solution)


# -- analysis tuples -----------------------------------------------------------

def tuple_from_instance(instance: Instance, a: frozenset[int], b: frozenset[int]) -> AnalysisTuple:
    g = build_conflict_graph(instance)
    edges = [(u, v) for u in range(g.n) for v in g.adj[u] if u < v]
    return analysis_tuple({v: g.weights[v] for v in range(g.n)}, edges, a, b)


def random_nice_tuple(rng: random.Random) -> AnalysisTuple:
    """A random nice tuple: either solver-vs-oracle sets on a random instance
    or a crafted chain of 2-sets with 3-set stubs (deep path components)."""
    from setpack23.local_search import SearchParams, solve
    from setpack23.oracle import solve_exact

    if rng.random() < 0.55:
        n = rng.randrange(7, 13)
        m = rng.randrange(5, 14)
        instance = generate_random(n, m, p3=rng.choice([0.3, 0.5, 0.8]), seed=rng.randrange(1 << 30))
        packing, _ = solve(instance, SearchParams(tau=rng.choice([1, 2, 3]), mode="general",
                                                  seed=rng.randrange(1 << 30)))
        opt = solve_exact(instance)
        return tuple_from_instance(instance, packing.members, opt.witness.members)

    # Chain gadget: 2-sets {i, i+1} form a conflict path; alternate them
    # between the two sides and optionally cap the ends with 3-set stubs.
    length = rng.randrange(2, 9)
    raw: list[tuple[int, ...]] = [(i, i + 1) for i in range(length)]
    parity = rng.randrange(2)
    side_a = {i for i in range(length) if i % 2 == parity}
    fresh = iter(range(50, 200))
    a_ids = set(side_a)
    b_ids = set(range(length)) - side_a
    for end_elem, attach_to_a in ((0, 0 in b_ids), (length, (length - 1) in b_ids)):
        if rng.random() < 0.6:
            stub = (end_elem, next(fresh), next(fresh))
            raw.append(stub)
            (a_ids if attach_to_a else b_ids).add(len(raw) - 1)
    if rng.random() < 0.5:
        lone = (next(fresh), next(fresh), next(fresh))
        raw.append(lone)
        (a_ids if rng.random() < 0.5 else b_ids).add(len(raw) - 1)
    instance = instance_from_sets(raw)
    return tuple_from_instance(instance, frozenset(a_ids), frozenset(b_ids))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240811)
