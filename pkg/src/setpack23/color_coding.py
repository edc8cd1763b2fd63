"""Polynomial-time improving-binocular search via color coding.

Universe elements receive random colors; a search-graph edge survives into
the colorful subgraph when the color sets of its W-label vertices are
pairwise disjoint.  Colorful walks (loop-free walks whose per-edge W-color
sets are pairwise disjoint) are tabulated by a dynamic program over reachable
states, and a candidate binocular is stitched together from at most two
loops plus up to three stored walks.  Everything found is re-checked against
the improving-binocular predicate, so random colorings only ever cost
completeness, never soundness.  A t-perfect hash family would make the
search deterministic; seeded uniform colorings with a repetition count are
the standard substitute, and an injective test mode restores exact
completeness whenever the whole universe fits into the color budget.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

from .conflict import ConflictGraph
from .search_graph import LabeledBinocular, SearchEdge, SearchGraph, is_improving_binocular


@dataclass(frozen=True)
class Coloring:
    """A total assignment of universe elements to colors 0..t-1."""

    t: int
    assignment: tuple[int, ...]

    def mask_of(self, elements: Iterable[int]) -> int:
        m = 0
        for e in elements:
            m |= 1 << self.assignment[e]
        return m


def default_color_count(tau: int, n_vertices: int) -> int:
    """The default color budget 3 * tau^2 * log2(|V|), at least one color."""
    return max(1, math.ceil(3 * tau * tau * math.log2(max(2, n_vertices))))


def make_colorings(universe_n: int, t: int, reps: int, seed: int,
                   injective: bool = False) -> list[Coloring]:
    """Seeded uniform colorings, or one injective coloring in test mode."""
    if t < 1 or reps < 1:
        raise ValueError("need t >= 1 and reps >= 1")
    if injective:
        if t < universe_n:
            raise ValueError("injective coloring needs t >= universe size")
        return [Coloring(t, tuple(range(universe_n)))]
    rng = random.Random(seed)
    return [Coloring(t, tuple(rng.randrange(t) for _ in range(universe_n)))
            for _ in range(reps)]


@dataclass(frozen=True)
class ColorfulSearchGraph:
    """The search graph restricted to edges whose W-vertices got disjoint colors."""

    vertices: tuple[int, ...]
    edges: tuple[SearchEdge, ...]
    edge_colors: tuple[int, ...]          # per edge, union color mask of its W-label
    vertex_colors: Mapping[int, int]      # conflict vertex id -> color mask

    @property
    def loops(self) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self.edges) if e.is_loop)


def colorful_subgraph(sg: SearchGraph, f: Coloring, g: ConflictGraph) -> ColorfulSearchGraph:
    """Filter the search graph down to its colorful edges under f."""
    if g.members is None:
        raise ValueError("color coding needs the element sets behind each vertex")
    vcol = {v: f.mask_of(g.members[v]) for v in range(g.n)}
    kept: list[SearchEdge] = []
    cols: list[int] = []
    for e in sg.edges:
        acc = 0
        ok = True
        for v in e.w_label:
            c = vcol[v]
            if acc & c:
                ok = False
                break
            acc |= c
        if ok:
            assert acc, "every W-label vertex carries at least one colored element"
            kept.append(e)
            cols.append(acc)
    return ColorfulSearchGraph(sg.vertices, tuple(kept), tuple(cols), vcol)


# -- walk dynamic program ---------------------------------------------------

@dataclass
class WalkTable:
    """Reachable colorful-walk states from a fixed start vertex.

    Keys are (end vertex, color mask, X, Y, length) where X and Y are the
    overlaps of the walk's accumulated U- and W-labels with the fixed context
    sets; each true state stores one witness walk as a tuple of edge indices.
    """

    start: int
    context_u: frozenset[int]
    context_w: frozenset[int]
    max_len: int
    entries: dict[tuple[int, int, frozenset[int], frozenset[int], int], tuple[int, ...]]

    def holds(self, v: int, colors: int, x: frozenset[int], y: frozenset[int], length: int) -> bool:
        return (v, colors, x, y, length) in self.entries


class WalkBudgetExceeded(RuntimeError):
    """The reachable state space outgrew the configured budget."""


def _raw_walk_states(csg: ColorfulSearchGraph, start: int, max_len: int,
                     max_states: int) -> dict:
    """Context-free walk DP keyed by (v, colors, U-union, W-union, length).

    Merging on the full label unions is lossless: states with equal keys
    admit exactly the same extensions and the same projections onto any
    context pair, so one stored witness per key suffices.
    """
    incident: dict[int, list[tuple[int, int]]] = {v: [] for v in csg.vertices}
    for i, e in enumerate(csg.edges):
        if e.is_loop:
            continue
        a, b = e.endpoints
        incident[a].append((i, b))
        incident[b].append((i, a))
    u_fs = [frozenset(e.u_label) for e in csg.edges]
    w_fs = [frozenset(e.w_label) for e in csg.edges]

    empty: frozenset[int] = frozenset()
    states: dict[tuple, tuple[int, ...]] = {(start, 0, empty, empty, 0): ()}
    frontier = [((start, 0, empty, empty, 0), ())]
    for length in range(1, max_len + 1):
        nxt = []
        for (v, colors, uu, ww, _), witness in frontier:
            for ei, other in incident[v]:
                col = csg.edge_colors[ei]
                if col & colors:
                    continue
                key = (other, colors | col, uu | u_fs[ei], ww | w_fs[ei], length)
                if key in states:
                    continue
                wit = witness + (ei,)
                states[key] = wit
                nxt.append((key, wit))
                if len(states) > max_states:
                    raise WalkBudgetExceeded(f"walk table beyond {max_states} states")
        frontier = nxt
        if not frontier:
            break
    return states


def compute_walks(csg: ColorfulSearchGraph, start: int,
                  context_u: Iterable[int], context_w: Iterable[int],
                  max_len: int, max_states: int = 500_000) -> WalkTable:
    """Tabulate every reachable colorful-walk state from ``start``.

    The base state is the empty walk at the start vertex (empty color set and
    overlaps at length zero); a transition appends a non-loop edge whose
    W-color set is disjoint from the colors accumulated so far.
    """
    ctx_u = frozenset(context_u)
    ctx_w = frozenset(context_w)
    raw = _raw_walk_states(csg, start, max_len, max_states)
    entries: dict[tuple, tuple[int, ...]] = {}
    for (v, colors, uu, ww, length), witness in raw.items():
        key = (v, colors, uu & ctx_u, ww & ctx_w, length)
        entries.setdefault(key, witness)
    return WalkTable(start, ctx_u, ctx_w, max_len, entries)


def replay_walk(csg: ColorfulSearchGraph, start: int, witness: Iterable[int],
                context_u: Iterable[int], context_w: Iterable[int]):
    """Re-walk a stored witness and return its (end, colors, X, Y, length)."""
    ctx_u = frozenset(context_u)
    ctx_w = frozenset(context_w)
    v = start
    colors = 0
    x: frozenset[int] = frozenset()
    y: frozenset[int] = frozenset()
    length = 0
    for ei in witness:
        e = csg.edges[ei]
        if e.is_loop or v not in e.endpoints:
            raise ValueError("witness is not a walk from the start vertex")
        col = csg.edge_colors[ei]
        if col & colors:
            raise ValueError("witness is not colorful")
        colors |= col
        x |= frozenset(e.u_label) & ctx_u
        y |= frozenset(e.w_label) & ctx_w
        v = e.endpoints[0] if v == e.endpoints[1] else e.endpoints[1]
        length += 1
    return v, colors, x, y, length


# -- structure search --------------------------------------------------------

def _project(raw: dict, ctx_u: frozenset[int], ctx_w: frozenset[int]):
    """Group projected states by end vertex: v -> list of (C, X, Y, l, witness)."""
    by_end: dict[int, list] = {}
    seen = set()
    for (v, colors, uu, ww, length), witness in raw.items():
        key = (v, colors, uu & ctx_u, ww & ctx_w, length)
        if key in seen:
            continue
        seen.add(key)
        by_end.setdefault(v, []).append((colors, key[2], key[3], length, witness))
    return by_end


def find_colorful_binocular(csg: ColorfulSearchGraph, g: ConflictGraph,
                            walk_cap: int, max_states: int = 500_000) -> LabeledBinocular | None:
    """Assemble a colorful binocular from at most two loops and stored walks.

    For every loop choice L the fixed context is the union of the loop
    labels; a candidate (C, X, Y) must keep the surviving loop W-vertices
    color-disjoint from C and from each other and must win the weight
    inequality by two per loop.  The remaining edge set comes from one of
    four walk shapes: two closed walks plus a connector, three paths between
    two vertices, one loop plus a closed walk and a connector, or two loops
    plus a connector.  Any hit is a binocular by construction and is
    re-verified by the caller.
    """
    raw_tables: dict[int, dict] = {}

    def raw(v: int) -> dict:
        if v not in raw_tables:
            raw_tables[v] = _raw_walk_states(csg, v, walk_cap, max_states)
        return raw_tables[v]

    loops = csg.loops

    def loop_choices():
        yield ()
        for i in loops:
            yield (i,)
        for pair in combinations(loops, 2):
            yield pair

    for L in loop_choices():
        ctx_u = frozenset(v for i in L for v in csg.edges[i].u_label)
        ctx_w = frozenset(v for i in L for v in csg.edges[i].w_label)

        def conditions(colors: int, x: frozenset[int], y: frozenset[int]) -> bool:
            remaining = ctx_w - y
            acc = 0
            for v in sorted(remaining):
                c = csg.vertex_colors[v]
                if acc & c:
                    return False  # loop W-vertices must be pairwise color-disjoint
                acc |= c
            if acc & colors:
                return False
            lhs = sum(g.weights[v] for v in remaining)
            rhs = sum(g.weights[v] for v in ctx_u - x) + 2 * len(L)
            return lhs >= rhs

        def assemble(f_witness: tuple[int, ...]) -> LabeledBinocular:
            edge_ids = sorted(set(L) | set(f_witness))
            return LabeledBinocular(tuple(csg.edges[i] for i in edge_ids))

        if len(L) == 2:
            u = csg.edges[L[0]].endpoints[0]
            v = csg.edges[L[1]].endpoints[0]
            for colors, x, y, length, wit in _project(raw(u), ctx_u, ctx_w).get(v, []):
                if length <= walk_cap and conditions(colors, x, y):
                    return assemble(wit)
        elif len(L) == 1:
            u = csg.edges[L[0]].endpoints[0]
            proj_u = _project(raw(u), ctx_u, ctx_w)
            for v in csg.vertices:
                closed = [s for s in _project(raw(v), ctx_u, ctx_w).get(v, []) if 2 <= s[3] <= walk_cap]
                if not closed:
                    continue
                for c1, x1, y1, l1, wit1 in proj_u.get(v, []):
                    if l1 > walk_cap:
                        continue
                    for c2, x2, y2, l2, wit2 in closed:
                        if c1 & c2:
                            continue
                        if conditions(c1 | c2, x1 | x2, y1 | y2):
                            return assemble(wit1 + wit2)
        else:
            projected = {v: _project(raw(v), ctx_u, ctx_w) for v in csg.vertices}
            for u in csg.vertices:
                proj_u = projected[u]
                closed_u = [s for s in proj_u.get(u, []) if 2 <= s[3] <= walk_cap]
                for v in csg.vertices:
                    if v < u:
                        continue
                    # Two closed walks joined by a (possibly empty) connector.
                    closed_v = [s for s in projected[v].get(v, []) if 2 <= s[3] <= walk_cap]
                    connectors = [s for s in proj_u.get(v, []) if s[3] <= walk_cap]
                    for c1, _, _, _, wit1 in closed_u:
                        for c2, _, _, _, wit2 in closed_v:
                            if c1 & c2:
                                continue
                            for c3, _, _, _, wit3 in connectors:
                                if c3 & (c1 | c2):
                                    continue
                                return assemble(wit1 + wit2 + wit3)
                    # Three edge-disjoint walks between two distinct vertices.
                    if v == u:
                        continue
                    paths = [s for s in proj_u.get(v, []) if 1 <= s[3] <= walk_cap]
                    for i1, i2, i3 in combinations(range(len(paths)), 3):
                        c1, c2, c3 = paths[i1][0], paths[i2][0], paths[i3][0]
                        if c1 & c2 or c1 & c3 or c2 & c3:
                            continue
                        return assemble(paths[i1][4] + paths[i2][4] + paths[i3][4])
    return None


def search_improving_binocular(sg: SearchGraph, g: ConflictGraph, A: Iterable[int],
                               params, seed: int = 0) -> LabeledBinocular | None:
    """Monte-Carlo search for an improving binocular in the search graph.

    Tries ``coloring_reps`` independent colorings (or a single injective one)
    and returns the first colorful binocular assembled; colorful implies
    improving, which is asserted rather than assumed.  Returning none is
    evidence of absence, exact under an injective coloring.
    """
    if not sg.edges:
        return None
    members = frozenset(A)
    if params.injective_colorings:
        t = max(params.t_override or 0, g.universe_size, 1)
        colorings = make_colorings(g.universe_size, t, 1, seed, injective=True)
    else:
        t = params.t_override or default_color_count(sg.tau, g.n)
        colorings = make_colorings(g.universe_size, t, params.coloring_reps, seed)
    # Walks inside a minimal binocular are simple paths or cycles, so lengths
    # beyond the vertex count of the search graph cannot be needed.
    cap = min(math.ceil(sg.tau * math.log2(max(2, g.n))), len(sg.vertices) + 1)
    for f in colorings:
        csg = colorful_subgraph(sg, f, g)
        if not csg.edges:
            continue
        hit = find_colorful_binocular(csg, g, cap)
        if hit is not None:
            if not is_improving_binocular(hit, g, members):
                raise AssertionError("colorful binocular failed the improving predicate")
            return hit
    return None
