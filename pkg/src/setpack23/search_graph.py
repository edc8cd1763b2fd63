"""The auxiliary search multigraph over weight-2 solution vertices.

A pair (U, W) with U inside the solution A and W an independent set outside
A induces a labeled edge when w(U) + 2 = w(W), both parts have at most tau
vertices, and the residual neighborhood N(W, A \\ U) consists of one or two
weight-2 solution vertices.  Those residual vertices are the edge's
endpoints (one endpoint makes a loop).  A sub-multigraph with more edges
than vertices is a binocular; an improving binocular satisfies three label
conditions that force its combined W-sets to be a local improvement.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .conflict import ConflictGraph


@dataclass(frozen=True, order=True)
class SearchEdge:
    """A labeled edge: sorted endpoint tuple plus the inducing (U, W) labels."""

    endpoints: tuple[int, ...]
    u_label: tuple[int, ...]
    w_label: tuple[int, ...]

    @property
    def is_loop(self) -> bool:
        return len(self.endpoints) == 1


@dataclass(frozen=True)
class SearchGraph:
    vertices: tuple[int, ...]       # weight-2 members of the solution, sorted
    edges: tuple[SearchEdge, ...]   # deduplicated, sorted
    tau: int

    @property
    def loops(self) -> tuple[SearchEdge, ...]:
        return tuple(e for e in self.edges if e.is_loop)


@dataclass(frozen=True)
class LabeledBinocular:
    """A sub-multiset of search-graph edges with more edges than touched vertices."""

    edges: tuple[SearchEdge, ...]

    def __post_init__(self) -> None:
        touched = {v for e in self.edges for v in e.endpoints}
        if len(self.edges) <= len(touched):
            raise ValueError("not a binocular: needs more edges than vertices")

    @property
    def e1(self) -> tuple[SearchEdge, ...]:
        return tuple(e for e in self.edges if e.is_loop)

    @property
    def e2(self) -> tuple[SearchEdge, ...]:
        return tuple(e for e in self.edges if not e.is_loop)

    @property
    def u_total(self) -> frozenset[int]:
        out: set[int] = set()
        for e in self.edges:
            out.update(e.endpoints)
            out.update(e.u_label)
        return frozenset(out)

    @property
    def w_total(self) -> frozenset[int]:
        return frozenset(v for e in self.edges for v in e.w_label)


class FullModeRefused(RuntimeError):
    """Full pair enumeration requested on a graph above the vertex budget."""


def _independent_subsets(g: ConflictGraph, pool: list[int], max_size: int):
    """Yield non-empty independent subsets of pool as (tuple, mask), lex order."""
    def rec(start: int, chosen: tuple[int, ...], mask: int):
        for i in range(start, len(pool)):
            v = pool[i]
            if g.adj_mask(v) & mask:
                continue
            chosen2 = chosen + (v,)
            mask2 = mask | (1 << v)
            yield chosen2, mask2
            if len(chosen2) < max_size:
                yield from rec(i + 1, chosen2, mask2)
    yield from rec(0, (), 0)


def enumerate_search_edges(g: ConflictGraph, A: Iterable[int], tau: int,
                           pair_mode: str = "canonical",
                           full_budget: int = 16) -> SearchGraph:
    """Build the search graph for the solution A.

    Canonical mode only considers U inside N(W, A); every such U is the
    neighborhood minus a choice of one or two weight-2 vertices, which the
    weight-balance equation pins down exactly.  Full mode ranges U over all
    small subsets of A and is refused above ``full_budget`` vertices.
    """
    a_mask = g.mask(A)
    if not g.independent_mask(a_mask):
        raise ValueError("solution must be independent")
    outside = [v for v in range(g.n) if not (a_mask >> v) & 1]
    edges: set[SearchEdge] = set()

    if pair_mode == "full":
        if g.n > full_budget:
            raise FullModeRefused(f"full pair enumeration refused above {full_budget} vertices")
        a_list = sorted(g.unmask(a_mask))
        u_choices: list[tuple[tuple[int, ...], int]] = [((), 0)]
        for size in range(1, tau + 1):
            for combo in combinations(a_list, size):
                u_choices.append((combo, g.mask(combo)))
    elif pair_mode != "canonical":
        raise ValueError(f"unknown pair mode {pair_mode!r}")

    for w_tuple, w_mask in _independent_subsets(g, outside, tau):
        ww = g.weight_mask(w_mask)
        m_mask = g.neighbors_mask(w_mask) & a_mask
        if pair_mode == "canonical":
            # U = N(W, A) minus a removed set R of weight-2 vertices; the
            # balance w(U) + 2 = w(W) forces |R| = (w(M) - w(W) + 2) / 2.
            need2, rem = divmod(g.weight_mask(m_mask) - ww + 2, 2)
            if rem or need2 not in (1, 2):
                continue
            m2 = sorted(g.unmask(m_mask & g.w2_mask))
            for r_combo in combinations(m2, need2):
                r_mask = g.mask(r_combo)
                u_mask = m_mask & ~r_mask
                if u_mask.bit_count() > tau:
                    continue
                edges.add(SearchEdge(tuple(r_combo),
                                     tuple(sorted(g.unmask(u_mask))),
                                     w_tuple))
        else:
            for u_tuple, u_mask in u_choices:
                if g.weight_mask(u_mask) + 2 != ww:
                    continue
                e_mask = m_mask & ~u_mask
                if e_mask & ~g.w2_mask:
                    continue
                cnt = e_mask.bit_count()
                if cnt < 1 or cnt > 2:
                    continue
                edges.add(SearchEdge(tuple(sorted(g.unmask(e_mask))), u_tuple, w_tuple))

    vertices = tuple(sorted(g.unmask(a_mask & g.w2_mask)))
    return SearchGraph(vertices, tuple(sorted(edges)), tau)


def validate_search_edge(g: ConflictGraph, A: Iterable[int], edge: SearchEdge, tau: int) -> bool:
    """Re-check the three edge-inducing conditions from scratch."""
    a_mask = g.mask(A)
    u_mask = g.mask(edge.u_label)
    w_mask = g.mask(edge.w_label)
    if u_mask & ~a_mask or w_mask & a_mask or not g.independent_mask(w_mask):
        return False
    if max(len(edge.u_label), len(edge.w_label)) > tau:
        return False
    if g.weight_mask(u_mask) + 2 != g.weight_mask(w_mask):
        return False
    res_mask = g.neighbors_mask(w_mask) & (a_mask & ~u_mask)
    if res_mask & ~g.w2_mask or not 1 <= res_mask.bit_count() <= 2:
        return False
    return tuple(sorted(g.unmask(res_mask))) == edge.endpoints


def is_improving_binocular(b: LabeledBinocular, g: ConflictGraph, A: Iterable[int]) -> bool:
    """Check the three improving conditions on a labeled binocular.

    (i) the W-labels of two-endpoint edges are pairwise disjoint, (ii) the
    loop labels outweigh their evicted counterpart by twice the loop count,
    (iii) the union of all W-labels is independent.
    """
    e1, e2 = b.e1, b.e2
    seen = 0
    for e in e2:
        m = g.mask(e.w_label)
        if m & seen:
            return False
        seen |= m
    w1_union = 0
    u1_union = 0
    for e in e1:
        w1_union |= g.mask(e.w_label)
        u1_union |= g.mask(e.u_label)
    w2_union = seen
    u2_union = 0
    for e in e2:
        u2_union |= g.mask(e.u_label)
    lhs = g.weight_mask(w1_union & ~w2_union)
    rhs = g.weight_mask(u1_union & ~u2_union) + 2 * len(e1)
    if lhs < rhs:
        return False
    total_w = w1_union | w2_union
    return g.independent_mask(total_w)


def extract_improvement(b: LabeledBinocular, g: ConflictGraph, A: Iterable[int]) -> frozenset[int]:
    """Return W(B), the local improvement an improving binocular encodes.

    Also re-derives the two facts the caller relies on: every solution
    neighbor of W(B) lies in U(B), and w(W(B)) strictly exceeds w(U(B)).
    """
    if not is_improving_binocular(b, g, A):
        raise ValueError("extract_improvement needs an improving binocular")
    a_mask = g.mask(A)
    w_total = b.w_total
    u_total = b.u_total
    w_mask = g.mask(w_total)
    n_mask = (w_mask & a_mask) | (g.neighbors_mask(w_mask) & a_mask)
    u_mask = g.mask(u_total)
    assert n_mask & ~u_mask == 0, "solution neighborhood escaped the U-side of the binocular"
    assert g.weight_mask(w_mask) > g.weight_mask(u_mask), "binocular weight chain violated"
    return w_total


def to_dot(sg: SearchGraph, label_limit: int = 6) -> str:
    """Debug DOT dump of the search graph with truncated U/W labels."""
    def fmt(t: tuple[int, ...]) -> str:
        inner = ",".join(str(x) for x in t[:label_limit])
        return inner + ("..." if len(t) > label_limit else "")

    lines = ["graph search {"]
    for v in sg.vertices:
        lines.append(f"  {v};")
    for e in sg.edges:
        u, v = (e.endpoints[0], e.endpoints[0]) if e.is_loop else e.endpoints
        lines.append(f'  {u} -- {v} [label="U={fmt(e.u_label)} W={fmt(e.w_label)}"];')
    lines.append("}")
    return "\n".join(lines)
