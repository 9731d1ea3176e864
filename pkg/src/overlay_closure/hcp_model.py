"""Hamilton cycle instances: graph in, exclusion set out.

P has one row per non-anchor vertex and one column per arc position.
``p(u, i) = 1`` says the i-th arc of a cycle that starts and ends at the
anchor enters vertex ``u``.  Rows are the non-anchor vertices in increasing
label order (see ``Graph.position_labels``).

An arc-deletion distance argument drives everything: if the shortest route
from x to y avoiding the arc x-y has m edges, then y cannot sit k places after
x on the cycle for any k strictly between the arc value and m.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from . import _kernels as K
from .graph import Graph, GraphError, bfs_distances, parse_graph, shortest_path_length
from .qmatrix import ExclusionSet, QMatrix

__all__ = [
    "Graph",
    "parse_graph",
    "shortest_path_length",
    "build_hcp_exclusions",
    "companion_closure",
    "cycle_to_permutation",
    "covering_pairs",
    "hamilton_cycles",
]


def _deleted_distance(adj: np.ndarray, x: int, y: int) -> tuple[int, int]:
    """(arc, m): adjacency value of x-y and the distance with that edge removed."""
    arc = int(adj[x, y])
    adj[x, y] = adj[y, x] = False
    try:
        m = int(bfs_distances(adj, x)[y])
    finally:
        adj[x, y] = adj[y, x] = bool(arc)
    return arc, m


def build_hcp_exclusions(g: Graph) -> ExclusionSet:
    """Exclusion set of the Hamilton cycle model of ``g`` anchored at ``g.anchor``.

    The caller's graph is left untouched; deletions happen on a private copy.
    """
    nv = g.vertex_count
    if nv < 3:
        raise GraphError("a Hamilton cycle needs at least 3 vertices")
    n = nv - 1
    if n > K.MAX_N:
        raise GraphError(f"at most {K.MAX_N + 1} vertices are supported, got {nv}")
    adj = g.anchored_adjacency()
    a = n  # anchor index after relabelling
    e = ExclusionSet(n)
    mask = e.mask

    # last arc: u cannot be entered at position n+1-k
    for u in range(n):
        arc, m = _deleted_distance(adj, u, a)
        for k in range(arc + 1, m):
            pos = n - k  # 0-based for n+1-k
            e._forced[u, pos] = True
            mask[u, pos] = True
            mask[:, :, u, pos] = True

    # first arc: v cannot be entered at position k
    for v in range(n):
        arc, m = _deleted_distance(adj, a, v)
        for k in range(arc + 1, m):
            e._forced[v, k - 1] = True
            mask[v, k - 1] = True
            mask[:, :, v, k - 1] = True

    # general case: v cannot follow u by exactly k positions
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            arc, m = _deleted_distance(adj, u, v)
            for k in range(arc + 1, min(m, n)):
                l = np.arange(n - k)
                mask[u, l, v, l + k] = True
                mask[v, l + k, u, l] = True

    e._clear_structural()
    return e


def companion_closure(q: QMatrix) -> bool:
    """Make Q invariant under reversing the cycle direction; True if anything changed.

    A pair cell (u,i,v,j) and its partner (u,n+1-i,v,n+1-j) describe the same
    undirected cycle read backwards, so they are zero together.
    """
    return bool(K.companion_closure(q.bits, q.n, q._ver))


def cycle_to_permutation(g: Graph, cycle: Sequence[int]) -> list[int]:
    """Row -> column assignment (1-based lists) for a Hamilton cycle of ``g``.

    ``cycle`` lists every vertex once, in traversal order, starting anywhere;
    it is rotated so the anchor comes first.  Result ``perm[r-1] = i`` means
    p(r, i) = 1 for P-row r.
    """
    nv = g.vertex_count
    if sorted(cycle) != list(range(1, nv + 1)):
        raise GraphError("cycle must list every vertex exactly once")
    for x, y in zip(cycle, list(cycle[1:]) + [cycle[0]]):
        if not g.adjacency[x - 1, y - 1]:
            raise GraphError(f"{x}-{y} is not an edge")
    s = list(cycle).index(g.anchor)
    order = list(cycle[s + 1 :]) + list(cycle[:s])
    row = {v: r for r, v in enumerate(g.position_labels(), 1)}
    perm = [0] * (nv - 1)
    for pos, v in enumerate(order, 1):
        perm[row[v] - 1] = pos
    return perm


def covering_pairs(perm: Sequence[int]) -> list[tuple[int, int, int, int]]:
    """The C(n,2) pair variables set to one by a permutation (canonical i < j)."""
    cells = sorted((i, u) for u, i in enumerate(perm, 1))
    return [(u, i, v, j) for a, (i, u) in enumerate(cells) for (j, v) in cells[a + 1 :]]


def hamilton_cycles(g: Graph, limit: Optional[int] = None) -> list[list[int]]:
    """Directed Hamilton cycles through the anchor by plain backtracking (small graphs)."""
    nv = g.vertex_count
    adj = [np.flatnonzero(g.adjacency[x]).tolist() for x in range(nv)]
    start = g.anchor - 1
    out: list[list[int]] = []
    path = [start]
    seen = [False] * nv
    seen[start] = True

    def extend():
        if limit is not None and len(out) >= limit:
            return
        x = path[-1]
        if len(path) == nv:
            if g.adjacency[x, start]:
                out.append([y + 1 for y in path])
            return
        for y in adj[x]:
            if not seen[y]:
                seen[y] = True
                path.append(y)
                extend()
                path.pop()
                seen[y] = False

    extend()
    return out
