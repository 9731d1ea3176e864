"""Named graphs used by the corpus, the tests and the ``catalog`` CLI command.

Vertex numbering is fixed: table counts for graphs that are not
vertex-transitive depend on which vertex is the anchor, so the
constructors below must not be reordered casually.
"""

from __future__ import annotations

from typing import Callable, Hashable, Sequence

from .graph import Graph


def _from_labelled_edges(edges: Sequence[tuple[Hashable, Hashable]], name: str) -> Graph:
    # integers are handed out in order of first appearance
    ids: dict = {}
    for u, v in edges:
        for x in (u, v):
            if x not in ids:
                ids[x] = len(ids) + 1
    return Graph.from_edges(len(ids), [(ids[u], ids[v]) for u, v in edges], name=name)


_PETERSEN = {
    0: (1, 4, 5), 1: (2, 6), 2: (3, 7), 3: (4, 8), 4: (9,),
    5: (7, 8), 6: (8, 9), 7: (9,),
}


def petersen() -> Graph:
    edges = [(u + 1, v + 1) for u, vs in _PETERSEN.items() for v in vs]
    return Graph.from_edges(10, edges, name="petersen")


def tietze() -> Graph:
    """Petersen with vertex 1 blown up into a triangle (vertices 10, 11, 12)."""
    edges = [(u, v) for u, v in petersen().edges() if 1 not in (u, v)]
    edges = [(u - 1, v - 1) for u, v in edges]
    # triangle vertex 10 meets old 2, 11 meets old 5, 12 meets old 6
    edges += [(10, 1), (11, 4), (12, 5), (10, 11), (11, 12), (10, 12)]
    return Graph.from_edges(12, edges, name="tietze")


def flower_snark(k: int) -> Graph:
    """Flower snark J_k (4k vertices); snark for odd k >= 5, J3 is Tietze's graph."""
    if k < 3:
        raise ValueError("flower snarks need k >= 3")
    edges = []
    for i in range(k):
        nxt = (i + 1) % k
        edges += [(("a", i), ("b", i)), (("a", i), ("c", i)), (("a", i), ("d", i)), (("b", i), ("b", nxt))]
        if i < k - 1:
            edges += [(("c", i), ("c", nxt)), (("d", i), ("d", nxt))]
    edges += [(("c", k - 1), ("d", 0)), (("d", k - 1), ("c", 0))]
    return _from_labelled_edges(edges, f"flower-j{k}")


_HERSCHEL = {
    0: (1, 3, 4), 1: (2, 5, 6), 2: (3, 7), 3: (8, 9), 4: (5, 9),
    5: (10,), 6: (7, 10), 7: (8,), 8: (10,), 9: (10,),
}


def herschel() -> Graph:
    """Herschel graph: 11 vertices, 18 edges, bipartite 5 + 6, no Hamilton cycle."""
    edges = [(u + 1, v + 1) for u, vs in _HERSCHEL.items() for v in vs]
    return Graph.from_edges(11, edges, name="herschel")


def complete(nv: int) -> Graph:
    return Graph.from_edges(nv, [(u, v) for u in range(1, nv + 1) for v in range(u + 1, nv + 1)], name=f"k{nv}")


def cycle(nv: int) -> Graph:
    return Graph.from_edges(nv, [(v, v % nv + 1) for v in range(1, nv + 1)], name=f"c{nv}")


def prism(k: int) -> Graph:
    """Circular ladder on 2k vertices (Hamiltonian, cubic)."""
    edges = [(v, v % k + 1) for v in range(1, k + 1)]
    edges += [(k + v, k + v % k + 1) for v in range(1, k + 1)]
    edges += [(v, k + v) for v in range(1, k + 1)]
    return Graph.from_edges(2 * k, edges, name=f"prism{k}")


def dodecahedron() -> Graph:
    # LCF notation [10,7,4,-4,-7,10,-4,7,-7,4]^2 on a 20-cycle
    lcf = [10, 7, 4, -4, -7, 10, -4, 7, -7, 4] * 2
    nv = 20
    edges = {tuple(sorted((v, (v + 1) % nv))) for v in range(nv)}
    for v, s in enumerate(lcf):
        edges.add(tuple(sorted((v, (v + s) % nv))))
    return Graph.from_edges(nv, sorted((u + 1, v + 1) for u, v in edges), name="dodecahedron")


CATALOG: dict[str, Callable[[], Graph]] = {
    "petersen": petersen,
    "tietze": tietze,
    "flower-j3": lambda: flower_snark(3),
    "flower-j5": lambda: flower_snark(5),
    "flower-j7": lambda: flower_snark(7),
    "herschel": herschel,
    "k4": lambda: complete(4),
    "k5": lambda: complete(5),
    "c4": lambda: cycle(4),
    "c6": lambda: cycle(6),
    "prism3": lambda: prism(3),
    "prism5": lambda: prism(5),
    "dodecahedron": dodecahedron,
}
