"""Simple undirected graphs and the three accepted input formats."""

from __future__ import annotations

from collections import deque
from typing import Iterable, Optional

import numpy as np


class GraphError(ValueError):
    """Base class; ``code`` is a short stable identifier for reports."""

    code = "graph"


class GraphFormatError(GraphError):
    code = "parse"


class LoopError(GraphError):
    code = "loop"


class MultiEdgeError(GraphError):
    code = "multi-edge"


class DisconnectedError(GraphError):
    code = "disconnected"


FORMATS = ("graph6", "edges", "adjacency")


class Graph:
    """Vertices are ``1..vertex_count``; ``anchor`` is the cycle origin vertex.

    The adjacency matrix is 0-based and read-only.
    """

    def __init__(self, adjacency, anchor: Optional[int] = None, name: str = "", require_connected: bool = True):
        a = np.array(adjacency, dtype=bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise GraphFormatError("adjacency matrix must be square")
        if np.any(np.diag(a)):
            v = int(np.flatnonzero(np.diag(a))[0]) + 1
            raise LoopError(f"loop at vertex {v}")
        if not np.array_equal(a, a.T):
            raise GraphFormatError("adjacency matrix is not symmetric")
        a.setflags(write=False)
        self.adjacency = a
        self.vertex_count = a.shape[0]
        self.name = name
        if anchor is None:
            anchor = self.vertex_count
        if not 1 <= anchor <= self.vertex_count:
            raise GraphError(f"anchor {anchor} outside 1..{self.vertex_count}")
        self.anchor = anchor
        if require_connected and not self.is_connected():
            raise DisconnectedError(f"graph {name or ''} is not connected".replace("  ", " "))

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[tuple[int, int]], **kw) -> Graph:
        a = np.zeros((vertex_count, vertex_count), bool)
        for u, v in edges:
            if not (1 <= u <= vertex_count and 1 <= v <= vertex_count):
                raise GraphFormatError(f"edge ({u},{v}) outside 1..{vertex_count}")
            if u == v:
                raise LoopError(f"loop at vertex {u}")
            if a[u - 1, v - 1]:
                raise MultiEdgeError(f"repeated edge ({u},{v})")
            a[u - 1, v - 1] = a[v - 1, u - 1] = True
        return cls(a, **kw)

    def with_anchor(self, anchor: int) -> Graph:
        return Graph(self.adjacency, anchor=anchor, name=self.name, require_connected=False)

    def edges(self) -> list[tuple[int, int]]:
        return [(int(u) + 1, int(v) + 1) for u, v in zip(*np.nonzero(np.triu(self.adjacency, 1)))]

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.sum()) // 2

    def degrees(self) -> list[int]:
        return [int(d) for d in self.adjacency.sum(axis=1)]

    @property
    def regular_degree(self) -> Optional[int]:
        d = set(self.degrees())
        return d.pop() if len(d) == 1 else None

    @property
    def is_cubic(self) -> bool:
        return self.regular_degree == 3

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return False
        d = bfs_distances(self.adjacency, 0)
        return bool(np.all(d < self.vertex_count))

    def position_labels(self) -> list[int]:
        """Vertex labels for P rows 1..n: every vertex but the anchor, in order."""
        return [v for v in range(1, self.vertex_count + 1) if v != self.anchor]

    def anchored_adjacency(self) -> np.ndarray:
        """Writable adjacency relabelled so the anchor is the last vertex."""
        order = [v - 1 for v in self.position_labels()] + [self.anchor - 1]
        return self.adjacency[np.ix_(order, order)].copy()

    def relabel(self, perm: list[int]) -> Graph:
        """Graph with vertex ``v`` renamed ``perm[v-1]`` (1-based); anchor follows."""
        n = self.vertex_count
        a = np.zeros((n, n), bool)
        idx = np.array(perm) - 1
        a[np.ix_(idx, idx)] = self.adjacency
        return Graph(a, anchor=perm[self.anchor - 1], name=self.name, require_connected=False)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency) and self.anchor == other.anchor

    def __repr__(self):
        return f"Graph({self.name or '?'}: {self.vertex_count} vertices, {self.edge_count} edges, anchor {self.anchor})"


def bfs_distances(adj: np.ndarray, source: int) -> np.ndarray:
    """Unit-weight distances from ``source`` (0-based); unreachable = vertex count."""
    nv = adj.shape[0]
    dist = np.full(nv, nv, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in np.flatnonzero(adj[x]):
            if dist[y] == nv:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def shortest_path_length(g: Graph, u: int, v: int) -> int:
    """Edges on a shortest u-v path (1-based), or ``vertex_count`` when unreachable."""
    if u == v:
        raise GraphError("endpoints must differ")
    return int(bfs_distances(g.adjacency, u - 1)[v - 1])


# ---------------------------------------------------------------- parsing


def parse_graph(text, format: str = "edges", name: str = "", anchor: Optional[int] = None, require_connected: bool = True) -> Graph:
    if isinstance(text, bytes):
        try:
            text = text.decode("ascii")
        except UnicodeDecodeError:
            raise GraphFormatError("input is not ASCII text") from None
    if format == "graph6":
        adj = _graph6_adjacency(text)
    elif format == "edges":
        return _parse_edges(text, name=name, anchor=anchor, require_connected=require_connected)
    elif format == "adjacency":
        adj = _parse_adjacency(text)
    else:
        raise GraphFormatError(f"unknown format {format!r}; expected one of {', '.join(FORMATS)}")
    return Graph(adj, anchor=anchor, name=name, require_connected=require_connected)


def _lines(text: str) -> list[str]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(t) for t in line.replace(",", " ").split()]
    except ValueError:
        raise GraphFormatError(f"line {lineno}: expected integers, got {line!r}") from None


def _parse_edges(text: str, **kw) -> Graph:
    lines = _lines(text)
    if not lines:
        raise GraphFormatError("empty edge list")
    head = _ints(lines[0], 1)
    if len(head) != 2:
        raise GraphFormatError("first line must be 'V E'")
    nv, ne = head
    if nv < 1:
        raise GraphFormatError("vertex count must be positive")
    edges = []
    for k, line in enumerate(lines[1:], 2):
        pair = _ints(line, k)
        if len(pair) != 2:
            raise GraphFormatError(f"line {k}: expected 'u v'")
        edges.append((pair[0], pair[1]))
    if len(edges) != ne:
        raise GraphFormatError(f"header announces {ne} edges, found {len(edges)}")
    return Graph.from_edges(nv, edges, **kw)


def _parse_adjacency(text: str) -> np.ndarray:
    rows = []
    for k, line in enumerate(_lines(text), 1):
        tok = line.replace(",", " ").split()
        if len(tok) == 1 and len(tok[0]) > 1:
            tok = list(tok[0])
        if any(t not in ("0", "1") for t in tok):
            raise GraphFormatError(f"line {k}: entries must be 0 or 1")
        rows.append([t == "1" for t in tok])
    if not rows or any(len(r) != len(rows) for r in rows):
        raise GraphFormatError("adjacency matrix must be square")
    return np.array(rows, bool)


def _graph6_adjacency(text: str) -> np.ndarray:
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    if not s or "\n" in s:
        raise GraphFormatError("expected exactly one graph6 line")
    data = [ord(c) - 63 for c in s]
    if any(not 0 <= x <= 63 for x in data):
        raise GraphFormatError("graph6 characters must lie in '?'..'~'")
    if data[0] <= 62:
        nv, rest = data[0], data[1:]
    elif len(data) >= 4 and data[1] <= 62:
        nv = (data[1] << 12) | (data[2] << 6) | data[3]
        rest = data[4:]
    else:
        raise GraphFormatError("graph6 vertex counts above 258047 are not supported")
    nbits = nv * (nv - 1) // 2
    if len(rest) != (nbits + 5) // 6:
        raise GraphFormatError(f"graph6 body has {len(rest)} bytes, expected {(nbits + 5) // 6}")
    bits = [(x >> (5 - k)) & 1 for x in rest for k in range(6)]
    if any(bits[nbits:]):
        raise GraphFormatError("graph6 padding bits must be zero")
    adj = np.zeros((nv, nv), bool)
    pos = 0
    # upper triangle, column by column: (0,1), (0,2), (1,2), (0,3), ...
    for j in range(1, nv):
        for i in range(j):
            if bits[pos]:
                adj[i, j] = adj[j, i] = True
            pos += 1
    return adj


def to_graph6(g: Graph) -> str:
    nv = g.vertex_count
    if nv > 62:
        head = [63, (nv >> 12) & 63, (nv >> 6) & 63, nv & 63]
    else:
        head = [nv]
    bits = [int(g.adjacency[i, j]) for j in range(1, nv) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    body = [sum(b << (5 - k) for k, b in enumerate(bits[s : s + 6])) for s in range(0, len(bits), 6)]
    return "".join(chr(x + 63) for x in head + body)


def to_edge_list(g: Graph) -> str:
    edges = g.edges()
    return "".join([f"{g.vertex_count} {len(edges)}\n"] + [f"{u} {v}\n" for u, v in edges])


def guess_format(path: str) -> str:
    low = path.lower()
    if low.endswith((".g6", ".graph6")):
        return "graph6"
    if low.endswith((".adj", ".mat", ".adjacency")):
        return "adjacency"
    return "edges"
