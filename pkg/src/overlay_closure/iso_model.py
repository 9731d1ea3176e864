"""Subgraph and graph isomorphism as permutation programs.

``p(a, c) = 1`` maps pattern vertex ``a`` of F onto host vertex ``c`` of G.
The pair ``{p(a,c), p(b,d)}`` is excluded whenever mapping a->c and b->d
breaks the relation asked for: an F edge landing on a G non-edge, and in
isomorphism mode also an F non-edge landing on a G edge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .graph import Graph, GraphError
from .qmatrix import ExclusionSet

MODES = ("subgraph", "iso")


class IsoModelError(GraphError):
    code = "iso-model"


def _as_adjacency(x) -> np.ndarray:
    a = x.adjacency if isinstance(x, Graph) else np.asarray(x, dtype=bool)
    return np.array(a, dtype=bool)


@dataclass(frozen=True)
class IsoInstance:
    f: np.ndarray
    g: np.ndarray
    mode: str = "subgraph"

    @classmethod
    def build(cls, f, g, mode: str = "subgraph") -> IsoInstance:
        """Validate, and in subgraph mode pad F with isolated vertices up to G's size."""
        if mode not in MODES:
            raise IsoModelError(f"mode must be one of {MODES}")
        fa, ga = _as_adjacency(f), _as_adjacency(g)
        for name, a in (("pattern", fa), ("host", ga)):
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise IsoModelError(f"{name} adjacency must be square")
            if not np.array_equal(a, a.T) or a.diagonal().any():
                raise IsoModelError(f"{name} must be a simple undirected graph")
        mf, mg = fa.shape[0], ga.shape[0]
        if mode == "iso":
            if mf != mg:
                raise IsoModelError(f"isomorphism needs equal vertex counts, got {mf} and {mg}")
            # unequal edge counts are left to the model, which rejects them at once
        elif mf > mg:
            raise IsoModelError(f"pattern has {mf} vertices, host only {mg}")
        elif mf < mg:
            pad = np.zeros((mg, mg), bool)
            pad[:mf, :mf] = fa
            fa = pad
        if mg < 2:
            raise IsoModelError("graphs need at least 2 vertices")
        if mg > K.MAX_N:
            raise IsoModelError(f"at most {K.MAX_N} vertices are supported")
        fa.setflags(write=False)
        ga.setflags(write=False)
        return cls(fa, ga, mode)

    @property
    def m(self) -> int:
        return self.f.shape[0]


def build_iso_exclusions(inst: IsoInstance) -> ExclusionSet:
    m = inst.m
    e = ExclusionSet(m)
    f, g = inst.f, inst.g
    off = ~np.eye(m, dtype=bool)
    # bad[a, b, c, d]: mapping a->c, b->d violates the relation
    bad = f[:, :, None, None] & (~g & off)[None, None, :, :]
    if inst.mode == "iso":
        bad |= (~f & off)[:, :, None, None] & g[None, None, :, :]
    # Q cell order is (a, c, b, d)
    e.mask |= bad.transpose(0, 2, 1, 3)
    e._clear_structural()
    return e
