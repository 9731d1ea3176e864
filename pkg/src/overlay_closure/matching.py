"""Overlay and perfect-matching existence on small square 0/1 matrices."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from . import _kernels as K


class BitMatrix:
    """An n x n boolean matrix packed one ``uint64`` word per row (n <= 64).

    Instances are treated as immutable; ``rows`` is a read-only array.
    """

    __slots__ = ("n", "rows")

    def __init__(self, n: int, rows):
        if not 1 <= n <= K.MAX_N:
            raise ValueError(f"BitMatrix side must be in 1..{K.MAX_N}, got {n}")
        rows = np.array(rows, dtype=np.uint64).reshape(n)
        if n < 64 and np.any(rows >> np.uint64(n)):
            raise ValueError("cell outside the n x n grid")
        rows.setflags(write=False)
        self.n = n
        self.rows = rows

    @classmethod
    def from_array(cls, cells) -> BitMatrix:
        a = np.asarray(cells, dtype=bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
        n = a.shape[0]
        weights = K.BIT[:n]
        rows = (a.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)
        return cls(n, rows)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, K.BIT[:n])

    @classmethod
    def zeros(cls, n: int) -> BitMatrix:
        return cls(n, np.zeros(n, np.uint64))

    @classmethod
    def ones(cls, n: int) -> BitMatrix:
        return cls(n, np.full(n, K.full_mask(n), np.uint64))

    @classmethod
    def from_cells(cls, n: int, cells: Iterable[tuple[int, int]]) -> BitMatrix:
        """Build from 1-based (row, column) positions of the unit cells."""
        a = np.zeros((n, n), bool)
        for r, c in cells:
            a[r - 1, c - 1] = True
        return cls.from_array(a)

    def cell(self, r: int, c: int) -> bool:
        """1-based cell access."""
        return bool(self.rows[r - 1] & K.BIT[c - 1])

    def to_array(self) -> np.ndarray:
        return (self.rows[:, None] & K.BIT[: self.n][None, :]) != 0

    def __eq__(self, other):
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.rows, other.rows))

    def __le__(self, other: BitMatrix) -> bool:
        _same_side(self, other)
        return not np.any(self.rows & ~other.rows)

    def __hash__(self):
        return hash((self.n, self.rows.tobytes()))

    def __repr__(self):
        body = "/".join("".join("1" if x else "0" for x in row) for row in self.to_array())
        return f"BitMatrix({self.n}, {body})"


def _same_side(a: BitMatrix, b: BitMatrix) -> None:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")


def overlay(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Component-wise AND of two matrices of equal side."""
    _same_side(a, b)
    return BitMatrix(a.n, a.rows & b.rows)


def has_perfect_match(m: BitMatrix) -> bool:
    """True iff some permutation matrix is dominated by ``m``.

    Rows are one side of a bipartite graph and columns the other; the answer
    is whether that graph has a perfect matching.  An empty row or column
    short-circuits to False before any search.
    """
    return bool(K.has_perfect_matching(np.ascontiguousarray(m.rows), m.n))
