"""The n^2 x n^2 block matrix Q, exclusion sets and their text format.

Public indices are 1-based, matching how instances are written down:
``p(u, i)`` is row ``u``, column ``i`` of the permutation matrix P, and the
pair variable ``{p(u,i), p(v,j)}`` is cell ``(u, i, v, j)`` of Q, i.e. row
``(v, j)`` of block ``(u, i)``.  Storage is 0-based and bit-packed (see
``_kernels``), which limits ``n`` to 64.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional

import numpy as np

from . import _kernels as K
from .matching import BitMatrix


class QMatrixError(ValueError):
    pass


class PairKey(NamedTuple):
    """A pair variable ``{p(u,i), p(v,j)}`` in canonical form (``i < j``)."""

    u: int
    i: int
    v: int
    j: int

    @classmethod
    def make(cls, u: int, i: int, v: int, j: int, n: Optional[int] = None) -> PairKey:
        if u == v or i == j:
            raise QMatrixError(f"pair ({u},{i},{v},{j}) must couple distinct rows and columns")
        if n is not None:
            for x in (u, i, v, j):
                if not 1 <= x <= n:
                    raise QMatrixError(f"index {x} outside 1..{n} in ({u},{i},{v},{j})")
        if i > j:
            u, i, v, j = v, j, u, i
        return cls(u, i, v, j)

    def mirror(self) -> tuple[int, int, int, int]:
        return (self.v, self.j, self.u, self.i)


class Counts(NamedTuple):
    p_nonzero: int
    v_size: int


@dataclass(frozen=True)
class RowColWitness:
    """An all-zero line of Q.

    ``kind`` is ``"p-row"``, ``"p-column"``, ``"row"`` or ``"column"``; ``a, b``
    are 1-based.  Q-row ``(a, b)`` holds cells ``(a, *, b, *)`` and Q-column
    ``(a, b)`` holds cells ``(*, a, *, b)``; for the p kinds ``a == b``.
    """

    kind: str
    a: int
    b: int

    def describe(self) -> str:
        if self.kind == "p-row":
            return f"row {self.a} of P has no live p(u,i)"
        if self.kind == "p-column":
            return f"column {self.a} of P has no live p(u,i)"
        if self.kind == "row":
            return f"no live pair {{p({self.a},*), p({self.b},*)}}"
        return f"no live pair {{p(*,{self.a}), p(*,{self.b})}}"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "a": self.a, "b": self.b}

    @classmethod
    def from_dict(cls, d: dict) -> RowColWitness:
        return cls(d["kind"], int(d["a"]), int(d["b"]))


_WITNESS_KINDS = {1: "p-row", 2: "p-column", 3: "row", 4: "column"}


def _witness(kind: int, a: int, b: int) -> Optional[RowColWitness]:
    if kind == 0:
        return None
    return RowColWitness(_WITNESS_KINDS[kind], a + 1, b + 1)


# ---------------------------------------------------------------- exclusion sets


class ExclusionSet:
    """The set E of pair variables fixed at zero, plus p-level exclusions.

    Stored as a symmetric boolean mask over ``(u, i, v, j)`` (0-based) so that
    sets with millions of pairs stay cheap.  ``forced_zero_p`` holds positions
    excluded directly; positions all of whose pairs are in E are derived on
    top of that.
    """

    def __init__(self, n: int):
        if not 1 <= n <= K.MAX_N:
            raise QMatrixError(f"dimension must be in 1..{K.MAX_N}, got {n}")
        self.n = n
        self.mask = np.zeros((n, n, n, n), bool)
        self._forced = np.zeros((n, n), bool)

    def _check(self, *idx: int) -> None:
        for x in idx:
            if not 1 <= x <= self.n:
                raise QMatrixError(f"index {x} outside 1..{self.n}")

    def add(self, u: int, i: int, v: int, j: int) -> None:
        """Exclude ``{p(u,i), p(v,j)}``; structurally-zero positions are ignored."""
        self._check(u, i, v, j)
        if u == v or i == j:
            return
        self.mask[u - 1, i - 1, v - 1, j - 1] = True
        self.mask[v - 1, j - 1, u - 1, i - 1] = True

    def add_key(self, k: PairKey) -> None:
        self.add(*k)

    def force_zero(self, u: int, i: int) -> None:
        """Exclude every pair involving ``p(u,i)`` and record the position."""
        self._check(u, i)
        self._forced[u - 1, i - 1] = True
        self.mask[u - 1, i - 1] = True
        self.mask[:, :, u - 1, i - 1] = True
        self._clear_structural()

    def _clear_structural(self) -> None:
        n = self.n
        for u in range(n):
            self.mask[u, :, u, :] = False
        for i in range(n):
            self.mask[:, i, :, i] = False

    def forced_zero_mask(self) -> np.ndarray:
        """Positions (0-based) excluded directly or through all of their pairs."""
        n = self.n
        if n == 1:
            return self._forced.copy()
        admissible = (n - 1) * (n - 1)
        return self._forced | (self.mask.reshape(n, n, -1).sum(axis=2) == admissible)

    @property
    def forced_zero_p(self) -> frozenset[tuple[int, int]]:
        return frozenset((int(u) + 1, int(i) + 1) for u, i in zip(*np.nonzero(self.forced_zero_mask())))

    def __iter__(self) -> Iterator[PairKey]:
        n = self.n
        tri = np.triu(np.ones((n, n), bool), 1)
        for u, i, v, j in zip(*np.nonzero(self.mask & tri[None, :, None, :])):
            yield PairKey(int(u) + 1, int(i) + 1, int(v) + 1, int(j) + 1)

    @property
    def pairs(self) -> frozenset[PairKey]:
        return frozenset(self)

    def __len__(self) -> int:
        return int(self.mask.sum()) // 2

    def __contains__(self, k) -> bool:
        u, i, v, j = k
        return bool(self.mask[u - 1, i - 1, v - 1, j - 1])

    def __eq__(self, other):
        if not isinstance(other, ExclusionSet):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.mask, other.mask)
            and np.array_equal(self.forced_zero_mask(), other.forced_zero_mask())
        )

    def __repr__(self):
        return f"ExclusionSet(n={self.n}, pairs={len(self)}, forced_p={len(self.forced_zero_p)})"

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int, int, int]], forced: Iterable[tuple[int, int]] = ()) -> ExclusionSet:
        e = cls(n)
        for k in pairs:
            u, i, v, j = k
            if u == v or i == j:
                raise QMatrixError(f"pair {tuple(k)} is a structural zero")
            e.add(u, i, v, j)
        for u, i in forced:
            e.force_zero(u, i)
        return e

    def union(self, other: ExclusionSet) -> ExclusionSet:
        if other.n != self.n:
            raise QMatrixError("dimension mismatch")
        e = ExclusionSet(self.n)
        e.mask = self.mask | other.mask
        e._forced = self._forced | other._forced
        return e

    def issubset(self, other: ExclusionSet) -> bool:
        return self.n == other.n and not np.any(self.mask & ~other.mask)

    # text format: "n <dim>" header, then "u i v j" per line, '#' comments

    def dumps(self) -> str:
        out = io.StringIO()
        out.write(f"n {self.n}\n")
        for k in self:
            out.write(f"{k.u} {k.i} {k.v} {k.j}\n")
        return out.getvalue()

    @classmethod
    def loads(cls, text: str) -> ExclusionSet:
        e = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if e is None:
                if len(tok) != 2 or tok[0] != "n":
                    raise QMatrixError(f"line {lineno}: expected header 'n <dim>'")
                e = cls(_int(tok[1], lineno))
                continue
            if len(tok) != 4:
                raise QMatrixError(f"line {lineno}: expected 'u i v j'")
            u, i, v, j = (_int(t, lineno) for t in tok)
            try:
                e.add_key(PairKey.make(u, i, v, j, e.n))
            except QMatrixError as exc:
                raise QMatrixError(f"line {lineno}: {exc}") from None
        if e is None:
            raise QMatrixError("missing header 'n <dim>'")
        return e


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise QMatrixError(f"line {lineno}: not an integer: {tok!r}") from None


# ---------------------------------------------------------------- Q matrix


@dataclass
class ClosureOutcome:
    changed: bool
    infeasible_witness: Optional[RowColWitness]


class QMatrix:
    """Bit-packed Q.  Cells only ever go from 1 to 0, always in mirrored pairs."""

    def __init__(self, n: int, bits: Optional[np.ndarray] = None):
        if not 1 <= n <= K.MAX_N:
            raise QMatrixError(f"dimension must be in 1..{K.MAX_N}, got {n}")
        self.n = n
        if bits is None:
            bits = _full_bits(n)
        self.bits = np.ascontiguousarray(bits, dtype=np.uint64)
        self._ver = np.zeros(1, np.int64)

    @classmethod
    def full(cls, n: int) -> QMatrix:
        return cls(n)

    def copy(self) -> QMatrix:
        return QMatrix(self.n, self.bits.copy())

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.bits, other.bits))

    def __repr__(self):
        c = self.counts()
        return f"QMatrix(n={self.n}, p={c.p_nonzero}, v={c.v_size})"

    def cell(self, u: int, i: int, v: int, j: int) -> bool:
        return bool(self.bits[u - 1, i - 1, v - 1] & K.BIT[j - 1])

    def p(self, u: int, i: int) -> bool:
        return self.cell(u, i, u, i)

    def to_array(self) -> np.ndarray:
        """Dense boolean view indexed ``[u, i, v, j]`` (0-based)."""
        n = self.n
        return (self.bits[..., None] & K.BIT[:n]) != 0

    def p_layer(self) -> np.ndarray:
        n = self.n
        return np.array([[bool(self.bits[u, i, u] & K.BIT[i]) for i in range(n)] for u in range(n)])

    def zero_pair(self, k) -> bool:
        """Zero ``{p(u,i), p(v,j)}`` in both orientations; True if it was live.

        Structural-zero positions are a no-op returning False.
        """
        u, i, v, j = k
        for x in (u, i, v, j):
            if not 1 <= x <= self.n:
                raise QMatrixError(f"index {x} outside 1..{self.n}")
        if u == v or i == j:
            return False
        return bool(K.clear_pair(self.bits, u - 1, i - 1, v - 1, j - 1, self._ver))

    def zero_p(self, u: int, i: int) -> bool:
        """Zero p(u,i) together with its block and every mirrored cell."""
        was = self.p(u, i) or bool(np.any(self.bits[u - 1, i - 1]))
        K.kill_block(self.bits, self.n, u - 1, i - 1, self._ver)
        return was

    def block_view(self, u: int, i: int) -> BitMatrix:
        return BitMatrix(self.n, self.bits[u - 1, i - 1].copy())

    def boolean_closure(self, single_survivor: bool = True) -> ClosureOutcome:
        changed = bool(K.boolean_closure(self.bits, self.n, single_survivor, self._ver))
        return ClosureOutcome(changed, self.check_rows_columns())

    def check_rows_columns(self) -> Optional[RowColWitness]:
        return _witness(*K.check_rows_columns(self.bits, self.n))

    def counts(self) -> Counts:
        return Counts(int(K.p_layer_count(self.bits, self.n)), int(K.canonical_pair_count(self.bits, self.n)))

    def is_empty(self) -> bool:
        return not np.any(self.bits)

    def clear(self) -> None:
        if np.any(self.bits):
            self._ver[0] += 1
        self.bits[:] = 0

    def live_pairs(self) -> Iterator[PairKey]:
        a = self.to_array()
        n = self.n
        tri = np.triu(np.ones((n, n), bool), 1)
        for u, i, v, j in zip(*np.nonzero(a & tri[None, :, None, :])):
            if u != v:
                yield PairKey(int(u) + 1, int(i) + 1, int(v) + 1, int(j) + 1)

    def invariant_violations(self) -> list[str]:
        """Empty when the structural, symmetry and block-coupling invariants hold."""
        a = self.to_array()
        n = self.n
        problems = []
        for u in range(n):
            for i in range(n):
                blk = a[u, i].copy()
                p = blk[u, i]
                blk[u, i] = False
                if blk[u].any() or blk[:, i].any():
                    problems.append(f"structural zero violated in block ({u + 1},{i + 1})")
                if not p and blk.any():
                    problems.append(f"dead p({u + 1},{i + 1}) with live block cells")
        if not np.array_equal(a, a.transpose(2, 3, 0, 1)):
            problems.append("asymmetric pair cells")
        return problems


def _full_bits(n: int) -> np.ndarray:
    bits = np.zeros((n, n, n), np.uint64)
    full = K.full_mask(n)
    for u in range(n):
        for i in range(n):
            bits[u, i, :] = full & ~K.BIT[i]
            bits[u, i, u] = K.BIT[i]
    return bits


def encode(n: int, e: Optional[ExclusionSet]) -> QMatrix:
    """Q with every admissible cell live except those excluded by ``e``.

    Positions in ``forced_zero_p`` lose their p cell and block; no further
    propagation is done.
    """
    q = QMatrix.full(n)
    if e is None:
        return q
    if e.n != n:
        raise QMatrixError(f"exclusion set has n={e.n}, expected {n}")
    a = ~e.mask
    packed = (a.astype(np.uint64) * K.BIT[:n]).sum(axis=3, dtype=np.uint64)
    q.bits &= packed | _p_bits(n)
    for u, i in zip(*np.nonzero(e._forced)):
        K.kill_block(q.bits, n, int(u), int(i), q._ver)
    return q


def _p_bits(n: int) -> np.ndarray:
    b = np.zeros((n, n, n), np.uint64)
    for u in range(n):
        for i in range(n):
            b[u, i, u] = K.BIT[i]
    return b


def init_q(n: int, e: Optional[ExclusionSet] = None, closure: bool = True) -> QMatrix:
    """Encode ``e`` into a fresh Q and, by default, run boolean closure to a fixpoint."""
    q = encode(n, e)
    if closure:
        q.boolean_closure()
    return q


def zero_pair(q: QMatrix, k) -> bool:
    return q.zero_pair(k)


def boolean_closure(q: QMatrix) -> ClosureOutcome:
    return q.boolean_closure()


def check_rows_columns(q: QMatrix) -> Optional[RowColWitness]:
    return q.check_rows_columns()


def counts(q: QMatrix) -> Counts:
    return q.counts()


def block_view(q: QMatrix, u: int, i: int) -> BitMatrix:
    return q.block_view(u, i)


def initial_counts(n: int, e: ExclusionSet) -> Counts:
    """Counts at the point right after E is encoded, as tabulated for instances.

    E is encoded with no propagation, then a single in-place row-major pass
    kills each p(u,i) whose block already has an empty row or column.  The
    p figure is taken after that pass.  The pair figure is a tally of live
    ordered cells, debited once (not twice) per pair cleared by the pass, then
    halved; it sits between the pair counts before and after the pass.
    """
    q = encode(n, e)
    before = int(K.canonical_pair_count(q.bits, n))
    cleared = int(K.measurement_sweep(q.bits, n, q._ver))
    p = int(K.p_layer_count(q.bits, n))
    return Counts(p, (2 * before - cleared) // 2)
