"""Brute-force ground truth: try every permutation.

Slow on purpose and simple on purpose.  It exists to check the engine, so it
shares no logic with it beyond the exclusion-set data structure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .qmatrix import ExclusionSet, PairKey, QMatrix

MAX_ORACLE_N = 9


class OracleBoundError(ValueError):
    pass


@dataclass
class OracleResult:
    n: int
    surviving_permutations: int
    true_open_pairs: frozenset
    true_open_p: frozenset
    # dense [u, i, v, j] view of the open pairs (0-based, both orientations)
    open_mask: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def feasible(self) -> bool:
        return self.surviving_permutations > 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "feasible": self.feasible,
            "surviving_permutations": self.surviving_permutations,
            "open_pairs": len(self.true_open_pairs),
            "open_p": len(self.true_open_p),
        }


def permutations(n: int) -> np.ndarray:
    """All permutations of 0..n-1 in lexicographic order, one per row."""
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def enumerate_open(n: int, e: ExclusionSet) -> OracleResult:
    """Survivors are permutations none of whose pairs or unit cells are excluded."""
    if n > MAX_ORACLE_N:
        raise OracleBoundError(f"oracle enumerates n! permutations and is limited to n <= {MAX_ORACLE_N}, got n={n}")
    if e.n != n:
        raise ValueError(f"exclusion set has n={e.n}, expected {n}")
    perms = permutations(n)
    rows = np.arange(n)
    forced = e.forced_zero_mask()
    alive = ~forced[rows, perms].any(axis=1)
    for u, v in itertools.combinations(range(n), 2):
        alive &= ~e.mask[u, perms[:, u], v, perms[:, v]]
    surv = perms[alive]
    open_mask = np.zeros((n, n, n, n), bool)
    for u, v in itertools.permutations(range(n), 2):
        open_mask[u, surv[:, u], v, surv[:, v]] = True
    open_p = np.zeros((n, n), bool)
    for u in range(n):
        open_p[u, surv[:, u]] = True
    pairs = frozenset(
        PairKey(int(u) + 1, int(i) + 1, int(v) + 1, int(j) + 1)
        for u, i, v, j in zip(*np.nonzero(open_mask))
        if i < j
    )
    p = frozenset((int(u) + 1, int(i) + 1) for u, i in zip(*np.nonzero(open_p)))
    return OracleResult(n, int(alive.sum()), pairs, p, open_mask)


@dataclass
class Verdict:
    consistent: bool
    messages: list[str]

    def describe(self) -> str:
        head = "consistent" if self.consistent else "VIOLATION"
        return "; ".join([head] + self.messages)


def verify_run(n: int, e: ExclusionSet, engine_final: QMatrix, decision, oracle: Optional[OracleResult] = None) -> Verdict:
    """Check an engine run against enumeration.

    The engine may keep dead cells (it is a one-sided detector) but must never
    drop a cell that some surviving permutation uses.
    """
    res = oracle or enumerate_open(n, e)
    kind = getattr(decision, "kind", decision)
    messages = []
    ok = True
    live = engine_final.to_array()
    lost = res.open_mask & ~live
    if lost.any():
        ok = False
        u, i, v, j = (int(x) + 1 for x in np.argwhere(lost)[0])
        messages.append(f"{int(lost.sum()) // 2} open pairs removed, e.g. {{p({u},{i}), p({v},{j})}}")
    for u, i in res.true_open_p:
        if not engine_final.p(u, i):
            ok = False
            messages.append(f"open p({u},{i}) removed")
            break
    if kind == "infeasible" and res.feasible:
        ok = False
        messages.append(f"engine says infeasible but {res.surviving_permutations} permutations survive")
    if kind == "undecided" and not res.feasible:
        messages.append("incomplete but sound: no permutation survives, engine undecided")
    return Verdict(ok, messages)
