"""Triple overlay closure: sweep matching tests over Q until nothing changes.

A p cell survives when its block still dominates a permutation.  A pair cell
survives when the overlay of its two blocks does, after that overlay has been
pruned by every third block it shares cells with.  Removals only shrink Q and
every test is antitone in Q, so the sweep order (and the number of workers)
cannot change the fixpoint.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import _kernels as K
from .qmatrix import Counts, PairKey, QMatrix, RowColWitness, _witness

DEPTHS = ("double", "triple")
ORDERS = ("row_major", "shuffled")
DECISIONS = ("infeasible", "undecided", "budget_exhausted")


@dataclass(frozen=True)
class ClosureConfig:
    overlay_depth: str = "triple"
    boolean_closure_enabled: bool = True
    companion_symmetry: bool = False
    max_sweeps: Optional[int] = None
    worker_count: int = 1
    sweep_order: str = "row_major"
    seed: int = 0
    # restart the inner triple scan after each removal (otherwise scan until stable)
    restart_inner: bool = True

    def __post_init__(self):
        if self.overlay_depth not in DEPTHS:
            raise ValueError(f"overlay_depth must be one of {DEPTHS}")
        if self.sweep_order not in ORDERS:
            raise ValueError(f"sweep_order must be one of {ORDERS}")
        if self.worker_count < 1:
            raise ValueError("worker_count must be at least 1")
        if self.max_sweeps is not None and self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")

    @property
    def triple(self) -> bool:
        return self.overlay_depth == "triple"

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Decision:
    kind: str
    witness: Optional[RowColWitness] = None
    open_v_size: Optional[Counts] = None

    def __post_init__(self):
        if self.kind not in DECISIONS:
            raise ValueError(f"unknown decision {self.kind!r}")
        if (self.kind == "infeasible") != (self.witness is not None):
            raise ValueError("a witness comes with, and only with, an infeasible decision")

    @property
    def infeasible(self) -> bool:
        return self.kind == "infeasible"


@dataclass
class RunReport:
    sweeps: int = 0
    match_tests: int = 0
    pairs_removed: int = 0
    p_removed: int = 0
    wall_time: float = 0.0
    decision: Optional[Decision] = None
    # Q at the moment the witness was found, before collapsing to empty
    counts_at_exit: Optional[Counts] = None
    counts_start: Optional[Counts] = field(default=None, repr=False)


def test_p_variable(q: QMatrix, u: int, i: int) -> bool:
    """Keep p(u,i)?  True iff block (u,i) still dominates a permutation."""
    n = q.n
    mr, mc, prev = (np.empty(n, np.int64) for _ in range(3))
    return bool(K.p_test(q.bits, n, u - 1, i - 1, mr, mc, prev, np.empty(n + 1, np.int64)))


def test_pair_variable(q: QMatrix, k, depth: str = "triple", restart: bool = True) -> bool:
    """Keep the pair ``k``?  Double overlay, then (for depth triple) the third-block pruning."""
    if depth not in DEPTHS:
        raise ValueError(f"depth must be one of {DEPTHS}")
    u, i, v, j = PairKey.make(*k, n=q.n)
    n = q.n
    scratch = [np.empty(n, np.uint64), np.empty(n, np.uint64)] + [np.empty(n, np.int64) for _ in range(5)]
    ok, _ = K.pair_test(
        q.bits, n, u - 1, i - 1, v - 1, j - 1, depth == "triple", restart, *scratch, np.empty(n + 1, np.int64)
    )
    return bool(ok)


def _block_order(n: int, cfg: ClosureConfig, sweep: int) -> np.ndarray:
    order = np.array([(u, i) for u in range(n) for i in range(n)], dtype=np.int64).reshape(-1, 2)
    if cfg.sweep_order == "shuffled":
        rng = np.random.default_rng([cfg.seed, sweep])
        order = order[rng.permutation(len(order))]
    return order


def _candidates(bits: np.ndarray, n: int, order: np.ndarray) -> np.ndarray:
    """Rows (u, i, v, j): a p test (v == u) per live block, then its live pairs with i < j."""
    rows = []
    for u, i in order:
        if not K.p_alive(bits, u, i):
            continue
        rows.append((u, i, u, i))
        for v in range(n):
            if v == u:
                continue
            w = int(bits[u, i, v])
            for j in range(i + 1, n):
                if w >> j & 1:
                    rows.append((u, i, v, j))
    return np.array(rows, dtype=np.int64).reshape(-1, 4)


class _Runner:
    def __init__(self, q: QMatrix, cfg: ClosureConfig):
        self.q = q
        self.cfg = cfg
        self.n = q.n
        self.stats = np.zeros(3, np.int64)
        self.stamp = np.full((self.n,) * 4, -1, np.int64) if cfg.worker_count == 1 else None

    def tidy(self) -> Optional[RowColWitness]:
        # boolean closure and the companion rule share one fixpoint loop
        q, n = self.q, self.n
        while True:
            changed = False
            if self.cfg.boolean_closure_enabled:
                changed |= bool(K.boolean_closure(q.bits, n, True, q._ver))
            if self.cfg.companion_symmetry:
                changed |= bool(K.companion_closure(q.bits, n, q._ver))
            if not changed or not self.cfg.companion_symmetry or not self.cfg.boolean_closure_enabled:
                break
        return q.check_rows_columns()

    def sweep_sequential(self, sweep: int) -> Optional[RowColWitness]:
        q, cfg = self.q, self.cfg
        order = _block_order(self.n, cfg, sweep)
        w = K.sequential_sweep(
            q.bits, self.n, cfg.triple, cfg.restart_inner, cfg.boolean_closure_enabled, order, self.stamp, q._ver, self.stats
        )
        return _witness(*w)

    def sweep_parallel(self, sweep: int, pool: ThreadPoolExecutor) -> Optional[RowColWitness]:
        q, cfg, n = self.q, self.cfg, self.n
        snap = q.bits.copy()
        cand = _candidates(snap, n, _block_order(n, cfg, sweep))
        out = np.ones(len(cand), np.uint8)
        chunks = np.array_split(np.arange(len(cand)), cfg.worker_count * 4)
        tests = np.zeros((len(chunks), 1), np.int64)

        def work(c):
            idx = chunks[c]
            if len(idx):
                sub = np.empty(len(idx), np.uint8)
                K.evaluate_batch(snap, n, cfg.triple, cfg.restart_inner, cand[idx], sub, tests[c])
                out[idx] = sub

        list(pool.map(work, range(len(chunks))))
        self.stats[0] += int(tests.sum())
        # merge on the owning thread, in candidate order
        for (u, i, v, j) in cand[out == 0]:
            if v == u:
                K.kill_block(q.bits, n, u, i, q._ver)
            else:
                K.clear_pair(q.bits, u, i, v, j, q._ver)
        return q.check_rows_columns()


def run(q: QMatrix, cfg: Optional[ClosureConfig] = None) -> tuple[Decision, RunReport]:
    """Run the closure on ``q`` in place.

    On an infeasible exit Q is cleared: once any line of Q is empty, every
    block loses its matching, so the empty matrix is the fixpoint anyway and
    clearing it keeps the final state independent of sweep order.
    """
    cfg = cfg or ClosureConfig()
    t0 = time.perf_counter()
    start = q.counts()
    r = _Runner(q, cfg)
    report = RunReport(counts_start=start)

    def finish(kind: str, witness: Optional[RowColWitness] = None) -> tuple[Decision, RunReport]:
        report.counts_at_exit = q.counts()
        if kind == "infeasible":
            q.clear()
        end = q.counts()
        report.match_tests = int(r.stats[0])
        report.pairs_removed = start.v_size - end.v_size
        report.p_removed = start.p_nonzero - end.p_nonzero
        report.wall_time = time.perf_counter() - t0
        report.decision = Decision(kind, witness, end if kind != "infeasible" else None)
        return report.decision, report

    witness = r.tidy()
    if witness:
        return finish("infeasible", witness)

    pool = ThreadPoolExecutor(cfg.worker_count) if cfg.worker_count > 1 else None
    try:
        while True:
            if cfg.max_sweeps is not None and report.sweeps >= cfg.max_sweeps:
                return finish("budget_exhausted")
            report.sweeps += 1
            before = int(q._ver[0])
            if pool is None:
                witness = r.sweep_sequential(report.sweeps)
            else:
                witness = r.sweep_parallel(report.sweeps, pool)
            if witness is None:
                witness = r.tidy()
            if witness is not None:
                return finish("infeasible", witness)
            if int(q._ver[0]) == before:
                return finish("undecided")
    finally:
        if pool is not None:
            pool.shutdown()
