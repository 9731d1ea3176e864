import itertools

import numpy as np
import pytest

from conftest import random_exclusions
from overlay_closure import catalog
from overlay_closure.closure_engine import Decision, run
from overlay_closure.hcp_model import build_hcp_exclusions
from overlay_closure.oracle import OracleBoundError, enumerate_open, permutations, verify_run
from overlay_closure.qmatrix import ExclusionSet, PairKey, QMatrix, RowColWitness, init_q


def test_unconstrained_n3():
    r = enumerate_open(3, ExclusionSet(3))
    assert r.feasible and r.surviving_permutations == 6
    assert len(r.true_open_pairs) == 18 and len(r.true_open_p) == 9


def test_c4_model():
    r = enumerate_open(3, build_hcp_exclusions(catalog.cycle(4)))
    assert r.surviving_permutations == 2
    expected = {(1, 1, 2, 2), (1, 1, 3, 3), (2, 2, 3, 3), (2, 2, 1, 3), (3, 1, 1, 3), (3, 1, 2, 2)}
    assert {tuple(k) for k in r.true_open_pairs} == expected


def test_everything_excluded():
    e = ExclusionSet(3)
    for u, i, v, j in itertools.product(range(1, 4), repeat=4):
        e.add(u, i, v, j)
    r = enumerate_open(3, e)
    assert not r.feasible and r.surviving_permutations == 0 and not r.true_open_pairs


def test_bound():
    with pytest.raises(OracleBoundError, match="n <= 9"):
        enumerate_open(10, ExclusionSet(10))


def test_lexicographic_and_deterministic():
    p = permutations(3)
    assert p.tolist() == [list(x) for x in itertools.permutations(range(3))]
    e = random_exclusions(np.random.default_rng(2), 5, 0.2)
    assert enumerate_open(5, e) == enumerate_open(5, e)


def test_forced_positions_prune():
    e = ExclusionSet(3)
    e.force_zero(1, 1)
    r = enumerate_open(3, e)
    assert r.surviving_permutations == 4 and (1, 1) not in r.true_open_p


def test_matches_naive_definition():
    rng = np.random.default_rng(8)
    for _ in range(30):
        n = int(rng.integers(2, 6))
        e = random_exclusions(rng, n, rng.uniform(0, 0.4))
        r = enumerate_open(n, e)
        naive = set()
        count = 0
        for perm in itertools.permutations(range(1, n + 1)):
            pairs = [PairKey.make(u, perm[u - 1], v, perm[v - 1]) for u, v in itertools.combinations(range(1, n + 1), 2)]
            if any(k in e for k in pairs):
                continue
            count += 1
            naive |= set(pairs)
        assert r.surviving_permutations == count and set(r.true_open_pairs) == naive
        assert r.feasible == bool(r.true_open_pairs)


def test_verify_petersen():
    e = build_hcp_exclusions(catalog.petersen())
    q = init_q(9, e)
    d, _ = run(q)
    v = verify_run(9, e, q, d)
    assert v.consistent and d.kind == "infeasible"
    assert enumerate_open(9, e).surviving_permutations == 0


def test_verify_k4():
    e = build_hcp_exclusions(catalog.complete(4))
    q = init_q(3, e)
    d, _ = run(q)
    v = verify_run(3, e, q, d)
    assert v.consistent and d.kind == "undecided"


def test_verify_flags_false_removal():
    e = ExclusionSet(3)
    q = init_q(3, e)
    q.zero_pair((1, 1, 2, 2))
    v = verify_run(3, e, q, Decision("undecided", open_v_size=q.counts()))
    assert not v.consistent and "removed" in v.describe()
    bad = verify_run(3, e, QMatrix(3, np.zeros((3, 3, 3), np.uint64)), Decision("infeasible", RowColWitness("p-row", 1, 1)))
    assert not bad.consistent


def test_verify_incomplete_but_sound():
    e = ExclusionSet(3)
    for (u, i) in [(1, 1), (1, 2), (1, 3)]:
        for v in (2, 3):
            for j in range(1, 4):
                if j != i:
                    e.add(u, i, v, j)
    q = init_q(3)  # engine knew nothing
    v = verify_run(3, e, q, "undecided")
    assert v.consistent and "incomplete" in v.describe()
