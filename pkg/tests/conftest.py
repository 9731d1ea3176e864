import numpy as np
import pytest

from overlay_closure.qmatrix import ExclusionSet

ACCEPTANCE_LINES = []


def random_exclusions(rng, n, density):
    """Symmetric random exclusion set; roughly ``density`` of admissible pairs."""
    e = ExclusionSet(n)
    m = rng.random((n, n, n, n)) < density
    e.mask |= m | m.transpose(2, 3, 0, 1)
    e._clear_structural()
    return e


def cubic_hamiltonian(rng, nv):
    """Hamilton cycle 1..nv plus a random perfect matching of chords."""
    while True:
        perm = rng.permutation(nv) + 1
        chords = [tuple(sorted(perm[k : k + 2])) for k in range(0, nv, 2)]
        cyc = {tuple(sorted((v, v % nv + 1))) for v in range(1, nv + 1)}
        if not any(c in cyc for c in chords):
            return sorted(cyc) + chords


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
