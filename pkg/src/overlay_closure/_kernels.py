"""Compiled bitset kernels shared by the matching, Q-matrix and engine modules.

A Q matrix of dimension ``n`` (``n <= 64``) is stored as a ``uint64`` array of
shape ``(n, n, n)``: word ``q[u, i, v]`` holds row ``v`` of block ``(u, i)``,
bit ``j`` being cell ``(u, i, v, j)``.  All indices here are 0-based.

Every routine that clears cells bumps ``ver[0]`` by the number of cells it
cleared, so callers can tell cheaply whether anything changed.
"""

import numpy as np
from numba import njit

MAX_N = 64

BIT = np.array([np.uint64(1) << np.uint64(k) for k in range(64)], dtype=np.uint64)
ZERO = np.uint64(0)
ONE = np.uint64(1)


@njit(cache=True)
def full_mask(n):
    if n == 64:
        return ~np.uint64(0)
    return (np.uint64(1) << np.uint64(n)) - np.uint64(1)


@njit(cache=True)
def lowest_bit(x):
    # index of the lowest set bit; x must be non-zero
    k = 0
    while (x >> np.uint64(k)) & ONE == ZERO:
        k += 1
    return k


@njit(cache=True)
def popcount(x):
    c = 0
    while x != ZERO:
        x &= x - ONE
        c += 1
    return c


# ---------------------------------------------------------------- matching


@njit(cache=True)
def degree_screen(rows, n):
    """False when some row or column of the n x n bit matrix is empty."""
    acc = ZERO
    for r in range(n):
        if rows[r] == ZERO:
            return False
        acc |= rows[r]
    return acc == full_mask(n)


@njit(cache=True)
def _augment(rows, n, root, mr, mc, prev, queue):
    # alternating BFS from an unmatched row; mr[row] = col, mc[col] = row
    visited = ZERO
    head = 0
    tail = 1
    queue[0] = root
    while head < tail:
        r = queue[head]
        head += 1
        avail = rows[r] & ~visited
        while avail != ZERO:
            c = lowest_bit(avail)
            avail &= avail - ONE
            visited |= BIT[c]
            prev[c] = r
            if mc[c] < 0:
                while True:
                    rr = prev[c]
                    nxt = mr[rr]
                    mr[rr] = c
                    mc[c] = rr
                    if rr == root:
                        return True
                    c = nxt
            queue[tail] = mc[c]
            tail += 1
    return False


@njit(cache=True)
def complete_matching(rows, n, mr, mc, prev, queue):
    """Extend the partial matching in (mr, mc) to a perfect one if possible."""
    for r in range(n):
        if mr[r] < 0:
            if not _augment(rows, n, r, mr, mc, prev, queue):
                return False
    return True


@njit(cache=True)
def find_matching(rows, n, mr, mc, prev, queue):
    if not degree_screen(rows, n):
        return False
    for k in range(n):
        mr[k] = -1
        mc[k] = -1
    # greedy seed
    used = ZERO
    for r in range(n):
        avail = rows[r] & ~used
        if avail != ZERO:
            c = lowest_bit(avail)
            used |= BIT[c]
            mr[r] = c
            mc[c] = r
    return complete_matching(rows, n, mr, mc, prev, queue)


@njit(cache=True)
def has_perfect_matching(rows, n):
    mr = np.empty(n, np.int64)
    mc = np.empty(n, np.int64)
    prev = np.empty(n, np.int64)
    queue = np.empty(n + 1, np.int64)
    return find_matching(rows, n, mr, mc, prev, queue)


# ---------------------------------------------------------------- Q writes


@njit(cache=True)
def clear_pair(q, u, i, v, j, ver):
    """Zero cell (u,i,v,j) and its mirror; returns True if either was live."""
    a = q[u, i, v] & BIT[j]
    b = q[v, j, u] & BIT[i]
    if a == ZERO and b == ZERO:
        return False
    q[u, i, v] &= ~BIT[j]
    q[v, j, u] &= ~BIT[i]
    ver[0] += 1
    return True


@njit(cache=True)
def kill_block(q, n, u, i, ver):
    """Zero p(u,i), its whole block and every mirrored cell in other blocks.

    Returns the number of live pair cells that were cleared.
    """
    removed = 0
    for v in range(n):
        if v == u:
            continue
        w = q[u, i, v]
        while w != ZERO:
            j = lowest_bit(w)
            w &= w - ONE
            q[v, j, u] &= ~BIT[i]
            removed += 1
        q[u, i, v] = ZERO
    if q[u, i, u] != ZERO:
        q[u, i, u] = ZERO
        ver[0] += 1
    ver[0] += removed
    return removed


@njit(cache=True)
def p_alive(q, u, i):
    return (q[u, i, u] & BIT[i]) != ZERO


@njit(cache=True)
def p_layer_count(q, n):
    c = 0
    for u in range(n):
        for i in range(n):
            if p_alive(q, u, i):
                c += 1
    return c


@njit(cache=True)
def canonical_pair_count(q, n):
    # cells (u,i,v,j) with i < j, u != v
    c = 0
    for u in range(n):
        for i in range(n):
            above = ~((BIT[i] << ONE) - ONE) if i < 63 else ZERO
            for v in range(n):
                if v != u:
                    c += popcount(q[u, i, v] & above)
    return c


# ---------------------------------------------------------------- boolean closure


@njit(cache=True)
def block_has_empty_line(q, n, u, i):
    # some interior row v != u, or column j != i, of block (u,i) is empty
    cols = ZERO
    for v in range(n):
        if v == u:
            continue
        if q[u, i, v] == ZERO:
            return True
        cols |= q[u, i, v]
    return (cols | BIT[i]) != full_mask(n)


@njit(cache=True)
def _single_survivors(q, n, u, i, ver):
    changed = False
    # a block row with one live cell consumes that column of the block
    for v in range(n):
        if v == u:
            continue
        x = q[u, i, v]
        if x != ZERO and (x & (x - ONE)) == ZERO:
            j = lowest_bit(x)
            for w in range(n):
                if w != u and w != v and (q[u, i, w] & BIT[j]) != ZERO:
                    clear_pair(q, u, i, w, j, ver)
                    changed = True
    # a block column with one live cell consumes that row of the block
    once = ZERO
    twice = ZERO
    for v in range(n):
        if v == u:
            continue
        twice |= once & q[u, i, v]
        once |= q[u, i, v]
    single = once & ~twice & ~BIT[i]
    while single != ZERO:
        j = lowest_bit(single)
        single &= single - ONE
        for v in range(n):
            if v != u and (q[u, i, v] & BIT[j]) != ZERO:
                rest = q[u, i, v] & ~BIT[j]
                while rest != ZERO:
                    k = lowest_bit(rest)
                    rest &= rest - ONE
                    clear_pair(q, u, i, v, k, ver)
                    changed = True
                break
    return changed


@njit(cache=True)
def boolean_closure(q, n, with_single, ver):
    """Run the propagation rules to a fixpoint; returns True if anything changed.

    Empty block rows/columns kill p(u,i) (and with it the block); with
    ``with_single`` a lone survivor in a block row/column also clears the rest
    of its column/row.  Symmetry is kept by construction of the writes.
    """
    start = ver[0]
    again = True
    while again:
        again = False
        for u in range(n):
            for i in range(n):
                if not p_alive(q, u, i):
                    continue
                if block_has_empty_line(q, n, u, i):
                    kill_block(q, n, u, i, ver)
                    again = True
                    continue
                if with_single and _single_survivors(q, n, u, i, ver):
                    again = True
                    if block_has_empty_line(q, n, u, i):
                        kill_block(q, n, u, i, ver)
        # a live p whose block holds no live pair at all (n >= 2) is caught above
    return ver[0] != start


@njit(cache=True)
def companion_closure(q, n, ver):
    """Enforce cell(u,i,v,j) == cell(u,n-1-i,v,n-1-j) by clearing, to fixpoint."""
    start = ver[0]
    again = True
    while again:
        again = False
        for u in range(n):
            for i in range(n):
                ri = n - 1 - i
                if p_alive(q, u, i) and not p_alive(q, u, ri):
                    kill_block(q, n, u, i, ver)
                    again = True
                    continue
                for v in range(n):
                    if v == u:
                        continue
                    w = q[u, i, v]
                    x = w
                    while x != ZERO:
                        j = lowest_bit(x)
                        x &= x - ONE
                        if (q[u, ri, v] & BIT[n - 1 - j]) == ZERO:
                            clear_pair(q, u, i, v, j, ver)
                            again = True
    return ver[0] != start


@njit(cache=True)
def check_rows_columns(q, n):
    """First all-zero row/column of the n^2 x n^2 matrix, or kind 0.

    Q-row (u,v) collects cells (u,*,v,*); Q-column (i,j) collects (*,i,*,j).
    Scan order: p rows, p columns, pair rows, pair columns.
    Returns (kind, a, b) with kind 1..4 for those four groups.
    """
    for u in range(n):
        hit = False
        for i in range(n):
            if p_alive(q, u, i):
                hit = True
                break
        if not hit:
            return 1, u, u
    for i in range(n):
        hit = False
        for u in range(n):
            if p_alive(q, u, i):
                hit = True
                break
        if not hit:
            return 2, i, i
    for u in range(n):
        for v in range(n):
            if v == u:
                continue
            acc = ZERO
            for i in range(n):
                acc |= q[u, i, v]
            if acc == ZERO:
                return 3, u, v
    for i in range(n):
        acc = ZERO
        for u in range(n):
            for v in range(n):
                if v != u:
                    acc |= q[u, i, v]
        for j in range(n):
            if j != i and (acc & BIT[j]) == ZERO:
                return 4, i, j
    return 0, -1, -1


# ---------------------------------------------------------------- overlay tests


@njit(cache=True)
def _warm_test(rows, n, mr_src, mr, mc, prev, queue):
    # seed from a known matching of a superset matrix, keep the cells that survive
    for k in range(n):
        mc[k] = -1
    for r in range(n):
        c = mr_src[r]
        if c >= 0 and (rows[r] & BIT[c]) != ZERO:
            mr[r] = c
            mc[c] = r
        else:
            mr[r] = -1
    return complete_matching(rows, n, mr, mc, prev, queue)


@njit(cache=True)
def pair_test(q, n, u, i, v, j, triple, restart, d, t, mrd, mcd, mr, mc, prev, queue):
    """True when cell (u,i,v,j) survives the double (and optionally triple) overlay test.

    ``d`` is scratch for the double overlay; it is never written back to q.
    With ``restart`` the inner scan starts over after every removal.
    Returns (retained, matching_tests).
    """
    tests = 1
    for r in range(n):
        d[r] = q[u, i, r] & q[v, j, r]
    if not find_matching(d, n, mrd, mcd, prev, queue):
        return False, tests
    if not triple:
        return True, tests
    keep = ~(BIT[i] | BIT[j])
    again = True
    while again:
        again = False
        for w in range(n):
            if w == u or w == v:
                continue
            x = d[w] & keep
            while x != ZERO:
                k = lowest_bit(x)
                x &= x - ONE
                if (d[w] & BIT[k]) == ZERO:
                    continue
                for r in range(n):
                    t[r] = d[r] & q[w, k, r]
                tests += 1
                if degree_screen(t, n) and _warm_test(t, n, mrd, mr, mc, prev, queue):
                    continue
                d[w] &= ~BIT[k]
                if mrd[w] == k:
                    mrd[w] = -1
                    mcd[k] = -1
                    tests += 1
                    if not complete_matching(d, n, mrd, mcd, prev, queue):
                        return False, tests
                again = True
                if restart:
                    break
            if again and restart:
                break
    return True, tests


@njit(cache=True)
def p_test(q, n, u, i, mr, mc, prev, queue):
    return find_matching(q[u, i], n, mr, mc, prev, queue)


# ---------------------------------------------------------------- sweeps


@njit(cache=True)
def sequential_sweep(q, n, triple, restart, use_bc, order, stamp, ver, stats):
    """One pass over the blocks in ``order`` (rows of (u, i)), updating q in place.

    Returns a witness tuple (kind, a, b); kind 0 means no violated line.
    ``stamp[u,i,v,j]`` remembers ver[0] at the last passed test of that pair so
    an unchanged Q is not re-tested.  stats: [match_tests, pairs_removed, p_removed].
    """
    d = np.empty(n, np.uint64)
    t = np.empty(n, np.uint64)
    mrd = np.empty(n, np.int64)
    mcd = np.empty(n, np.int64)
    mr = np.empty(n, np.int64)
    mc = np.empty(n, np.int64)
    prev = np.empty(n, np.int64)
    queue = np.empty(n + 1, np.int64)
    for idx in range(order.shape[0]):
        u = order[idx, 0]
        i = order[idx, 1]
        if not p_alive(q, u, i):
            continue
        stats[0] += 1
        if not p_test(q, n, u, i, mr, mc, prev, queue):
            stats[2] += 1
            stats[1] += kill_block(q, n, u, i, ver)
            if use_bc:
                boolean_closure(q, n, True, ver)
            kind, a, b = check_rows_columns(q, n)
            if kind != 0:
                return kind, a, b
            continue
        for v in range(n):
            if v == u:
                continue
            x = q[u, i, v]
            while x != ZERO:
                j = lowest_bit(x)
                x &= x - ONE
                if (q[u, i, v] & BIT[j]) == ZERO:
                    continue
                if stamp[u, i, v, j] == ver[0] or stamp[v, j, u, i] == ver[0]:
                    continue
                ok, tests = pair_test(q, n, u, i, v, j, triple, restart, d, t, mrd, mcd, mr, mc, prev, queue)
                stats[0] += tests
                if ok:
                    stamp[u, i, v, j] = ver[0]
                else:
                    clear_pair(q, u, i, v, j, ver)
                    stats[1] += 1
    return 0, -1, -1


@njit(cache=True, nogil=True)
def evaluate_batch(q, n, triple, restart, cand, out, counts):
    """Evaluate candidate cells against a read-only snapshot ``q``.

    cand rows are (u, i, v, j); v == u marks a p-cell test.  out[k] = 1 keeps.
    """
    d = np.empty(n, np.uint64)
    t = np.empty(n, np.uint64)
    mrd = np.empty(n, np.int64)
    mcd = np.empty(n, np.int64)
    mr = np.empty(n, np.int64)
    mc = np.empty(n, np.int64)
    prev = np.empty(n, np.int64)
    queue = np.empty(n + 1, np.int64)
    tests = 0
    for k in range(cand.shape[0]):
        u = cand[k, 0]
        i = cand[k, 1]
        v = cand[k, 2]
        j = cand[k, 3]
        if v == u:
            tests += 1
            out[k] = 1 if p_test(q, n, u, i, mr, mc, prev, queue) else 0
        else:
            ok, c = pair_test(q, n, u, i, v, j, triple, restart, d, t, mrd, mcd, mr, mc, prev, queue)
            tests += c
            out[k] = 1 if ok else 0
    counts[0] = tests


# ---------------------------------------------------------------- initial measurement


@njit(cache=True)
def measurement_sweep(q, n, ver):
    """One in-place row-major pass killing every p(u,i) whose block has an empty line.

    Returns the number of live pair cells cleared by those kills.
    """
    removed = 0
    for u in range(n):
        for i in range(n):
            if p_alive(q, u, i) and block_has_empty_line(q, n, u, i):
                removed += kill_block(q, n, u, i, ver)
    return removed
