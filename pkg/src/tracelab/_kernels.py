"""Hot numeric kernels shared by the numba and interpreted paths.

Everything here is written against plain numpy arrays with explicit integer
types so the exact same source compiles under ``@njit`` and runs interpreted.
Integer-valued kernels (walks, shuffles, searches) are bit-identical on both
paths. Float-valued kernels (Jacobi sweeps, matvec) match to roundoff only.

RNG: xoshiro256++ streams. A stream is addressed by ``(seed, index)``; its
state is four splitmix64 outputs seeded at ``seed + GOLDEN * (index + 1)``.
Distinct indices give statistically independent streams, so one master seed
drives any number of trials, one stream per trial index. Auxiliary draws
(start pools, probe targets) use indices offset by ``AUX_STREAM`` to stay
clear of trial streams.
"""

from __future__ import annotations

import numpy as np

from ._accel import kernel, kernel_inner

U0 = np.uint64(0)
U1 = np.uint64(1)
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_R17 = np.uint64(17)
_R19 = np.uint64(19)
_R23 = np.uint64(23)
_R27 = np.uint64(27)
_R30 = np.uint64(30)
_R31 = np.uint64(31)
_R41 = np.uint64(41)
_R45 = np.uint64(45)
_R11 = np.uint64(11)

MASK64 = (1 << 64) - 1

# Streams at index >= AUX_STREAM are reserved for auxiliary draws so that
# trial streams can always be indexed 0..trials-1.
AUX_STREAM = 1 << 32


@kernel_inner
def _mix64(z):
    z = (z ^ (z >> _R30)) * _MIX_A
    z = (z ^ (z >> _R27)) * _MIX_B
    return z ^ (z >> _R31)


@kernel_inner
def _stream(seed, index, s):
    # splitmix64 walk from a per-index base; four outputs form the state.
    base = seed + GOLDEN * (np.uint64(index) + U1)
    z = base
    nonzero = False
    for k in range(4):
        z = z + GOLDEN
        w = _mix64(z)
        s[k] = w
        if w != U0:
            nonzero = True
    if not nonzero:
        s[0] = GOLDEN


@kernel_inner
def _next64(s):
    # xoshiro256++: output = rotl(s0 + s3, 23) + s0
    x = s[0] + s[3]
    out = ((x << _R23) | (x >> _R41)) + s[0]
    t = s[1] << _R17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    y = s[3]
    s[3] = (y << _R45) | (y >> _R19)
    return out


@kernel_inner
def _randint(s, n):
    # Unbiased integer in [0, n) by threshold rejection.
    bound = np.uint64(n)
    threshold = (U0 - bound) % bound
    r = _next64(s)
    while r < threshold:
        r = _next64(s)
    return np.int64(r % bound)


@kernel_inner
def _randf(s):
    return np.float64(_next64(s) >> _R11) * 1.1102230246251565e-16


def stream_state(seed: int, index: int) -> np.ndarray:
    """State of stream ``(seed, index)`` as a fresh uint64[4] array."""
    s = np.empty(4, dtype=np.uint64)
    with np.errstate(over="ignore"):
        _stream(np.uint64(int(seed) & MASK64), np.int64(index), s)
    return s


def stream_uints(seed: int, index: int, count: int) -> np.ndarray:
    """First ``count`` raw uint64 outputs of stream ``(seed, index)``."""
    s = stream_state(seed, index)
    out = np.empty(count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for i in range(count):
            out[i] = _next64(s)
    return out


def stream_ints(seed: int, index: int, count: int, bound: int) -> np.ndarray:
    """``count`` iid uniform draws from [0, bound) on stream ``(seed, index)``."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    s = stream_state(seed, index)
    out = np.empty(count, dtype=np.int64)
    with np.errstate(over="ignore"):
        for i in range(count):
            out[i] = _randint(s, np.int64(bound))
    return out


def stream_floats(seed: int, index: int, count: int) -> np.ndarray:
    """``count`` iid uniform floats in [0, 1) on stream ``(seed, index)``."""
    s = stream_state(seed, index)
    out = np.empty(count, dtype=np.float64)
    with np.errstate(over="ignore"):
        for i in range(count):
            out[i] = _randf(s)
    return out


@kernel
def shuffle_ints(arr, state):
    """Fisher-Yates shuffle in place, driven by ``state``."""
    for i in range(arr.size - 1, 0, -1):
        j = _randint(state, np.int64(i + 1))
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp


# ---------------------------------------------------------------------------
# random-walk kernels
# ---------------------------------------------------------------------------


@kernel
def walk_stats(indptr, indices, start, length, delta, stop_mode, state, visits):
    """Run one random walk and track cover / blanket progress.

    ``visits`` must be a zeroed int64[n] array; on return it holds visit
    counts (the start position counts, so the total is steps_taken + 1).
    ``stop_mode``: 0 walks all ``length`` steps, 1 stops at cover,
    2 stops at the delta-blanket step. The blanket condition is
    ``min_v visits[v] >= delta * t / n``, first checked at the cover step.

    Returns ``(cover_step, blanket_step, steps_taken)`` with -1 for events
    that did not occur within the budget.
    """
    n = np.int64(indptr.size - 1)
    cur = np.int64(start)
    visits[cur] = 1
    if n == 1:
        return np.int64(0), np.int64(0), np.int64(0)
    cover_step = np.int64(-1)
    blanket_step = np.int64(-1)
    cur_min = np.int64(0)
    at_min = np.int64(n - 1)
    for step in range(1, length + 1):
        base = indptr[cur]
        deg = indptr[cur + 1] - base
        cur = np.int64(indices[base + _randint(state, deg)])
        old = visits[cur]
        visits[cur] = old + 1
        if old == cur_min:
            at_min -= 1
            if at_min == 0:
                cur_min += 1
                cnt = np.int64(0)
                for v in range(n):
                    if visits[v] == cur_min:
                        cnt += 1
                at_min = cnt
                if cover_step < 0 and cur_min >= 1:
                    cover_step = np.int64(step)
                    if stop_mode == 1:
                        return cover_step, blanket_step, np.int64(step)
        if cover_step >= 0 and blanket_step < 0:
            if np.float64(cur_min) * np.float64(n) >= delta * np.float64(step):
                blanket_step = np.int64(step)
                if stop_mode == 2:
                    return cover_step, blanket_step, np.int64(step)
    return cover_step, blanket_step, np.int64(length)


@kernel
def walk_trace(indptr, indices, eid, start, length, state, visits, first_visit,
               edge_u, edge_v, edge_step, seen):
    """Walk ``length`` steps recording the trace in first-traversal order.

    ``eid`` maps each CSR slot to its undirected edge id. ``seen`` is a
    zeroed uint8[m] scratch. New edges land in ``edge_u/edge_v`` (endpoints,
    low first) and ``edge_step``; the return value is how many were written.
    ``first_visit`` must come in filled with -1.
    """
    cur = np.int64(start)
    visits[cur] = 1
    first_visit[cur] = 0
    ne = np.int64(0)
    for step in range(1, length + 1):
        base = indptr[cur]
        deg = indptr[cur + 1] - base
        k = base + _randint(state, deg)
        nxt = np.int64(indices[k])
        e = eid[k]
        if seen[e] == 0:
            seen[e] = 1
            if cur < nxt:
                edge_u[ne] = cur
                edge_v[ne] = nxt
            else:
                edge_u[ne] = nxt
                edge_v[ne] = cur
            edge_step[ne] = step
            ne += 1
        cur = nxt
        visits[cur] += 1
        if first_visit[cur] < 0:
            first_visit[cur] = step
    return ne


@kernel
def endpoint_counts(indptr, indices, start, t, trials, seed, index0, counts):
    """Accumulate endpoint tallies of ``trials`` independent t-step walks."""
    s = np.empty(4, dtype=np.uint64)
    for trial in range(trials):
        _stream(seed, np.int64(index0 + trial), s)
        cur = np.int64(start)
        for _ in range(t):
            base = indptr[cur]
            deg = indptr[cur + 1] - base
            cur = np.int64(indices[base + _randint(s, deg)])
        counts[cur] += 1


@kernel
def hit_within_count(indptr, indices, u, v, horizon, trials, seed, index0):
    """Count walks from ``u`` that reach ``v`` within ``horizon`` steps."""
    hits = np.int64(0)
    s = np.empty(4, dtype=np.uint64)
    for trial in range(trials):
        _stream(seed, np.int64(index0 + trial), s)
        cur = np.int64(u)
        for _ in range(horizon):
            base = indptr[cur]
            deg = indptr[cur + 1] - base
            cur = np.int64(indices[base + _randint(s, deg)])
            if cur == v:
                hits += 1
                break
    return hits


@kernel
def segment_hits(indptr, indices, start, target, length, burn, window, state, visits):
    """Segmented visit experiment for one walk.

    Positions 0..length are cut into complete segments of ``burn + window``
    positions; a segment scores when ``target`` is seen at an in-segment
    offset >= ``burn``. The trailing partial segment is not scored but its
    steps still land in ``visits``. Returns ``(segments, segments_hit)``.
    """
    seg_len = np.int64(burn + window)
    nseg = np.int64((length + 1) // seg_len)
    limit = nseg * seg_len
    cur = np.int64(start)
    nhit = np.int64(0)
    hit = False
    for p in range(0, length + 1):
        if p > 0:
            base = indptr[cur]
            deg = indptr[cur + 1] - base
            cur = np.int64(indices[base + _randint(state, deg)])
        visits[cur] += 1
        if p < limit:
            pos = np.int64(p) % seg_len
            if pos >= burn and cur == target:
                hit = True
            if pos == seg_len - 1:
                if hit:
                    nhit += 1
                hit = False
    return nseg, nhit


# ---------------------------------------------------------------------------
# linear algebra kernels
# ---------------------------------------------------------------------------


@kernel
def adj_matvec(indptr, indices, x, out):
    """out = A @ x for the CSR adjacency structure."""
    n = indptr.size - 1
    for i in range(n):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += x[indices[k]]
        out[i] = acc


@kernel_inner
def _offdiag_sq(A):
    """Frobenius mass off the diagonal, summed from nonnegative terms."""
    n = A.shape[0]
    b = A.copy()
    for i in range(n):
        b[i, i] = 0.0
    return (b * b).sum()


@kernel
def jacobi_eigvalues(A, tol, max_sweeps):
    """Cyclic Jacobi diagonalization of a symmetric matrix, in place.

    Sweeps rotate every off-diagonal pair; after each sweep the off-diagonal
    Frobenius mass is compared against ``tol`` times the full Frobenius norm.
    Eigenvalues accumulate on the diagonal. Returns ``(sweeps, off_norm)``.
    """
    n = A.shape[0]
    fro = np.sqrt((A * A).sum())
    if fro == 0.0:
        return np.int64(0), 0.0
    off = 0.0
    for sweep in range(max_sweeps):
        # sum the off-diagonal squares directly: subtracting the diagonal
        # mass from the total cancels catastrophically once off << fro
        off = np.sqrt(_offdiag_sq(A))
        if off <= tol * fro:
            return np.int64(sweep), off
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                app = A[p, p]
                aqq = A[q, q]
                theta = 0.5 * (aqq - app) / apq
                if theta != 0.0:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(1.0 + theta * theta))
                else:
                    t = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s_ = t * c
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp - s_ * rowq
                A[q, :] = s_ * rowp + c * rowq
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp - s_ * colq
                A[:, q] = s_ * colp + c * colq
                # closed forms beat the doubly-rotated slots for roundoff
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
    off = np.sqrt(_offdiag_sq(A))
    return np.int64(max_sweeps), off


# ---------------------------------------------------------------------------
# Hamiltonicity kernels
# ---------------------------------------------------------------------------


@kernel
def posa_cycle(indptr, indices, n, state, max_rotations, max_restarts, path, pos):
    """Randomized rotation-extension search for a Hamilton cycle.

    Grows a path from a random start, extending with a uniformly chosen
    unvisited neighbor of the endpoint; when stuck, rotates about a uniform
    eligible anchor (a neighbor of the endpoint sitting at path position
    <= len - 3) and keeps going. A full path that closes into a cycle wins.
    Budgets: ``max_rotations`` per restart, ``max_restarts`` fresh starts.

    ``path`` (int64[n]) receives the cycle order on success; ``pos`` is
    int64[n] scratch. Returns ``(status, rotations, restarts)`` where status
    is 1 on success, 0 when the budget ran out.
    """
    if n < 3:
        return np.int64(0), np.int64(0), np.int64(0)
    total_rot = np.int64(0)
    for restart in range(max_restarts):
        for v in range(n):
            pos[v] = -1
        first = _randint(state, np.int64(n))
        path[0] = first
        pos[first] = 0
        plen = np.int64(1)
        rot = np.int64(0)
        while rot < max_rotations:
            end = path[plen - 1]
            base = indptr[end]
            deg = indptr[end + 1] - base
            fresh = np.int64(0)
            for k in range(deg):
                if pos[indices[base + k]] < 0:
                    fresh += 1
            if fresh > 0:
                pick = _randint(state, fresh)
                nxt = np.int64(-1)
                c = np.int64(0)
                for k in range(deg):
                    w = np.int64(indices[base + k])
                    if pos[w] < 0:
                        if c == pick:
                            nxt = w
                            break
                        c += 1
                path[plen] = nxt
                pos[nxt] = plen
                plen += 1
                continue
            if plen == n:
                for k in range(deg):
                    if np.int64(indices[base + k]) == path[0]:
                        return np.int64(1), total_rot + rot, np.int64(restart)
            eligible = np.int64(0)
            for k in range(deg):
                i = pos[np.int64(indices[base + k])]
                if 0 <= i and i <= plen - 3:
                    eligible += 1
            if eligible == 0:
                break
            pick = _randint(state, eligible)
            anchor = np.int64(-1)
            c = np.int64(0)
            for k in range(deg):
                i = pos[np.int64(indices[base + k])]
                if 0 <= i and i <= plen - 3:
                    if c == pick:
                        anchor = i
                        break
                    c += 1
            lo = anchor + 1
            hi = plen - 1
            while lo < hi:
                a = path[lo]
                b = path[hi]
                path[lo] = b
                path[hi] = a
                pos[b] = lo
                pos[a] = hi
                lo += 1
                hi -= 1
            rot += 1
        total_rot += rot
    return np.int64(0), total_rot, np.int64(max_restarts)


@kernel
def ham_dp(nbr, n, dp):
    """Held-Karp endpoint bitsets over all vertex subsets containing 0.

    ``nbr[v]`` is the int64 adjacency bitmask of v; ``dp`` a zeroed
    uint32[2**n] table. After the run, bit v of ``dp[mask]`` says a
    spanning path of ``mask`` from vertex 0 to v exists. Returns
    ``dp[full]``.
    """
    dp[1] = np.uint32(1)
    full = (np.int64(1) << np.int64(n)) - 1
    for mask in range(3, full + 1, 2):
        acc = np.uint32(0)
        bits = np.int64(mask) >> 1
        v = np.int64(1)
        while bits != 0:
            if bits & 1:
                prev = np.int64(mask) ^ (np.int64(1) << v)
                if (np.int64(dp[prev]) & nbr[v]) != 0:
                    acc |= np.uint32(np.int64(1) << v)
            bits >>= 1
            v += 1
        dp[mask] = acc
    return dp[full]


# ---------------------------------------------------------------------------
# exact expander-mixing sweeps (n <= 16)
# ---------------------------------------------------------------------------


@kernel
def subset_edge_counts(nbr, n, pop, e):
    """Fill e[S] = number of edges inside S, for every subset mask S.

    Peels the lowest vertex v of S: e[S] = e[S - v] + |N(v) & (S - v)|.
    ``pop`` is a 16-bit popcount table.
    """
    top = np.int64(1) << np.int64(n)
    for m in range(1, top):
        low = np.int64(m) & (-np.int64(m))
        v = np.int64(0)
        while ((low >> v) & 1) == 0:
            v += 1
        rest = np.int64(m) ^ low
        x = nbr[v] & rest
        e[m] = e[rest] + pop[x & 0xFFFF] + pop[(x >> 16) & 0xFFFF]


@kernel
def pair_mixing_scan(nbr, n, d, lam, pop, e, slack):
    """Exhaustive two-set mixing scan over unordered disjoint pairs.

    For each disjoint S, T the crossing count e(S,T) = e[S|T] - e[S] - e[T]
    is compared against d|S||T|/n with allowance lam * sqrt(|S||T|).
    Returns ``(max_ratio, violations)`` where ratio is deviation over
    allowance and a violation means deviation > allowance + slack.
    """
    full = (np.int64(1) << np.int64(n)) - 1
    maxr = 0.0
    viol = np.int64(0)
    for S in range(1, full + 1):
        s = pop[S & 0xFFFF] + pop[(S >> 16) & 0xFFFF]
        comp = full ^ np.int64(S)
        T = comp
        while T != 0:
            if S < T:
                t = pop[T & 0xFFFF] + pop[(T >> 16) & 0xFFFF]
                joint = np.int64(S) | T
                est = e[joint] - e[S] - e[T]
                expect = np.float64(d * s * t) / np.float64(n)
                allow = lam * np.sqrt(np.float64(s * t))
                dev = abs(np.float64(est) - expect)
                if allow > 0.0:
                    r = dev / allow
                    if r > maxr:
                        maxr = r
                    if dev > allow + slack:
                        viol += 1
                elif dev > slack:
                    viol += 1
            T = (T - 1) & comp
    return maxr, viol
