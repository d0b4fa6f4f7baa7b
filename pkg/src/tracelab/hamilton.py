"""Expansion certificates and Hamiltonicity: exhaustive and sampled
expander checks, an exact cycle decision for small graphs, a randomized
rotation-extension search, and the two trace thresholds (first time every
vertex touches an edge, first time the trace turns Hamiltonian).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import _accel
from . import _kernels as K
from .bounds import BudgetError
from .graphs import Graph, GraphError, connectivity_profile
from .walks import WalkTrace, simulate_walk, trace_graph, trace_prefix_graph

_DP_LIMIT = 24


class HamiltonError(RuntimeError):
    """Internal consistency failure in a cycle search."""


# ---------------------------------------------------------------------------
# expansion / joinedness certification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpanderCheck:
    """Result of one certification sweep.

    ``witness`` is a violating set (or pair of sets) when ``passed`` is
    False; re-validating it needs nothing but the graph. ``exhaustive``
    distinguishes a proof (every candidate examined) from sampled evidence.
    """

    kind: str
    c: float
    passed: bool
    mode: str
    set_size: int
    checked: int
    exhaustive: bool
    witness: tuple | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind, "c": self.c, "passed": self.passed,
            "mode": self.mode, "set_size": self.set_size,
            "checked": self.checked, "exhaustive": self.exhaustive,
            "witness": self.witness,
        }


def _bitmask_neighbors(g: Graph) -> list[int]:
    out = []
    for v in range(g.n):
        acc = 0
        for w in g.neighbors(v):
            acc |= 1 << int(w)
        out.append(acc)
    return out


def _mask_of(vertices) -> int:
    acc = 0
    for v in vertices:
        acc |= 1 << int(v)
    return acc


def check_expansion(g: Graph, c: float, mode: str = "exact", samples: int = 64,
                    seed: int = 0, budget: int = 2_000_000) -> ExpanderCheck:
    """Check |N(X)| >= c |X| for vertex sets up to size floor(n / (2c)).

    Exact mode enumerates every candidate set (and is a proof when it
    passes); the enumeration size is pre-checked against ``budget``.
    Sampled mode draws ``samples`` sets per size from stream ``(seed, 0)``.
    The first violation stops the sweep and is returned as the witness.
    """
    if c < 1.0:
        raise GraphError("c must be >= 1")
    n = g.n
    cap = int(math.floor(n / (2.0 * c)))
    nbr = _bitmask_neighbors(g)
    if mode == "exact":
        total = sum(math.comb(n, s) for s in range(1, cap + 1))
        if total > budget:
            raise BudgetError(
                f"exact expansion sweep needs {total} sets (budget {budget}); use sampled mode")
        checked = 0
        for s in range(1, cap + 1):
            need = c * s
            for combo in itertools.combinations(range(n), s):
                checked += 1
                xmask = _mask_of(combo)
                union = 0
                for v in combo:
                    union |= nbr[v]
                if (union & ~xmask).bit_count() < need:
                    return ExpanderCheck(kind="expansion", c=c, passed=False,
                                         mode="exact", set_size=cap, checked=checked,
                                         exhaustive=False, witness=combo)
        return ExpanderCheck(kind="expansion", c=c, passed=True, mode="exact",
                             set_size=cap, checked=checked, exhaustive=True,
                             witness=None)
    if mode != "sampled":
        raise GraphError(f"unknown mode {mode!r}")
    if samples < 1:
        raise GraphError("samples must be >= 1")
    state = K.stream_state(seed, 0)
    order = np.arange(n, dtype=np.int64)
    checked = 0
    for s in range(1, cap + 1):
        need = c * s
        for _ in range(samples):
            K.shuffle_ints(order, state)
            combo = tuple(sorted(int(v) for v in order[:s]))
            checked += 1
            xmask = _mask_of(combo)
            union = 0
            for v in combo:
                union |= nbr[v]
            if (union & ~xmask).bit_count() < need:
                return ExpanderCheck(kind="expansion", c=c, passed=False,
                                     mode="sampled", set_size=cap, checked=checked,
                                     exhaustive=False, witness=combo)
    return ExpanderCheck(kind="expansion", c=c, passed=True, mode="sampled",
                         set_size=cap, checked=checked, exhaustive=False,
                         witness=None)


def check_joinedness(g: Graph, c: float, mode: str = "exact", samples: int = 64,
                     seed: int = 0, budget: int = 2_000_000) -> ExpanderCheck:
    """Check that every two disjoint vertex sets of the target size touch.

    Exact mode uses size floor(n / (2c)) (the largest size the definition
    constrains) and enumerates unordered disjoint pairs; sampled mode uses
    size ceil(n / (2c)) and draws ``samples`` disjoint pairs per call.
    A missing edge between some pair is returned as the witness.
    """
    if c < 1.0:
        raise GraphError("c must be >= 1")
    n = g.n
    nbr = _bitmask_neighbors(g)
    if mode == "exact":
        size = int(math.floor(n / (2.0 * c)))
        if size < 1:
            return ExpanderCheck(kind="joinedness", c=c, passed=True, mode="exact",
                                 set_size=0, checked=0, exhaustive=True, witness=None)
        total = math.comb(n, size) * math.comb(n - size, size) // 2
        if total > budget:
            raise BudgetError(
                f"exact joinedness sweep needs {total} pairs (budget {budget}); use sampled mode")
        checked = 0
        for a in itertools.combinations(range(n), size):
            amask = _mask_of(a)
            union = 0
            for v in a:
                union |= nbr[v]
            rest = [v for v in range(n) if not (amask >> v) & 1]
            for b in itertools.combinations(rest, size):
                if b[0] < a[0]:
                    continue
                checked += 1
                if union & _mask_of(b) == 0:
                    return ExpanderCheck(kind="joinedness", c=c, passed=False,
                                         mode="exact", set_size=size, checked=checked,
                                         exhaustive=False, witness=(a, b))
        return ExpanderCheck(kind="joinedness", c=c, passed=True, mode="exact",
                             set_size=size, checked=checked, exhaustive=True,
                             witness=None)
    if mode != "sampled":
        raise GraphError(f"unknown mode {mode!r}")
    if samples < 1:
        raise GraphError("samples must be >= 1")
    size = int(math.ceil(n / (2.0 * c)))
    if 2 * size > n:
        raise GraphError("cannot draw two disjoint sets of that size")
    state = K.stream_state(seed, 0)
    order = np.arange(n, dtype=np.int64)
    checked = 0
    for _ in range(samples):
        K.shuffle_ints(order, state)
        a = tuple(sorted(int(v) for v in order[:size]))
        b = tuple(sorted(int(v) for v in order[size:2 * size]))
        checked += 1
        union = 0
        for v in a:
            union |= nbr[v]
        if union & _mask_of(b) == 0:
            return ExpanderCheck(kind="joinedness", c=c, passed=False,
                                 mode="sampled", set_size=size, checked=checked,
                                 exhaustive=False, witness=(a, b))
    return ExpanderCheck(kind="joinedness", c=c, passed=True, mode="sampled",
                         set_size=size, checked=checked, exhaustive=False,
                         witness=None)


@dataclass(frozen=True)
class ExpanderCertificate:
    c: float
    expansion: ExpanderCheck
    joinedness: ExpanderCheck

    @property
    def certified(self) -> bool:
        return self.expansion.passed and self.joinedness.passed

    def to_dict(self) -> dict[str, Any]:
        return {
            "c": self.c, "certified": self.certified,
            "expansion": self.expansion.to_dict(),
            "joinedness": self.joinedness.to_dict(),
        }


def certify_expander(g: Graph, c: float, mode: str = "exact", samples: int = 64,
                     seed: int = 0, budget: int = 2_000_000) -> ExpanderCertificate:
    """Run both expander checks at parameter ``c``."""
    return ExpanderCertificate(
        c=c,
        expansion=check_expansion(g, c, mode=mode, samples=samples, seed=seed, budget=budget),
        joinedness=check_joinedness(g, c, mode=mode, samples=samples, seed=seed, budget=budget),
    )


# ---------------------------------------------------------------------------
# exact Hamiltonicity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CycleResult:
    """Outcome of a cycle search.

    ``status`` is "found" (cycle attached, verified), "proven-absent"
    (exhaustive methods only), or "budget-exhausted". ``work`` reports
    method-specific effort counters.
    """

    status: str
    cycle: tuple[int, ...] | None
    method: str
    work: dict[str, int]

    @property
    def found(self) -> bool:
        return self.status == "found"

    def to_dict(self) -> dict[str, Any]:
        return {"status": self.status, "method": self.method,
                "cycle": None if self.cycle is None else list(self.cycle),
                "work": dict(self.work)}


def verify_cycle(g: Graph, cycle: Sequence[int]) -> bool:
    """Is ``cycle`` a Hamilton cycle of g (every vertex once, edges real)?"""
    seq = [int(v) for v in cycle]
    if len(seq) != g.n or g.n < 3:
        return False
    if any(not (0 <= v < g.n) for v in seq):
        return False
    if len(set(seq)) != g.n:
        return False
    return all(g.has_edge(seq[i], seq[(i + 1) % g.n]) for i in range(g.n))


def _ham_dp_numpy(nbr: np.ndarray, n: int) -> np.ndarray:
    """Interpreted twin of the subset DP: layer the odd masks by popcount
    and push endpoint bitsets one vertex at a time."""
    size = 1 << n
    dp = np.zeros(size, dtype=np.uint32)
    dp[1] = 1
    masks = np.arange(size, dtype=np.uint32)
    pc = masks - ((masks >> np.uint32(1)) & np.uint32(0x55555555))
    pc = (pc & np.uint32(0x33333333)) + ((pc >> np.uint32(2)) & np.uint32(0x33333333))
    pc = (pc + (pc >> np.uint32(4))) & np.uint32(0x0F0F0F0F)
    pc = ((pc * np.uint32(0x01010101)) >> np.uint32(24)).astype(np.int64)
    odd = np.arange(1, size, 2, dtype=np.int64)
    odd_pc = pc[odd]
    for layer in range(2, n + 1):
        lm = odd[odd_pc == layer]
        if lm.size == 0:
            continue
        for v in range(1, n):
            bit = np.int64(1) << v
            mv = lm[(lm & bit) != 0]
            if mv.size == 0:
                continue
            prev = mv ^ bit
            ok = (dp[prev].astype(np.int64) & int(nbr[v])) != 0
            dp[mv[ok]] |= np.uint32(bit)
    return dp


def _reconstruct_cycle(dp: np.ndarray, nbr: np.ndarray, n: int) -> list[int]:
    full = (1 << n) - 1
    closing = int(dp[full]) & int(nbr[0])
    v = (closing & -closing).bit_length() - 1
    seq: list[int] = []
    mask = full
    cur = v
    while mask != 1:
        seq.append(cur)
        prev = mask ^ (1 << cur)
        cand = int(dp[prev]) & int(nbr[cur])
        if cand == 0:
            raise HamiltonError("dp table inconsistent during reconstruction")
        cur = (cand & -cand).bit_length() - 1
        mask = prev
    seq.append(0)
    seq.reverse()
    return seq


def _exact_dp(g: Graph) -> CycleResult:
    n = g.n
    nbr = np.zeros(n, dtype=np.int64)
    for v, mask in enumerate(_bitmask_neighbors(g)):
        nbr[v] = mask
    dp = np.zeros(1 << n, dtype=np.uint32)
    if _accel.NUMBA_ENABLED:
        K.ham_dp(nbr, np.int64(n), dp)
    else:
        dp = _ham_dp_numpy(nbr, n)
    work = {"masks": 1 << (n - 1)}
    if int(dp[(1 << n) - 1]) & int(nbr[0]):
        cycle = _reconstruct_cycle(dp, nbr, n)
        if not verify_cycle(g, cycle):
            raise HamiltonError("reconstructed cycle failed verification")
        return CycleResult(status="found", cycle=tuple(cycle), method="exact", work=work)
    return CycleResult(status="proven-absent", cycle=None, method="exact", work=work)


def _exact_branch_bound(g: Graph, budget: int) -> CycleResult:
    """Depth-first search with degree- and connectivity-based pruning."""
    n = g.n
    by_degree = sorted(range(n), key=lambda v: (g.degree(v), v))
    rank = {v: i for i, v in enumerate(by_degree)}
    adj = [sorted((int(w) for w in g.neighbors(v)), key=lambda w: rank[w])
           for v in range(n)]
    nbrmask = _bitmask_neighbors(g)
    full = (1 << n) - 1

    def feasible(visited: int, end: int) -> bool:
        free = full & ~visited
        if free == 0:
            return True
        # every free vertex still needs two usable slots (free neighbors,
        # the current endpoint, or the cycle anchor 0)
        probe = free
        while probe:
            low = probe & -probe
            v = low.bit_length() - 1
            avail = (nbrmask[v] & free).bit_count()
            if (nbrmask[v] >> end) & 1:
                avail += 1
            if nbrmask[v] & 1:
                avail += 1
            if avail < 2:
                return False
            probe ^= low
        # free vertices plus the endpoint must stay in one piece
        seen = 1 << end
        frontier = [end]
        while frontier:
            x = frontier.pop()
            cand = nbrmask[x] & (free | (1 << end)) & ~seen
            while cand:
                low = cand & -cand
                seen |= low
                frontier.append(low.bit_length() - 1)
                cand ^= low
        return (free & ~seen) == 0

    path = [0]
    visited = 1
    iters = [iter(adj[0])]
    expansions = 0
    while iters:
        if expansions > budget:
            return CycleResult(status="budget-exhausted", cycle=None,
                               method="exact", work={"expansions": expansions})
        moved = False
        for w in iters[-1]:
            if (visited >> w) & 1:
                continue
            expansions += 1
            if len(path) == n - 1:
                if (nbrmask[w] & 1) and verify_cycle(g, path + [w]):
                    return CycleResult(status="found", cycle=tuple(path + [w]),
                                       method="exact", work={"expansions": expansions})
                continue
            if not feasible(visited | (1 << w), w):
                continue
            path.append(w)
            visited |= 1 << w
            iters.append(iter(adj[w]))
            moved = True
            break
        if not moved:
            iters.pop()
            v = path.pop()
            if path:
                visited &= ~(1 << v)
    return CycleResult(status="proven-absent", cycle=None, method="exact",
                       work={"expansions": expansions})


def hamiltonian_exact(g: Graph, method: str = "auto",
                      budget: int = 20_000_000) -> CycleResult:
    """Decide Hamiltonicity exactly.

    Subset DP (complete and budget-free) up to 24 vertices; beyond that a
    pruned depth-first search that may return "budget-exhausted" instead of
    an answer. Disconnected graphs and minimum degree < 2 short-circuit to
    proven-absent.
    """
    n = g.n
    if n < 3:
        return CycleResult(status="proven-absent", cycle=None, method="exact",
                           work={"masks": 0})
    if int(g.degrees.min()) < 2:
        return CycleResult(status="proven-absent", cycle=None, method="exact",
                           work={"masks": 0})
    connected, _ = connectivity_profile(g)
    if not connected:
        return CycleResult(status="proven-absent", cycle=None, method="exact",
                           work={"masks": 0})
    if method == "auto":
        method = "dp" if n <= _DP_LIMIT else "bb"
    if method == "dp":
        if n > _DP_LIMIT:
            raise BudgetError(f"subset dp capped at n = {_DP_LIMIT}")
        return _exact_dp(g)
    if method == "bb":
        return _exact_branch_bound(g, budget)
    raise GraphError(f"unknown method {method!r}")


def hamiltonian_posa(g: Graph, seed: int, max_rotations: int | None = None,
                     max_restarts: int = 50, stream: int = 0) -> CycleResult:
    """Randomized rotation-extension search (find-only, never a proof).

    Defaults: 100 n rotations per restart, 50 restarts. A returned cycle is
    always verified before it leaves this function.
    """
    n = g.n
    if n < 3:
        return CycleResult(status="budget-exhausted", cycle=None, method="posa",
                           work={"rotations": 0, "restarts": 0})
    if max_rotations is None:
        max_rotations = 100 * n
    state = K.stream_state(seed, stream)
    path = np.empty(n, dtype=np.int64)
    pos = np.empty(n, dtype=np.int64)
    status, rotations, restarts = K.posa_cycle(
        g.indptr, g.indices, np.int64(n), state,
        np.int64(max_rotations), np.int64(max_restarts), path, pos)
    work = {"rotations": int(rotations), "restarts": int(restarts)}
    if int(status) == 1:
        cycle = tuple(int(v) for v in path)
        if not verify_cycle(g, cycle):
            raise HamiltonError("search returned a non-cycle")
        return CycleResult(status="found", cycle=cycle, method="posa", work=work)
    return CycleResult(status="budget-exhausted", cycle=None, method="posa", work=work)


# ---------------------------------------------------------------------------
# trace thresholds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TauResult:
    """Edge-touch and Hamiltonicity thresholds of one walk trace.

    ``tau1``: first step after which every vertex meets a trace edge.
    ``tau_hc``: first step whose trace prefix carries a Hamilton cycle;
    exact when the prefix checker proved its answers, otherwise a verified
    upper bound. Censoring means the walk budget ended first.
    """

    start: int
    length: int
    tau1: int | None
    tau_hc: int | None
    exact: bool
    censored: bool
    probes: int

    def to_dict(self) -> dict[str, Any]:
        return {"start": self.start, "length": self.length,
                "tau1": self.tau1, "tau_hc": self.tau_hc,
                "exact": self.exact, "censored": self.censored,
                "probes": self.probes}


def _prefix_hamiltonian(trace: WalkTrace, upto: int, exact: bool, seed: int,
                        probe: int, budget: int | None) -> bool:
    g = trace_prefix_graph(trace, upto)
    if exact:
        return hamiltonian_exact(g).found
    rot = None if budget is None else max(1, budget)
    res = hamiltonian_posa(g, seed, max_rotations=rot,
                           stream=K.AUX_STREAM + probe)
    return res.found


def tau_times(g: Graph, start: int, length: int, seed: int,
              checker_budget: int | None = None) -> TauResult:
    """Both trace thresholds for a single walk of up to ``length`` steps.

    The Hamiltonicity threshold is located by bisection over the recorded
    first-traversal steps (trace prefixes only grow, so the exact predicate
    is monotone). Graphs beyond the exact-checker cap fall back to the
    rotation-extension search per probe; every positive probe is verified,
    so the reported value is a sound upper bound, flagged non-exact.
    """
    trace = simulate_walk(g, start, length, seed, stream=0)
    exact = g.n <= _DP_LIMIT
    if not trace.covered:
        return TauResult(start=start, length=length, tau1=None, tau_hc=None,
                         exact=exact, censored=True, probes=0)
    tau1 = max(int(trace.first_visit_step.max()), 1)
    steps = trace.edge_step
    probes = 0
    if not _prefix_hamiltonian(trace, length, exact, seed, probes, checker_budget):
        return TauResult(start=start, length=length, tau1=tau1, tau_hc=None,
                         exact=exact, censored=True, probes=1)
    probes = 1
    lo, hi = 0, steps.size - 1  # invariant: prefix through steps[hi] is hamiltonian
    while lo < hi:
        mid = (lo + hi) // 2
        probes += 1
        if _prefix_hamiltonian(trace, int(steps[mid]), exact, seed, probes, checker_budget):
            hi = mid
        else:
            lo = mid + 1
    return TauResult(start=start, length=length, tau1=tau1,
                     tau_hc=int(steps[hi]), exact=exact, censored=False,
                     probes=probes)
