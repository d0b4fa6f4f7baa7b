"""Seeded random walks and the measurements built on them.

Every operation takes a master seed and derives one RNG stream per trial
from ``(seed, trial_index)``, so results are reproducible for any worker
count and trials can run in any order. Auxiliary draws (start pools) use
stream indices offset by ``AUX_STREAM`` and never collide with trials.

Visit counts include the starting position: a length-L walk distributes
L + 1 visits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as K
from .bounds import exact_binomial_ci
from .graphs import Graph, GraphError, connectivity_profile

AUX_STREAM = K.AUX_STREAM

# sample size for start pools on graphs too large to enumerate every start
START_POOL_SAMPLE = 32


def _check_start(g: Graph, start: int) -> None:
    if not (0 <= start < g.n):
        raise GraphError("start out of range")
    if g.n > 1 and g.degree(start) == 0:
        raise GraphError("start vertex is isolated")


def _require_connected(g: Graph) -> None:
    connected, _ = connectivity_profile(g)
    if not connected:
        raise GraphError("walk statistics need a connected graph")


def default_budget(n: int) -> int:
    """Step budget that cover experiments fall back to: 500 n max(1, ln n)."""
    return int(math.ceil(500.0 * n * max(1.0, math.log(max(n, 2)))))


def start_pool(g: Graph, seed: int, limit: int = 200,
               sample: int = START_POOL_SAMPLE) -> tuple[int, ...]:
    """Deterministic pool of start vertices: everything when n <= limit,
    otherwise a seeded sample without replacement (auxiliary stream)."""
    if g.n <= limit:
        return tuple(range(g.n))
    order = np.arange(g.n, dtype=np.int64)
    state = K.stream_state(seed, AUX_STREAM)
    K.shuffle_ints(order, state)
    return tuple(int(v) for v in order[:sample])


# ---------------------------------------------------------------------------
# single-walk trace
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WalkTrace:
    """One finished walk: counts, first-visit steps, and the trace edges.

    Edge arrays are in first-traversal order, endpoints low-first; the
    vertex sequence itself is not retained (the trace and the counts are
    what the downstream analyses consume).
    """

    n: int
    start: int
    length: int
    seed: int
    stream: int
    visit_counts: np.ndarray
    first_visit_step: np.ndarray
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_step: np.ndarray

    @property
    def covered(self) -> bool:
        return bool((self.first_visit_step >= 0).all())

    @property
    def cover_step(self) -> int | None:
        if not self.covered:
            return None
        return int(self.first_visit_step.max())

    @property
    def edge_count(self) -> int:
        return int(self.edge_u.size)


def simulate_walk(g: Graph, start: int, length: int, seed: int, stream: int = 0) -> WalkTrace:
    """Run one walk of ``length`` steps from ``start`` on stream
    ``(seed, stream)`` and record its trace."""
    _check_start(g, start)
    if length < 0:
        raise GraphError("length must be >= 0")
    n = g.n
    if n == 1:
        if length > 0:
            raise GraphError("cannot step on a single-vertex graph")
        return WalkTrace(
            n=1, start=start, length=0, seed=seed, stream=stream,
            visit_counts=np.ones(1, dtype=np.int64),
            first_visit_step=np.zeros(1, dtype=np.int64),
            edge_u=np.empty(0, dtype=np.int32), edge_v=np.empty(0, dtype=np.int32),
            edge_step=np.empty(0, dtype=np.int64),
        )
    m = g.edge_count
    visits = np.zeros(n, dtype=np.int64)
    first = np.full(n, -1, dtype=np.int64)
    cap = min(length, m) + 1
    edge_u = np.empty(cap, dtype=np.int32)
    edge_v = np.empty(cap, dtype=np.int32)
    edge_step = np.empty(cap, dtype=np.int64)
    seen = np.zeros(m, dtype=np.uint8)
    state = K.stream_state(seed, stream)
    ne = int(K.walk_trace(g.indptr, g.indices, g.csr_edge_ids(),
                          np.int64(start), np.int64(length), state,
                          visits, first, edge_u, edge_v, edge_step, seen))
    return WalkTrace(
        n=n, start=start, length=length, seed=seed, stream=stream,
        visit_counts=visits, first_visit_step=first,
        edge_u=edge_u[:ne].copy(), edge_v=edge_v[:ne].copy(),
        edge_step=edge_step[:ne].copy(),
    )


def trace_graph(trace: WalkTrace) -> Graph:
    """The undirected graph of edges the walk actually used."""
    return Graph.from_edges(trace.n, zip(trace.edge_u.tolist(), trace.edge_v.tolist()))


def trace_prefix_graph(trace: WalkTrace, upto_step: int) -> Graph:
    """Trace restricted to edges first used at or before ``upto_step``."""
    keep = trace.edge_step <= upto_step
    return Graph.from_edges(
        trace.n, zip(trace.edge_u[keep].tolist(), trace.edge_v[keep].tolist()))


def min_visit_ratio(trace: WalkTrace) -> float:
    """min_v visits(v) / ln n, the load-balance figure; 0 when uncovered."""
    if trace.n < 2:
        raise GraphError("ratio needs n >= 2")
    if not trace.covered:
        return 0.0
    return float(trace.visit_counts.min()) / math.log(trace.n)


# ---------------------------------------------------------------------------
# per-trial primitives (unit index == stream index)
# ---------------------------------------------------------------------------


def cover_trial(g: Graph, seed: int, unit: int, budget: int | None = None,
                start: int | None = None) -> tuple[int, int]:
    """One cover trial on stream ``(seed, unit)``.

    Draws the start uniformly from the stream when ``start`` is None.
    Returns ``(start, cover_step)`` with -1 for a censored trial. Capping
    ``budget`` at a fixed walk length turns this into a strong-cover trial.
    """
    if budget is None:
        budget = default_budget(g.n)
    state = K.stream_state(seed, unit)
    if start is None:
        with np.errstate(over="ignore"):
            start = int(K._randint(state, np.int64(g.n)))
    else:
        _check_start(g, start)
    visits = np.zeros(g.n, dtype=np.int64)
    cover, _, _ = K.walk_stats(g.indptr, g.indices, np.int64(start), np.int64(budget),
                               0.0, np.int64(1), state, visits)
    return start, int(cover)


def blanket_trial(g: Graph, seed: int, unit: int, delta: float,
                  budget: int | None = None, start: int | None = None
                  ) -> tuple[int, int, int]:
    """One blanket trial on stream ``(seed, unit)``; returns
    ``(start, cover_step, blanket_step)``, -1 where the budget hit first."""
    if not (0.0 < delta < 1.0):
        raise GraphError("delta must be in (0, 1)")
    if budget is None:
        budget = 4 * default_budget(g.n)
    state = K.stream_state(seed, unit)
    if start is None:
        with np.errstate(over="ignore"):
            start = int(K._randint(state, np.int64(g.n)))
    else:
        _check_start(g, start)
    visits = np.zeros(g.n, dtype=np.int64)
    cover, blanket, _ = K.walk_stats(g.indptr, g.indices, np.int64(start),
                                     np.int64(budget), float(delta), np.int64(2),
                                     state, visits)
    return start, int(cover), int(blanket)


def visits_trial(g: Graph, seed: int, unit: int, length: int,
                 start: int | None = None) -> tuple[int, bool, int, float]:
    """One fixed-length walk on stream ``(seed, unit)``; returns
    ``(start, covered, min_visits, min_visits / ln n)`` with ratio 0 when
    the walk failed to cover."""
    if length < 0:
        raise GraphError("length must be >= 0")
    state = K.stream_state(seed, unit)
    if start is None:
        with np.errstate(over="ignore"):
            start = int(K._randint(state, np.int64(g.n)))
    else:
        _check_start(g, start)
    visits = np.zeros(g.n, dtype=np.int64)
    cover, _, _ = K.walk_stats(g.indptr, g.indices, np.int64(start), np.int64(length),
                               0.0, np.int64(0), state, visits)
    covered = bool(cover >= 0)
    mn = int(visits.min())
    ratio = (mn / math.log(g.n)) if covered and g.n >= 2 else 0.0
    return start, covered, mn, ratio


def return_probe_trial(g: Graph, seed: int, unit: int, u: int, v: int,
                       horizon: int) -> int:
    """One hit-within-horizon trial on stream ``(seed, unit)``: 1 when the
    walk from u touches v within ``horizon`` steps."""
    _check_start(g, u)
    if g.n == 1:
        raise GraphError("return probe needs at least two vertices")
    if not (0 <= v < g.n):
        raise GraphError("vertex out of range")
    if horizon < 1:
        raise GraphError("horizon must be >= 1")
    return int(K.hit_within_count(g.indptr, g.indices, np.int64(u), np.int64(v),
                                  np.int64(horizon), np.int64(1),
                                  np.uint64(seed & K.MASK64), np.int64(unit)))


# ---------------------------------------------------------------------------
# cover-time estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverSummary:
    """Per-trial cover steps plus the usual aggregates.

    ``cover_steps`` holds -1 for censored trials (budget hit first); the
    aggregates ignore those but ``censored`` counts them. In worst-start
    mode the trials field is per start, rows are ordered pool-major, and
    the worst (largest) per-start mean is reported alongside its vertex.
    """

    trials: int
    budget: int
    seed: int
    worst_start_mode: bool
    pool: tuple[int, ...]
    starts: np.ndarray
    cover_steps: np.ndarray
    censored: int
    mean: float
    stderr: float
    smallest: int
    largest: int
    per_start_mean: dict[int, float] | None
    worst_start: int | None
    worst_mean: float | None


def _aggregate(values: np.ndarray) -> tuple[float, float, int, int]:
    if values.size == 0:
        return math.nan, math.nan, -1, -1
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return mean, stderr, int(values.min()), int(values.max())


def cover_time_empirical(g: Graph, trials: int, seed: int, worst_start: bool = False,
                         start: int | None = None, budget: int | None = None,
                         sample_starts: int = START_POOL_SAMPLE) -> CoverSummary:
    """Monte Carlo cover times.

    Default mode: ``trials`` walks, each from its own uniformly drawn start
    (or the fixed ``start`` if given), trial i on stream ``(seed, i)``.
    Worst-start mode: ``trials`` walks from every pool vertex; the pool is
    every vertex up to n = 200 and a 32-vertex seeded sample beyond; walk
    for pool slot j, repeat k runs on stream ``(seed, j * trials + k)``.
    """
    if trials < 1:
        raise GraphError("trials must be >= 1")
    _require_connected(g)
    n = g.n
    if budget is None:
        budget = default_budget(n)
    if worst_start:
        pool = start_pool(g, seed, sample=sample_starts)
        units = len(pool) * trials
    else:
        pool = ()
        units = trials
    starts = np.empty(units, dtype=np.int64)
    steps = np.empty(units, dtype=np.int64)
    for unit in range(units):
        v = pool[unit // trials] if worst_start else start
        starts[unit], steps[unit] = cover_trial(g, seed, unit, budget=budget, start=v)
    uncensored = steps[steps >= 0]
    mean, stderr, smallest, largest = _aggregate(uncensored)
    per_start = None
    worst_v = None
    worst_mean = None
    if worst_start:
        per_start = {}
        for j, v in enumerate(pool):
            block = steps[j * trials:(j + 1) * trials]
            good = block[block >= 0]
            per_start[v] = float(good.mean()) if good.size else math.nan
        # fully censored starts rank worst; ties break on vertex id
        def _rank(v: int):
            m = per_start[v]
            return (math.inf if math.isnan(m) else m, v)
        worst_v = max(per_start, key=_rank)
        worst_mean = per_start[worst_v]
    return CoverSummary(
        trials=trials, budget=budget, seed=seed, worst_start_mode=worst_start,
        pool=pool, starts=starts, cover_steps=steps,
        censored=int((steps < 0).sum()), mean=mean, stderr=stderr,
        smallest=smallest, largest=largest, per_start_mean=per_start,
        worst_start=worst_v, worst_mean=worst_mean,
    )


@dataclass(frozen=True)
class StrongCoverEstimate:
    """Fraction of fixed-length walks that covered the whole graph."""

    length: int
    trials: int
    seed: int
    pool: tuple[int, ...]
    starts: np.ndarray
    cover_steps: np.ndarray
    covered: int
    fraction: float
    ci_low: float
    ci_high: float
    ci_level: float


def strong_cover_estimate(g: Graph, length: int, trials: int, seed: int,
                          ci_level: float = 0.95) -> StrongCoverEstimate:
    """Estimate P(walk of ``length`` steps covers G), round-robin over the
    start pool, one stream per trial."""
    if trials < 1:
        raise GraphError("trials must be >= 1")
    if length < 0:
        raise GraphError("length must be >= 0")
    _require_connected(g)
    pool = start_pool(g, seed)
    starts = np.empty(trials, dtype=np.int64)
    steps = np.empty(trials, dtype=np.int64)
    for trial in range(trials):
        v = pool[trial % len(pool)]
        starts[trial], steps[trial] = cover_trial(g, seed, trial, budget=length, start=v)
    covered = int((steps >= 0).sum())
    lo, hi = exact_binomial_ci(covered, trials, ci_level)
    return StrongCoverEstimate(
        length=length, trials=trials, seed=seed, pool=pool,
        starts=starts, cover_steps=steps, covered=covered,
        fraction=covered / trials, ci_low=lo, ci_high=hi, ci_level=ci_level,
    )


# ---------------------------------------------------------------------------
# blanket times
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlanketResult:
    delta: float
    start: int
    cover_step: int | None
    blanket_step: int | None
    censored: bool
    steps: int


def blanket_time(g: Graph, start: int, delta: float, seed: int,
                 budget: int | None = None, stream: int = 0) -> BlanketResult:
    """First step t >= cover time with min_v visits >= delta * t / n.

    The condition is checked at every step from the cover step on, so the
    returned step is exact for this sample path; ``censored`` means the
    budget ran out first.
    """
    if not (0.0 < delta < 1.0):
        raise GraphError("delta must be in (0, 1)")
    _check_start(g, start)
    _require_connected(g)
    if budget is None:
        budget = 4 * default_budget(g.n)
    state = K.stream_state(seed, stream)
    visits = np.zeros(g.n, dtype=np.int64)
    cover, blanket, steps = K.walk_stats(
        g.indptr, g.indices, np.int64(start), np.int64(budget),
        float(delta), np.int64(2), state, visits)
    return BlanketResult(
        delta=delta, start=start,
        cover_step=None if cover < 0 else int(cover),
        blanket_step=None if blanket < 0 else int(blanket),
        censored=blanket < 0, steps=int(steps),
    )


@dataclass(frozen=True)
class CoverStats:
    """Cover step, blanket steps per delta, and visit-count extremes of a
    single fixed-length walk."""

    start: int
    length: int
    cover_step: int | None
    blanket_steps: dict[float, int | None]
    min_visits: int
    max_visits: int
    min_visit_ratio: float


def cover_stats(g: Graph, start: int, length: int, seed: int,
                deltas: Sequence[float] = (0.1,), stream: int = 0) -> CoverStats:
    """Walk ``length`` steps once and report cover/blanket/visit statistics.

    The same stream is replayed once per delta (the kernel tracks a single
    blanket threshold per pass), so all numbers describe one sample path.
    """
    _check_start(g, start)
    if length < 0:
        raise GraphError("length must be >= 0")
    for delta in deltas:
        if not (0.0 < delta < 1.0):
            raise GraphError("delta must be in (0, 1)")
    blankets: dict[float, int | None] = {}
    cover = -1
    visits = np.zeros(g.n, dtype=np.int64)
    for delta in deltas:
        visits[:] = 0
        state = K.stream_state(seed, stream)
        cover, blanket, _ = K.walk_stats(
            g.indptr, g.indices, np.int64(start), np.int64(length),
            float(delta), np.int64(0), state, visits)
        blankets[float(delta)] = None if blanket < 0 else int(blanket)
    if not deltas:
        visits[:] = 0
        state = K.stream_state(seed, stream)
        cover, _, _ = K.walk_stats(
            g.indptr, g.indices, np.int64(start), np.int64(length),
            0.0, np.int64(0), state, visits)
    mn = int(visits.min())
    ratio = 0.0
    if cover >= 0 and g.n >= 2:
        ratio = mn / math.log(g.n)
    return CoverStats(
        start=start, length=length,
        cover_step=None if cover < 0 else int(cover),
        blanket_steps=blankets, min_visits=mn, max_visits=int(visits.max()),
        min_visit_ratio=ratio,
    )


# ---------------------------------------------------------------------------
# return probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReturnProbeResult:
    u: int
    v: int
    horizon: int
    trials: int
    hits: int
    estimate: float
    ci_low: float
    ci_high: float
    ci_level: float


def return_probe(g: Graph, u: int, v: int, horizon: int, trials: int, seed: int,
                 ci_level: float = 0.95) -> ReturnProbeResult:
    """Fraction of ``horizon``-step walks from u that touch v, with an exact
    binomial confidence interval. Trial i runs on stream ``(seed, i)``."""
    _check_start(g, u)
    if g.n == 1:
        raise GraphError("return probe needs at least two vertices")
    if not (0 <= v < g.n):
        raise GraphError("vertex out of range")
    if horizon < 1:
        raise GraphError("horizon must be >= 1")
    if trials < 1:
        raise GraphError("trials must be >= 1")
    hits = int(K.hit_within_count(g.indptr, g.indices, np.int64(u), np.int64(v),
                                  np.int64(horizon), np.int64(trials),
                                  np.uint64(seed & K.MASK64), np.int64(0)))
    lo, hi = exact_binomial_ci(hits, trials, ci_level)
    return ReturnProbeResult(
        u=u, v=v, horizon=horizon, trials=trials, hits=hits,
        estimate=hits / trials, ci_low=lo, ci_high=hi, ci_level=ci_level,
    )


# ---------------------------------------------------------------------------
# segmented visit experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SegmentedVisitReport:
    """Pooled segment-hit statistics across trials.

    Each trial draws its own start and target from its stream, walks
    ``length`` steps, and scores one hit per segment whose post-burn-in
    window touches the target. ``rho_values`` holds min-visits / ln n per
    trial (0 when that walk did not cover).
    """

    length: int
    trials: int
    seed: int
    c: float
    window: int
    burn_in: int
    segments_per_trial: int
    total_segments: int
    total_hits: int
    hit_frequency: float
    ci_low: float
    ci_high: float
    ci_level: float
    starts: np.ndarray
    targets: np.ndarray
    segment_hits: np.ndarray
    rho_values: np.ndarray


def segmented_visit_experiment(g: Graph, length: int, c: float, trials: int,
                               seed: int, ci_level: float = 0.95) -> SegmentedVisitReport:
    """Cut walks into burn-in + window segments and count window visits.

    Window T = round(n / sqrt(c)) and burn-in ceil(10 ln n); positions
    0..length are split into complete segments of T + burn-in. The pooled
    per-segment hit frequency estimates the single-window visit
    probability, the quantity the (1 - eps)/sqrt(c) floor speaks to.
    """
    if c < 1.0:
        raise GraphError("c must be >= 1")
    if trials < 1:
        raise GraphError("trials must be >= 1")
    _require_connected(g)
    n = g.n
    if n < 2:
        raise GraphError("need n >= 2")
    window = max(1, int(round(n / math.sqrt(c))))
    burn = int(math.ceil(10.0 * math.log(n)))
    seg_len = window + burn
    if length + 1 < seg_len:
        raise GraphError(f"length {length} shorter than one segment ({seg_len})")
    nseg_expected = (length + 1) // seg_len
    starts = np.empty(trials, dtype=np.int64)
    targets = np.empty(trials, dtype=np.int64)
    seg_hits = np.empty(trials, dtype=np.int64)
    rho = np.empty(trials, dtype=np.float64)
    visits = np.zeros(n, dtype=np.int64)
    logn = math.log(n)
    for trial in range(trials):
        state = K.stream_state(seed, trial)
        with np.errstate(over="ignore"):
            u = int(K._randint(state, np.int64(n)))
            v = int(K._randint(state, np.int64(n)))
        visits[:] = 0
        nseg, nhit = K.segment_hits(g.indptr, g.indices, np.int64(u), np.int64(v),
                                    np.int64(length), np.int64(burn), np.int64(window),
                                    state, visits)
        starts[trial] = u
        targets[trial] = v
        seg_hits[trial] = nhit
        mn = int(visits.min())
        rho[trial] = (mn / logn) if mn > 0 else 0.0
    total_segments = int(nseg_expected) * trials
    total_hits = int(seg_hits.sum())
    lo, hi = exact_binomial_ci(total_hits, total_segments, ci_level)
    return SegmentedVisitReport(
        length=length, trials=trials, seed=seed, c=c,
        window=window, burn_in=burn, segments_per_trial=int(nseg_expected),
        total_segments=total_segments, total_hits=total_hits,
        hit_frequency=total_hits / total_segments,
        ci_low=lo, ci_high=hi, ci_level=ci_level,
        starts=starts, targets=targets, segment_hits=seg_hits, rho_values=rho,
    )
