"""Dynamic-programming UKP solvers.

All step-off variants share one scan kernel. Items are re-indexed by the
efficiency order of :func:`ukp.core.efficiency_order`, so index 0 is the
best item. ``g[y]`` holds the profit of the retained solution of weight
exactly ``y`` (0 = empty slot) and ``d[y]`` the lowest sorted index inside it.
The scan runs in chunks of ``CHUNK`` capacities so the Python driver can
enforce timeouts between kernel calls.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import (
    Instance,
    InstanceError,
    Solution,
    SolverOutcome,
    Termination,
    check_overflow,
    efficiency_order,
)

CHUNK = 4096
MAX_CAPACITY = 2**31

# stats slots filled by the kernels
_SCANNED, _EXPANDED, _INNER = 0, 1, 2


@dataclass
class StepOffState:
    g: np.ndarray
    d: np.ndarray
    opt: int
    weights: np.ndarray  # in sorted order
    profits: np.ndarray
    order: list[int]  # sorted position -> original index


@njit(cache=True)
def _seed(w, p, g, d, first):
    # lower index wins ties; equal to Algorithm 1 when items are in efficiency order
    for i in range(w.shape[0] - 1, first - 1, -1):
        if p[i] >= g[w[i]]:
            g[w[i]] = p[i]
            d[w[i]] = i


@njit(cache=True)
def _scan(w, p, c, g, d, y, y_end, opt, opt_y, last_nb, first, tiebreak, tso,
          gfdp, wb, pb, w_max, lb, lb_y, stats):
    """Advance the step-off scan over capacities ``y..y_end``.

    Returns ``(next_y, opt, opt_y, last_nb, lb, lb_y, stopped)``.
    """
    while y <= y_end:
        if tso and y > last_nb:
            return y, opt, opt_y, last_nb, lb, lb_y, True
        if gfdp:
            if y % wb == 0:
                ub = g[0] - 1  # g[0] is always 0; keeps ub in g's dtype
                top = min(c, y - 1 + w_max)
                for z in range(y, top + 1):
                    if g[z] > 0:
                        bound = g[z] + (-((-(c - z) * pb) // wb))
                        if bound > ub:
                            ub = bound
                if lb >= ub:
                    return y, opt, opt_y, last_nb, lb, lb_y, True
            fill = g[y] + ((c - y) // wb) * pb
            if fill > lb:
                lb = fill
                lb_y = y
        stats[0] += 1
        gy = g[y]
        if gy <= opt:
            y += 1
            continue
        opt = gy
        opt_y = y
        stats[1] += 1
        for i in range(first, d[y] + 1):
            stats[2] += 1
            ny = y + w[i]
            if ny > c:
                continue
            v = gy + p[i]
            if g[ny] < v:
                g[ny] = v
                d[ny] = i
                if i != 0 and ny > last_nb:
                    last_nb = ny
            elif tiebreak and g[ny] == v and i < d[ny]:
                d[ny] = i
                if i != 0 and ny > last_nb:
                    last_nb = ny
        y += 1
    return y, opt, opt_y, last_nb, lb, lb_y, False


@njit(cache=True)
def _best_fill(g, c, y_last, wb, pb):
    # best retained solution of weight <= y_last completed with copies of item 0
    best = (c // wb) * pb
    best_y = 0
    for y in range(1, y_last + 1):
        v = g[y] + ((c - y) // wb) * pb
        if v > best:
            best = v
            best_y = y
    return best, best_y


@njit(cache=True)
def _naive_chunk(w, p, best, choice, y, y_end):
    n = w.shape[0]
    while y <= y_end:
        v = 0
        arg = -1
        for i in range(n):
            if w[i] <= y:
                cand = p[i] + best[y - w[i]]
                if cand > v:
                    v = cand
                    arg = i
        best[y] = v
        choice[y] = arg
        y += 1
    return y


def _prepare(instance: Instance):
    if instance.capacity > MAX_CAPACITY:
        raise InstanceError(f"capacity {instance.capacity} exceeds {MAX_CAPACITY}")
    check_overflow(instance)
    fit = instance.fitting_indices()
    ws = [instance.items[i].weight for i in fit]
    ps = [instance.items[i].profit for i in fit]
    local = efficiency_order(ws, ps)
    order = [fit[i] for i in local]
    w = np.array([ws[i] for i in local], dtype=np.int64)
    p = np.array([ps[i] for i in local], dtype=np.int64)
    return w, p, order


def backtrack(state: StepOffState, instance: Instance, y: int) -> Solution:
    """Rebuild the retained solution of weight ``y`` by peeling off ``d[y]``."""
    if not 0 < y < len(state.g) or state.g[y] <= 0:
        raise ValueError(f"no retained solution at weight {y}")
    counts = _backtrack_counts(state.g, state.d, state.weights, state.profits, y)
    return Solution.from_counts(
        {state.order[i]: k for i, k in counts.items()}, instance
    )


def _backtrack_counts(g, d, w, p, y) -> dict[int, int]:
    counts: dict[int, int] = {}
    while y > 0:
        i = int(d[y])
        rest = y - int(w[i])
        if rest < 0 or g[rest] + p[i] != g[y]:
            raise RuntimeError(f"inconsistent step-off arrays at y={y}")
        counts[i] = counts.get(i, 0) + 1
        y = rest
    return counts


def _deadline(timeout):
    return None if timeout is None else time.perf_counter() + timeout


def _expired(deadline) -> bool:
    return deadline is not None and time.perf_counter() > deadline


def step_off_arrays(w, p, c, *, tiebreak=True, tso=False, timeout=None, stats=None):
    """OSO/TSO over pre-ordered arrays (any order, int or float profits).

    Index 0 plays the role of the best item for the periodicity stop. Returns
    ``(value, counts, finished)`` where ``counts`` maps array positions to
    multiplicities. Used directly by the column-generation pricer.
    """
    dtype = np.float64 if np.asarray(p).dtype.kind == "f" else np.int64
    w = np.asarray(w, dtype=np.int64)
    p = np.asarray(p, dtype=dtype)
    # items heavier than c would be seeded past the end of g
    keep = np.flatnonzero(w <= c)
    if keep.size == 0:
        return dtype(0), {}, True
    if keep.size < w.size:
        value, counts, finished = step_off_arrays(w[keep], p[keep], c, tiebreak=tiebreak,
                                                  tso=tso, timeout=timeout, stats=stats)
        return value, {int(keep[k]): m for k, m in counts.items()}, finished
    w = np.ascontiguousarray(w)
    p = np.ascontiguousarray(p)
    g = np.zeros(c + 1, dtype=dtype)
    d = np.zeros(c + 1, dtype=np.int32)
    if stats is None:
        stats = np.zeros(3, dtype=np.int64)
    _seed(w, p, g, d, 0)
    run = _ScanRun(w, p, c, g, d, first=0, tiebreak=tiebreak, tso=tso)
    finished = run.advance(_deadline(timeout), stats)
    value, y = run.result()
    counts = _backtrack_counts(g, d, w, p, y) if y > 0 else {}
    if run.filled:
        counts[0] = counts.get(0, 0) + run.filled
    return value, counts, finished


class _ScanRun:
    """Driver around ``_scan`` holding the loop scalars between chunks."""

    def __init__(self, w, p, c, g, d, *, first, tiebreak, tso, gfdp=False):
        self.w, self.p, self.c, self.g, self.d = w, p, c, g, d
        self.first, self.tiebreak, self.tso, self.gfdp = first, tiebreak, tso, gfdp
        n = len(w)
        self.y = int(w[first:].min()) if n > first else c + 1
        zero = g.dtype.type(0)
        self.opt, self.opt_y = zero, 0
        # seeds of non-best items count as non-best writes
        self.last_nb = int(w[1:].max()) if n > 1 else 0
        self.wb = int(w[0])
        self.pb = p[0]
        self.w_max = int(w.max())
        self.lb = (c // self.wb) * self.pb if gfdp else zero
        self.lb_y = 0
        self.stopped = False
        self.filled = 0

    def advance(self, deadline, stats) -> bool:
        c = self.c
        while self.y <= c and not self.stopped:
            if _expired(deadline):
                return False
            y_end = min(c, self.y + CHUNK - 1)
            (self.y, self.opt, self.opt_y, self.last_nb, self.lb, self.lb_y,
             self.stopped) = _scan(
                self.w, self.p, c, self.g, self.d, self.y, y_end, self.opt,
                self.opt_y, self.last_nb, self.first, self.tiebreak, self.tso,
                self.gfdp, self.wb, self.pb, self.w_max, self.lb, self.lb_y, stats)
        return True

    def result(self):
        """Best value found so far and the weight of its retained part.

        Sets ``filled`` to the copies of item 0 appended to that part.
        """
        if self.gfdp:
            value, y = self.lb, self.lb_y
            self.filled = (self.c - y) // self.wb
        elif self.tso and self.stopped:
            value, y = _best_fill(self.g, self.c, self.y - 1, self.wb, self.pb)
            self.filled = (self.c - y) // self.wb
        else:
            value, y = self.opt, self.opt_y
            self.filled = 0
        return value, int(y)


def _outcome(instance, order, w, p, g, d, run, finished, start, stats, keep_state):
    value, y = run.result()
    counts = _backtrack_counts(g, d, w, p, y) if y > 0 else {}
    if run.filled:
        counts[0] = counts.get(0, 0) + run.filled
    sol = Solution.from_counts({order[i]: k for i, k in counts.items()}, instance)
    out = SolverOutcome(
        optimal_value=int(value),
        solution=sol,
        elapsed=time.perf_counter() - start,
        stats={
            "capacities_scanned": int(stats[_SCANNED]),
            "states_expanded": int(stats[_EXPANDED]),
            "inner_iterations": int(stats[_INNER]),
        },
        terminated_by=Termination.OPTIMAL if finished else Termination.TIMEOUT,
    )
    if keep_state:
        out.state = StepOffState(g, d, int(run.opt), w, p, order)
    return out


def _empty_outcome(instance, start, w, p, order, keep_state):
    # nothing fits
    out = SolverOutcome(0, Solution(), time.perf_counter() - start,
                        {"capacities_scanned": 0, "states_expanded": 0,
                         "inner_iterations": 0})
    if keep_state:
        c = instance.capacity
        out.state = StepOffState(np.zeros(c + 1, dtype=np.int64),
                                 np.zeros(c + 1, dtype=np.int32), 0, w, p, order)
    return out


def _solve_step_off(instance, timeout, *, tso=False, tiebreak=True, gfdp=False,
                    keep_state=False):
    start = time.perf_counter()
    w, p, order = _prepare(instance)
    if len(w) == 0:
        return _empty_outcome(instance, start, w, p, order, keep_state)
    c = instance.capacity
    g = np.zeros(c + 1, dtype=np.int64)
    d = np.zeros(c + 1, dtype=np.int32)
    stats = np.zeros(3, dtype=np.int64)
    first = 1 if gfdp else 0
    _seed(w, p, g, d, first)
    run = _ScanRun(w, p, c, g, d, first=first, tiebreak=tiebreak, tso=tso, gfdp=gfdp)
    finished = run.advance(_deadline(timeout), stats)
    return _outcome(instance, order, w, p, g, d, run, finished, start, stats, keep_state)


def solve_oso(instance: Instance, timeout: float | None = None, *,
              tiebreak: bool = True, keep_state: bool = False) -> SolverOutcome:
    """Revisited ordered step-off. ``tiebreak=False`` gives the original OSO."""
    return _solve_step_off(instance, timeout, tiebreak=tiebreak, keep_state=keep_state)


def solve_tso(instance: Instance, timeout: float | None = None, *,
              keep_state: bool = False) -> SolverOutcome:
    """R-OSO with a periodicity stop.

    The scan stops at the first capacity ``y`` beyond every position ever
    written by a non-best item. From then on only the best item can extend
    solutions, so the answer is the best retained solution of weight < y
    topped up with copies of the best item.
    """
    return _solve_step_off(instance, timeout, tso=True, keep_state=keep_state)


def solve_gfdp(instance: Instance, timeout: float | None = None, *,
               keep_state: bool = False) -> SolverOutcome:
    """Step-off without the best item, stopped by bounds at multiples of ``w_b``.

    Falls back to R-OSO when the top efficiency is shared by several items.
    """
    start = time.perf_counter()
    w, p, _ = _prepare(instance)
    if len(w) >= 2 and w[0] * p[1] == w[1] * p[0]:
        out = solve_oso(instance, timeout, keep_state=keep_state)
        out.elapsed = time.perf_counter() - start
        out.stats["gfdp_fallback"] = 1
        return out
    return _solve_step_off(instance, timeout, gfdp=True, keep_state=keep_state)


def solve_naive_dp(instance: Instance, timeout: float | None = None) -> SolverOutcome:
    """Theta(n c) recursion over every capacity; the reference oracle."""
    start = time.perf_counter()
    if instance.capacity > MAX_CAPACITY:
        raise InstanceError(f"capacity {instance.capacity} exceeds {MAX_CAPACITY}")
    check_overflow(instance)
    c = instance.capacity
    w = np.array(instance.weights, dtype=np.int64)
    p = np.array(instance.profits, dtype=np.int64)
    best = np.zeros(c + 1, dtype=np.int64)
    choice = np.full(c + 1, -1, dtype=np.int32)
    deadline = _deadline(timeout)
    y = 1
    finished = True
    while y <= c:
        if _expired(deadline):
            finished = False
            break
        y = _naive_chunk(w, p, best, choice, y, min(c, y + CHUNK - 1))
    top = y - 1
    sol = Solution()
    k = top
    while k > 0 and choice[k] >= 0:
        i = int(choice[k])
        sol.add(i, instance)
        k -= int(w[i])
    return SolverOutcome(
        optimal_value=int(best[top]),
        solution=sol,
        elapsed=time.perf_counter() - start,
        stats={"capacities_scanned": top, "inner_iterations": top * instance.n},
        terminated_by=Termination.OPTIMAL if finished else Termination.TIMEOUT,
    )
