"""Depth-first branch-and-bound solvers (MTU1 and its core-based MTU2)."""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .core import (
    Instance,
    Solution,
    SolverOutcome,
    Termination,
    check_overflow,
    efficiency_order,
)

CHUNK = 4096
_BIG = np.iinfo(np.int64).max

# slots of the search-state vector shared with the kernel
J, R, P, Z, PHASE, NODES, PRUNED, DONE, FIRST_LEAF = range(9)


@dataclass
class BBNodeState:
    depth: int
    fixed_counts: list[int]
    remaining_capacity: int
    fixed_profit: int


@njit(cache=True)
def _mtu1_kernel(w, p, minw, x, best_x, first_x, st, budget):
    n = w.shape[0]
    j, r, P_, z, phase = st[0], st[1], st[2], st[3], st[4]
    nodes, pruned = st[5], st[6]
    while budget > 0:
        budget -= 1
        if phase == 0:
            if r < minw[j]:
                # leaf: nothing else fits
                if st[8] == 0:
                    first_x[:] = x
                    st[8] = 1
                if P_ > z:
                    z = P_
                    best_x[:] = x
                phase = 1
                continue
            nodes += 1
            if P_ + (r * p[j]) // w[j] <= z:
                pruned += 1
                phase = 1
                continue
            k = r // w[j]
            x[j] = k
            r -= k * w[j]
            P_ += k * p[j]
            j += 1
        else:
            i = j - 1
            while i >= 0 and x[i] == 0:
                i -= 1
            if i < 0:
                st[7] = 1
                break
            x[i] -= 1
            r += w[i]
            P_ -= p[i]
            ub = P_
            if i + 1 < n:
                ub = P_ + (r * p[i + 1]) // w[i + 1]
            if ub <= z:
                # fewer copies of item i only lower the bound
                pruned += 1
                r += x[i] * w[i]
                P_ -= x[i] * p[i]
                x[i] = 0
                j = i
                continue
            j = i + 1
            phase = 0
    st[0], st[1], st[2], st[3], st[4] = j, r, P_, z, phase
    st[5], st[6] = nodes, pruned


def greedy_bound(instance: Instance, capacity: int | None = None) -> tuple[Solution, int]:
    """Pack the most efficient item that still fits, in efficiency order."""
    r = instance.capacity if capacity is None else capacity
    sol = Solution()
    for i in efficiency_order(instance.weights, instance.profits):
        k = r // instance.items[i].weight
        if k:
            sol.add(i, instance, k)
            r -= k * instance.items[i].weight
    return sol, sol.total_profit


def continuous_bound(fixed_profit: int, remaining_capacity: int,
                     next_efficiency: tuple[int, int]) -> int:
    """``fixed_profit + floor(remaining_capacity * p / w)`` for ``next_efficiency = (p, w)``."""
    p, w = next_efficiency
    return fixed_profit + (remaining_capacity * p) // w


@dataclass
class _Search:
    """Resumable MTU1 search over items already in efficiency order."""

    w: np.ndarray
    p: np.ndarray
    capacity: int
    incumbent: int = 0
    incumbent_x: np.ndarray | None = None
    st: np.ndarray = field(init=False)

    def __post_init__(self):
        n = len(self.w)
        self.minw = np.full(n + 1, _BIG, dtype=np.int64)
        for j in range(n - 1, -1, -1):
            self.minw[j] = min(self.minw[j + 1], self.w[j])
        self.x = np.zeros(n, dtype=np.int64)
        self.first_x = np.zeros(n, dtype=np.int64)
        self.best_x = (np.zeros(n, dtype=np.int64) if self.incumbent_x is None
                       else np.array(self.incumbent_x, dtype=np.int64))
        self.st = np.zeros(9, dtype=np.int64)
        self.st[R] = self.capacity
        self.st[Z] = self.incumbent

    @property
    def done(self) -> bool:
        return bool(self.st[DONE])

    @property
    def value(self) -> int:
        return int(self.st[Z])

    def node_state(self) -> BBNodeState:
        j = int(self.st[J])
        return BBNodeState(j, self.x[:j].tolist(), int(self.st[R]), int(self.st[P]))

    def run(self, deadline, budget=CHUNK, trace=None) -> bool:
        while not self.done:  # phase 0 descends, phase 1 backtracks
            if deadline is not None and time.perf_counter() > deadline:
                return False
            _mtu1_kernel(self.w, self.p, self.minw, self.x, self.best_x,
                         self.first_x, self.st, budget)
            if trace is not None:
                trace.append(int(self.st[Z]))
        return True


def _sorted_arrays(instance: Instance, indices):
    w = np.array([instance.items[i].weight for i in indices], dtype=np.int64)
    p = np.array([instance.items[i].profit for i in indices], dtype=np.int64)
    return w, p


def _check(instance: Instance) -> None:
    check_overflow(instance)


def solve_mtu1(instance: Instance, timeout: float | None = None, *,
               trace: list | None = None, warm_start: bool = True) -> SolverOutcome:
    """Depth-first B&B; children try the most copies of the next item first.

    The incumbent starts at the greedy solution, which is also the first leaf
    of a cold search (``warm_start=False``). A node is pruned when its
    continuous bound does not beat the incumbent.
    """
    start = time.perf_counter()
    _check(instance)
    fit = instance.fitting_indices()
    order = [fit[i] for i in efficiency_order([instance.items[i].weight for i in fit],
                                              [instance.items[i].profit for i in fit])]
    greedy, z0 = greedy_bound(instance)
    w, p = _sorted_arrays(instance, order)
    x0 = [greedy.counts.get(i, 0) for i in order]
    if warm_start:
        search = _Search(w, p, instance.capacity, z0, x0)
    else:
        search = _Search(w, p, instance.capacity, -1)
    deadline = None if timeout is None else start + timeout
    finished = search.run(deadline, trace=trace)
    sol = Solution.from_counts(
        {order[k]: int(v) for k, v in enumerate(search.best_x) if v}, instance)
    out = SolverOutcome(
        optimal_value=search.value,
        solution=sol,
        elapsed=time.perf_counter() - start,
        stats={"nodes_expanded": int(search.st[NODES]),
               "pruned_by_bound": int(search.st[PRUNED])},
        terminated_by=Termination.OPTIMAL if finished else Termination.TIMEOUT,
    )
    search.order = order
    out.state = search
    return out


def first_leaf(outcome: SolverOutcome, instance: Instance) -> Solution:
    """The first leaf reached by an MTU1 run, in instance indices."""
    search = outcome.state
    return Solution.from_counts(
        {search.order[k]: int(v) for k, v in enumerate(search.first_x) if v}, instance)


def initial_core_size(n: int) -> int:
    return max(128, -(-n // 100))


def solve_mtu2(instance: Instance, timeout: float | None = None, *,
               core_size: int | None = None) -> SolverOutcome:
    """MTU1 on a growing core of the most efficient items.

    After each core solve, every excluded item ``e`` is tested with the bound
    ``p_e + floor((c - w_e) * p_b / w_b)`` on solutions that use it. Items
    whose bound cannot beat the core optimum are discarded for good; if any
    item survives the test the core doubles and the search repeats.
    """
    start = time.perf_counter()
    _check(instance)
    c = instance.capacity
    deadline = None if timeout is None else start + timeout
    fit = instance.fitting_indices()
    if not fit:
        return SolverOutcome(0, Solution(), time.perf_counter() - start,
                             {"rounds": 0, "core_size": 0})
    order = efficiency_order([instance.items[i].weight for i in fit],
                             [instance.items[i].profit for i in fit])
    rank = {fit[t]: pos for pos, t in enumerate(order)}
    pool = set(fit)
    k = initial_core_size(len(pool)) if core_size is None else core_size
    z, best_counts = 0, {}
    nodes = pruned = rounds = 0
    finished = True
    while True:
        rounds += 1
        core = heapq.nsmallest(k, pool, key=rank.__getitem__)
        w, p = _sorted_arrays(instance, core)
        x0 = [best_counts.get(i, 0) for i in core]
        if z == 0:
            # seed with the greedy solution on the core
            r, x0 = c, []
            for wi in w.tolist():
                x0.append(r // wi)
                r -= x0[-1] * wi
            z = int(np.dot(x0, p))
        search = _Search(w, p, c, z, x0)
        done = search.run(deadline)
        nodes += int(search.st[NODES])
        pruned += int(search.st[PRUNED])
        z = search.value
        best_counts = {core[t]: int(v) for t, v in enumerate(search.best_x) if v}
        if not done:
            finished = False
            break
        wb, pb = int(w[0]), int(p[0])
        core_set = set(core)
        failing = set()
        for e in pool - core_set:
            it = instance.items[e]
            if it.profit + ((c - it.weight) * pb) // wb > z:
                failing.add(e)
        if not failing:
            break
        pool = core_set | failing
        k *= 2
    return SolverOutcome(
        optimal_value=z,
        solution=Solution.from_counts(best_counts, instance),
        elapsed=time.perf_counter() - start,
        stats={"nodes_expanded": nodes, "pruned_by_bound": pruned,
               "rounds": rounds, "core_size": len(core)},
        terminated_by=Termination.OPTIMAL if finished else Termination.TIMEOUT,
    )
