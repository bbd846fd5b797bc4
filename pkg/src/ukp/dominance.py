"""Dominance relations between items and solutions, and the periodicity bound."""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import Instance, Solution, best_item


class Level(str, enum.Enum):
    SIMPLE = "simple"
    MULTIPLE = "multiple"
    COLLECTIVE = "collective"


@dataclass
class DominanceReport:
    level: Level
    removed: list[int]
    survivors: list[int]
    elapsed: float

    def to_json(self) -> dict:
        return {"level": self.level.value, "removed_count": len(self.removed),
                "survivor_count": len(self.survivors), "removed": self.removed,
                "elapsed_s": round(self.elapsed, 6)}


@dataclass
class PeriodicityBound:
    y_dprime: int
    reduced_capacity: int
    best_item_index: int
    fill_copies: int


def dominates_solution(s: Solution, t: Solution) -> bool:
    """True when ``s`` weighs no more than ``t``, is worth at least as much, and differs."""
    return (s.total_weight <= t.total_weight and s.total_profit >= t.total_profit
            and s != t)


@njit(cache=True)
def _add_item(best, w, p):
    for y in range(w, best.shape[0]):
        v = best[y - w] + p
        if v > best[y]:
            best[y] = v


def remove_dominated(instance: Instance, level: Level | str) -> DominanceReport:
    """Drop items that some combination of the other items makes redundant.

    Items are visited by weight (ties: higher profit first, then index) and
    tested against the survivors so far. ``multiple`` tests ``floor(w_j/w_i)``
    copies of each survivor ``i``; ``collective`` also runs an unbounded
    knapsack over survivors up to ``w_max``. Each level removes a superset of
    the previous one.
    """
    level = Level(level)
    start = time.perf_counter()
    items = instance.items
    order = sorted(range(instance.n), key=lambda i: (items[i].weight, -items[i].profit, i))
    kept: list[int] = []
    removed: list[int] = []
    best_profit = 0
    dp = None
    if level is Level.COLLECTIVE:
        dp = np.zeros(instance.w_max + 1, dtype=np.int64)
    for j in order:
        w, p = items[j].weight, items[j].profit
        if best_profit >= p:
            dominated = True
        elif level is Level.SIMPLE:
            dominated = False
        elif dp is not None:
            dominated = int(dp[w]) >= p
        else:
            dominated = any((w // items[i].weight) * items[i].profit >= p for i in kept)
        if dominated:
            removed.append(j)
            continue
        kept.append(j)
        best_profit = max(best_profit, p)
        if dp is not None:
            _add_item(dp, w, p)
    return DominanceReport(level, sorted(removed), sorted(kept),
                           time.perf_counter() - start)


def periodicity_bound(instance: Instance) -> PeriodicityBound:
    """Capacity beyond which extra room is filled with copies of the best item.

    ``y_dprime`` sums ``lcm(w_b, w_j)`` over the non-best items and saturates
    at ``c + 1``, meaning no reduction is possible.
    """
    c = instance.capacity
    b = best_item(instance)
    wb = instance.items[b].weight
    y = 0
    for j, it in enumerate(instance.items):
        if j != b:
            y = min(y + math.lcm(wb, it.weight), c + 1)
    if y >= c:
        return PeriodicityBound(y, c, b, 0)
    copies = min(-(-(c - y) // wb), c // wb)
    return PeriodicityBound(y, c - copies * wb, b, copies)
