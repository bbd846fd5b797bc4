"""Column generation for the set-covering LP relaxation of cutting stock / bin packing.

The restricted master is solved by the dense revised simplex below; pricing
is an unbounded knapsack over the item sizes with the master duals as profits.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .core import Instance, InstanceError, ParseError
from .bb import solve_mtu1
from .dp import step_off_arrays

SCALE = 2**40
EPS_NATIVE = 2.0**-30
EPS_SCALED = 2**10
PIVOT_TOL = 1e-11
COST_TOL = 1e-10
REFACTOR_EVERY = 50
DEGENERATE_LIMIT = 30


class MasterLPError(RuntimeError):
    """Numerical trouble in the master simplex; ``trace`` lists the pivots done."""

    def __init__(self, message: str, trace: list):
        super().__init__(message)
        self.trace = trace


class ColGenError(RuntimeError):
    def __init__(self, message: str, state: "ColGenState"):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class CspInstance:
    bin_capacity: int
    sizes: tuple[int, ...]
    demands: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "demands", tuple(int(d) for d in self.demands))
        if self.bin_capacity < 1:
            raise InstanceError("non-positive bin capacity")
        if len(self.sizes) != len(self.demands) or not self.sizes:
            raise InstanceError("sizes and demands must be non-empty and of equal length")
        if len(set(self.sizes)) != len(self.sizes):
            raise InstanceError("duplicate sizes; merge them into demands")
        for s, d in zip(self.sizes, self.demands):
            if not 1 <= s <= self.bin_capacity:
                raise InstanceError(f"size {s} outside [1, {self.bin_capacity}]")
            if d < 1:
                raise InstanceError(f"non-positive demand {d}")

    @property
    def n(self) -> int:
        return len(self.sizes)


@dataclass(frozen=True)
class Pattern:
    multiplicities: tuple[int, ...]

    def weight(self, instance: CspInstance) -> int:
        return sum(a * s for a, s in zip(self.multiplicities, instance.sizes))

    def to_dict(self, instance: CspInstance) -> dict[int, int]:
        return {s: a for a, s in zip(self.multiplicities, instance.sizes) if a}


@dataclass
class ColGenConfig:
    pricer: str = "oso"
    sort_by: str = "efficiency"
    profit: str = "scaled"
    max_iterations: int | None = None
    timeout: float | None = None

    def __post_init__(self):
        if self.pricer not in ("oso", "mtu1"):
            raise ValueError(f"unknown pricer {self.pricer!r}")
        if self.sort_by not in ("efficiency", "weight"):
            raise ValueError(f"unknown sort {self.sort_by!r}")
        if self.profit not in ("scaled", "native"):
            raise ValueError(f"unknown profit mode {self.profit!r}")
        if self.pricer == "mtu1" and self.profit == "native":
            raise ValueError("the mtu1 pricer needs integer profits (--profit scaled)")


@dataclass
class ColGenState:
    patterns: list[Pattern]
    lp_value: float = float("inf")
    duals: list[float] = field(default_factory=list)
    iterations: int = 0
    pricing_times: list[float] = field(default_factory=list)
    master_times: list[float] = field(default_factory=list)
    lp_values: list[float] = field(default_factory=list)
    primal: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"lp_value": self.lp_value, "iterations": self.iterations,
                "patterns": len(self.patterns),
                "total_pricing_s": round(sum(self.pricing_times), 6),
                "master_s": round(sum(self.master_times), 6)}


def parse_bpp_instance(text: str) -> CspInstance:
    """Read ``n``, the capacity, then ``n`` lines of ``size [demand]``.

    Repeated sizes are merged by summing their demands.
    """
    lines = [(k, ln.split()) for k, ln in enumerate(text.splitlines(), start=1)
             if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) < 2:
        raise ParseError("expected item count and capacity lines")
    try:
        n = int(lines[0][1][0])
        cap = int(lines[1][1][0])
    except ValueError:
        raise ParseError("non-integer header", lines[0][0]) from None
    if n < 1 or cap < 1:
        raise ParseError("non-positive item count or capacity", 1)
    if len(lines) - 2 != n:
        raise ParseError(f"n mismatch: header says {n}, found {len(lines) - 2} items")
    merged: dict[int, int] = {}
    for lineno, fields in lines[2:]:
        if len(fields) not in (1, 2):
            raise ParseError("malformed item line", lineno)
        try:
            size = int(fields[0])
            demand = int(fields[1]) if len(fields) == 2 else 1
        except ValueError:
            raise ParseError("non-integer item field", lineno) from None
        if size < 1 or demand < 1:
            raise ParseError("non-positive size or demand", lineno)
        if size > cap:
            raise ParseError(f"size {size} exceeds capacity {cap}", lineno)
        merged[size] = merged.get(size, 0) + demand
    return CspInstance(cap, tuple(merged), tuple(merged.values()))


def read_bpp_instance(path) -> CspInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_bpp_instance(fh.read())


def initial_patterns(instance: CspInstance) -> list[Pattern]:
    """One homogeneous pattern per size, holding as many copies as fit."""
    out = []
    for i, s in enumerate(instance.sizes):
        a = [0] * instance.n
        a[i] = instance.bin_capacity // s
        out.append(Pattern(tuple(a)))
    return out


class _Simplex:
    """Revised primal simplex for ``min c x  s.t.  A x = b, x >= 0`` with ``b >= 0``.

    ``binv`` is kept explicitly, updated by row operations each pivot and
    recomputed from scratch every ``REFACTOR_EVERY`` pivots.
    """

    def __init__(self, A, b, basis):
        self.A, self.b = A, b
        self.basis = list(basis)
        self.trace: list[tuple] = []
        self._refactor()

    def _refactor(self):
        try:
            self.binv = np.linalg.inv(self.A[:, self.basis])
        except np.linalg.LinAlgError:
            raise MasterLPError("singular basis", self.trace) from None
        self.xb = self.binv @ self.b
        self.since_refactor = 0

    def run(self, cost, allowed, limit):
        degenerate = 0
        for it in range(limit):
            cb = cost[self.basis]
            y = cb @ self.binv
            reduced = cost - y @ self.A
            reduced[~allowed] = 0.0
            reduced[self.basis] = 0.0
            bland = degenerate >= DEGENERATE_LIMIT
            cand = np.flatnonzero(reduced < -COST_TOL)
            if cand.size == 0:
                return y
            q = int(cand[0]) if bland else int(cand[np.argmin(reduced[cand])])
            u = self.binv @ self.A[:, q]
            rows = np.flatnonzero(u > PIVOT_TOL)
            if rows.size == 0:
                raise MasterLPError("unbounded master LP", self.trace)
            ratios = self.xb[rows] / u[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12]
            r = int(min(ties, key=lambda k: self.basis[k]))
            step = self.xb[r] / u[r]
            degenerate = degenerate + 1 if step <= 1e-12 else 0
            self.trace.append((it, float(cb @ self.xb), q, self.basis[r]))
            self._pivot(r, q, u)
        raise MasterLPError(f"simplex iteration limit {limit} reached", self.trace)

    def _pivot(self, r, q, u):
        self.binv[r] /= u[r]
        self.xb[r] /= u[r]
        col = u.copy()
        col[r] = 0.0
        self.binv -= np.outer(col, self.binv[r])
        self.xb -= col * self.xb[r]
        self.basis[r] = q
        self.since_refactor += 1
        if self.since_refactor >= REFACTOR_EVERY:
            self._refactor()
        if not np.all(np.isfinite(self.xb)):
            raise MasterLPError("non-finite basic solution", self.trace)
        np.maximum(self.xb, 0.0, out=self.xb)


def _master(patterns, instance, basis=None):
    """Solve the restricted master; return (value, x, duals, basis).

    Columns are the patterns, then one surplus per row, then one artificial
    per row. A previous optimal basis stays feasible after adding columns, so
    it is reused as a warm start; otherwise phase one starts from the
    artificials.
    """
    m, k = instance.n, len(patterns)
    A = np.zeros((m, k + 2 * m))
    for j, pat in enumerate(patterns):
        A[:, j] = pat.multiplicities
    A[:, k:k + m] = -np.eye(m)
    A[:, k + m:] = np.eye(m)
    b = np.asarray(instance.demands, dtype=float)
    limit = 50 * (k + 2 * m) + 1000
    allowed = np.ones(k + 2 * m, dtype=bool)
    if basis is None:
        lp = _Simplex(A, b, range(k + m, k + 2 * m))
        phase1 = np.zeros(k + 2 * m)
        phase1[k + m:] = 1.0
        lp.run(phase1, allowed, limit)
        if float(phase1[lp.basis] @ lp.xb) > 1e-9:
            raise MasterLPError("master LP infeasible; patterns do not cover every size", lp.trace)
        _drive_out_artificials(lp, k, m)
    else:
        # warm-start indices were laid out for fewer pattern columns
        shift = k - basis[1]
        lp = _Simplex(A, b, [j if j < basis[1] else j + shift for j in basis[0]])
        if np.any(lp.xb < -1e-9):
            raise MasterLPError("warm-start basis is infeasible", lp.trace)
    allowed[k + m:] = False
    cost = np.zeros(k + 2 * m)
    cost[:k] = 1.0
    y = lp.run(cost, allowed, limit)
    x = np.zeros(k)
    for r, j in enumerate(lp.basis):
        if j < k:
            x[j] = lp.xb[r]
    return float(x.sum()), x, np.maximum(y, 0.0), (list(lp.basis), k)


def _drive_out_artificials(lp, k, m):
    for r, j in enumerate(lp.basis):
        if j < k + m:
            continue
        row = lp.binv[r] @ lp.A[:, :k + m]
        nonbasic = [q for q in np.flatnonzero(np.abs(row) > 1e-9) if q not in lp.basis]
        if not nonbasic:
            raise MasterLPError("cannot remove artificial from basis", lp.trace)
        q = int(nonbasic[0])
        lp._pivot(r, q, lp.binv @ lp.A[:, q])


def solve_master(patterns: list[Pattern], instance: CspInstance):
    """Optimal ``(lp_value, primal weights, duals)`` of the restricted master."""
    value, x, duals, _ = _master(patterns, instance)
    return value, x.tolist(), duals.tolist()


def price(duals, instance: CspInstance, variant: ColGenConfig | None = None,
          ukp_solver: str | None = None, *, timeout: float | None = None,
          _weight_order: list[int] | None = None):
    """Find the pattern of largest dual value; return it if it prices out.

    Returns ``(pattern or None, seconds spent)``.
    """
    variant = variant or ColGenConfig()
    solver = ukp_solver or variant.pricer
    start = time.perf_counter()
    scaled = variant.profit == "scaled"
    if scaled:
        profits = [int(np.floor(dv * SCALE)) for dv in duals]
    else:
        profits = [float(dv) for dv in duals]
    keep = [i for i in range(instance.n) if profits[i] > 0]
    if not keep:
        return None, time.perf_counter() - start
    if variant.sort_by == "weight":
        order = [i for i in (_weight_order or _by_weight(instance)) if profits[i] > 0]
    else:
        order = sorted(keep, key=lambda i: (-profits[i] / instance.sizes[i], instance.sizes[i], i))
    c = instance.bin_capacity
    if solver == "mtu1":
        if not scaled:
            raise ValueError("the mtu1 pricer needs integer profits")
        ukp = Instance.from_pairs(c, [(instance.sizes[i], profits[i]) for i in order])
        out = solve_mtu1(ukp, timeout)
        if not out.finished:
            raise TimeoutError("pricing subproblem timed out")
        value = out.optimal_value
        counts = {order[t]: k for t, k in out.solution.counts.items()}
    else:
        w = np.array([instance.sizes[i] for i in order], dtype=np.int64)
        p = np.array([profits[i] for i in order],
                     dtype=np.int64 if scaled else np.float64)
        value, pos_counts, finished = step_off_arrays(w, p, c, timeout=timeout)
        if not finished:
            raise TimeoutError("pricing subproblem timed out")
        counts = {order[t]: k for t, k in pos_counts.items()}
    elapsed = time.perf_counter() - start
    improving = value > SCALE + EPS_SCALED if scaled else value > 1.0 + EPS_NATIVE
    if not improving:
        return None, elapsed
    return Pattern(tuple(counts.get(i, 0) for i in range(instance.n))), elapsed


def _by_weight(instance: CspInstance) -> list[int]:
    return sorted(range(instance.n), key=lambda i: instance.sizes[i])


def column_generation(instance: CspInstance, config: ColGenConfig | None = None) -> ColGenState:
    """Alternate master solves and pricing until no column prices out.

    Stops early, as optimal, if pricing returns a pattern already in the
    master, since the LP cannot improve from it.
    """
    config = config or ColGenConfig()
    cap = config.max_iterations or 50 * instance.n
    deadline = None if config.timeout is None else time.perf_counter() + config.timeout
    state = ColGenState(initial_patterns(instance))
    seen = set(state.patterns)
    weight_order = _by_weight(instance)
    basis = None
    while True:
        if state.iterations >= cap:
            raise ColGenError(f"iteration cap {cap} exceeded", state)
        t0 = time.perf_counter()
        value, x, duals, basis = _master(state.patterns, instance, basis)
        state.master_times.append(time.perf_counter() - t0)
        state.iterations += 1
        state.lp_value, state.duals, state.primal = value, duals.tolist(), x.tolist()
        state.lp_values.append(value)
        remaining = None if deadline is None else deadline - time.perf_counter()
        if remaining is not None and remaining <= 0:
            raise TimeoutError("column generation timed out")
        pattern, pt = price(duals, instance, config, timeout=remaining,
                            _weight_order=weight_order)
        state.pricing_times.append(pt)
        if pattern is None or pattern in seen:
            return state
        seen.add(pattern)
        state.patterns.append(pattern)


def write_trace(state: ColGenState, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(["iteration", "pricing_s", "master_s", "lp_value"])
        for i, (pt, mt, lp) in enumerate(zip(state.pricing_times, state.master_times,
                                             state.lp_values), start=1):
            out.writerow([i, f"{pt:.6f}", f"{mt:.6f}", repr(lp)])
