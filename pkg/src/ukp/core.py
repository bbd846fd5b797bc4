"""Problem and solution data model, instance file I/O and evaluation."""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

INT64_MAX = 2**63 - 1


class InstanceError(ValueError):
    """Raised for malformed or unsupported UKP instances."""


class ParseError(InstanceError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)


@dataclass(frozen=True, slots=True)
class Item:
    weight: int
    profit: int

    def __post_init__(self):
        if self.weight < 1:
            raise InstanceError(f"non-positive weight {self.weight}")
        if self.profit < 1:
            raise InstanceError(f"non-positive profit {self.profit}")

    @property
    def efficiency(self) -> Fraction:
        return Fraction(self.profit, self.weight)


@dataclass(frozen=True)
class Instance:
    capacity: int
    items: tuple[Item, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if self.capacity < 1:
            raise InstanceError(f"non-positive capacity {self.capacity}")
        if not self.items:
            raise InstanceError("instance has no items")

    @classmethod
    def from_pairs(cls, capacity: int, pairs: Sequence[tuple[int, int]]) -> "Instance":
        return cls(capacity, tuple(Item(int(w), int(p)) for w, p in pairs))

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def weights(self) -> list[int]:
        return [it.weight for it in self.items]

    @property
    def profits(self) -> list[int]:
        return [it.profit for it in self.items]

    @property
    def w_min(self) -> int:
        return min(it.weight for it in self.items)

    @property
    def w_max(self) -> int:
        return max(it.weight for it in self.items)

    def fitting_indices(self) -> list[int]:
        """Indices of the items that fit in the knapsack on their own."""
        return [i for i, it in enumerate(self.items) if it.weight <= self.capacity]

    def with_capacity(self, capacity: int) -> "Instance":
        return Instance(capacity, self.items)

    def subset(self, indices: Sequence[int]) -> "Instance":
        return Instance(self.capacity, tuple(self.items[i] for i in indices))


@dataclass
class Solution:
    """Item multiset stored as index -> multiplicity, with cached totals."""

    counts: dict[int, int] = field(default_factory=dict)
    total_weight: int = 0
    total_profit: int = 0

    @classmethod
    def from_counts(cls, counts: Mapping[int, int], instance: Instance) -> "Solution":
        sol = cls()
        for i, k in counts.items():
            sol.add(i, instance, k)
        return sol

    def add(self, index: int, instance: Instance, copies: int = 1) -> None:
        if copies < 0:
            raise ValueError("negative multiplicity")
        if copies == 0:
            return
        if not 0 <= index < instance.n:
            raise IndexError(f"unknown item index {index}")
        item = instance.items[index]
        self.counts[index] = self.counts.get(index, 0) + copies
        self.total_weight += item.weight * copies
        self.total_profit += item.profit * copies

    def normalized(self) -> dict[int, int]:
        return {i: k for i, k in sorted(self.counts.items()) if k > 0}

    def __eq__(self, other):
        if not isinstance(other, Solution):
            return NotImplemented
        return self.normalized() == other.normalized()

    def to_json(self) -> dict:
        return {
            "counts": {str(i): k for i, k in self.normalized().items()},
            "weight": self.total_weight,
            "profit": self.total_profit,
        }


class Termination(str, enum.Enum):
    OPTIMAL = "optimal"
    TIMEOUT = "timeout"
    ERROR = "error"


@dataclass
class SolverOutcome:
    optimal_value: int
    solution: Solution
    elapsed: float
    stats: dict[str, int] = field(default_factory=dict)
    terminated_by: Termination = Termination.OPTIMAL
    state: object = field(default=None, repr=False, compare=False)

    @property
    def finished(self) -> bool:
        return self.terminated_by is Termination.OPTIMAL

    def to_json(self) -> dict:
        return {
            "value": self.optimal_value,
            "elapsed_s": round(self.elapsed, 6),
            "terminated_by": self.terminated_by.value,
            "stats": dict(self.stats),
            "solution": self.solution.to_json(),
        }


def evaluate(solution: Solution, instance: Instance) -> tuple[int, int, bool]:
    """Recompute (weight, profit, feasible) of ``solution`` from its counts."""
    weight = profit = 0
    for i, k in solution.counts.items():
        if not 0 <= i < instance.n:
            raise IndexError(f"unknown item index {i}")
        weight += instance.items[i].weight * k
        profit += instance.items[i].profit * k
    return weight, profit, weight <= instance.capacity


def efficiency_order(weights: Sequence[int], profits: Sequence[int]) -> list[int]:
    """Indices sorted by efficiency desc, then weight asc, then index asc.

    Ordering is exact. Distinct ratios with denominators at most ``W`` differ
    by at least ``1 / W**2``, so the integer key ``p * W**2 // w`` separates
    them while equal ratios share a key.
    """
    if not weights:
        return []
    scale = max(weights) ** 2
    keys = [-(p * scale // w) for w, p in zip(weights, profits)]
    return sorted(range(len(weights)), key=lambda i: (keys[i], weights[i], i))


def best_item(instance: Instance) -> int:
    """Index of the most efficient item; ties go to lower weight, then list order."""
    return efficiency_order(instance.weights, instance.profits)[0]


def check_overflow(instance: Instance) -> None:
    """Reject instances whose bound arithmetic could leave the signed 64-bit range.

    The largest intermediate used by the solvers is a fixed profit plus
    ``remaining_capacity * p_j``, which is at most ``2 * c * max(p)``.
    """
    if 2 * instance.capacity * max(instance.profits) > INT64_MAX:
        raise InstanceError(
            "instance may overflow 64-bit arithmetic "
            f"(c={instance.capacity}, max profit={max(instance.profits)})"
        )


def parse_ukp_instance(text: str) -> Instance:
    """Parse the ``n:``/``c:``/``begin data``/``end data`` text format."""
    header: dict[str, int] = {}
    pairs: list[tuple[int, int]] = []
    state = "header"
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if state == "header":
            if line == "begin data":
                if "n" not in header or "c" not in header:
                    raise ParseError("'begin data' before n/c header", lineno)
                state = "data"
                continue
            key, sep, value = line.partition(":")
            key = key.strip()
            if not sep or key not in ("n", "c") or key in header:
                raise ParseError(f"malformed header line {line!r}", lineno)
            try:
                header[key] = int(value.strip())
            except ValueError:
                raise ParseError(f"non-integer {key} value {value.strip()!r}", lineno) from None
            if header[key] < 1:
                raise ParseError(f"non-positive {key}", lineno)
        elif state == "data":
            if line == "end data":
                state = "done"
                continue
            fields = line.split()
            if len(fields) != 2:
                raise ParseError("malformed item line", lineno)
            try:
                w, p = int(fields[0]), int(fields[1])
            except ValueError:
                raise ParseError("non-integer item field", lineno) from None
            if w < 1:
                raise ParseError("non-positive weight", lineno)
            if p < 1:
                raise ParseError("non-positive profit", lineno)
            pairs.append((w, p))
        else:
            raise ParseError("content after 'end data'", lineno)
    if state != "done":
        raise ParseError("missing 'begin data'" if state == "header" else "missing 'end data'")
    if len(pairs) != header["n"]:
        raise ParseError(f"n mismatch: header says {header['n']}, found {len(pairs)} items")
    return Instance.from_pairs(header["c"], pairs)


def render_ukp_instance(instance: Instance) -> str:
    lines = [f"n: {instance.n}", f"c: {instance.capacity}", "begin data"]
    lines.extend(f"{it.weight} {it.profit}" for it in instance.items)
    lines.append("end data")
    return "\n".join(lines) + "\n"


def read_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_ukp_instance(fh.read())


def write_instance(instance: Instance, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_ukp_instance(instance))


def checksum(text: str | bytes) -> str:
    if isinstance(text, str):
        text = text.encode("utf-8")
    return hashlib.sha256(text).hexdigest()
