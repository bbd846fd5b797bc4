"""Seeded instance generators.

Every generator draws from a Philox counter-based stream keyed by
``(seed, crc32(distribution tag))``, so the same spec yields the same file on
any platform. Unique values come from rejection sampling in draw order.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

import numpy as np

from .core import Instance, InstanceError

DISTRIBUTIONS = ("realistic_random", "breq", "subset_sum", "strong_corr")


class GeneratorError(InstanceError):
    pass


def make_rng(seed: int, tag: str) -> np.random.Generator:
    key = np.random.SeedSequence([seed & (2**64 - 1), zlib.crc32(tag.encode())])
    return np.random.Generator(np.random.Philox(key))


def unique_uniform(rng: np.random.Generator, n: int, lo: int, hi: int) -> list[int]:
    """``n`` distinct integers from ``[lo, hi]`` in draw order."""
    if n > hi - lo + 1:
        raise GeneratorError(f"cannot draw {n} unique values from [{lo}, {hi}]")
    seen: set[int] = set()
    out: list[int] = []
    while len(out) < n:
        for v in rng.integers(lo, hi, size=n - len(out), endpoint=True).tolist():
            if v not in seen:
                seen.add(v)
                out.append(v)
    return out


def concat_n(x: int, n: int) -> int:
    """Capacity-range notation where ``x`` is written in front of ``n``: 10, 5000 -> 105000."""
    return int(f"{x}{n}")


def gen_realistic_random(n: int, seed: int, *, max_value: int | None = None) -> Instance:
    """Two sorted lists of unique values paired up, then shuffled.

    Defaults: ``max = n * 2**10``, ``min = max / 2**4``,
    ``c`` uniform in ``[2 max, 2 max + min]``. ``max_value`` rescales the
    ranges for small test instances.
    """
    if n < 2:
        raise GeneratorError("realistic random needs n >= 2")
    hi = n * 2**10 if max_value is None else max_value
    lo = hi // 2**4
    rng = make_rng(seed, "realistic_random")
    weights = sorted(unique_uniform(rng, n, lo, hi))
    profits = sorted(unique_uniform(rng, n, lo, hi))
    perm = rng.permutation(n)
    pairs = [(weights[i], profits[i]) for i in perm.tolist()]
    c = int(rng.integers(2 * hi, 2 * hi + lo, endpoint=True))
    return Instance.from_pairs(c, pairs)


def breq_profit(w: int, w_max: int, p_max: int) -> int:
    """``p_max - floor(sqrt(p_max**2 - w**2 * (p_max / w_max)**2))`` in exact integers."""
    radicand = (p_max * p_max * w_max * w_max - w * w * p_max * p_max) // (w_max * w_max)
    return p_max - math.isqrt(radicand)


def gen_breq(n: int, seed: int, *, c_factor: int = 128, p_factor: int = 16) -> Instance:
    """BREQ 128-16: ``c = 128 n``, ``w_max = c``, ``p_max = 16 w_max``.

    Profits of 0 (tiny weights) are clamped to 1.
    """
    if n < 1:
        raise GeneratorError("n must be positive")
    c = c_factor * n
    w_max = c
    p_max = p_factor * w_max
    rng = make_rng(seed, "breq")
    weights = unique_uniform(rng, n, 1, w_max)
    return Instance.from_pairs(c, [(w, max(1, breq_profit(w, w_max, p_max))) for w in weights])


def gen_subset_sum(n: int, w_min: int, w_max: int, c_min: int, c_max: int,
                   seed: int) -> Instance:
    if not (1 <= w_min <= w_max and 1 <= c_min <= c_max):
        raise GeneratorError("invalid subset-sum ranges")
    rng = make_rng(seed, "subset_sum")
    weights = unique_uniform(rng, n, w_min, w_max)
    c = int(rng.integers(c_min, c_max, endpoint=True))
    return Instance.from_pairs(c, [(w, w) for w in weights])


def gen_strong_corr(n: int, alpha: int, w_min: int, c_range: tuple[int, int], seed: int,
                    *, w_max: int | None = None) -> Instance:
    """Unique weights uniform in ``[w_min, w_max]`` (default ``10 w_min``), ``p = w + alpha``."""
    if w_min + alpha < 1:
        raise GeneratorError(f"w_min + alpha = {w_min + alpha} gives non-positive profits")
    hi = 10 * w_min if w_max is None else w_max
    c_lo, c_hi = c_range
    if c_lo > c_hi or c_lo < 1:
        raise GeneratorError("invalid capacity range")
    rng = make_rng(seed, "strong_corr")
    weights = unique_uniform(rng, n, w_min, hi)
    c = int(rng.integers(c_lo, c_hi, endpoint=True))
    return Instance.from_pairs(c, [(w, w + alpha) for w in weights])


PRESETS = {
    "pyasukp-ss": {"distribution": "subset_sum",
                   "params": {"w_min": 10**3, "w_max": 5 * 10**5,
                              "c_min": 5 * 10**6, "c_max": 10**7}},
    "hard-sc": {"distribution": "strong_corr", "n": 10**4,
                "params": {"alpha": -5, "w_min": 110000, "w_max": 120000,
                           "c_range": (9008057, 9008057)}},
    "breq-128-16": {"distribution": "breq", "params": {}},
}


@dataclass
class GenSpec:
    distribution: str
    n: int
    seed: int
    params: dict = field(default_factory=dict)

    @classmethod
    def from_preset(cls, name: str, n: int | None, seed: int) -> "GenSpec":
        if name not in PRESETS:
            raise GeneratorError(f"unknown preset {name!r}")
        preset = PRESETS[name]
        n = preset.get("n", n) if n is None else n
        if n is None:
            raise GeneratorError(f"preset {name!r} needs --n")
        return cls(preset["distribution"], n, seed, dict(preset["params"]))

    def generate(self) -> Instance:
        kw = dict(self.params)
        if self.distribution == "realistic_random":
            return gen_realistic_random(self.n, self.seed, **kw)
        if self.distribution == "breq":
            return gen_breq(self.n, self.seed, **kw)
        if self.distribution == "subset_sum":
            return gen_subset_sum(self.n, kw["w_min"], kw["w_max"], kw["c_min"],
                                  kw["c_max"], self.seed)
        if self.distribution == "strong_corr":
            c_range = kw.pop("c_range", None)
            if c_range is None:
                c_range = (concat_n(20, self.n), concat_n(100, self.n))
            return gen_strong_corr(self.n, kw.pop("alpha"), kw.pop("w_min"),
                                   tuple(c_range), self.seed, **kw)
        raise GeneratorError(f"unknown distribution {self.distribution!r}")
