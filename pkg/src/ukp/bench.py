"""Benchmark harness: solver x instance matrices, CSV/JSON reports and summaries."""

from __future__ import annotations

import csv
import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .bb import solve_mtu1, solve_mtu2
from .core import Instance, Termination, read_instance
from .dp import solve_gfdp, solve_naive_dp, solve_oso, solve_tso

SOLVERS = {
    "naive": solve_naive_dp,
    "oso": solve_oso,
    "tso": solve_tso,
    "gfdp": solve_gfdp,
    "mtu1": solve_mtu1,
    "mtu2": solve_mtu2,
}

BASE_COLUMNS = ["instance_id", "algorithm", "rep", "elapsed_s", "terminated_by", "optimal_value"]


class DisagreementError(AssertionError):
    pass


@dataclass
class BenchRow:
    instance_id: str
    algorithm: str
    elapsed_s: float
    terminated_by: str
    optimal_value: int | None
    stats: dict = field(default_factory=dict)
    rep: int = 0
    dataset: str = "default"
    error: str = ""


def _load(source) -> tuple[str, str, Instance]:
    if isinstance(source, tuple):
        instance_id, inst = source
        return str(instance_id), "default", inst
    path = Path(source)
    return str(path), path.parent.name or "default", read_instance(path)


def _run_one(source, algorithm: str, timeout: float | None, rep: int) -> BenchRow:
    instance_id = str(source[0] if isinstance(source, tuple) else source)
    dataset = "default"
    try:
        instance_id, dataset, inst = _load(source)
        t0 = time.monotonic()
        out = SOLVERS[algorithm](inst, timeout)
        elapsed = time.monotonic() - t0
    except Exception as exc:  # a crashing solver must not stop the matrix
        return BenchRow(instance_id, algorithm, 0.0, Termination.ERROR.value, None,
                        rep=rep, dataset=dataset, error=f"{type(exc).__name__}: {exc}")
    if out.finished:
        return BenchRow(instance_id, algorithm, elapsed, Termination.OPTIMAL.value,
                        int(out.optimal_value), dict(out.stats), rep, dataset)
    return BenchRow(instance_id, algorithm, float(timeout), Termination.TIMEOUT.value,
                    None, dict(out.stats), rep, dataset)


def run_matrix(instances: list, algorithms: list[str], timeout: float | None = None,
               repetitions: int = 1, parallel: int | None = None) -> list[BenchRow]:
    """Run every (instance, algorithm, repetition) cell, serially unless ``parallel``.

    ``instances`` holds file paths or ``(id, Instance)`` pairs. A run cut by
    the timeout is recorded as taking exactly ``timeout`` seconds.
    """
    unknown = [a for a in algorithms if a not in SOLVERS]
    if unknown:
        raise ValueError(f"unknown algorithm(s): {', '.join(unknown)}")
    cells = [(src, alg, timeout, rep) for src in instances for alg in algorithms
             for rep in range(repetitions)]
    if parallel and parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(_run_one, *zip(*cells)))
    return [_run_one(*cell) for cell in cells]


def check_agreement(rows: list[BenchRow]) -> None:
    """Raise if two optimal rows for the same instance report different values."""
    seen: dict[str, tuple[str, int]] = {}
    for row in rows:
        if row.terminated_by != Termination.OPTIMAL.value:
            continue
        prev = seen.setdefault(row.instance_id, (row.algorithm, row.optimal_value))
        if prev[1] != row.optimal_value:
            raise DisagreementError(
                f"{row.instance_id}: {prev[0]} found {prev[1]}, "
                f"{row.algorithm} found {row.optimal_value}")


def median_of_reps(rows: list[BenchRow]) -> list[BenchRow]:
    """Collapse repetitions into the row with the median elapsed time."""
    groups: dict[tuple[str, str], list[BenchRow]] = {}
    for row in rows:
        groups.setdefault((row.instance_id, row.algorithm), []).append(row)
    out = []
    for group in groups.values():
        group.sort(key=lambda r: r.elapsed_s)
        out.append(group[(len(group) - 1) // 2])
    return out


def summarize(rows: list[BenchRow]) -> dict[tuple[str, str], dict]:
    """Per (dataset, algorithm): finished runs and avg/sd/max over them only.

    Undefined statistics are ``None`` and render as ``--``.
    """
    groups: dict[tuple[str, str], list[BenchRow]] = {}
    for row in rows:
        groups.setdefault((row.dataset, row.algorithm), []).append(row)
    out = {}
    for key, group in groups.items():
        times = [r.elapsed_s for r in group if r.terminated_by == Termination.OPTIMAL.value]
        out[key] = {
            "fin": len(times),
            "runs": len(group),
            "avg": statistics.fmean(times) if times else None,
            "sd": statistics.stdev(times) if len(times) > 1 else None,
            "max": max(times) if times else None,
        }
    return out


def _cell(v) -> str:
    return "--" if v is None else f"{v:.2f}"


def format_summary(summary: dict) -> str:
    lines = [f"{'dataset':<20} {'algorithm':<8} {'fin':>5} {'avg':>10} {'sd':>10} {'max':>10}"]
    for (dataset, alg), s in sorted(summary.items()):
        lines.append(f"{dataset:<20} {alg:<8} {s['fin']:>5} {_cell(s['avg']):>10} "
                     f"{_cell(s['sd']):>10} {_cell(s['max']):>10}")
    return "\n".join(lines)


def stat_columns(rows: list[BenchRow]) -> list[str]:
    return sorted({k for r in rows for k in r.stats})


def write_csv(rows: list[BenchRow], path) -> None:
    check_agreement(rows)
    extra = stat_columns(rows)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(BASE_COLUMNS + extra)
        for r in rows:
            out.writerow([r.instance_id, r.algorithm, r.rep, f"{r.elapsed_s:.6f}",
                          r.terminated_by, "" if r.optimal_value is None else r.optimal_value]
                         + [r.stats.get(k, "") for k in extra])


def write_report(rows: list[BenchRow], csv_path, config: dict) -> Path:
    """Write the CSV and a JSON sidecar next to it; return the sidecar path."""
    write_csv(rows, csv_path)
    sidecar = Path(csv_path).with_suffix(".json")
    summary = summarize(rows)
    doc = {
        "version": __version__,
        "created": datetime.now(timezone.utc).isoformat(),
        "config": config,
        "rows": [asdict(r) for r in rows],
        "summary": [{"dataset": d, "algorithm": a, **s} for (d, a), s in sorted(summary.items())],
    }
    sidecar.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return sidecar
