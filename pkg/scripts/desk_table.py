"""Generate a desk-scale suite per distribution and print fin/avg/sd/max per solver.

    python scripts/desk_table.py --n 2000 --count 5 --timeout 60 --out results/desk.csv
"""

from __future__ import annotations

import argparse
from dataclasses import asdict, dataclass
from pathlib import Path

from ukp.bench import format_summary, run_matrix, summarize, write_report
from ukp.core import write_instance
from ukp.gen import GenSpec


@dataclass
class Config:
    n: int = 2000
    count: int = 5
    timeout: float = 60.0
    algs: str = "oso,tso,gfdp,mtu1,mtu2"
    workdir: str = "results/desk"
    out: str = "results/desk.csv"


def suite(cfg: Config) -> list[GenSpec]:
    n = cfg.n
    specs = []
    for seed in range(cfg.count):
        specs += [
            GenSpec("subset_sum", n, seed, {"w_min": 10**3, "w_max": 5 * 10**5,
                                            "c_min": 5 * 10**6, "c_max": 10**7}),
            GenSpec("strong_corr", n, seed, {"alpha": -5, "w_min": 110000, "w_max": 110000 + n}),
            GenSpec("breq", n, seed),
            GenSpec("realistic_random", n, seed),
        ]
    return specs


def main() -> None:
    cfg = Config()
    parser = argparse.ArgumentParser(description=__doc__)
    for name, value in asdict(cfg).items():
        parser.add_argument(f"--{name.replace('_', '-')}", type=type(value), default=value)
    cfg = Config(**vars(parser.parse_args()))

    files = []
    for spec in suite(cfg):
        path = Path(cfg.workdir) / spec.distribution / f"n{spec.n}_s{spec.seed}.ukp"
        path.parent.mkdir(parents=True, exist_ok=True)
        write_instance(spec.generate(), path)
        files.append(str(path))
    rows = run_matrix(files, cfg.algs.split(","), cfg.timeout)
    Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
    write_report(rows, cfg.out, asdict(cfg))
    print(format_summary(summarize(rows)))


if __name__ == "__main__":
    main()
