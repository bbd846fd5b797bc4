"""Inner-loop work of OSO with and without the equal-profit tiebreak.

    python scripts/tiebreak_effect.py --count 10 --n 300
"""

from __future__ import annotations

import argparse
from dataclasses import asdict, dataclass

from ukp.dp import solve_oso
from ukp.gen import gen_strong_corr, gen_subset_sum


@dataclass
class Config:
    count: int = 10
    n: int = 300


def main() -> None:
    cfg = Config()
    parser = argparse.ArgumentParser(description=__doc__)
    for name, value in asdict(cfg).items():
        parser.add_argument(f"--{name}", type=type(value), default=value)
    cfg = Config(**vars(parser.parse_args()))

    print(f"{'dataset':<12} {'seed':>4} {'with':>14} {'without':>14} {'time_with':>10} {'time_without':>12}")
    for seed in range(cfg.count):
        for name, inst in (
            ("subset_sum", gen_subset_sum(cfg.n, 100, 50000, 500000, 10**6, seed)),
            ("strong_corr", gen_strong_corr(cfg.n, -5, 2000, (200000, 400000), seed)),
        ):
            a, b = solve_oso(inst), solve_oso(inst, tiebreak=False)
            assert a.optimal_value == b.optimal_value
            print(f"{name:<12} {seed:>4} {a.stats['inner_iterations']:>14} "
                  f"{b.stats['inner_iterations']:>14} {a.elapsed:>10.3f} {b.elapsed:>12.3f}")


if __name__ == "__main__":
    main()
