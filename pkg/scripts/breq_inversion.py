"""Mean OSO vs MTU1 time on BREQ 128-16 instances as n grows.

    python scripts/breq_inversion.py --sizes 4096 8192 16384 --seeds 5
"""

from __future__ import annotations

import argparse
import statistics
from dataclasses import dataclass, field

from ukp.bb import solve_mtu1
from ukp.dp import solve_oso
from ukp.gen import gen_breq


@dataclass
class Config:
    sizes: list[int] = field(default_factory=lambda: [2**12, 2**13, 2**14])
    seeds: int = 5


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=Config().sizes)
    parser.add_argument("--seeds", type=int, default=Config.seeds)
    cfg = Config(**vars(parser.parse_args()))

    solve_oso(gen_breq(32, 0)), solve_mtu1(gen_breq(32, 0))
    print(f"{'n':>7} {'oso_s':>9} {'mtu1_s':>9} {'ratio':>7}")
    for n in cfg.sizes:
        oso, mtu = [], []
        for seed in range(cfg.seeds):
            inst = gen_breq(n, seed)
            oso.append(solve_oso(inst).elapsed)
            mtu.append(solve_mtu1(inst).elapsed)
        a, b = statistics.fmean(oso), statistics.fmean(mtu)
        print(f"{n:>7} {a:>9.3f} {b:>9.4f} {a / b:>7.1f}")


if __name__ == "__main__":
    main()
