"""Pricing time of the four column-generation variants plus the MTU1 pricer.

Random BPP instances; writes one per-iteration trace CSV per variant.

    python scripts/colgen_variants.py --n 200 --capacity 10000 --outdir results/colgen
"""

from __future__ import annotations

import argparse
import random
from dataclasses import asdict, dataclass
from pathlib import Path

from ukp.colgen import ColGenConfig, CspInstance, column_generation, write_trace


@dataclass
class Config:
    n: int = 200
    capacity: int = 10000
    seed: int = 0
    outdir: str = "results/colgen"


def make_instance(cfg: Config) -> CspInstance:
    rng = random.Random(cfg.seed)
    sizes = rng.sample(range(cfg.capacity // 50, cfg.capacity * 3 // 4), cfg.n)
    return CspInstance(cfg.capacity, sizes, [rng.randint(1, 20) for _ in sizes])


def main() -> None:
    cfg = Config()
    parser = argparse.ArgumentParser(description=__doc__)
    for name, value in asdict(cfg).items():
        parser.add_argument(f"--{name}", type=type(value), default=value)
    cfg = Config(**vars(parser.parse_args()))

    inst = make_instance(cfg)
    out = Path(cfg.outdir)
    out.mkdir(parents=True, exist_ok=True)
    variants = [ColGenConfig("oso", s, p) for s in ("efficiency", "weight")
                for p in ("native", "scaled")] + [ColGenConfig("mtu1", "efficiency", "scaled")]
    print(f"{'pricer':<6} {'sort':<10} {'profit':<7} {'lp_value':>18} {'iters':>6} "
          f"{'pricing_s':>10} {'master_s':>9}")
    for v in variants:
        state = column_generation(inst, v)
        write_trace(state, out / f"{v.pricer}_{v.sort_by}_{v.profit}.csv")
        print(f"{v.pricer:<6} {v.sort_by:<10} {v.profit:<7} {state.lp_value:>18.10f} "
              f"{state.iterations:>6} {sum(state.pricing_times):>10.3f} {sum(state.master_times):>9.3f}")


if __name__ == "__main__":
    main()
