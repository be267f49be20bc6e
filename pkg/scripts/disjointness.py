"""How often a random plane of each codimension meets the r-th secant variety."""
import argparse
from dataclasses import dataclass

from entsub.secant_dims import VarietySpec, secant_dim
from entsub.verification import generic_disjointness_trial


@dataclass
class Config:
    dims: str = "3,3,2"
    r: int = 2
    trials: int = 10
    starts: int = 16
    seed: int = 0
    window: int = 2


def main():
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(Config()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    cfg = Config(**vars(p.parse_args()))
    spec = VarietySpec.segre(tuple(int(x) for x in cfg.dims.split(",")), cfg.r)
    sec = secant_dim(spec)
    print(f"dim sigma_{cfg.r} = {sec.value} ({sec.status}); a plane of codim c meets it iff c <= dim")
    lo = max(1, sec.value - cfg.window + 1)
    hi = min(spec.ambient_affine_dim - 1, sec.value + cfg.window)
    for codim in range(lo, hi + 1):
        stats = generic_disjointness_trial(spec, codim, cfg.trials, cfg.seed, cfg.starts)
        print(f"codim {codim:3d}: {stats.hits:3d}/{stats.trials} hits")


if __name__ == "__main__":
    main()
