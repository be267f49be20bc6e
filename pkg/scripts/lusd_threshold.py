"""Success rates of the dual search just at and just above the generic LUSD threshold."""
import argparse
import json
from dataclasses import asdict, dataclass

from entsub.lusd import threshold_demo
from entsub.secant_dims import Resource


@dataclass
class Config:
    dims: str = "2,2"
    resource: str = "none"
    trials: int = 50
    seed: int = 0
    starts: int = 8


def main():
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(Config()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    cfg = Config(**vars(p.parse_args()))
    dims = tuple(int(x) for x in cfg.dims.split(","))
    stats = threshold_demo(dims, Resource.parse(cfg.resource), cfg.trials, cfg.seed, cfg.starts)
    print(json.dumps({"config": asdict(cfg), "result": stats.to_dict()}, indent=2))


if __name__ == "__main__":
    main()
