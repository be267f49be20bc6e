"""Print secant dimensions and maximal r-entangled subspace dimensions over a parameter sweep."""
import argparse
import itertools
from dataclasses import dataclass

from entsub.secant_dims import VarietySpec, max_entangled_dim, secant_dim, terracini_dim


@dataclass
class Config:
    max_d: int = 5
    max_m: int = 3
    max_r: int = 3
    check_numerically: bool = False


def rows(cfg: Config):
    kinds = {"segre": "standard", "veronese": "symmetric", "grassmannian": "antisymmetric"}
    for m in range(2, cfg.max_m + 1):
        for d in range(2, cfg.max_d + 1):
            for r in range(1, cfg.max_r + 1):
                specs = [VarietySpec.segre((d,) * m, r), VarietySpec.veronese(d, m, r)]
                if m <= d:
                    specs.append(VarietySpec.grassmannian(d, m, r))
                for spec in specs:
                    sec = secant_dim(spec)
                    ent = max_entangled_dim(kinds[spec.kind], spec.dims, r)
                    num = terracini_dim(spec) if cfg.check_numerically else None
                    yield spec, sec, ent, num


def main():
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(Config()).items():
        if isinstance(default, bool):
            p.add_argument(f"--{name.replace('_', '-')}", action="store_true")
        else:
            p.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    cfg = Config(**vars(p.parse_args()))
    header = f"{'variety':<14}{'dims':<14}{'r':>3}{'dim sigma_r':>13}{'status':>22}{'max ent':>9}"
    print(header + (f"{'terracini':>11}" if cfg.check_numerically else ""))
    for spec, sec, ent, num in rows(cfg):
        line = f"{spec.kind:<14}{str(spec.dims):<14}{spec.r:>3}{sec.value:>13}{sec.status:>22}{ent.value:>9}"
        if num is not None:
            flag = "" if num == sec.value else "  <- defective"
            line += f"{num:>11}{flag}"
        print(line)


if __name__ == "__main__":
    main()
