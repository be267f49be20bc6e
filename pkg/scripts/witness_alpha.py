"""Estimate the critical witness parameter alpha for a constructed subspace."""
import argparse
import json
from dataclasses import asdict, dataclass

from entsub.constructions import four_qubit_basis, qutrit_qutrit_qubit_basis
from entsub.witnesses import build_witness, estimate_epsilon, negative_eig_count

SUBSPACES = {"qutrit-qutrit-qubit": qutrit_qutrit_qubit_basis, "four-qubit": four_qubit_basis}


@dataclass
class Config:
    subspace: str = "qutrit-qutrit-qubit"
    r: int = 2
    starts: int = 256
    seed: int = 7


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--subspace", choices=sorted(SUBSPACES), default=Config.subspace)
    p.add_argument("--r", type=int, default=Config.r)
    p.add_argument("--starts", type=int, default=Config.starts)
    p.add_argument("--seed", type=int, default=Config.seed)
    cfg = Config(**vars(p.parse_args()))
    sub = SUBSPACES[cfg.subspace]()
    rep = estimate_epsilon(sub, cfg.r, starts=cfg.starts, seed=cfg.seed)
    values = sorted(rep.per_start, reverse=True)
    out = {
        "config": asdict(cfg),
        "epsilon": rep.epsilon,
        "alpha": rep.alpha,
        "negative_eigs": negative_eig_count(build_witness(sub, rep.alpha)),
        "top_start_values": values[:5],
        "starts_within_1e-8_of_best": sum(v > rep.epsilon - 1e-8 for v in values),
        "note": rep.note,
    }
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
