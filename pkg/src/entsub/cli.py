"""``entsub`` command line: JSON reports for every module.

Exit codes: 0 success or verdict produced, 2 invalid input, 3 inconclusive.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .constructions import (
    ConstructionParams,
    antisymmetric_bipartite_basis,
    antisymmetric_multipartite_r1_subspace,
    four_qubit_basis,
    qutrit_qutrit_qubit_basis,
    qutrit_qutrit_qubit_element,
    symmetric_bipartite_basis,
    symmetric_multipartite_r1_basis,
)
from .grassmann import Subspace, complementary_minor_check, random_subspace, span_of
from .lusd import LusdInstance, LusdTolerances, find_duals, threshold_demo
from .secant_dims import Resource, VarietySpec, max_entangled_dim, max_witness_neg_eigs, secant_dim
from .tensor_core import Symmetry, as_tensor
from .verification import (
    INCONCLUSIVE,
    NoCertificateError,
    SearchOptions,
    appendix_certificate,
    brute_force_rank3_certificate,
    search_low_rank_element,
)
from .witnesses import witness_report

EXIT_OK, EXIT_INVALID, EXIT_INCONCLUSIVE = 0, 2, 3
REPORT_VERSION = 1
SEED_ENV = "ENTSUB_SEED"


class InvalidInput(ValueError):
    pass


@dataclass
class RunConfig:
    seed: int = 0
    starts: int | None = None
    tolerances: dict[str, float] = field(default_factory=dict)
    output_path: str | None = None
    format: str = "json"

    def __post_init__(self):
        if not -(2 ** 63) <= self.seed < 2 ** 64:
            raise InvalidInput("seed must fit in 64 bits")
        for name, val in self.tolerances.items():
            if not val > 0:
                raise InvalidInput(f"tolerance {name} must be positive")
        if self.format not in ("json", "text"):
            raise InvalidInput("format must be json or text")


# serialization

def tensor_to_json(t: np.ndarray) -> dict:
    t = np.asarray(t, dtype=complex)
    return {"shape": list(t.shape), "data": [[float(z.real), float(z.imag)] for z in t.ravel()]}


def tensor_from_json(obj) -> np.ndarray:
    try:
        shape = tuple(int(d) for d in obj["shape"])
        data = np.array([complex(re, im) for re, im in obj["data"]], dtype=complex)
        return as_tensor(data, shape)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed tensor: {exc}") from exc


def subspace_to_json(sub: Subspace) -> dict:
    return {"ambient_shape": list(sub.ambient_shape), "symmetry": sub.symmetry.value,
            "basis": [tensor_to_json(b) for b in sub.basis]}


def subspace_from_json(obj) -> Subspace:
    """Stored orthonormal bases are kept bit for bit; other bases are re-orthonormalized."""
    try:
        shape = tuple(int(d) for d in obj["ambient_shape"])
        symmetry = Symmetry(obj.get("symmetry", "none"))
        basis = [tensor_from_json(b) for b in obj["basis"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed subspace: {exc}") from exc
    if any(b.shape != shape for b in basis):
        raise InvalidInput("basis tensor shape differs from ambient_shape")
    try:
        return Subspace(shape, symmetry, np.array(basis).reshape((len(basis),) + shape))
    except ValueError:
        try:
            return span_of(basis, symmetry=symmetry)
        except ValueError as exc:
            raise InvalidInput(f"invalid subspace: {exc}") from exc


def dumps(obj) -> str:
    # json emits the shortest repr that round-trips each float exactly
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise InvalidInput(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc}") from exc


def load_subspace(path: str) -> Subspace:
    return subspace_from_json(load_json(path))


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise InvalidInput(f"expected comma-separated integers, got {text!r}") from exc


def _complexes(text: str) -> list[complex]:
    try:
        return [complex(x.replace(" ", "")) for x in text.split(",")]
    except ValueError as exc:
        raise InvalidInput(f"expected comma-separated numbers, got {text!r}") from exc


def _params(path: str | None) -> ConstructionParams:
    if path is None:
        return ConstructionParams()
    obj = load_json(path)
    try:
        return ConstructionParams(**{k: tuple(v) for k, v in obj.items()})
    except TypeError as exc:
        raise InvalidInput(f"bad params file: {exc}") from exc


# commands: each returns (outputs, formulas, exit code)

def cmd_dims(args, cfg):
    kind = {"standard": "segre", "symmetric": "veronese", "antisymmetric": "grassmannian"}.get(args.kind, args.kind)
    spec = VarietySpec(kind, _ints(args.dims), args.r)
    sec = secant_dim(spec)
    sub_kind = {"segre": "standard", "veronese": "symmetric", "grassmannian": "antisymmetric"}[kind]
    ent = max_entangled_dim(sub_kind, spec.dims, args.r)
    wit = max_witness_neg_eigs(sub_kind, spec.dims, args.r)
    out = sec.to_dict() | {"max_entangled_dim": ent.to_dict(), "max_witness_neg_eigs": wit.to_dict()}
    return out, [sec.formula, ent.formula, wit.formula], EXIT_OK


def cmd_construct(args, cfg):
    k = args.kind
    if k == "sym-bipartite":
        sub = symmetric_bipartite_basis(args.d, args.r)
    elif k == "antisym-bipartite":
        sub = antisymmetric_bipartite_basis(args.d, args.r)
    elif k == "sym-multipartite":
        sub = symmetric_multipartite_r1_basis(args.d, args.m)
    elif k == "antisym-multipartite":
        sub = antisymmetric_multipartite_r1_subspace(args.d, args.m)
    elif k == "qutrit-qutrit-qubit":
        sub = qutrit_qutrit_qubit_basis(_params(args.params_file))
    else:
        sub = four_qubit_basis(_params(args.params_file))
    payload = subspace_to_json(sub)
    if args.out:
        Path(args.out).write_text(dumps(payload))
    out = {"kind": k, "affine_dim": sub.dim, "projective_dim": sub.projective_dim,
           "subspace_file": args.out, "subspace": None if args.out else payload}
    return out, [], EXIT_OK


def cmd_verify(args, cfg):
    sub = load_subspace(args.subspace)
    opts = SearchOptions(**{k: v for k, v in cfg.tolerances.items() if k in ("tau_zero", "tau_pos", "rank_tol")})
    rep = search_low_rank_element(sub, args.r, starts=cfg.starts or 64, seed=cfg.seed, opts=opts)
    return rep.to_dict(), [], EXIT_INCONCLUSIVE if rep.verdict == INCONCLUSIVE else EXIT_OK


def cmd_certify_qqq(args, cfg):
    c = _complexes(args.coeffs)
    if len(c) != 6:
        raise InvalidInput("--coeffs needs 6 values: lambda,gamma,c_delta,c_epsilon,c_theta,c_kappa")
    params = _params(args.params_file)
    t = qutrit_qutrit_qubit_element(c[0], c[1], c[2:4], c[4:6], params)
    bf = brute_force_rank3_certificate(t)
    out = {"brute_force": None if bf is None else bf.to_dict()}
    try:
        out["certificate"] = appendix_certificate(c[0], c[1], c[2:4], c[4:6], params).to_dict()
    except NoCertificateError as exc:
        out["certificate"] = None
        out["reason"] = str(exc)
    return out, [], EXIT_OK


def cmd_witness(args, cfg):
    sub = load_subspace(args.subspace)
    rep = witness_report(sub, args.r, starts=cfg.starts or 256, seed=cfg.seed)
    return rep.to_dict(), [], EXIT_OK


def _lusd_tols(cfg) -> LusdTolerances:
    return LusdTolerances(**{k: v for k, v in cfg.tolerances.items() if k in ("diag", "off", "rank")})


def cmd_lusd(args, cfg):
    resource = Resource.parse(args.resource)
    dims = _ints(args.dims)
    if args.states:
        states = [tensor_from_json(s) for s in load_json(args.states)]
        inst = LusdInstance(dims, tuple(states), resource)
    else:
        if args.n is None:
            raise InvalidInput("give --n or --states")
        inst = LusdInstance.random(dims, args.n, resource, seed=[cfg.seed, args.n])
    rep = find_duals(inst, starts=cfg.starts or 8, seed=cfg.seed, tols=_lusd_tols(cfg))
    return rep.to_dict(), [], EXIT_OK if rep.success else EXIT_INCONCLUSIVE


def cmd_lusd_threshold(args, cfg):
    stats = threshold_demo(_ints(args.dims), Resource.parse(args.resource), trials=args.trials,
                           seed=cfg.seed, starts=cfg.starts or 8)
    return stats.to_dict(), [], EXIT_OK


def cmd_grassmann_check(args, cfg):
    if args.subspace:
        sub = load_subspace(args.subspace)
    else:
        sub = random_subspace((args.d,), args.n, seed=cfg.seed)
    ok, dev = complementary_minor_check(sub, cfg.tolerances.get("tol", 1e-9))
    return {"passed": ok, "max_deviation": dev, "ambient_dim": sub.ambient_dim, "affine_dim": sub.dim}, [], EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
    common.add_argument("--starts", type=int, default=None)
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE")
    common.add_argument("--output", default=None, help="report path (default stdout)")
    common.add_argument("--format", choices=("json", "text"), default="json")

    p = argparse.ArgumentParser(prog="entsub", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sp = p.add_subparsers(dest="command", required=True)

    q = sp.add_parser("dims", parents=[common])
    q.add_argument("--kind", required=True,
                   choices=("segre", "veronese", "grassmannian", "standard", "symmetric", "antisymmetric"))
    q.add_argument("--dims", required=True, help="segre: d1,...,dm; veronese/grassmannian: d,m")
    q.add_argument("--r", type=int, default=1)
    q.set_defaults(func=cmd_dims)

    q = sp.add_parser("construct", parents=[common])
    q.add_argument("kind", choices=("sym-bipartite", "antisym-bipartite", "sym-multipartite",
                                    "antisym-multipartite", "qutrit-qutrit-qubit", "four-qubit"))
    q.add_argument("--d", type=int)
    q.add_argument("--m", type=int, default=2)
    q.add_argument("--r", type=int, default=1)
    q.add_argument("--params-file")
    q.add_argument("--out", help="write the subspace file here")
    q.set_defaults(func=cmd_construct)

    q = sp.add_parser("verify", parents=[common])
    q.add_argument("--subspace", required=True)
    q.add_argument("--r", type=int, default=2)
    q.set_defaults(func=cmd_verify)

    q = sp.add_parser("certify-qqq", parents=[common])
    q.add_argument("--coeffs", required=True, help="lambda,gamma,c_delta,c_epsilon,c_theta,c_kappa")
    q.add_argument("--params-file")
    q.set_defaults(func=cmd_certify_qqq)

    q = sp.add_parser("witness", parents=[common])
    q.add_argument("--subspace", required=True)
    q.add_argument("--r", type=int, default=2)
    q.set_defaults(func=cmd_witness)

    q = sp.add_parser("lusd", parents=[common])
    q.add_argument("--dims", required=True)
    q.add_argument("--resource", default="none")
    q.add_argument("--n", type=int)
    q.add_argument("--states", help="JSON list of tensors")
    q.set_defaults(func=cmd_lusd)

    q = sp.add_parser("lusd-threshold", parents=[common])
    q.add_argument("--dims", required=True)
    q.add_argument("--resource", default="none")
    q.add_argument("--trials", type=int, default=50)
    q.set_defaults(func=cmd_lusd_threshold)

    q = sp.add_parser("grassmann-check", parents=[common])
    q.add_argument("--subspace")
    q.add_argument("--d", type=int, default=6)
    q.add_argument("--n", type=int, default=3)
    q.set_defaults(func=cmd_grassmann_check)
    return p


def _config(args) -> RunConfig:
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = int(env) if env else 0
        except ValueError as exc:
            raise InvalidInput(f"{SEED_ENV} must be an integer") from exc
    tols = {}
    for item in args.tol:
        name, sep, val = item.partition("=")
        if not sep:
            raise InvalidInput(f"--tol expects NAME=VALUE, got {item!r}")
        try:
            tols[name] = float(val)
        except ValueError as exc:
            raise InvalidInput(f"tolerance {name} is not a number") from exc
    if args.starts is not None and args.starts < 1:
        raise InvalidInput("--starts must be >= 1")
    return RunConfig(seed, args.starts, tols, args.output, args.format)


def _text(obj, prefix="") -> list[str]:
    if isinstance(obj, dict):
        return [line for k, v in obj.items() for line in _text(v, f"{prefix}{k}.")]
    return [f"{prefix.rstrip('.')}: {obj}"]


def run(argv=None) -> tuple[int, dict | None]:
    """Parse, execute and emit; returns the exit code and the report."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None
    inputs = {k: v for k, v in vars(args).items()
              if k not in ("func", "command", "seed", "starts", "tol", "output", "format")}
    try:
        cfg = _config(args)
        outputs, formulas, code = args.func(args, cfg)
    except (InvalidInput, ValueError, NotImplementedError) as exc:
        print(f"entsub: error: {exc}", file=sys.stderr)
        return EXIT_INVALID, None
    report = {
        "version": REPORT_VERSION,
        "command": args.command,
        "inputs": inputs,
        "config": asdict(cfg),
        "outputs": outputs,
        "provenance": {"tool": f"entsub {__version__}", "formulas": formulas},
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    text = dumps(report) if cfg.format == "json" else "\n".join(_text(report)) + "\n"
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        sys.stdout.write(text)
    return code, report


def main(argv=None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
