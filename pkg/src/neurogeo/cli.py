"""Command-line interface: ``neurogeo {dim,singular,exposed,reproduce,fibers}``.

Every command prints one JSON report. Exit codes: 0 success, 2 configuration
error, 3 reference mismatch, 4 inconclusive rank certificate.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import __version__
from .critpoints import (
    cnn_fiber_witness,
    cnn_singularity_classify,
    critical_witness,
    exposedness_dimension,
)
from .fibers import (
    SparseActivationSpec,
    degree_bound,
    fiber_scaling_count,
    scaling_rigidity_check,
    sparse_decomposition_check,
)
from .geometry import generic_rank, tangent_excess_test
from .netparam import (
    CnnSpec,
    ConfigError,
    MlpSpec,
    SubnetMlpSpec,
    apply_subnetwork,
    family_map,
    load_config,
    load_subnet,
    load_weights,
    spec_to_config,
)
from .polyalg import parse_scalar
from .reproduce import TARGETS, ALIASES, reproduce

SCHEMA = "neurogeo/1"
EXIT_OK, EXIT_CONFIG, EXIT_MISMATCH, EXIT_INCONCLUSIVE = 0, 2, 3, 4


def _primes(args):
    return [args.prime] if args.prime else None


def _spec(args):
    if not args.config:
        raise ConfigError("--config is required for this command")
    return load_config(args.config)


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip()] if text else None


def cmd_dim(args) -> tuple[dict, int]:
    spec = _spec(args)
    rep = generic_rank(spec, trials=args.trials, seed=args.seed, primes=_primes(args))
    out = {"rank": rep.to_json(), "numParams": spec.num_params, "ambientDim": len(spec.basis()),
           "fullRank": rep.rank == spec.num_params, "notes": []}
    if isinstance(spec, MlpSpec):
        bound = degree_bound(spec.widths)
        out["degreeBound"] = str(bound)
        out["boundMet"] = spec.activation.degree > bound
        if spec.activation.nonzero_count() == 1:
            out["notes"].append("monomial activation: neuron-wise scalings give positive-dimensional fibers")
    code = EXIT_INCONCLUSIVE if rep.certified == "inconclusive" else EXIT_OK
    return out, code


def cmd_singular(args) -> tuple[dict, int]:
    spec = _spec(args)
    sub = load_subnet(spec, args.subnet)
    if sub is None:
        raise ConfigError("--subnet is required")
    if isinstance(spec, MlpSpec):
        rep = tangent_excess_test(spec, sub, fiber_samples=args.fiber_samples, seed=args.seed,
                                  primes=_primes(args))
        return {"kind": "mlp", "subnet": sub.to_json(), **rep.to_json()}, EXIT_OK
    cls = cnn_singularity_classify(spec, sub)
    out = {"kind": "cnn", "subnet": sub.to_json(), **cls.to_json()}
    if cls.singular or not cls.proper:
        w = load_weights(spec, args.weights) if args.weights else \
            spec.random_weights(random.Random(f"singular:{args.seed}"))
        out["witness"] = cnn_fiber_witness(spec, w, sub).to_json()
    out["verdict"] = "singular" if cls.singular else "regular"
    return out, EXIT_OK


def cmd_exposed(args) -> tuple[dict, int]:
    spec = _spec(args)
    fam = load_subnet(spec, args.family)
    rep = exposedness_dimension(spec, fam, seed=args.seed, trials=args.trials, normal=args.normal,
                                columns=_int_list(args.columns))
    out = rep.to_json()
    if isinstance(spec, MlpSpec) and isinstance(fam, SubnetMlpSpec) and fam.mode == "strict":
        W = apply_subnetwork(spec.random_weights(random.Random(f"exposed:{args.seed}")), fam, spec)
        out["witness"] = critical_witness(spec, W, seed=args.seed).to_json()
    elif fam is not None:
        out["freeWeights"] = sum(q is not None for q in family_map(spec, fam))
    code = EXIT_INCONCLUSIVE if rep.verdict == "inconclusive" else EXIT_OK
    return out, code


def cmd_reproduce(args) -> tuple[dict, int]:
    rep = reproduce(args.which, seed=args.seed, degree_cap=args.degree_cap)
    return rep.to_json(), (EXIT_OK if rep.ok else EXIT_MISMATCH)


def cmd_fibers(args) -> tuple[dict, int]:
    out: dict = {}
    spec = load_config(args.config) if args.config else None
    betas = _int_list(args.betas)
    if betas is None and isinstance(spec, MlpSpec):
        betas = list(spec.activation.support)
    if betas:
        out["scalingCount"] = fiber_scaling_count(betas).to_json()
    if isinstance(spec, MlpSpec):
        try:
            sparse = SparseActivationSpec(tuple(spec.activation.support), spec.depth)
            if spec.activation != sparse.activation:
                raise ValueError("activation coefficients are not all 1")
            out["decomposition"] = sparse_decomposition_check(spec, sparse, seed=args.seed).to_json()
        except ValueError as exc:
            out["decomposition"] = {"skipped": str(exc)}
    elif isinstance(spec, CnnSpec):
        lam = [parse_scalar(x) for x in args.scalings.split(",")] if args.scalings else \
            [2] + [1] * (spec.depth - 1)
        w = load_weights(spec, args.weights) if args.weights else \
            spec.random_weights(random.Random(f"fibers:{args.seed}"))
        out["rigidity"] = scaling_rigidity_check(spec, w, lam).to_json()
    if not out:
        raise ConfigError("give --betas or --config")
    return out, EXIT_OK


COMMANDS = {"dim": cmd_dim, "singular": cmd_singular, "exposed": cmd_exposed,
            "reproduce": cmd_reproduce, "fibers": cmd_fibers}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="architecture JSON (path or inline)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=3)
    common.add_argument("--prime", type=int, help="use this prime instead of seeded random primes")
    common.add_argument("--degree-cap", type=int, default=4)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--pretty", action="store_true", help="indented JSON")

    p = argparse.ArgumentParser(prog="neurogeo", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("dim", parents=[common], help="generic Jacobian rank and dimension")
    s = sub.add_parser("singular", parents=[common], help="singularity test for a subnetwork")
    s.add_argument("--subnet", help='JSON, e.g. {"index_sets": [[1]]} or {"paddings": [2, -1]}')
    s.add_argument("--weights", help="weights JSON (CNN witness)")
    s.add_argument("--fiber-samples", type=int)
    e = sub.add_parser("exposed", parents=[common], help="critical exposedness dimension count")
    e.add_argument("--family", help="subnetwork JSON; omit for the whole parameter space")
    e.add_argument("--normal", choices=("full", "family"), default="full")
    e.add_argument("--columns", help="comma-separated weight indices spanning the family tangent")
    r = sub.add_parser("reproduce", parents=[common], help="rerun a worked example against reference values")
    r.add_argument("which", choices=list(TARGETS) + sorted(ALIASES))
    f = sub.add_parser("fibers", parents=[common], help="scaling-fiber count, sparse decomposition, rigidity")
    f.add_argument("--betas", help="comma-separated exponents")
    f.add_argument("--scalings", help="comma-separated layer scalings (CNN rigidity)")
    f.add_argument("--weights", help="weights JSON")
    return p


def _envelope(args, result, spec_cfg) -> dict:
    return {"schema": SCHEMA, "version": __version__, "command": args.command, "seed": args.seed,
            "config": spec_cfg, "args": {k: v for k, v in sorted(vars(args).items())
                                         if k not in ("out", "pretty", "command")},
            "result": result}


def _emit(report: dict, args) -> None:
    text = json.dumps(report, sort_keys=True, indent=2 if args.pretty else None,
                      separators=None if args.pretty else (",", ":"), default=str)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = spec_to_config(load_config(args.config)) if args.config else None
        result, code = COMMANDS[args.command](args)
    except ConfigError as exc:
        report = {"schema": SCHEMA, "command": args.command, "error": str(exc)}
        sys.stderr.write(json.dumps(report, sort_keys=True) + "\n")
        return EXIT_CONFIG
    _emit(_envelope(args, result, cfg), args)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
