"""Command-line front end: classify, football-solve, football-sweep, expand, adams-check.

All JSON goes to stdout with a top-level schema marker and sorted keys so
identical runs are byte-identical; CSV artifacts land next to stdout or at
paths resolved against CONICQ_OUTPUT_DIR when relative.  Exit codes: 0 on
success, 2 on domain errors (resonance, unbracketed root, bad divisor),
64 on usage errors, 1 on anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

from . import adams, geometry, polyexp, shooting

SCHEMA = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we want 64
        raise UsageError(message)


def _out_path(path: str) -> str:
    base = os.environ.get("CONICQ_OUTPUT_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _emit(obj: dict) -> None:
    obj.setdefault("schema", SCHEMA)
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def build_parser() -> _Parser:
    p = _Parser(prog="conicq", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0,
                   help="seed echoed into outputs for reproducibility bookkeeping")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="criticality trichotomy of a conic divisor")
    c.add_argument("--kg0-pi2", type=float, required=True,
                   help="background total curvature in units of pi^2")
    c.add_argument("--betas", type=str, required=True,
                   help="comma-separated cone indices, each in (-1, 0)")
    c.add_argument("--dimension", type=int, default=4, help="even dimension >= 4")
    c.add_argument("--tol-pi2", type=float, default=None,
                   help="width of the critical band in units of pi^2")

    f = sub.add_parser("football-solve", help="bounded radial two-cone solution")
    f.add_argument("--p", type=float, default=None, help="shooting parameter v''(0) < 0")
    f.add_argument("--beta", type=float, default=None,
                   help="target cone index (solves for p)")
    f.add_argument("--q-tol", type=float, default=1e-10, help="bisection width on q")
    f.add_argument("--ode-tol", type=float, default=1e-10, help="integrator tolerance")
    f.add_argument("--t-max", type=float, default=30.0, help="membership horizon")
    f.add_argument("--csv", type=str, default=None, help="trajectory dump path")

    s = sub.add_parser("football-sweep", help="solve for each p in a grid (JSON lines)")
    s.add_argument("--p-grid", type=str, required=True, help="comma-separated p values")
    s.add_argument("--q-tol", type=float, default=1e-10)
    s.add_argument("--ode-tol", type=float, default=1e-10)
    s.add_argument("--t-max", type=float, default=30.0)

    e = sub.add_parser("expand", help="formal asymptotic expansion near a cone point")
    e.add_argument("--beta", type=str, required=True,
                   help="rational cone index in (-1, 0), e.g. -1/2")
    e.add_argument("--jets", type=str, default="zero",
                   help="'zero' or a JSON file of homogeneous jet polynomials")
    e.add_argument("--order", type=str, required=True,
                   help="rational r-power through which to certify, e.g. 2 or 7/4")
    e.add_argument("--format", choices=["json"], default="json")

    a = sub.add_parser("adams-check", help="weighted exponential functional on the "
                                           "truncated-log family (CSV depth,rho,value)")
    a.add_argument("--beta", type=float, required=True, help="cone index in (-1, 0)")
    a.add_argument("--family-depth", type=int, default=12)
    a.add_argument("--b-factor", type=float, default=0.9,
                   help="multiple of the sharp constant 32 pi^2 (1 + beta)")
    a.add_argument("--csv", type=str, default=None, help="write CSV here instead of stdout")
    return p


def _cmd_classify(args) -> int:
    betas = [float(x) for x in args.betas.split(",") if x.strip()]
    divisor = geometry.ConicDivisor.from_betas(betas)
    inp = geometry.ClassificationInput(k_g0_pi2=args.kg0_pi2, divisor=divisor,
                                       dimension=args.dimension)
    result = geometry.classify(inp, tol_pi2=args.tol_pi2)
    _emit({
        "label": result.label,
        "margin_pi2": result.margin_pi2,
        "beta_min": result.beta_min,
        "total_pi2": geometry.total_q_integral_pi2(inp),
        "seed": args.seed,
    })
    return 0


def _solution_json(sol: shooting.FootballSolution, seed: int) -> dict:
    report = shooting.reconstruct(sol)
    return {
        "p": sol.p,
        "q0": sol.q0,
        "q0_err": sol.q0_err,
        "alpha": sol.alpha,
        "beta": sol.beta,
        "c": sol.c,
        "alpha_residual": sol.alpha_residual,
        "total_curvature_pi2": report.total_curvature_pi2,
        "gbc_residual": report.gbc_residual_rel,
        "iters": sol.bisection_iters,
        "seed": seed,
    }


def _cmd_football_solve(args) -> int:
    if (args.p is None) == (args.beta is None):
        raise UsageError("provide exactly one of --p or --beta")
    if args.p is not None:
        cfg = shooting.ShootingConfig(p=args.p, q_tol=args.q_tol,
                                      ode_tol=args.ode_tol, t_max=args.t_max)
        sol = shooting.find_q0(cfg)
    else:
        cfg = shooting.ShootingConfig(p=-1.0, q_tol=args.q_tol,
                                      ode_tol=args.ode_tol, t_max=args.t_max)
        sol = shooting.solve_for_beta(args.beta, cfg)
    _emit(_solution_json(sol, args.seed))
    if args.csv:
        with open(_out_path(args.csv), "w") as fh:
            sol.trajectory.write_csv(fh)
    return 0


def _cmd_football_sweep(args) -> int:
    ps = [float(x) for x in args.p_grid.split(",") if x.strip()]
    if not ps:
        raise UsageError("empty --p-grid")
    for p in ps:
        cfg = shooting.ShootingConfig(p=p, q_tol=args.q_tol,
                                      ode_tol=args.ode_tol, t_max=args.t_max)
        _emit(_solution_json(shooting.find_q0(cfg), args.seed))
    return 0


def _load_jets(spec: str) -> list[polyexp.HomPoly]:
    if spec == "zero":
        return []
    with open(spec) as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError("jets file must hold a JSON array of polynomial objects")
    return [polyexp.poly_from_json(obj) for obj in data]


def _cmd_expand(args) -> int:
    beta = Fraction(args.beta)
    order = Fraction(args.order)
    jets = _load_jets(args.jets)
    expansion = polyexp.formal_expansion(beta, jets, order)
    residual = polyexp.verify_residual(expansion, beta, order)
    payload = polyexp.expansion_to_json(expansion)
    payload.update({
        "beta": str(beta),
        "order": str(order),
        "residual_terms": len(residual),
        "seed": args.seed,
    })
    _emit(payload)
    return 0


def _cmd_adams_check(args) -> int:
    sharp = adams.b_constant(4) * (1.0 + args.beta)
    rows = adams.sharpness_probe(args.beta, args.b_factor * sharp, args.family_depth)
    lines = ["depth,rho,value"] + [f"{d},{rho!r},{val!r}" for d, rho, val in rows]
    text = "\n".join(lines) + "\n"
    if args.csv:
        with open(_out_path(args.csv), "w") as fh:
            fh.write(text)
        _emit({"rows": len(rows), "csv": args.csv, "b": args.b_factor * sharp,
               "seed": args.seed})
    else:
        sys.stdout.write(text)
    return 0


_DOMAIN_ERRORS = (polyexp.ResonanceError, polyexp.ScopeError, shooting.BracketError,
                  geometry.DivisorError, adams.ConsistencyError, ValueError,
                  ZeroDivisionError, OSError)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 64
    handlers = {
        "classify": _cmd_classify,
        "football-solve": _cmd_football_solve,
        "football-sweep": _cmd_football_sweep,
        "expand": _cmd_expand,
        "adams-check": _cmd_adams_check,
    }
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 64
    except _DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
