"""Command-line interface: ``conicgames <command> ...``.

Exit codes: 0 success, 2 infeasible or pathology detected, 3 solver could
not decide, 4 bad input.
"""

import argparse
import json
import sys

import numpy as np

from . import fileio, instances
from .diagnosis import NONZERO, PATHOLOGY, UNTESTED, classify
from .exceptions import SolverFailure
from .game import verify_equilibrium
from .reduction import ReductionParams, build_shifted_pair, choose_lambda, solve_game
from .solver import DUAL_INFEASIBLE, OPTIMAL, PRIMAL_INFEASIBLE, SolverOptions, solve_pair

EXIT_OK, EXIT_INFEASIBLE, EXIT_UNKNOWN, EXIT_INPUT = 0, 2, 3, 4


class InputError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [float(t) for t in obj.ravel()]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if np.isfinite(f) else str(f)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit(args, payload):
    text = payload if isinstance(payload, str) else json.dumps(_jsonable(payload), indent=2) + "\n"
    if args.out:
        fileio.write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _read(path, parser):
    try:
        return parser(fileio.read_text(path))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _opts(args):
    return SolverOptions(feas_tol=args.tol, gap_tol=args.tol, max_iter=args.max_iter, verbose=args.verbose)


# -- commands ----------------------------------------------------------------

def cmd_solve(args):
    G = _read(args.game, fileio.parse_game)
    sol = solve_game(G, _opts(args))
    _emit(args, {
        "value": sol.value, "x_star": sol.x_star, "y_star": sol.y_star,
        "lambda": sol.params.lam, "kappa": sol.params.kappa,
        "residuals": {"I": sol.report.residual_I, "II": sol.report.residual_II},
        "iterations": sol.iterations,
    })
    return EXIT_OK


def cmd_solve_pair(args):
    pair = _read(args.pair, fileio.parse_pair)
    res = solve_pair(pair, _opts(args))
    _emit(args, {"status": res.status, "primal_obj": res.primal_obj, "dual_obj": res.dual_obj,
                 "x": res.x, "y": res.y})
    if res.status == OPTIMAL:
        return EXIT_OK
    return EXIT_INFEASIBLE if res.status in (PRIMAL_INFEASIBLE, DUAL_INFEASIBLE) else EXIT_UNKNOWN


def cmd_diagnose(args):
    pair = _read(args.pair, fileio.parse_pair)
    alpha = _read(args.alpha, fileio.parse_vector) if args.alpha else None
    beta = _read(args.beta, fileio.parse_vector) if args.beta else None
    try:
        d = classify(pair, _opts(args), alpha, beta)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(args, {
        "game_value": d.game_value, "case": d.case, "strict_P": d.strict_P, "strict_D": d.strict_D,
        "bI_meets_cperp": d.bI_meets_cperp, "bII_meets_bperp": d.bII_meets_bperp,
        "ranges": d.ranges, "rescue": d.rescue, "pair_values": d.pair_values,
        "witnesses": {k: v for k, v in d.witnesses.items() if v is not None}, "notes": d.notes,
    })
    if d.case == PATHOLOGY:
        return EXIT_INFEASIBLE
    if d.case is None or (d.case != NONZERO and UNTESTED in (d.strict_P, d.strict_D)):
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_verify(args):
    G = _read(args.game, fileio.parse_game)
    x = _read(args.x, fileio.parse_vector)
    y = _read(args.y, fileio.parse_vector)
    try:
        rep = verify_equilibrium(G, x, y, args.tol)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(args, {"payoff": rep.v_hat, "residual_I": rep.residual_I, "residual_II": rep.residual_II,
                 "equilibrium": rep.ok})
    return EXIT_OK if rep.ok else EXIT_INFEASIBLE


def cmd_reduce(args):
    G = _read(args.game, fileio.parse_game)
    lam = choose_lambda(G) if args.lam is None else args.lam
    kappa = 0.75 if args.kappa is None else args.kappa
    try:
        params = ReductionParams(lam, kappa)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(args, fileio.dumps(fileio.pair_record(build_shifted_pair(G, params))))
    return EXIT_OK


def _param_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def cmd_instance(args):
    params = {}
    for item in args.param:
        key, sep, val = item.partition("=")
        if not sep:
            raise InputError(f"--param needs key=value, got {item!r}")
        params[key] = _param_value(val)
    fam = args.family
    try:
        if fam == "matrix":
            rec = fileio.game_record(instances.matrix_game(params.pop("R")))
        elif fam == "sdp":
            rec = fileio.game_record(instances.sdp_game(params.pop("T")))
        elif fam == "polynomial":
            rec = fileio.game_record(instances.polynomial_game(params.pop("p")))
        elif fam == "example44":
            variant = params.pop("variant", "original")
            param = params.pop(variant, None) if variant in ("rho", "sigma") else None
            G, pair = instances.example44(variant, param)
            rec = fileio.game_record(G, pair)
        else:
            raise InputError(f"unknown family {fam!r}")
    except KeyError as exc:
        raise InputError(f"family {fam!r} needs --param {exc.args[0]}=...") from None
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None
    if params:
        raise InputError(f"unused parameters: {sorted(params)}")
    _emit(args, fileio.dumps(rec))
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8, help="solver feasibility and gap tolerance")
    common.add_argument("--max-iter", type=int, default=200)
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--verbose", action="store_true", help="log solver iterations to stderr")

    p = argparse.ArgumentParser(prog="conicgames", description="Conic games and conic-pair diagnostics.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="value and saddle point of a game")
    s.add_argument("--game", required=True)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("solve-pair", parents=[common], help="solve a primal-dual conic pair")
    s.add_argument("--pair", required=True)
    s.set_defaults(func=cmd_solve_pair)

    s = sub.add_parser("diagnose", parents=[common], help="strict feasibility and duality-gap diagnosis")
    s.add_argument("--pair", required=True)
    s.add_argument("--alpha")
    s.add_argument("--beta")
    s.set_defaults(func=cmd_diagnose)

    s = sub.add_parser("verify", parents=[common], help="check a strategy pair is an equilibrium")
    s.add_argument("--game", required=True)
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s.set_defaults(func=cmd_verify, tol=1e-6)

    s = sub.add_parser("reduce", parents=[common], help="emit the shifted conic pair of a game")
    s.add_argument("--game", required=True)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--kappa", type=float)
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("instance", parents=[common], help="emit a built-in instance")
    s.add_argument("--family", required=True, choices=["matrix", "sdp", "polynomial", "example44"])
    s.add_argument("--param", action="append", default=[], metavar="K=V")
    s.set_defaults(func=cmd_instance)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN


if __name__ == "__main__":
    sys.exit(main())
