"""Command-line front end: ``hypomix certify | sweep | simulate``.

Exit codes: 0 certificate passed, 1 a condition failed, 2 bad input,
3 numerical failure.
"""

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .certifier import certify
from .dynamics import (
    default_time_grid,
    empirical_mixing_time,
    format_float,
    haar_state,
    heisenberg_decay,
    schrodinger_decay,
)
from .errors import (
    ConditionError,
    DependencyError,
    FrameError,
    HorizonError,
    ModelError,
    SolverError,
)
from .lindblad import exact_spectrum, model_from_json
from .models import RECIPES, build_recipe

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
NUMERIC_ERRORS = (SolverError, FrameError, np.linalg.LinAlgError, FloatingPointError)

SWEEP_COLUMNS = ("lambda_m", "lambda_M", "cm_prime", "alpha_star", "epsilon", "lambda_bound",
                 "big_c", "gap_exact", "tmix_bound", "passed", "failure")

RECIPE_FLAGS = {
    "n": int, "h": float, "gamma": float, "omega": float,
    "jx": float, "jy": float, "jz": float, "adjacency": json.loads,
}


class InputError(Exception):
    pass


def parse_grid(text):
    """``"a,b,c"``, ``"logspace:lo:hi:n"`` (base-10 exponents) or ``""``."""
    text = (text or "").strip()
    if not text:
        return []
    try:
        if text.startswith("logspace:"):
            _, lo, hi, n = text.split(":")
            return np.logspace(float(lo), float(hi), int(n)).tolist()
        if text.startswith("linspace:"):
            _, lo, hi, n = text.split(":")
            return np.linspace(float(lo), float(hi), int(n)).tolist()
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"bad grid {text!r}: {exc}") from None


def recipe_params(args):
    out = {}
    for key in RECIPE_FLAGS:
        v = getattr(args, key, None)
        if v is not None:
            out[key] = v
    return out


def load_model(args, overrides=None):
    if args.model_file:
        if overrides:
            raise InputError("parameter overrides need --recipe, not --model-file")
        try:
            with open(args.model_file) as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(str(exc)) from None
        return model_from_json(text)
    if not args.recipe:
        raise InputError("one of --recipe or --model-file is required")
    params = recipe_params(args)
    params.update(overrides or {})
    try:
        return build_recipe(args.recipe, **params)
    except TypeError as exc:
        raise ModelError(str(exc)) from None


def _write(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------------ certify


def cmd_certify(args):
    model = load_model(args)
    cert = certify(model, eps_targets=tuple(args.eps))
    _write(cert.to_json(indent=2) + "\n", args.out)
    if not cert.passed:
        for msg in cert.failures:
            print(f"condition failure: {msg}", file=sys.stderr)
    return EXIT_PASS if cert.passed else EXIT_FAIL


# -------------------------------------------------------------------- sweep


def sweep_row(recipe, base, param, value, eps):
    """One sweep row; failures are recorded in the row."""
    row = {param: value}
    params = dict(base)
    params[param] = int(value) if param == "n" else value
    try:
        model = build_recipe(recipe, **params)
        cert = certify(model, eps_targets=(eps,))
        row.update(lambda_m=cert.lambda_m, lambda_M=cert.lambda_M, cm_prime=cert.cm_prime,
                   alpha_star=cert.alpha_star, epsilon=cert.epsilon, lambda_bound=cert.lam,
                   big_c=cert.big_c, gap_exact=exact_spectrum(model).gap,
                   tmix_bound=cert.tmix_bound.get(eps, math.nan), passed=cert.passed,
                   failure="; ".join(cert.failures))
    except Exception as exc:  # rows never abort the sweep
        row.update(passed=False, failure=f"{type(exc).__name__}: {exc}")
    return row


def sweep_rows(recipe, base, param, grid, eps, workers=1):
    jobs = [(recipe, base, param, v, eps) for v in grid]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(sweep_row, *zip(*jobs)))
    return [sweep_row(*j) for j in jobs]


def sweep_csv(rows, param):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow((param,) + SWEEP_COLUMNS)
    for row in rows:
        out = [format_float(row[param])]
        for c in SWEEP_COLUMNS:
            v = row.get(c, math.nan)
            if c == "passed":
                out.append(str(bool(v)).lower())
            elif c == "failure":
                out.append(v or "")
            else:
                out.append(format_float(v))
        w.writerow(out)
    return buf.getvalue()


def cmd_sweep(args):
    if not args.recipe:
        raise InputError("sweep needs --recipe")
    if args.recipe not in RECIPES:
        raise ModelError(f"unknown recipe {args.recipe!r}")
    if args.param not in RECIPES[args.recipe].defaults:
        raise InputError(f"recipe {args.recipe!r} has no parameter {args.param!r}")
    grid = parse_grid(args.grid)
    if any(not (v > 0) for v in grid) and args.param in ("gamma", "omega"):
        raise InputError("grid values must be positive")
    rows = sweep_rows(args.recipe, recipe_params(args), args.param, grid, args.eps[0],
                      args.workers)
    _write(sweep_csv(rows, args.param), args.out)
    return EXIT_PASS if all(r["passed"] for r in rows) else EXIT_FAIL


# ----------------------------------------------------------------- simulate


def parse_initial(spec, d, picture):
    """``basis:k``, ``random:seed`` or a dense JSON row list of ``[re, im]`` pairs."""
    spec = spec.strip()
    try:
        if spec.startswith("basis:"):
            k = int(spec.split(":", 1)[1])
            if not 0 <= k < d:
                raise InputError(f"basis index {k} out of range for dimension {d}")
            a = np.zeros((d, d), dtype=np.complex128)
            a[k, k] = 1.0
            return a
        if spec.startswith("random:"):
            rng = np.random.default_rng(int(spec.split(":", 1)[1]))
            if picture == "schrodinger":
                return haar_state(d, rng)
            g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            return g + g.conj().T
        arr = np.asarray(json.loads(spec), dtype=float)
    except (ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"bad initial spec {spec!r}: {exc}") from None
    if arr.shape != (d, d, 2):
        raise InputError(f"initial matrix must have shape ({d}, {d}) of [re, im] pairs")
    a = arr[..., 0] + 1j * arr[..., 1]
    if picture == "schrodinger":
        w = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
        if np.abs(a - a.conj().T).max() > 1e-10 or w[0] < -1e-10 or abs(np.trace(a) - 1) > 1e-10:
            raise InputError("initial state must be a density matrix")
    return a


def cmd_simulate(args):
    model = load_model(args)
    eps = args.eps[0]
    cert = certify(model, eps_targets=(eps,))
    if not cert.passed:
        for msg in cert.failures:
            print(f"condition failure: {msg}", file=sys.stderr)
        return EXIT_FAIL
    if args.picture == "schrodinger" and args.generator != "full":
        raise InputError("the Schrodinger picture only supports --generator full")
    initial = parse_initial(args.initial, model.dim, args.picture)
    times = parse_grid(args.grid) if args.grid else default_time_grid(2 * cert.tmix(eps)).tolist()
    if not times or times[0] != 0:
        times = [0.0] + times
    if args.picture == "heisenberg":
        traj = heisenberg_decay(model, cert, initial, times, generator=args.generator)
    else:
        traj = schrodinger_decay(model, cert, initial, times)
    _write(traj.to_csv(), args.out)
    bound = cert.tmix_bound[eps]
    if args.generator != "full":
        return EXIT_PASS
    try:
        emp = empirical_mixing_time(model, eps, times, sigma=cert.artifacts["sigma"],
                                    seed=args.seed)
    except HorizonError as exc:
        print(f"empirical mixing time not reached on the grid ({exc}); "
              f"certified bound {bound:.6g}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"empirical_tmix(lower estimate)={emp:.6g} certified_tmix_bound={bound:.6g} "
          f"envelope_ok={traj.all_ok}", file=sys.stderr)
    return EXIT_PASS if traj.all_ok else EXIT_FAIL


# --------------------------------------------------------------------- main


def _eps_list(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --eps {text!r}") from None
    if any(not 0 < v <= 1 for v in vals):
        raise argparse.ArgumentTypeError("--eps values must lie in (0, 1]")
    return vals


def build_parser():
    p = argparse.ArgumentParser(prog="hypomix",
                                description="Hypocoercive mixing-time certificates for Lindbladians")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--recipe", choices=sorted(RECIPES))
    src.add_argument("--model-file")
    for key, typ in RECIPE_FLAGS.items():
        common.add_argument(f"--{key}", type=typ, default=None)
    common.add_argument("--eps", type=_eps_list, default=[0.01])
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out")

    c = sub.add_parser("certify", parents=[common], help="certify one model")
    c.set_defaults(func=cmd_certify)

    s = sub.add_parser("sweep", parents=[common], help="certify over a parameter grid")
    s.add_argument("--param", default="gamma")
    s.add_argument("--grid", default="logspace:-2:2:25")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    m = sub.add_parser("simulate", parents=[common], help="trajectory with envelope checks")
    m.add_argument("--picture", choices=("schrodinger", "heisenberg"), default="schrodinger")
    m.add_argument("--generator", choices=("full", "dissipator", "hamiltonian"), default="full")
    m.add_argument("--initial", default="basis:0")
    m.add_argument("--grid", default="")
    m.set_defaults(func=cmd_simulate)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    try:
        return args.func(args)
    except (InputError, ModelError, DependencyError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConditionError as exc:
        print(f"condition failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
