"""Command-line front door: named experiments, parameter sweeps, reports.

Every subcommand builds a JSON-serializable payload (plus CSV for the
tabular ones), echoes its effective configuration for reproducibility,
and exits 0 on success, 2 on configuration errors, 3 on numeric-accuracy
failures, and 4 when a requested check fails its threshold.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import analysis, asymptotics, expansion, kernels
from .atoms import (constant_atom, make_atom_fun, make_atom_pol_a,
                    make_atom_pol_b, validate_atom)
from .bases import BasisFamily, BasisSpec, JacobiParams, family_table
from .errors import (AccuracyError, CalibrationError, ConstructionError,
                     DomainError, TruncationError)
from .quadrature import MeasureKind, MeasureTag

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_CHECK = 4

_FAMILIES = {f.value: f for f in BasisFamily}


def _pick(args, config: dict, name: str, default=None):
    value = getattr(args, name.replace("-", "_"), None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def _params(args, config) -> JacobiParams:
    alpha = _pick(args, config, "alpha")
    beta = _pick(args, config, "beta")
    if alpha is None or beta is None:
        raise DomainError("alpha and beta are required")
    return JacobiParams(float(alpha), float(beta))


def _family(args, config, default="trig-poly") -> BasisFamily:
    name = _pick(args, config, "family", default)
    if name not in _FAMILIES:
        raise DomainError(f"unknown family {name!r}; choose from {sorted(_FAMILIES)}")
    return _FAMILIES[name]


def _k_grid(args, config, default="5:11"):
    text = _pick(args, config, "k-grid", default)
    lo, hi = (int(x) for x in str(text).split(":"))
    return [2**j for j in range(lo, hi + 1)]


def _r_grid(args, config, default="3:12"):
    text = _pick(args, config, "r-grid", default)
    lo, hi = (int(x) for x in str(text).split(":"))
    return 1.0 - 2.0 ** -np.arange(lo, hi + 1)


# ---------------------------------------------------------------------------
# subcommand handlers: return (payload dict, csv rows or None, exit code)


def _cmd_eval(args, config):
    family = _family(args, config)
    p = _params(args, config)
    k = int(_pick(args, config, "k", 8))
    n = int(_pick(args, config, "grid", 65))
    lo, hi = (-math.pi, math.pi) if family.symmetrized else (0.0, math.pi)
    pad = (hi - lo) / (n + 1)
    theta = np.linspace(lo + pad, hi - pad, n)
    values = family_table(family, k, p, theta)[k]
    payload = {
        "family": family.value, "alpha": p.alpha, "beta": p.beta, "k": k,
        "theta": theta.tolist(), "values": values.tolist(),
    }
    rows = [("theta", "value")] + list(zip(theta.tolist(), values.tolist()))
    return payload, rows, EXIT_OK


def _cmd_gram(args, config):
    family = _family(args, config)
    p = _params(args, config)
    size = int(_pick(args, config, "size", 24))
    tol = float(_pick(args, config, "tol", 1e-8))
    gram = expansion.gram_matrix(family, p, size)
    dev = np.abs(gram - np.eye(size))
    payload = {
        "family": family.value, "alpha": p.alpha, "beta": p.beta, "size": size,
        "max_deviation": float(dev.max()),
        "max_off_diagonal": float((dev - np.diag(np.diag(dev))).max()),
        "tolerance": tol,
        "passed": bool(dev.max() <= tol),
    }
    return payload, None, EXIT_OK if payload["passed"] else EXIT_CHECK


def _cmd_kernel(args, config):
    check = _pick(args, config, "check", "slice")
    family = _family(args, config)
    p = _params(args, config)
    payload = {"check": check, "family": family.value,
               "alpha": p.alpha, "beta": p.beta}
    rows = None
    code = EXIT_OK
    if check == "slice":
        r = _pick(args, config, "r")
        t = _pick(args, config, "t")
        spec = kernels.KernelSpec(family, p,
                                  r=None if r is None else float(r),
                                  t=None if t is None else float(t))
        n = int(_pick(args, config, "grid", 33))
        theta = math.pi * (np.arange(n) + 0.5) / n
        phi = float(_pick(args, config, "phi", math.pi / 3))
        if spec.r is not None:
            values = [kernels.r_kernel(spec, float(th), phi) for th in theta]
        else:
            values = [kernels.poisson_kernel(spec, float(th), phi) for th in theta]
        payload.update({"phi": phi, "r": r, "t": t,
                        "theta": theta.tolist(), "values": values})
        rows = [("theta", "value")] + list(zip(theta.tolist(), values))
    elif check == "ratio":
        j = int(_pick(args, config, "j", 0))
        bound = float(_pick(args, config, "bound", 50.0))
        lo, hi = kernels.kernel_ratio_extremes(p, j=j)
        c_obs = max(hi, 1.0 / lo)
        payload.update({"j": j, "ratio_min": lo, "ratio_max": hi,
                        "C": c_obs, "bound": bound, "passed": bool(c_obs <= bound)})
        code = EXIT_OK if payload["passed"] else EXIT_CHECK
    elif check == "profile":
        r_grid = _r_grid(args, config)
        derivative = bool(_pick(args, config, "derivative", False))
        spec = kernels.KernelSpec(family, p, r=0.5)
        fit = kernels.kernel_l2_profile(spec, r_grid, derivative=derivative)
        payload.update({"derivative": derivative, "r_grid": r_grid.tolist(),
                        "fit": fit.to_dict()})
        rows = [("r", "minus_log1mr")] + [(float(r), -math.log(1 - r)) for r in r_grid]
    elif check == "semigroup":
        t = float(_pick(args, config, "t", 0.5))
        s = float(_pick(args, config, "s", 0.7))
        defect = kernels.semigroup_defect(p, t, s, 1.0, 2.0, family=family)
        tol = float(_pick(args, config, "tol", 1e-8))
        payload.update({"t": t, "s": s, "defect": defect, "tolerance": tol,
                        "passed": bool(defect <= tol)})
        code = EXIT_OK if payload["passed"] else EXIT_CHECK
    elif check == "positivity":
        t_values = np.linspace(0.1, 1.0, 5)
        angles = math.pi * (np.arange(8) + 0.5) / 8
        worst = math.inf
        for t in t_values:
            spec = kernels.KernelSpec(BasisFamily.TRIG_POLY, p, t=float(t))
            for th in angles:
                for ph in angles:
                    worst = min(worst, kernels.poisson_kernel(spec, float(th), float(ph)))
        payload.update({"min_value": worst, "passed": bool(worst > 0.0)})
        code = EXIT_OK if payload["passed"] else EXIT_CHECK
    else:
        raise DomainError(f"unknown kernel check {check!r}")
    return payload, rows, code


def _atom_from_config(kind, args, config):
    K = int(_pick(args, config, "K", 64))
    c = _pick(args, config, "c")
    delta = float(_pick(args, config, "delta", 0.25))
    epsilon = float(_pick(args, config, "epsilon", 0.5))
    if kind in ("pol-a", "pol-b"):
        p = _params(args, config)
        if c is None:
            c = asymptotics.calibrated_c(p)
        if kind == "pol-a":
            return make_atom_pol_a(K, delta, float(c), p), p
        return make_atom_pol_b(K, float(c), epsilon, p), p
    if kind == "fun":
        if c is None:
            c = asymptotics.calibrated_c(_params(args, config))
        return make_atom_fun(K, delta, float(c)), None
    if kind == "constant":
        p = _params(args, config)
        return constant_atom(MeasureTag(MeasureKind.MU, p)), p
    raise DomainError(f"unknown atom kind {kind!r}")


def _cmd_atom(args, config):
    kind = _pick(args, config, "kind", "fun")
    atom, p = _atom_from_config(kind, args, config)
    q = _pick(args, config, "q")
    report = validate_atom(atom, q=None if q is None else float(q))
    payload = {
        "kind": kind,
        "atom": json.loads(atom.to_json()),
        "report": {
            "mean": report.mean, "l2_norm": report.l2_norm,
            "ball_measure": report.ball_measure,
            "is_h1_atom": report.is_h1_atom, "is_1q_atom": report.is_1q_atom,
            "q": report.q, "margins": report.margins,
        },
    }
    rows = None
    cutoff = _pick(args, config, "coeff-cutoff")
    if cutoff is not None:
        family = _family(args, config,
                         "trig-fun" if kind == "fun" else "trig-poly")
        spec_p = p if p is not None else JacobiParams(
            float(_pick(args, config, "alpha", 0.0)),
            float(_pick(args, config, "beta", 0.0)))
        spec = BasisSpec(1, spec_p, family)
        table = expansion.coefficients(atom, spec, int(cutoff))
        payload["coefficients"] = [[list(n), v] for n, v in table.ordered()]
        rows = [("n1", "coefficient")] + [(n[0], v) for n, v in table.ordered()]
    code = EXIT_OK if report.is_h1_atom or kind == "pol-b" else EXIT_CHECK
    return payload, rows, code


def _cmd_sharpness(args, config):
    setting = _pick(args, config, "setting", "pol-a")
    p = _params(args, config)
    epsilon = float(_pick(args, config, "epsilon", 0.5))
    k_grid = _k_grid(args, config)
    at_critical = bool(_pick(args, config, "critical", False))
    fit = analysis.sharpness_growth(setting, p, epsilon, k_grid,
                                    at_critical=at_critical)
    payload = {
        "setting": setting, "alpha": p.alpha, "beta": p.beta,
        "epsilon": epsilon, "k_grid": k_grid, "at_critical": at_critical,
        "c": asymptotics.calibrated_c(p), "delta": analysis.DEFAULT_DELTA,
        "fit": fit.to_dict(),
    }
    code = EXIT_OK
    min_slope = _pick(args, config, "min-slope")
    max_slope = _pick(args, config, "max-slope")
    if min_slope is not None and fit.slope < float(min_slope):
        payload["passed"] = False
        code = EXIT_CHECK
    elif max_slope is not None and fit.slope > float(max_slope):
        payload["passed"] = False
        code = EXIT_CHECK
    elif min_slope is not None or max_slope is not None:
        payload["passed"] = True
    return payload, None, code


def _cmd_l1(args, config):
    setting = _pick(args, config, "setting", "pol-large")
    p = _params(args, config)
    k_grid = _k_grid(args, config, "6:13")
    sums = analysis.l1_partial_sums(setting, p, k_grid)
    fit = analysis.l1_sup_divergence(setting, p, k_grid)
    increments = np.diff(sums)
    payload = {
        "setting": setting, "alpha": p.alpha, "beta": p.beta,
        "k_grid": k_grid, "partial_sums": sums.tolist(),
        "increments": increments.tolist(),
        "min_increment": float(increments.min()),
        "fit": fit.to_dict(),
    }
    rows = [("K", "partial_sum")] + list(zip(k_grid, sums.tolist()))
    return payload, rows, EXIT_OK


def _cmd_asympt(args, config):
    check = _pick(args, config, "check", "calibrate")
    p = _params(args, config)
    k_max = int(_pick(args, config, "k-max", 4096))
    if check == "calibrate":
        report = asymptotics.calibrate_constants(p, min(k_max, 4096))
    elif check == "a1":
        report = asymptotics.hilb_remainder_fit(p, k_max)
    elif check == "a5":
        report = asymptotics.darboux_remainder_fit(p, k_max, family="poly")
    elif check == "a6":
        report = asymptotics.darboux_remainder_fit(p, k_max, family="fun")
    elif check == "deriv":
        ratios = asymptotics.deriv_remainder_ratios(p, k_max)
        payload = {"check": check, "alpha": p.alpha, "beta": p.beta,
                   "ratios": ratios.tolist(),
                   "sup_ratio": float(ratios.max()),
                   "passed": bool(np.isfinite(ratios).all())}
        return payload, None, EXIT_OK if payload["passed"] else EXIT_CHECK
    else:
        raise DomainError(f"unknown asymptotics check {check!r}")
    payload = {"check": check, "alpha": p.alpha, "beta": p.beta,
               "report": json.loads(report.to_json())}
    return payload, None, EXIT_OK if report.passing else EXIT_CHECK


def _cmd_exponent(args, config):
    setting = _pick(args, config, "setting", "polynomial")
    d = int(_pick(args, config, "d", 1))
    alphas = _pick(args, config, "alphas")
    betas = _pick(args, config, "betas")
    if alphas is None:
        alphas = [float(_pick(args, config, "alpha", 0.0))] * d
    else:
        alphas = [float(x) for x in str(alphas).split(",")]
    if betas is None:
        betas = [float(_pick(args, config, "beta", 0.0))] * d
    else:
        betas = [float(x) for x in str(betas).split(",")]
    params = [JacobiParams(a, b) for a, b in zip(alphas, betas)]
    if setting == "polynomial":
        hp = expansion.polynomial_setting(params)
    elif setting == "function":
        hp = expansion.function_setting(params)
    elif setting == "custom":
        hp = expansion.HardyParameters(
            N=float(_pick(args, config, "N", 1.0)),
            gamma=float(_pick(args, config, "gamma", 1.0)),
            delta_set={1}, d=d)
    else:
        raise DomainError(f"unknown exponent setting {setting!r}")
    exponent = expansion.admissible_exponent(hp)
    payload = {
        "setting": setting, "d": d,
        "alphas": alphas, "betas": betas,
        "N": str(hp.N), "gamma": str(hp.gamma),
        "delta_set": sorted(str(x) for x in hp.delta_set),
        "exponent_exact": str(exponent),
        "exponent": float(exponent),
    }
    return payload, None, EXIT_OK


_HANDLERS = {
    "eval": _cmd_eval,
    "gram": _cmd_gram,
    "kernel": _cmd_kernel,
    "atom": _cmd_atom,
    "sharpness": _cmd_sharpness,
    "l1": _cmd_l1,
    "asympt": _cmd_asympt,
    "exponent": _cmd_exponent,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jacobilab",
        description="Numerical experiments on Jacobi trigonometric expansions",
    )
    parser.add_argument("--config", help="JSON file with defaults per option")
    parser.add_argument("--output", help="write the report to this path")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    def opt(sp, *names):
        for name in names:
            sp.add_argument(f"--{name}", default=None)

    sp = sub.add_parser("eval", help="basis values on a grid")
    opt(sp, "family", "alpha", "beta", "k", "grid")
    sp = sub.add_parser("gram", help="orthonormality check")
    opt(sp, "family", "alpha", "beta", "size", "tol")
    sp = sub.add_parser("kernel", help="kernel slices, ratios, profiles")
    opt(sp, "check", "family", "alpha", "beta", "r", "t", "s", "phi", "grid",
        "j", "bound", "r-grid", "tol")
    sp.add_argument("--derivative", action="store_true", default=None)
    sp = sub.add_parser("atom", help="construct, validate, expand atoms")
    opt(sp, "kind", "K", "alpha", "beta", "delta", "epsilon", "c", "q",
        "coeff-cutoff", "family")
    sp = sub.add_parser("sharpness", help="growth fits of counterexample sums")
    opt(sp, "setting", "alpha", "beta", "epsilon", "k-grid", "min-slope",
        "max-slope")
    sp.add_argument("--critical", action="store_true", default=None)
    sp = sub.add_parser("l1", help="sup-norm divergence partial sums")
    opt(sp, "setting", "alpha", "beta", "k-grid")
    sp = sub.add_parser("asympt", help="small-angle/mid-band validation")
    opt(sp, "check", "alpha", "beta", "k-max")
    sp = sub.add_parser("exponent", help="admissible-exponent arithmetic")
    opt(sp, "setting", "d", "alpha", "beta", "alphas", "betas", "N", "gamma")
    return parser


def _emit(payload: dict, rows, args) -> None:
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        writer = csv.writer(buf)
        for row in rows:
            writer.writerow(row)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    config = {}
    if args.config:
        try:
            with open(args.config) as handle:
                config = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        if not isinstance(config, dict):
            print("config error: top-level JSON object required", file=sys.stderr)
            return EXIT_CONFIG
    handler = _HANDLERS[args.command]
    try:
        payload, rows, code = handler(args, config)
    except (DomainError, ConstructionError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AccuracyError, TruncationError, CalibrationError) as exc:
        print(f"numeric-accuracy failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    # everything but the timestamp is deterministic for a fixed config
    payload = {"command": args.command, **payload,
               "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z")}
    _emit(payload, rows, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
