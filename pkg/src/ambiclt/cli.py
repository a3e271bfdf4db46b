"""Command-line front end.

Subcommands mirror the library surface: ``closed-form`` (indicator limits),
``pde`` (g-expectation solves with eps extrapolation), ``dp`` (worst-case
dynamic programs, single values or convergence tables), ``mc`` (seeded policy
Monte Carlo), ``lln`` (shorthand for ``dp --theorem lln``), ``hyptest``
(calibration, power curves, decisions on data), and ``report`` (the
acceptance matrix).

Runs are reproducible: identical configuration and seed give byte-identical
payloads.  JSON reports use stable key ordering and carry the resolved
configuration, a version string, and per-value provenance; CSV files carry a
header row.  Wall-clock columns are emitted only with ``--timing``.
Defaults < config file < explicit flags, in that precedence order.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import sys

from . import __version__, config
from .closed_form import (
    BadInterval,
    BadTime,
    IndicatorLimit,
    indicator_limit_detail,
    lower_indicator_limit,
    upper_indicator_limit,
)
from .hyptest import (
    EmptyTheta,
    Infeasible,
    NoConvergence,
    TestSpec,
    ThetaSet,
    calibrate_interval,
    residual_statistic,
    size_power_simulation,
    test_decision,
    wrong_acceptance,
)
from .measures import (
    MeasureError,
    coin_example,
    interval,
    load_measure_set,
    validate_measure_set,
)
from .pde import (
    NotMonotone,
    OutOfDomain,
    PdeGrid,
    UnstableGrid,
    epsilon_extrapolate,
)
from .statistics import HorizonExceeded, LengthMismatch, SwitchRule, read_path_csv
from .terminal import TerminalFunction
from .worst_case import (
    StateExplosion,
    builtin_policies,
    convergence_report,
    inf_dp_special_tilde,
    mc_policy_value,
    sup_dp_clt,
    sup_dp_deviation,
    sup_dp_lln,
    sup_dp_scaled,
    sup_dp_special,
)

EXIT_OK = 0
EXIT_REPORT_FAIL = 1
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_NUMERIC = 4
EXIT_CAPACITY = 5


class ConfigError(ValueError):
    """Bad flags, config file, or flag combinations."""


_DOMAIN_ERRORS = (
    MeasureError,
    BadInterval,
    BadTime,
    HorizonExceeded,
    LengthMismatch,
    EmptyTheta,
    Infeasible,
    OutOfDomain,
    NotMonotone,
    ValueError,
)
_NUMERIC_ERRORS = (NoConvergence, UnstableGrid)
_CAPACITY_ERRORS = (StateExplosion,)


def _error_record(exc: Exception) -> str:
    return json.dumps(
        {"error": type(exc).__name__, "message": str(exc)}, sort_keys=True
    )


def _payload(command: str, operation: str, parameters: dict, body: dict) -> dict:
    return {
        "version": __version__,
        "config": dict(sorted(parameters.items())),
        "provenance": {
            "module": _PROVENANCE_MODULE[command],
            "operation": operation,
            "parameters": dict(sorted(parameters.items())),
        },
        **body,
    }


_PROVENANCE_MODULE = {
    "closed-form": "closed_form",
    "pde": "pde",
    "dp": "worst_case",
    "lln": "worst_case",
    "mc": "worst_case",
    "hyptest": "hyptest",
    "report": "acceptance",
}


def _emit(args, payload: dict, csv_rows=None, csv_header=None) -> None:
    if args.format == "csv" and csv_rows is not None:
        text_io = open(args.output, "w", encoding="utf-8", newline="") if args.output else sys.stdout
        try:
            writer = csv.writer(text_io)
            writer.writerow(csv_header)
            for row in csv_rows:
                writer.writerow(row)
        finally:
            if args.output:
                text_io.close()
        return
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _measure_set(args):
    if getattr(args, "measures", None):
        return load_measure_set(args.measures)
    p = getattr(args, "p", None)
    q = getattr(args, "q", None)
    if p is None or q is None:
        raise ConfigError("need --measures FILE or coin parameters --p and --q")
    return coin_example(repr(p), repr(q))


def _terminal(args) -> TerminalFunction:
    a = getattr(args, "a", None)
    b = getattr(args, "b", None)
    if a is None and b is None:
        raise ConfigError("need at least one of --a/--b for the indicator")
    if a is None:
        return TerminalFunction.left(repr(b))
    if b is None:
        return TerminalFunction.right(repr(a))
    h = getattr(args, "h", None)
    if h:
        return TerminalFunction.smoothed_indicator(a, b, h)
    return TerminalFunction.indicator(repr(a), repr(b))


# ---------------------------------------------------------------------------
# subcommand handlers


def _run_closed_form(args) -> int:
    iv = interval(args.mu_lo, args.mu_hi)
    a = -math.inf if args.a is None else args.a
    b = math.inf if args.b is None else args.b
    limit = IndicatorLimit(iv, a, b, args.side)
    detail = indicator_limit_detail(limit)
    params = {"mu_lo": args.mu_lo, "mu_hi": args.mu_hi, "a": a, "b": b, "side": args.side}
    _emit(args, _payload("closed-form", "upper_indicator_limit"
                         if args.side == "upper" else "lower_indicator_limit",
                         params, detail))
    return EXIT_OK


def _run_pde(args) -> int:
    if args.a is None or args.b is None:
        raise ConfigError("pde needs both --a and --b")
    half = args.domain
    grid = PdeGrid(-half, half, args.nx, args.nt)
    eps_seq = args.eps
    phi = TerminalFunction.smoothed_indicator(args.a, args.b, args.h)
    res = epsilon_extrapolate(phi, args.kappa, grid, eps_seq)
    iv = interval(-args.kappa, args.kappa)
    reference = upper_indicator_limit(iv, args.a, args.b)
    params = {
        "kappa": args.kappa, "eps": list(eps_seq), "a": args.a, "b": args.b,
        "h": args.h, "nx": args.nx, "nt": args.nt, "domain": half,
    }
    body = {
        "value_per_eps": {repr(e): v for e, v in zip(res.epsilons, res.values)},
        "extrapolated": res.extrapolated,
        "closed_form_reference": reference,
        "gaps": {repr(e): v - reference for e, v in zip(res.epsilons, res.values)},
        "extrapolated_gap": res.extrapolated - reference,
    }
    _emit(args, _payload("pde", "epsilon_extrapolate", params, body))
    return EXIT_OK


def _dp_single(L, phi, theorem, args, rule):
    if theorem == "clt":
        return sup_dp_clt(L, phi, args.n)
    if theorem == "special":
        return sup_dp_special(L, phi, args.n, rule)
    if theorem == "tilde":
        return inf_dp_special_tilde(L, phi, args.n, rule)
    if theorem == "deviation":
        return sup_dp_deviation(L, phi, args.n)
    if theorem == "lln":
        return sup_dp_lln(L, phi, args.n)
    if theorem == "scaled":
        return sup_dp_scaled(L, phi, args.n, repr(args.alpha_scale), repr(args.beta_scale))
    raise ConfigError(f"unknown theorem {theorem!r}")


def _dp_reference(L, theorem, args) -> float | None:
    iv = validate_measure_set(L)
    if args.a is None or args.b is None:
        return None
    if theorem in ("clt", "special"):
        return upper_indicator_limit(iv, args.a, args.b)
    if theorem == "tilde":
        return lower_indicator_limit(iv, args.a, args.b)
    return None


def _run_dp(args, theorem=None) -> int:
    theorem = theorem or args.theorem
    L = _measure_set(args)
    iv = validate_measure_set(L)
    phi = _terminal(args)
    rule = SwitchRule(args.c if args.c is not None else (phi.center or 0.0), iv)
    params = {
        "theorem": theorem, "a": args.a, "b": args.b, "c": rule.center,
        "p": getattr(args, "p", None), "q": getattr(args, "q", None),
        "measures": getattr(args, "measures", None),
        "alpha_scale": args.alpha_scale, "beta_scale": args.beta_scale,
    }
    if args.n_list:
        reference = args.reference
        if reference is None:
            reference = _dp_reference(L, theorem, args)
        if reference is None:
            raise ConfigError("convergence table needs --reference for this theorem")
        report = convergence_report(
            L, phi, args.n_list, reference, variant=theorem,
            rule=rule, alpha=repr(args.alpha_scale), beta=repr(args.beta_scale),
            minimize=(theorem == "tilde"),
        )
        header = ["theorem", "n", "value", "reference", "gap"]
        rows = [[theorem, r.n, repr(r.value), repr(report.limit_reference), repr(r.gap)]
                for r in report.rows]
        if args.timing:
            header.append("runtime_s")
            for row, r in zip(rows, report.rows):
                row.append(f"{r.runtime:.3f}")
        body = {
            "rows": [
                {"n": r.n, "value": r.value, "gap": r.gap} for r in report.rows
            ],
            "reference": report.limit_reference,
            "gaps_monotone": report.gaps_monotone,
        }
        params["n_list"] = list(args.n_list)
        _emit(args, _payload("dp", "convergence_report", params, body),
              csv_rows=rows, csv_header=header)
        return EXIT_OK
    if args.n is None:
        raise ConfigError("need --n or --n-list")
    params["n"] = args.n
    value = _dp_single(L, phi, theorem, args, rule)
    body = {"value": float(value)}
    ref = _dp_reference(L, theorem, args)
    if ref is not None:
        body["limit_reference"] = ref
        body["gap"] = abs(float(value) - ref)
    _emit(args, _payload("dp", f"sup_dp_{theorem}" if theorem != "tilde"
                         else "inf_dp_special_tilde", params, body))
    return EXIT_OK


def _run_mc(args) -> int:
    L = _measure_set(args)
    iv = validate_measure_set(L)
    phi = _terminal(args)
    rule = SwitchRule(args.c if args.c is not None else (phi.center or 0.0), iv)
    stock = {p.label: p for p in builtin_policies(L, rule)}
    if args.policy not in stock:
        raise ConfigError(f"unknown policy {args.policy!r}; choose from {sorted(stock)}")
    est = mc_policy_value(
        L, stock[args.policy], phi, args.theorem, args.n, args.paths, args.seed,
        rule=rule, alpha=args.alpha_scale, beta=args.beta_scale,
    )
    params = {
        "theorem": args.theorem, "policy": args.policy, "n": args.n,
        "paths": args.paths, "seed": args.seed, "a": args.a, "b": args.b,
        "c": rule.center,
    }
    body = {"estimate": est.estimate, "stderr": est.stderr}
    _emit(args, _payload("mc", "mc_policy_value", params, body))
    return EXIT_OK


def _run_hyptest(args) -> int:
    spec = TestSpec(
        kappa=args.kappa, sigma=args.sigma, alpha=args.alpha,
        theta0=args.theta0, xi=args.xi,
    )
    a_cal, b_cal = calibrate_interval(spec)
    coverage = wrong_acceptance(spec, a_cal, b_cal, 0.0)
    xi_grid = [args.xi] if args.xi else []
    xi_grid += [x / 2.0 for x in range(-6, 7)]
    power_curve = sorted(
        {round(x, 6): wrong_acceptance(spec, a_cal, b_cal, x) for x in xi_grid}.items()
    )
    params = {
        "kappa": args.kappa, "alpha": args.alpha, "xi": args.xi,
        "theta0": args.theta0, "sigma": args.sigma, "n": args.n,
        "paths": args.paths, "seed": args.seed, "data": args.data,
    }
    body = {
        "a": a_cal,
        "b": b_cal,
        "coverage": coverage,
        "power_curve": [[x, v] for x, v in power_curve],
    }
    if args.data:
        xs = read_path_csv(args.data)
        m_resid = residual_statistic(xs, spec, a_cal, b_cal)
        body["decision"] = test_decision(
            args.theta0 + m_resid, a_cal, b_cal, ThetaSet.point(args.theta0)
        )
        body["residual_statistic"] = m_resid
    elif args.paths:
        if not args.n:
            raise ConfigError("simulation needs --n alongside --paths")
        L = _error_law(args.kappa, args.sigma)
        rate, stderr = size_power_simulation(
            L, spec, a_cal, b_cal, theta_true=args.theta0 + args.xi,
            n=args.n, paths=args.paths, seed=args.seed,
        )
        body["accept_rate"] = rate
        body["accept_stderr"] = stderr
    _emit(args, _payload("hyptest", "calibrate_interval", params, body))
    return EXIT_OK


def _error_law(kappa: float, sigma: float):
    """A stock error law matching (kappa, sigma): a scaled fair coin when
    the mean is unambiguous, otherwise the three-outcome coin."""
    from .measures import DiscreteMeasure, MeasureSet

    if kappa == 0.0:
        return MeasureSet(
            (DiscreteMeasure((repr(sigma), repr(-sigma)), ("1/2", "1/2")),)
        )
    risk = sigma * sigma + kappa * kappa
    p = (risk + kappa) / 2.0
    q = (risk - kappa) / 2.0
    if q <= 0 or p + q > 1:
        raise ConfigError(
            f"no three-outcome coin has kappa={kappa}, sigma={sigma}; "
            "supply data instead"
        )
    return coin_example(repr(p), repr(q))


def _run_report(args) -> int:
    from . import acceptance

    ids = None
    if args.criteria:
        ids = [int(tok) for tok in args.criteria.split(",") if tok.strip()]
    results = acceptance.run_criteria(ids)
    header = ["criterion", "description", "passed", "detail"]
    rows = [[r.cid, r.description, "PASS" if r.passed else "FAIL", r.detail]
            for r in results]
    if args.timing:
        header.append("runtime_s")
        for row, r in zip(rows, results):
            row.append(f"{r.runtime:.2f}")
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} criterion {r.cid}: {r.description} [{r.detail}]")
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            for row in rows:
                writer.writerow(row)
    return EXIT_OK if all(r.passed for r in results) else EXIT_REPORT_FAIL


# ---------------------------------------------------------------------------
# parser


def _add_common(sub, *, seeded=False):
    sub.add_argument("--config", help="INI config file; flags override its values")
    sub.add_argument("--output", help="write the report here instead of stdout")
    sub.add_argument("--format", choices=["json", "csv"], default="json")
    sub.add_argument("--threads", type=int, default=1, help="worker cap for sweeps")
    sub.add_argument("--timing", action="store_true",
                     help="include wall-clock columns (breaks byte-reproducibility)")
    if seeded:
        sub.add_argument("--seed", type=int, default=0)


def _add_statistic_flags(sub):
    sub.add_argument("--a", type=float, default=None)
    sub.add_argument("--b", type=float, default=None)
    sub.add_argument("--c", type=float, default=None,
                     help="switching center (defaults to the indicator center)")
    sub.add_argument("--h", type=float, default=None, help="mollification bandwidth")
    sub.add_argument("--p", type=float, default=None, help="coin favorable probability")
    sub.add_argument("--q", type=float, default=None, help="coin unfavorable probability")
    sub.add_argument("--measures", help="measure-set config file (value:prob lines)")
    sub.add_argument("--alpha-scale", type=float, default=1.0, dest="alpha_scale")
    sub.add_argument("--beta-scale", type=float, default=1.0, dest="beta_scale")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ambiclt",
        description="worst-case central limit numerics under mean ambiguity",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    cf = subs.add_parser("closed-form", help="closed-form indicator limits")
    cf.add_argument("--mu-lo", type=float, required=True, dest="mu_lo")
    cf.add_argument("--mu-hi", type=float, required=True, dest="mu_hi")
    cf.add_argument("--a", type=float, default=None)
    cf.add_argument("--b", type=float, default=None)
    cf.add_argument("--side", choices=["upper", "lower"], default="upper")
    _add_common(cf)
    cf.set_defaults(handler=_run_closed_form)

    pde = subs.add_parser("pde", help="g-expectation PDE solves")
    pde.add_argument("--kappa", type=float, required=True)
    pde.add_argument("--eps", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.025])
    pde.add_argument("--a", type=float, default=None)
    pde.add_argument("--b", type=float, default=None)
    pde.add_argument("--h", type=float, default=0.05)
    pde.add_argument("--nx", type=int, default=2001)
    pde.add_argument("--nt", type=int, default=2000)
    pde.add_argument("--domain", type=float, default=10.0, help="half-width")
    _add_common(pde)
    pde.set_defaults(handler=_run_pde)

    dp = subs.add_parser("dp", help="worst-case dynamic programs")
    dp.add_argument("--theorem",
                    choices=["clt", "special", "tilde", "deviation", "lln", "scaled"],
                    default="special")
    dp.add_argument("--n", type=int, default=None)
    dp.add_argument("--n-list", type=int, nargs="+", default=None, dest="n_list")
    dp.add_argument("--reference", type=float, default=None)
    _add_statistic_flags(dp)
    _add_common(dp)
    dp.set_defaults(handler=_run_dp)

    lln = subs.add_parser("lln", help="worst-case sample-mean expectations")
    lln.add_argument("--n", type=int, default=None)
    lln.add_argument("--n-list", type=int, nargs="+", default=None, dest="n_list")
    lln.add_argument("--reference", type=float, default=None)
    _add_statistic_flags(lln)
    _add_common(lln)
    lln.set_defaults(handler=lambda args: _run_dp(args, theorem="lln"))

    mc = subs.add_parser("mc", help="seeded policy Monte Carlo")
    mc.add_argument("--theorem",
                    choices=["clt", "special", "tilde", "deviation", "lln", "scaled"],
                    default="special")
    mc.add_argument("--n", type=int, required=True)
    mc.add_argument("--paths", type=int, default=10000)
    mc.add_argument("--policy", default="threshold")
    _add_statistic_flags(mc)
    _add_common(mc, seeded=True)
    mc.set_defaults(handler=_run_mc)

    hyp = subs.add_parser("hyptest", help="robust hypothesis testing")
    hyp.add_argument("--kappa", type=float, required=True)
    hyp.add_argument("--sigma", type=float, default=1.0)
    hyp.add_argument("--alpha", type=float, default=0.05)
    hyp.add_argument("--xi", type=float, default=0.0)
    hyp.add_argument("--theta0", type=float, default=0.0)
    hyp.add_argument("--n", type=int, default=None)
    hyp.add_argument("--paths", type=int, default=None)
    hyp.add_argument("--data", help="CSV of observations, one per row")
    _add_common(hyp, seeded=True)
    hyp.set_defaults(handler=_run_hyptest)

    rep = subs.add_parser("report", help="run verification suites")
    rep.add_argument("--suite", choices=["acceptance"], default="acceptance")
    rep.add_argument("--criteria", help="comma-separated criterion ids, default all")
    _add_common(rep)
    rep.set_defaults(handler=_run_report)
    return parser


def _apply_config_file(parser, argv):
    """Config-file values become parser defaults, keeping flag precedence."""
    if "--config" not in argv:
        return
    path = argv[argv.index("--config") + 1]
    ini = configparser.ConfigParser()
    read = ini.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    command = next((tok for tok in argv if not tok.startswith("-")), None)
    merged: dict = {}
    for section in ("global", command or ""):
        if section and ini.has_section(section):
            merged.update(ini.items(section))
    sub = next(
        act for act in parser._actions if isinstance(act, argparse._SubParsersAction)
    )
    target = sub.choices.get(command)
    if target is None or not merged:
        return
    typed = {}
    for action in target._actions:
        key = action.dest
        if key in merged:
            raw = merged[key]
            if action.type is not None:
                typed[key] = [action.type(tok) for tok in raw.split()] \
                    if action.nargs == "+" else action.type(raw)
            elif isinstance(action, argparse._StoreTrueAction):
                typed[key] = raw.lower() in ("1", "true", "yes")
            else:
                typed[key] = raw
    target.set_defaults(**typed)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        if getattr(args, "threads", 1) and args.threads > 1:
            config.set_max_workers(args.threads)
        return args.handler(args)
    except ConfigError as exc:
        print(_error_record(exc), file=sys.stderr)
        return EXIT_CONFIG
    except _CAPACITY_ERRORS as exc:
        print(_error_record(exc), file=sys.stderr)
        return EXIT_CAPACITY
    except _NUMERIC_ERRORS as exc:
        print(_error_record(exc), file=sys.stderr)
        return EXIT_NUMERIC
    except _DOMAIN_ERRORS as exc:
        print(_error_record(exc), file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
