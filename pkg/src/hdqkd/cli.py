"""Command-line front end.

    hdqkd asymptotic --d 5 --m 3 --q 0.05
    hdqkd threshold --d 2 --m 3
    hdqkd finite --N 1e7 --d 5 --m 3 --q 0.05
    hdqkd figure fig5 --out figs/ --threads 4
    hdqkd verify --level quick

Exit codes: 0 success, 1 failed verification, 2 infeasible error rates,
64 usage error. ``--json`` prints a machine-readable run record instead of
the text summary. ``--config FILE`` reads defaults from a JSON object whose
keys mirror the long flag names; explicit flags win.
"""

import argparse
from dataclasses import asdict, dataclass, field
import json
import math
import sys
import time

import numpy as np

from . import __version__, asymptotic, finite, sweeps, verify
from .exceptions import (
    InfeasibleRatesError,
    NoFeasibleRootError,
    UnsupportedBoundError,
    UnsupportedRegimeError,
)

EXIT_OK, EXIT_VERIFY, EXIT_INFEASIBLE, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


@dataclass
class RunRecord:
    """Everything needed to reproduce and read back one invocation."""

    command: str
    inputs: dict
    defaults: dict = field(default_factory=dict)
    result: dict = field(default_factory=dict)
    version: str = __version__
    wall_time: float = 0.0

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


def fmt(x):
    if isinstance(x, (float, np.floating)):
        return f"{x:.12g}"
    return str(x)


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _count(text):
    # accepts 1e7 as well as 10000000
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if value != int(value) or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def _rates_from_args(a):
    given = [a.rates is not None, a.q is not None, a.qx is not None or a.qz is not None]
    if sum(given) != 1:
        raise UsageError("give exactly one of --rates, --q, or --qx/--qz")
    if a.rates is not None:
        if len(a.rates) != a.m:
            raise UsageError(f"--rates needs {a.m} values for m={a.m}, got {len(a.rates)}")
        return list(a.rates), "listed"
    if a.q is not None:
        return [a.q] * a.m, "symmetric"
    if a.m != 2 or a.qx is None or a.qz is None:
        raise UsageError("--qx/--qz need both values and m = 2")
    return [a.qz, a.qx], "two-basis"


def cmd_asymptotic(a, out):
    rates, mode = _rates_from_args(a)
    sol = asymptotic.solve_eta(a.d, a.m, rates, allow_nonprime=a.allow_nonprime)
    result = {
        "rate": max(sol.rate, 0.0), "raw_rate": sol.rate, "eta": sol.eta, "q": sol.q,
        "v": sol.v, "lambda00": sol.lambda00, "lambda_z": sol.lambda_z,
        "lambda_k": list(sol.lambda_k), "n_eta": sol.n_eta,
    }
    out(f"d={a.d} m={a.m} rates={','.join(fmt(r) for r in rates)}")
    out(f"rate      {fmt(result['rate'])} bits  (raw {fmt(sol.rate)})")
    out(f"eta       {fmt(sol.eta)}  ({sol.n_eta} coefficients)")
    out(f"q         {fmt(sol.q)}")
    out(f"v         {fmt(sol.v)}")
    out(f"lambda00  {fmt(sol.lambda00)}")
    out(f"lambda_Z  {fmt(sol.lambda_z)}")
    for k, lk in enumerate(sol.lambda_k):
        out(f"lambda_XZ^{k}  {fmt(lk)}")
    return result, {"rates_mode": mode, "rates": rates}


def cmd_threshold(a, out):
    q = asymptotic.max_tolerable_q(a.d, a.m, allow_nonprime=a.allow_nonprime)
    out(f"d={a.d} m={a.m} Q_max={q:.6f}")
    return {"q_max": q}, {}


def cmd_finite(a, out):
    if a.q is None:
        raise UsageError("finite needs --q")
    r = finite.optimize_rate(a.N, a.d, a.m, a.q, eps_tot=a.eps_tot, bound=a.bound,
                             attack=a.attack, eps_mode=a.eps_mode, C=a.C, f=a.f)
    res = r.as_dict()
    out(f"N={a.N} d={a.d} m={a.m} Q={fmt(a.q)} bound={a.bound} attack={a.attack}")
    out(f"rate      {fmt(r.rate)} bits/round  (raw {fmt(r.raw_rate)})")
    out(f"feasible  {str(r.feasible).lower()}")
    out(f"k         {r.k}  (n = {a.N - r.k})")
    out(f"ell       {fmt(r.key_length)} bits")
    out(f"mu        {fmt(r.mu)}")
    for key in ("log2_eps_smooth", "log2_eps_ec", "log2_eps_pa", "log2_eps_tot"):
        out(f"{key:<16}{fmt(res[key])}")
    if r.log2_eps_coh is not None:
        out(f"log2_eps_coh    {fmt(r.log2_eps_coh)}  ({r.eps_mode})")
    resolved = {"C": a.C if a.C is not None else math.log2(a.d)}
    return res, resolved


def cmd_figure(a, out):
    kwargs = {}
    if a.name == "fig5":
        kwargs = {"per_decade": a.per_decade, "eps_mode": a.eps_mode}
    curves = sweeps.figure(a.name, threads=a.threads, **kwargs)
    paths = sweeps.write_curves(curves, a.out)
    for p in paths:
        out(str(p))
    return {"files": [str(p) for p in paths]}, {"threads": sweeps.thread_count(a.threads)}


def cmd_verify(a, out):
    code = verify.run_checks(a.level, seed=a.seed, inject_fault=a.inject_fault, out=out)
    return {"passed": code == 0, "exit_code": code}, {}


def _add_common(p, *names):
    add = {
        "d": lambda: p.add_argument("--d", type=int, required=False, help="dimension"),
        "m": lambda: p.add_argument("--m", type=int, help="number of measured bases"),
        "q": lambda: p.add_argument("--q", type=float, help="error rate in every basis"),
        "allow": lambda: p.add_argument("--allow-nonprime", action="store_true",
                                        help="allow m > 3 for composite d"),
    }
    for n in names:
        add[n]()


def build_parser():
    parser = _Parser(prog="hdqkd", description="High-dimensional QKD key rates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with default flag values")
    common.add_argument("--json", action="store_true", help="print a JSON run record")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("asymptotic", parents=[common], help="asymptotic key rate")
    _add_common(p, "d", "m", "q", "allow")
    p.add_argument("--qx", type=float, help="X-basis error (m = 2)")
    p.add_argument("--qz", type=float, help="Z-basis error (m = 2)")
    p.add_argument("--rates", type=_float_list, help="Q_Z,Q_X,Q_XZ,... (m values)")
    p.set_defaults(func=cmd_asymptotic)

    p = sub.add_parser("threshold", parents=[common], help="largest tolerable symmetric error rate")
    _add_common(p, "d", "m", "allow")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("finite", parents=[common], help="optimized finite-size key rate")
    _add_common(p, "d", "m", "q")
    p.add_argument("--N", type=_count, help="total number of rounds")
    p.add_argument("--eps-tot", type=float, default=1e-10)
    p.add_argument("--bound", choices=finite.BOUNDS, default="aep")
    p.add_argument("--attack", choices=finite.ATTACKS, default="collective")
    p.add_argument("--eps-mode", choices=finite.EPS_MODES, default="derive-eps")
    p.add_argument("--C", type=float, default=None, help="measurement incompatibility (bits)")
    p.add_argument("--f", type=float, default=1.0, help="error-correction inefficiency")
    p.set_defaults(func=cmd_finite)

    p = sub.add_parser("figure", parents=[common], help="write the CSV curves of one figure")
    p.add_argument("name", choices=sweeps.FIGURES)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default HDQKD_THREADS or 1)")
    p.add_argument("--per-decade", type=int, default=10, help="fig5 grid density")
    p.add_argument("--eps-mode", choices=finite.EPS_MODES, default="derive-eps")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("verify", parents=[common], help="run the self-verification suites")
    p.add_argument("--level", choices=tuple(verify.LEVELS), default="quick")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", action="store_true", help="corrupt one coefficient (negative test)")
    p.set_defaults(func=cmd_verify)
    return parser, sub


REQUIRED = {
    "asymptotic": ("d", "m"),
    "threshold": ("d", "m"),
    "finite": ("N", "d", "m"),
}


def parse(argv):
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                config = json.load(fh)
        except (OSError, ValueError) as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        if not isinstance(config, dict):
            parser.error("config file must hold a JSON object")
        config = {k.replace("-", "_"): v for k, v in config.items()}
        # file values become defaults, then the command line is parsed again on top
        sub.choices[args.command].set_defaults(**config)
        args = parser.parse_args(argv)
    missing = [f"--{n}" for n in REQUIRED.get(args.command, ()) if getattr(args, n) is None]
    if missing:
        parser.error(f"{args.command}: missing {', '.join(missing)}")
    return parser, args


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser, args = parse(argv)
    lines = []
    out = lines.append if args.json else print
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "json", "config")}
    t0 = time.perf_counter()
    try:
        result, resolved = args.func(args, out)
    except (UsageError, UnsupportedBoundError, UnsupportedRegimeError) as exc:
        parser.error(str(exc))
    except (InfeasibleRatesError, NoFeasibleRootError) as exc:
        print(f"hdqkd: infeasible error rates: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        parser.error(str(exc))
    record = RunRecord(args.command, inputs, resolved, result, __version__,
                       time.perf_counter() - t0)
    if args.json:
        print(record.to_json())
    code = EXIT_VERIFY if args.command == "verify" and not result["passed"] else EXIT_OK
    return code


if __name__ == "__main__":
    sys.exit(main())
