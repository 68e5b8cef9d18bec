"""Figure sweeps and their CSV serialization.

Every CSV starts with a version comment, then a comment line echoing the
parameters as ``key=value`` pairs, then a header row and the data. Floats
are written with ``repr`` so they read back bit for bit.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
import csv
import io
import os
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotic import max_tolerable_q, rate_symmetric
from .finite import optimize_rate
from .weyl import is_prime

TOOL = "hd-qkd-ratekit"
FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5")

FIG2_M_SET = (2, 3, 6, 12, 24, 48)
FIG3_DIMS = (2, 3, 5, 7, 11, 13, 17, 19, 23)
FIG4_MAX_D = 47


def thread_count(threads=None):
    """Worker count: explicit value, else HDQKD_THREADS, else 1."""
    if threads is None:
        threads = int(os.environ.get("HDQKD_THREADS", "1"))
    return max(1, int(threads))


def parallel_map(func, items, threads=None):
    """Ordered map; results follow the input order whatever the completion order.

    Work runs in worker processes (the optimizers are pure Python, so threads
    would serialize on the GIL); ``func`` must therefore be picklable.
    """
    items = list(items)
    n = min(thread_count(threads), len(items))
    if n <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * n))))


@dataclass
class Curve:
    """One curve of a figure, written as one CSV file."""

    name: str
    params: dict
    columns: list
    rows: list = field(default_factory=list)


def _fmt(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _param_text(value):
    if isinstance(value, (list, tuple)):
        return ",".join(_param_text(v) for v in value)
    return _fmt(value)


def curve_to_csv(curve):
    buf = io.StringIO()
    buf.write(f"# {TOOL} v{__version__}\n")
    buf.write("# " + " ".join(f"{k}={_param_text(v)}" for k, v in curve.params.items()) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(curve.columns)
    for row in curve.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def read_csv(path_or_text):
    """Parse a sweep CSV into (version line, params dict, columns, rows of floats)."""
    text = path_or_text
    if isinstance(path_or_text, Path) or (
        isinstance(path_or_text, str) and "\n" not in path_or_text
    ):
        text = Path(path_or_text).read_text()
    lines = text.splitlines()
    version = lines[0].lstrip("# ").strip()
    params = dict(item.split("=", 1) for item in lines[1].lstrip("# ").split())
    reader = csv.reader(lines[2:])
    columns = next(reader)
    rows = [[float(x) for x in r] for r in reader if r]
    return version, params, columns, rows


def write_curves(curves, outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for c in curves:
        p = outdir / f"{c.name}.csv"
        p.write_text(curve_to_csv(c))
        paths.append(p)
    return paths


def _rate_row(d, m, Q):
    raw = rate_symmetric(d, m, Q, allow_nonprime=True)
    return [Q, max(raw, 0.0), raw]


def _symmetric_curves(prefix, cases, q_grid, threads, extra):
    curves = []
    for d, m in cases:
        rows = parallel_map(partial(_rate_row, d, m), [float(Q) for Q in q_grid], threads)
        params = {"figure": prefix, "d": d, "m": m, "q_start": float(q_grid[0]),
                  "q_stop": float(q_grid[-1]), "points": len(q_grid)}
        params.update(extra)
        curves.append(Curve(f"{prefix}_d{d}_m{m}", params, ["Q", "rate", "raw_rate"], rows))
    return curves


def fig1(points=301, threads=None):
    """d = 5, every m from 2 to 6, symmetric errors."""
    q = np.linspace(0.0, 0.3, points)
    return _symmetric_curves("fig1", [(5, m) for m in range(2, 7)], q, threads, {})


def fig2(points=200, threads=None):
    """d = 47 with a trimmed set of basis counts."""
    q = np.linspace(0.0, 0.5, points)
    extra = {"m_set": FIG2_M_SET, "m_set_note": "trimmed-stand-in"}
    return _symmetric_curves("fig2", [(47, m) for m in FIG2_M_SET], q, threads, extra)


def fig3(points=251, threads=None):
    """Two bases, prime dimensions, symmetric errors."""
    q = np.linspace(0.0, 0.5, points)
    return _symmetric_curves("fig3", [(d, 2) for d in FIG3_DIMS], q, threads, {})


def _threshold_row(label, d):
    m = 2 if label == "m2" else d + 1
    return [d, m, max_tolerable_q(d, m)]


def fig4(threads=None, max_d=FIG4_MAX_D):
    """Largest tolerable symmetric error versus prime dimension, m = 2 and m = d + 1."""
    dims = [d for d in range(2, max_d + 1) if is_prime(d)]
    curves = []
    for label in ("m2", "mdp1"):
        rows = parallel_map(partial(_threshold_row, label), dims, threads)
        params = {"figure": "fig4", "curve": label, "dims": dims}
        curves.append(Curve(f"fig4_{label}", params, ["d", "m", "q_max"], rows))
    return curves


FIG5_COLUMNS = ["N", "rate", "raw_rate", "feasible", "k", "mu",
                "log2_eps_smooth", "log2_eps_ec", "log2_eps_pa"]


def fig5_grid(per_decade=10, start_exp=4, stop_exp=12):
    count = per_decade * (stop_exp - start_exp) + 1
    return [int(round(x)) for x in np.logspace(start_exp, stop_exp, count)]


def _finite_row(d, m, q, eps_tot, bound, attack, eps_mode, N):
    r = optimize_rate(N, d, m, q, eps_tot, bound=bound, attack=attack, eps_mode=eps_mode)
    s = r.split
    return [N, r.rate, r.raw_rate, r.feasible, r.k, r.mu,
            s.log2_eps_smooth, s.log2_eps_ec, s.log2_eps_pa]


def finite_curve(name, grid, d, m, q, eps_tot, bound, attack, eps_mode="derive-eps", threads=None):
    point = partial(_finite_row, d, m, q, eps_tot, bound, attack, eps_mode)
    rows = parallel_map(point, grid, threads)
    params = {"figure": "fig5", "d": d, "m": m, "Q": q, "eps_tot": eps_tot, "bound": bound,
              "attack": attack, "eps_mode": eps_mode if attack == "coherent" else "none",
              "N_start": grid[0], "N_stop": grid[-1], "points": len(grid)}
    return Curve(name, params, list(FIG5_COLUMNS), rows)


def fig5(per_decade=10, threads=None, eps_mode="derive-eps", start_exp=4, stop_exp=12):
    """d = 5, Q = 0.05, eps_tot = 1e-10: AEP for every m and both attacks, plus the EUR curve."""
    grid = fig5_grid(per_decade, start_exp, stop_exp)
    d, q, eps = 5, 0.05, 1e-10
    curves = []
    for attack in ("collective", "coherent"):
        for m in range(2, d + 2):
            curves.append(finite_curve(f"fig5_aep_{attack}_m{m}", grid, d, m, q, eps,
                                       "aep", attack, eps_mode, threads))
    curves.append(finite_curve("fig5_eur_collective_m2", grid, d, 2, q, eps,
                               "eur", "collective", eps_mode, threads))
    return curves


def figure(name, threads=None, **kwargs):
    """Compute the curves of one figure by name."""
    builders = {"fig1": fig1, "fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5}
    if name not in builders:
        raise ValueError(f"unknown figure {name!r}; expected one of {FIGURES}")
    return builders[name](threads=threads, **kwargs)


def column(curve_rows, columns, name):
    i = columns.index(name)
    return [r[i] for r in curve_rows]


def log_grid_crossover(grid, low, high):
    """First grid value where ``high`` strictly exceeds ``low``; None if never."""
    for N, a, b in zip(grid, low, high):
        if b > a:
            return N
    return None


__all__ = [
    "Curve", "FIGURES", "curve_to_csv", "read_csv", "write_curves", "figure",
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig5_grid", "finite_curve",
    "parallel_map", "thread_count", "log_grid_crossover",
]
