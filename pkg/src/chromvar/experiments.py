"""Table generators behind the command line: one CSV plus a manifest per run.

Floats are written with 17 significant digits so a rerun with the same
seed and parameters reproduces every CSV byte for byte.  A cell whose
computation failed holds ``ERR:<code>``.
"""
from __future__ import annotations

import csv
import io
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (DomainError, EstimateUnavailable, ModelParams, ScalePoint,
                       asymptotic_record, chi_estimate)
from .coupling import MAX_INVALID_FRACTION, coupling_chain_experiment
from .graphs import (SizeError, SolverTimeout, all_graphs, chromatic_number,
                     colouring_profile_counts, count_independent_sets,
                     independence_number, sample_gnp)
from .predict import RegimeError, g0_prediction
from .profile import MAX_EXACT_N, NoSignChange, exact_E, k_t_exact, solve_k_star
from .rng import derive_key

ANALYTIC_COLUMNS = ["n", "log_n", "alpha0", "alpha", "log_mu_alpha", "rho_hat", "lambda",
                    "f_est", "f_deriv", "k_star", "g0", "case_tag"]
SIMULATE_COLUMNS = ["n", "p", "trials", "seed", "chi_mean", "chi_var", "chi_min", "chi_max",
                    "alpha_mean", "x_alpha_mean", "invalid_trials"]
ORACLE_COLUMNS = ["n", "t", "k", "E_exact", "E", "enum_avg", "agree", "k_t"]
COUPLING_COLUMNS = ["kind", "n", "a", "r", "p", "trial", "chi_start", "chi_end", "chi_direct",
                    "monotone_ok", "chi", "count_chain", "count_direct", "tv", "tv_se",
                    "tv_null_rms", "budget", "monotone_fraction", "invalid_trials"]
PREDICT_COLUMNS = ["n", "log_n", "a", "x", "log_x", "case_tag", "g0", "w_n", "w_tilde", "nstar_bound",
                   "nstar_applicable", "polylog_bound", "alphashift_floor", "k_star", "y", "B",
                   "log_mu_prime", "log_pipeline"]


class InvalidTrials(RuntimeError):
    """More than the allowed share of trials timed out."""


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def err(code: str) -> str:
    return f"ERR:{code}"


def _err_code(exc: Exception) -> str:
    if isinstance(exc, NoSignChange):
        return "no-sign-change"
    if isinstance(exc, EstimateUnavailable):
        return "estimate-unavailable"
    if isinstance(exc, RegimeError):
        return "regime"
    if isinstance(exc, SolverTimeout):
        return "timeout"
    if isinstance(exc, SizeError):
        return "size"
    if isinstance(exc, OverflowError):
        return "overflow"
    return "domain"


def _cell(fn):
    try:
        return fn()
    except (DomainError, SolverTimeout, SizeError, OverflowError, ValueError) as exc:
        return err(_err_code(exc))


def render_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


@dataclass
class RunManifest:
    command: str
    argv: list
    seed: int | None
    params: dict
    start: str = ""
    end: str = ""
    rows: int = 0
    status: str = "running"

    def render(self) -> str:
        lines = [
            f"command: {self.command}",
            f"argv: {' '.join(self.argv)}",
            f"seed: {self.seed}",
            f"version: {__version__}",
            f"start: {self.start}",
            f"end: {self.end}",
            f"rows: {self.rows}",
            f"status: {self.status}",
        ]
        lines += [f"param.{k}: {fmt(v)}" for k, v in sorted(self.params.items())]
        return "\n".join(lines) + "\n"


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%S%z")


def write_run(out_dir, name: str, columns, rows_fn, manifest: RunManifest):
    """Write the manifest, compute rows, write the CSV, then finalise the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    man_path = out / f"{name}.manifest.txt"
    manifest.start = _now()
    man_path.write_text(manifest.render(), encoding="utf-8", newline="\n")
    try:
        rows = rows_fn()
    except Exception:
        manifest.status = "failed"
        manifest.end = _now()
        man_path.write_text(manifest.render(), encoding="utf-8", newline="\n")
        raise
    csv_path = out / f"{name}.csv"
    csv_path.write_text(render_csv(columns, rows), encoding="utf-8", newline="\n")
    manifest.rows = len(rows)
    manifest.end = _now()
    manifest.status = "ok"
    man_path.write_text(manifest.render(), encoding="utf-8", newline="\n")
    return csv_path, rows


def n_grid(n_min: float, n_max: float, points: int, grid: str = "log") -> list:
    """Scale points from n_min to n_max; bounds may be given as floats or as ``1e1000``-style strings."""
    lo, hi = _log_of(n_min), _log_of(n_max)
    if points < 1 or hi < lo:
        raise DomainError("need points >= 1 and n_max >= n_min")
    if points == 1:
        return [ScalePoint.from_log(lo)]
    if grid == "log":
        return [ScalePoint.from_log(v) for v in np.linspace(lo, hi, points)]
    if grid == "linear":
        if hi > 700:
            raise DomainError("linear grids need n_max below 1e300")
        return [ScalePoint.of(float(v)) for v in np.linspace(math.exp(lo), math.exp(hi), points)]
    raise DomainError(f"unknown grid {grid!r}")


def _log_of(v) -> float:
    if isinstance(v, str):
        mant, _, ex = v.lower().partition("e")
        return math.log(float(mant)) + (int(ex) if ex else 0) * math.log(10.0)
    return math.log(v)


def _n_value(s: ScalePoint):
    return s.n if s.n is not None else err("log-only")


# --- analytic -------------------------------------------------------------

def analytic_rows(points, p: float = 0.5) -> list:
    m = ModelParams(p)
    rows = []
    for s in points:
        row = {"n": _n_value(s), "log_n": s.log_n}
        try:
            rec = asymptotic_record(s, m)
        except DomainError as exc:
            rows.append({**row, **{c: err(_err_code(exc)) for c in ANALYTIC_COLUMNS[2:]}})
            continue
        row.update(alpha0=rec.alpha0, alpha=rec.alpha, log_mu_alpha=rec.log_mu_alpha,
                   rho_hat=rec.rho_hat, **{"lambda": rec.lam})
        row["f_est"] = rec.f_est if rec.f_est is not None else _cell(lambda: chi_estimate(s, m))
        row["f_deriv"] = rec.f_deriv
        pred = _cell(lambda: g0_prediction(s, m))
        if isinstance(pred, str):
            row["g0"] = row["case_tag"] = pred
        else:
            row["g0"], row["case_tag"] = pred.g0, pred.case_tag
        if p != 0.5:
            row["k_star"] = err("p-not-half")
        elif isinstance(pred, str) or math.isnan(pred.k_star):
            row["k_star"] = _cell(lambda: _k_value(solve_k_star(s)))
        else:
            row["k_star"] = pred.k_star
        rows.append(row)
    return rows


def _k_value(r):
    return r.k_star if r.k_star is not None else math.exp(r.log_k) if r.log_k < 709 else math.inf


# --- simulate -------------------------------------------------------------

class Welford:
    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self.m2 = 0.0
        self.lo = math.inf
        self.hi = -math.inf

    def add(self, v: float):
        self.count += 1
        d = v - self.mean
        self.mean += d / self.count
        self.m2 += d * (v - self.mean)
        self.lo = min(self.lo, v)
        self.hi = max(self.hi, v)

    @property
    def var(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0


def _sim_trial(args):
    n, p, key, budget, a_level = args
    g = sample_gnp(n, p, key)
    try:
        chi, _ = chromatic_number(g, budget)
        alpha = independence_number(g, budget)
    except SolverTimeout:
        return None
    x = count_independent_sets(g, a_level) if n <= 64 and a_level <= 10 else None
    return chi, alpha, x


def simulate_rows(ns, p: float, trials: int, seed: int, budget_secs: float = 60.0,
                  workers: int = 1) -> list:
    m = ModelParams(p)
    rows = []
    for n in ns:
        if not 1 <= n <= 512:
            raise SizeError(f"n={n} outside [1, 512]")
        try:
            a_level = asymptotic_record(ScalePoint.of(n), m).alpha
        except DomainError:
            a_level = 1
        jobs = [(n, p, derive_key(seed, n, i), budget_secs, a_level) for i in range(trials)]
        if workers > 1:
            with ProcessPoolExecutor(workers) as ex:
                out = list(ex.map(_sim_trial, jobs, chunksize=8))
        else:
            out = [_sim_trial(j) for j in jobs]
        chi_w, alpha_w, x_w = Welford(), Welford(), Welford()
        invalid = 0
        for res in out:
            if res is None:
                invalid += 1
                continue
            chi_w.add(res[0])
            alpha_w.add(res[1])
            if res[2] is not None:
                x_w.add(res[2])
        rows.append({
            "n": n, "p": p, "trials": trials, "seed": seed,
            "chi_mean": chi_w.mean if chi_w.count else math.nan, "chi_var": chi_w.var,
            "chi_min": int(chi_w.lo) if chi_w.count else math.nan,
            "chi_max": int(chi_w.hi) if chi_w.count else math.nan,
            "alpha_mean": alpha_w.mean if alpha_w.count else math.nan,
            "x_alpha_mean": x_w.mean if x_w.count else err("size"),
            "invalid_trials": invalid,
        })
    return rows


def invalid_share_ok(rows, key="invalid_trials", trials_key="trials") -> bool:
    return all(r[key] <= MAX_INVALID_FRACTION * r[trials_key] for r in rows)


# --- oracle ---------------------------------------------------------------

def enumeration_average(n: int) -> dict:
    """Average over all graphs on n vertices of the number of t-bounded k-colourings, keyed by (k, t)."""
    totals: dict = {}
    count = 0
    for g in all_graphs(n):
        count += 1
        for (k, biggest), c in colouring_profile_counts(g).items():
            for t in range(biggest, n + 1):
                totals[(k, t)] = totals.get((k, t), 0) + c
    return {key: Fraction(v, count) for key, v in totals.items()}


def oracle_rows(max_n: int) -> list:
    if max_n > 8:
        raise SizeError("oracle tables support max_n <= 8")
    rows = []
    for n in range(1, max_n + 1):
        enum = enumeration_average(n) if n <= 5 else None
        for t in range(1, n + 1):
            kt = k_t_exact(n, t)
            for k in range(-(-n // t), n + 1):
                e = exact_E(n, k, t).value
                row = {"n": n, "t": t, "k": k, "E_exact": e, "E": float(e), "k_t": kt}
                if enum is not None:
                    avg = enum.get((k, t), Fraction(0))
                    row["enum_avg"] = float(avg)
                    row["agree"] = avg == e
                rows.append(row)
    return rows


# --- coupling -------------------------------------------------------------

def coupling_rows(n: int, a: int, r: int, p: float, trials: int, seed: int,
                  budget_secs: float = 60.0, workers: int = 1):
    st = coupling_chain_experiment(n, a, r, p, trials, seed, budget_secs, workers=workers)
    base = {"n": n, "a": a, "r": r, "p": p}
    rows = []
    for c in st.results:
        rows.append({**base, "kind": "trial", "trial": c.trial, "chi_start": c.chi_start,
                     "chi_end": c.chi_end, "chi_direct": c.chi_direct, "monotone_ok": c.monotone_ok})
    for chi in sorted(set(st.hist_chain) | set(st.hist_direct)):
        rows.append({**base, "kind": "hist", "chi": chi, "count_chain": st.hist_chain.get(chi, 0),
                     "count_direct": st.hist_direct.get(chi, 0)})
    rows.append({**base, "kind": "summary", "tv": st.tv, "tv_se": st.tv_se,
                 "tv_null_rms": st.tv_null_rms, "budget": st.budget,
                 "monotone_fraction": st.monotone_fraction, "invalid_trials": st.invalid,
                 "monotone_ok": st.monotone_fraction == 1.0})
    return rows, st


# --- predict --------------------------------------------------------------

def predict_rows(points, p: float = 0.5, eps: float = 0.1, c: float = 1.0) -> list:
    m = ModelParams(p)
    rows = []
    for s in points:
        row = {"n": _n_value(s), "log_n": s.log_n}
        try:
            pr = g0_prediction(s, m, eps, c)
        except DomainError as exc:
            rows.append({**row, **{k: err(_err_code(exc)) for k in PREDICT_COLUMNS[2:]}})
            continue
        comp = pr.components
        row.update(a=comp["a"], x=comp["x"], log_x=comp["log_x"], case_tag=pr.case_tag, g0=pr.g0, w_n=pr.w_n,
                   w_tilde=pr.w_tilde, nstar_bound=pr.nstar_bound,
                   nstar_applicable=pr.nstar_applicable, polylog_bound=pr.polylog_bound,
                   alphashift_floor=pr.alphashift_floor if not math.isnan(pr.alphashift_floor) else err("regime"),
                   k_star=pr.k_star,
                   y=comp.get("y", err("regime")), B=comp.get("B", err("regime")),
                   log_mu_prime=comp.get("log_mu_prime", err("regime")),
                   log_pipeline=comp.get("log_pipeline", err("regime")))
        rows.append(row)
    return rows


def run(command: str, rows_fn, columns, out_dir, argv, seed, params):
    manifest = RunManifest(command, list(argv), seed, params)
    return write_run(out_dir, command, columns, rows_fn, manifest)


def eprint(*a):
    print(*a, file=sys.stderr)
