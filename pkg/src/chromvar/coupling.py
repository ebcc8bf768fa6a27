"""Planted independent sets, the size-biased law of G(n, p), and chained growth.

Planting a uniform a-set U (all pairs inside U forced absent, everything
else G(n, p)) gives the law of G(n, p) reweighted by X_a, the number of
independent a-sets.  Deleting U from a planted graph leaves G(n - a, p),
which is what :func:`grow_by_planting` runs backwards.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels as K
from .analytic import DomainError, ModelParams, log_binom, log_mu
from .graphs import (Graph, SizeError, SolverTimeout, chromatic_number,
                     count_independent_sets, sample_gnp)
from .rng import derive_key, sample_subset, uniforms

MAX_INVALID_FRACTION = 0.01


@dataclass(frozen=True)
class PlantedSample:
    graph: Graph
    planted: tuple


def _check_sizes(n: int, a: int):
    if not 1 <= a <= n <= 512:
        raise SizeError(f"need 1 <= a <= n <= 512, got a={a}, n={n}")


def _planted_bits(n: int, a: int, p: float, seed: int):
    u = sample_subset(derive_key(seed, 1), n, a)
    bits = uniforms(derive_key(seed, 2), 0, n * (n - 1) // 2) < p
    if a >= 2:
        iu, iv = np.array(list(itertools.combinations(u.tolist(), 2))).T
        bits[iu * (2 * n - iu - 1) // 2 + (iv - iu - 1)] = False
    return u, bits


def sample_planted(n: int, a: int, p: float, seed: int) -> PlantedSample:
    """G(n, p) with a uniformly placed a-set forced independent."""
    _check_sizes(n, a)
    u, bits = _planted_bits(n, a, p, seed)
    return PlantedSample(Graph.from_edge_bits(n, bits), tuple(u.tolist()))


def planted_counts(n: int, a: int, p: float, trials: int, seed: int, count_a: int | None = None) -> np.ndarray:
    """X_{count_a} of ``trials`` planted samples (trial i uses seed derive_key(seed, i))."""
    _check_sizes(n, a)
    if n > 64:
        raise SizeError("batched counting needs n <= 64")
    count_a = a if count_a is None else count_a
    out = np.empty(trials, dtype=np.int64)
    for i in range(trials):
        _, bits = _planted_bits(n, a, p, derive_key(seed, i))
        out[i] = K.count_independent(K.upper_nonadj_from_edges(bits, n), n, count_a)
    return out


def gnp_counts(n: int, a: int, p: float, trials: int, seed: int) -> np.ndarray:
    """X_a of ``trials`` samples of G(n, p) (same seeding scheme as :func:`planted_counts`)."""
    out = np.empty(trials, dtype=np.int64)
    pairs = n * (n - 1) // 2
    for i in range(trials):
        bits = uniforms(derive_key(derive_key(seed, i)), 0, pairs) < p
        out[i] = K.count_independent(K.upper_nonadj_from_edges(bits, n), n, a)
    return out


# --- exact laws -----------------------------------------------------------

def _frac(p) -> Fraction:
    return p if isinstance(p, Fraction) else Fraction(p)


def _graph_codes(n: int):
    pairs = list(itertools.combinations(range(n), 2))
    for code in range(1 << len(pairs)):
        yield code, Graph.from_edges(n, [pairs[i] for i in range(len(pairs)) if code >> i & 1])


def gnp_law(n: int, p) -> dict:
    """Exact law of G(n, p) keyed by edge code (bit e = pair e in upper-triangle order)."""
    p = _frac(p)
    m = n * (n - 1) // 2
    return {code: p ** g.num_edges() * (1 - p) ** (m - g.num_edges()) for code, g in _graph_codes(n)}


def planted_law(n: int, a: int, p) -> dict:
    """Exact law of the planted graph, summing over every placement of U."""
    _check_sizes(n, a)
    p = _frac(p)
    m = n * (n - 1) // 2
    free = m - math.comb(a, 2)
    subsets = [sum(1 << v for v in s) for s in itertools.combinations(range(n), a)]
    law = {}
    for code, g in _graph_codes(n):
        hits = sum(1 for s in subsets if g.is_independent(s))
        e = g.num_edges()
        law[code] = Fraction(hits, len(subsets)) * p ** e * (1 - p) ** (free - e)
    return law


@dataclass(frozen=True)
class DistCheck:
    n: int
    a: int
    p: Fraction
    max_discrepancy: Fraction
    rows: list = field(repr=False)

    @property
    def max_abs(self) -> float:
        return float(self.max_discrepancy)


def exact_dist_check(n: int, a: int, p) -> DistCheck:
    """Compare Pr(P_n = H) with X_a(H) p_H / mu for every labelled H on n <= 5 vertices."""
    if n > 5:
        raise SizeError("exact enumeration supports n <= 5")
    p = _frac(p)
    direct = planted_law(n, a, p)
    mu = math.comb(n, a) * (1 - p) ** math.comb(a, 2)
    m = n * (n - 1) // 2
    rows = []
    worst = Fraction(0)
    for code, g in _graph_codes(n):
        e = g.num_edges()
        biased = count_independent_sets(g, a) * p ** e * (1 - p) ** (m - e) / mu
        diff = abs(direct[code] - biased)
        worst = max(worst, diff)
        rows.append((code, direct[code], biased))
    return DistCheck(n, a, p, worst, rows)


def grow_law(m: int, a: int, p) -> dict:
    """Exact law of grow_by_planting(G(m, p), a, p), keyed by edge code on m + a vertices."""
    p = _frac(p)
    n = m + a
    pairs = list(itertools.combinations(range(n), 2))
    pos = {pr: i for i, pr in enumerate(pairs)}
    base = gnp_law(m, p)
    law: dict = {}
    placements = list(itertools.combinations(range(n), a))
    for u in placements:
        rest = [v for v in range(n) if v not in u]
        cross = [(x, y) if x < y else (y, x) for x in u for y in rest]
        sub_pairs = list(itertools.combinations(range(m), 2))
        for gcode, gp in base.items():
            code0 = 0
            for i, (x, y) in enumerate(sub_pairs):
                if gcode >> i & 1:
                    code0 |= 1 << pos[(rest[x], rest[y])]
            for mask in range(1 << len(cross)):
                code = code0
                e = 0
                for j, pr in enumerate(cross):
                    if mask >> j & 1:
                        code |= 1 << pos[pr]
                        e += 1
                w = gp * p ** e * (1 - p) ** (len(cross) - e) / len(placements)
                law[code] = law.get(code, 0) + w
    return law


# --- moments --------------------------------------------------------------

def mu_exact(n: int, a: int, p):
    if isinstance(p, Fraction):
        return math.comb(n, a) * (1 - p) ** math.comb(a, 2)
    return math.exp(log_mu(a, n, _model(p)))


def _model(p) -> ModelParams:
    return ModelParams(float(p))


def var_Xa_exact(n: int, a: int, p):
    """Var X_a over G(n, p); exact Fraction for Fraction p, else float.

    Written as sum_{j>=2} C(n,a) C(a,j) C(n-a,a-j) q^(2C(a,2)) (q^-C(j,2) - 1),
    which has no cancellation against mu^2.
    """
    if a > n:
        raise DomainError("a must not exceed n")
    if a < 1:
        raise DomainError("a must be >= 1")
    exact = isinstance(p, Fraction)
    q = 1 - _frac(p)
    total = Fraction(0)
    if exact or n <= 100_000:
        for j in range(2, a + 1):
            c = math.comb(n, a) * math.comb(a, j) * math.comb(n - a, a - j)
            if c:
                total += c * q ** (2 * math.comb(a, 2)) * (q ** -math.comb(j, 2) - 1)
        return total if exact else float(total)
    log_q = math.log(float(q))
    terms = []
    for j in range(2, a + 1):
        if a - j > n - a:
            continue
        lc = log_binom(n, a) + math.log(math.comb(a, j)) + log_binom(n - a, a - j)
        terms.append(lc + 2 * math.comb(a, 2) * log_q + math.log(math.expm1(-math.comb(j, 2) * log_q)))
    return math.exp(np.logaddexp.reduce(terms)) if terms else 0.0


def tv_upper_bound(n: int, a: int, p) -> float:
    """sqrt(Var X_a) / (2 mu): bound on the TV distance between G(n - a, p) and the planted graph minus U."""
    mu = mu_exact(n, a, p)
    if mu <= 0:
        raise DomainError("mu must be positive")
    return math.sqrt(float(var_Xa_exact(n, a, p))) / (2.0 * float(mu))


# --- growth and the chain experiment -------------------------------------

def grow_by_planting(g: Graph, a: int, p: float, seed: int) -> Graph:
    """Embed g on a uniform m-subset of m + a vertices; add an a-set with only random cross edges."""
    return _grow(g, a, p, seed)[0]


def _grow(g: Graph, a: int, p: float, seed: int):
    m = g.n
    n = m + a
    _check_sizes(n, a)
    u = sample_subset(derive_key(seed, 1), n, a)
    in_u = np.zeros(n, dtype=bool)
    in_u[u] = True
    rest = np.flatnonzero(~in_u)
    mat = np.zeros((n, n), dtype=bool)
    mat[np.ix_(rest, rest)] = g.adjacency_matrix()
    cross = (uniforms(derive_key(seed, 2), 0, a * m) < p).reshape(a, m)
    mat[np.ix_(u, rest)] = cross
    mat[np.ix_(rest, u)] = cross.T
    return Graph.from_matrix(mat), tuple(u.tolist())


@dataclass(frozen=True)
class ChainResult:
    trial: int
    chi_start: int
    chi_end: int
    chi_direct: int
    r: int
    a: int

    @property
    def monotone_ok(self) -> bool:
        return self.chi_end <= self.chi_start + self.r


def _chain_trial(args):
    trial, n, a, r, p, key, budget = args
    try:
        g = sample_gnp(n, p, derive_key(key, 0))
        chi0, _ = chromatic_number(g, budget)
        for j in range(r):
            g = grow_by_planting(g, a, p, derive_key(key, 1 + j))
        chi1, _ = chromatic_number(g, budget) if r else (chi0, None)
        direct = sample_gnp(n + a * r, p, derive_key(key, 1 << 20))
        chi_d, _ = chromatic_number(direct, budget)
    except SolverTimeout:
        return None
    return ChainResult(trial, chi0, chi1, chi_d, r, a)


def tv_hist(x, y) -> float:
    """Total variation between the empirical laws of two integer samples."""
    cx, cy = Counter(x), Counter(y)
    nx, ny = len(x), len(y)
    return 0.5 * sum(abs(cx[v] / nx - cy[v] / ny) for v in set(cx) | set(cy))


@dataclass(frozen=True)
class ChainStats:
    n: int
    a: int
    r: int
    p: float
    trials: int
    seed: int
    results: list = field(repr=False)
    invalid: int
    monotone_fraction: float
    hist_chain: dict
    hist_direct: dict
    tv: float
    tv_se: float
    tv_null_rms: float
    budget: float

    @property
    def invalid_ok(self) -> bool:
        return self.invalid <= MAX_INVALID_FRACTION * self.trials


def coupling_chain_experiment(n: int, a: int, r: int, p: float, trials: int, seed: int,
                              budget_secs: float = 60.0, resamples: int = 400,
                              workers: int = 1) -> ChainStats:
    """Grow G(n, p) by r plantings and compare chi with a fresh G(n + a r, p).

    The TV between the two chi histograms comes with a bootstrap standard
    error and the RMS of its permutation null (the scale of TV when both
    samples share one law).
    """
    if r < 0 or trials < 1:
        raise DomainError("need r >= 0 and trials >= 1")
    _check_sizes(n + a * r, a)
    jobs = [(i, n, a, r, p, derive_key(seed, n, i), budget_secs) for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            out = list(ex.map(_chain_trial, jobs, chunksize=16))
    else:
        out = [_chain_trial(j) for j in jobs]
    results = [res for res in out if res is not None]
    invalid = trials - len(results)
    ends = [c.chi_end for c in results]
    direct = [c.chi_direct for c in results]
    tv = tv_hist(ends, direct) if results else math.nan
    rng = np.random.Generator(np.random.PCG64(derive_key(seed, n, a, r)))
    boot, null = [], []
    if results:
        e_arr, d_arr = np.array(ends), np.array(direct)
        pooled = np.concatenate([e_arr, d_arr])
        for _ in range(resamples):
            boot.append(tv_hist(rng.choice(e_arr, e_arr.size), rng.choice(d_arr, d_arr.size)))
            perm = rng.permutation(pooled)
            null.append(tv_hist(perm[:e_arr.size], perm[e_arr.size:]))
    mu = math.exp(log_mu(a, n, _model(p)))
    return ChainStats(
        n=n, a=a, r=r, p=p, trials=trials, seed=seed, results=results, invalid=invalid,
        monotone_fraction=(sum(c.monotone_ok for c in results) / len(results)) if results else math.nan,
        hist_chain=dict(sorted(Counter(ends).items())),
        hist_direct=dict(sorted(Counter(direct).items())),
        tv=tv,
        tv_se=float(np.std(boot, ddof=1)) if len(boot) > 1 else math.nan,
        tv_null_rms=float(np.sqrt(np.mean(np.square(null)))) if null else math.nan,
        budget=r / (2.0 * math.sqrt(mu)),
    )
