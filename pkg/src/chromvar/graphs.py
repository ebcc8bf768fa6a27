"""Small labelled graphs with bitset rows, G(n, p) sampling and exact solvers.

Vertex sets are Python ints used as bitsets (bit ``v`` set means vertex ``v``
is in the set).  The heavy searches (colouring, independent-set counting)
run in numba kernels from :mod:`chromvar._kernels`.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .analytic import SizeError
from .rng import derive_key, uniforms

MAX_VERTICES = 512


class SolverTimeout(RuntimeError):
    """Exact search ran out of budget; carries the certified bounds."""

    def __init__(self, message, lower, upper, certificate=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
        self.certificate = certificate


def edge_index(u: int, v: int, n: int) -> int:
    """Position of pair ``{u, v}`` in the row-major upper-triangle order."""
    if u > v:
        u, v = v, u
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Graph:
    n: int
    rows: tuple

    def __post_init__(self):
        if not 0 <= self.n <= MAX_VERTICES:
            raise SizeError(f"graph size {self.n} outside [0, {MAX_VERTICES}]")
        if len(self.rows) != self.n:
            raise ValueError("need one adjacency row per vertex")
        for v, row in enumerate(self.rows):
            if row >> v & 1:
                raise ValueError(f"loop at vertex {v}")
            if row >> self.n:
                raise ValueError(f"row {v} references a vertex >= n")
            for u in _bits(row):
                if not self.rows[u] >> v & 1:
                    raise ValueError(f"asymmetric adjacency between {u} and {v}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside range({n})")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def from_matrix(cls, matrix) -> "Graph":
        m = np.asarray(matrix, dtype=bool)
        n = m.shape[0]
        rows = []
        for v in range(n):
            packed = np.packbits(m[v], bitorder="little").tobytes()
            rows.append(int.from_bytes(packed, "little"))
        return cls(n, tuple(rows))

    @classmethod
    def from_edge_bits(cls, n: int, bits) -> "Graph":
        """Build from a boolean vector over pairs in :func:`edge_index` order."""
        m = np.zeros((n, n), dtype=bool)
        iu = np.triu_indices(n, 1)
        m[iu] = np.asarray(bits, dtype=bool)
        return cls.from_matrix(m | m.T)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << v) for v in range(n)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def petersen(cls) -> "Graph":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return cls.from_edges(10, outer + spokes + inner)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def num_edges(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def edges(self) -> list:
        return [(u, v) for u in range(self.n) for v in _bits(self.rows[u] >> (u + 1) << (u + 1))]

    def adjacency_matrix(self) -> np.ndarray:
        m = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges():
            m[u, v] = m[v, u] = True
        return m

    def edge_bits(self) -> np.ndarray:
        return self.adjacency_matrix()[np.triu_indices(self.n, 1)]

    def complement(self) -> "Graph":
        full = self.full_mask
        return Graph(self.n, tuple(full & ~r & ~(1 << v) for v, r in enumerate(self.rows)))

    def induced(self, vertices: Sequence[int]) -> "Graph":
        vs = list(vertices)
        pos = {v: i for i, v in enumerate(vs)}
        return Graph.from_edges(len(vs), [(pos[u], pos[v]) for u, v in self.edges() if u in pos and v in pos])

    def is_independent(self, mask: int) -> bool:
        for v in _bits(mask):
            if self.rows[v] & mask:
                return False
        return True

    def _csr(self):
        ptr = np.zeros(self.n + 1, dtype=np.int64)
        idx = []
        for v in range(self.n):
            nb = list(_bits(self.rows[v]))
            idx.extend(nb)
            ptr[v + 1] = ptr[v] + len(nb)
        return ptr, np.asarray(idx, dtype=np.int64)

    def _upper_nonadj(self) -> np.ndarray:
        if self.n > 64:
            raise SizeError("64-bit mask kernels need n <= 64")
        full = self.full_mask
        out = np.zeros(self.n, dtype=np.uint64)
        for v in range(self.n):
            higher = full & ~((1 << (v + 1)) - 1)
            out[v] = np.uint64(higher & ~self.rows[v])
        return out


# --- fixtures -------------------------------------------------------------

def write_graph(g: Graph, path) -> None:
    """Fixture format: ``n m`` then one ``u v`` line per edge, 0-based."""
    edges = g.edges()
    lines = [f"{g.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_graph(path) -> Graph:
    text = Path(path).read_text(encoding="utf-8").split("\n")
    n, m = (int(x) for x in text[0].split())
    edges = [tuple(int(x) for x in line.split()) for line in text[1:1 + m]]
    if len(edges) != m:
        raise ValueError(f"expected {m} edge lines, found {len(edges)}")
    return Graph.from_edges(n, edges)


# --- sampling -------------------------------------------------------------

def sample_gnp(n: int, p: float, seed: int) -> Graph:
    """G(n, p); pair ``e`` (upper-triangle order) is present iff draw ``e`` of the seed's stream is < p."""
    if not 1 <= n <= MAX_VERTICES:
        raise SizeError(f"n={n} outside [1, {MAX_VERTICES}]")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} is not a probability")
    bits = uniforms(derive_key(seed), 0, n * (n - 1) // 2) < p
    return Graph.from_edge_bits(n, bits)


# --- colouring ------------------------------------------------------------

@dataclass(frozen=True)
class ColouringCertificate:
    classes: tuple
    k: int = field(init=False)
    max_size: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "k", len(self.classes))
        object.__setattr__(self, "max_size", max((len(c) for c in self.classes), default=0))

    @classmethod
    def from_colours(cls, colours) -> "ColouringCertificate":
        groups: dict = {}
        for v, c in enumerate(colours):
            groups.setdefault(int(c), []).append(v)
        return cls(tuple(tuple(groups[c]) for c in sorted(groups)))

    def verify(self, g: Graph, t: int | None = None) -> bool:
        seen = 0
        for cls_ in self.classes:
            mask = 0
            for v in cls_:
                if mask >> v & 1 or seen >> v & 1:
                    return False
                mask |= 1 << v
            if not cls_ or not g.is_independent(mask):
                return False
            if t is not None and len(cls_) > t:
                return False
            seen |= mask
        return seen == g.full_mask


def _colour(g: Graph, cap: int, budget_secs: float, chunk: int = 200_000):
    n = g.n
    if n == 0:
        return 0, ColouringCertificate(())
    ptr, idx = g._csr()
    clique = K.greedy_clique(ptr, idx, n)
    lb = max(len(clique), -(-n // cap))
    color = np.full(n, -1, dtype=np.int64)
    cnt = np.zeros((n, n), dtype=np.int32)
    sat = np.zeros(n, dtype=np.int64)
    udeg = np.zeros(n, dtype=np.int64)
    csize = np.zeros(n, dtype=np.int64)
    stack_v = np.full(n, -1, dtype=np.int64)
    stack_c = np.full(n, -1, dtype=np.int64)
    best_color = np.arange(n, dtype=np.int64)
    istate = np.zeros(8, dtype=np.int64)
    K.colour_init(ptr, idx, n, clique, color, cnt, sat, udeg, csize, istate)
    istate[K.BEST] = n + 1
    start = time.monotonic()
    while True:
        K.colour_search(ptr, idx, n, cap, lb, color, cnt, sat, udeg, csize,
                        stack_v, stack_c, best_color, istate, chunk)
        if istate[K.STATUS] == K.DONE:
            break
        if time.monotonic() - start > budget_secs:
            cert = ColouringCertificate.from_colours(best_color) if istate[K.BEST] <= n else None
            upper = int(istate[K.BEST]) if istate[K.BEST] <= n else n
            raise SolverTimeout(f"colouring search exceeded {budget_secs}s", lb, upper, cert)
    return int(istate[K.BEST]), ColouringCertificate.from_colours(best_color)


def chromatic_number(g: Graph, budget_secs: float = 60.0):
    """Exact chi(g) with a certificate, by DSATUR branch and bound."""
    return _colour(g, max(g.n, 1), budget_secs)


def bounded_chromatic_number(g: Graph, t: int, budget_secs: float = 60.0):
    """Exact t-bounded chromatic number: every colour class has at most t vertices."""
    if t < 1:
        raise ValueError("t must be >= 1")
    return _colour(g, min(t, max(g.n, 1)), budget_secs)


# --- independent sets -----------------------------------------------------

def independence_number(g: Graph, budget_secs: float = 60.0) -> int:
    """Exact alpha(g): maximum clique of the complement with a greedy-colouring bound."""
    comp = g.complement().rows
    best = [0]
    deadline = time.monotonic() + budget_secs

    def colour_bound(cand: int):
        # greedy colouring of the candidates (in the complement); returns vertices with bounds
        order, bounds = [], []
        colour = 0
        rest = cand
        while rest:
            colour += 1
            avail = rest
            while avail:
                low = avail & -avail
                v = low.bit_length() - 1
                avail &= ~comp[v] & ~low
                rest &= ~low
                order.append(v)
                bounds.append(colour)
        return order, bounds

    def expand(size: int, cand: int):
        if time.monotonic() > deadline:
            raise SolverTimeout("independence search exceeded budget", best[0], g.n)
        order, bounds = colour_bound(cand)
        for i in range(len(order) - 1, -1, -1):
            if size + bounds[i] <= best[0]:
                return
            v = order[i]
            nxt = cand & comp[v]
            if nxt:
                expand(size + 1, nxt)
            elif size + 1 > best[0]:
                best[0] = size + 1
            cand &= ~(1 << v)

    if g.n:
        expand(0, g.full_mask)
    return best[0]


def count_independent_sets(g: Graph, a: int) -> int:
    """Exact number X_a(g) of independent a-sets (n <= 64, a <= 10)."""
    if g.n > 64 or a > 10:
        raise SizeError("counting supports n <= 64 and a <= 10")
    if a < 0:
        raise ValueError("a must be >= 0")
    if a > g.n:
        return 0
    return int(K.count_independent(g._upper_nonadj(), g.n, a))


def independent_sets(g: Graph, a: int) -> list:
    """All independent a-sets as bitmasks (lexicographic by sorted vertices)."""
    out = []

    def rec(start: int, chosen: int, cand: int, left: int):
        if left == 0:
            out.append(chosen)
            return
        for v in _bits(cand):
            if v < start:
                continue
            rec(v + 1, chosen | (1 << v), cand & ~g.rows[v] & ~((1 << (v + 1)) - 1), left - 1)

    rec(0, 0, g.full_mask, a)
    return out


def max_disjoint_a_sets(g: Graph, a: int, exact: bool = True, budget_secs: float = 60.0):
    """Largest number of pairwise disjoint independent a-sets.

    Returns ``(size, is_exact)``.  The greedy mode gives a maximal packing
    only, i.e. a lower bound.
    """
    if a < 1:
        raise ValueError("a must be >= 1")
    if exact and (g.n > 64 or a > 10):
        raise SizeError("exact packing supports n <= 64 and a <= 10")
    sets = independent_sets(g, a) if g.n <= 64 else _greedy_sets(g, a)
    if not exact:
        used, count = 0, 0
        for s in sets:
            if not s & used:
                used |= s
                count += 1
        return count, False
    by_vertex: dict = {}
    for s in sets:
        by_vertex.setdefault((s & -s).bit_length() - 1, []).append(s)
    best = [0]
    deadline = time.monotonic() + budget_secs
    cap = g.n // a

    def rec(free: int, count: int):
        if time.monotonic() > deadline:
            raise SolverTimeout("packing search exceeded budget", best[0], cap)
        if count > best[0]:
            best[0] = count
        if best[0] == cap or count + free.bit_count() // a <= best[0]:
            return
        if not free:
            return
        v = (free & -free).bit_length() - 1
        for s in by_vertex.get(v, ()):
            if s & free == s:
                rec(free & ~s, count + 1)
        rec(free & ~(1 << v), count)

    rec(g.full_mask, 0)
    return best[0], True


def _greedy_sets(g: Graph, a: int):
    # maximal packing for large graphs: scan vertices, grow sets greedily
    used = 0
    out = []
    for v in range(g.n):
        if used >> v & 1:
            continue
        s = 1 << v
        cand = g.full_mask & ~g.rows[v] & ~used & ~((1 << (v + 1)) - 1)
        while s.bit_count() < a and cand:
            u = (cand & -cand).bit_length() - 1
            s |= 1 << u
            cand &= ~g.rows[u] & ~(1 << u)
        if s.bit_count() == a:
            out.append(s)
            used |= s
    return out


# --- brute force ----------------------------------------------------------

def set_partitions(n: int):
    """All set partitions of range(n) as lists of blocks (restricted growth strings)."""
    if n == 0:
        yield []
        return
    rgs = [0] * n

    def rec(i: int, top: int):
        if i == n:
            blocks = [[] for _ in range(top + 1)]
            for v, b in enumerate(rgs):
                blocks[b].append(v)
            yield blocks
            return
        for b in range(top + 2):
            rgs[i] = b
            yield from rec(i + 1, max(top, b))

    rgs[0] = 0
    yield from rec(1, 0)


def brute_force_count_colourings(g: Graph, k: int, t: int) -> int:
    """Partitions of V(g) into exactly k independent classes of size <= t (n <= 10)."""
    if g.n > 10:
        raise SizeError("brute-force enumeration supports n <= 10")
    count = 0
    for blocks in set_partitions(g.n):
        if len(blocks) != k:
            continue
        if all(len(b) <= t and g.is_independent(sum(1 << v for v in b)) for b in blocks):
            count += 1
    return count


def colouring_profile_counts(g: Graph) -> dict:
    """Map ``(k, largest class)`` to the number of partitions of V(g) into independent classes."""
    if g.n > 10:
        raise SizeError("brute-force enumeration supports n <= 10")
    out: dict = {}
    for blocks in set_partitions(g.n):
        if all(g.is_independent(sum(1 << v for v in b)) for b in blocks):
            key = (len(blocks), max((len(b) for b in blocks), default=0))
            out[key] = out.get(key, 0) + 1
    return out


def all_graphs(n: int):
    """Every labelled graph on n vertices, ordered by the edge-bit integer."""
    pairs = list(itertools.combinations(range(n), 2))
    for code in range(1 << len(pairs)):
        yield Graph.from_edges(n, [pairs[i] for i in range(len(pairs)) if code >> i & 1])


def is_k_colourable(g: Graph, k: int) -> bool:
    """Exhaustive k-colourability check (intended for tiny graphs)."""
    colours = [-1] * g.n

    def rec(v: int, used: int) -> bool:
        if v == g.n:
            return True
        for c in range(min(used + 1, k)):
            if all(colours[u] != c for u in _bits(g.rows[v]) if u < v):
                colours[v] = c
                if rec(v + 1, max(used, c + 1)):
                    return True
        colours[v] = -1
        return False

    return rec(0, 0)


def binom_edge_count_stats(n: int, p: float):
    """Mean and standard deviation of the edge count of G(n, p)."""
    pairs = math.comb(n, 2)
    return pairs * p, math.sqrt(pairs * p * (1 - p))
