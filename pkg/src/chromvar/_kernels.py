"""numba kernels for the exact combinatorial solvers.

The colouring search is resumable: all of its state lives in arrays owned by
the caller, and each call runs at most ``max_nodes`` search nodes before
returning.  The Python wrapper checks the wall clock between calls.
"""
from __future__ import annotations

import numpy as np
from numba import njit

# istate slots
DEPTH, USED, BEST, STATUS, NODES, FREE, COLOURED = 0, 1, 2, 3, 4, 5, 6
RUNNING, DONE = 0, 1


@njit(cache=True)
def greedy_clique(nbr_ptr, nbr_idx, n):
    """Best clique over greedy runs seeded at every vertex."""
    adj = np.zeros((n, n), dtype=np.bool_)
    for v in range(n):
        for j in range(nbr_ptr[v], nbr_ptr[v + 1]):
            adj[v, nbr_idx[j]] = True
    best = np.empty(0, dtype=np.int64)
    cand = np.empty(n, dtype=np.bool_)
    clique = np.empty(n, dtype=np.int64)
    for s in range(n):
        size = 0
        clique[size] = s
        size += 1
        for u in range(n):
            cand[u] = adj[s, u]
        while True:
            pick = -1
            pick_score = -1
            for u in range(n):
                if cand[u]:
                    score = 0
                    for w in range(n):
                        if cand[w] and adj[u, w]:
                            score += 1
                    if score > pick_score:
                        pick_score = score
                        pick = u
            if pick < 0:
                break
            clique[size] = pick
            size += 1
            for u in range(n):
                cand[u] = cand[u] and adj[pick, u]
        if size > best.shape[0]:
            best = clique[:size].copy()
    return best


@njit(cache=True)
def _assign(v, c, nbr_ptr, nbr_idx, color, cnt, sat, udeg, csize, istate):
    color[v] = c
    for j in range(nbr_ptr[v], nbr_ptr[v + 1]):
        u = nbr_idx[j]
        if cnt[u, c] == 0:
            sat[u] += 1
        cnt[u, c] += 1
        udeg[u] -= 1
    if csize[c] == 0:
        istate[USED] += 1
    csize[c] += 1
    istate[COLOURED] += 1


@njit(cache=True)
def _unassign(v, nbr_ptr, nbr_idx, color, cnt, sat, udeg, csize, istate):
    c = color[v]
    color[v] = -1
    for j in range(nbr_ptr[v], nbr_ptr[v + 1]):
        u = nbr_idx[j]
        cnt[u, c] -= 1
        if cnt[u, c] == 0:
            sat[u] -= 1
        udeg[u] += 1
    csize[c] -= 1
    if csize[c] == 0:
        istate[USED] -= 1
    istate[COLOURED] -= 1


@njit(cache=True)
def _select(n, color, sat, udeg):
    # max saturation, then max uncoloured degree, then lowest index
    best_v = -1
    best_s = -1
    best_d = -1
    for v in range(n):
        if color[v] < 0:
            s = sat[v]
            if s > best_s or (s == best_s and udeg[v] > best_d):
                best_v = v
                best_s = s
                best_d = udeg[v]
    return best_v


@njit(cache=True)
def colour_init(nbr_ptr, nbr_idx, n, clique, color, cnt, sat, udeg, csize, istate):
    """Pre-colour ``clique`` with colours 0..len-1 and set up the first search level."""
    for v in range(n):
        color[v] = -1
        sat[v] = 0
        udeg[v] = nbr_ptr[v + 1] - nbr_ptr[v]
        csize[v] = 0
    cnt[:, :] = 0
    istate[USED] = 0
    istate[COLOURED] = 0
    for i in range(clique.shape[0]):
        _assign(clique[i], i, nbr_ptr, nbr_idx, color, cnt, sat, udeg, csize, istate)
    istate[FREE] = n - clique.shape[0]
    istate[DEPTH] = 0
    istate[STATUS] = RUNNING
    istate[NODES] = 0


@njit(cache=True)
def colour_search(nbr_ptr, nbr_idx, n, cap, lb, color, cnt, sat, udeg, csize,
                  stack_v, stack_c, best_color, istate, max_nodes):
    """Run the DSATUR branch and bound for at most ``max_nodes`` nodes.

    ``cap`` bounds every class size (``cap >= n`` means unbounded).  On exit
    ``istate[BEST]`` holds the best colour count found so far and
    ``istate[STATUS]`` is DONE once optimality is proved.
    """
    free = istate[FREE]
    if istate[STATUS] == DONE:
        return
    if free == 0:
        if istate[USED] < istate[BEST]:
            istate[BEST] = istate[USED]
            for v in range(n):
                best_color[v] = color[v]
        istate[STATUS] = DONE
        return
    depth = istate[DEPTH]
    if depth == 0 and stack_v[0] < 0:
        stack_v[0] = _select(n, color, sat, udeg)
        stack_c[0] = -1
    budget = max_nodes
    while budget > 0:
        v = stack_v[depth]
        prev = stack_c[depth]
        if prev >= 0:
            _unassign(v, nbr_ptr, nbr_idx, color, cnt, sat, udeg, csize, istate)
        used = istate[USED]
        best = istate[BEST]
        hi = used
        if best - 2 < hi:
            hi = best - 2
        chosen = -1
        c = prev + 1
        while c <= hi:
            if cnt[v, c] == 0 and csize[c] < cap:
                new_used = used + 1 if c == used else used
                # vertices left after this one, minus room left in open classes
                rest = n - istate[COLOURED] - 1 - (new_used * cap - istate[COLOURED] - 1)
                need = new_used
                if rest > 0:
                    need += (rest + cap - 1) // cap
                if need < best:
                    chosen = c
                    break
            c += 1
        if chosen < 0:
            stack_c[depth] = -1
            stack_v[depth] = -1
            depth -= 1
            if depth < 0:
                istate[STATUS] = DONE
                istate[DEPTH] = 0
                return
            continue
        _assign(v, chosen, nbr_ptr, nbr_idx, color, cnt, sat, udeg, csize, istate)
        stack_c[depth] = chosen
        budget -= 1
        istate[NODES] += 1
        if depth == free - 1:
            istate[BEST] = istate[USED]
            for u in range(n):
                best_color[u] = color[u]
            if istate[BEST] <= lb:
                istate[STATUS] = DONE
                return
            continue
        depth += 1
        stack_v[depth] = _select(n, color, sat, udeg)
        stack_c[depth] = -1
    istate[DEPTH] = depth


@njit(cache=True)
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return int((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True)
def _lowbit_index(x):
    i = 0
    while (x & np.uint64(1)) == np.uint64(0):
        x >>= np.uint64(1)
        i += 1
    return i


@njit(cache=True)
def count_independent(nonadj, n, a):
    """Number of independent ``a``-sets; ``nonadj[v]`` holds the higher-indexed non-neighbours of v."""
    if a == 0:
        return 1
    full = np.uint64(0)
    for v in range(n):
        full |= np.uint64(1) << np.uint64(v)
    if a == 1:
        return n
    stack = np.zeros(a + 1, dtype=np.uint64)
    stack[0] = full
    depth = 0
    total = 0
    while depth >= 0:
        cand = stack[depth]
        if cand == np.uint64(0) or _popcount(cand) < a - depth:
            depth -= 1
            continue
        v = _lowbit_index(cand)
        stack[depth] = cand & ~(np.uint64(1) << np.uint64(v))
        nxt = nonadj[v] & stack[depth]
        if depth + 2 == a:
            total += _popcount(nxt)
        else:
            depth += 1
            stack[depth] = nxt
    return total


@njit(cache=True)
def count_independent_batch(nonadj_batch, n, a):
    out = np.empty(nonadj_batch.shape[0], dtype=np.int64)
    for i in range(nonadj_batch.shape[0]):
        out[i] = count_independent(nonadj_batch[i], n, a)
    return out


@njit(cache=True)
def upper_nonadj_from_edges(edge_bits, n):
    """Masks of higher-indexed non-neighbours from a row-major upper-triangle edge vector."""
    out = np.zeros(n, dtype=np.uint64)
    e = 0
    for u in range(n):
        m = np.uint64(0)
        for v in range(u + 1, n):
            if not edge_bits[e]:
                m |= np.uint64(1) << np.uint64(v)
            e += 1
        out[u] = m
    return out
