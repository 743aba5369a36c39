"""Brute-force reference implementations used only by the test suite.

These deliberately share no code with the package: matchings are enumerated
as raw permutations and partitions as labeled assignments, so any agreement
with the solver is meaningful.
"""

import itertools
from functools import lru_cache

import numpy as np

from pmmwm.graph import BipartiteGraph

# Small enough that a whole row of sentinels cannot overflow int64 when summed.
_BIG = 1 << 56


@lru_cache(maxsize=None)
def _perm_table(n2: int, n1: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n2), n1)), dtype=np.int64)


def brute_force_min_matching(g: BipartiteGraph):
    """Minimum perfect-matching weight over available edges, or None.

    Enumerates every injective map U -> V (vectorized over a cached
    permutation table); practical for n2 <= 8.
    """
    eff = np.where(g.available_mask(), g.weight, _BIG).astype(np.int64)
    perms = _perm_table(g.n2, g.n1)
    costs = eff[np.arange(g.n1)[None, :], perms].sum(axis=1)
    best = int(costs.min())
    if best >= _BIG:
        return None
    return best


def brute_force_min_matching_mate(g: BipartiteGraph):
    """As above but also returns one optimal mate array."""
    eff = np.where(g.available_mask(), g.weight, _BIG).astype(np.int64)
    perms = _perm_table(g.n2, g.n1)
    costs = eff[np.arange(g.n1)[None, :], perms].sum(axis=1)
    idx = int(costs.argmin())
    best = int(costs[idx])
    if best >= _BIG:
        return None, None
    return best, [int(v) for v in perms[idx]]


def labeled_partitions(n: int, m: int, ubar: int):
    """Yield every labeled capacity-feasible assignment of n items to m parts."""
    for combo in itertools.product(range(m), repeat=n):
        counts = [0] * m
        ok = True
        for k in combo:
            counts[k] += 1
            if counts[k] > ubar:
                ok = False
                break
        if ok:
            yield combo


def brute_force_partition_min_max(weights, m: int, ubar: int):
    """Minimum achievable max partition sum by full labeled enumeration."""
    best = None
    for combo in labeled_partitions(len(weights), m, ubar):
        sums = [0] * m
        for w, k in zip(weights, combo):
            sums[k] += w
        top = max(sums) if sums else 0
        if best is None or top < best:
            best = top
    return best


def permutation_first_oracle(g: BipartiteGraph, m: int, ubar: int):
    """Exact PMMWM optimum, enumerating matchings before partitions.

    No pruning at all; the independent cross-check for the package's
    branch-and-bound oracle. Only usable for tiny instances.
    """
    eff = np.where(g.available_mask(), g.weight, _BIG).astype(np.int64)
    best = None
    for perm in itertools.permutations(range(g.n2), g.n1):
        ws = [int(eff[u, v]) for u, v in enumerate(perm)]
        if max(ws) >= _BIG:
            continue
        opt = brute_force_partition_min_max(ws, m, ubar)
        if opt is not None and (best is None or opt < best):
            best = opt
    return best


def improving_neighbor_exists(part_of, weights, m: int, ubar: int) -> bool:
    """True if any single relocation, swap, or 2-for-1 exchange from the
    heaviest partition lexicographically lowers the sorted weight vector."""
    n = len(part_of)
    w = {it.u: it.w for it in weights}
    sums = [0] * m
    sizes = [0] * m
    for u in range(n):
        sums[part_of[u]] += w[u]
        sizes[part_of[u]] += 1
    base = tuple(sorted(sums, reverse=True))
    h = sums.index(max(sums))
    h_items = [u for u in range(n) if part_of[u] == h]

    def fitness_after(moves):
        s = list(sums)
        c = list(sizes)
        for u, dst in moves:
            src = part_of[u]
            s[src] -= w[u]
            c[src] -= 1
            s[dst] += w[u]
            c[dst] += 1
        if max(c) > ubar:
            return None
        return tuple(sorted(s, reverse=True))

    for u in h_items:
        for k in range(m):
            if k != h:
                f = fitness_after([(u, k)])
                if f is not None and f < base:
                    return True
    for u in h_items:
        for y in range(n):
            if part_of[y] != h:
                f = fitness_after([(u, part_of[y]), (y, h)])
                if f is not None and f < base:
                    return True
    for i, u1 in enumerate(h_items):
        for u2 in h_items[i + 1:]:
            for y in range(n):
                if part_of[y] != h:
                    k = part_of[y]
                    f = fitness_after([(u1, k), (u2, k), (y, h)])
                    if f is not None and f < base:
                        return True
    return False
