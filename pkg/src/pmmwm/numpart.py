"""Constructive partitioning of a fixed weight vector into m capacity-bounded
sets minimizing the maximum sum.

Two constructors are provided: longest-processing-time greedy (LPT) and
multi-way largest-differencing (Karmarkar-Karp), plus an exhaustive solver
used as the test oracle. Both constructors are deterministic: items of equal
weight are ordered by U-index and all ties break toward the lowest partition
index. They seed the genetic algorithm's initial population; neither is an
exact solver.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .errors import CapacityInfeasible, TooLarge
from .graph import PartitionAssignment

BRUTE_FORCE_GUARD = 10_000_000


@dataclass(frozen=True)
class WeightedItem:
    """A U-vertex together with its matched edge weight."""

    u: int
    w: int


def _check_items(items: list[WeightedItem], m: int, ubar: int) -> None:
    if m < 1 or ubar < 1:
        raise CapacityInfeasible(f"need m >= 1 and ubar >= 1, got m={m} ubar={ubar}")
    if m * ubar < len(items):
        raise CapacityInfeasible(
            f"m*ubar = {m * ubar} cannot hold {len(items)} items")
    us = sorted(it.u for it in items)
    if us != list(range(len(items))):
        raise ValueError("item U-indices must be exactly 0..n-1")


def _empty_assignment(m: int, ubar: int, n: int) -> PartitionAssignment:
    return PartitionAssignment(m, ubar, [0] * n)


def greedy_in_order(items: list[WeightedItem], m: int, ubar: int) -> PartitionAssignment:
    """Assign items, in the given order, each to the lightest partition with
    spare capacity (ties: lowest index)."""
    _check_items(items, m, ubar)
    part_of = [0] * len(items)
    sums = [0] * m
    sizes = [0] * m
    for it in items:
        best = -1
        for k in range(m):
            if sizes[k] < ubar and (best == -1 or sums[k] < sums[best]):
                best = k
        part_of[it.u] = best
        sums[best] += it.w
        sizes[best] += 1
    return PartitionAssignment(m, ubar, part_of)


def greedy_lpt(items: list[WeightedItem], m: int, ubar: int) -> PartitionAssignment:
    """Longest-processing-time greedy: heaviest items placed first."""
    ordered = sorted(items, key=lambda it: (-it.w, it.u))
    return greedy_in_order(ordered, m, ubar)


class _KKTuple:
    """A partial m-way split: m disjoint item lists with sums kept sorted
    descending; spread = sums[0] - sums[m-1]."""

    __slots__ = ("subsets", "sums")

    def __init__(self, subsets: list[list[WeightedItem]], sums: list[int]):
        order = sorted(range(len(sums)), key=lambda i: -sums[i])
        self.subsets = [subsets[i] for i in order]
        self.sums = [sums[i] for i in order]

    @property
    def spread(self) -> int:
        return self.sums[0] - self.sums[-1]


def _merge(a: _KKTuple, b: _KKTuple, m: int) -> _KKTuple:
    # largest-with-smallest pairing: a.sums[i] joins b.sums[m-1-i]
    subsets = [a.subsets[i] + b.subsets[m - 1 - i] for i in range(m)]
    sums = [a.sums[i] + b.sums[m - 1 - i] for i in range(m)]
    return _KKTuple(subsets, sums)


def kk_multiway(items: list[WeightedItem], m: int, ubar: int) -> PartitionAssignment:
    """Multi-way Karmarkar-Karp differencing with a capacity-repair pass.

    Classic differencing: every item starts as its own tuple; repeatedly the
    two tuples with the largest spread (ties: older tuple first) merge by
    pairing largest sums with smallest. The final tuple balances sums but
    ignores ubar, so a repair pass then moves the smallest item out of each
    overfull partition into the lightest partition with spare room.
    """
    _check_items(items, m, ubar)
    n = len(items)
    if n == 0:
        return _empty_assignment(m, ubar, 0)

    heap: list[tuple[int, int, _KKTuple]] = []
    seq = 0
    for it in sorted(items, key=lambda x: (-x.w, x.u)):
        subsets: list[list[WeightedItem]] = [[] for _ in range(m)]
        sums = [0] * m
        subsets[0] = [it]
        sums[0] = it.w
        heapq.heappush(heap, (-it.w, seq, _KKTuple(subsets, sums)))
        seq += 1
    while len(heap) > 1:
        _, _, a = heapq.heappop(heap)
        _, _, b = heapq.heappop(heap)
        merged = _merge(a, b, m)
        heapq.heappush(heap, (-merged.spread, seq, merged))
        seq += 1
    final = heap[0][2]

    part_of = [0] * n
    sums = list(final.sums)
    subsets = [sorted(sub, key=lambda it: (it.w, it.u)) for sub in final.subsets]
    sizes = [len(sub) for sub in subsets]
    while True:
        over = next((k for k in range(m) if sizes[k] > ubar), None)
        if over is None:
            break
        target = -1
        for k in range(m):
            if k != over and sizes[k] < ubar and (target == -1 or sums[k] < sums[target]):
                target = k
        moved = subsets[over].pop(0)  # smallest item of the overfull partition
        subsets[target].append(moved)
        subsets[target].sort(key=lambda it: (it.w, it.u))
        sums[over] -= moved.w
        sums[target] += moved.w
        sizes[over] -= 1
        sizes[target] += 1
    for k in range(m):
        for it in subsets[k]:
            part_of[it.u] = k
    return PartitionAssignment(m, ubar, part_of)


def bounded_min_max(weights: list[int], m: int, ubar: int,
                    upper_bound: int | None = None):
    """Exact min-max DFS over labeled assignments of plain weights.

    Returns (objective, labels) or None if nothing beats ``upper_bound``.
    Two exactness-preserving reductions: branches whose running maximum
    already reaches the incumbent are cut, and among currently-empty
    partitions only the lowest-indexed one is tried.
    """
    n = len(weights)
    order = sorted(range(n), key=lambda i: (-weights[i], i))
    best_obj = upper_bound
    best_labels: list[int] | None = None
    sums = [0] * m
    sizes = [0] * m
    choice = [0] * n

    def dfs(i: int, cur_max: int) -> None:
        nonlocal best_obj, best_labels
        if best_obj is not None and cur_max >= best_obj:
            return
        if i == n:
            best_obj = cur_max
            labels = [0] * n
            for pos, item_idx in enumerate(order):
                labels[item_idx] = choice[pos]
            best_labels = labels
            return
        w = weights[order[i]]
        seen_empty = False
        for k in range(m):
            if sizes[k] >= ubar:
                continue
            if sizes[k] == 0:
                if seen_empty:
                    continue
                seen_empty = True
            sums[k] += w
            sizes[k] += 1
            choice[i] = k
            dfs(i + 1, max(cur_max, sums[k]))
            sums[k] -= w
            sizes[k] -= 1

    dfs(0, 0)
    if best_labels is None:
        return None
    return int(best_obj), best_labels


def min_max_brute(items: list[WeightedItem], m: int, ubar: int) -> tuple[int, PartitionAssignment]:
    """Exact minimum of the max partition sum by exhaustive enumeration.

    Guarded to m**n <= 10**7 labeled assignments; the oracle the heuristic
    constructors are measured against.
    """
    if m ** len(items) > BRUTE_FORCE_GUARD:
        raise TooLarge(f"{m}**{len(items)} exceeds enumeration guard")
    _check_items(items, m, ubar)
    n = len(items)
    if n == 0:
        return 0, _empty_assignment(m, ubar, 0)
    ws = [0] * n
    for it in items:
        ws[it.u] = it.w
    obj, labels = bounded_min_max(ws, m, ubar)
    return obj, PartitionAssignment(m, ubar, labels)
