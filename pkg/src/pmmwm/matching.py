"""Exact min-weight perfect matching on U with incremental repair.

The engine is a dense shortest-augmenting-path assignment solver in the
Jonker-Volgenant style: it maintains vertex potentials ``alpha`` (on U) and
``beta`` (on V) that are dual-feasible (alpha[u] + beta[v] <= w(u, v) for
every available edge) and a matching of tight edges. One *phase* rematches a
single free U-vertex by running a potential-adjusted Dijkstra over the dense
weight table and then shifting potentials so every matched edge is tight
again. A perfect matching of tight edges under feasible potentials is a
certificate of optimality, which is what makes incremental repair after an
edge ban or restore sound: repair only needs to re-run a single phase for the
one vertex whose matched edge was disturbed.

Costs per call on an n1 x n2 table:
    solve_full          n1 phases, O(n1^2 * n2)
    repair_after_ban    at most 1 phase, O(n1 * n2)
    repair_after_unban  at most 1 phase, O(n1 * n2)

Absent and banned edges participate as a saturating "infinite" weight; a
phase whose cheapest reachable free vertex costs that much reports
NoPerfectMatching without mutating the state.

Set the environment variable ``PMMWM_CHECK_INVARIANTS=1`` to run a full
dual-feasibility / complementary-slackness scan after every public operation
(used by the test suite; far too slow for production runs).
"""

from __future__ import annotations

import os

import numpy as np

from .errors import NoPerfectMatching
from .graph import ABSENT, BipartiteGraph

INF = 1 << 61          # effective weight of absent/banned edges
_INF_CUTOFF = 1 << 59  # any path cost this large must use a forbidden edge
_MASKED = 1 << 62      # argmin filler for settled columns
FREE = -1


def _checks_enabled() -> bool:
    return os.environ.get("PMMWM_CHECK_INVARIANTS", "") not in ("", "0")


class MatchState:
    """Matching, dual potentials, and the effective weight table.

    ``eff`` mirrors the graph's weights with INF in place of absent or
    banned edges; the repair operations keep it in sync one edge at a time.
    ``phase_count`` counts augmentation phases ever run on this state (tests
    use it to assert that repairs run at most one phase).
    """

    def __init__(self, graph: BipartiteGraph):
        self.eff = np.where(graph.banned | (graph.weight == ABSENT),
                            INF, graph.weight).astype(np.int64)
        self.mate_u = np.full(graph.n1, FREE, dtype=np.int64)
        self.mate_v = np.full(graph.n2, FREE, dtype=np.int64)
        self.alpha = np.zeros(graph.n1, dtype=np.int64)
        self.beta = np.zeros(graph.n2, dtype=np.int64)
        self.total_weight = 0
        self.phase_count = 0

    @property
    def n1(self) -> int:
        return self.eff.shape[0]

    @property
    def n2(self) -> int:
        return self.eff.shape[1]

    def matched_weight(self) -> int:
        return int(self.eff[np.arange(self.n1), self.mate_u].sum())


def _augment(st: MatchState, start_u: int) -> None:
    """Rematch the free vertex ``start_u`` along a shortest augmenting path.

    Dijkstra runs with the potentials frozen at phase start; the dual update
    applied at the end is the accumulated-delta form of the classic
    per-iteration update, so dual feasibility and tightness of matched edges
    are preserved. Raises NoPerfectMatching (state untouched) when no free
    vertex is reachable over available edges.
    """
    st.phase_count += 1
    eff, alpha, beta = st.eff, st.alpha, st.beta
    mate_u, mate_v = st.mate_u, st.mate_v
    n2 = st.n2

    dist = eff[start_u] - alpha[start_u] - beta
    way = np.full(n2, -1, dtype=np.int64)
    settled = np.zeros(n2, dtype=bool)
    order: list[int] = []

    while True:
        j = int(np.argmin(np.where(settled, _MASKED, dist)))
        if settled[j] or dist[j] >= _INF_CUTOFF:
            raise NoPerfectMatching(
                f"no augmenting path from U-vertex {start_u}")
        settled[j] = True
        order.append(j)
        if mate_v[j] == FREE:
            break
        r = int(mate_v[j])
        cand = dist[j] + (eff[r] - alpha[r] - beta)
        upd = ~settled & (cand < dist)
        dist[upd] = cand[upd]
        way[upd] = j

    # Dual update: every settled column except the free endpoint, and the
    # rows matched to them, shift by the remaining distance to the path cost.
    jfree = order[-1]
    mu = int(dist[jfree])
    inner = np.array(order[:-1], dtype=np.int64)
    if inner.size:
        adj = mu - dist[inner]
        alpha[mate_v[inner]] += adj
        beta[inner] -= adj
    alpha[start_u] += mu

    j = jfree
    while True:
        jprev = int(way[j])
        if jprev == -1:
            mate_v[j] = start_u
            mate_u[start_u] = j
            return
        r = int(mate_v[jprev])
        mate_v[j] = r
        mate_u[r] = j
        j = jprev


def solve_full(g: BipartiteGraph) -> MatchState:
    """Min-weight perfect matching on U from scratch (n1 phases)."""
    st = MatchState(g)
    st.alpha = st.eff.min(axis=1)
    if (st.alpha >= _INF_CUTOFF).any():
        u = int(np.argmax(st.alpha >= _INF_CUTOFF))
        raise NoPerfectMatching(f"U-vertex {u} has no available edges")
    for u in range(g.n1):
        _augment(st, u)
    st.total_weight = st.matched_weight()
    if _checks_enabled():
        check_invariants(g, st)
    return st


def repair_after_ban(g: BipartiteGraph, st: MatchState, u: int, v: int) -> MatchState:
    """Re-optimize after edge (u, v) was banned in ``g``.

    If the edge was unmatched, potentials and matching are untouched and the
    state is already optimal. If it was matched, u is freed and one phase
    rematches it.

    On NoPerfectMatching the ban destroyed feasibility: the state is rolled
    back to the pre-ban optimum and the caller MUST unban (u, v) in the graph
    to restore graph/state consistency.
    """
    if not g.banned[u, v]:
        raise ValueError(f"repair_after_ban: edge ({u}, {v}) is not banned")
    st.eff[u, v] = INF
    if st.mate_u[u] != v:
        if _checks_enabled():
            check_invariants(g, st)
        return st
    st.mate_u[u] = FREE
    st.mate_v[v] = FREE
    try:
        _augment(st, u)
    except NoPerfectMatching:
        st.mate_u[u] = v
        st.mate_v[v] = u
        st.eff[u, v] = int(g.weight[u, v])
        raise
    st.total_weight = st.matched_weight()
    if _checks_enabled():
        check_invariants(g, st)
    return st


def _unban_repair(g: BipartiteGraph, st: MatchState, u: int, v: int) -> None:
    w = int(g.weight[u, v])
    st.eff[u, v] = w
    if int(st.alpha[u]) + int(st.beta[v]) <= w:
        return
    st.alpha[u] = (st.eff[u] - st.beta).min()
    vm = int(st.mate_u[u])
    if int(st.alpha[u]) + int(st.beta[vm]) == int(st.eff[u, vm]):
        return
    st.mate_u[u] = FREE
    st.mate_v[vm] = FREE
    _augment(st, u)
    st.total_weight = st.matched_weight()


def repair_after_unban(g: BipartiteGraph, st: MatchState, u: int, v: int) -> MatchState:
    """Re-optimize after edge (u, v) was restored in ``g``.

    If the restored edge already satisfies dual feasibility the state is
    unchanged. Otherwise alpha[u] drops to u's minimum slack, which breaks
    the tightness of u's matched edge, and one phase rematches u. Restoring
    an edge cannot destroy feasibility, so this never raises.
    """
    if g.banned[u, v] or not g.has_edge(u, v):
        raise ValueError(f"repair_after_unban: edge ({u}, {v}) is not available")
    _unban_repair(g, st, u, v)
    if _checks_enabled():
        check_invariants(g, st)
    return st


def batch_resolve(g: BipartiteGraph, st: MatchState,
                  released: set[tuple[int, int]]) -> MatchState:
    """Re-optimize after a set of edges was unbanned in ``g``.

    Small batches (at most n1/4 edges) are handled by sequential incremental
    repairs in sorted edge order (the eff table lags the graph until each
    edge's turn, which is sound: the state stays optimal for the
    partially-restored graph); larger batches trigger one fresh solve. The
    resulting weight is identical either way.
    """
    edges = sorted(released)
    if not edges:
        return st
    if len(edges) * 4 <= g.n1:
        for (u, v) in edges:
            if g.banned[u, v] or not g.has_edge(u, v):
                raise ValueError(f"batch_resolve: edge ({u}, {v}) is not available")
            _unban_repair(g, st, u, v)
        if _checks_enabled():
            check_invariants(g, st)
        return st
    return solve_full(g)


def check_invariants(g: BipartiteGraph, st: MatchState) -> None:
    """Full optimality-certificate scan; raises AssertionError on violation."""
    n1, n2 = g.n1, g.n2
    avail = g.available_mask()
    expected_eff = np.where(avail, g.weight, INF)
    assert (st.eff == expected_eff).all(), "eff table out of sync with graph"
    slack = st.eff - st.alpha[:, None] - st.beta[None, :]
    assert (slack[avail] >= 0).all(), "dual feasibility violated"
    assert (st.mate_u >= 0).all(), "matching not perfect on U"
    us = np.arange(n1)
    assert (st.mate_v[st.mate_u] == us).all(), "mate_u/mate_v inconsistent"
    matched_cols = np.zeros(n2, dtype=bool)
    matched_cols[st.mate_u] = True
    assert ((st.mate_v >= 0) == matched_cols).all(), "mate_v marks wrong columns"
    assert avail[us, st.mate_u].all(), "matched edge not available"
    assert (slack[us, st.mate_u] == 0).all(), "matched edge not tight"
    total = int(st.eff[us, st.mate_u].sum())
    assert total == st.total_weight, "total_weight stale"
    dual_value = int(st.alpha.sum()) + int(st.beta[matched_cols].sum())
    assert total == dual_value, "primal != dual objective"
