"""Iterative match-partition solver with edge banning and recovery.

Each iteration holds the matching fixed while the genetic algorithm
re-partitions the matched weights, then perturbs the graph: the heaviest
matched edge inside the heaviest partition is banned for ``tenure``
iterations, forcing later matchings (repaired incrementally, never re-solved
from scratch) to route around it. If the current objective drifts more than
``recovery_threshold`` above the incumbent, all bans are released at once
with probability ``recovery_prob``, pulling the search back toward the best
known region. The incumbent is a deep snapshot of the best (matching,
partition) pair ever seen and its objective is non-increasing over the run.

With m == 1 the problem collapses to plain min-weight perfect matching:
banning could only worsen the optimum, so the loop exits after iteration 0.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .errors import InfeasibleInstance, NoPerfectMatching
from .graph import BipartiteGraph, PartitionAssignment, Solution
from .hga import HgaParams, evolve
from .matching import MatchState, batch_resolve, repair_after_ban, solve_full
from .numpart import WeightedItem


@dataclass
class FimpParams:
    max_iterations: int = 500
    time_limit_ms: int | None = None
    tenure: int = 20
    recovery_threshold: float = 0.05
    recovery_prob: float = 0.5
    hga: HgaParams = field(default_factory=HgaParams)
    rng_seed: int = 0

    def validate(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.tenure < 1:
            raise ValueError("tenure must be >= 1")
        if not (0.0 <= self.recovery_prob <= 1.0):
            raise ValueError("recovery_prob must be in [0, 1]")
        if self.recovery_threshold < 0.0:
            raise ValueError("recovery_threshold must be >= 0")


class BanList:
    """Banned edges with remaining tenure; mirrors the graph's ban flags."""

    def __init__(self):
        self.entries: dict[tuple[int, int], int] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def age(self) -> list[tuple[int, int]]:
        """Decrement every tenure and drop/return the expired edges."""
        expired = []
        for edge in sorted(self.entries):
            self.entries[edge] -= 1
            if self.entries[edge] <= 0:
                expired.append(edge)
        for edge in expired:
            del self.entries[edge]
        return expired


@dataclass
class IterationRecord:
    iteration: int
    objective: int
    incumbent: int
    bans_active: int
    match_ms: float
    hga_ms: float


@dataclass
class RunStats:
    seed: int
    iterations: int
    wall_time_ms: float
    match_time_ms: float
    hga_time_ms: float
    trace: list[IterationRecord]


@dataclass
class RunResult:
    solution: Solution
    stats: RunStats


def _matched_items(g: BipartiteGraph, st: MatchState) -> list[WeightedItem]:
    return [WeightedItem(u, int(g.weight[u, st.mate_u[u]])) for u in range(g.n1)]


def modify_graph(g: BipartiteGraph, st: MatchState, sol: Solution,
                 incumbent_objective: int, bans: BanList,
                 vetoed: dict[tuple[int, int], int], params: FimpParams,
                 rng: random.Random) -> MatchState:
    """One graph-modification step; returns the (possibly new) match state.

    In order: (i) age tenures and restore expired edges, (ii) if the current
    objective sits ``recovery_threshold`` above the incumbent, release every
    ban with probability ``recovery_prob``, (iii) otherwise ban the heaviest
    matched edge of the heaviest partition (ties: lowest U-index). A ban that
    would destroy feasibility is vetoed: the edge is restored, marked
    unbannable for ``tenure`` iterations, and the next-heaviest candidate is
    tried instead (none left: no ban this iteration).
    """
    expired = bans.age()
    for (u, v) in expired:
        g.unban_edge(u, v)
    st = batch_resolve(g, st, set(expired))
    expired_veto = []
    for edge in sorted(vetoed):
        vetoed[edge] -= 1
        if vetoed[edge] <= 0:
            expired_veto.append(edge)
    for edge in expired_veto:
        del vetoed[edge]

    current = sol.objective
    if incumbent_objective > 0:
        gap = (current - incumbent_objective) / incumbent_objective
    else:
        gap = float("inf") if current > 0 else 0.0
    if gap >= params.recovery_threshold and bans.entries:
        if rng.random() < params.recovery_prob:
            release = sorted(bans.entries)
            for (u, v) in release:
                g.unban_edge(u, v)
            bans.entries.clear()
            return batch_resolve(g, st, set(release))

    sums = [0] * sol.partition.m
    for u in range(g.n1):
        sums[sol.partition.part_of[u]] += int(g.weight[u, sol.mate[u]])
    heaviest = sums.index(max(sums))
    candidates = sorted(
        (u for u in range(g.n1) if sol.partition.part_of[u] == heaviest),
        key=lambda u: (-int(g.weight[u, sol.mate[u]]), u))
    for u in candidates:
        v = sol.mate[u]
        if (u, v) in vetoed or (u, v) in bans.entries:
            continue
        g.ban_edge(u, v)
        try:
            st = repair_after_ban(g, st, u, v)
        except NoPerfectMatching:
            g.unban_edge(u, v)
            vetoed[(u, v)] = params.tenure
            continue
        bans.entries[(u, v)] = params.tenure
        break
    return st


def solve(g: BipartiteGraph, m: int, ubar: int, params: FimpParams) -> RunResult:
    """Run the full iterative solver and return the incumbent plus statistics.

    The graph's ban flags are scratch state for the run: they are cleared
    before returning, so the reported solution validates against the pristine
    instance.
    """
    params.validate()
    if m * ubar < g.n1:
        raise InfeasibleInstance(f"m*ubar = {m * ubar} < n1 = {g.n1}")
    rng = random.Random(params.rng_seed)
    t_start = time.perf_counter()
    match_time = 0.0
    hga_time = 0.0
    trace: list[IterationRecord] = []

    t0 = time.perf_counter()
    st = solve_full(g)
    match_time += time.perf_counter() - t0

    if m == 1:
        sol = Solution(mate=[int(v) for v in st.mate_u],
                       partition=PartitionAssignment(1, ubar, [0] * g.n1),
                       objective=st.total_weight)
        wall = (time.perf_counter() - t_start) * 1000.0
        trace.append(IterationRecord(0, sol.objective, sol.objective, 0,
                                     match_time * 1000.0, 0.0))
        return RunResult(sol, RunStats(params.rng_seed, 1, wall,
                                       match_time * 1000.0, 0.0, trace))

    bans = BanList()
    vetoed: dict[tuple[int, int], int] = {}
    incumbent: Solution | None = None
    prev_mate: list[int] | None = None
    prev_part: PartitionAssignment | None = None
    iterations = 0
    pending_match = match_time  # iteration 0 charges the initial full solve

    for it in range(params.max_iterations):
        elapsed_ms = (time.perf_counter() - t_start) * 1000.0
        if params.time_limit_ms is not None and it > 0 and elapsed_ms >= params.time_limit_ms:
            break
        iterations = it + 1

        warm = None
        mate_now = [int(v) for v in st.mate_u]
        if prev_mate is not None and prev_part is not None:
            changed = sum(1 for a, b in zip(prev_mate, mate_now) if a != b)
            if changed <= 2:
                warm = prev_part

        items = _matched_items(g, st)
        hga_params = HgaParams(
            pop_size=params.hga.pop_size,
            max_generations=params.hga.max_generations,
            stall_limit=params.hga.stall_limit,
            mutation_rate=params.hga.mutation_rate,
            elite_count=params.hga.elite_count,
            rng_seed=rng.getrandbits(63),
        )
        t0 = time.perf_counter()
        best_ind = evolve(items, m, ubar, hga_params, seed_assignment=warm)
        hga_iter = time.perf_counter() - t0
        hga_time += hga_iter

        current = Solution(mate=mate_now,
                           partition=best_ind.assignment.copy(),
                           objective=best_ind.fitness[0])
        if incumbent is None or current.objective < incumbent.objective:
            incumbent = Solution(mate=list(current.mate),
                                 partition=current.partition.copy(),
                                 objective=current.objective)
        prev_mate = mate_now
        prev_part = best_ind.assignment

        t0 = time.perf_counter()
        st = modify_graph(g, st, current, incumbent.objective, bans, vetoed,
                          params, rng)
        repair_iter = time.perf_counter() - t0
        match_time += repair_iter
        trace.append(IterationRecord(it, current.objective, incumbent.objective,
                                     len(bans),
                                     (pending_match + repair_iter) * 1000.0,
                                     hga_iter * 1000.0))
        pending_match = 0.0

    for (u, v) in sorted(bans.entries):
        g.unban_edge(u, v)
    bans.entries.clear()

    wall = (time.perf_counter() - t_start) * 1000.0
    stats = RunStats(params.rng_seed, iterations, wall, match_time * 1000.0,
                     hga_time * 1000.0, trace)
    return RunResult(incumbent, stats)
