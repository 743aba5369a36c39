"""Verification oracle, comparison baseline, and batch benchmarking.

``exact_oracle`` solves tiny instances to proven optimality by enumerating
matchings jointly with capacity-feasible partitions; it anchors the
acceptance tests. ``baseline_ls`` is the deliberately simpler comparison
solver: the same outer banning loop, but with a full matching re-solve every
iteration, greedy construction only, and relocation-only local search.
``bench`` runs a directory of instances and emits one CSV row per run;
``compare`` joins two such CSVs into a win/tie/loss table.
"""

from __future__ import annotations

import csv
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import InfeasibleInstance, TooLarge
from .graph import (
    BipartiteGraph,
    PartitionAssignment,
    Solution,
    load_instance,
)
from .hga import make_individual, mls_improve
from .matching import solve_full
from .numpart import BRUTE_FORCE_GUARD, WeightedItem, bounded_min_max, greedy_lpt
from .orchestrator import (
    BanList,
    FimpParams,
    IterationRecord,
    RunResult,
    RunStats,
    solve,
)

ORACLE_MAX_N1 = 8

REPORT_COLUMNS = ["instance", "algo", "seed", "objective", "optimum", "gap",
                  "iterations", "wall_time_ms", "match_time_ms", "hga_time_ms"]


def exact_oracle(g: BipartiteGraph, m: int, ubar: int) -> tuple[int, Solution]:
    """Global optimum over all matchings x capacity-feasible partitions.

    Depth-first over injective U -> V maps on available edges (row-major,
    columns ascending); each complete matching's weight vector goes through
    the exact bounded partition search. Admissible pruning only: a partial
    matching is cut when its heaviest edge or ceil(total/m) already reaches
    the incumbent. Guarded to n1 <= 8 and m**n1 <= 10**7.
    """
    if g.n1 > ORACLE_MAX_N1 or m ** g.n1 > BRUTE_FORCE_GUARD:
        raise TooLarge(f"oracle guard: n1={g.n1}, m={m}")
    if m * ubar < g.n1:
        raise InfeasibleInstance(f"m*ubar = {m * ubar} < n1 = {g.n1}")

    n1 = g.n1
    avail = g.available_mask()
    columns = [[int(v) for v in avail[u].nonzero()[0]] for u in range(n1)]
    best_obj: int | None = None
    best_mate: list[int] | None = None
    best_labels: list[int] | None = None
    mate = [-1] * n1
    used = [False] * g.n2
    ws = [0] * n1

    def dfs(u: int, total: int, heaviest: int) -> None:
        nonlocal best_obj, best_mate, best_labels
        if best_obj is not None:
            if heaviest >= best_obj or -(-total // m) >= best_obj:
                return
        if u == n1:
            found = bounded_min_max(ws, m, ubar, upper_bound=best_obj)
            if found is not None:
                best_obj, best_labels = found
                best_mate = list(mate)
            return
        for v in columns[u]:
            if used[v]:
                continue
            w = int(g.weight[u, v])
            used[v] = True
            mate[u] = v
            ws[u] = w
            dfs(u + 1, total + w, max(heaviest, w))
            used[v] = False
        mate[u] = -1

    dfs(0, 0, 0)
    if best_obj is None:
        raise InfeasibleInstance("no perfect matching on available edges")
    sol = Solution(mate=best_mate,
                   partition=PartitionAssignment(m, ubar, best_labels),
                   objective=best_obj)
    return best_obj, sol


def baseline_ls(g: BipartiteGraph, m: int, ubar: int,
                params: FimpParams) -> RunResult:
    """Comparison anchor: full matching re-solve every iteration, greedy
    construction, relocation-only local search, banning without recovery.

    Bans that would destroy feasibility are vetoed using a plain
    perfect-matching check (not charged to match time; only the per-iteration
    full solves are).
    """
    params.validate()
    if m * ubar < g.n1:
        raise InfeasibleInstance(f"m*ubar = {m * ubar} < n1 = {g.n1}")
    rng = random.Random(params.rng_seed)
    t_start = time.perf_counter()
    match_time = 0.0
    part_time = 0.0
    trace: list[IterationRecord] = []
    bans = BanList()
    vetoed: dict[tuple[int, int], int] = {}
    incumbent: Solution | None = None
    iterations = 0

    for it in range(params.max_iterations):
        elapsed_ms = (time.perf_counter() - t_start) * 1000.0
        if params.time_limit_ms is not None and it > 0 and elapsed_ms >= params.time_limit_ms:
            break
        iterations = it + 1

        t0 = time.perf_counter()
        st = solve_full(g)
        solve_ms = time.perf_counter() - t0
        match_time += solve_ms

        if m == 1:
            incumbent = Solution(mate=[int(v) for v in st.mate_u],
                                 partition=PartitionAssignment(1, ubar, [0] * g.n1),
                                 objective=st.total_weight)
            trace.append(IterationRecord(it, incumbent.objective,
                                         incumbent.objective, 0,
                                         solve_ms * 1000.0, 0.0))
            break

        items = [WeightedItem(u, int(g.weight[u, st.mate_u[u]]))
                 for u in range(g.n1)]
        t0 = time.perf_counter()
        ind = mls_improve(make_individual(greedy_lpt(items, m, ubar), items),
                          items, ubar, levels=(1,))
        part_iter = time.perf_counter() - t0
        part_time += part_iter

        current = Solution(mate=[int(v) for v in st.mate_u],
                           partition=ind.assignment.copy(),
                           objective=ind.fitness[0])
        if incumbent is None or current.objective < incumbent.objective:
            incumbent = Solution(mate=list(current.mate),
                                 partition=current.partition.copy(),
                                 objective=current.objective)

        expired = bans.age()
        for (u, v) in expired:
            g.unban_edge(u, v)
        expired_veto = []
        for edge in sorted(vetoed):
            vetoed[edge] -= 1
            if vetoed[edge] <= 0:
                expired_veto.append(edge)
        for edge in expired_veto:
            del vetoed[edge]

        sums = [0] * m
        for u in range(g.n1):
            sums[current.partition.part_of[u]] += int(g.weight[u, current.mate[u]])
        heaviest = sums.index(max(sums))
        candidates = sorted(
            (u for u in range(g.n1) if current.partition.part_of[u] == heaviest),
            key=lambda u: (-int(g.weight[u, current.mate[u]]), u))
        for u in candidates:
            v = current.mate[u]
            if (u, v) in vetoed or (u, v) in bans.entries:
                continue
            g.ban_edge(u, v)
            if g.has_perfect_matching():
                bans.entries[(u, v)] = params.tenure
                break
            g.unban_edge(u, v)
            vetoed[(u, v)] = params.tenure
        trace.append(IterationRecord(it, current.objective, incumbent.objective,
                                     len(bans), solve_ms * 1000.0,
                                     part_iter * 1000.0))

    for (u, v) in sorted(bans.entries):
        g.unban_edge(u, v)
    bans.entries.clear()
    wall = (time.perf_counter() - t_start) * 1000.0
    stats = RunStats(params.rng_seed, iterations, wall, match_time * 1000.0,
                     part_time * 1000.0, trace)
    return RunResult(incumbent, stats)


# ---------------------------------------------------------------------------
# Batch benchmarking

@dataclass
class RunReport:
    instance: str
    algo: str
    seed: int
    objective: float
    optimum: float | None
    gap: float | None
    iterations: int
    wall_time_ms: float
    match_time_ms: float
    hga_time_ms: float


def run_algorithm(g: BipartiteGraph, algo: str, params: FimpParams) -> RunResult:
    if algo == "fimp-hga":
        return solve(g, g.m, g.ubar, params)
    if algo == "baseline":
        return baseline_ls(g, g.m, g.ubar, params)
    raise ValueError(f"unknown algorithm {algo!r}")


def _try_oracle(g: BipartiteGraph):
    try:
        opt, _ = exact_oracle(g, g.m, g.ubar)
        return opt
    except TooLarge:
        return None


def report_for(path: str, instance_id: str, algo: str,
               params: FimpParams, with_oracle: bool = True) -> RunReport:
    g = load_instance(path)
    result = run_algorithm(g, algo, params)
    objective = g.display_value(result.solution.objective)
    optimum_scaled = _try_oracle(g) if with_oracle else None
    optimum = g.display_value(optimum_scaled) if optimum_scaled is not None else None
    gap = None
    if optimum_scaled is not None:
        if optimum_scaled > 0:
            gap = (result.solution.objective - optimum_scaled) / optimum_scaled
        elif result.solution.objective == 0:
            gap = 0.0
    return RunReport(
        instance=instance_id, algo=algo, seed=params.rng_seed,
        objective=objective, optimum=optimum, gap=gap,
        iterations=result.stats.iterations,
        wall_time_ms=result.stats.wall_time_ms,
        match_time_ms=result.stats.match_time_ms,
        hga_time_ms=result.stats.hga_time_ms,
    )


def _bench_worker(job) -> RunReport:
    path, instance_id, algo, params, with_oracle = job
    return report_for(path, instance_id, algo, params, with_oracle)


def bench(jobs_spec: list[tuple[str, str]], algo: str, params: FimpParams,
          jobs: int = 1, with_oracle: bool = True) -> list[RunReport]:
    """Run ``algo`` on (path, instance_id) pairs; reports sorted by id."""
    work = [(path, instance_id, algo, params, with_oracle)
            for path, instance_id in jobs_spec]
    if jobs <= 1:
        reports = [_bench_worker(job) for job in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_bench_worker, work))
    reports.sort(key=lambda r: (r.instance, r.algo, r.seed))
    return reports


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_reports(path: str, reports: list[RunReport]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for r in reports:
            writer.writerow([_format_cell(getattr(r, col)) for col in REPORT_COLUMNS])


def read_reports(path: str) -> list[RunReport]:
    def opt_float(text: str):
        return float(text) if text else None

    reports = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            reports.append(RunReport(
                instance=row["instance"], algo=row["algo"],
                seed=int(row["seed"]), objective=float(row["objective"]),
                optimum=opt_float(row["optimum"]), gap=opt_float(row["gap"]),
                iterations=int(row["iterations"]),
                wall_time_ms=float(row["wall_time_ms"]),
                match_time_ms=float(row["match_time_ms"]),
                hga_time_ms=float(row["hga_time_ms"]),
            ))
    return reports


COMPARE_COLUMNS = ["instance", "objective_a", "objective_b", "result",
                   "wall_time_ms_a", "wall_time_ms_b", "time_ratio"]


def compare_reports(a: list[RunReport], b: list[RunReport]):
    """Per-instance win/tie/loss of A versus B plus time ratios.

    Returns (rows, summary); instances must coincide. A "win" means A's
    objective is strictly lower.
    """
    by_a = {r.instance: r for r in a}
    by_b = {r.instance: r for r in b}
    if set(by_a) != set(by_b):
        raise ValueError("compare: instance sets differ")
    rows = []
    wins = ties = losses = 0
    ratios = []
    for instance in sorted(by_a):
        ra, rb = by_a[instance], by_b[instance]
        if ra.objective < rb.objective:
            result = "win"
            wins += 1
        elif ra.objective == rb.objective:
            result = "tie"
            ties += 1
        else:
            result = "loss"
            losses += 1
        if ra.wall_time_ms == rb.wall_time_ms:
            ratio = 1.0
        elif rb.wall_time_ms > 0:
            ratio = ra.wall_time_ms / rb.wall_time_ms
        else:
            ratio = float("inf")
        ratios.append(ratio)
        rows.append({
            "instance": instance, "objective_a": ra.objective,
            "objective_b": rb.objective, "result": result,
            "wall_time_ms_a": ra.wall_time_ms,
            "wall_time_ms_b": rb.wall_time_ms, "time_ratio": ratio,
        })
    summary = {
        "wins": wins, "ties": ties, "losses": losses,
        "mean_time_ratio": sum(ratios) / len(ratios) if ratios else 1.0,
    }
    return rows, summary


def write_compare(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=COMPARE_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _format_cell(v) for k, v in row.items()})
