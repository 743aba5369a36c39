"""Problem instance representation, feasibility checks and objective evaluation.

A problem instance is a weighted bipartite graph G(U, V, E) with |U| = n1,
|V| = n2, n1 <= n2, together with a partition count ``m`` and a per-partition
capacity ``ubar``. Weights are stored in a dense n1 x n2 integer table; absent
edges are marked with the ``ABSENT`` sentinel. Weights given as decimals in
instance files (at most 6 fractional digits) are scaled to integers at load so
that all downstream arithmetic is exact; ``weight_scale`` records the factor.

An edge is *available* iff it is present and not banned. Ban flags are the
only mutable part of a graph after load; they are driven by the solver's
graph-modification step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InfeasibleInstance, ParseError

ABSENT = -1

# Matcher potentials can grow to ~n1 * max_weight; both guards keep all
# reduced-cost arithmetic far below the matcher's 2**61 infinity sentinel.
MAX_WEIGHT = 1 << 52
MAX_TOTAL_WEIGHT = 1 << 55


class BipartiteGraph:
    """Dense weighted bipartite graph with ban flags.

    Attributes:
        n1, n2: vertex counts (n1 <= n2).
        m, ubar: partition count and capacity, as declared by the instance.
        weight: (n1, n2) int64 array; ABSENT (-1) marks missing edges.
        banned: (n1, n2) bool array, all False initially.
        weight_scale: 10**d where d is the max fractional digits seen at load.
    """

    def __init__(self, n1: int, n2: int, m: int, ubar: int,
                 weight: np.ndarray, weight_scale: int = 1):
        if n1 < 1 or n2 < n1:
            raise ParseError(f"need 1 <= n1 <= n2, got n1={n1} n2={n2}")
        if m < 1 or ubar < 1:
            raise ParseError(f"need m >= 1 and ubar >= 1, got m={m} ubar={ubar}")
        if weight.shape != (n1, n2):
            raise ParseError(f"weight table shape {weight.shape} != ({n1}, {n2})")
        self.n1 = n1
        self.n2 = n2
        self.m = m
        self.ubar = ubar
        self.weight = weight.astype(np.int64)
        self.banned = np.zeros((n1, n2), dtype=bool)
        self.weight_scale = weight_scale
        present = self.weight != ABSENT
        if (self.weight[present] < 0).any():
            raise ParseError("negative edge weight")
        if present.any():
            max_w = int(self.weight[present].max())
            if max_w > MAX_WEIGHT or n1 * max_w > MAX_TOTAL_WEIGHT:
                raise ParseError(
                    f"scaled weights too large: max {max_w} with n1={n1}")

    @classmethod
    def from_edges(cls, n1: int, n2: int, m: int, ubar: int,
                   edges: list[tuple[int, int, int]],
                   weight_scale: int = 1) -> "BipartiteGraph":
        """Build a graph from (u, v, w) triples; unlisted pairs are absent."""
        weight = np.full((n1, n2), ABSENT, dtype=np.int64)
        for u, v, w in edges:
            if not (0 <= u < n1 and 0 <= v < n2):
                raise ParseError(f"edge ({u}, {v}) out of range")
            if w < 0:
                raise ParseError(f"edge ({u}, {v}) has negative weight {w}")
            if weight[u, v] != ABSENT:
                raise ParseError(f"duplicate edge ({u}, {v})")
            weight[u, v] = w
        return cls(n1, n2, m, ubar, weight, weight_scale)

    def has_edge(self, u: int, v: int) -> bool:
        return self.weight[u, v] != ABSENT

    def is_available(self, u: int, v: int) -> bool:
        return self.weight[u, v] != ABSENT and not self.banned[u, v]

    def available_mask(self) -> np.ndarray:
        return (self.weight != ABSENT) & ~self.banned

    def ban_edge(self, u: int, v: int) -> None:
        if self.weight[u, v] == ABSENT:
            raise ValueError(f"cannot ban absent edge ({u}, {v})")
        self.banned[u, v] = True

    def unban_edge(self, u: int, v: int) -> None:
        self.banned[u, v] = False

    def edge_count(self) -> int:
        return int((self.weight != ABSENT).sum())

    def copy(self) -> "BipartiteGraph":
        g = BipartiteGraph(self.n1, self.n2, self.m, self.ubar,
                           self.weight.copy(), self.weight_scale)
        g.banned = self.banned.copy()
        return g

    def display_value(self, scaled: int):
        """Convert an internal scaled weight back to file units."""
        if self.weight_scale == 1:
            return int(scaled)
        return scaled / self.weight_scale

    def has_perfect_matching(self) -> bool:
        """True iff the available subgraph admits a matching covering U.

        Kuhn's augmenting-path algorithm (iterative, with a greedy warm
        start); exact and fast enough for load-time validation of
        benchmark-sized instances.
        """
        avail = self.available_mask()
        adj = [np.flatnonzero(avail[u]).tolist() for u in range(self.n1)]
        mate_v = [-1] * self.n2
        mate_u = [-1] * self.n1
        for u in range(self.n1):
            for v in adj[u]:
                if mate_v[v] == -1:
                    mate_v[v] = u
                    mate_u[u] = v
                    break

        def try_augment(u0: int) -> bool:
            seen = bytearray(self.n2)
            from_v = [-1] * self.n2
            stack = [(u0, 0)]
            while stack:
                u, i = stack[-1]
                if i >= len(adj[u]):
                    stack.pop()
                    continue
                stack[-1] = (u, i + 1)
                v = adj[u][i]
                if seen[v]:
                    continue
                seen[v] = 1
                from_v[v] = u
                if mate_v[v] == -1:
                    while v != -1:
                        w = from_v[v]
                        old = mate_u[w]
                        mate_u[w] = v
                        mate_v[v] = w
                        v = old
                    return True
                stack.append((mate_v[v], 0))
            return False

        for u in range(self.n1):
            if mate_u[u] == -1 and not try_augment(u):
                return False
        return True


@dataclass
class PartitionAssignment:
    """Mapping of U-vertices to partitions {0..m-1} under capacity ubar."""

    m: int
    ubar: int
    part_of: list[int]

    def sizes(self) -> list[int]:
        counts = [0] * self.m
        for k in self.part_of:
            counts[k] += 1
        return counts

    def copy(self) -> "PartitionAssignment":
        return PartitionAssignment(self.m, self.ubar, list(self.part_of))


@dataclass
class Solution:
    """A matching plus a partition; ``objective`` is the max partition weight."""

    mate: list[int]
    partition: PartitionAssignment
    objective: Optional[int] = None


@dataclass
class Violation:
    """First violated constraint of a candidate solution.

    ``constraint`` is the constraint number (1: each u matched on an
    available edge, 2: each v used at most once, 3: each u in exactly one
    partition, 4: partition size <= ubar); ``subject`` is the offending
    vertex or partition index (0-based).
    """

    constraint: int
    subject: int
    message: str


def partition_weights(g: BipartiteGraph, sol: Solution) -> list[int]:
    """Per-partition matched weight, indexed by partition (scaled units)."""
    sums = [0] * sol.partition.m
    for u in range(g.n1):
        sums[sol.partition.part_of[u]] += int(g.weight[u, sol.mate[u]])
    return sums


def evaluate_objective(g: BipartiteGraph, sol: Solution) -> int:
    """Max partition weight; also written into ``sol.objective``."""
    sol.objective = max(partition_weights(g, sol))
    return sol.objective


def validate_solution(g: BipartiteGraph, sol: Solution) -> Optional[Violation]:
    """Return None if the solution is feasible, else the first violation."""
    mate, pa = sol.mate, sol.partition
    if len(mate) != g.n1:
        return Violation(1, -1, f"mate has length {len(mate)}, expected {g.n1}")
    for u in range(g.n1):
        v = mate[u]
        if not (0 <= v < g.n2) or not g.is_available(u, v):
            return Violation(1, u, f"vertex {u} not matched on an available edge")
    used: dict[int, int] = {}
    for u in range(g.n1):
        v = mate[u]
        if v in used:
            return Violation(2, v, f"vertex {v} matched to both {used[v]} and {u}")
        used[v] = u
    if len(pa.part_of) != g.n1:
        return Violation(3, -1, f"part_of has length {len(pa.part_of)}, expected {g.n1}")
    for u in range(g.n1):
        if not (0 <= pa.part_of[u] < pa.m):
            return Violation(3, u, f"vertex {u} has partition {pa.part_of[u]}")
    for k, size in enumerate(pa.sizes()):
        if size > pa.ubar:
            return Violation(4, k, f"partition {k} holds {size} > ubar={pa.ubar}")
    return None


def _parse_weight_token(token: str, lineno: int) -> tuple[int, int]:
    """Parse a weight as (value scaled by 10**digits, digits)."""
    text = token
    if "." in text:
        int_part, _, frac = text.partition(".")
        frac = frac.rstrip("0")
        if len(frac) > 6:
            raise ParseError(f"line {lineno}: more than 6 fractional digits in {token!r}")
        digits = len(frac)
        try:
            value = int(int_part or "0") * 10 ** digits + int(frac or "0")
        except ValueError:
            raise ParseError(f"line {lineno}: bad weight {token!r}") from None
    else:
        digits = 0
        try:
            value = int(text)
        except ValueError:
            raise ParseError(f"line {lineno}: bad weight {token!r}") from None
    if value < 0 or text.startswith("-"):
        raise ParseError(f"line {lineno}: negative weight {token!r}")
    return value, digits


def load_instance(path: str, check_feasible: bool = True) -> BipartiteGraph:
    """Load an instance file and verify perfect-matching feasibility.

    Format (text, UTF-8, '#' starts a comment line):
        line 1: ``n1 n2 m ubar``
        then one edge per line: ``u v w`` (0-based, w >= 0, decimals allowed).
    Unlisted pairs are absent.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw_lines = fh.readlines()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc

    rows: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(raw_lines, start=1):
        text = line.split("#", 1)[0].strip()
        if text:
            rows.append((lineno, text.split()))

    if not rows:
        raise ParseError(f"{path}: empty instance file")
    lineno, header = rows[0]
    if len(header) != 4:
        raise ParseError(f"line {lineno}: header must be 'n1 n2 m ubar'")
    try:
        n1, n2, m, ubar = (int(tok) for tok in header)
    except ValueError:
        raise ParseError(f"line {lineno}: header must be integers") from None
    if n1 < 1 or n2 < n1:
        raise ParseError(f"line {lineno}: need 1 <= n1 <= n2")
    if m < 1 or ubar < 1:
        raise ParseError(f"line {lineno}: need m >= 1 and ubar >= 1")

    edges: list[tuple[int, int, int, int]] = []
    max_digits = 0
    for lineno, toks in rows[1:]:
        if len(toks) != 3:
            raise ParseError(f"line {lineno}: edge line must be 'u v w'")
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError:
            raise ParseError(f"line {lineno}: bad vertex index") from None
        if not (0 <= u < n1 and 0 <= v < n2):
            raise ParseError(f"line {lineno}: edge ({u}, {v}) out of range")
        value, digits = _parse_weight_token(toks[2], lineno)
        max_digits = max(max_digits, digits)
        edges.append((u, v, value, digits))

    scale = 10 ** max_digits
    weight = np.full((n1, n2), ABSENT, dtype=np.int64)
    for u, v, value, digits in edges:
        if weight[u, v] != ABSENT:
            raise ParseError(f"{path}: duplicate edge ({u}, {v})")
        weight[u, v] = value * 10 ** (max_digits - digits)

    g = BipartiteGraph(n1, n2, m, ubar, weight, weight_scale=scale)
    if m * ubar < n1:
        raise InfeasibleInstance(f"{path}: m*ubar = {m * ubar} < n1 = {n1}")
    if check_feasible and not g.has_perfect_matching():
        raise InfeasibleInstance(f"{path}: no perfect matching on U")
    return g


def save_instance(g: BipartiteGraph, path: str,
                  header_comments: list[str] | None = None) -> None:
    """Write a graph in the instance file format (deterministic row-major order)."""
    lines = []
    for comment in header_comments or []:
        lines.append(f"# {comment}")
    lines.append(f"{g.n1} {g.n2} {g.m} {g.ubar}")
    digits = len(str(g.weight_scale)) - 1
    for u in range(g.n1):
        row = g.weight[u]
        for v in np.flatnonzero(row != ABSENT):
            w = int(row[v])
            if g.weight_scale == 1:
                tok = str(w)
            else:
                frac = w % g.weight_scale
                tok = f"{w // g.weight_scale}.{frac:0{digits}d}".rstrip("0").rstrip(".")
            lines.append(f"{u} {int(v)} {tok}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def solution_to_dict(g: BipartiteGraph, sol: Solution, seed: int,
                     iterations: int, wall_time_ms: int) -> dict:
    """Solution-file payload; weights reported in original (descaled) units."""
    weights = partition_weights(g, sol)
    return {
        "objective": g.display_value(max(weights)),
        "mate": list(int(v) for v in sol.mate),
        "part_of": list(int(k) for k in sol.partition.part_of),
        "partition_weights": [g.display_value(w) for w in weights],
        "seed": seed,
        "iterations": iterations,
        "wall_time_ms": wall_time_ms,
    }


def save_solution(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_solution(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read solution {path}: {exc}") from exc
