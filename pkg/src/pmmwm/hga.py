"""Hybrid genetic algorithm with an elite strategy for the partition stage.

Optimizes a PartitionAssignment for a fixed matching (a fixed weight per
U-vertex). Fitness is the vector of partition weights sorted descending,
compared lexicographically: entry 0 is the min-max objective and the deeper
entries break ties toward better balance, which lets the search escape
plateaus where only a lighter partition can improve. A strictly smaller
objective always means strictly smaller fitness, so the ordering is
consistent with the problem's objective.

Population flow per generation: the best ``elite_count`` individuals survive
verbatim; the rest are produced by binary-tournament selection, greedy
partition crossover, mutation and multilevel local search. Everything is
driven by one seeded ``random.Random``, so identical inputs give bit-identical
results.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .errors import CapacityInfeasible
from .graph import PartitionAssignment
from .numpart import WeightedItem, greedy_in_order, greedy_lpt, kk_multiway


@dataclass
class HgaParams:
    pop_size: int = 20
    max_generations: int = 200
    stall_limit: int = 20
    mutation_rate: float = 0.2
    elite_count: int = 1
    rng_seed: int = 0

    def validate(self) -> None:
        if self.pop_size < 2:
            raise ValueError("pop_size must be >= 2")
        if not (1 <= self.elite_count < self.pop_size):
            raise ValueError("need 1 <= elite_count < pop_size")
        if not (0.0 <= self.mutation_rate <= 1.0):
            raise ValueError("mutation_rate must be in [0, 1]")
        if self.max_generations < 0 or self.stall_limit < 1:
            raise ValueError("need max_generations >= 0 and stall_limit >= 1")


@dataclass(frozen=True)
class Individual:
    assignment: PartitionAssignment
    fitness: tuple[int, ...]


def fitness_of(part_of: list[int], weights: list[WeightedItem], m: int) -> tuple[int, ...]:
    sums = [0] * m
    for it in weights:
        sums[part_of[it.u]] += it.w
    sums.sort(reverse=True)
    return tuple(sums)


def make_individual(assignment: PartitionAssignment,
                    weights: list[WeightedItem]) -> Individual:
    return Individual(assignment, fitness_of(assignment.part_of, weights, assignment.m))


def _weight_array(weights: list[WeightedItem]) -> np.ndarray:
    w = np.zeros(len(weights), dtype=np.int64)
    for it in weights:
        w[it.u] = it.w
    return w


# ---------------------------------------------------------------------------
# Multilevel local search
#
# L2/L3 decide "does this move lower the full sorted fitness vector?" from
# just the two partitions it touches: with the rest of the multiset fixed,
# the lexicographic order of the full vectors equals the order of the sorted
# changed pairs (all other entries cancel out of the comparison). The old
# pair is (sums[h], sums[k]) with sums[h] the global max.

def _l1_relocate(part, w, sums, sizes, m, ubar, h) -> bool:
    """Best-improvement relocation of one item out of the heaviest partition."""
    h_items = np.flatnonzero(part == h)
    current = tuple(sorted(sums.tolist(), reverse=True))
    best_fit = None
    best_move = None
    base = sums.tolist()
    for x in h_items:
        wx = int(w[x])
        for k in range(m):
            if k == h or sizes[k] >= ubar:
                continue
            s = list(base)
            s[h] -= wx
            s[k] += wx
            fit = tuple(sorted(s, reverse=True))
            if fit < current and (best_fit is None or fit < best_fit):
                best_fit = fit
                best_move = (int(x), k)
    if best_move is None:
        return False
    x, k = best_move
    part[x] = k
    sums[h] -= w[x]
    sums[k] += w[x]
    sizes[h] -= 1
    sizes[k] += 1
    return True


def _l2_swap(part, w, sums, sizes, m, ubar, h) -> bool:
    """First-improvement swap between the heaviest partition and any other."""
    h_items = np.flatnonzero(part == h)
    s_h = int(sums[h])
    other = part != h
    sums_by_item = sums[part]
    for x in h_items:
        wx = int(w[x])
        delta = wx - w
        new_a = s_h - delta
        new_b = sums_by_item + delta
        hi = np.maximum(new_a, new_b)
        lo = np.minimum(new_a, new_b)
        improving = other & ((hi < s_h) | ((hi == s_h) & (lo < sums_by_item)))
        idx = np.flatnonzero(improving)
        if idx.size:
            y = int(idx[0])
            k = int(part[y])
            part[x] = k
            part[y] = h
            sums[h] += w[y] - w[x]
            sums[k] += w[x] - w[y]
            return True
    return False


def _l3_two_for_one(part, w, sums, sizes, m, ubar, h) -> bool:
    """First-improvement exchange of two heaviest-partition items for one."""
    h_items = np.flatnonzero(part == h)
    if h_items.size < 2:
        return False
    s_h = int(sums[h])
    other = part != h
    sums_by_item = sums[part]
    room = other & (sizes[part] < ubar)
    if not room.any():
        return False
    for i in range(len(h_items)):
        x1 = int(h_items[i])
        for j in range(i + 1, len(h_items)):
            x2 = int(h_items[j])
            wpair = int(w[x1]) + int(w[x2])
            delta = wpair - w
            new_a = s_h - delta
            new_b = sums_by_item + delta
            hi = np.maximum(new_a, new_b)
            lo = np.minimum(new_a, new_b)
            improving = room & ((hi < s_h) | ((hi == s_h) & (lo < sums_by_item)))
            idx = np.flatnonzero(improving)
            if idx.size:
                y = int(idx[0])
                k = int(part[y])
                part[x1] = k
                part[x2] = k
                part[y] = h
                moved = wpair - int(w[y])
                sums[h] -= moved
                sums[k] += moved
                sizes[h] -= 1
                sizes[k] += 1
                return True
    return False


_LEVEL_FUNCS = {1: _l1_relocate, 2: _l2_swap, 3: _l3_two_for_one}


def mls_improve(ind: Individual, weights: list[WeightedItem], ubar: int,
                levels: tuple[int, ...] = (1, 2, 3)) -> Individual:
    """Multilevel descent on the heaviest partition (ties: lowest index).

    Level 1 relocates one item (best improvement), level 2 swaps one item
    with another partition's (first improvement), level 3 trades two items
    for one (first improvement). A move counts as improving iff it
    lexicographically lowers the fitness vector; after every improvement the
    descent restarts at level 1 and it stops when the deepest level finds
    nothing. The result is a fixed point: applying mls_improve again returns
    an equal individual.

    ``levels`` restricts the neighborhoods (the comparison baseline uses
    ``(1,)`` for a relocation-only descent).
    """
    m = ind.assignment.m
    n = len(ind.assignment.part_of)
    if n == 0 or m == 1:
        return ind
    w = _weight_array(weights)
    part = np.array(ind.assignment.part_of, dtype=np.int64)
    sums = np.zeros(m, dtype=np.int64)
    sizes = np.zeros(m, dtype=np.int64)
    np.add.at(sums, part, w)
    np.add.at(sizes, part, 1)
    funcs = [_LEVEL_FUNCS[lv] for lv in levels]
    moved_any = False
    while True:
        h = int(np.argmax(sums))
        for func in funcs:
            if func(part, w, sums, sizes, m, ubar, h):
                moved_any = True
                break
        else:
            break
    if not moved_any:
        return ind
    part_list = [int(k) for k in part]
    return Individual(PartitionAssignment(m, ubar, part_list),
                      fitness_of(part_list, weights, m))


# ---------------------------------------------------------------------------
# Genetic operators

def gpx_crossover(a: Individual, b: Individual, weights: list[WeightedItem],
                  m: int, ubar: int, rng: random.Random) -> Individual:
    """Greedy partition crossover.

    The child is built in m rounds with alternating donors (``a`` first).
    Each round copies, from the donor's partitions restricted to
    still-unassigned items, the one whose restricted weight is closest to the
    ideal share (remaining total / remaining rounds, ties to the lowest
    index) into the next child partition. Leftover items are then placed
    heaviest-first into the lightest partition with spare capacity, so the
    child is always feasible. The construction itself is deterministic.
    """
    n = len(weights)
    w = _weight_array(weights)
    parent_parts = []
    for parent in (a, b):
        groups: list[list[int]] = [[] for _ in range(m)]
        for u, k in enumerate(parent.assignment.part_of):
            groups[k].append(u)
        parent_parts.append(groups)

    child = [-1] * n
    unassigned = [True] * n
    remaining_total = int(w.sum())
    for r in range(m):
        donor = parent_parts[r % 2]
        rounds_left = m - r
        best_k = 0
        best_key = None
        for k in range(m):
            wk = sum(int(w[u]) for u in donor[k] if unassigned[u])
            key = abs(wk * rounds_left - remaining_total)
            if best_key is None or key < best_key:
                best_key = key
                best_k = k
        for u in donor[best_k]:
            if unassigned[u]:
                child[u] = r
                unassigned[u] = False
                remaining_total -= int(w[u])

    sums = [0] * m
    sizes = [0] * m
    for u in range(n):
        if child[u] >= 0:
            sums[child[u]] += int(w[u])
            sizes[child[u]] += 1
    leftovers = sorted((u for u in range(n) if unassigned[u]),
                       key=lambda u: (-int(w[u]), u))
    for u in leftovers:
        best = -1
        for k in range(m):
            if sizes[k] < ubar and (best == -1 or sums[k] < sums[best]):
                best = k
        child[u] = best
        sums[best] += int(w[u])
        sizes[best] += 1
    return Individual(PartitionAssignment(m, ubar, child),
                      fitness_of(child, weights, m))


def mutate(ind: Individual, weights: list[WeightedItem], ubar: int,
           rate: float, rng: random.Random) -> Individual:
    """With probability ``rate`` relocate one uniformly random item to a
    uniformly random different partition with spare capacity (no legal
    target: unchanged). Always feasible."""
    if rate <= 0.0 or rng.random() >= rate:
        return ind
    m = ind.assignment.m
    part_of = ind.assignment.part_of
    u = rng.randrange(len(part_of))
    cur = part_of[u]
    sizes = ind.assignment.sizes()
    targets = [k for k in range(m) if k != cur and sizes[k] < ubar]
    if not targets:
        return ind
    k = targets[rng.randrange(len(targets))]
    new_part = list(part_of)
    new_part[u] = k
    return Individual(PartitionAssignment(m, ubar, new_part),
                      fitness_of(new_part, weights, m))


# ---------------------------------------------------------------------------
# Population management

def init_population(weights: list[WeightedItem], m: int, ubar: int,
                    params: HgaParams, rng: random.Random | None = None) -> list[Individual]:
    """LPT seed, KK seed, then greedy constructions on shuffled item orders,
    each improved by MLS. Random individuals whose fitness duplicates an
    earlier one are re-randomized up to 3 times."""
    if rng is None:
        rng = random.Random(params.rng_seed)
    if m * ubar < len(weights):
        raise CapacityInfeasible(
            f"m*ubar = {m * ubar} cannot hold {len(weights)} items")

    def random_greedy() -> PartitionAssignment:
        order = sorted(weights, key=lambda it: it.u)
        rng.shuffle(order)
        return greedy_in_order(order, m, ubar)

    population: list[Individual] = []
    seen: set[tuple[int, ...]] = set()
    seeds = [greedy_lpt(weights, m, ubar)]
    if params.pop_size >= 2:
        seeds.append(kk_multiway(weights, m, ubar))
    for assignment in seeds:
        ind = mls_improve(make_individual(assignment, weights), weights, ubar)
        population.append(ind)
        seen.add(ind.fitness)
    while len(population) < params.pop_size:
        ind = mls_improve(make_individual(random_greedy(), weights), weights, ubar)
        attempts = 0
        while ind.fitness in seen and attempts < 3:
            ind = mls_improve(make_individual(random_greedy(), weights), weights, ubar)
            attempts += 1
        population.append(ind)
        seen.add(ind.fitness)
    return population


def _tournament(population: list[Individual], rng: random.Random) -> Individual:
    a = population[rng.randrange(len(population))]
    b = population[rng.randrange(len(population))]
    return a if a.fitness <= b.fitness else b


def evolve(weights: list[WeightedItem], m: int, ubar: int, params: HgaParams,
           seed_assignment: PartitionAssignment | None = None,
           on_generation=None) -> Individual:
    """Run the generational loop and return the best individual ever seen.

    ``seed_assignment`` optionally replaces the last random initial
    individual (warm start between solver iterations). ``on_generation`` is
    called as ``on_generation(gen, population, incumbent)`` after each
    generation; the incumbent's fitness is non-increasing across generations
    because the elite survives verbatim.
    """
    params.validate()
    rng = random.Random(params.rng_seed)
    population = init_population(weights, m, ubar, params, rng)
    if seed_assignment is not None and params.pop_size > 2:
        injected = mls_improve(make_individual(seed_assignment.copy(), weights),
                               weights, ubar)
        population[-1] = injected
    best = min(population, key=lambda ind: ind.fitness)
    stall = 0
    for gen in range(params.max_generations):
        if stall >= params.stall_limit:
            break
        population.sort(key=lambda ind: ind.fitness)
        next_pop = population[:params.elite_count]
        while len(next_pop) < params.pop_size:
            p1 = _tournament(population, rng)
            p2 = _tournament(population, rng)
            child = gpx_crossover(p1, p2, weights, m, ubar, rng)
            child = mutate(child, weights, ubar, params.mutation_rate, rng)
            child = mls_improve(child, weights, ubar)
            next_pop.append(child)
        population = next_pop
        gen_best = min(population, key=lambda ind: ind.fitness)
        if gen_best.fitness < best.fitness:
            best = gen_best
            stall = 0
        else:
            stall += 1
        if on_generation is not None:
            on_generation(gen, population, best)
    return best
