"""Bi-objective NSGA-II tuning of the colony weights (alpha, beta, rho).

Objectives, both minimised: ``-W`` (negated mean feasibility rate over R
independent runs) and ``sigma`` (sample standard deviation of the R best
costs).  Candidates with fewer than two feasible runs get ``sigma = inf``.
"""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, field
from typing import Sequence

from .aco import AcoParams, run_aco
from .domain import Instance

Bounds = tuple[float, float]


@dataclass(frozen=True)
class TunerConfig:
    population: int = 20
    generations: int = 10
    eval_runs: int = 5
    eval_iterations: int = 30
    eval_ants: int = 20
    alpha_bounds: Bounds = (0.5, 5.0)
    beta_bounds: Bounds = (0.5, 5.0)
    rho_bounds: Bounds = (0.05, 0.95)
    eta_crossover: float = 15.0
    eta_mutation: float = 20.0
    mutation_prob: float = 1.0 / 3.0
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("alpha_bounds", "beta_bounds", "rho_bounds"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ValueError(f"{name}: lower bound exceeds upper bound")
        lo, hi = self.rho_bounds
        if not (0.0 < lo and hi < 1.0):
            raise ValueError("rho bounds must lie inside (0, 1)")
        if self.alpha_bounds[0] < 0 or self.beta_bounds[0] < 0:
            raise ValueError("alpha and beta bounds must be non-negative")
        if self.population < 4 or self.population % 2:
            raise ValueError("population must be even and >= 4")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if self.eval_runs < 2:
            raise ValueError("eval_runs must be >= 2")
        if self.eval_iterations < 1 or self.eval_ants < 1:
            raise ValueError("eval_iterations and eval_ants must be >= 1")

    @property
    def bounds(self) -> tuple[Bounds, Bounds, Bounds]:
        return (self.alpha_bounds, self.beta_bounds, self.rho_bounds)

    def contains(self, params: Sequence[float]) -> bool:
        return all(lo <= x <= hi for x, (lo, hi) in zip(params, self.bounds))


@dataclass(frozen=True)
class ParetoPoint:
    alpha: float
    beta: float
    rho: float
    feasibility: float  # W
    sigma: float | None  # None when fewer than two runs were feasible
    best_costs: tuple[float, ...] = field(default=(), compare=False)

    @property
    def params(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.rho)

    @property
    def objectives(self) -> tuple[float, float]:
        return (-self.feasibility, math.inf if self.sigma is None else self.sigma)


def evaluate_params(
    inst: Instance, alpha: float, beta: float, rho: float, cfg: TunerConfig,
    seeds: Sequence[int] | None = None,
) -> ParetoPoint:
    """R colony runs with a reduced budget.

    Run seeds default to ``cfg.seed * 1000 + r`` so every candidate sees the
    same random streams.
    """
    if not cfg.contains((alpha, beta, rho)):
        raise ValueError(f"parameters {(alpha, beta, rho)} outside the configured bounds")
    if seeds is None:
        seeds = [cfg.seed * 1000 + r for r in range(cfg.eval_runs)]
    rates, costs = [], []
    for s in seeds:
        res = run_aco(inst, AcoParams(alpha=alpha, beta=beta, rho=rho, ants=cfg.eval_ants,
                                      iterations=cfg.eval_iterations, seed=s))
        rates.append(res.feasibility_rate)
        if res.best is not None:
            costs.append(res.best_cost)
    sigma = statistics.stdev(costs) if len(costs) >= 2 else None
    return ParetoPoint(alpha, beta, rho, statistics.fmean(rates), sigma, tuple(costs))


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def nondominated_sort(points: Sequence[Sequence[float]]) -> list[list[int]]:
    """Fast non-dominated sorting; fronts are lists of indices in ascending order."""
    n = len(points)
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    counts = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if dominates(points[i], points[j]):
                dominated_by[i].append(j)
                counts[j] += 1
            elif dominates(points[j], points[i]):
                dominated_by[j].append(i)
                counts[i] += 1
    fronts = []
    current = [i for i in range(n) if counts[i] == 0]
    while current:
        fronts.append(sorted(current))
        nxt = []
        for i in current:
            for j in dominated_by[i]:
                counts[j] -= 1
                if counts[j] == 0:
                    nxt.append(j)
        current = nxt
    return fronts


def crowding_distance(front: Sequence[Sequence[float]]) -> list[float]:
    n = len(front)
    if n == 0:
        return []
    dist = [0.0] * n
    for m in range(len(front[0])):
        order = sorted(range(n), key=lambda i: front[i][m])
        lo, hi = front[order[0]][m], front[order[-1]][m]
        dist[order[0]] = dist[order[-1]] = math.inf
        span = hi - lo
        if span == 0 or not math.isfinite(span):
            continue
        for k in range(1, n - 1):
            i = order[k]
            if math.isfinite(dist[i]):
                dist[i] += (front[order[k + 1]][m] - front[order[k - 1]][m]) / span
    return dist


# --- variation operators --------------------------------------------------

def sbx_crossover(p1: Sequence[float], p2: Sequence[float], bounds, eta: float,
                  rng: random.Random) -> tuple[list[float], list[float]]:
    """Bounded simulated binary crossover, applied per variable with probability 1/2."""
    c1, c2 = list(p1), list(p2)
    for k, (lo, hi) in enumerate(bounds):
        x1, x2 = p1[k], p2[k]
        if rng.random() > 0.5 or abs(x1 - x2) < 1e-14 or hi - lo <= 0:
            continue
        y1, y2 = min(x1, x2), max(x1, x2)
        u = rng.random()
        out = []
        for edge, sign in ((y1 - lo, -1), (hi - y2, 1)):
            beta = 1.0 + 2.0 * edge / (y2 - y1)
            alpha = 2.0 - beta ** -(eta + 1.0)
            if u <= 1.0 / alpha:
                betaq = (u * alpha) ** (1.0 / (eta + 1.0))
            else:
                betaq = (1.0 / (2.0 - u * alpha)) ** (1.0 / (eta + 1.0))
            out.append(0.5 * ((y1 + y2) + sign * betaq * (y2 - y1)))
        a, b = (min(max(v, lo), hi) for v in out)
        if rng.random() < 0.5:
            a, b = b, a
        c1[k], c2[k] = a, b
    return c1, c2


def polynomial_mutation(x: Sequence[float], bounds, eta: float, prob: float,
                        rng: random.Random) -> list[float]:
    y = list(x)
    for k, (lo, hi) in enumerate(bounds):
        if rng.random() >= prob or hi - lo <= 0:
            continue
        d1, d2 = (y[k] - lo) / (hi - lo), (hi - y[k]) / (hi - lo)
        u = rng.random()
        power = 1.0 / (eta + 1.0)
        if u < 0.5:
            val = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (eta + 1.0)
            delta = val**power - 1.0
        else:
            val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (eta + 1.0)
            delta = 1.0 - val**power
        y[k] = min(max(y[k] + delta * (hi - lo), lo), hi)
    return y


def _rank_and_crowding(points: Sequence[ParetoPoint]) -> tuple[list[int], list[float]]:
    objs = [p.objectives for p in points]
    rank = [0] * len(points)
    crowd = [0.0] * len(points)
    for r, front in enumerate(nondominated_sort(objs)):
        for i, d in zip(front, crowding_distance([objs[i] for i in front])):
            rank[i], crowd[i] = r, d
    return rank, crowd


def _tournament(rank: list[int], crowd: list[float], rng: random.Random) -> int:
    i, j = rng.randrange(len(rank)), rng.randrange(len(rank))
    if rank[i] != rank[j]:
        return i if rank[i] < rank[j] else j
    if crowd[i] != crowd[j]:
        return i if crowd[i] > crowd[j] else j
    return i if rng.random() < 0.5 else j


def _environmental_selection(pool: list[ParetoPoint], size: int) -> list[ParetoPoint]:
    objs = [p.objectives for p in pool]
    chosen: list[ParetoPoint] = []
    for front in nondominated_sort(objs):
        if len(chosen) + len(front) <= size:
            chosen.extend(pool[i] for i in front)
            continue
        dist = crowding_distance([objs[i] for i in front])
        order = sorted(range(len(front)), key=lambda k: -dist[k])
        chosen.extend(pool[front[k]] for k in order[: size - len(chosen)])
        break
    return chosen


def tune(inst: Instance, cfg: TunerConfig | None = None) -> list[ParetoPoint]:
    """Run NSGA-II and return the final first front, one point per distinct parameter triple."""
    cfg = cfg or TunerConfig()
    rng = random.Random(cfg.seed)
    cache: dict[tuple[float, float, float], ParetoPoint] = {}

    def evaluate(x: Sequence[float]) -> ParetoPoint:
        key = tuple(float(v) for v in x)
        if key not in cache:
            cache[key] = evaluate_params(inst, *key, cfg)
        return cache[key]

    population = [evaluate([rng.uniform(lo, hi) for lo, hi in cfg.bounds]) for _ in range(cfg.population)]
    for _ in range(cfg.generations):
        rank, crowd = _rank_and_crowding(population)
        offspring: list[ParetoPoint] = []
        while len(offspring) < cfg.population:
            a = population[_tournament(rank, crowd, rng)]
            b = population[_tournament(rank, crowd, rng)]
            c1, c2 = sbx_crossover(a.params, b.params, cfg.bounds, cfg.eta_crossover, rng)
            for child in (c1, c2):
                child = polynomial_mutation(child, cfg.bounds, cfg.eta_mutation, cfg.mutation_prob, rng)
                offspring.append(evaluate(child))
        population = _environmental_selection(population + offspring, cfg.population)

    first = nondominated_sort([p.objectives for p in population])[0]
    front: dict[tuple[float, float, float], ParetoPoint] = {}
    for i in first:
        front.setdefault(population[i].params, population[i])
    return sorted(front.values(), key=lambda p: (p.objectives, p.params))


def knee_point(front: Sequence[ParetoPoint]) -> ParetoPoint:
    """Suggested setting: highest feasibility rate, then lowest spread."""
    return min(front, key=lambda p: (p.objectives, p.params))
