"""Ant colony search over device-type decisions of the tree constructor.

Pheromone lives on (level, device type) pairs.  Selection follows the usual
random-proportional rule ``tau**alpha * eta**beta``; the heuristic ``eta`` is
level dependent: squared channel capacity over cost at the leaf level, times
total child capacity at internal levels.  While more signals remain than free
child slots exist, candidates with little capacity relative to the best
admissible one are scaled down by ``(capacity ratio) ** kappa``.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .constructor import SelectionContext, construct
from .domain import Architecture, Instance, total_cost

TUNED_ALPHA = 2.45
TUNED_BETA = 3.97
TUNED_RHO = 0.79


@dataclass(frozen=True)
class AcoParams:
    alpha: float = TUNED_ALPHA
    beta: float = TUNED_BETA
    rho: float = TUNED_RHO
    ants: int = 20
    iterations: int = 100
    deposit_scale: float | None = None  # None: cost of the first feasible solution
    tau0: float = 1.0
    tau_min: float = 1e-6
    penalty_exponent: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        if self.ants < 1 or self.iterations < 1:
            raise ValueError("ants and iterations must be >= 1")
        if not 0.0 < self.tau_min <= self.tau0:
            raise ValueError("need 0 < tau_min <= tau0")
        if self.deposit_scale is not None and not self.deposit_scale > 0:
            raise ValueError("deposit_scale must be positive")
        if self.penalty_exponent < 0:
            raise ValueError("penalty_exponent must be non-negative")


@dataclass
class PheromoneTable:
    values: dict[tuple[int, str], float]
    tau_min: float = 1e-6

    @classmethod
    def uniform(cls, inst: Instance, tau0: float = 1.0, tau_min: float = 1e-6) -> PheromoneTable:
        return cls({(s, d.id): tau0 for s in range(1, inst.levels + 1) for d in inst.devices}, tau_min)

    def __getitem__(self, key: tuple[int, str]) -> float:
        return self.values[key]

    def copy(self) -> PheromoneTable:
        return PheromoneTable(dict(self.values), self.tau_min)


# --- heuristic and selection ---------------------------------------------

def heuristic(
    inst: Instance,
    type_id: str,
    level: int,
    a_left: int = 0,
    b_free: int = 0,
    kappa: float = 1.0,
    m_max: int | None = None,
    n_max: int | None = None,
) -> float:
    """Desirability of placing ``type_id`` at ``level``.

    ``m_max``/``n_max`` are the largest child/channel totals among the
    admissible candidates; they only matter while ``a_left > b_free``.
    """
    dev = inst.get_device(type_id)
    if not dev.cost > 0:
        raise ValueError(f"device {type_id!r}: heuristic needs a positive cost")
    if not 1 <= level <= inst.levels:
        raise ValueError(f"level {level} outside 1..{inst.levels}")
    n_tot, m_tot = dev.n_total, dev.m_total
    if level == inst.levels:
        eta = n_tot**2 / dev.cost
    else:
        eta = (n_tot**2 if n_tot > 0 else 1) * m_tot / dev.cost
    if a_left > b_free and kappa > 0:
        if level == inst.levels:
            ref = n_tot if n_max is None else n_max
            eta *= ((1 + n_tot) / (1 + ref)) ** kappa
        else:
            ref = m_tot if m_max is None else m_max
            eta *= ((1 + m_tot) / (1 + ref)) ** kappa
    return eta


def selection_probabilities(
    candidates: Sequence[tuple[str, float, float]], alpha: float, beta: float
) -> list[float]:
    """``tau**alpha * eta**beta`` normalised over the candidates (computed in log space)."""
    if not candidates:
        raise ValueError("empty candidate set")
    logs = []
    for type_id, tau, eta in candidates:
        if not (tau > 0 and eta > 0):
            raise ValueError(f"candidate {type_id!r}: pheromone and heuristic must be positive")
        logs.append(alpha * math.log(tau) + beta * math.log(eta))
    top = max(logs)
    weights = [math.exp(v - top) for v in logs]
    total = math.fsum(weights)
    return [w / total for w in weights]


def select_device(
    candidates: Sequence[tuple[str, float, float]], alpha: float, beta: float, rng: random.Random
) -> str:
    """Roulette-wheel draw over ``(type id, tau, eta)`` triples."""
    probs = selection_probabilities(candidates, alpha, beta)
    r = rng.random()
    acc = 0.0
    for (type_id, _, _), p in zip(candidates, probs):
        acc += p
        if r < acc:
            return type_id
    return candidates[-1][0]


def update_pheromones(
    table: PheromoneTable,
    feasible_solutions: Iterable[tuple[Architecture, float]],
    rho: float,
    q: float,
    tau_min: float | None = None,
) -> PheromoneTable:
    """Evaporate everything, deposit ``q / cost`` on each pair a solution used, clamp to the floor."""
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")
    floor = table.tau_min if tau_min is None else tau_min
    values = {k: (1.0 - rho) * v for k, v in table.values.items()}
    for arch, cost in feasible_solutions:
        if not cost > 0:
            raise ValueError("solution costs must be positive")
        for pair in {(n.level, n.device) for n in arch.nodes.values()}:
            values[pair] = values.get(pair, 0.0) + q / cost
    return PheromoneTable({k: max(floor, v) for k, v in values.items()}, floor)


class AntSelector:
    """Selector for the constructor driven by a read-only pheromone snapshot."""

    def __init__(self, inst: Instance, table: PheromoneTable, params: AcoParams) -> None:
        self.inst = inst
        self.table = table
        self.params = params
        self._eta: dict[tuple[int, tuple[str, ...], bool], list[float]] = {}

    def etas(self, level: int, candidates: tuple[str, ...], penalised: bool) -> list[float]:
        key = (level, candidates, penalised)
        cached = self._eta.get(key)
        if cached is None:
            dev = self.inst.device
            m_max = max(dev[u].m_total for u in candidates)
            n_max = max(dev[u].n_total for u in candidates)
            # a_left=1, b_free=0 switches the penalty on
            a, b = (1, 0) if penalised else (0, 0)
            cached = [
                heuristic(self.inst, u, level, a, b, self.params.penalty_exponent, m_max, n_max)
                for u in candidates
            ]
            self._eta[key] = cached
        return cached

    def __call__(self, level: int, candidates: Sequence[str], ctx: SelectionContext) -> str:
        if len(candidates) == 1:
            return candidates[0]
        cands = tuple(candidates)
        etas = self.etas(level, cands, ctx.a_left > ctx.b_free)
        tau = self.table.values
        triples = [(u, tau[level, u], e) for u, e in zip(cands, etas)]
        return select_device(triples, self.params.alpha, self.params.beta, ctx.rng)


# --- convergence trace ----------------------------------------------------

TRACE_HEADER = ("iteration", "best_so_far", "iter_avg", "feasible", "infeasible")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    best_so_far: float  # inf until the first feasible construction
    iter_avg: float  # nan when the iteration had no feasible construction
    feasible: int
    infeasible: int


@dataclass
class ConvergenceTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def best_series(self) -> list[float]:
        return [r.best_so_far for r in self.records]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for r in self.records:
            w.writerow([r.iteration, repr(r.best_so_far), repr(r.iter_avg), r.feasible, r.infeasible])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> ConvergenceTrace:
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(rows[0]) != TRACE_HEADER:
            raise ValueError(f"trace must start with header {','.join(TRACE_HEADER)}")
        records = []
        for i, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            try:
                records.append(TraceRecord(int(row[0]), float(row[1]), float(row[2]), int(row[3]), int(row[4])))
            except (ValueError, IndexError) as exc:
                raise ValueError(f"line {i}: {exc}") from exc
        return cls(records)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")

    @classmethod
    def read(cls, path: str | Path) -> ConvergenceTrace:
        return cls.from_csv(Path(path).read_text(encoding="utf-8"))


# --- outer loop -----------------------------------------------------------

@dataclass
class AcoResult:
    best: Architecture | None
    best_cost: float
    trace: ConvergenceTrace
    feasibility_rate: float
    constructions: int
    pheromones: PheromoneTable


def run_aco(inst: Instance, params: AcoParams | None = None) -> AcoResult:
    params = params or AcoParams()
    master = random.Random(params.seed)
    table = PheromoneTable.uniform(inst, params.tau0, params.tau_min)
    q = params.deposit_scale
    best: Architecture | None = None
    best_cost = math.inf
    feasible_total = 0
    trace = ConvergenceTrace()
    for it in range(1, params.iterations + 1):
        selector = AntSelector(inst, table, params)
        solutions: list[tuple[Architecture, float]] = []
        for _ in range(params.ants):
            outcome = construct(inst, selector, master.getrandbits(63))
            if not outcome.complete:
                continue
            cost = total_cost(outcome.architecture, inst)
            solutions.append((outcome.architecture, cost))
            if cost < best_cost:
                best, best_cost = outcome.architecture, cost
        if q is None and solutions:
            q = solutions[0][1]
        feasible_total += len(solutions)
        avg = math.fsum(c for _, c in solutions) / len(solutions) if solutions else math.nan
        trace.records.append(TraceRecord(it, best_cost, avg, len(solutions), params.ants - len(solutions)))
        # zero-cost solutions cannot be weighted by inverse cost
        deposits = [(a, c) for a, c in solutions if c > 0]
        table = update_pheromones(table, deposits, params.rho, q if q else 1.0, params.tau_min)
    total = params.ants * params.iterations
    return AcoResult(best, best_cost, trace, feasible_total / total, total, table)
