"""Device-replacement local search on a feasible architecture."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .domain import Architecture, Instance, total_cost
from .feasibility import check, child_counts, nearest_processor


@dataclass(frozen=True)
class LsBudget:
    max_passes: int = 50
    max_stall_passes: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_passes < 1 or self.max_stall_passes < 1:
            raise ValueError("local search budget counts must be >= 1")


def substitute(arch: Architecture, inst: Instance, node: str, type_id: str) -> Architecture:
    """Copy of ``arch`` with ``node`` switched to ``type_id``.

    When the node changes role, signals below it are re-homed to their
    nearest processor so processing stays a function of the wiring.
    """
    out = arch.copy()
    old = inst.get_device(arch.nodes[node].device)
    out.replace_device(node, type_id)
    if old.is_processor != inst.get_device(type_id).is_processor:
        for a, leaf in out.connections.items():
            if node in out.path_to_root(leaf):
                out.processing[a] = nearest_processor(out, inst, leaf)
    return out


def _structurally_ok(arch: Architecture, inst: Instance, node: str, type_id: str) -> bool:
    dev = inst.get_device(type_id)
    par = arch.parent.get(node)
    if par is not None:
        pcap = inst.get_device(arch.nodes[par].device).child_capacity
        counts = child_counts(arch, inst, par)
        old_iface = inst.get_device(arch.nodes[node].device).upper_interface
        counts[old_iface] -= 1
        if counts.get(dev.upper_interface, 0) + 1 > pcap.get(dev.upper_interface, 0):
            return False
    for f, n in child_counts(arch, inst, node).items():
        if n > dev.child_capacity.get(f, 0):
            return False
    used: dict[str, int] = {}
    for a in arch.signals_on(node):
        b = inst.signal[a].type
        used[b] = used.get(b, 0) + 1
    return all(n <= dev.channel_capacity.get(b, 0) for b, n in used.items())


def replacement_neighbors(
    arch: Architecture, inst: Instance, node: str, max_cost: float | None = None
) -> list[str]:
    """Other catalog types that can take ``node``'s place with every verdict still passing.

    ``max_cost`` (exclusive) skips candidates that are not cheaper, which
    avoids full checks the local search would discard anyway.
    """
    if node not in arch.nodes:
        raise KeyError(f"unknown node {node!r}")
    current = arch.nodes[node].device
    out = []
    for dev in inst.devices:
        if dev.id == current or (max_cost is not None and not dev.cost < max_cost):
            continue
        if not _structurally_ok(arch, inst, node, dev.id):
            continue
        if check(substitute(arch, inst, node, dev.id), inst).feasible:
            out.append(dev.id)
    return out


def local_search(arch: Architecture, inst: Instance, budget: LsBudget | None = None) -> Architecture:
    """First-improvement descent; nodes are visited in a fresh random order each pass."""
    budget = budget or LsBudget()
    if not check(arch, inst).feasible:
        raise ValueError("local search needs a feasible architecture")
    rng = random.Random(budget.seed)
    current = arch.copy()
    stall = 0
    for _ in range(budget.max_passes):
        order = list(current.nodes)
        rng.shuffle(order)
        improved = False
        for node in order:
            cost_here = inst.get_device(current.nodes[node].device).cost
            cands = replacement_neighbors(current, inst, node, max_cost=cost_here)
            if not cands:
                continue
            best = min(cands, key=lambda u: (inst.device[u].cost, u))
            before = total_cost(current, inst)
            current = substitute(current, inst, node, best)
            assert total_cost(current, inst) < before
            improved = True
        if improved:
            stall = 0
        else:
            stall += 1
            if stall >= budget.max_stall_passes:
                break
    return current
