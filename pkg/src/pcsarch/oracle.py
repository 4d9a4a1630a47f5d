"""Exhaustive reference solver for tiny instances.

Tree shapes are generated in a canonical form (children sorted by device
type and subtree signature, subtrees below the root labelled with a room), so
isomorphic trees are produced once.  For every shape a signal assignment is
searched exactly and the result is accepted only if :func:`check` passes.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .domain import Architecture, DeviceTypeSpec, Instance, InterfaceSpec, Signal, SignalTypeSpec, total_cost
from .feasibility import check, nearest_processor

# hard limits beyond which enumeration is refused
MAX_DEVICES = 12
MAX_TYPES = 8
MAX_LEVELS = 4
MAX_SIGNALS = 40


class OracleBoundsError(ValueError):
    pass


@dataclass(frozen=True)
class EnumerationBounds:
    max_total_devices: int = 6
    max_children_per_node: int = 6

    def __post_init__(self) -> None:
        if self.max_children_per_node < 1:
            raise ValueError("max_children_per_node must be >= 1")


# signature: (device id, (child signatures...)); root children carry a room: (room, signature)
Sig = tuple


def _sig_size(sig: Sig) -> int:
    return 1 + sum(_sig_size(c) for c in sig[1])


def _multisets(items: list[tuple], budget: int, max_count: int, size_of, fits) -> Iterator[tuple]:
    """Non-empty sorted multisets of ``items`` with total size <= budget."""

    def rec(start: int, chosen: list, used: int) -> Iterator[tuple]:
        if chosen:
            yield tuple(chosen)
        if len(chosen) >= max_count:
            return
        for i in range(start, len(items)):
            item = items[i]
            sz = size_of(item)
            if used + sz > budget:
                continue
            chosen.append(item)
            if fits(chosen):
                yield from rec(i, chosen, used + sz)
            chosen.pop()

    yield from rec(0, [], 0)


class _ShapeGen:
    def __init__(self, inst: Instance, bounds: EnumerationBounds) -> None:
        self.inst = inst
        self.bounds = bounds
        self.subtrees = lru_cache(maxsize=None)(self._subtrees)

    def _usable(self, dev: DeviceTypeSpec, level: int) -> bool:
        return dev.n_total > 0 if level == self.inst.levels else dev.m_total > 0

    def _fits(self, parent: DeviceTypeSpec, sig_of=lambda item: item):
        def fits(children: list) -> bool:
            counts: dict[str, int] = {}
            for c in children:
                f = self.inst.device[sig_of(c)[0]].upper_interface
                counts[f] = counts.get(f, 0) + 1
                if counts[f] > parent.child_capacity.get(f, 0):
                    return False
            return True

        return fits

    def _subtrees(self, device: str, level: int, budget: int) -> tuple[Sig, ...]:
        """All canonical subtrees rooted at a ``device`` node on ``level`` with <= budget nodes."""
        dev = self.inst.device[device]
        if level == self.inst.levels:
            return ((device, ()),) if budget >= 1 else ()
        pool = self._child_pool(dev, level + 1, budget - 1)
        out = []
        for kids in _multisets(pool, budget - 1, self.bounds.max_children_per_node, _sig_size, self._fits(dev)):
            out.append((device, kids))
        return tuple(out)

    def _child_pool(self, parent: DeviceTypeSpec, level: int, budget: int) -> list[Sig]:
        pool: list[Sig] = []
        for d in self.inst.devices:
            if parent.child_capacity.get(d.upper_interface, 0) <= 0 or not self._usable(d, level):
                continue
            pool.extend(self.subtrees(d.id, level, budget))
        pool.sort(key=_sort_key)
        return pool

    def roots(self) -> Iterator[tuple[str, tuple]]:
        inst = self.inst
        total = self.bounds.max_total_devices
        labels = [r for r in inst.rooms if any(s.room == r for s in inst.signals)]
        if not labels:
            labels = [inst.rooms[0]] if inst.rooms else [None]
        for d in inst.devices:
            if d.m_total <= 0:
                continue
            pool = [(room, sig) for room in labels for sig in self._child_pool(d, 2, total - 1)]
            pool.sort(key=lambda item: (item[0] or "", _sort_key(item[1])))

            fits = self._fits(d, sig_of=lambda item: item[1])
            for kids in _multisets(pool, total - 1, self.bounds.max_children_per_node,
                                   lambda item: _sig_size(item[1]), fits):
                yield d.id, kids


def _sort_key(sig: Sig):
    return (sig[0], tuple(_sort_key(c) for c in sig[1]))


def _materialise(root_device: str, kids: tuple) -> Architecture:
    arch = Architecture()
    root = arch.add_node(root_device, 1)

    def grow(sig: Sig, parent: str, level: int, room: str | None) -> None:
        n = arch.add_node(sig[0], level, parent, room)
        for c in sig[1]:
            grow(c, n, level + 1, room)

    for room, sig in kids:
        grow(sig, root, 2, room)
    return arch


def _assign(arch: Architecture, inst: Instance) -> Architecture | None:
    """Find a signal-to-leaf assignment that passes every verdict, or None."""
    S = inst.levels
    leaves = [n for n, node in arch.nodes.items() if node.level == S]
    groups: dict[tuple[str, str], list[Signal]] = {}
    for s in inst.signals:
        groups.setdefault((s.room, s.type), []).append(s)
    options: list[tuple[list[Signal], list[str], list[int]]] = []
    for (room, b), sigs in groups.items():
        hosts = [v for v in leaves if arch.rooms.get(v) == room
                 and inst.device[arch.nodes[v].device].channel_capacity.get(b, 0) > 0]
        caps = [inst.device[arch.nodes[v].device].channel_capacity[b] for v in hosts]
        if sum(caps) < len(sigs):
            return None
        options.append((sigs, hosts, caps))
    proc = {v: nearest_processor(arch, inst, v) for v in leaves}

    def distributions(n: int, caps: list[int]) -> Iterator[tuple[int, ...]]:
        # greedy fill first, then every other split
        if not caps:
            if n == 0:
                yield ()
            return
        first, rest_cap = caps[0], sum(caps[1:])
        for k in range(min(first, n), max(0, n - rest_cap) - 1, -1):
            for tail in distributions(n - k, caps[1:]):
                yield (k, *tail)

    def fill(candidate: Architecture, sigs: list[Signal], hosts: list[str], split: tuple[int, ...]) -> None:
        it = iter(sigs)
        for v, k in zip(hosts, split):
            for _ in range(k):
                s = next(it)
                candidate.connections[s.id] = v
                candidate.processing[s.id] = proc[v]

    splits = [list(distributions(len(sigs), caps)) for sigs, _, caps in options]
    for combo in itertools.product(*splits):
        candidate = arch.copy()
        for (sigs, hosts, _), split in zip(options, combo):
            fill(candidate, sigs, hosts, split)
        if check(candidate, inst).feasible:
            return candidate
    return None


def _guard(inst: Instance, bounds: EnumerationBounds) -> None:
    if bounds.max_total_devices < inst.levels:
        raise ValueError("max_total_devices must be >= levels")
    if (bounds.max_total_devices > MAX_DEVICES or len(inst.devices) > MAX_TYPES
            or inst.levels > MAX_LEVELS or len(inst.signals) > MAX_SIGNALS):
        raise OracleBoundsError(
            f"instance too large for exhaustive enumeration (limits: {MAX_DEVICES} devices, "
            f"{MAX_TYPES} types, {MAX_LEVELS} levels, {MAX_SIGNALS} signals)"
        )


def canonical_form(arch: Architecture) -> tuple:
    """Order-independent signature of the device tree (rooms included, signals ignored)."""

    def sig(n: str) -> tuple:
        return (arch.nodes[n].device, arch.rooms.get(n) or "",
                tuple(sorted(sig(c) for c in arch.children(n))))

    root = arch.root
    return sig(root) if root is not None else ()


def enumerate_architectures(inst: Instance, bounds: EnumerationBounds | None = None) -> Iterator[Architecture]:
    """Every feasible architecture up to ``bounds``, one per canonical tree shape."""
    bounds = bounds or EnumerationBounds()
    _guard(inst, bounds)
    gen = _ShapeGen(inst, bounds)
    for root_device, kids in gen.roots():
        arch = _assign(_materialise(root_device, kids), inst)
        if arch is not None:
            yield arch


def optimal_cost(inst: Instance, bounds: EnumerationBounds | None = None) -> tuple[float, Architecture] | None:
    best: tuple[float, tuple, Architecture] | None = None
    for arch in enumerate_architectures(inst, bounds):
        cost = total_cost(arch, inst)
        key = (cost, repr(canonical_form(arch)))
        if best is None or key < best[:2]:
            best = (cost, key[1], arch)
    return None if best is None else (best[0], best[2])


# --- random tiny instances ------------------------------------------------

def random_tiny_instance(seed: int) -> Instance:
    """Small random instance: <= 12 signals, 2-4 device types, 2-3 levels, integer costs in [1, 100].

    Not guaranteed solvable; pair with :func:`optimal_cost`.
    """
    rng = random.Random(seed)
    levels = rng.choice((2, 3))
    n_types = rng.randint(1, 2)
    types = [SignalTypeSpec(f"T{k}", f"type {k}", 1.0, 1.0) for k in range(n_types)]
    n_ifaces = rng.randint(1, 2)
    ifaces = [InterfaceSpec(f"F{k}", f"iface {k}", float(rng.choice((2, 10, 35)))) for k in range(n_ifaces)]
    rooms = tuple(f"H{k}" for k in range(rng.randint(1, 2)))
    n_signals = rng.randint(1, 12)
    signals = tuple(Signal(f"s{k:02d}", rng.choice(types).id, rng.choice(rooms)) for k in range(n_signals))

    def caps(ids: list[str], lo: int, hi: int, density: float = 0.7) -> dict[str, int]:
        out = {i: (rng.randint(lo, hi) if rng.random() < density else 0) for i in ids}
        if not any(out.values()):
            out[rng.choice(ids)] = rng.randint(lo, hi)
        return out

    iface_ids = [f.id for f in ifaces]
    type_ids = [t.id for t in types]
    n_dev = rng.randint(2, 4)
    devices = [DeviceTypeSpec(
        "P0", "controller", float(rng.randint(20, 100)), "processor", rng.choice(iface_ids),
        caps(iface_ids, 2, 4), {t: 0 for t in type_ids},
    )]
    for k in range(1, n_dev):
        if levels == 3 and k == 1 and rng.random() < 0.5:
            devices.append(DeviceTypeSpec(
                f"R{k}", "switch", float(rng.randint(1, 30)), "repeater", rng.choice(iface_ids),
                caps(iface_ids, 2, 4), {t: 0 for t in type_ids},
            ))
            continue
        devices.append(DeviceTypeSpec(
            f"D{k}", "io module", float(rng.randint(1, 100)), "repeater", rng.choice(iface_ids),
            {f: 0 for f in iface_ids}, caps(type_ids, 1, 8),
        ))
    return Instance(tuple(types), tuple(ifaces), rooms, signals, tuple(devices), levels)
