"""Deterministic tree-building procedure.

The builder grows a trunk (one node per level), then wires signals one by one
in canonical order.  Each signal goes to the first open leaf of its room and
type that still has processing budget; otherwise the tree is expanded below
the deepest internal node of the room that has a free slot (falling back to
the root), creating intermediate nodes down to the leaf level.  Every device
type decision is delegated to a selector.

Structural and resource constraints are enforced at each step, so a complete
construction is feasible; a step with no admissible option ends the
construction as a dead end.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .domain import Architecture, Instance, Signal
from .feasibility import TOL, root_candidates


class DeadEnd(Exception):
    def __init__(self, reason: str, signal: str | None = None) -> None:
        self.reason = reason
        self.signal = signal
        super().__init__(reason)


@dataclass
class SelectionContext:
    inst: Instance
    arch: Architecture
    a_left: int  # signals not yet connected
    b_free: int  # free child slots on internal nodes
    rng: random.Random
    parent: str | None = None


class Selector(Protocol):
    def __call__(self, level: int, candidates: Sequence[str], ctx: SelectionContext) -> str: ...


# --- simple deterministic selectors -------------------------------------

def cheapest_first(level: int, candidates: Sequence[str], ctx: SelectionContext) -> str:
    return min(candidates, key=lambda u: ctx.inst.device[u].cost)


def channel_greedy(level: int, candidates: Sequence[str], ctx: SelectionContext) -> str:
    dev = ctx.inst.device
    return min(candidates, key=lambda u: (-dev[u].n_total, dev[u].cost))


def uniform_random(level: int, candidates: Sequence[str], ctx: SelectionContext) -> str:
    return candidates[ctx.rng.randrange(len(candidates))]


@dataclass
class Pinned:
    """Pick a fixed type per level when admissible, otherwise defer to ``fallback``."""

    choices: dict[int, str]
    fallback: Selector = cheapest_first

    def __call__(self, level: int, candidates: Sequence[str], ctx: SelectionContext) -> str:
        want = self.choices.get(level)
        if want in candidates:
            return want
        return self.fallback(level, candidates, ctx)


@dataclass
class ConstructionOutcome:
    status: str  # "complete" | "dead_end"
    architecture: Architecture | None = None
    dead_end_reason: str = ""
    failed_signal: str | None = None

    @property
    def complete(self) -> bool:
        return self.status == "complete"


def canonical_order(inst: Instance) -> list[Signal]:
    """Signals grouped by room, then signal type, then declaration order."""
    room_idx = {r: i for i, r in enumerate(inst.rooms)}
    type_idx = {t.id: i for i, t in enumerate(inst.signal_types)}
    order = sorted(range(len(inst.signals)), key=lambda k: (
        room_idx.get(inst.signals[k].room, len(room_idx)),
        type_idx.get(inst.signals[k].type, len(type_idx)),
        k,
    ))
    return [inst.signals[k] for k in order]


@dataclass
class _Builder:
    """Partial architecture plus the running totals needed for O(1) admissibility."""

    inst: Instance
    sel: Selector
    rng: random.Random
    arch: Architecture = field(default_factory=Architecture)
    a_left: int = 0

    def __post_init__(self) -> None:
        self.slots: dict[str, dict[str, int]] = {}  # node -> iface -> children attached
        self.used: dict[str, dict[str, int]] = {}  # leaf -> type -> channels used
        self.serving: dict[str, str | None] = {}  # nearest processor ancestor-or-self
        self.delay_up: dict[str, float] = {}  # fixed delay from node up to its serving processor
        self.avail: dict[str, float] = {}  # product of (1 - P) from node to root
        self.mem: dict[str, float] = {}
        self.work: dict[str, float] = {}
        self.max_delay: dict[str, float] = {}
        self.open: dict[tuple[str | None, str], deque[str]] = {}
        self.internal_by_room: dict[str | None, list[str]] = {}
        self.b_free = 0
        self.root: str | None = None
        if self.arch.nodes:
            self._adopt()

    # --- bookkeeping ----------------------------------------------------
    def _register(self, n: str) -> None:
        inst = self.inst
        node = self.arch.nodes[n]
        dev = inst.device[node.device]
        par = self.arch.parent.get(n)
        self.slots[n] = {}
        if par is None:
            self.root = n
            up_avail = 1.0
        else:
            f = dev.upper_interface
            self.slots[par][f] = self.slots[par].get(f, 0) + 1
            if self.arch.nodes[par].level < inst.levels:
                self.b_free -= 1
            up_avail = self.avail[par]
        self.avail[n] = up_avail * (1.0 - dev.failure_prob)
        if dev.is_processor:
            self.serving[n] = n
            self.delay_up[n] = 0.0
            self.mem[n] = 0.0
            self.work[n] = 0.0
            self.max_delay[n] = 0.0
        elif par is None:
            self.serving[n] = None
            self.delay_up[n] = 0.0
        else:
            self.serving[n] = self.serving[par]
            self.delay_up[n] = (
                inst.interface[dev.upper_interface].cycle_time + dev.delay + self.delay_up[par]
            )
        room = self.arch.rooms.get(n)
        if node.level < inst.levels:
            self.b_free += dev.m_total
            if par is not None:
                self.internal_by_room.setdefault(room, []).append(n)
        else:
            self.used[n] = {}
            for b, cap in dev.channel_capacity.items():
                if cap > 0:
                    self.open.setdefault((room, b), deque()).append(n)

    def _adopt(self) -> None:
        # parents before children
        arch = self.arch
        for n in sorted(arch.nodes, key=lambda k: arch.nodes[k].level):
            self._register(n)
        for a, v in arch.connections.items():
            self._account(v, self.inst.signal[a])
        self.a_left = len(self.inst.signals) - len(arch.connections)

    def _add(self, device: str, level: int, parent: str | None, room: str | None) -> str:
        n = self.arch.add_node(device, level, parent, room)
        self._register(n)
        return n

    def _account(self, leaf: str, sig: Signal) -> None:
        st = self.inst.signal_type[sig.type]
        u = self.used[leaf]
        u[sig.type] = u.get(sig.type, 0) + 1
        p = self.serving[leaf]
        if p is not None:
            self.mem[p] += st.memory
            self.work[p] += st.instructions
            if self.delay_up[leaf] > self.max_delay[p]:
                self.max_delay[p] = self.delay_up[leaf]

    def _connect(self, leaf: str, sig: Signal) -> None:
        self.arch.connections[sig.id] = leaf
        p = self.serving[leaf]
        self.arch.processing[sig.id] = p
        self._account(leaf, sig)
        self.a_left -= 1

    # --- resource admissibility ----------------------------------------
    def _budget_ok(self, proc_dev, mem0: float, work0: float, delay0: float,
                   leaf_delay: float, leaf_avail: float, sig: Signal) -> bool:
        inst = self.inst
        st = inst.signal_type[sig.type]
        if proc_dev.memory is not None and mem0 + st.memory > proc_dev.memory + TOL:
            return False
        if inst.scan_deadline is not None:
            t = (work0 + st.instructions) * proc_dev.instr_time + max(delay0, leaf_delay)
            if t > inst.scan_deadline + TOL:
                return False
        return leaf_avail >= inst.min_availability - TOL

    def leaf_fits(self, leaf: str, sig: Signal) -> bool:
        dev = self.inst.device[self.arch.nodes[leaf].device]
        if self.used[leaf].get(sig.type, 0) >= dev.channel_capacity.get(sig.type, 0):
            return False
        p = self.serving[leaf]
        if p is None:
            return False
        pdev = self.inst.device[self.arch.nodes[p].device]
        return self._budget_ok(pdev, self.mem[p], self.work[p], self.max_delay[p],
                               self.delay_up[leaf], self.avail[leaf], sig)

    def new_leaf_fits(self, parent: str, u: str, sig: Signal) -> bool:
        inst = self.inst
        dev = inst.device[u]
        if dev.channel_capacity.get(sig.type, 0) <= 0:
            return False
        avail = self.avail[parent] * (1.0 - dev.failure_prob)
        if dev.is_processor:
            return self._budget_ok(dev, 0.0, 0.0, 0.0, 0.0, avail, sig)
        p = self.serving[parent]
        if p is None:
            return False
        delay = inst.interface[dev.upper_interface].cycle_time + dev.delay + self.delay_up[parent]
        pdev = inst.device[self.arch.nodes[p].device]
        return self._budget_ok(pdev, self.mem[p], self.work[p], self.max_delay[p], delay, avail, sig)

    # --- structural admissibility --------------------------------------
    def admissible(self, parent: str, level: int) -> list[str]:
        inst = self.inst
        pcap = inst.device[self.arch.nodes[parent].device].child_capacity
        counts = self.slots[parent]
        leaf_level = level == inst.levels
        out = []
        for u in inst.devices:
            f = u.upper_interface
            if counts.get(f, 0) >= pcap.get(f, 0):
                continue
            if (u.n_total if leaf_level else u.m_total) <= 0:
                continue
            out.append(u.id)
        return out

    def _choose(self, level: int, candidates: list[str], parent: str | None) -> str:
        ctx = SelectionContext(self.inst, self.arch, self.a_left, self.b_free, self.rng, parent)
        choice = self.sel(level, candidates, ctx)
        if choice not in candidates:
            raise ValueError(f"selector returned {choice!r}, not among admissible {candidates}")
        return choice

    # --- procedure ------------------------------------------------------
    def build_trunk(self, room: str | None) -> None:
        S = self.inst.levels
        cands = root_candidates(self.inst)
        if not cands:
            raise DeadEnd("no processor can serve as root")
        parent = self._add(self._choose(1, cands, None), 1, None, None)
        for level in range(2, S + 1):
            cands = self.admissible(parent, level)
            if not cands:
                raise DeadEnd(f"no admissible device at level {level} of the trunk")
            parent = self._add(self._choose(level, cands, parent), level, parent, room)

    def allocate(self, sig: Signal) -> None:
        if sig.id in self.arch.connections:
            raise ValueError(f"signal {sig.id!r} is already connected")
        queue = self.open.get((sig.room, sig.type))
        while queue:
            leaf = queue[0]
            if self.leaf_fits(leaf, sig):
                self._connect(leaf, sig)
                return
            # same-type demands are identical and budgets only shrink
            queue.popleft()
        self._expand(sig)

    def _expand(self, sig: Signal) -> None:
        S = self.inst.levels
        sites = sorted(self.internal_by_room.get(sig.room, []),
                       key=lambda n: -self.arch.nodes[n].level)
        if self.root is not None:
            sites.append(self.root)
        for site in sites:
            level = self.arch.nodes[site].level + 1
            cands = self.admissible(site, level)
            if level == S:
                cands = [u for u in cands if self.new_leaf_fits(site, u, sig)]
            if not cands:
                continue
            parent = site
            while True:
                node = self._add(self._choose(level, cands, parent), level, parent, sig.room)
                if level == S:
                    self._connect(node, sig)
                    return
                parent, level = node, level + 1
                cands = self.admissible(parent, level)
                if level == S:
                    cands = [u for u in cands if self.new_leaf_fits(parent, u, sig)]
                if not cands:
                    raise DeadEnd(f"no admissible device at level {level} under {parent}", sig.id)
        raise DeadEnd("no leaf fits and no expansion site is left", sig.id)


def build_trunk(inst: Instance, sel: Selector, seed: int = 0) -> Architecture:
    """Root-to-leaf path of ``levels`` nodes; the leaf takes the first signal's room."""
    order = canonical_order(inst)
    b = _Builder(inst, sel, random.Random(seed))
    b.a_left = len(inst.signals)
    b.build_trunk(order[0].room if order else None)
    return b.arch


def allocate_signal(arch: Architecture, inst: Instance, signal: Signal, sel: Selector,
                    seed: int = 0) -> Architecture:
    """Connect ``signal`` in place, expanding the tree if no existing leaf fits."""
    b = _Builder(inst, sel, random.Random(seed), arch)
    b.allocate(signal)
    return arch


def construct(inst: Instance, sel: Selector, seed: int = 0) -> ConstructionOutcome:
    order = canonical_order(inst)
    b = _Builder(inst, sel, random.Random(seed))
    b.a_left = len(order)
    current: str | None = None
    try:
        b.build_trunk(order[0].room if order else None)
        for sig in order:
            current = sig.id
            b.allocate(sig)
    except DeadEnd as exc:
        return ConstructionOutcome("dead_end", None, exc.reason, exc.signal or current)
    return ConstructionOutcome("complete", b.arch)
