"""Constraint catalog for complete architectures and admissibility queries for partial ones.

The full checker walks the tree from scratch for every verdict; the
constructor keeps its own incremental bookkeeping, so the two are independent
routes to the same answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from .domain import Architecture, Instance

CONSTRAINTS = (
    "tree_shape",
    "leaf_only_connection",
    "channel_capacity",
    "child_capacity",
    "interface_compatibility",
    "processor_coverage",
    "memory_capacity",
    "execution_time",
    "path_availability",
    "room_consistency",
    "allocation_completeness",
)

# absolute slack on the real-valued budgets (memory, time, availability)
TOL = 1e-9


@dataclass
class CheckReport:
    offenders: dict[str, list[str]] = field(default_factory=lambda: {c: [] for c in CONSTRAINTS})

    def fail(self, constraint: str, *ids: str) -> None:
        bucket = self.offenders[constraint]
        for i in ids:
            if i not in bucket:
                bucket.append(i)
        if not ids and not bucket:
            bucket.append("")

    def passed(self, constraint: str) -> bool:
        return not self.offenders[constraint]

    @property
    def feasible(self) -> bool:
        return all(not v for v in self.offenders.values())

    def failures(self) -> list[str]:
        return [c for c in CONSTRAINTS if self.offenders[c]]

    def to_rows(self) -> list[dict[str, Any]]:
        return [
            {"constraint": c, "status": "fail" if self.offenders[c] else "pass", "offenders": list(self.offenders[c])}
            for c in CONSTRAINTS
        ]

    def __str__(self) -> str:
        lines = []
        for row in self.to_rows():
            extra = f"  {', '.join(x for x in row['offenders'] if x)}" if row["offenders"] else ""
            lines.append(f"{row['status'].upper():4}  {row['constraint']}{extra}")
        return "\n".join(lines)


def path_delay(arch: Architecture, inst: Instance, leaf: str, target: str) -> float:
    """Fixed transport delay from ``leaf`` up to ``target``.

    Every hop adds the child-side interface cycle time, plus the relay delay
    when the child is a repeater.
    """
    total = 0.0
    node = leaf
    while node != target:
        dev = inst.get_device(arch.nodes[node].device)
        total += inst.interface[dev.upper_interface].cycle_time
        if not dev.is_processor:
            total += dev.delay
        node = arch.parent[node]
    return total


def nearest_processor(arch: Architecture, inst: Instance, node: str) -> str | None:
    """First processor on the path from ``node`` (inclusive) to the root."""
    for v in arch.path_to_root(node):
        if inst.get_device(arch.nodes[v].device).is_processor:
            return v
    return None


def check(arch: Architecture, inst: Instance) -> CheckReport:
    report = CheckReport()
    S = inst.levels
    devs = {n: inst.get_device(node.device) for n, node in arch.nodes.items()}

    # (a) tree shape
    roots = [n for n in arch.nodes if n not in arch.parent]
    if len(roots) != 1:
        report.fail("tree_shape", *roots)
    for n in roots:
        if arch.nodes[n].level != 1:
            report.fail("tree_shape", n)
    for n, node in arch.nodes.items():
        if not 1 <= node.level <= S:
            report.fail("tree_shape", n)
        par = arch.parent.get(n)
        if par is not None and (par not in arch.nodes or arch.nodes[par].level != node.level - 1):
            report.fail("tree_shape", n)
        if node.level < S and not arch.children(n):
            report.fail("tree_shape", n)
    # levels strictly decrease towards the parent, so one level-1 root means connected and acyclic
    shape_ok = report.passed("tree_shape")

    # (b) every signal connected, nothing unknown connected
    for s in inst.signals:
        if s.id not in arch.connections:
            report.fail("allocation_completeness", s.id)
    for a in arch.connections:
        if a not in inst.signal:
            report.fail("allocation_completeness", a)
    for a, v in arch.connections.items():
        if v not in arch.nodes or arch.nodes[v].level != S:
            report.fail("leaf_only_connection", a)

    # (c) channel capacity per leaf and signal type
    used: dict[tuple[str, str], int] = {}
    for a, v in arch.connections.items():
        sig = inst.signal.get(a)
        if sig is not None and v in arch.nodes:
            used[v, sig.type] = used.get((v, sig.type), 0) + 1
    for (v, b), count in used.items():
        if count > devs[v].channel_capacity.get(b, 0):
            report.fail("channel_capacity", v)

    # (d) child capacity per interface, interface compatibility
    for n in arch.nodes:
        per_iface: dict[str, int] = {}
        for c in arch.children(n):
            f = devs[c].upper_interface
            per_iface[f] = per_iface.get(f, 0) + 1
            if devs[n].child_capacity.get(f, 0) <= 0:
                report.fail("interface_compatibility", c)
        for f, count in per_iface.items():
            if count > devs[n].child_capacity.get(f, 0):
                report.fail("child_capacity", n)

    # (i) rooms
    for n in arch.nodes:
        par = arch.parent.get(n)
        if par is None or par not in arch.nodes or par not in arch.parent:
            continue  # root, or child of the root
        if arch.rooms.get(n) != arch.rooms.get(par):
            report.fail("room_consistency", n)
    for a, v in arch.connections.items():
        sig = inst.signal.get(a)
        if sig is not None and v in arch.nodes and arch.parent.get(v) is not None and arch.rooms.get(v) != sig.room:
            report.fail("room_consistency", a)

    if not shape_ok:
        # path-based verdicts are meaningless on a broken tree
        for c in ("processor_coverage", "memory_capacity", "execution_time", "path_availability"):
            if arch.connections:
                report.fail(c, "tree_shape")
        return report

    # (e) processing at a processor on the leaf-to-root path
    served: dict[str, list[str]] = {}
    for a, v in arch.connections.items():
        if v not in arch.nodes:
            continue
        p = arch.processing.get(a)
        if p is None or p not in arch.nodes or not devs[p].is_processor or p not in arch.path_to_root(v):
            report.fail("processor_coverage", a)
            continue
        served.setdefault(p, []).append(a)
    for a in arch.processing:
        if a not in arch.connections:
            report.fail("processor_coverage", a)

    # (f) memory, (g) execution time
    for p, sigs in served.items():
        dev = devs[p]
        known = [inst.signal[a] for a in sigs if a in inst.signal]
        mem = math.fsum(inst.signal_type[s.type].memory for s in known)
        if dev.memory is not None and mem > dev.memory + TOL:
            report.fail("memory_capacity", p)
        if inst.scan_deadline is not None:
            work = math.fsum(inst.signal_type[s.type].instructions for s in known) * dev.instr_time
            leaves = {arch.connections[a] for a in sigs}
            delay = max(path_delay(arch, inst, v, p) for v in leaves)
            if work + delay > inst.scan_deadline + TOL:
                report.fail("execution_time", p)

    # (h) path availability, failures independent along the path
    if inst.min_availability > 0:
        for a, v in arch.connections.items():
            if v not in arch.nodes:
                continue
            avail = math.prod(1.0 - devs[u].failure_prob for u in arch.path_to_root(v))
            if avail < inst.min_availability - TOL:
                report.fail("path_availability", a)
    return report


# --- partial-architecture queries ---------------------------------------

def child_counts(arch: Architecture, inst: Instance, node: str) -> dict[str, int]:
    counts: dict[str, int] = {}
    for c in arch.children(node):
        f = inst.get_device(arch.nodes[c].device).upper_interface
        counts[f] = counts.get(f, 0) + 1
    return counts


def root_candidates(inst: Instance) -> list[str]:
    """Device types allowed at level 1: processors that can host children."""
    return [d.id for d in inst.devices if d.is_processor and d.m_total > 0]


def admissible_child_types(inst: Instance, arch: Architecture, parent: str, level: int) -> list[str]:
    """Catalog types that may be attached below ``parent`` at ``level``.

    Returned in catalog order; the list may be empty.
    """
    if parent not in arch.nodes:
        raise KeyError(f"unknown parent node {parent!r}")
    pdev = inst.get_device(arch.nodes[parent].device)
    counts = child_counts(arch, inst, parent)
    out = []
    for u in inst.devices:
        f = u.upper_interface
        if counts.get(f, 0) >= pdev.child_capacity.get(f, 0):
            continue
        if level == inst.levels and u.n_total <= 0:
            continue
        if level < inst.levels and u.m_total <= 0:
            continue
        out.append(u.id)
    return out


def free_child_slots(arch: Architecture, inst: Instance) -> int:
    total = 0
    for n, node in arch.nodes.items():
        if node.level >= inst.levels:
            continue
        cap = inst.get_device(node.device).child_capacity
        counts = child_counts(arch, inst, n)
        total += sum(max(0, m - counts.get(f, 0)) for f, m in cap.items())
    return total


def free_channels(arch: Architecture, inst: Instance, signal_type: str, room: str | None = None) -> int:
    """Unused channels of ``signal_type`` over all leaves.

    With ``room`` given, only leaves in that room (or without a room yet) count.
    """
    used: dict[str, int] = {}
    for a, v in arch.connections.items():
        if inst.signal[a].type == signal_type:
            used[v] = used.get(v, 0) + 1
    total = 0
    for n, node in arch.nodes.items():
        if node.level != inst.levels:
            continue
        if room is not None and arch.rooms.get(n) not in (room, None):
            continue
        cap = inst.get_device(node.device).channel_capacity.get(signal_type, 0)
        total += max(0, cap - used.get(n, 0))
    return total
