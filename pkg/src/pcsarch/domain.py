"""Problem and solution data model for hierarchical control-system hardware synthesis.

An :class:`Instance` describes what has to be wired up (signals grouped into
control rooms) and what can be bought (the device catalog).  An
:class:`Architecture` is a rooted tree of purchased device instances together
with the signal allocation relations:

* ``connections``  signal -> leaf node it is physically wired to
* ``processing``   signal -> node that executes its program logic
* ``rooms``        node -> control room (the root serves every room)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping

PROCESSOR = "processor"
REPEATER = "repeater"
ROLES = (PROCESSOR, REPEATER)


class InstanceError(ValueError):
    """Base class for problems found while reading an instance or architecture."""


class ParseError(InstanceError):
    def __init__(self, message: str, location: str = "") -> None:
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class DanglingReferenceError(InstanceError):
    def __init__(self, kind: str, ref: str, location: str = "") -> None:
        self.kind = kind
        self.ref = ref
        self.location = location
        where = f" at {location}" if location else ""
        super().__init__(f"unknown {kind} {ref!r}{where}")


class DuplicateIdError(InstanceError):
    def __init__(self, kind: str, ref: str) -> None:
        self.kind = kind
        self.ref = ref
        super().__init__(f"duplicate {kind} id {ref!r}")


class UnknownDeviceError(InstanceError, KeyError):
    def __init__(self, device: str) -> None:
        self.device = device
        InstanceError.__init__(self, f"unknown device type {device!r}")

    __str__ = InstanceError.__str__


@dataclass(frozen=True)
class SignalTypeSpec:
    id: str
    name: str
    memory: float  # r: memory units per signal
    instructions: float  # w: instructions per scan per signal


@dataclass(frozen=True)
class InterfaceSpec:
    id: str
    name: str
    cycle_time: float  # ms


@dataclass(frozen=True)
class Signal:
    id: str
    type: str
    room: str


@dataclass(frozen=True)
class DeviceTypeSpec:
    id: str
    name: str
    cost: float
    role: str
    upper_interface: str
    child_capacity: Mapping[str, int]
    channel_capacity: Mapping[str, int]
    memory: float | None = None  # None means unbounded
    failure_prob: float = 0.0
    instr_time: float = 0.0  # ms per instruction
    delay: float = 0.0  # ms, repeaters only

    @property
    def is_processor(self) -> bool:
        return self.role == PROCESSOR

    @cached_property
    def n_total(self) -> int:
        return sum(self.channel_capacity.values())

    @cached_property
    def m_total(self) -> int:
        return sum(self.child_capacity.values())


@dataclass(frozen=True)
class Instance:
    signal_types: tuple[SignalTypeSpec, ...]
    interfaces: tuple[InterfaceSpec, ...]
    rooms: tuple[str, ...]
    signals: tuple[Signal, ...]
    devices: tuple[DeviceTypeSpec, ...]
    levels: int
    scan_deadline: float | None = None  # ms; None means unbounded
    min_availability: float = 0.0

    @cached_property
    def device(self) -> dict[str, DeviceTypeSpec]:
        return {d.id: d for d in self.devices}

    @cached_property
    def signal_type(self) -> dict[str, SignalTypeSpec]:
        return {t.id: t for t in self.signal_types}

    @cached_property
    def interface(self) -> dict[str, InterfaceSpec]:
        return {f.id: f for f in self.interfaces}

    @cached_property
    def signal(self) -> dict[str, Signal]:
        return {s.id: s for s in self.signals}

    def get_device(self, device_id: str) -> DeviceTypeSpec:
        try:
            return self.device[device_id]
        except KeyError:
            raise UnknownDeviceError(device_id) from None

    def with_signals(self, signals: Iterable[Signal]) -> Instance:
        from dataclasses import replace

        return replace(self, signals=tuple(signals))


@dataclass(frozen=True)
class Node:
    id: str
    device: str
    level: int


@dataclass
class Architecture:
    """Device tree plus allocation relations.

    Mutable so constructors can grow it in place; use :meth:`copy` before
    handing it to code that should not see later changes.
    """

    nodes: dict[str, Node] = field(default_factory=dict)
    parent: dict[str, str] = field(default_factory=dict)
    connections: dict[str, str] = field(default_factory=dict)  # x: signal -> leaf
    processing: dict[str, str] = field(default_factory=dict)  # z: signal -> node
    rooms: dict[str, str | None] = field(default_factory=dict)  # g: node -> room

    def __post_init__(self) -> None:
        self._children: dict[str, list[str]] = {n: [] for n in self.nodes}
        for child, par in self.parent.items():
            self._children.setdefault(par, []).append(child)

    # --- structure -------------------------------------------------------
    def add_node(
        self, device: str, level: int, parent: str | None = None, room: str | None = None,
        node_id: str | None = None,
    ) -> str:
        if node_id is None:
            node_id = f"n{len(self.nodes)}"
            while node_id in self.nodes:
                node_id += "_"
        if node_id in self.nodes:
            raise DuplicateIdError("node", node_id)
        self.nodes[node_id] = Node(node_id, device, level)
        self._children[node_id] = []
        if parent is not None:
            self.parent[node_id] = parent
            self._children.setdefault(parent, []).append(node_id)
            self.rooms[node_id] = room
        return node_id

    def replace_device(self, node_id: str, device: str) -> None:
        old = self.nodes[node_id]
        self.nodes[node_id] = Node(node_id, device, old.level)

    def children(self, node_id: str) -> list[str]:
        return self._children.get(node_id, [])

    @property
    def root(self) -> str | None:
        roots = [n for n in self.nodes if n not in self.parent]
        return roots[0] if len(roots) == 1 else None

    def path_to_root(self, node_id: str) -> list[str]:
        path = [node_id]
        seen = {node_id}
        while path[-1] in self.parent:
            nxt = self.parent[path[-1]]
            if nxt in seen:
                break
            seen.add(nxt)
            path.append(nxt)
        return path

    def leaves(self, levels: int) -> list[str]:
        return [n for n, node in self.nodes.items() if node.level == levels]

    def signals_on(self, leaf: str) -> list[str]:
        return [a for a, v in self.connections.items() if v == leaf]

    def copy(self) -> Architecture:
        return Architecture(
            dict(self.nodes), dict(self.parent), dict(self.connections),
            dict(self.processing), dict(self.rooms),
        )

    def device_multiset(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for node in self.nodes.values():
            counts[node.device] = counts.get(node.device, 0) + 1
        return counts

    def depth(self) -> int:
        return max((n.level for n in self.nodes.values()), default=0)

    def __len__(self) -> int:
        return len(self.nodes)


def total_cost(arch: Architecture, inst: Instance) -> float:
    """Sum of device-type costs over every node of the tree."""
    return math.fsum(inst.get_device(node.device).cost for node in arch.nodes.values())


# --- validation ----------------------------------------------------------

def validate_instance(inst: Instance) -> list[str]:
    issues: list[str] = []

    def dupes(kind: str, ids: Iterable[str]) -> None:
        seen: set[str] = set()
        for i in ids:
            if i in seen:
                issues.append(f"duplicate {kind} id {i!r}")
            seen.add(i)

    dupes("signal type", (t.id for t in inst.signal_types))
    dupes("interface", (f.id for f in inst.interfaces))
    dupes("room", inst.rooms)
    dupes("signal", (s.id for s in inst.signals))
    dupes("device", (d.id for d in inst.devices))

    if inst.levels < 2:
        issues.append("levels must be >= 2")
    for t in inst.signal_types:
        if t.memory < 0 or t.instructions < 0:
            issues.append(f"signal type {t.id!r}: r and w must be non-negative")
    for f in inst.interfaces:
        if not f.cycle_time > 0:
            issues.append(f"interface {f.id!r}: cycle_time must be positive")
    type_ids = {t.id for t in inst.signal_types}
    iface_ids = {f.id for f in inst.interfaces}
    rooms = set(inst.rooms)
    for s in inst.signals:
        if s.type not in type_ids:
            issues.append(f"signal {s.id!r}: undeclared signal type {s.type!r}")
        if s.room not in rooms:
            issues.append(f"signal {s.id!r}: undeclared room {s.room!r}")
    for d in inst.devices:
        if d.role not in ROLES:
            issues.append(f"device {d.id!r}: role must be one of {ROLES}")
        if d.cost < 0:
            issues.append(f"device {d.id!r}: cost must be non-negative")
        if d.memory is not None and d.memory < 0:
            issues.append(f"device {d.id!r}: memory must be non-negative")
        if not 0.0 <= d.failure_prob <= 1.0:
            issues.append(f"device {d.id!r}: failure probability outside [0, 1]")
        if d.instr_time < 0 or d.delay < 0:
            issues.append(f"device {d.id!r}: timings must be non-negative")
        if d.upper_interface not in iface_ids:
            issues.append(f"device {d.id!r}: undeclared upper interface {d.upper_interface!r}")
        if set(d.child_capacity) != iface_ids:
            issues.append(f"device {d.id!r}: child capacity must cover every interface exactly once")
        if set(d.channel_capacity) != type_ids:
            issues.append(f"device {d.id!r}: channel capacity must cover every signal type exactly once")
        if any(c < 0 for c in d.child_capacity.values()) or any(c < 0 for c in d.channel_capacity.values()):
            issues.append(f"device {d.id!r}: capacities must be non-negative")
    if not any(d.role == PROCESSOR for d in inst.devices):
        issues.append("no processor available")
    if inst.scan_deadline is not None and not inst.scan_deadline > 0:
        issues.append("scan deadline must be positive")
    if not 0.0 <= inst.min_availability <= 1.0:
        issues.append("min availability outside [0, 1]")
    return issues


# --- instance (de)serialization -----------------------------------------

def _req(obj: Mapping[str, Any], key: str, where: str) -> Any:
    if not isinstance(obj, Mapping):
        raise ParseError("expected an object", where)
    if key not in obj:
        raise ParseError(f"missing required key {key!r}", where)
    return obj[key]


def _num(value: Any, where: str, *, allow_none: bool = False) -> float | None:
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"expected a number, got {value!r}", where)
    return float(value)


def _list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise ParseError("expected a list", where)
    return value


def _unique(kind: str, ids: Iterable[str]) -> set[str]:
    seen: set[str] = set()
    for i in ids:
        if i in seen:
            raise DuplicateIdError(kind, i)
        seen.add(i)
    return seen


def _parse_document(document: str | bytes | Mapping[str, Any]) -> Mapping[str, Any]:
    if isinstance(document, Mapping):
        return document
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", "$")
    return doc


def load_instance(document: str | bytes | Mapping[str, Any]) -> Instance:
    """Build an :class:`Instance` from its JSON document (text or decoded mapping).

    Optional device fields default to P=0, delay=0, T=0 and unbounded memory;
    missing capacity entries count as 0.  The scan deadline defaults to
    unbounded and the availability floor to 0.
    """
    doc = _parse_document(document)

    levels = _req(doc, "levels", "$")
    if isinstance(levels, bool) or not isinstance(levels, int):
        raise ParseError("levels must be an integer", "$.levels")

    interfaces = []
    for i, f in enumerate(_list(_req(doc, "interfaces", "$"), "$.interfaces")):
        where = f"$.interfaces[{i}]"
        interfaces.append(InterfaceSpec(
            str(_req(f, "id", where)), str(f.get("name", f["id"])),
            _num(_req(f, "cycle_time_ms", where), where + ".cycle_time_ms"),
        ))
    iface_ids = _unique("interface", (f.id for f in interfaces))

    signal_types = []
    for i, t in enumerate(_list(_req(doc, "signal_types", "$"), "$.signal_types")):
        where = f"$.signal_types[{i}]"
        signal_types.append(SignalTypeSpec(
            str(_req(t, "id", where)), str(t.get("name", t["id"])),
            _num(t.get("r", 0.0), where + ".r"), _num(t.get("w", 0.0), where + ".w"),
        ))
    type_ids = _unique("signal type", (t.id for t in signal_types))

    rooms = tuple(str(r) for r in _list(_req(doc, "rooms", "$"), "$.rooms"))
    room_ids = _unique("room", rooms)

    signals = []
    for i, s in enumerate(_list(_req(doc, "signals", "$"), "$.signals")):
        where = f"$.signals[{i}]"
        sig = Signal(str(_req(s, "id", where)), str(_req(s, "type", where)), str(_req(s, "room", where)))
        if sig.type not in type_ids:
            raise DanglingReferenceError("signal type", sig.type, where)
        if sig.room not in room_ids:
            raise DanglingReferenceError("room", sig.room, where)
        signals.append(sig)
    _unique("signal", (s.id for s in signals))

    devices = []
    for i, d in enumerate(_list(_req(doc, "devices", "$"), "$.devices")):
        where = f"$.devices[{i}]"
        dev_id = str(_req(d, "id", where))
        role = _req(d, "role", where)
        if role not in ROLES:
            raise ParseError(f"role must be one of {ROLES}, got {role!r}", where + ".role")
        upper = str(_req(d, "upper_interface", where))
        if upper not in iface_ids:
            raise DanglingReferenceError("interface", upper, where + ".upper_interface")
        child_cap = {f: 0 for f in iface_ids}
        for f, n in dict(d.get("child_capacity", {})).items():
            if f not in iface_ids:
                raise DanglingReferenceError("interface", f, where + ".child_capacity")
            child_cap[f] = int(_num(n, f"{where}.child_capacity.{f}"))
        chan_cap = {t: 0 for t in type_ids}
        for t, n in dict(d.get("channel_capacity", {})).items():
            if t not in type_ids:
                raise DanglingReferenceError("signal type", t, where + ".channel_capacity")
            chan_cap[t] = int(_num(n, f"{where}.channel_capacity.{t}"))
        # keep declaration order of interfaces / types
        child_cap = {f.id: child_cap[f.id] for f in interfaces}
        chan_cap = {t.id: chan_cap[t.id] for t in signal_types}
        devices.append(DeviceTypeSpec(
            id=dev_id,
            name=str(d.get("name", dev_id)),
            cost=_num(_req(d, "cost", where), where + ".cost"),
            role=role,
            upper_interface=upper,
            child_capacity=child_cap,
            channel_capacity=chan_cap,
            memory=_num(d.get("memory"), where + ".memory", allow_none=True),
            failure_prob=_num(d.get("failure_prob", 0.0), where + ".failure_prob"),
            instr_time=_num(d.get("instr_time", 0.0), where + ".instr_time"),
            delay=_num(d.get("delay", 0.0), where + ".delay"),
        ))
    _unique("device", (d.id for d in devices))

    return Instance(
        signal_types=tuple(signal_types),
        interfaces=tuple(interfaces),
        rooms=rooms,
        signals=tuple(signals),
        devices=tuple(devices),
        levels=levels,
        scan_deadline=_num(doc.get("scan_deadline_ms"), "$.scan_deadline_ms", allow_none=True),
        min_availability=_num(doc.get("min_availability", 0.0), "$.min_availability"),
    )


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "levels": inst.levels,
        "interfaces": [{"id": f.id, "name": f.name, "cycle_time_ms": f.cycle_time} for f in inst.interfaces],
        "signal_types": [{"id": t.id, "name": t.name, "r": t.memory, "w": t.instructions} for t in inst.signal_types],
        "rooms": list(inst.rooms),
        "signals": [{"id": s.id, "type": s.type, "room": s.room} for s in inst.signals],
        "devices": [
            {
                "id": d.id, "name": d.name, "cost": d.cost, "role": d.role,
                "memory": d.memory, "failure_prob": d.failure_prob,
                "instr_time": d.instr_time, "delay": d.delay,
                "upper_interface": d.upper_interface,
                "child_capacity": dict(d.child_capacity),
                "channel_capacity": dict(d.channel_capacity),
            }
            for d in inst.devices
        ],
    }
    if inst.scan_deadline is not None:
        doc["scan_deadline_ms"] = inst.scan_deadline
    if inst.min_availability:
        doc["min_availability"] = inst.min_availability
    return doc


def dump_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2)


def read_instance(path: str | Path) -> Instance:
    return load_instance(Path(path).read_text(encoding="utf-8"))


def bundled_instance(name: str) -> Instance:
    """Load one of the instances shipped with the package (``t1`` or ``case_study``)."""
    text = resources.files("pcsarch.data").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return load_instance(text)


# --- architecture (de)serialization -------------------------------------

def architecture_to_dict(arch: Architecture, inst: Instance | None = None) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "nodes": [
            {
                "id": n.id, "device": n.device, "level": n.level,
                "parent": arch.parent.get(n.id), "room": arch.rooms.get(n.id),
            }
            for n in arch.nodes.values()
        ],
        "connections": dict(arch.connections),
        "processing": dict(arch.processing),
    }
    if inst is not None:
        doc["cost"] = total_cost(arch, inst)
    return doc


def dump_architecture(arch: Architecture, inst: Instance | None = None) -> str:
    return json.dumps(architecture_to_dict(arch, inst), indent=2)


def load_architecture(document: str | bytes | Mapping[str, Any]) -> Architecture:
    doc = _parse_document(document)
    arch = Architecture()
    nodes = _list(_req(doc, "nodes", "$"), "$.nodes")
    for i, n in enumerate(nodes):
        where = f"$.nodes[{i}]"
        level = _req(n, "level", where)
        if isinstance(level, bool) or not isinstance(level, int):
            raise ParseError("level must be an integer", where + ".level")
        arch.add_node(str(_req(n, "device", where)), level, node_id=str(_req(n, "id", where)))
    for i, n in enumerate(nodes):
        par = n.get("parent")
        if par is None:
            continue
        if par not in arch.nodes:
            raise DanglingReferenceError("node", str(par), f"$.nodes[{i}].parent")
        arch.parent[str(n["id"])] = str(par)
        arch.rooms[str(n["id"])] = n.get("room")
    arch.__post_init__()
    for key, attr in (("connections", "connections"), ("processing", "processing")):
        mapping = doc.get(key, {})
        if not isinstance(mapping, Mapping):
            raise ParseError("expected an object", f"$.{key}")
        for sig, node in mapping.items():
            if node not in arch.nodes:
                raise DanglingReferenceError("node", str(node), f"$.{key}.{sig}")
            getattr(arch, attr)[str(sig)] = str(node)
    return arch


def read_architecture(path: str | Path) -> Architecture:
    return load_architecture(Path(path).read_text(encoding="utf-8"))
