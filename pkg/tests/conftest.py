import pytest

from pcsarch.constructor import construct
from pcsarch.domain import Architecture, Instance, Signal, bundled_instance


@pytest.fixture(scope="session")
def t1() -> Instance:
    return bundled_instance("t1")


@pytest.fixture(scope="session")
def case_study() -> Instance:
    return bundled_instance("case_study")


def t1_signals(n: int) -> list[Signal]:
    return [Signal(f"x{k:02d}", "AI", "H1") for k in range(n)]


def t1_tree(inst: Instance, loads: list[tuple[str, int]]) -> Architecture:
    """P1 root with one leaf per (device, signal count), signals taken in declaration order."""
    arch = Architecture()
    root = arch.add_node("P1", 1)
    sigs = iter(inst.signals)
    for device, count in loads:
        leaf = arch.add_node(device, 2, root, "H1")
        for _ in range(count):
            s = next(sigs)
            arch.connections[s.id] = leaf
            arch.processing[s.id] = root
    return arch


@pytest.fixture
def t1_optimum(t1) -> Architecture:
    return t1_tree(t1, [("IO8", 8), ("IO4", 2)])


def complete(inst, sel, seed=0):
    out = construct(inst, sel, seed)
    assert out.complete, out.dead_end_reason
    return out.architecture
