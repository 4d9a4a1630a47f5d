"""Synthesis of minimum-cost hierarchical control-system hardware architectures."""

from .domain import (
    Architecture,
    DeviceTypeSpec,
    Instance,
    InterfaceSpec,
    Signal,
    SignalTypeSpec,
    bundled_instance,
    load_instance,
    total_cost,
    validate_instance,
)
from .feasibility import check

__all__ = [
    "Architecture",
    "DeviceTypeSpec",
    "Instance",
    "InterfaceSpec",
    "Signal",
    "SignalTypeSpec",
    "bundled_instance",
    "check",
    "load_instance",
    "total_cost",
    "validate_instance",
]
