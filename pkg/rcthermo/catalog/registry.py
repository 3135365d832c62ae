#!/usr/bin/env python3
from __future__ import annotations

from typing import Dict, List, Type

from ..errors import UnknownFamily
from .base import BaseFamily
from .fermionic import (
    BoxFamily,
    FlatFamily,
    GaussianFamily,
    LorentzianFamily,
    LorentzianSquaredFamily,
    ParabolicFamily,
    SemicircleFamily,
)
from .phonon import LinearRigidFamily, RubinFamily, SoftCubicFamily, SoftLinearFamily


FAMILY_CLASSES: Dict[str, Type[BaseFamily]] = {
    "soft_linear": SoftLinearFamily,
    "soft_cubic": SoftCubicFamily,
    "linear_rigid": LinearRigidFamily,
    "rubin": RubinFamily,
    "lorentzian": LorentzianFamily,
    "lorentzian_sq": LorentzianSquaredFamily,
    "gaussian": GaussianFamily,
    "box": BoxFamily,
    "parabolic": ParabolicFamily,
    "semicircle": SemicircleFamily,
    "flat": FlatFamily,
}

# Rows that carry a full closed-form mapping; "flat" only describes a residual.
TABLE_FAMILIES = tuple(name for name in FAMILY_CLASSES if name != "flat")


def create_family(name: str) -> BaseFamily:
    family_cls = FAMILY_CLASSES.get(name)
    if family_cls is None:
        known = ", ".join(sorted(FAMILY_CLASSES))
        raise UnknownFamily(f"unknown family '{name}' (known: {known})")
    return family_cls()


def lookup(name: str) -> BaseFamily:
    return create_family(name)


def list_families() -> List[BaseFamily]:
    return [create_family(name) for name in sorted(FAMILY_CLASSES)]
