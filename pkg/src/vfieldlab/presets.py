"""Named fields for one-flag reproduction of the worked examples."""

from __future__ import annotations

import re
from typing import Callable, Dict

from . import polyalg
from .polyalg import VectorField2

PRESETS: Dict[str, Callable[[], VectorField2]] = {
    "example1-x": polyalg.example1_x,
    "example1-y": polyalg.example1_y,
    "example1-mirror": polyalg.example1_mirror,
    "vdp": polyalg.van_der_pol,
    "dilation": polyalg.dilation,
    "rotation": polyalg.rotation,
}

_HOMOGENEOUS = re.compile(r"homogeneous-n(\d+)$")


def preset_names():
    return sorted(PRESETS) + ["homogeneous-n<k>"]


def preset(name: str) -> VectorField2:
    if name in PRESETS:
        return PRESETS[name]()
    m = _HOMOGENEOUS.match(name)
    if m:
        return polyalg.make_homogeneous_center(int(m.group(1)))
    raise KeyError(f"unknown preset {name!r}; choose from {', '.join(preset_names())}")
