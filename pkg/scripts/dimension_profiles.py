#!/usr/bin/env python3
"""Centralizer dimension profiles dim C_N(X), N = 1..N_max, for the preset fields."""

import argparse
import time
from dataclasses import dataclass, field
from typing import List

from vfieldlab.linops import MAX_DEGREE, derivative_operator_report, dimension_profile
from vfieldlab.presets import preset


@dataclass
class ProfileConfig:
    presets: List[str] = field(default_factory=lambda: [
        "rotation", "dilation", "example1-x", "example1-y", "vdp", "homogeneous-n2"])
    n_max: int = 6


def run(cfg: ProfileConfig) -> None:
    print(f"{'field':<16} {'dim C_N, N = 1..' + str(cfg.n_max):<28} {'corank L_X, N = 0..3':<22} seconds")
    for name in cfg.presets:
        X = preset(name)
        t0 = time.perf_counter()
        dims = [d for _, d in dimension_profile(X, cfg.n_max)]
        coranks = [derivative_operator_report(X, n).corank for n in range(4)]
        print(f"{name:<16} {str(dims):<28} {str(coranks):<22} {time.perf_counter() - t0:.2f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=6, choices=range(1, MAX_DEGREE + 1), metavar="N")
    ap.add_argument("--preset", action="append", help="repeatable; default: all presets")
    a = ap.parse_args()
    cfg = ProfileConfig(n_max=a.n_max)
    if a.preset:
        cfg.presets = a.preset
    run(cfg)
