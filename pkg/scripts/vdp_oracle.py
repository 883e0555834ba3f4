#!/usr/bin/env python3
"""Compare the van der Pol cycle found by the adaptive scan with a fixed-step RK4 shooting oracle."""

import argparse
import math
import os
import sys
import time
from dataclasses import dataclass

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))

import oracles  # noqa: E402

from vfieldlab.cycles import find_cycles  # noqa: E402
from vfieldlab.flow import IntegratorConfig  # noqa: E402
from vfieldlab.polyalg import van_der_pol  # noqa: E402


@dataclass
class OracleConfig:
    step: float = 1e-3
    r_min: float = 0.1
    r_max: float = 4.0
    rtol: float = 1e-10
    atol: float = 1e-12
    workers: int = 1


def run(cfg: OracleConfig) -> None:
    t0 = time.perf_counter()
    r, T, amp = oracles.vdp_cycle(cfg.step)
    t_oracle = time.perf_counter() - t0
    t0 = time.perf_counter()
    scan = find_cycles(van_der_pol(), cfg.r_min, cfg.r_max, IntegratorConfig(cfg.rtol, cfg.atol),
                       workers=cfg.workers)
    t_scan = time.perf_counter() - t0
    print(f"oracle (RK4, h={cfg.step:g}): section radius {r:.12f}  period {T:.12f}  x-amplitude {amp:.12f}"
          f"  [{t_oracle:.1f} s]")
    for c in scan.cycles:
        amp_s = max(abs(p[0]) for p in c.samples)
        print(f"scan: section radius {c.radius:.12f}  period {c.period:.12f}  x-amplitude (256 samples) "
              f"{amp_s:.12f}  multiplier {c.multiplier:.6g} ({c.stability})  [{t_scan:.1f} s]")
        print(f"differences: radius {abs(c.radius - r):.2e}  period {abs(c.period - T):.2e}  "
              f"log multiplier {math.log(c.multiplier):.6f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=1e-3)
    ap.add_argument("--workers", type=int, default=1)
    a = ap.parse_args()
    run(OracleConfig(step=a.step, workers=a.workers))
