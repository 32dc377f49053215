"""Analytic accuracy as every response spread is scaled up or down.

Shows how far the Gaussian spreads would have to shrink for a circuit to
reach a target accuracy, e.g. the full adder's published figure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

from pfgsim.analysis import analytic_circuit_accuracy, subject_netlist
from pfgsim.signal import DEFAULT_RESPONSE


@dataclass
class Config:
    subjects: tuple[str, ...] = ("OR", "AND", "XOR", "half_adder", "full_adder", "decoder_2to4")
    scale_lo: float = 0.25
    scale_hi: float = 1.5
    steps: int = 26


def sweep(cfg: Config):
    netlists = {s: subject_netlist(s) for s in cfg.subjects}
    for scale in np.linspace(cfg.scale_lo, cfg.scale_hi, cfg.steps):
        model = DEFAULT_RESPONSE.scaled(float(scale))
        yield float(scale), {s: analytic_circuit_accuracy(n, model).overall for s, n in netlists.items()}


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description="accuracy versus response-spread scale")
    p.add_argument("--lo", type=float, default=Config.scale_lo)
    p.add_argument("--hi", type=float, default=Config.scale_hi)
    p.add_argument("--steps", type=int, default=Config.steps)
    a = p.parse_args(argv)
    cfg = Config(scale_lo=a.lo, scale_hi=a.hi, steps=a.steps)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["std_scale", *cfg.subjects])
    for scale, acc in sweep(cfg):
        w.writerow([f"{scale:.3f}", *(f"{acc[s]:.6f}" for s in cfg.subjects)])


if __name__ == "__main__":
    main()
