"""Accuracy and error rate against the number of PFGs a circuit uses.

Emits one CSV row per subject, shaped for an x = PFG count, y = error rate
plot. Subjects are the single gates plus every builtin circuit.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

from pfgsim.analysis import analytic_circuit_accuracy, subject_netlist
from pfgsim.circuits import BUILTIN_NAMES
from pfgsim.signal import DEFAULT_RESPONSE


@dataclass
class Config:
    subjects: tuple[str, ...] = ("OR", "AND", "XOR", "NOT", *BUILTIN_NAMES)
    std_scale: float = 1.0


def rows(cfg: Config):
    model = DEFAULT_RESPONSE.scaled(cfg.std_scale)
    out = []
    for subject in cfg.subjects:
        rep = analytic_circuit_accuracy(subject_netlist(subject), model)
        out.append((subject, rep.pfg_count, rep.overall, 1.0 - rep.overall))
    return sorted(out, key=lambda r: (r[1], r[0]))


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description="accuracy versus PFG count")
    p.add_argument("--std-scale", type=float, default=1.0, help="multiply every response std by this")
    cfg = Config(std_scale=p.parse_args(argv).std_scale)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["subject", "pfg_count", "accuracy", "error_rate"])
    for subject, count, acc, err in rows(cfg):
        w.writerow([subject, count, f"{acc:.6f}", f"{err:.6f}"])


if __name__ == "__main__":
    main()
