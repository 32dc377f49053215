"""Write the published-vs-model accuracy comparison as CSV.

    python3 scripts/published_comparison.py --trials 100000 --seed 0 --out comparison.csv
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from pfgsim.analysis import comparison_csv, comparison_report
from pfgsim.signal import DEFAULT_RESPONSE, ResponseModel


@dataclass
class Config:
    trials: int = 100_000
    seed: int = 0
    workers: int = 1
    response_model: Path | None = None
    out: Path | None = None


def run(cfg: Config) -> str:
    model = ResponseModel.load(cfg.response_model) if cfg.response_model else DEFAULT_RESPONSE
    return comparison_csv(comparison_report(model, cfg.trials, cfg.seed, cfg.workers))


def parse_args(argv=None) -> Config:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=Config.trials)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--workers", type=int, default=Config.workers)
    p.add_argument("--response-model", type=Path)
    p.add_argument("--out", type=Path)
    return Config(**vars(p.parse_args(argv)))


if __name__ == "__main__":
    cfg = parse_args()
    text = run(cfg)
    if cfg.out:
        cfg.out.write_text(text)
    else:
        sys.stdout.write(text)
