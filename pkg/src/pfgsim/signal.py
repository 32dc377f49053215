"""Synthetic surface-potential traces for a single protoplasmic tube.

A trace is a sinusoid at the shuttle-streaming frequency whose frequency steps
at stimulus onset by a percentage drawn from a stimulus-conditioned normal
response model, plus white Gaussian electrode noise.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

# Lowest post-stimulus frequency allowed; keeps the tube oscillating.
MIN_POST_FREQ_HZ = 0.5e-3
PERIOD_BAND_S = (60.0, 200.0)
RECORDER_RANGE_MV = 39.0
DEFAULT_WINDOW_S = 600.0


class InvalidDuration(ValueError):
    pass


class StimulusPattern(NamedTuple):
    """Which stimuli are applied: heat drives input A, oat flake input B."""

    heat: bool
    oat: bool

    @property
    def key(self) -> str:
        return f"{int(self.heat)}{int(self.oat)}"

    @classmethod
    def from_key(cls, key: str) -> "StimulusPattern":
        if len(key) != 2 or any(c not in "01" for c in key):
            raise ValueError(f"pattern key must be two bits, got {key!r}")
        return cls(key[0] == "1", key[1] == "1")

    @classmethod
    def all(cls) -> tuple["StimulusPattern", ...]:
        return tuple(cls(h, o) for h in (False, True) for o in (False, True))

    def label(self) -> str:
        if self.heat and self.oat:
            return "heat+oat"
        if self.heat:
            return "heat"
        if self.oat:
            return "oat"
        return "none"

    @classmethod
    def from_label(cls, label: str) -> "StimulusPattern":
        parts = {p for p in label.lower().replace(" ", "").split("+") if p}
        if parts == {"none"}:
            return cls(False, False)
        unknown = parts - {"heat", "oat"}
        if unknown or not parts:
            raise ValueError(f"unknown stimulus pattern {label!r}")
        return cls("heat" in parts, "oat" in parts)


NO_STIMULUS = StimulusPattern(False, False)


@dataclass(frozen=True)
class PatternResponse:
    mean_pct: float
    std_pct: float

    def __post_init__(self):
        if not self.std_pct >= 0:
            raise ValueError(f"std_pct must be >= 0, got {self.std_pct}")


def _table1() -> dict[StimulusPattern, PatternResponse]:
    return {
        StimulusPattern(False, False): PatternResponse(2.1, 6.9),
        StimulusPattern(False, True): PatternResponse(12.2, 12.6),
        StimulusPattern(True, False): PatternResponse(19.8, 8.8),
        StimulusPattern(True, True): PatternResponse(33.2, 9.6),
    }


@dataclass(frozen=True)
class ResponseModel:
    """Normal distribution of percent frequency change for each stimulus pattern.

    Defaults are the measured median/standard deviation per stimulus; the
    median is used as the mean of the normal.
    """

    patterns: dict[StimulusPattern, PatternResponse] = field(default_factory=_table1)

    def __post_init__(self):
        missing = set(StimulusPattern.all()) - set(self.patterns)
        if missing:
            raise ValueError(f"response model missing patterns {sorted(p.key for p in missing)}")

    def __getitem__(self, pattern: StimulusPattern) -> PatternResponse:
        return self.patterns[StimulusPattern(bool(pattern[0]), bool(pattern[1]))]

    def scaled(self, std_scale: float) -> "ResponseModel":
        """Copy with every std multiplied by ``std_scale`` (0 gives ideal gates)."""
        return ResponseModel(
            {p: PatternResponse(r.mean_pct, r.std_pct * std_scale) for p, r in self.patterns.items()}
        )

    def to_dict(self) -> dict:
        return {
            "patterns": {
                p.key: {"mean_pct": self[p].mean_pct, "std_pct": self[p].std_pct}
                for p in StimulusPattern.all()
            }
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ResponseModel":
        patterns = {}
        for key, entry in data["patterns"].items():
            patterns[StimulusPattern.from_key(key)] = PatternResponse(
                float(entry["mean_pct"]), float(entry["std_pct"])
            )
        return cls(patterns)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def load(cls, path: str | Path) -> "ResponseModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


DEFAULT_RESPONSE = ResponseModel()


@dataclass(frozen=True)
class OscillationModel:
    base_period_s: float = 100.0
    amplitude_mv: float = 5.0
    noise_std_mv: float = 0.0
    dc_offset_mv: float = 0.0
    sample_rate_hz: float = 1.0

    def __post_init__(self):
        if self.base_period_s <= 0:
            raise ValueError("base_period_s must be positive")
        if self.amplitude_mv <= 0:
            raise ValueError("amplitude_mv must be positive")
        if self.noise_std_mv < 0:
            raise ValueError("noise_std_mv must be >= 0")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        lo, hi = PERIOD_BAND_S
        if not lo <= self.base_period_s <= hi:
            warnings.warn(
                f"base period {self.base_period_s} s outside the {lo:g}-{hi:g} s shuttle-streaming band",
                stacklevel=3,
            )
        if abs(self.dc_offset_mv) + self.amplitude_mv > RECORDER_RANGE_MV:
            warnings.warn(
                f"trace peak exceeds the +/-{RECORDER_RANGE_MV:g} mV recorder range", stacklevel=3
            )

    @property
    def base_freq_hz(self) -> float:
        return 1.0 / self.base_period_s


@dataclass
class Trace:
    samples_mv: np.ndarray
    sample_rate_hz: float
    stimulus_onset_index: int

    def __post_init__(self):
        self.samples_mv = np.asarray(self.samples_mv, dtype=float)
        n = len(self.samples_mv)
        if not 0 < self.stimulus_onset_index < n:
            raise ValueError(f"stimulus onset index {self.stimulus_onset_index} not inside (0, {n})")

    def __len__(self):
        return len(self.samples_mv)

    @property
    def times_s(self) -> np.ndarray:
        return np.arange(len(self.samples_mv)) / self.sample_rate_hz

    def metadata(self) -> dict:
        return {"sample_rate_hz": self.sample_rate_hz, "stimulus_onset_index": self.stimulus_onset_index}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["time_s", "voltage_mv"])
        for t, v in zip(self.times_s, self.samples_mv):
            writer.writerow([f"{t:.6g}", repr(float(v))])
        return buf.getvalue()

    def save(self, csv_path: str | Path, meta_path: str | Path | None = None) -> Path:
        """Write the CSV and its JSON sidecar (default: ``<csv>.json``)."""
        csv_path = Path(csv_path)
        meta_path = Path(meta_path) if meta_path else sidecar_path(csv_path)
        csv_path.write_text(self.to_csv())
        meta_path.write_text(json.dumps(self.metadata(), sort_keys=True) + "\n")
        return meta_path


def sidecar_path(csv_path: str | Path) -> Path:
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.name + ".json")


def read_trace(
    csv_path: str | Path,
    onset_index: int | None = None,
    sample_rate_hz: float | None = None,
) -> Trace:
    """Load a trace CSV with comma or tab delimiters and an optional header.

    Onset and sample rate come from the arguments when given, else from the
    JSON sidecar, else the sample rate is inferred from the time column.
    """
    csv_path = Path(csv_path)
    text = csv_path.read_text()
    delimiter = "\t" if "\t" in text.splitlines()[0] else ","
    times, volts = [], []
    for lineno, row in enumerate(csv.reader(io.StringIO(text), delimiter=delimiter), start=1):
        if not row or not "".join(row).strip():
            continue
        try:
            cols = [float(c) for c in row]
        except ValueError:
            if lineno == 1:
                continue  # header
            raise ValueError(f"{csv_path}:{lineno}: non-numeric row {row!r}") from None
        if len(cols) == 1:
            times.append(float(len(volts)))
            volts.append(cols[0])
        else:
            times.append(cols[0])
            volts.append(cols[1])
    if len(volts) < 2:
        raise ValueError(f"{csv_path}: fewer than two samples")

    meta = {}
    side = sidecar_path(csv_path)
    if side.exists():
        meta = json.loads(side.read_text())
    if sample_rate_hz is None:
        sample_rate_hz = meta.get("sample_rate_hz")
    if sample_rate_hz is None:
        sample_rate_hz = 1.0 / float(np.median(np.diff(times)))
    if onset_index is None:
        onset_index = meta.get("stimulus_onset_index")
    if onset_index is None:
        raise ValueError(f"{csv_path}: stimulus onset unknown; pass it explicitly or provide {side.name}")
    return Trace(np.array(volts), float(sample_rate_hz), int(onset_index))


def sample_delta_f(pattern: StimulusPattern, model: ResponseModel, rng: np.random.Generator) -> float:
    """Draw a percent frequency change for ``pattern``."""
    r = model[pattern]
    if r.std_pct == 0:
        return r.mean_pct
    return float(rng.normal(r.mean_pct, r.std_pct))


def synthesize_trace(
    osc: OscillationModel,
    delta_f_pct: float,
    pre_duration_s: float = DEFAULT_WINDOW_S,
    post_duration_s: float = DEFAULT_WINDOW_S,
    rng: np.random.Generator | None = None,
) -> Trace:
    """Sinusoid whose frequency steps by ``delta_f_pct`` percent at onset.

    Phase is continuous across the step; the starting phase and the noise both
    come from ``rng``.
    """
    min_s = 2 * osc.base_period_s
    for name, dur in (("pre", pre_duration_s), ("post", post_duration_s)):
        if not dur > 0 or dur < min_s:
            raise InvalidDuration(
                f"{name} window of {dur} s holds fewer than 2 cycles at {osc.base_period_s} s"
            )
    if rng is None:
        rng = np.random.default_rng(0)

    fs = osc.sample_rate_hz
    onset = int(round(pre_duration_s * fs))
    n = onset + int(round(post_duration_s * fs))
    f_pre = osc.base_freq_hz
    f_post = max(f_pre * (1.0 + delta_f_pct / 100.0), MIN_POST_FREQ_HZ)

    t = np.arange(n) / fs
    t_on = onset / fs
    phase0 = rng.uniform(0.0, 2 * math.pi)
    phase = np.where(
        t < t_on,
        2 * math.pi * f_pre * t,
        2 * math.pi * (f_pre * t_on + f_post * (t - t_on)),
    )
    samples = osc.dc_offset_mv + osc.amplitude_mv * np.sin(phase + phase0)
    if osc.noise_std_mv > 0:
        samples = samples + rng.normal(0.0, osc.noise_std_mv, n)
    return Trace(samples, fs, onset)
