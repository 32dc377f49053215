"""Frequency-threshold logic gates.

A gate is one tube: its two logic inputs select which stimuli are applied, the
tube's percent frequency change is measured (or sampled), and a threshold rule
turns that change into the output bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .signal import (
    DEFAULT_RESPONSE,
    OscillationModel,
    ResponseModel,
    StimulusPattern,
    sample_delta_f,
    synthesize_trace,
)
from .spectral import SpectralConfig, compute_delta_f


class GateKind(enum.Enum):
    OR = "OR"
    AND = "AND"
    NOT = "NOT"
    NOR = "NOR"
    NAND = "NAND"
    XOR = "XOR"
    XNOR = "XNOR"

    @property
    def arity(self) -> int:
        return 1 if self is GateKind.NOT else 2

    @classmethod
    def parse(cls, name: str) -> "GateKind":
        return cls(name.upper())

    def logic(self, a: int, b: int = 0) -> int:
        """Ideal Boolean function."""
        return _LOGIC[self](int(a), int(b))


_LOGIC = {
    GateKind.OR: lambda a, b: a | b,
    GateKind.AND: lambda a, b: a & b,
    GateKind.NOT: lambda a, b: 1 - a,
    GateKind.NOR: lambda a, b: 1 - (a | b),
    GateKind.NAND: lambda a, b: 1 - (a & b),
    GateKind.XOR: lambda a, b: a ^ b,
    GateKind.XNOR: lambda a, b: 1 - (a ^ b),
}


@dataclass(frozen=True)
class ThresholdRule:
    """Single cut point or inclusive band on the percent frequency change.

    single: output 1 when ``delta >= threshold_pct`` if ``high_when_above``,
    else when ``delta < threshold_pct``.
    band: output 1 when ``lo_pct <= delta <= hi_pct`` if ``one_inside``,
    else outside it.
    """

    shape: str
    threshold_pct: float | None = None
    high_when_above: bool = True
    lo_pct: float | None = None
    hi_pct: float | None = None
    one_inside: bool = True

    def __post_init__(self):
        if self.shape == "single":
            if self.threshold_pct is None:
                raise ValueError("single rule needs threshold_pct")
        elif self.shape == "band":
            if self.lo_pct is None or self.hi_pct is None or not self.lo_pct < self.hi_pct:
                raise ValueError("band rule needs lo_pct < hi_pct")
        else:
            raise ValueError(f"unknown rule shape {self.shape!r}")

    @classmethod
    def single(cls, threshold_pct: float, high_when_above: bool = True) -> "ThresholdRule":
        return cls("single", threshold_pct=threshold_pct, high_when_above=high_when_above)

    @classmethod
    def band(cls, lo_pct: float, hi_pct: float, one_inside: bool = True) -> "ThresholdRule":
        return cls("band", lo_pct=lo_pct, hi_pct=hi_pct, one_inside=one_inside)

    def complement(self) -> "ThresholdRule":
        if self.shape == "single":
            return ThresholdRule.single(self.threshold_pct, not self.high_when_above)
        return ThresholdRule.band(self.lo_pct, self.hi_pct, not self.one_inside)


OR_THRESHOLD_PCT = 10.0
AND_THRESHOLD_PCT = 24.0
XOR_BAND_PCT = (4.9, 32.0)

_RULES = {
    GateKind.OR: ThresholdRule.single(OR_THRESHOLD_PCT),
    GateKind.AND: ThresholdRule.single(AND_THRESHOLD_PCT),
    GateKind.XOR: ThresholdRule.band(*XOR_BAND_PCT),
    GateKind.NOT: ThresholdRule.single(OR_THRESHOLD_PCT, high_when_above=False),
}
_RULES[GateKind.NOR] = _RULES[GateKind.OR].complement()
_RULES[GateKind.NAND] = _RULES[GateKind.AND].complement()
_RULES[GateKind.XNOR] = _RULES[GateKind.XOR].complement()


def threshold_rule_for(kind: GateKind) -> ThresholdRule:
    return _RULES[GateKind(kind)]


def classify(delta_f_pct, rule: ThresholdRule):
    """Output bit for a frequency change; vectorises over numpy arrays."""
    d = np.asarray(delta_f_pct, dtype=float)
    if rule.shape == "single":
        out = (d >= rule.threshold_pct) == rule.high_when_above
    else:
        out = ((d >= rule.lo_pct) & (d <= rule.hi_pct)) == rule.one_inside
    if out.ndim == 0:
        return int(out)
    return out.astype(np.int8)


@dataclass(frozen=True)
class GateSpec:
    kind: GateKind
    invert_a: bool = False
    invert_b: bool = False
    rule: ThresholdRule | None = None  # overrides the canonical rule for ``kind``

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        if self.kind is GateKind.NOT and self.invert_b:
            raise ValueError("NOT gates have no B input to invert")

    @property
    def threshold_rule(self) -> ThresholdRule:
        return self.rule if self.rule is not None else threshold_rule_for(self.kind)

    def ideal(self, a: int, b: int = 0) -> int:
        return self.kind.logic(int(a) ^ self.invert_a, int(b) ^ self.invert_b)


def stimuli_for_inputs(a: int, b: int, invert_a: bool = False, invert_b: bool = False) -> StimulusPattern:
    """Heat carries input A, oat flake input B; an inverted input is stimulated on 0."""
    return StimulusPattern(bool(int(a) ^ invert_a), bool(int(b) ^ invert_b))


def gate_stimulus(spec: GateSpec, a: int, b: int = 0) -> StimulusPattern:
    if spec.kind is GateKind.NOT:
        if b:
            raise ValueError("NOT gates take input A only; B must be 0")
        return stimuli_for_inputs(a, 0, spec.invert_a, False)
    return stimuli_for_inputs(a, b, spec.invert_a, spec.invert_b)


def measured_delta_f(
    pattern: StimulusPattern,
    model: ResponseModel,
    rng: np.random.Generator,
    osc: OscillationModel | None = None,
    cfg: SpectralConfig | None = None,
) -> float:
    """Draw a frequency change, then recover it from a synthesized trace."""
    delta = sample_delta_f(pattern, model, rng)
    trace = synthesize_trace(osc or OscillationModel(), delta, rng=rng)
    return compute_delta_f(trace, cfg or SpectralConfig())


def evaluate_gate(
    spec: GateSpec,
    a: int,
    b: int = 0,
    model: ResponseModel = DEFAULT_RESPONSE,
    rng: np.random.Generator | None = None,
    mode: str = "sampled",
    osc: OscillationModel | None = None,
    cfg: SpectralConfig | None = None,
) -> int:
    """One noisy gate evaluation.

    ``mode="measured"`` routes the sampled change through trace synthesis and
    spectral recovery instead of classifying the draw directly.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    pattern = gate_stimulus(spec, a, b)
    if mode == "sampled":
        delta = sample_delta_f(pattern, model, rng)
    elif mode == "measured":
        delta = measured_delta_f(pattern, model, rng, osc, cfg)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return classify(delta, spec.threshold_rule)
