"""Gate and circuit accuracy, exactly and by Monte Carlo.

The exact engine walks the gates in topological order carrying a distribution
over the values of wires that are still read downstream. Each gate branches
on its output bit with the probability that the normal response for its
realized stimulus pattern falls on that side of its threshold rule. A wire
leaves the state after its last gate reader; if it is a circuit output, only
the branch carrying its ideal value survives, since the engine computes the
probability that every output is correct.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .circuits import Netlist, builtin, gate_netlist, gate_rng, simulate_batch
from .gates import GateKind, GateSpec, ThresholdRule, classify, gate_stimulus
from .signal import DEFAULT_RESPONSE, ResponseModel

MAX_ENUMERATION_GATES = 24
MC_BLOCK_SIZE = 8192

# Published accuracy (%) and tube count per subject.
PUBLISHED_ACCURACY = {
    "OR": (90.0, 1),
    "AND": (77.8, 1),
    "NOT": (91.7, 1),
    "XOR": (70.8, 1),
    "half_adder": (65.0, 2),
    "full_adder": (58.8, 5),
    "decoder_2to4": (57.5, 4),
}
# NOT's stimulus and threshold are not given alongside the other gates
REFERENCE_ONLY = frozenset({"NOT"})


class NonPositiveStd(ValueError):
    pass


class TooManyGates(ValueError):
    pass


def normal_cdf(x: float, mean: float = 0.0, std: float = 1.0) -> float:
    if not std > 0:
        raise NonPositiveStd(f"std must be positive, got {std}")
    return 0.5 * math.erfc(-(x - mean) / (std * math.sqrt(2.0)))


def _normal_sf(x: float, mean: float, std: float) -> float:
    return 0.5 * math.erfc((x - mean) / (std * math.sqrt(2.0)))


def _region_probability(rule: ThresholdRule, mean: float, std: float) -> float:
    """P(delta >= threshold) for single rules, P(lo <= delta <= hi) for bands."""
    if rule.shape == "single":
        return _normal_sf(rule.threshold_pct, mean, std)
    return normal_cdf(rule.hi_pct, mean, std) - normal_cdf(rule.lo_pct, mean, std)


def output_probability(rule: ThresholdRule, bit: int, mean: float, std: float) -> float:
    """Probability that ``rule`` outputs ``bit`` for a Normal(mean, std) change.

    Written so a rule and its complement give bit-identical results for
    opposite bits.
    """
    if std == 0:
        return float(classify(mean, rule) == bit)
    if std < 0:
        raise NonPositiveStd(f"std must be >= 0, got {std}")
    polarity = rule.high_when_above if rule.shape == "single" else rule.one_inside
    region = _region_probability(rule, mean, std)
    return region if polarity == bool(bit) else 1.0 - region


def classification_probability(rule: ThresholdRule, pattern_mean: float, pattern_std: float) -> float:
    """Probability of output 1."""
    return output_probability(rule, 1, pattern_mean, pattern_std)


@dataclass
class AccuracyReport:
    subject: str
    per_input: dict[tuple[int, ...], float]
    method: str
    overall: float = field(init=False)
    trials: int | None = None
    std_error: float | None = None
    pfg_count: int | None = None

    def __post_init__(self):
        self.overall = float(np.mean(list(self.per_input.values())))
        if self.method == "monte_carlo" and self.trials:
            self.std_error = math.sqrt(self.overall * (1.0 - self.overall) / self.trials)

    def weighted_overall(self, weights: Mapping[tuple[int, ...], float]) -> float:
        total = sum(weights.values())
        return sum(self.per_input[k] * w for k, w in weights.items()) / total

    def to_dict(self) -> dict:
        d = {
            "subject": self.subject,
            "method": self.method,
            "overall": self.overall,
            "per_input": {"".join(map(str, k)): v for k, v in self.per_input.items()},
        }
        if self.pfg_count is not None:
            d["pfg_count"] = self.pfg_count
        if self.method == "monte_carlo":
            d["trials"] = self.trials
            d["std_error"] = self.std_error
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["subject", "method", "inputs", "p_correct"])
        for k, v in self.per_input.items():
            w.writerow([self.subject, self.method, "".join(map(str, k)), repr(v)])
        w.writerow([self.subject, self.method, "overall", repr(self.overall)])
        return buf.getvalue()


def analytic_gate_accuracy(spec: GateSpec | GateKind, model: ResponseModel = DEFAULT_RESPONSE) -> AccuracyReport:
    if not isinstance(spec, GateSpec):
        spec = GateSpec(GateKind(spec))
    combos = [(0,), (1,)] if spec.kind is GateKind.NOT else [(a, b) for a in (0, 1) for b in (0, 1)]
    per_input = {}
    for x in combos:
        r = model[gate_stimulus(spec, *x)]
        per_input[x] = output_probability(spec.threshold_rule, spec.ideal(*x), r.mean_pct, r.std_pct)
    return AccuracyReport(spec.kind.value, per_input, "analytic", pfg_count=1)


def _enumerate_correct(n: Netlist, bits: tuple[int, ...], model: ResponseModel, cache: dict) -> float:
    inputs = n._bind(bits)
    ideal_wires = dict(inputs)
    for g in n.gates:
        ideal_wires[g.gate_id] = g.spec.ideal(*(ideal_wires[s.name] for s in g.sources))
    must_match = {r.name: ideal_wires[r.name] for _, r in n.outputs}
    last_read = {}
    for i, g in enumerate(n.gates):
        for s in g.sources:
            last_read[s.name] = i

    # state: tuple of (wire, value) for gate outputs still read downstream
    states: dict[tuple, float] = {(): 1.0}
    for i, g in enumerate(n.gates):
        spec = g.spec
        rule = spec.threshold_rule
        dead = {s.name for s in g.sources if last_read[s.name] == i}
        dead_outputs = [w for w in dead if w in must_match and w not in inputs]
        keep = last_read.get(g.gate_id, -1) > i
        nxt: dict[tuple, float] = defaultdict(float)
        for state, p in states.items():
            vals = dict(state)
            srcs = [vals[s.name] if s.name in vals else inputs[s.name] for s in g.sources]
            if any(vals[w] != must_match[w] for w in dead_outputs):
                # an output wire is leaving the state with the wrong value
                continue
            pattern = gate_stimulus(spec, *srcs)
            key = (g.gate_id, pattern)
            if key not in cache:
                r = model[pattern]
                cache[key] = tuple(output_probability(rule, bit, r.mean_pct, r.std_pct) for bit in (0, 1))
            base = tuple(kv for kv in state if kv[0] not in dead)
            for out, q in enumerate(cache[key]):
                if q == 0.0:
                    continue
                if keep:
                    nxt[base + ((g.gate_id, out),)] += p * q
                elif must_match.get(g.gate_id, out) == out:
                    # no gate reads this wire again: only the correct branch can count
                    nxt[base] += p * q
        states = nxt
    return sum(states.values())


def analytic_circuit_accuracy(n: Netlist, model: ResponseModel = DEFAULT_RESPONSE) -> AccuracyReport:
    """Exact probability that every output is correct, per input combination."""
    if n.pfg_count > MAX_ENUMERATION_GATES:
        raise TooManyGates(f"{n.name} has {n.pfg_count} gates; exact enumeration limited to {MAX_ENUMERATION_GATES}")
    cache: dict = {}
    per_input = {x: _enumerate_correct(n, x, model, cache) for x in n.input_combinations()}
    return AccuracyReport(n.name, per_input, "analytic", pfg_count=n.pfg_count)


def _mc_block(n: Netlist, model: ResponseModel, seed: int, combo_index: int, bits, ideal, start: int, size: int) -> int:
    block = start // MC_BLOCK_SIZE
    normals = {g.gate_id: gate_rng(seed, g.gate_id, combo_index, block).standard_normal(size) for g in n.gates}
    outs = simulate_batch(n, bits, model, normals)
    return int(np.count_nonzero(np.all(outs == np.array(ideal, dtype=np.int8), axis=1)))


def monte_carlo_accuracy(
    n: Netlist,
    model: ResponseModel = DEFAULT_RESPONSE,
    trials: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> AccuracyReport:
    """Empirical all-outputs-correct frequency per input combination.

    Trials are split into fixed blocks whose random streams depend only on
    (seed, input combination, block index, gate id), so the report does not
    depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    combos = n.input_combinations()
    jobs = []
    for ci, bits in enumerate(combos):
        ideal = n.logic(bits)
        for start in range(0, trials, MC_BLOCK_SIZE):
            jobs.append((ci, bits, ideal, start, min(MC_BLOCK_SIZE, trials - start)))

    def run(job):
        ci, bits, ideal, start, size = job
        return ci, _mc_block(n, model, seed, ci, bits, ideal, start, size)

    counts = [0] * len(combos)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    for ci, c in results:
        counts[ci] += c
    per_input = {x: counts[i] / trials for i, x in enumerate(combos)}
    return AccuracyReport(n.name, per_input, "monte_carlo", trials=trials, pfg_count=n.pfg_count)


def subject_netlist(subject: str) -> Netlist:
    try:
        return gate_netlist(GateKind.parse(subject))
    except ValueError:
        return builtin(subject)


@dataclass
class ComparisonRow:
    subject: str
    pfg_count: int
    published_pct: float
    analytic: AccuracyReport
    monte_carlo: AccuracyReport | None = None

    @property
    def reference_only(self) -> bool:
        return self.subject in REFERENCE_ONLY

    @property
    def gap_pp(self) -> float:
        return self.analytic.overall * 100 - self.published_pct

    def csv_row(self) -> list[str]:
        mc = self.monte_carlo
        return [
            self.subject,
            str(self.pfg_count),
            f"{self.published_pct:.1f}",
            f"{self.analytic.overall * 100:.4f}",
            f"{mc.overall * 100:.4f}" if mc else "",
            f"{mc.std_error * 100:.4f}" if mc else "",
        ]


COMPARISON_COLUMNS = ["subject", "pfg_count", "paper_pct", "analytic_pct", "mc_pct", "mc_stderr"]


def comparison_report(
    model: ResponseModel = DEFAULT_RESPONSE,
    trials: int = 100_000,
    seed: int = 0,
    workers: int = 1,
    monte_carlo: bool = True,
) -> list[ComparisonRow]:
    rows = []
    for subject, (published_pct, count) in PUBLISHED_ACCURACY.items():
        n = subject_netlist(subject)
        assert n.pfg_count == count, (subject, n.pfg_count)
        if n.pfg_count == 1:
            analytic = analytic_gate_accuracy(n.gates[0].spec, model)
        else:
            analytic = analytic_circuit_accuracy(n, model)
        analytic.subject = subject
        mc = None
        if monte_carlo:
            mc = monte_carlo_accuracy(n, model, trials, seed, workers)
            mc.subject = subject
        rows.append(ComparisonRow(subject, count, published_pct, analytic, mc))
    return rows


def comparison_csv(rows: Sequence[ComparisonRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COMPARISON_COLUMNS)
    for r in rows:
        w.writerow(r.csv_row())
    return buf.getvalue()
