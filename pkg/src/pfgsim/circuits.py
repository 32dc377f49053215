"""Combinational circuits of cascaded frequency gates.

Circuits are written in a small line-oriented netlist language::

    circuit half_adder
    inputs A B
    gate x1 XOR A B
    gate a1 AND A B
    outputs SUM=x1 CARRY=a1

A ``!`` after a source wire inverts it at the consuming gate (the stimulus is
applied when the wire carries 0). ``#`` starts a comment.

Every gate is an independent tube: its realized input bits pick its stimulus
pattern and it draws its own frequency change, so errors travel downstream
only through logic values. Random draws are keyed by gate id, which makes the
result independent of the order gates are visited in.
"""

from __future__ import annotations

import csv
import io
import itertools
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .gates import GateKind, GateSpec, classify, gate_stimulus, measured_delta_f
from .signal import DEFAULT_RESPONSE, OscillationModel, ResponseModel, StimulusPattern, sample_delta_f
from .spectral import SpectralConfig

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
MAX_TRUTH_TABLE_INPUTS = 16


class NetlistError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def __str__(self):
        if self.line is None:
            return self.message
        return f"line {self.line}, column {self.column}: {self.message}"


class NetlistSyntaxError(NetlistError):
    pass


class UnknownGateKind(NetlistError):
    pass


class UndefinedWire(NetlistError):
    def __init__(self, wire: str, line: int | None = None, column: int | None = None):
        super().__init__(f"undefined wire {wire!r}", line, column)
        self.wire = wire


class DuplicateId(NetlistError):
    pass


class CycleDetected(NetlistError):
    pass


class UnknownBuiltin(KeyError):
    pass


@dataclass(frozen=True)
class WireRef:
    name: str
    inverted: bool = False

    def __str__(self):
        return self.name + ("!" if self.inverted else "")


@dataclass(frozen=True)
class Gate:
    gate_id: str
    kind: GateKind
    sources: tuple[WireRef, ...]

    @property
    def spec(self) -> GateSpec:
        return GateSpec(
            self.kind,
            invert_a=self.sources[0].inverted,
            invert_b=len(self.sources) > 1 and self.sources[1].inverted,
        )


# Locator maps ("gate", id) / ("ref", gate_id, i) / ("input", i) / ("output", i)
# to a (line, column) for error messages; None when built programmatically.
Locator = Callable[[tuple], tuple[int | None, int | None]]


def _nowhere(_key: tuple) -> tuple[None, None]:
    return None, None


def _check_ident(name: str, what: str, pos: tuple) -> None:
    if not isinstance(name, str) or not IDENT.match(name):
        raise NetlistSyntaxError(f"invalid {what} name {name!r}", *pos)


def _validate(
    name: str,
    inputs: Sequence[str],
    gates: Sequence[Gate],
    outputs: Sequence[tuple[str, WireRef]],
    where: Locator = _nowhere,
) -> tuple[Gate, ...]:
    """Check every netlist invariant; return gates in a stable topological order."""
    _check_ident(name, "circuit", where(("circuit",)))
    seen: set[str] = set()
    for i, w in enumerate(inputs):
        _check_ident(w, "input", where(("input", i)))
        if w in seen:
            raise DuplicateId(f"input {w!r} declared twice", *where(("input", i)))
        seen.add(w)
    for g in gates:
        _check_ident(g.gate_id, "gate", where(("gate", g.gate_id)))
        if g.gate_id in seen:
            raise DuplicateId(f"id {g.gate_id!r} already defined", *where(("gate", g.gate_id)))
        seen.add(g.gate_id)
        if len(g.sources) != g.kind.arity:
            raise NetlistSyntaxError(
                f"{g.kind.value} gate takes {g.kind.arity} input(s), got {len(g.sources)}",
                *where(("gate", g.gate_id)),
            )
    for g in gates:
        for i, src in enumerate(g.sources):
            if src.name not in seen:
                raise UndefinedWire(src.name, *where(("ref", g.gate_id, i)))
    if not outputs:
        raise NetlistSyntaxError("circuit declares no outputs", *where(("outputs",)))
    out_names: set[str] = set()
    for i, (oname, ref) in enumerate(outputs):
        _check_ident(oname, "output", where(("output", i)))
        if oname in out_names:
            raise DuplicateId(f"output {oname!r} declared twice", *where(("output", i)))
        out_names.add(oname)
        if ref.inverted:
            raise NetlistSyntaxError("outputs cannot be inverted", *where(("output", i)))
        if ref.name not in seen:
            raise UndefinedWire(ref.name, *where(("output", i)))

    # stable Kahn ordering: earliest-declared ready gate first
    ready = set(inputs)
    pending = list(gates)
    ordered: list[Gate] = []
    while pending:
        for i, g in enumerate(pending):
            if all(s.name in ready for s in g.sources):
                ordered.append(pending.pop(i))
                ready.add(g.gate_id)
                break
        else:
            culprit = _find_cycle(pending)
            raise CycleDetected(
                f"combinational loop through {' -> '.join(culprit)}", *where(("gate", culprit[0]))
            )
    return tuple(ordered)


def _find_cycle(pending: list[Gate]) -> list[str]:
    by_id = {g.gate_id: g for g in pending}
    for start in pending:
        path, node = [], start.gate_id
        while node in by_id and node not in path:
            path.append(node)
            node = next((s.name for s in by_id[node].sources if s.name in by_id), None)
        if node in path:
            cyc = path[path.index(node):]
            return cyc + [cyc[0]]
    return [pending[0].gate_id]


@dataclass(frozen=True)
class Netlist:
    """Immutable gate DAG over named wires.

    Gates may be given in any order; they are stored in a stable topological
    order (declaration order wherever that is already valid).
    """

    name: str
    inputs: tuple[str, ...]
    gates: tuple[Gate, ...]
    outputs: tuple[tuple[str, WireRef], ...]

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(
            self, "outputs", tuple((o, r if isinstance(r, WireRef) else WireRef(r)) for o, r in self.outputs)
        )
        object.__setattr__(self, "gates", _validate(self.name, self.inputs, tuple(self.gates), self.outputs))

    @classmethod
    def _trusted(cls, name, inputs, gates, outputs) -> "Netlist":
        obj = object.__new__(cls)
        for k, v in (("name", name), ("inputs", tuple(inputs)), ("gates", tuple(gates)), ("outputs", tuple(outputs))):
            object.__setattr__(obj, k, v)
        return obj

    @property
    def output_names(self) -> tuple[str, ...]:
        return tuple(o for o, _ in self.outputs)

    @property
    def pfg_count(self) -> int:
        return len(self.gates)

    def input_combinations(self) -> list[tuple[int, ...]]:
        return list(itertools.product((0, 1), repeat=len(self.inputs)))

    def logic(self, bits: Sequence[int]) -> tuple[int, ...]:
        """Ideal Boolean outputs."""
        vals = self._bind(bits)
        for g in self.gates:
            vals[g.gate_id] = g.spec.ideal(*(vals[s.name] for s in g.sources))
        return tuple(vals[r.name] for _, r in self.outputs)

    def _bind(self, bits: Sequence[int]) -> dict[str, int]:
        bits = [int(b) for b in bits]
        if len(bits) != len(self.inputs):
            raise ValueError(f"{self.name} takes {len(self.inputs)} input bits, got {len(bits)}")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"input bits must be 0 or 1, got {bits}")
        return dict(zip(self.inputs, bits))

    def last_use(self) -> dict[str, int]:
        """Index of the last gate reading each wire (len(gates) for outputs)."""
        last = {w: -1 for w in self.inputs}
        for i, g in enumerate(self.gates):
            last.setdefault(g.gate_id, -1)
            for s in g.sources:
                last[s.name] = i
        for _, r in self.outputs:
            last[r.name] = len(self.gates)
        return last


# -- DSL ---------------------------------------------------------------------

_SRC = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)(!?)\Z")
_OUT = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)=([A-Za-z_][A-Za-z0-9_]*)(!?)\Z")


def _tokens(line: str) -> list[tuple[str, int]]:
    line = line.split("#", 1)[0]
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


def parse_netlist(text: str) -> Netlist:
    """Parse netlist source; errors carry 1-based line and column."""
    name = None
    inputs: list[str] = []
    gates: list[Gate] = []
    outputs: list[tuple[str, WireRef]] = []
    locs: dict[tuple, tuple[int, int]] = {}
    seen_kw: dict[str, int] = {}
    lines = text.splitlines()

    for lineno, raw in enumerate(lines, start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        (kw, kcol), args = toks[0], toks[1:]
        if kw in ("circuit", "inputs", "outputs"):
            if kw in seen_kw:
                raise NetlistSyntaxError(
                    f"duplicate '{kw}' line (first on line {seen_kw[kw]})", lineno, kcol
                )
            seen_kw[kw] = lineno
        if kw == "circuit":
            if len(args) != 1:
                raise NetlistSyntaxError("expected 'circuit <name>'", lineno, kcol)
            name = args[0][0]
            locs[("circuit",)] = (lineno, args[0][1])
        elif kw == "inputs":
            if not args:
                raise NetlistSyntaxError("expected at least one input name", lineno, kcol)
            for tok, col in args:
                locs[("input", len(inputs))] = (lineno, col)
                inputs.append(tok)
        elif kw == "gate":
            if len(args) < 3:
                raise NetlistSyntaxError("expected 'gate <id> <KIND> <src> [<src>]'", lineno, kcol)
            (gid, gcol), (kname, kindcol) = args[0], args[1]
            try:
                kind = GateKind.parse(kname)
            except ValueError:
                raise UnknownGateKind(f"unknown gate kind {kname!r}", lineno, kindcol) from None
            if gid in {g.gate_id for g in gates}:
                raise DuplicateId(f"gate id {gid!r} already defined", lineno, gcol)
            srcs = args[2:]
            if len(srcs) != kind.arity:
                col = srcs[kind.arity][1] if len(srcs) > kind.arity else kindcol
                raise NetlistSyntaxError(
                    f"{kind.value} gate takes {kind.arity} input(s), got {len(srcs)}", lineno, col
                )
            refs = []
            for i, (tok, col) in enumerate(srcs):
                m = _SRC.match(tok)
                if not m:
                    raise NetlistSyntaxError(f"bad wire reference {tok!r}", lineno, col)
                refs.append(WireRef(m.group(1), bool(m.group(2))))
                locs[("ref", gid, i)] = (lineno, col)
            locs[("gate", gid)] = (lineno, gcol)
            gates.append(Gate(gid, kind, tuple(refs)))
        elif kw == "outputs":
            if not args:
                raise NetlistSyntaxError("expected at least one NAME=wire", lineno, kcol)
            for tok, col in args:
                m = _OUT.match(tok)
                if not m:
                    raise NetlistSyntaxError(f"expected NAME=wire, got {tok!r}", lineno, col)
                if m.group(3):
                    raise NetlistSyntaxError("outputs cannot be inverted", lineno, col)
                locs[("output", len(outputs))] = (lineno, col)
                outputs.append((m.group(1), WireRef(m.group(2))))
        else:
            raise NetlistSyntaxError(f"unknown statement {kw!r}", lineno, kcol)

    eof = (len(lines) + 1, 1)
    for kw in ("circuit", "inputs", "outputs"):
        if kw not in seen_kw:
            raise NetlistSyntaxError(f"missing '{kw}' line", *eof)

    ordered = _validate(name, inputs, gates, outputs, lambda key: locs.get(key, eof))
    return Netlist._trusted(name, inputs, ordered, outputs)


def serialize_netlist(n: Netlist) -> str:
    lines = [f"circuit {n.name}", "inputs " + " ".join(n.inputs)]
    for g in n.gates:
        lines.append(" ".join(["gate", g.gate_id, g.kind.value, *map(str, g.sources)]))
    lines.append("outputs " + " ".join(f"{o}={r}" for o, r in n.outputs))
    return "\n".join(lines) + "\n"


_BUILTINS = {
    "half_adder": """
circuit half_adder
inputs A B
gate x1 XOR A B
gate a1 AND A B
outputs SUM=x1 CARRY=a1
""",
    "full_adder": """
circuit full_adder
inputs A B Cin
gate s1 XOR A B
gate s2 XOR s1 Cin
gate c1 AND A B
gate c2 AND s1 Cin
gate co OR c1 c2
outputs SUM=s2 COUT=co
""",
    # complemented inputs are applied as inverted stimuli
    "decoder_2to4": """
circuit decoder_2to4
inputs A B
gate d0 AND A! B!
gate d1 AND A! B
gate d2 AND A B!
gate d3 AND A B
outputs D0=d0 D1=d1 D2=d2 D3=d3
""",
    "xor_from_nand": """
circuit xor_from_nand
inputs A B
gate n1 NAND A B
gate n2 NAND A n1
gate n3 NAND B n1
gate n4 NAND n2 n3
outputs Y=n4
""",
}

BUILTIN_NAMES = tuple(_BUILTINS)


def builtin(name: str) -> Netlist:
    try:
        return parse_netlist(_BUILTINS[name])
    except KeyError:
        raise UnknownBuiltin(f"unknown builtin {name!r}; choose from {', '.join(_BUILTINS)}") from None


def gate_netlist(spec: GateSpec | GateKind) -> Netlist:
    """One-gate circuit wrapping ``spec`` (NOT gets a single input)."""
    if not isinstance(spec, GateSpec):
        spec = GateSpec(GateKind(spec))
    if spec.kind is GateKind.NOT:
        return Netlist(spec.kind.value, ("A",), (Gate("g", spec.kind, (WireRef("A", spec.invert_a),)),), (("Y", WireRef("g")),))
    srcs = (WireRef("A", spec.invert_a), WireRef("B", spec.invert_b))
    return Netlist(spec.kind.value, ("A", "B"), (Gate("g", spec.kind, srcs),), (("Y", WireRef("g")),))


def resolve(name_or_text: str) -> Netlist:
    """Builtin name, gate kind name, or netlist source text."""
    if name_or_text in _BUILTINS:
        return builtin(name_or_text)
    try:
        return gate_netlist(GateKind.parse(name_or_text))
    except ValueError:
        pass
    return parse_netlist(name_or_text)


# -- evaluation --------------------------------------------------------------


def gate_seed_key(gate_id: str) -> int:
    return int.from_bytes(gate_id.encode("utf-8"), "little")


def gate_rng(seed, gate_id: str, *prefix: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(*prefix, gate_seed_key(gate_id))))


def evaluate_wires(
    n: Netlist,
    inputs: Sequence[int],
    model: ResponseModel = DEFAULT_RESPONSE,
    seed: int = 0,
    mode: str = "sampled",
    osc: OscillationModel | None = None,
    cfg: SpectralConfig | None = None,
) -> dict[str, int]:
    """Noisy evaluation returning the value on every wire."""
    vals = n._bind(inputs)
    for g in n.gates:
        rng = gate_rng(seed, g.gate_id)
        spec = g.spec
        pattern = gate_stimulus(spec, *(vals[s.name] for s in g.sources))
        if mode == "sampled":
            delta = sample_delta_f(pattern, model, rng)
        elif mode == "measured":
            delta = measured_delta_f(pattern, model, rng, osc, cfg)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        vals[g.gate_id] = classify(delta, spec.threshold_rule)
    return vals


def evaluate_circuit(
    n: Netlist,
    inputs: Sequence[int],
    model: ResponseModel = DEFAULT_RESPONSE,
    seed: int = 0,
    mode: str = "sampled",
    osc: OscillationModel | None = None,
    cfg: SpectralConfig | None = None,
) -> tuple[int, ...]:
    vals = evaluate_wires(n, inputs, model, seed, mode, osc, cfg)
    return tuple(vals[r.name] for _, r in n.outputs)


def simulate_batch(
    n: Netlist,
    inputs: Sequence[int],
    model: ResponseModel,
    normals: Mapping[str, np.ndarray],
) -> np.ndarray:
    """Vectorised sampled-mode evaluation over many trials.

    ``normals[gate_id]`` holds one standard-normal draw per trial. Returns a
    (trials, outputs) int8 array.
    """
    trials = len(next(iter(normals.values()))) if normals else 1
    keys = [p.key for p in StimulusPattern.all()]
    means = np.array([model[StimulusPattern.from_key(k)].mean_pct for k in keys])
    stds = np.array([model[StimulusPattern.from_key(k)].std_pct for k in keys])
    vals = {w: np.full(trials, b, dtype=np.int8) for w, b in n._bind(inputs).items()}
    for g in n.gates:
        a = vals[g.sources[0].name] ^ np.int8(g.sources[0].inverted)
        if len(g.sources) > 1:
            b = vals[g.sources[1].name] ^ np.int8(g.sources[1].inverted)
        else:
            b = np.zeros(trials, dtype=np.int8)
        idx = 2 * a + b  # heat is the high bit, matching StimulusPattern.key
        delta = means[idx] + stds[idx] * normals[g.gate_id]
        vals[g.gate_id] = classify(delta, g.spec.threshold_rule)
    return np.stack([vals[r.name] for _, r in n.outputs], axis=1)


@dataclass(frozen=True)
class TruthTable:
    input_names: tuple[str, ...]
    output_names: tuple[str, ...]
    rows: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    @property
    def num_inputs(self) -> int:
        return len(self.input_names)

    def __getitem__(self, bits: Iterable[int]) -> tuple[int, ...]:
        return dict(self.rows)[tuple(int(b) for b in bits)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([*self.input_names, *self.output_names])
        for ins, outs in self.rows:
            w.writerow([*ins, *outs])
        return buf.getvalue()


def _table(n: Netlist, fn) -> TruthTable:
    if len(n.inputs) > MAX_TRUTH_TABLE_INPUTS:
        raise ValueError(f"truth table limited to {MAX_TRUTH_TABLE_INPUTS} inputs")
    rows = tuple((x, tuple(fn(x))) for x in n.input_combinations())
    return TruthTable(n.inputs, n.output_names, rows)


def ideal_truth_table(n: Netlist, model: ResponseModel = DEFAULT_RESPONSE) -> TruthTable:
    """Truth table of the circuit run with every response spread set to zero."""
    ideal = model.scaled(0.0)
    return _table(n, lambda x: evaluate_circuit(n, x, ideal))


def logic_truth_table(n: Netlist) -> TruthTable:
    return _table(n, n.logic)
