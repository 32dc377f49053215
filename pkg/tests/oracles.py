"""Slow reference computations the fast paths are checked against.

Nothing here imports the package under test except for data types.
"""

from __future__ import annotations

import functools
import itertools

import mpmath

mpmath.mp.dps = 40

RESPONSES = {(0, 0): (2.1, 6.9), (0, 1): (12.2, 12.6), (1, 0): (19.8, 8.8), (1, 1): (33.2, 9.6)}


def erf_series(x) -> mpmath.mpf:
    """Maclaurin series for erf at 40 digits; converges for every real x."""
    x = mpmath.mpf(x)
    term = x
    total = x
    n = 0
    while True:
        n += 1
        term *= -x * x / n
        add = term / (2 * n + 1)
        total += add
        if abs(add) < mpmath.mpf(10) ** -45 and n > x * x:
            break
    return 2 / mpmath.sqrt(mpmath.pi) * total


def phi_series(z) -> float:
    return float((1 + erf_series(mpmath.mpf(z) / mpmath.sqrt(2))) / 2)


def gaussian_mass(lo, hi, mean, std) -> float:
    """Integrate the normal pdf over [lo, hi] by quadrature."""
    mean, std = mpmath.mpf(mean), mpmath.mpf(std)
    pdf = lambda t: mpmath.exp(-((t - mean) ** 2) / (2 * std**2)) / (std * mpmath.sqrt(2 * mpmath.pi))
    pts = [lo, mean, hi] if lo < mean < hi else [lo, hi]
    return float(mpmath.quad(pdf, pts))


INF = mpmath.inf

# probability of output 1 under each canonical rule, by quadrature
RULE_REGIONS = {
    "OR": [(10, INF)],
    "AND": [(24, INF)],
    "XOR": [(4.9, 32)],
    "NOT": [(-INF, 10)],
    "NOR": [(-INF, 10)],
    "NAND": [(-INF, 24)],
    "XNOR": [(-INF, 4.9), (32, INF)],
}

BOOL = {
    "OR": lambda a, b: a | b,
    "AND": lambda a, b: a & b,
    "XOR": lambda a, b: a ^ b,
    "NOT": lambda a, b: 1 - a,
    "NOR": lambda a, b: 1 - (a | b),
    "NAND": lambda a, b: 1 - (a & b),
    "XNOR": lambda a, b: 1 - (a ^ b),
}


def p_one(kind: str, pattern, table=RESPONSES) -> float:
    return _p_one(kind, *table[pattern])


@functools.lru_cache(maxsize=None)
def _p_one(kind, mean, std):
    return sum(gaussian_mass(lo, hi, mean, std) for lo, hi in RULE_REGIONS[kind])


def gate_accuracy(kind: str, table=RESPONSES) -> float:
    combos = [(0, 0), (1, 0)] if kind == "NOT" else list(itertools.product((0, 1), repeat=2))
    acc = []
    for a, b in combos:
        p = p_one(kind, (a, b), table)
        acc.append(p if BOOL[kind](a, b) else 1 - p)
    return sum(acc) / len(acc)


def brute_force_circuit(inputs, gates, outputs, table=RESPONSES):
    """Per-input P(all outputs correct) by summing over every gate outcome vector.

    gates: list of (id, kind, [(src, inverted), ...]); outputs: list of wires.
    """
    per_input = {}
    for x in itertools.product((0, 1), repeat=len(inputs)):
        ideal = dict(zip(inputs, x))
        for gid, kind, srcs in gates:
            vals = [ideal[s] ^ inv for s, inv in srcs] + [0]
            ideal[gid] = BOOL[kind](vals[0], vals[1])
        total = 0.0
        for outcome in itertools.product((0, 1), repeat=len(gates)):
            v = dict(zip(inputs, x))
            p = 1.0
            for (gid, kind, srcs), bit in zip(gates, outcome):
                vals = [v[s] ^ inv for s, inv in srcs] + [0]
                q = p_one(kind, (vals[0], vals[1]), table)
                p *= q if bit else 1 - q
                v[gid] = bit
            if all(v[o] == ideal[o] for o in outputs):
                total += p
        per_input[x] = total
    return per_input


def boolean_table(inputs, gates, outputs):
    rows = {}
    for x in itertools.product((0, 1), repeat=len(inputs)):
        v = dict(zip(inputs, x))
        for gid, kind, srcs in gates:
            vals = [v[s] ^ inv for s, inv in srcs] + [0]
            v[gid] = BOOL[kind](vals[0], vals[1])
        rows[x] = tuple(v[o] for o in outputs)
    return rows


HALF_ADDER = (["A", "B"], [("x1", "XOR", [("A", 0), ("B", 0)]), ("a1", "AND", [("A", 0), ("B", 0)])], ["x1", "a1"])
FULL_ADDER = (
    ["A", "B", "Cin"],
    [
        ("s1", "XOR", [("A", 0), ("B", 0)]),
        ("s2", "XOR", [("s1", 0), ("Cin", 0)]),
        ("c1", "AND", [("A", 0), ("B", 0)]),
        ("c2", "AND", [("s1", 0), ("Cin", 0)]),
        ("co", "OR", [("c1", 0), ("c2", 0)]),
    ],
    ["s2", "co"],
)
DECODER = (
    ["A", "B"],
    [
        ("d0", "AND", [("A", 1), ("B", 1)]),
        ("d1", "AND", [("A", 1), ("B", 0)]),
        ("d2", "AND", [("A", 0), ("B", 1)]),
        ("d3", "AND", [("A", 0), ("B", 0)]),
    ],
    ["d0", "d1", "d2", "d3"],
)
XOR_FROM_NAND = (
    ["A", "B"],
    [
        ("n1", "NAND", [("A", 0), ("B", 0)]),
        ("n2", "NAND", [("A", 0), ("n1", 0)]),
        ("n3", "NAND", [("B", 0), ("n1", 0)]),
        ("n4", "NAND", [("n2", 0), ("n3", 0)]),
    ],
    ["n4"],
)
