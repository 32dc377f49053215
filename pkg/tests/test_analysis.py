import math

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from strategies import netlists
from pfgsim.analysis import (
    MAX_ENUMERATION_GATES,
    NonPositiveStd,
    TooManyGates,
    analytic_circuit_accuracy,
    analytic_gate_accuracy,
    classification_probability,
    monte_carlo_accuracy,
    normal_cdf,
    output_probability,
    comparison_csv,
    comparison_report,
)
from pfgsim.circuits import Gate, Netlist, WireRef, builtin, gate_netlist
from pfgsim.gates import GateKind, GateSpec, gate_stimulus, threshold_rule_for
from pfgsim.signal import DEFAULT_RESPONSE, PatternResponse, ResponseModel, StimulusPattern

# frozen from tests/oracles.py (erf series, Gaussian quadrature, brute-force enumeration)
PHI_1 = 0.8413447460685429
PHI_OR00 = 0.8738804119051056
P1_OR_11 = 0.9921683231785512
P1_XOR_11 = 0.4486621587047792
GATE_ACC = {
    GateKind.OR: 0.8256588495720949,
    GateKind.AND: 0.8348027068850665,
    GateKind.XOR: 0.6854144908594582,
    GateKind.NOT: 0.8705814010386007,
}
CIRCUIT_ACC = {
    "half_adder": 0.5641632436468476,
    "full_adder": 0.38268857140569024,
    "decoder_2to4": 0.46849071310433416,
    "xor_from_nand": 0.5758494871678678,
}
CIRCUIT_ORACLE = {
    "half_adder": oracles.HALF_ADDER,
    "full_adder": oracles.FULL_ADDER,
    "decoder_2to4": oracles.DECODER,
    "xor_from_nand": oracles.XOR_FROM_NAND,
}


def test_frozen_values_match_oracles():
    assert oracles.phi_series(1) == pytest.approx(PHI_1, abs=1e-15)
    assert oracles.p_one("OR", (1, 1)) == pytest.approx(P1_OR_11, abs=1e-12)
    for kind, acc in GATE_ACC.items():
        assert oracles.gate_accuracy(kind.value) == pytest.approx(acc, abs=1e-12)
    for name, spec in CIRCUIT_ORACLE.items():
        d = oracles.brute_force_circuit(*spec)
        assert sum(d.values()) / len(d) == pytest.approx(CIRCUIT_ACC[name], abs=1e-12)


def test_normal_cdf_examples():
    assert normal_cdf(0, 0, 1) == 0.5
    assert normal_cdf(1.0, 0.0, 1.0) == pytest.approx(PHI_1, abs=1e-7)
    assert normal_cdf(3.5, 2.5, 1.0) == pytest.approx(PHI_1, abs=1e-7)
    assert normal_cdf(10, 2.1, 6.9) == pytest.approx(PHI_OR00, abs=1e-4)


@pytest.mark.parametrize("std", [0.0, -1.0])
def test_normal_cdf_rejects_bad_std(std):
    with pytest.raises(NonPositiveStd):
        normal_cdf(0.0, 0.0, std)


def test_classification_probability_examples():
    assert classification_probability(threshold_rule_for(GateKind.OR), 33.2, 9.6) == pytest.approx(P1_OR_11, abs=1e-10)
    assert classification_probability(threshold_rule_for(GateKind.XOR), 33.2, 9.6) == pytest.approx(P1_XOR_11, abs=1e-10)
    assert classification_probability(threshold_rule_for(GateKind.OR), 33.2, 0.0) == 1.0
    assert classification_probability(threshold_rule_for(GateKind.NOR), 33.2, 0.0) == 0.0


@given(st.floats(-50, 80), st.floats(0.1, 30), st.sampled_from(list(GateKind)))
def test_output_probabilities_sum_to_one(mean, std, kind):
    rule = threshold_rule_for(kind)
    p0 = output_probability(rule, 0, mean, std)
    p1 = output_probability(rule, 1, mean, std)
    assert 0 <= p0 <= 1 and 0 <= p1 <= 1
    assert p0 + p1 == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("kind", list(GATE_ACC))
def test_gate_accuracy_against_quadrature(kind):
    rep = analytic_gate_accuracy(GateSpec(kind))
    assert rep.overall == pytest.approx(GATE_ACC[kind], abs=1e-12)
    assert rep.overall == pytest.approx(sum(rep.per_input.values()) / len(rep.per_input), abs=1e-15)


def test_published_style_rounding():
    assert round(analytic_gate_accuracy(GateKind.OR).overall, 3) == 0.826
    assert round(analytic_gate_accuracy(GateKind.XOR).overall, 3) == 0.685
    assert round(analytic_circuit_accuracy(builtin("half_adder")).overall, 3) == 0.564
    assert round(analytic_circuit_accuracy(builtin("decoder_2to4")).overall, 3) == 0.468


@pytest.mark.parametrize("base,comp", [(GateKind.OR, GateKind.NOR), (GateKind.AND, GateKind.NAND), (GateKind.XOR, GateKind.XNOR)])
def test_complement_accuracy_exact(base, comp):
    a = analytic_gate_accuracy(base)
    b = analytic_gate_accuracy(comp)
    assert a.per_input == b.per_input
    assert a.overall == b.overall


@pytest.mark.parametrize("name", list(CIRCUIT_ACC))
def test_circuit_accuracy_against_brute_force(name):
    rep = analytic_circuit_accuracy(builtin(name))
    expected = oracles.brute_force_circuit(*CIRCUIT_ORACLE[name])
    for x, p in expected.items():
        assert rep.per_input[x] == pytest.approx(p, abs=1e-12)
    assert rep.overall == pytest.approx(CIRCUIT_ACC[name], abs=1e-12)


def _gate_correct(spec, bits, model=DEFAULT_RESPONSE):
    r = model[gate_stimulus(spec, *bits)]
    return output_probability(spec.threshold_rule, spec.ideal(*bits), r.mean_pct, r.std_pct)


@pytest.mark.parametrize("name", ["half_adder", "decoder_2to4"])
def test_parallel_factorisation(name):
    n = builtin(name)
    rep = analytic_circuit_accuracy(n)
    for x in n.input_combinations():
        prod = math.prod(_gate_correct(g.spec, [x[n.inputs.index(s.name)] for s in g.sources]) for g in n.gates)
        assert rep.per_input[x] == pytest.approx(prod, abs=1e-14)


def test_decoder_symmetry():
    vals = list(analytic_circuit_accuracy(builtin("decoder_2to4")).per_input.values())
    assert max(vals) - min(vals) < 1e-15


@pytest.mark.parametrize("kind", list(GateKind))
def test_single_gate_netlist_matches_gate_report(kind):
    a = analytic_gate_accuracy(kind)
    b = analytic_circuit_accuracy(gate_netlist(kind))
    assert a.per_input == pytest.approx(b.per_input, abs=1e-15)


def test_cumulative_error_trend():
    single = min(analytic_gate_accuracy(k).overall for k in GateKind)
    ha = analytic_circuit_accuracy(builtin("half_adder")).overall
    fa = analytic_circuit_accuracy(builtin("full_adder")).overall
    dec = analytic_circuit_accuracy(builtin("decoder_2to4")).overall
    assert single > ha > fa
    assert ha > dec


def test_reweighting_changes_overall_only():
    rep = analytic_circuit_accuracy(builtin("full_adder"))
    before = dict(rep.per_input)
    w = {x: (i + 1) for i, x in enumerate(rep.per_input)}
    assert rep.weighted_overall(w) != pytest.approx(rep.overall, abs=1e-6)
    assert rep.weighted_overall({x: 1 for x in rep.per_input}) == pytest.approx(rep.overall, abs=1e-15)
    assert rep.per_input == before


def test_too_many_gates():
    gates = [Gate("g0", GateKind.NOT, (WireRef("A"),))]
    for i in range(1, MAX_ENUMERATION_GATES + 1):
        gates.append(Gate(f"g{i}", GateKind.NOT, (WireRef(f"g{i - 1}"),)))
    n = Netlist("chain", ("A",), gates, (("Y", WireRef(gates[-1].gate_id)),))
    with pytest.raises(TooManyGates):
        analytic_circuit_accuracy(n)
    ok = Netlist("chain", ("A",), gates[:MAX_ENUMERATION_GATES], (("Y", WireRef(f"g{MAX_ENUMERATION_GATES - 1}")),))
    assert 0 < analytic_circuit_accuracy(ok).overall < 1


def test_wide_parallel_circuit_factorises():
    gates = [Gate(f"g{i}", GateKind.AND, (WireRef("A"), WireRef("B", bool(i % 2)))) for i in range(24)]
    n = Netlist("wide", ("A", "B"), gates, tuple((f"Y{i}", WireRef(f"g{i}")) for i in range(24)))
    rep = analytic_circuit_accuracy(n)
    for x in n.input_combinations():
        prod = math.prod(_gate_correct(g.spec, x) for g in n.gates)
        assert rep.per_input[x] == pytest.approx(prod, rel=1e-10)


responses = st.builds(
    PatternResponse, st.floats(-20, 60).map(lambda v: round(v, 2)), st.floats(0.5, 20).map(lambda v: round(v, 2))
)


@settings(max_examples=15)
@given(st.tuples(responses, responses, responses, responses))
def test_enumeration_matches_brute_force_for_random_models(resps):
    model = ResponseModel(dict(zip(StimulusPattern.all(), resps)))
    table = {(int(p.heat), int(p.oat)): (model[p].mean_pct, model[p].std_pct) for p in StimulusPattern.all()}
    rep = analytic_circuit_accuracy(builtin("full_adder"), model)
    expected = oracles.brute_force_circuit(*oracles.FULL_ADDER, table=table)
    for x, p in expected.items():
        assert rep.per_input[x] == pytest.approx(p, abs=1e-10)


# -- Monte Carlo ------------------------------------------------------------


def test_mc_or_close_to_analytic():
    rep = monte_carlo_accuracy(gate_netlist(GateKind.OR), trials=100_000, seed=5)
    assert abs(rep.overall - GATE_ACC[GateKind.OR]) <= 3 * rep.std_error
    assert rep.std_error == pytest.approx(math.sqrt(rep.overall * (1 - rep.overall) / rep.trials))


@pytest.mark.parametrize("name", ["half_adder", "full_adder", "decoder_2to4", "xor_from_nand"])
def test_mc_ideal_model_is_perfect(ideal_model, name):
    rep = monte_carlo_accuracy(builtin(name), ideal_model, trials=1000, seed=1)
    assert rep.overall == 1.0


def test_mc_independent_of_workers():
    n = builtin("full_adder")
    one = monte_carlo_accuracy(n, trials=30_000, seed=7, workers=1)
    many = monte_carlo_accuracy(n, trials=30_000, seed=7, workers=6)
    assert one.to_json() == many.to_json()
    other = monte_carlo_accuracy(n, trials=30_000, seed=8)
    assert other.per_input != one.per_input


def test_mc_rejects_zero_trials():
    with pytest.raises(ValueError):
        monte_carlo_accuracy(builtin("half_adder"), trials=0)


def test_comparison_report():
    rows = comparison_report(trials=2000, seed=0)
    by = {r.subject: r for r in rows}
    assert list(by) == ["OR", "AND", "NOT", "XOR", "half_adder", "full_adder", "decoder_2to4"]
    assert by["decoder_2to4"].published_pct == 57.5
    assert by["full_adder"].pfg_count == 5
    assert [r.pfg_count for r in rows] == [1, 1, 1, 1, 2, 5, 4]
    assert [r.published_pct for r in rows] == [90.0, 77.8, 91.7, 70.8, 65.0, 58.8, 57.5]
    assert by["NOT"].reference_only
    singles = [by[k].analytic.overall for k in ("OR", "AND", "NOT", "XOR")]
    assert min(singles) >= by["half_adder"].analytic.overall >= by["full_adder"].analytic.overall
    assert by["half_adder"].analytic.overall >= by["decoder_2to4"].analytic.overall
    csv_text = comparison_csv(rows)
    assert csv_text.splitlines()[0] == "subject,pfg_count,paper_pct,analytic_pct,mc_pct,mc_stderr"
    assert "full_adder,5,58.8," in csv_text


def test_report_serialisation():
    rep = monte_carlo_accuracy(builtin("half_adder"), trials=500, seed=2)
    d = rep.to_dict()
    assert d["method"] == "monte_carlo" and d["trials"] == 500
    assert set(d["per_input"]) == {"00", "01", "10", "11"}
    lines = analytic_gate_accuracy(GateKind.OR).to_csv().splitlines()
    assert lines[0] == "subject,method,inputs,p_correct" and lines[-1].startswith("OR,analytic,overall,")


def _as_oracle(n):
    gates = [(g.gate_id, g.kind.value, [(s.name, int(s.inverted)) for s in g.sources]) for g in n.gates]
    return list(n.inputs), gates, [r.name for _, r in n.outputs]


@settings(max_examples=60)
@given(netlists().filter(lambda n: n.pfg_count <= 7 and len(n.inputs) <= 3))
def test_enumeration_matches_brute_force_for_random_netlists(n):
    rep = analytic_circuit_accuracy(n)
    expected = oracles.brute_force_circuit(*_as_oracle(n))
    for x, p in expected.items():
        assert rep.per_input[x] == pytest.approx(p, abs=1e-12)
