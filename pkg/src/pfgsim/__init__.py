"""Simulator for slime-mould frequency logic gates and cascaded circuits."""

from .analysis import (
    AccuracyReport,
    analytic_circuit_accuracy,
    analytic_gate_accuracy,
    classification_probability,
    monte_carlo_accuracy,
    normal_cdf,
    comparison_report,
)
from .circuits import (
    Netlist,
    builtin,
    evaluate_circuit,
    ideal_truth_table,
    parse_netlist,
    serialize_netlist,
)
from .gates import GateKind, GateSpec, ThresholdRule, classify, evaluate_gate, stimuli_for_inputs, threshold_rule_for
from .signal import OscillationModel, ResponseModel, StimulusPattern, Trace, sample_delta_f, synthesize_trace
from .spectral import SpectralConfig, compute_delta_f, estimate_dominant_frequency

__version__ = "0.1.0"
