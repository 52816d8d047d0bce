"""Exact counting-to-amplitude constructions and the algebraic acceptance test."""

from .algebraic_converse import (
    FieldCircuit,
    acceptance_probability,
    amplitude_decomposition,
    parse_circuit,
    probability_decomposition,
    qap_decide,
    simulate_field,
)
from .constructions import describe_circuit, run, run_rational, run_sqrt2
from .exact_scalar import RATIONALS, SQRT2, FieldElement, NumberFieldSpec, RootTwo, to_decimal
from .gap_oracle import Graph, WitnessPredicate, build_gni_predicate, gap, parse_graph, parse_predicate

__version__ = "0.1.0"

__all__ = [
    "FieldCircuit",
    "FieldElement",
    "Graph",
    "NumberFieldSpec",
    "RATIONALS",
    "RootTwo",
    "SQRT2",
    "WitnessPredicate",
    "acceptance_probability",
    "amplitude_decomposition",
    "build_gni_predicate",
    "describe_circuit",
    "gap",
    "parse_circuit",
    "parse_graph",
    "parse_predicate",
    "probability_decomposition",
    "qap_decide",
    "run",
    "run_rational",
    "run_sqrt2",
    "simulate_field",
    "to_decimal",
]
