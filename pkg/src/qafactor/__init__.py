"""Invertible Ising-logic multipliers: gates, networks, annealing, circuits.

Forward operation multiplies (clamp the factors, anneal, read the
product); inverse operation factors (clamp the product, anneal, read the
factors).  A circuit-level simulator of the underlying tunable-barrier
flux qubits drives the same gate models with physical Johnson noise.
"""
from .anneal import Schedule, ShotResult, RunSummary, anneal_shot, run_shots
from .capacity import CapacityInput, CapacityReport, capacity_estimate
from .gates import (
    CircuitGraph,
    GateTemplate,
    TruthTable,
    and_gate,
    compose,
    half_adder,
    nor_gate,
    verify_gate,
)
from .ising import (
    GroundReport,
    IsingModel,
    bits_to_spins,
    brute_force_ground,
    clamp_fold,
    energy,
    merge_spins,
    parse_model,
    format_model,
    spins_to_bits,
)
from .multiplier import (
    FactorOutcome,
    MultiplierNetwork,
    build_multiplier,
    clamp_factors,
    clamp_product,
    decode,
    expected_ground_energy,
)
from .synth import SynthesisError, mult_unit_gate, multiplier_unit_table, synthesize_penalty

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
