"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
lines on passing runs too.  Criterion 7 exercises the circuit-level
inverse-NOR logic-validity contract; see notes on the freeze-out analysis
in the repository docs for why it is expected to fail with the published
circuit constants.
"""
import itertools
import time

import pytest

from qafactor.anneal import Schedule, run_shots
from qafactor.capacity import CapacityInput, capacity_estimate
from qafactor.fluxsim import (
    NoiseSpec,
    PHI0,
    NetworkLayout,
    QubitCircuitParams,
    inverse_nor_layout,
    johnson_sigma,
    run_ensemble,
    static_potential,
)
from qafactor.gates import and_gate, half_adder, nor_gate
from qafactor.ising import (
    bits_to_spins,
    brute_force_ground,
    clamp_fold,
    spins_to_bits,
)
from qafactor.multiplier import (
    build_multiplier,
    decode_reduced,
    factor_clamp_assignment,
    product_clamp_assignment,
)
from qafactor.synth import multiplier_unit_table, synthesize_penalty

SEED = 2024
FACTORS_OF_15 = {(1, 15), (3, 5), (5, 3), (15, 1)}


def _report(num, name, ok, detail=""):
    line = f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'} {name}"
    if detail:
        line += f" :: {detail}"
    print("\n" + line, flush=True)


@pytest.fixture(scope="module")
def net44():
    return build_multiplier(4, 4)


@pytest.fixture(scope="module")
def factor15_run(net44):
    """Criterion 5/10 workload: clamp P=15 on the 4x4 network, 200 shots."""
    clamps = product_clamp_assignment(net44, 15)
    reduced, offset = clamp_fold(net44.model, clamps)
    reference = net44.expected_e0 - offset

    def run(workers=1):
        return run_shots(reduced, Schedule(), 200, SEED, reference_e0=reference,
                         workers=workers, keep_shots=True)

    return {"clamps": clamps, "reference": reference, "run": run}


@pytest.fixture(scope="module")
def nor_ensembles():
    """Criterion 7/10 workload: two 200-shot inverse-NOR ensembles."""
    noise = NoiseSpec()

    def run(clamp, workers=1):
        return run_ensemble(inverse_nor_layout(clamp), noise, n_shots=200,
                            master_seed=SEED, workers=workers)

    return run


def test_c01_gate_exactness():
    start = time.time()
    nor = brute_force_ground(nor_gate().model)
    expected_nor = {
        bits_to_spins(b) for b in ((0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 0))
    }
    nor_ok = (nor.e0 == -1.5 and set(nor.states) == expected_nor and nor.gap == 2.0)

    gate = and_gate()
    rep = brute_force_ground(gate.model)
    and_ok = (
        {spins_to_bits(s) for s in rep.states} == set(gate.valid_set)
        and rep.gap == 2.0
    )
    elapsed = time.time() - start
    ok = nor_ok and and_ok and elapsed < 1.0
    _report(1, "gate exactness (NOR/AND, zero tolerance)", ok,
            f"NOR e0={nor.e0}, gap={nor.gap}; AND gap={rep.gap}; {elapsed:.2f}s")
    assert nor_ok, "NOR ground manifold or gap mismatch"
    assert and_ok, "AND ground manifold or gap mismatch"
    assert elapsed < 1.0


def test_c02_half_adder():
    start = time.time()
    model, ports = half_adder()
    rep = brute_force_ground(model)
    seen = set()
    logic_ok = True
    for state in rep.states:
        bits = spins_to_bits(state)
        a, b = bits[ports["a"]], bits[ports["b"]]
        logic_ok &= bits[ports["sum"]] == a ^ b and bits[ports["carry"]] == a & b
        seen.add((a, b))
    elapsed = time.time() - start
    ok = (model.n == 9 and rep.e0 == -8.5 and rep.degeneracy == 4
          and logic_ok and len(seen) == 4 and elapsed < 1.0)
    _report(2, "half adder (512-state exhaustive)", ok,
            f"e0={rep.e0}, ground states={rep.degeneracy}; {elapsed:.2f}s")
    assert rep.e0 == -8.5 and rep.degeneracy == 4 and logic_ok and len(seen) == 4
    assert elapsed < 1.0


def test_c03_multiplier_unit_synthesis():
    start = time.time()
    gate = synthesize_penalty(multiplier_unit_table(), gap=1.0, bound=2.0)
    rep = brute_force_ground(gate.model)
    relation_ok = all(
        2 * bits[4] + bits[5] == bits[0] * bits[1] + bits[2] + bits[3]
        for bits in (spins_to_bits(s) for s in rep.states)
    )
    elapsed = time.time() - start
    ok = rep.degeneracy == 16 and relation_ok and rep.gap >= 1.0 and elapsed < 10.0
    _report(3, "multiplier-unit synthesis (64-state exhaustive)", ok,
            f"ground states={rep.degeneracy}, gap={rep.gap}; {elapsed:.2f}s")
    assert rep.degeneracy == 16 and relation_ok
    assert rep.gap >= 1.0
    assert elapsed < 10.0


def test_c04_forward_multiplication_exhaustive(net22):
    start = time.time()
    failures = []
    for m, n in itertools.product(range(4), repeat=2):
        clamps = factor_clamp_assignment(net22, m, n)
        reduced, _ = clamp_fold(net22.model, clamps)
        rep = brute_force_ground(reduced)
        out = decode_reduced(net22, clamps, rep.states[0])
        if rep.degeneracy != 1 or not out.is_ground or out.p != m * n:
            failures.append((m, n, rep.degeneracy, out.p))
    elapsed = time.time() - start
    ok = not failures and elapsed < 60.0
    _report(4, "forward multiplication (2x2, all 16 pairs exhaustive)", ok,
            f"failures={failures}; {elapsed:.1f}s")
    assert not failures
    assert elapsed < 60.0


def test_c05_inverse_factoring_of_15(net44, factor15_run):
    start = time.time()
    summary, shots = factor15_run["run"]()
    clamps = factor15_run["clamps"]
    ground_pairs = set()
    bad_pairs = set()
    for r in shots:
        out = decode_reduced(net44, clamps, r.state)
        if out.is_ground:
            (ground_pairs if (out.m, out.n) in FACTORS_OF_15 else bad_pairs).add(
                (out.m, out.n)
            )
    elapsed = time.time() - start
    rate = summary.ground_hit_rate
    ok = summary.ground_hits >= 1 and not bad_pairs and elapsed < 120.0
    _report(5, "inverse factoring of 15 (4x4, 200 shots)", ok,
            f"ground-hit rate={rate:.3f} (reported, not asserted), "
            f"pairs seen={sorted(ground_pairs)}; {elapsed:.1f}s")
    assert summary.ground_hits >= 1, "no annealing shot reached the ground energy"
    assert not bad_pairs, f"ground-hit shots decoded outside the factor set: {bad_pairs}"
    assert elapsed < 120.0


def test_c06_johnson_noise_formula():
    sigma = johnson_sigma(3.2e3, 1.0, 1e12)
    ok = abs(sigma - 0.13e-6) / 0.13e-6 < 0.02
    _report(6, "Johnson-noise formula", ok, f"sigma={sigma * 1e6:.4f} uA vs 0.13 uA")
    assert ok


def test_c07_circuit_inverse_nor(nor_ensembles):
    start = time.time()
    res0 = nor_ensembles(0)
    res1 = nor_ensembles(1)
    elapsed = time.time() - start

    def nor_violations(result):
        return sum(c for bits, c in result.counts.items()
                   if (1 - (bits[0] | bits[1])) != bits[2])

    valid_pairs_seen = {
        bits[:2] for bits in res0.counts
        if bits[2] == 0 and bits[3] == 0 and (1 - (bits[0] | bits[1])) == 0
    }
    clamp0_ok = nor_violations(res0) == 0 and valid_pairs_seen == {(0, 1), (1, 0), (1, 1)}
    clamp1_ok = res1.counts.get((0, 0, 1, 1), 0) == 200
    ok = clamp0_ok and clamp1_ok and elapsed < 600.0
    _report(7, "circuit-level inverse NOR (2x200 shots)", ok,
            f"clamp0 violations={nor_violations(res0)}, "
            f"valid pairs seen={sorted(valid_pairs_seen)}, "
            f"clamp1 (-1,-1) count={res1.counts.get((0, 0, 1, 1), 0)}/200; "
            f"{elapsed:.0f}s")
    assert nor_violations(res0) == 0, (
        "clamp-to-0 ensemble produced invalid NOR outcomes; known limitation of "
        "the classical simulation at these circuit constants (M=8 pH, L=260 pH, "
        "T=1 K): the dynamics freeze out at an effective coupling scale of "
        "~1.5 kT at any ramp duration — see README and scripts/freeze_out_study.py"
    )
    assert valid_pairs_seen == {(0, 1), (1, 0), (1, 1)}
    assert clamp1_ok, "clamp-to-1 ensemble did not give 100% (-1,-1)"
    assert elapsed < 600.0


def test_c08_bistability_structure():
    start = time.time()
    layout = NetworkLayout(params=(QubitCircuitParams(),), i_x=(0.0,))
    suppressed = static_potential(layout, PHI0 / 2, 0.0, 0)
    double = static_potential(layout, 0.0, 0.0, 0)
    elapsed = time.time() - start
    ok = suppressed.n_minima == 1 and double.n_minima == 2 and elapsed < 1.0
    _report(8, "bistability structure", ok,
            f"minima: {suppressed.n_minima} at half quantum, {double.n_minima} at zero")
    assert suppressed.n_minima == 1
    assert double.n_minima == 2
    assert elapsed < 1.0


def test_c09_capacity_arithmetic():
    rep = capacity_estimate(CapacityInput())
    ok = (rep.units_side == 35 and rep.units_per_chip == 1225
          and rep.total_units == 122500 and rep.product_bits == 350)
    _report(9, "capacity arithmetic", ok,
            f"{rep.units_side}x{rep.units_side} units/chip, "
            f"{rep.total_units} units, {rep.product_bits} bits")
    assert ok


def test_c10_determinism_under_parallelism(factor15_run, nor_ensembles):
    s_serial = factor15_run["run"](workers=1)[0].to_text()
    s_parallel = factor15_run["run"](workers=4)[0].to_text()
    anneal_ok = s_serial == s_parallel

    e_serial = nor_ensembles(0, workers=1).to_text()
    e_parallel = nor_ensembles(0, workers=4).to_text()
    ensemble_ok = e_serial == e_parallel
    ok = anneal_ok and ensemble_ok
    _report(10, "determinism: byte-identical summaries under 1 and 4 workers", ok,
            f"anneal={anneal_ok}, ensemble={ensemble_ok}")
    assert anneal_ok and ensemble_ok
