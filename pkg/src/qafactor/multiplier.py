"""Array-multiplier Ising networks built from 6-qubit multiplier cells.

The layout is a ripple-carry array: cell (i, j) sits at bit weight i + j
and computes 2*carry + sum = a_i*b_j + sum_in + carry_in.  Carries move
to the next-significant cell of the same row, row partial sums move down
one row, and the last carry of each row becomes the high addend of the
row below.  Factor bits fan out along rows/columns through WIRE-coupled
copy spins rather than high-degree hubs.

With both factors clamped the unique ground state encodes the product;
with the product clamped the ground manifold encodes every factor pair.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .gates import WIRE, CircuitGraph, GateTemplate, compose, free_spin
from .ising import (
    GROUND_TOL,
    IsingModel,
    brute_force_ground,
    clamp_fold,
    energy,
    merge_spins,
    spins_to_bits,
)
from .synth import mult_unit_gate

FOLD = "fold"
BIAS = "bias"

#: Over-bias added per product spin in BIAS clamping mode; strong enough to
#: dominate any single unit bias yet weak enough to leave gate logic intact.
BIAS_STRENGTH = 1.1


@dataclass(frozen=True)
class FactorOutcome:
    """Integers read off the factor/product spins of one network state."""

    m: int
    n: int
    p: int
    energy: float
    is_ground: bool


@dataclass(frozen=True)
class MultiplierNetwork:
    n1: int
    n2: int
    model: IsingModel                       # boundary addends already folded in
    cell: GateTemplate
    cell_ports: tuple[tuple[dict[str, int], ...], ...]  # [j][i] -> port -> spin
    factor_a: tuple[int, ...]               # spin per factor-A bit
    factor_b: tuple[int, ...]
    product: tuple[int, ...]                # spin per product bit, LSB first
    expected_e0: float
    chains: bool
    chain_strength: float
    n_chain_spins: int
    n_couplings: int

    @property
    def n_cells(self) -> int:
        return self.n1 * self.n2

    def role_of(self, spin: int) -> tuple[str, int] | str:
        """('A', k), ('B', k), ('P', k) or 'internal'."""
        for label, spins in (("A", self.factor_a), ("B", self.factor_b), ("P", self.product)):
            for k, s in enumerate(spins):
                if s == spin:
                    return (label, k)
        return "internal"


def build_multiplier(
    n1: int,
    n2: int,
    chains: bool = False,
    chain_strength: float = 1.0,
    cell: GateTemplate | None = None,
) -> MultiplierNetwork:
    """Build the n1 x n2 network; factor A has n1 bits, factor B has n2.

    ``chains=True`` inserts one free interconnect spin on every inter-cell
    wire (the fabricated unit pairs each functional qubit with an
    interconnection qubit).  ``chain_strength`` scales all inter-cell
    couplings uniformly.
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("factor widths must be >= 1")
    if chain_strength <= 0:
        raise ValueError("chain strength must be positive")
    cell = cell or mult_unit_gate()

    graph = CircuitGraph()
    offsets = [[graph.add_gate(cell) for _i in range(n1)] for _j in range(n2)]

    def port(i: int, j: int, name: str) -> int:
        return offsets[j][i] + cell.ports[name]

    wires: list[tuple[int, int]] = []
    for i in range(n1):                      # factor-A fan-out down columns
        for j in range(1, n2):
            wires.append((port(i, j - 1, "in_a"), port(i, j, "in_a")))
    for j in range(n2):                      # factor-B fan-out along rows
        for i in range(1, n1):
            wires.append((port(i - 1, j, "in_b"), port(i, j, "in_b")))
    for j in range(n2):                      # carry ripple within a row
        for i in range(1, n1):
            wires.append((port(i - 1, j, "out_carry"), port(i, j, "in_d")))
    for j in range(1, n2):                   # partial sums move down a row
        for i in range(n1 - 1):
            wires.append((port(i + 1, j - 1, "out_sum"), port(i, j, "in_c")))
        wires.append((port(n1 - 1, j - 1, "out_carry"), port(n1 - 1, j, "in_c")))

    n_chain = 0
    for a, b in wires:
        if chains:
            mid = graph.add_gate(free_spin())
            graph.couple(a, mid, WIRE, chain_strength)
            graph.couple(mid, b, WIRE, chain_strength)
            n_chain += 1
        else:
            graph.couple(a, b, WIRE, chain_strength)

    full_model, _ = compose(graph)
    n_couplings = len(graph.couplings)

    # Boundary addends are constants: row 0 has no incoming partial sum and
    # column 0 no incoming carry.  Fold them in as zeros.
    boundary = {port(i, 0, "in_c"): 0 for i in range(n1)}
    boundary.update({port(0, j, "in_d"): 0 for j in range(n2)})
    reduced, offset = clamp_fold(full_model, boundary)

    remap = {}
    new = 0
    for old in range(full_model.n):
        if old not in boundary:
            remap[old] = new
            new += 1

    cell_ports = tuple(
        tuple(
            {
                name: remap[offsets[j][i] + local]
                for name, local in cell.ports.items()
                if (offsets[j][i] + local) in remap
            }
            for i in range(n1)
        )
        for j in range(n2)
    )

    factor_a = tuple(remap[port(i, 0, "in_a")] for i in range(n1))
    factor_b = tuple(remap[port(0, j, "in_b")] for j in range(n2))
    product = []
    for k in range(n2):
        product.append(remap[port(0, k, "out_sum")])
    for i in range(1, n1):
        product.append(remap[port(i, n2 - 1, "out_sum")])
    product.append(remap[port(n1 - 1, n2 - 1, "out_carry")])

    cell_e0 = brute_force_ground(cell.model).e0
    expected_e0 = n1 * n2 * cell_e0 - chain_strength * n_couplings - offset

    return MultiplierNetwork(
        n1=n1, n2=n2, model=reduced, cell=cell, cell_ports=cell_ports,
        factor_a=factor_a, factor_b=factor_b, product=tuple(product),
        expected_e0=expected_e0, chains=chains, chain_strength=chain_strength,
        n_chain_spins=n_chain, n_couplings=n_couplings,
    )


def expected_ground_energy(net: MultiplierNetwork) -> float:
    """Ground energy of the as-built network model (all ports free)."""
    return net.expected_e0


def _int_bits(value: int, width: int, what: str) -> dict[int, int]:
    if not 0 <= value < (1 << width):
        raise ValueError(f"{what}={value} out of range for {width} bits")
    return {k: (value >> k) & 1 for k in range(width)}


def clamp_factors(net: MultiplierNetwork, m: int, n: int) -> tuple[IsingModel, float]:
    """Fold both factors into the model; ground then encodes p = m*n."""
    clamps = {net.factor_a[k]: b for k, b in _int_bits(m, net.n1, "M").items()}
    clamps.update({net.factor_b[k]: b for k, b in _int_bits(n, net.n2, "N").items()})
    return clamp_fold(net.model, clamps)


def factor_clamp_assignment(net: MultiplierNetwork, m: int, n: int) -> dict[int, int]:
    clamps = {net.factor_a[k]: b for k, b in _int_bits(m, net.n1, "M").items()}
    clamps.update({net.factor_b[k]: b for k, b in _int_bits(n, net.n2, "N").items()})
    return clamps


def product_clamp_assignment(net: MultiplierNetwork, p: int) -> dict[int, int]:
    width = net.n1 + net.n2
    return {net.product[k]: b for k, b in _int_bits(p, width, "P").items()}


def clamp_product(
    net: MultiplierNetwork,
    p: int,
    method: str = FOLD,
    bias_strength: float = BIAS_STRENGTH,
) -> tuple[IsingModel, float]:
    """Pin the product, either exactly (FOLD) or by strong bias (BIAS).

    BIAS leaves the product spins free and adds -bias_strength to h for a
    target bit 1 and +bias_strength for a target bit 0, the hardware-style
    over-bias mechanism.  FOLD removes them algebraically.
    """
    clamps = product_clamp_assignment(net, p)
    if method == FOLD:
        return clamp_fold(net.model, clamps)
    if method == BIAS:
        if bias_strength <= 0:
            raise ValueError("bias strength must be positive")
        h = list(net.model.h)
        for spin, bit in clamps.items():
            h[spin] += -bias_strength if bit else bias_strength
        return IsingModel(net.model.n, tuple(h), dict(net.model.couplings)), 0.0
    raise ValueError(f"unknown clamp method {method!r}")


def bias_ground_energy(net: MultiplierNetwork, bias_strength: float = BIAS_STRENGTH) -> float:
    """Ground reference for a BIAS-clamped model whose product is attainable:
    every biased spin aligns, each contributing -bias_strength."""
    return net.expected_e0 - bias_strength * len(net.product)


def decode(net: MultiplierNetwork, state: Sequence[int]) -> FactorOutcome:
    """Read (M, N, P) off the role spins of a full network state."""
    e = energy(net.model, state)  # validates dimension
    bits = spins_to_bits(state)
    m = sum(bits[s] << k for k, s in enumerate(net.factor_a))
    n = sum(bits[s] << k for k, s in enumerate(net.factor_b))
    p = sum(bits[s] << k for k, s in enumerate(net.product))
    return FactorOutcome(m, n, p, e, e <= net.expected_e0 + GROUND_TOL)


def decode_reduced(
    net: MultiplierNetwork,
    clamps: Mapping[int, int],
    reduced_state: Sequence[int],
) -> FactorOutcome:
    """Decode a state of a clamped model by splicing the clamps back in."""
    return decode(net, merge_spins(net.model.n, clamps, reduced_state))


def ground_factor_pairs(net: MultiplierNetwork, p: int) -> set[tuple[int, int]]:
    """All (M, N) decoded from the exact ground manifold with the product
    folded to p.  Exhaustive; only valid within the enumeration cap."""
    clamps = product_clamp_assignment(net, p)
    reduced, offset = clamp_fold(net.model, clamps)
    report = brute_force_ground(reduced)
    pairs = set()
    for state in report.states:
        out = decode_reduced(net, clamps, state)
        if out.is_ground:
            pairs.add((out.m, out.n))
    return pairs
