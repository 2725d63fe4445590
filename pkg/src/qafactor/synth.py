"""Penalty-model synthesis: find (h, J) whose ground manifold is a truth table.

Feasibility is linear: every valid vector must sit at a common energy e0
and every invalid one at least ``gap`` above it.  We maximize the
achievable gap by LP, then walk the coefficients one at a time onto a 1/4
grid, choosing the lexicographically smallest grid value that keeps the
remaining problem feasible.  The grid pass makes emitted models
reproducible across platforms and LP solver builds.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import linprog

from .gates import GateTemplate, TruthTable, verify_gate
from .ising import IsingModel, bits_to_spins, energy

GRID = 0.25
_SNAP_EPS = 1e-6
_MAX_SYNTH_VARS = 10


class SynthesisError(ValueError):
    """Requested truth table is not realizable on the given coupling graph."""


def default_gap(n_vars: int) -> float:
    """2 for 3-spin gates (the NOR scale), 1 for larger blocks."""
    return 2.0 if n_vars <= 3 else 1.0


def default_bound(n_vars: int) -> float:
    return 1.0 if n_vars <= 3 else 2.0


@dataclass
class _Problem:
    n: int
    pairs: list[tuple[int, int]]
    a_valid: np.ndarray    # rows: [s_i ..., s_i s_j ...] for valid states
    a_invalid: np.ndarray
    bound: float

    @property
    def n_coeff(self) -> int:
        return self.n + len(self.pairs)


def _state_row(bits, pairs) -> list[float]:
    s = [2 * b - 1 for b in bits]
    return [float(x) for x in s] + [float(s[i] * s[j]) for i, j in pairs]


def _build_problem(table: TruthTable, pairs, bound: float) -> _Problem:
    n = table.n_vars
    if pairs is None:
        pairs = list(itertools.combinations(range(n), 2))
    else:
        seen = set()
        norm = []
        for i, j in pairs:
            if i == j or not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"bad coupling pair ({i},{j})")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate coupling pair {key}")
            seen.add(key)
            norm.append(key)
        pairs = sorted(norm)
    valid = set(table.valid)
    a_valid, a_invalid = [], []
    for bits in itertools.product((0, 1), repeat=n):
        row = _state_row(bits, pairs)
        (a_valid if bits in valid else a_invalid).append(row)
    return _Problem(
        n, pairs, np.array(a_valid, dtype=float),
        np.array(a_invalid, dtype=float) if a_invalid else np.zeros((0, n + len(pairs))),
        bound,
    )


def _solve(prob: _Problem, objective: np.ndarray, fixed: dict[int, float],
           target_gap: float | None):
    """LP over x = [h..., J..., e0] (+ trailing gap var when target is None).

    Valid rows are equalities against e0; invalid rows must clear e0 plus
    the gap (a fixed target, or the trailing variable being maximized).
    """
    nc = prob.n_coeff
    with_gapvar = target_gap is None
    nv = nc + 1 + (1 if with_gapvar else 0)
    big = prob.bound * nc + 1.0

    a_eq = np.hstack([prob.a_valid, -np.ones((prob.a_valid.shape[0], 1))])
    a_ub = np.hstack([-prob.a_invalid, np.ones((prob.a_invalid.shape[0], 1))])
    b_ub = np.zeros(a_ub.shape[0])
    if with_gapvar:
        a_eq = np.hstack([a_eq, np.zeros((a_eq.shape[0], 1))])
        a_ub = np.hstack([a_ub, np.ones((a_ub.shape[0], 1))])
    else:
        b_ub = b_ub - target_gap

    bounds = []
    for k in range(nc):
        if k in fixed:
            bounds.append((fixed[k], fixed[k]))
        else:
            bounds.append((-prob.bound, prob.bound))
    bounds.append((-big, big))  # e0
    if with_gapvar:
        bounds.append((0.0, 2 * big))

    res = linprog(
        objective, A_ub=a_ub if a_ub.shape[0] else None,
        b_ub=b_ub if a_ub.shape[0] else None,
        A_eq=a_eq, b_eq=np.zeros(a_eq.shape[0]),
        bounds=bounds, method="highs",
    )
    if not res.success:
        return None
    return res.x


def _count_short_constraints(prob: _Problem, x: np.ndarray, gap: float) -> int:
    if prob.a_invalid.shape[0] == 0:
        return 0
    energies = prob.a_invalid @ x[: prob.n_coeff]
    return int(np.sum(energies < x[prob.n_coeff] + gap - 1e-7))


def synthesize_penalty(
    table: TruthTable,
    pairs: list[tuple[int, int]] | None = None,
    gap: float | None = None,
    bound: float | None = None,
    name: str = "synth",
    ports: dict[str, int] | None = None,
) -> GateTemplate:
    """Synthesize a gate template realizing ``table`` with at least ``gap``.

    ``pairs`` restricts the coupling graph (default: complete).  Raises
    :class:`SynthesisError` naming the number of separation constraints
    that cannot be met when the table is infeasible on that graph.
    """
    if table.n_vars > _MAX_SYNTH_VARS:
        raise ValueError(f"synthesis limited to {_MAX_SYNTH_VARS} variables")
    if gap is None:
        gap = default_gap(table.n_vars)
    if bound is None:
        bound = default_bound(table.n_vars)
    if gap <= 0:
        raise ValueError("target gap must be positive")
    if bound < gap / 2:
        raise ValueError("coefficient bound must be at least gap/2")

    prob = _build_problem(table, pairs, bound)
    nc = prob.n_coeff

    # Phase 1: is the equal-energy system solvable at all?
    feas = _solve(prob, np.zeros(nc + 1), {}, target_gap=0.0)
    if feas is None:
        raise SynthesisError(
            f"{prob.a_valid.shape[0]} equal-energy constraints are inconsistent"
        )

    # Phase 2: maximize the gap.
    obj = np.zeros(nc + 2)
    obj[-1] = -1.0
    best = _solve(prob, obj, {}, target_gap=None)
    best_gap = best[-1] if best is not None else 0.0
    if best is None or best_gap < gap - 1e-7:
        x = best if best is not None else feas
        short = _count_short_constraints(prob, x, gap)
        raise SynthesisError(
            f"gap {gap} unreachable on this coupling graph: {short} of "
            f"{prob.a_invalid.shape[0]} separation constraints fall short "
            f"(best achievable gap {best_gap:.6g})"
        )

    # Snap the enforced gap down to the grid so grid coefficients can meet it.
    target = max(gap, np.floor(best_gap / GRID + _SNAP_EPS) * GRID)

    coeffs = _lex_grid_coefficients(prob, target)
    if coeffs is None:
        # Degenerate geometry where no grid vector fits; fall back to the
        # plain LP optimum (still verified below).
        coeffs = list(best[:nc])

    h = tuple(coeffs[: prob.n])
    couplings = {p: c for p, c in zip(prob.pairs, coeffs[prob.n:]) if c != 0.0}
    model = IsingModel(prob.n, h, couplings)

    e0 = energy(model, bits_to_spins(table.valid[0]))
    achieved = _achieved_gap(model, table, e0)
    template = GateTemplate(
        name, model, ports or {}, tuple(sorted(table.valid)), min(achieved, target)
    )
    check = verify_gate(template)
    if not check.passed:
        raise SynthesisError(
            f"synthesized model failed verification ({len(check.offending)} offending states)"
        )
    return template


def _achieved_gap(model: IsingModel, table: TruthTable, e0: float) -> float:
    valid = set(table.valid)
    lowest = float("inf")
    for bits in itertools.product((0, 1), repeat=table.n_vars):
        if bits not in valid:
            lowest = min(lowest, energy(model, bits_to_spins(bits)))
    return lowest - e0


def _lex_grid_coefficients(prob: _Problem, target: float) -> list[float] | None:
    """Fix h then J coefficients, in index order, to the smallest 1/4-grid
    value that keeps the remaining LP feasible."""
    fixed: dict[int, float] = {}
    zero = np.zeros(prob.n_coeff + 1)
    for k in range(prob.n_coeff):
        obj = zero.copy()
        obj[k] = 1.0
        sol = _solve(prob, obj, fixed, target_gap=target)
        if sol is None:
            return None
        cand = np.ceil((sol[k] - _SNAP_EPS) / GRID) * GRID
        placed = False
        while cand <= prob.bound + 1e-9:
            trial = dict(fixed)
            trial[k] = float(cand)
            if _solve(prob, zero, trial, target_gap=target) is not None:
                fixed[k] = float(cand)
                placed = True
                break
            cand += GRID
        if not placed:
            return None
    return [fixed[k] + 0.0 for k in range(prob.n_coeff)]  # +0.0 folds -0.0


def multiplier_unit_table() -> TruthTable:
    """Legal states of the 6-qubit multiplier cell.

    Variables (a, b, c, d, carry, sum) with 2*carry + sum = a*b + c + d;
    one valid vector per (a, b, c, d), 16 in all.
    """
    rows = []
    for a, b, c, d in itertools.product((0, 1), repeat=4):
        t = a * b + c + d
        rows.append((a, b, c, d, t // 2, t % 2))
    return TruthTable(6, tuple(rows))


MULT_UNIT_PORTS = {
    "in_a": 0, "in_b": 1, "in_c": 2, "in_d": 3, "out_carry": 4, "out_sum": 5,
}


@lru_cache(maxsize=1)
def mult_unit_gate() -> GateTemplate:
    """The synthesized 6-qubit multiplier cell (complete coupling graph)."""
    return synthesize_penalty(
        multiplier_unit_table(), gap=1.0, bound=2.0,
        name="mult-unit", ports=dict(MULT_UNIT_PORTS),
    )
