"""Classical simulated annealing with deterministic seeded shots.

One shot is sequential single-spin-flip Metropolis: every sweep visits
all spins in index order and flips spin i with probability
min(1, exp(-dE/T)).  dE is maintained incrementally from local fields;
the final energy is recomputed exactly and checked against the tracked
value.  Shot k derives its RNG seed from (master_seed, k) via
:func:`qafactor.seeds.shot_seed`, so results are identical for any
worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .ising import GROUND_TOL, IsingModel, energy, spins_to_bits
from .seeds import shot_seed

GEOMETRIC = "geometric"
LINEAR = "linear"


@dataclass(frozen=True)
class Schedule:
    """Temperature ramp in units of the model energy.

    Defaults anneal every shipped gate model to ground with near
    certainty at desk scale; all of them are CLI-overridable.
    """

    kind: str = GEOMETRIC
    t_hot: float = 3.0
    t_cold: float = 0.05
    sweeps: int = 2000

    def __post_init__(self):
        if self.kind not in (GEOMETRIC, LINEAR):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if not (self.t_hot >= self.t_cold > 0):
            raise ValueError("require t_hot >= t_cold > 0")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")

    def temperatures(self) -> list[float]:
        if self.sweeps == 1:
            return [self.t_cold]
        if self.kind == GEOMETRIC:
            ratio = (self.t_cold / self.t_hot) ** (1.0 / (self.sweeps - 1))
            return [self.t_hot * ratio**k for k in range(self.sweeps)]
        step = (self.t_cold - self.t_hot) / (self.sweeps - 1)
        return [self.t_hot + step * k for k in range(self.sweeps)]


@dataclass(frozen=True)
class ShotResult:
    state: tuple[int, ...]
    energy: float
    index: int
    seed: int


@dataclass(frozen=True)
class RunSummary:
    shots: int
    best_energy: float
    reference_e0: float | None
    ground_hits: int | None
    histogram: dict[str, int]

    @property
    def ground_hit_rate(self) -> float | None:
        if self.ground_hits is None:
            return None
        return self.ground_hits / self.shots

    def to_text(self) -> str:
        """Line-oriented key-value rendering; byte-stable for fixed inputs."""
        lines = [f"shots {self.shots}", f"best_energy {self.best_energy!r}"]
        if self.reference_e0 is not None:
            lines.append(f"reference_e0 {self.reference_e0!r}")
            lines.append(f"ground_hits {self.ground_hits}")
            lines.append(f"ground_hit_rate {self.ground_hit_rate!r}")
        lines.append(f"outcomes {len(self.histogram)}")
        for key, count in sorted(self.histogram.items(), key=lambda kv: (-kv[1], kv[0])):
            lines.append(f"count {key} {count}")
        return "\n".join(lines) + "\n"


def metropolis_accept(delta_e: float, temperature: float, u: float) -> bool:
    """Accept rule for one proposed flip: always for dE <= 0, else u < exp(-dE/T)."""
    return delta_e <= 0.0 or u < math.exp(-delta_e / temperature)


def anneal_shot(model: IsingModel, schedule: Schedule, seed: int, index: int = 0) -> ShotResult:
    """Run one shot from a random +-1 start drawn from ``seed``.

    One uniform variate is consumed per flip attempt whether or not the
    dE <= 0 shortcut fires, which keeps the stream position independent
    of the trajectory.
    """
    n = model.n
    if n < 1:
        raise ValueError("annealing needs at least one spin")
    rng = np.random.Generator(np.random.PCG64(seed))
    state = [1 if b else -1 for b in rng.integers(0, 2, n)]
    uniforms = rng.random(schedule.sweeps * n).tolist()

    h = list(model.h)
    nbrs: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for (i, j), v in model.couplings.items():
        nbrs[i].append((j, v))
        nbrs[j].append((i, v))
    fields = [h[i] + sum(v * state[j] for j, v in nbrs[i]) for i in range(n)]
    tracked = energy(model, state)

    exp = math.exp
    u_at = 0
    for t in schedule.temperatures():
        inv_t = 1.0 / t
        for i in range(n):
            si = state[i]
            de = -2.0 * si * fields[i]
            if de <= 0.0 or uniforms[u_at] < exp(-de * inv_t):
                state[i] = -si
                tracked += de
                shift = -2.0 * si
                for j, v in nbrs[i]:
                    fields[j] += v * shift
            u_at += 1

    final = tuple(state)
    exact = energy(model, final)
    if abs(exact - tracked) > 1e-6:
        raise ArithmeticError(
            f"incremental energy drifted: tracked {tracked!r} vs exact {exact!r}"
        )
    return ShotResult(final, exact, index, seed)


def _shot_chunk(args) -> list[ShotResult]:
    model, schedule, master_seed, indices = args
    return [anneal_shot(model, schedule, shot_seed(master_seed, k), k) for k in indices]


def run_shots(
    model: IsingModel,
    schedule: Schedule,
    n_shots: int,
    master_seed: int,
    reference_e0: float | None = None,
    workers: int = 1,
    keep_shots: bool = False,
):
    """Run ``n_shots`` independent shots and aggregate in shot-index order.

    Returns a :class:`RunSummary`, or ``(summary, shots)`` when
    ``keep_shots`` is set.  Histogram keys are the final states' bit
    strings (spin 0 first).
    """
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    if workers <= 1:
        results = _shot_chunk((model, schedule, master_seed, range(n_shots)))
    else:
        chunks = [
            (model, schedule, master_seed, range(lo, n_shots, workers))
            for lo in range(min(workers, n_shots))
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            gathered = [r for chunk in pool.map(_shot_chunk, chunks) for r in chunk]
        gathered.sort(key=lambda r: r.index)
        results = gathered

    histogram: dict[str, int] = {}
    best = math.inf
    hits = 0
    for r in results:
        key = "".join(str(b) for b in spins_to_bits(r.state))
        histogram[key] = histogram.get(key, 0) + 1
        best = min(best, r.energy)
        if reference_e0 is not None and r.energy <= reference_e0 + GROUND_TOL:
            hits += 1
    summary = RunSummary(
        shots=n_shots,
        best_energy=best,
        reference_e0=reference_e0,
        ground_hits=hits if reference_e0 is not None else None,
        histogram=histogram,
    )
    if keep_shots:
        return summary, results
    return summary


def rekey_histogram(histogram: dict[str, int], relabel: Callable[[str], str]) -> dict[str, int]:
    """Re-key a bit-string histogram (e.g. into decoded (M, N) labels)."""
    out: dict[str, int] = {}
    for key, count in histogram.items():
        new = relabel(key)
        out[new] = out.get(new, 0) + count
    return out


def format_counts_table(
    row_labels: Sequence[str],
    col_labels: Sequence[str],
    counts: Sequence[Sequence[int]],
    corner: str = "state",
) -> str:
    """Fixed-width text table of outcome counts (rows x run columns)."""
    if len(counts) != len(row_labels):
        raise ValueError("one counts row per row label required")
    widths = [max(len(corner), *(len(r) for r in row_labels))] if row_labels else [len(corner)]
    for c, label in enumerate(col_labels):
        column = [len(label)] + [len(str(row[c])) for row in counts]
        widths.append(max(column))
    header = "  ".join(
        s.rjust(w) for s, w in zip([corner, *col_labels], widths)
    )
    lines = [header]
    for label, row in zip(row_labels, counts):
        cells = [label.rjust(widths[0])]
        cells += [str(v).rjust(w) for v, w in zip(row, widths[1:])]
        lines.append("  ".join(cells))
    return "\n".join(lines) + "\n"


def write_shot_csv(
    fh,
    results: Sequence[ShotResult],
    reference_e0: float | None = None,
    decoder=None,
) -> None:
    """Per-shot log: shot,energy,ground_hit,state_bits[,M,N,P]."""
    header = "shot,energy,ground_hit,state_bits"
    if decoder is not None:
        header += ",M,N,P"
    fh.write(header + "\n")
    for r in results:
        bits = "".join(str(b) for b in spins_to_bits(r.state))
        hit = ""
        if reference_e0 is not None:
            hit = "1" if r.energy <= reference_e0 + GROUND_TOL else "0"
        row = f"{r.index},{r.energy!r},{hit},{bits}"
        if decoder is not None:
            m, n, p = decoder(r.state)
            row += f",{m},{n},{p}"
        fh.write(row + "\n")
