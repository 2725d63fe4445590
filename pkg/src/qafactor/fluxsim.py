"""Circuit-level transient simulation of coupled tunable-barrier flux qubits.

Each qubit is a superconducting storage loop (total inductance L_q + L_x,
maintained at 260 pH) interrupted by a two-junction SQUID whose loop flux
phi_t tunes the barrier.  The two junctions follow the RCSJ model with an
independent Gaussian noise current source in parallel with each.  Because
the SQUID inductors (5 pH) are tiny against the main loop, the junction
differential mode is slaved to phi_t and the qubit reduces to one
common-mode degree of freedom, the main-loop flux deviation ``phi``
measured from the half-quantum working point:

    C_eff phi'' = Ic_eff(t) sin(2 pi phi / Phi0) - I_q - G_eff phi' + I_noise

with Ic_eff(t) = 2 Ic cos(pi phi_t(t) / Phi0), C_eff = 2C, G_eff = 2/R,
and loop currents solved from (diag(L) + M) I_q = phi - phi_bias.  At
phi_t = Phi0/2 the cosine kills the barrier (single well); at phi_t = 0
the potential is a symmetric double well and the circulating-current
sign encodes the bit: "1" is the declared clockwise-positive direction
(I_q > 0 here), "0" the counterclockwise one.

Sign conventions, fixed by two-qubit calibration runs and frozen below:
a positive mutual inductance aligns circulating currents, so
ferromagnetic J = -1 maps to M = +8 pH (``MUTUAL_PER_UNIT_J = -8 pH``);
the bias transformer winding is oriented so that positive I_x applies
negative flux (``BIAS_WINDING = -1``), which makes a positive energy
bias h favor the "0" state exactly as the Ising convention requires.

Bias compensation: a coupling contributes energy proportional to the
square of the well current I*(t) while a static bias flux contributes
proportionally to I*(t) itself, so a constant I_x overwhelms the
couplings early in the ramp and traps every qubit on its bias side
(verified numerically at ramps up to 32 ns).  As in production annealers,
the bias lines therefore follow the well current: the applied bias flux
is M_x I_x * I*(t)/I*(end), which keeps the realized h : J proportions
fixed through the anneal and equals the static value M_x I_x at
read-out.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ising import IsingModel
from .seeds import shot_seed

PHI0 = 2.067833848e-15  # flux quantum, Wb
KB = 1.380649e-23       # Boltzmann constant, J/K

#: Bias current realizing |h| = 1, from the inverse-gate demonstration setup.
IX_PER_UNIT_H = 10.5e-6
#: Mutual realizing |J| = 1; the sign makes J = -1 ferromagnetic (aligning).
MUTUAL_PER_UNIT_J = -8.0e-12
#: Declared bias-transformer winding orientation (see module docstring).
BIAS_WINDING = -1.0

DT_DEFAULT = 5e-14       # 0.05 ps: >= 100 integrator steps per plasma period
RAMP_DEFAULT = 2.0e-9    # barrier ramp duration
HOLD_DEFAULT = 0.2e-9    # settle time at full barrier before read-out


class ShotError(RuntimeError):
    """Integrator diverged; carries time and state diagnostics."""


@dataclass(frozen=True)
class QubitCircuitParams:
    """Per-qubit circuit values (SI units)."""

    ic: float = 4.0e-6     # junction critical current
    r: float = 3.2e3       # shunt resistance per junction
    c: float = 17e-15      # shunt capacitance per junction
    l_t: float = 5e-12     # SQUID branch inductor
    l_q: float = 250e-12   # main storage inductance (trimmed for transformers)
    l_x: float = 10e-12    # bias-transformer section of the main loop
    m_t: float = 2e-12     # transverse control mutual
    m_x: float = 4e-12     # bias control mutual

    def __post_init__(self):
        for name in ("ic", "r", "c", "l_t", "l_q", "l_x", "m_t", "m_x"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def main_loop_inductance(self) -> float:
        """Total main-loop inductance; 260 pH for the reference design."""
        return self.l_q + self.l_x


@dataclass(frozen=True)
class NoiseSpec:
    """Per-junction Gaussian current noise, held constant between samples.

    The default sigma is the Johnson-Nyquist value for the 3.2-kOhm shunt
    at 1 K over a 1-THz bandwidth, rounded as specified for the reference
    runs (0.13 uA), sampled at 2 THz.
    """

    sigma: float = 0.13e-6
    sample_rate: float = 2.0e12
    temperature: float = 1.0
    bandwidth: float = 1.0e12
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("noise sigma must be >= 0")
        if self.sample_rate <= 0:
            raise ValueError("sample rate must be positive")

    @classmethod
    def from_johnson(cls, r: float, temperature: float = 1.0,
                     bandwidth: float = 1.0e12, sample_rate: float = 2.0e12,
                     seed: int = 0) -> "NoiseSpec":
        return cls(johnson_sigma(r, temperature, bandwidth), sample_rate,
                   temperature, bandwidth, seed)


def johnson_sigma(r: float, temperature: float, bandwidth: float) -> float:
    """Johnson-Nyquist current noise std over a bandwidth: sqrt(4 kB T B / R)."""
    if r <= 0 or temperature <= 0 or bandwidth < 0:
        raise ValueError("resistance and temperature must be positive, bandwidth >= 0")
    return math.sqrt(4.0 * KB * temperature * bandwidth / r)


@dataclass(frozen=True)
class RampSpec:
    """Shared transverse-flux waveform: linear phi_t ramp, then a hold."""

    ramp_s: float = RAMP_DEFAULT
    hold_s: float = HOLD_DEFAULT
    phi_t_start: float = PHI0 / 2
    phi_t_end: float = 0.0

    def __post_init__(self):
        if self.ramp_s <= 0 or self.hold_s < 0:
            raise ValueError("ramp must be positive, hold >= 0")

    @property
    def total_s(self) -> float:
        return self.ramp_s + self.hold_s

    def phi_t(self, t: float) -> float:
        if t >= self.ramp_s:
            return self.phi_t_end
        frac = t / self.ramp_s
        return self.phi_t_start + (self.phi_t_end - self.phi_t_start) * frac


@dataclass(frozen=True)
class NetworkLayout:
    """Coupled-qubit layout: per-qubit params, biases, signed mutuals."""

    params: tuple[QubitCircuitParams, ...]
    i_x: tuple[float, ...]
    mutuals: dict[tuple[int, int], float] = field(default_factory=dict)
    ramp: RampSpec = field(default_factory=RampSpec)
    readout_orientation: tuple[float, ...] = ()

    def __post_init__(self):
        n = len(self.params)
        if len(self.i_x) != n:
            raise ValueError("one bias current per qubit required")
        for (i, j), m in self.mutuals.items():
            if not (0 <= i < j < n):
                raise ValueError(f"mutual key ({i},{j}) must satisfy 0 <= i < j < n")
            lmin = min(self.params[i].main_loop_inductance,
                       self.params[j].main_loop_inductance)
            if abs(m) >= lmin:
                raise ValueError(f"mutual ({i},{j}) not small against loop inductance")
        if not self.readout_orientation:
            object.__setattr__(self, "readout_orientation", (1.0,) * n)
        elif len(self.readout_orientation) != n:
            raise ValueError("one read-out orientation per qubit required")

    @property
    def n(self) -> int:
        return len(self.params)

    def inductance_matrix(self) -> np.ndarray:
        a = np.diag([p.main_loop_inductance for p in self.params])
        for (i, j), m in self.mutuals.items():
            a[i, j] = a[j, i] = m
        return a

    def bias_flux(self) -> np.ndarray:
        return np.array(
            [BIAS_WINDING * p.m_x * ix for p, ix in zip(self.params, self.i_x)]
        )


@dataclass(frozen=True)
class TraceSet:
    """Decimated time series plus the final read-out of one shot."""

    t: np.ndarray            # seconds
    iq: np.ndarray           # (n_samples, n) circulating currents, A
    phases: np.ndarray       # (n_samples, 2n) junction phases, rad
    final_iq: tuple[float, ...]
    bits: tuple[int, ...]


def logical_to_physical(
    h: Sequence[float], couplings: dict[tuple[int, int], float]
) -> tuple[tuple[float, ...], dict[tuple[int, int], float]]:
    """Map dimensionless (h, J) onto bias currents and mutual inductances.

    I_x,i = h_i * 10.5 uA and M_ij = MUTUAL_PER_UNIT_J * J_ij, valid for
    the shipped gate range |h| <= 2, |J| <= 1.
    """
    for i, hv in enumerate(h):
        if abs(hv) > 2.0:
            raise ValueError(f"|h[{i}]| = {abs(hv)} outside the mapped range (<= 2)")
    for (i, j), v in couplings.items():
        if abs(v) > 1.0:
            raise ValueError(f"|J[{i},{j}]| = {abs(v)} outside the mapped range (<= 1)")
    i_x = tuple(hv * IX_PER_UNIT_H for hv in h)
    mutuals = {
        (min(i, j), max(i, j)): MUTUAL_PER_UNIT_J * v
        for (i, j), v in couplings.items()
        if v != 0.0
    }
    return i_x, mutuals


def layout_from_ising(
    model: IsingModel,
    params: QubitCircuitParams | None = None,
    ramp: RampSpec | None = None,
) -> NetworkLayout:
    """Physical layout realizing an Ising model with identical qubits."""
    params = params or QubitCircuitParams()
    i_x, mutuals = logical_to_physical(model.h, model.couplings)
    return NetworkLayout(
        params=(params,) * model.n, i_x=i_x, mutuals=mutuals,
        ramp=ramp or RampSpec(),
    )


def inverse_nor_layout(clamp_bit: int, ramp: RampSpec | None = None) -> NetworkLayout:
    """NOR gate plus an over-biased control qubit wired to its output.

    The control qubit Q4 carries |h| = 1.1 and a ferromagnetic (J = -1)
    coupling to the output Q3, pinning the output at ``clamp_bit`` so the
    gate anneals in the inverse direction.  In the energy convention a
    negative h favors the "1" state, so clamp_bit = 1 uses h4 = -1.1.
    """
    if clamp_bit not in (0, 1):
        raise ValueError("clamp bit must be 0 or 1")
    h4 = 1.1 if clamp_bit == 0 else -1.1
    model = IsingModel(
        4, (0.5, 0.5, 1.0, h4),
        {(0, 1): 0.5, (0, 2): 1.0, (1, 2): 1.0, (2, 3): -1.0},
    )
    return layout_from_ising(model, ramp=ramp)


def _well_positions(beta: np.ndarray) -> np.ndarray:
    """Well position x in [0, 0.5) (units of Phi0) solving x = beta sin(2 pi x).

    Zero below the bistability onset beta = 1/(2 pi).  Vectorized
    bisection; beta is an array of screening parameters L*Ic_eff/Phi0.
    """
    x_lo = np.zeros_like(beta)
    x_hi = np.full_like(beta, 0.5)
    bistable = beta > 1.0 / (2.0 * math.pi)
    for _ in range(60):
        mid = 0.5 * (x_lo + x_hi)
        f = mid - beta * np.sin(2.0 * math.pi * mid)
        high = f > 0
        x_hi = np.where(high, mid, x_hi)
        x_lo = np.where(high, x_lo, mid)
    return np.where(bistable, 0.5 * (x_lo + x_hi), 0.0)


def _bias_waveform(layout: NetworkLayout, cos_steps: np.ndarray) -> np.ndarray:
    """Per-step bias scaling I*(t)/I*(end): the compensation waveform that
    keeps bias and coupling energies in fixed proportion (see module
    docstring).  One shared waveform from the stiffest qubit's well curve
    (layouts here are homogeneous); falls back to a static bias when the
    ramp never ends in a bistable configuration."""
    beta_full = max(
        p.main_loop_inductance * 2.0 * p.ic / PHI0 for p in layout.params
    )
    grid = np.linspace(0.0, 1.0, 513)
    x_grid = _well_positions(beta_full * grid)
    x_end = float(np.interp(cos_steps[-1], grid, x_grid))
    if x_end <= 0.0:
        return np.ones_like(cos_steps)
    return np.interp(cos_steps, grid, x_grid) / x_end


#: Noise samples drawn per generator per block during integration; a fixed
#: constant so every shot consumes its stream identically no matter how
#: shots are batched.
_NOISE_BLOCK = 4096


def _integrate_batch(
    layout: NetworkLayout,
    noise: NoiseSpec,
    ramp: RampSpec,
    dt: float,
    seeds: Sequence[int],
    record_every: int = 0,
):
    """Fixed-step semi-implicit Euler integration of a batch of shots.

    Every shot carries its own noise generator, so results per shot are
    independent of how shots are grouped into batches.  Returns
    (final_iq[batch, n], bits list, traces), traces being recorded for
    single-shot batches only.
    """
    n = layout.n
    batch = len(seeds)
    hold = 1.0 / noise.sample_rate
    if dt > hold + 1e-30:
        raise ValueError("integrator step must not exceed the noise hold interval")
    n_steps = int(math.ceil(ramp.total_s / dt))
    n_samples = int(math.ceil(n_steps * dt / hold)) + 1

    gens = [np.random.Generator(np.random.PCG64(s)) for s in seeds]

    a = layout.inductance_matrix()
    a_inv = np.linalg.inv(a)
    phi_b = layout.bias_flux()
    iq_bias = a_inv @ phi_b
    inv_c = np.array([1.0 / (2.0 * p.c) for p in layout.params])
    g_eff = np.array([2.0 / p.r for p in layout.params])
    ic2 = np.array([2.0 * p.ic for p in layout.params])
    w = 2.0 * math.pi / PHI0

    times = np.arange(n_steps) * dt
    cos_steps = np.cos(np.pi * np.array([ramp.phi_t(t) for t in times]) / PHI0)
    bias_scale = _bias_waveform(layout, cos_steps)
    sample_of_step = np.minimum((times / hold).astype(np.int64), n_samples - 1)
    g_end = float(bias_scale[-1]) if n_steps else 1.0

    phi = np.zeros((batch, n))
    vel = np.zeros((batch, n))
    # Unrolled mat-vec coefficients: fixed evaluation order keeps per-shot
    # arithmetic identical for every batch size.
    ainv_rows = [[float(a_inv[i, j]) for j in range(n)] for i in range(n)]

    def current_iq(scale: float) -> np.ndarray:
        iq = np.empty_like(phi)
        for i in range(n):
            row = ainv_rows[i]
            acc = row[0] * phi[:, 0]
            for j in range(1, n):
                acc = acc + row[j] * phi[:, j]
            iq[:, i] = acc - scale * iq_bias[i]
        return iq

    traces = None
    record = record_every > 0 and batch == 1
    if record:
        n_rec = (max(n_steps, 1) - 1) // record_every + 2
        rec_t = np.empty(n_rec)
        rec_iq = np.empty((n_rec, n))
        rec_ph = np.empty((n_rec, 2 * n))
        rec_at = 0

    def snapshot(k: int, t: float):
        nonlocal rec_at
        rec_t[rec_at] = t
        rec_iq[rec_at] = current_iq(float(bias_scale[min(k, n_steps - 1)]) if n_steps else 1.0)[0]
        phi_c = math.pi + w * phi[0]
        phi_d = -math.pi * ramp.phi_t(t) / PHI0
        rec_ph[rec_at, 0::2] = phi_c + phi_d
        rec_ph[rec_at, 1::2] = phi_c - phi_d
        rec_at += 1

    barrier_limit = 10.0 * PHI0
    block_start = -1
    common = None
    for k in range(n_steps):
        if record and k % record_every == 0:
            snapshot(k, k * dt)
        s = int(sample_of_step[k])
        if block_start < 0 or s >= block_start + _NOISE_BLOCK:
            block_start = (s // _NOISE_BLOCK) * _NOISE_BLOCK
            take = min(_NOISE_BLOCK, n_samples - block_start)
            drawn = np.stack(
                [g.normal(0.0, noise.sigma, size=(take, 2 * n)) for g in gens]
            )
            common = drawn[:, :, 0::2] + drawn[:, :, 1::2]
        cn = common[:, s - block_start, :]
        iq = current_iq(float(bias_scale[k]))
        accel = (ic2 * cos_steps[k] * np.sin(w * phi) - iq - g_eff * vel + cn) * inv_c
        vel += dt * accel
        phi += dt * vel
        if k % 2000 == 1999:
            if not np.all(np.isfinite(phi)) or np.max(np.abs(phi)) > barrier_limit:
                raise ShotError(
                    f"integration diverged at t={k * dt:.3e}s: max|phi|="
                    f"{float(np.max(np.abs(phi))):.3e}"
                )
    if not np.all(np.isfinite(phi)) or (n_steps and np.max(np.abs(phi)) > barrier_limit):
        raise ShotError(f"integration diverged at end: phi={phi.tolist()}")

    if record:
        snapshot(n_steps, n_steps * dt)
        traces = (rec_t[:rec_at].copy(), rec_iq[:rec_at].copy(), rec_ph[:rec_at].copy())

    final_iq = current_iq(g_end)
    orient = np.array(layout.readout_orientation)
    bits = [tuple(1 if x > 0 else 0 for x in row * orient) for row in final_iq]
    return final_iq, bits, traces


def simulate_shot(
    layout: NetworkLayout,
    noise: NoiseSpec,
    ramp: RampSpec | None = None,
    dt: float = DT_DEFAULT,
    decimate: int = 10,
) -> TraceSet:
    """Integrate one annealing shot and return the recorded traces."""
    ramp = ramp or layout.ramp
    final_iq, bits, traces = _integrate_batch(
        layout, noise, ramp, dt, [noise.seed], record_every=max(1, decimate)
    )
    t, iq, phases = traces
    return TraceSet(
        t=t, iq=iq, phases=phases,
        final_iq=tuple(float(x) for x in final_iq[0]), bits=bits[0],
    )


@dataclass(frozen=True)
class EnsembleResult:
    """Final-state counts over an ensemble of independent shots."""

    shots: int
    counts: dict[tuple[int, ...], int]
    master_seed: int

    def to_text(self) -> str:
        lines = [f"shots {self.shots}", f"master_seed {self.master_seed}"]
        for bits, count in sorted(self.counts.items()):
            sigma = " ".join("+1" if b else "-1" for b in bits)
            lines.append(f"count {sigma} {count}")
        return "\n".join(lines) + "\n"


def _ensemble_chunk(args) -> list[tuple[int, tuple[int, ...]]]:
    layout, noise, ramp, dt, master_seed, indices = args
    indices = list(indices)
    seeds = [shot_seed(master_seed, k) for k in indices]
    _, bits, _ = _integrate_batch(layout, noise, ramp, dt, seeds)
    return list(zip(indices, bits))


def run_ensemble(
    layout: NetworkLayout,
    noise: NoiseSpec,
    ramp: RampSpec | None = None,
    n_shots: int = 200,
    master_seed: int = 0,
    dt: float = DT_DEFAULT,
    workers: int = 1,
) -> EnsembleResult:
    """Independent shots with derived per-shot noise seeds; deterministic
    counts regardless of worker count (shots in a chunk are integrated as
    one batch, each driving its own noise stream)."""
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    ramp = ramp or layout.ramp
    if workers <= 1:
        pairs = _ensemble_chunk((layout, noise, ramp, dt, master_seed, range(n_shots)))
    else:
        chunks = [
            (layout, noise, ramp, dt, master_seed, range(lo, n_shots, workers))
            for lo in range(min(workers, n_shots))
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            pairs = [p for chunk in pool.map(_ensemble_chunk, chunks) for p in chunk]
        pairs.sort(key=lambda kv: kv[0])
    counts: dict[tuple[int, ...], int] = {}
    for _, bits in pairs:
        counts[bits] = counts.get(bits, 0) + 1
    return EnsembleResult(shots=n_shots, counts=counts, master_seed=master_seed)


@dataclass(frozen=True)
class PotentialScan:
    """Sampled single-qubit potential and its local minima."""

    phi: np.ndarray
    u: np.ndarray
    minima_phi: tuple[float, ...]

    @property
    def n_minima(self) -> int:
        return len(self.minima_phi)


def static_potential(
    layout: NetworkLayout,
    phi_t: float,
    phi_x: float,
    qubit: int,
    neighbor_iq: Sequence[float] | None = None,
    span: float | None = None,
    points: int = 3001,
) -> PotentialScan:
    """Effective 1-D potential of one qubit with neighbors frozen.

    ``phi_x`` is the externally applied main-loop flux; frozen neighbor
    circulating currents add their mutual flux on top.  Counts strict
    local minima over the sampled grid, which spans the applied flux
    plus 1.5 flux quanta on either side unless ``span`` is given.
    """
    if not 0 <= qubit < layout.n:
        raise ValueError("qubit index out of range")
    p = layout.params[qubit]
    l_total = p.main_loop_inductance
    ej = (PHI0 / (2.0 * math.pi)) * 2.0 * p.ic * math.cos(math.pi * phi_t / PHI0)
    ext = phi_x
    if neighbor_iq is not None:
        if len(neighbor_iq) != layout.n:
            raise ValueError("one frozen current per qubit required")
        for (i, j), m in layout.mutuals.items():
            if i == qubit:
                ext += m * neighbor_iq[j]
            elif j == qubit:
                ext += m * neighbor_iq[i]
    if span is None:
        span = abs(ext) + 1.5 * PHI0
    phi = np.linspace(-span, span, points)
    u = (phi - ext) ** 2 / (2.0 * l_total) + ej * np.cos(2.0 * math.pi * phi / PHI0)
    interior = (u[1:-1] < u[:-2]) & (u[1:-1] < u[2:])
    minima = tuple(float(x) for x in phi[1:-1][interior])
    return PotentialScan(phi=phi, u=u, minima_phi=minima)


def write_trace_csv(fh, trace: TraceSet) -> None:
    """Plot-ready CSV: t,Iq_1..Iq_n."""
    n = trace.iq.shape[1]
    fh.write("t," + ",".join(f"Iq_{k + 1}" for k in range(n)) + "\n")
    for row_t, row_iq in zip(trace.t, trace.iq):
        fh.write(f"{row_t!r}," + ",".join(repr(float(x)) for x in row_iq) + "\n")
