"""Ising spin models over {-1,+1}: energy, clamping, exact ground-state search.

Energy convention, fixed once for the whole package:

    H(s) = sum_i h[i] * s[i]  +  sum_{i<j} J[(i,j)] * s[i] * s[j]

Each unordered pair is counted exactly once.  Bits map to spins as
1 <-> +1 and 0 <-> -1.  Spin indices are 0-based everywhere, including
the text model format; circuit diagrams in the literature usually number
qubits from 1, so Q_k corresponds to spin index k-1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

#: Absolute tolerance for deciding energy degeneracy.  Coefficients in this
#: package are small rationals, so floating error sits far below this.
GROUND_TOL = 1e-9

#: Default spin-count cap for exhaustive enumeration (2**26 states runs in
#: seconds at desk scale).
BRUTE_FORCE_CAP = 26

Bits = Sequence[int]
SpinState = tuple[int, ...]


class DimensionError(ValueError):
    """State length does not match the model's spin count."""


class SizeCapError(ValueError):
    """Model exceeds the exhaustive-enumeration cap."""


class ModelFormatError(ValueError):
    """Malformed model text; carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _canonical_couplings(n: int, couplings) -> dict[tuple[int, int], float]:
    out: dict[tuple[int, int], float] = {}
    for key, value in dict(couplings).items():
        i, j = key
        if i == j:
            raise ValueError(f"self-coupling ({i},{i}) not allowed")
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"coupling ({i},{j}) out of range for n={n}")
        if i > j:
            i, j = j, i
        if (i, j) in out:
            raise ValueError(f"duplicate coupling for pair ({i},{j})")
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"non-finite coupling for pair ({i},{j})")
        out[(i, j)] = value
    return out


@dataclass(frozen=True)
class IsingModel:
    """Biases ``h`` and pairwise couplings ``couplings`` over ``n`` spins.

    Treat instances as immutable: the couplings dict is canonicalized
    (keys with i < j) at construction and must not be mutated afterwards.
    """

    n: int
    h: tuple[float, ...]
    couplings: dict[tuple[int, int], float]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("spin count must be >= 0")
        h = tuple(float(x) for x in self.h)
        if len(h) != self.n:
            raise DimensionError(f"expected {self.n} biases, got {len(h)}")
        if not all(math.isfinite(x) for x in h):
            raise ValueError("non-finite bias")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "couplings", _canonical_couplings(self.n, self.couplings))

    def coupling(self, i: int, j: int) -> float:
        """Coupling for the unordered pair {i,j}; 0.0 if absent."""
        if i > j:
            i, j = j, i
        return self.couplings.get((i, j), 0.0)

    def scaled(self, factor: float) -> "IsingModel":
        return IsingModel(
            self.n,
            tuple(factor * x for x in self.h),
            {k: factor * v for k, v in self.couplings.items()},
        )


def check_state(model: IsingModel, state: Sequence[int]) -> SpinState:
    if len(state) != model.n:
        raise DimensionError(f"state has {len(state)} spins, model has {model.n}")
    out = tuple(int(s) for s in state)
    if any(s not in (-1, 1) for s in out):
        raise ValueError("spins must be -1 or +1")
    return out


def energy(model: IsingModel, state: Sequence[int]) -> float:
    """Evaluate H(s) exactly in double precision."""
    s = check_state(model, state)
    total = 0.0
    for hi, si in zip(model.h, s):
        total += hi * si
    for (i, j), v in model.couplings.items():
        total += v * s[i] * s[j]
    return total


def bits_to_spins(bits: Bits) -> SpinState:
    """Map bits to spins, 1 -> +1 and 0 -> -1."""
    out = []
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {b!r}")
        out.append(1 if b else -1)
    return tuple(out)


def spins_to_bits(state: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`bits_to_spins`."""
    out = []
    for s in state:
        if s not in (-1, 1):
            raise ValueError(f"spin must be -1 or +1, got {s!r}")
        out.append(1 if s == 1 else 0)
    return tuple(out)


def _check_clamps(n: int, clamps: Mapping[int, int]) -> dict[int, int]:
    out = {}
    for idx, bit in clamps.items():
        idx = int(idx)
        if not 0 <= idx < n:
            raise ValueError(f"clamp index {idx} out of range for n={n}")
        if bit not in (0, 1):
            raise ValueError(f"clamp value must be a bit, got {bit!r}")
        out[idx] = int(bit)
    return out


def clamp_fold(model: IsingModel, clamps: Mapping[int, int]) -> tuple[IsingModel, float]:
    """Fold clamped spins out of the model algebraically.

    Returns ``(reduced, offset)`` such that for every assignment of the
    free spins, ``energy(reduced, free) + offset == energy(model, merged)``
    where ``merged`` is the free assignment with the clamped bits spliced
    back in (see :func:`merge_spins`).  Free spins keep their relative
    order.
    """
    clamps = _check_clamps(model.n, clamps)
    if not clamps:
        return model, 0.0
    sigma = {i: (1 if b else -1) for i, b in clamps.items()}
    keep = [i for i in range(model.n) if i not in clamps]
    remap = {old: new for new, old in enumerate(keep)}
    offset = 0.0
    h2 = [model.h[i] for i in keep]
    for i, s in sigma.items():
        offset += model.h[i] * s
    j2: dict[tuple[int, int], float] = {}
    for (i, j), v in model.couplings.items():
        ci, cj = i in sigma, j in sigma
        if ci and cj:
            offset += v * sigma[i] * sigma[j]
        elif ci:
            h2[remap[j]] += v * sigma[i]
        elif cj:
            h2[remap[i]] += v * sigma[j]
        else:
            j2[(remap[i], remap[j])] = v
    return IsingModel(len(keep), tuple(h2), j2), offset


def free_indices(n: int, clamps: Mapping[int, int]) -> tuple[int, ...]:
    """Original indices of the free spins of a fold, in reduced order."""
    return tuple(i for i in range(n) if i not in clamps)


def merge_spins(n: int, clamps: Mapping[int, int], free_state: Sequence[int]) -> SpinState:
    """Splice a reduced state and the clamped bits back into a full state."""
    clamps = _check_clamps(n, clamps)
    keep = free_indices(n, clamps)
    if len(free_state) != len(keep):
        raise DimensionError(
            f"free state has {len(free_state)} spins, expected {len(keep)}"
        )
    full = [0] * n
    for i, b in clamps.items():
        full[i] = 1 if b else -1
    for idx, s in zip(keep, free_state):
        full[idx] = int(s)
    return tuple(full)


def state_from_code(n: int, code: int) -> SpinState:
    """Spin state for an enumeration code; bit k of the code drives spin k."""
    return tuple(1 if (code >> k) & 1 else -1 for k in range(n))


def _energies_for_codes(model: IsingModel, codes: np.ndarray) -> np.ndarray:
    """Vectorized H over an array of enumeration codes."""
    cols: dict[int, np.ndarray] = {}

    def col(i: int) -> np.ndarray:
        arr = cols.get(i)
        if arr is None:
            arr = (((codes >> i) & 1) * 2 - 1).astype(np.int8)
            cols[i] = arr
        return arr

    e = np.zeros(codes.shape[0], dtype=np.float64)
    for i, hv in enumerate(model.h):
        if hv != 0.0:
            e += hv * col(i)
    for (i, j), v in model.couplings.items():
        if v != 0.0:
            e += v * (col(i) * col(j))
    return e


@dataclass(frozen=True)
class GroundReport:
    """Exhaustive ground-state search result.

    ``gap`` is the distance from e0 to the first level above the
    degeneracy tolerance, ``inf`` when every state is ground.
    """

    e0: float
    states: tuple[SpinState, ...]
    gap: float

    @property
    def degeneracy(self) -> int:
        return len(self.states)


def brute_force_ground(
    model: IsingModel,
    cap: int = BRUTE_FORCE_CAP,
    tol: float = GROUND_TOL,
    chunk_bits: int = 20,
) -> GroundReport:
    """Enumerate all 2**n states; exact e0, the complete ground list, and gap.

    The enumeration is processed in chunks; results do not depend on the
    chunk size.  Ground states are returned in ascending code order
    (spin 0 is the least significant bit of the code).
    """
    if model.n > cap:
        raise SizeCapError(f"n={model.n} exceeds enumeration cap {cap}")
    if model.n == 0:
        return GroundReport(0.0, ((),), math.inf)
    total = 1 << model.n
    chunk = 1 << min(chunk_bits, model.n)

    e0 = math.inf
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        e0 = min(e0, float(_energies_for_codes(model, codes).min()))

    ground_codes: list[int] = []
    e1 = math.inf
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        e = _energies_for_codes(model, codes)
        mask = e <= e0 + tol
        ground_codes.extend(int(c) for c in codes[mask])
        above = e[~mask]
        if above.size:
            e1 = min(e1, float(above.min()))
    states = tuple(state_from_code(model.n, c) for c in ground_codes)
    gap = math.inf if math.isinf(e1) else e1 - e0
    return GroundReport(e0, states, gap)


# ---------------------------------------------------------------------------
# Text model format: `n <count>` first, then `h <i> <v>` / `J <i> <j> <v>`
# lines, 0-based, i<j, '#' comments.  The writer emits sorted lines; the
# reader accepts h/J lines in any order.
# ---------------------------------------------------------------------------

def format_model(model: IsingModel) -> str:
    lines = [f"n {model.n}"]
    for i, hv in enumerate(model.h):
        if hv != 0.0:
            lines.append(f"h {i} {hv!r}")
    for (i, j) in sorted(model.couplings):
        lines.append(f"J {i} {j} {model.couplings[(i, j)]!r}")
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> IsingModel:
    n: int | None = None
    h: list[float] = []
    seen_h: set[int] = set()
    couplings: dict[tuple[int, int], float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind = tokens[0]
        if kind == "n":
            if n is not None:
                raise ModelFormatError("duplicate 'n' line", lineno)
            if len(tokens) != 2:
                raise ModelFormatError("expected 'n <count>'", lineno)
            try:
                n = int(tokens[1])
            except ValueError:
                raise ModelFormatError(f"bad spin count {tokens[1]!r}", lineno) from None
            if n < 0:
                raise ModelFormatError("spin count must be >= 0", lineno)
            h = [0.0] * n
        elif kind == "h":
            if n is None:
                raise ModelFormatError("'h' line before 'n'", lineno)
            if len(tokens) != 3:
                raise ModelFormatError("expected 'h <i> <value>'", lineno)
            try:
                i, value = int(tokens[1]), float(tokens[2])
            except ValueError:
                raise ModelFormatError("bad 'h' line", lineno) from None
            if not 0 <= i < n:
                raise ModelFormatError(f"spin index {i} out of range", lineno)
            if i in seen_h:
                raise ModelFormatError(f"duplicate bias for spin {i}", lineno)
            if not math.isfinite(value):
                raise ModelFormatError("non-finite bias", lineno)
            seen_h.add(i)
            h[i] = value
        elif kind == "J":
            if n is None:
                raise ModelFormatError("'J' line before 'n'", lineno)
            if len(tokens) != 4:
                raise ModelFormatError("expected 'J <i> <j> <value>'", lineno)
            try:
                i, j, value = int(tokens[1]), int(tokens[2]), float(tokens[3])
            except ValueError:
                raise ModelFormatError("bad 'J' line", lineno) from None
            if not (0 <= i < n and 0 <= j < n):
                raise ModelFormatError(f"coupling ({i},{j}) out of range", lineno)
            if i >= j:
                raise ModelFormatError(f"coupling requires i < j, got ({i},{j})", lineno)
            if (i, j) in couplings:
                raise ModelFormatError(f"duplicate coupling ({i},{j})", lineno)
            if not math.isfinite(value):
                raise ModelFormatError("non-finite coupling", lineno)
            couplings[(i, j)] = value
        else:
            raise ModelFormatError(f"unknown directive {kind!r}", lineno)
    if n is None:
        raise ModelFormatError("missing 'n' line")
    return IsingModel(n, tuple(h), couplings)


def read_model(path) -> IsingModel:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def write_model(path, model: IsingModel) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_model(model))
