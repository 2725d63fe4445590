"""Command-line driver: gate emission, network synthesis, annealing runs,
factoring/multiplication, circuit-level ensembles, verification, capacity.

Exit codes: 0 success, 1 usage, 2 data/parse, 3 verification failure,
4 numeric instability.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace

from . import anneal as annealing
from . import fluxsim
from .capacity import CapacityInput, capacity_estimate
from .gates import GateTemplate, and_gate, half_adder_template, nor_gate, verify_gate
from .ising import (
    BRUTE_FORCE_CAP,
    ModelFormatError,
    SizeCapError,
    brute_force_ground,
    clamp_fold,
    format_model,
    merge_spins,
    read_model,
    spins_to_bits,
)
from .multiplier import (
    BIAS,
    FOLD,
    MultiplierNetwork,
    bias_ground_energy,
    build_multiplier,
    clamp_product,
    decode,
    factor_clamp_assignment,
    product_clamp_assignment,
)
from .synth import SynthesisError, mult_unit_gate

DEFAULT_SEED = 1


class UsageError(ValueError):
    pass


class VerificationFailure(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# gates emit
# ---------------------------------------------------------------------------

def _gate_by_kind(kind: str) -> GateTemplate:
    if kind == "nor":
        return nor_gate()
    if kind == "and":
        return and_gate()
    if kind == "half-adder":
        return half_adder_template()
    if kind == "mult-unit":
        return mult_unit_gate()
    raise UsageError(f"unknown gate kind {kind!r}")


def _ports_sidecar(template: GateTemplate) -> str:
    lines = [f"port {name} {idx}" for name, idx in sorted(template.ports.items())]
    for bits in template.valid_set:
        lines.append("valid " + " ".join(str(b) for b in bits))
    lines.append(f"gap {template.gap!r}")
    return "\n".join(lines) + "\n"


def cmd_gates_emit(args) -> int:
    template = _gate_by_kind(args.kind)
    report = verify_gate(template)
    if not report.passed:
        raise VerificationFailure(
            f"{args.kind}: ground manifold check failed ({len(report.offending)} offending states)"
        )
    prefix = args.out or args.kind
    _write(prefix + ".model", format_model(template.model))
    _write(prefix + ".ports", _ports_sidecar(template))
    print(f"wrote {prefix}.model and {prefix}.ports")
    print(f"e0 {report.e0!r}")
    print(f"gap {report.achieved_gap!r}")
    return 0


# ---------------------------------------------------------------------------
# synth mult
# ---------------------------------------------------------------------------

def _roles_sidecar(net: MultiplierNetwork) -> str:
    lines = []
    for label, spins in (("A", net.factor_a), ("B", net.factor_b), ("P", net.product)):
        for bit, spin in enumerate(spins):
            lines.append(f"role {label} {bit} {spin}")
    return "\n".join(lines) + "\n"


def cmd_synth_mult(args) -> int:
    net = build_multiplier(args.bits_a, args.bits_b, chains=args.chains,
                           chain_strength=args.chain_strength)
    prefix = args.out or f"mult{args.bits_a}x{args.bits_b}"
    _write(prefix + ".model", format_model(net.model))
    _write(prefix + ".roles", _roles_sidecar(net))
    print(f"wrote {prefix}.model and {prefix}.roles")
    print(f"qubits {net.model.n}")
    print(f"cells {net.n_cells}")
    print(f"chain_spins {net.n_chain_spins}")
    print(f"expected_e0 {net.expected_e0!r}")
    return 0


# ---------------------------------------------------------------------------
# anneal / factor / multiply
# ---------------------------------------------------------------------------

def _schedule_from(args) -> annealing.Schedule:
    return annealing.Schedule(kind=args.schedule, t_hot=args.t_hot,
                              t_cold=args.t_cold, sweeps=args.sweeps)


def _add_anneal_flags(parser, shots_default=200):
    parser.add_argument("--shots", type=int, default=shots_default)
    parser.add_argument("--sweeps", type=int, default=2000)
    parser.add_argument("--t-hot", type=float, default=3.0)
    parser.add_argument("--t-cold", type=float, default=0.05)
    parser.add_argument("--schedule", choices=[annealing.GEOMETRIC, annealing.LINEAR],
                        default=annealing.GEOMETRIC)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--csv", metavar="PATH", default=None)


def cmd_anneal(args) -> int:
    model = read_model(args.model)
    reference = args.reference_e0
    if args.brute_force_reference:
        reference = brute_force_ground(model, cap=args.cap).e0
    print(f"master_seed {args.seed}")
    summary, shots = annealing.run_shots(
        model, _schedule_from(args), args.shots, args.seed,
        reference_e0=reference, workers=args.workers, keep_shots=True,
    )
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            annealing.write_shot_csv(fh, shots, reference_e0=reference)
        print(f"wrote {args.csv}")
    sys.stdout.write(summary.to_text())
    return 0


def _default_widths(p: int, balanced: bool) -> tuple[int, int]:
    bits = max(1, p.bit_length())
    if balanced:
        bits = max(1, math.ceil(bits / 2))
    return bits, bits


def cmd_factor(args) -> int:
    if args.p < 0:
        raise UsageError("P must be >= 0")
    n1, n2 = _default_widths(args.p, args.balanced)
    if args.bits_a:
        n1 = args.bits_a
    if args.bits_b:
        n2 = args.bits_b
    if args.p >= (1 << (n1 + n2)):
        raise UsageError(f"P={args.p} does not fit in {n1}+{n2} product bits")
    net = build_multiplier(n1, n2, chains=args.chains)
    method = BIAS if args.method == "bias" else FOLD
    clamped, offset = clamp_product(net, args.p, method=method)
    if method == FOLD:
        reference = net.expected_e0 - offset
        clamps = product_clamp_assignment(net, args.p)
    else:
        reference = bias_ground_energy(net)
        clamps = {}

    print(f"master_seed {args.seed}")
    print(f"network {n1}x{n2} qubits {net.model.n} clamped {clamped.n}")
    print(f"reference_e0 {reference!r}")
    summary, shots = annealing.run_shots(
        clamped, _schedule_from(args), args.shots, args.seed,
        reference_e0=reference, workers=args.workers, keep_shots=True,
    )

    def full_state(state):
        return merge_spins(net.model.n, clamps, state) if clamps else state

    outcomes = [decode(net, full_state(r.state)) for r in shots]
    hist: dict[str, int] = {}
    hits: dict[str, int] = {}
    for out in outcomes:
        key = f"({out.m},{out.n})"
        hist[key] = hist.get(key, 0) + 1
        if out.is_ground:
            hits[key] = hits.get(key, 0) + 1
    print(f"shots {summary.shots}")
    print(f"best_energy {summary.best_energy!r}")
    print(f"ground_hits {summary.ground_hits}")
    print(f"ground_hit_rate {summary.ground_hit_rate!r}")
    for key in sorted(hist, key=lambda k: (-hist[k], k)):
        print(f"count {key} {hist[key]} ground {hits.get(key, 0)}")
    if args.csv:
        def decoder(state):
            out = decode(net, full_state(state))
            return out.m, out.n, out.p
        with open(args.csv, "w", encoding="utf-8") as fh:
            annealing.write_shot_csv(fh, shots, reference_e0=reference, decoder=decoder)
        print(f"wrote {args.csv}")
    return 0


def cmd_multiply(args) -> int:
    if args.m < 0 or args.n < 0:
        raise UsageError("factors must be >= 0")
    n1 = args.bits_a or max(1, args.m.bit_length())
    n2 = args.bits_b or max(1, args.n.bit_length())
    if args.m >= (1 << n1):
        raise UsageError(f"M={args.m} does not fit in {n1} bits")
    if args.n >= (1 << n2):
        raise UsageError(f"N={args.n} does not fit in {n2} bits")
    net = build_multiplier(n1, n2, chains=args.chains)
    clamps = factor_clamp_assignment(net, args.m, args.n)
    clamped, offset = clamp_fold(net.model, clamps)
    reference = net.expected_e0 - offset
    print(f"master_seed {args.seed}")
    summary, shots = annealing.run_shots(
        clamped, _schedule_from(args), args.shots, args.seed,
        reference_e0=reference, workers=args.workers, keep_shots=True,
    )
    best = min(shots, key=lambda r: (r.energy, r.index))
    out = decode(net, merge_spins(net.model.n, clamps, best.state))
    print(f"product {out.p}")
    print(f"ground_reached {out.is_ground}")
    print(f"ground_hit_rate {summary.ground_hit_rate!r}")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _parse_ports_sidecar(path: str):
    ports: dict[str, int] = {}
    valid: list[tuple[int, ...]] = []
    gap = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            try:
                if tokens[0] == "port" and len(tokens) == 3:
                    ports[tokens[1]] = int(tokens[2])
                elif tokens[0] == "valid":
                    valid.append(tuple(int(b) for b in tokens[1:]))
                elif tokens[0] == "gap" and len(tokens) == 2:
                    gap = float(tokens[1])
                else:
                    raise ValueError("bad directive")
            except ValueError:
                raise ModelFormatError(f"bad sidecar line {line!r}", lineno) from None
    return ports, tuple(valid), gap


def cmd_verify(args) -> int:
    model = read_model(args.model)
    report = brute_force_ground(model, cap=args.cap)
    print(f"spins {model.n}")
    print(f"e0 {report.e0!r}")
    print(f"ground_states {report.degeneracy}")
    print(f"gap {report.gap!r}")
    if not args.ports:
        print("pass true")
        return 0
    ports, valid, declared_gap = _parse_ports_sidecar(args.ports)
    for name, idx in sorted(ports.items()):
        if not 0 <= idx < model.n:
            raise ModelFormatError(f"port {name!r} index {idx} out of range")
    ground_bits = sorted(spins_to_bits(s) for s in report.states)
    for bits in ground_bits[:32]:
        decoded = " ".join(f"{name}={bits[idx]}" for name, idx in sorted(ports.items()))
        print(f"ground {''.join(map(str, bits))} {decoded}")
    passed = True
    if valid:
        passed = ground_bits == sorted(valid)
        print(f"valid_set_match {str(passed).lower()}")
    if declared_gap is not None:
        gap_ok = report.gap >= declared_gap - 1e-9
        print(f"gap_met {str(gap_ok).lower()}")
        passed = passed and gap_ok
    print(f"pass {str(passed).lower()}")
    if not passed:
        raise VerificationFailure(f"{args.model}: ground manifold or gap mismatch")
    return 0


# ---------------------------------------------------------------------------
# circuit nor-inverse
# ---------------------------------------------------------------------------

def cmd_circuit_nor_inverse(args) -> int:
    ramp = fluxsim.RampSpec(ramp_s=args.ramp_ns * 1e-9, hold_s=args.hold_ns * 1e-9)
    layout = fluxsim.inverse_nor_layout(args.clamp, ramp=ramp)
    noise = fluxsim.NoiseSpec(sigma=args.noise_sigma * 1e-6)
    dt = args.dt_fs * 1e-15
    print(f"master_seed {args.seed}")
    result = fluxsim.run_ensemble(layout, noise, ramp=ramp, n_shots=args.shots,
                                  master_seed=args.seed, dt=dt, workers=args.workers)
    sys.stdout.write(result.to_text())
    violations = sum(
        c for bits, c in result.counts.items() if (1 - (bits[0] | bits[1])) != bits[2]
    )
    clamp_misses = sum(
        c for bits, c in result.counts.items()
        if bits[2] != args.clamp or bits[3] != args.clamp
    )
    print(f"nor_violations {violations}")
    print(f"clamp_misses {clamp_misses}")
    if args.trace:
        rows = []
        from .seeds import shot_seed
        for k in range(args.shots):
            shot_noise = replace(noise, seed=shot_seed(args.seed, k))
            tr = fluxsim.simulate_shot(layout, shot_noise, ramp=ramp, dt=dt,
                                       decimate=args.decimate)
            rows.append(tr)
        with open(args.trace, "w", encoding="utf-8") as fh:
            n = rows[0].iq.shape[1]
            fh.write("t," + ",".join(f"Iq_{k + 1}" for k in range(n)) + "\n")
            for k, tr in enumerate(rows):
                offset = k * ramp.total_s
                for row_t, row_iq in zip(tr.t, tr.iq):
                    fh.write(f"{row_t + offset!r},"
                             + ",".join(repr(float(x)) for x in row_iq) + "\n")
        print(f"wrote {args.trace}")
    return 0


# ---------------------------------------------------------------------------
# capacity
# ---------------------------------------------------------------------------

def cmd_capacity(args) -> int:
    inp = CapacityInput(unit_w_um=args.unit_w, unit_h_um=args.unit_h,
                        chip_mm=args.chip_mm, margin_um=args.margin_um,
                        chips=args.chips)
    rep = capacity_estimate(inp)
    print(f"units_across {rep.units_across}")
    print(f"units_down {rep.units_down}")
    print(f"units_side {rep.units_side}")
    print(f"units_per_chip {rep.units_per_chip}")
    print(f"total_units {rep.total_units}")
    print(f"product_bits {rep.product_bits}")
    return 0


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="qafactor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    seed_parent = _Parser(add_help=False)
    seed_parent.add_argument("--seed", type=int, default=DEFAULT_SEED,
                             help="master seed (printed; derives per-shot seeds)")

    p_gates = sub.add_parser("gates", parents=[seed_parent])
    gates_sub = p_gates.add_subparsers(dest="gates_command", required=True)
    p_emit = gates_sub.add_parser("emit", parents=[seed_parent])
    p_emit.add_argument("kind", choices=["nor", "and", "half-adder", "mult-unit"])
    p_emit.add_argument("--out", default=None, help="output path prefix")
    p_emit.set_defaults(func=cmd_gates_emit)

    p_synth = sub.add_parser("synth", parents=[seed_parent])
    synth_sub = p_synth.add_subparsers(dest="synth_command", required=True)
    p_mult = synth_sub.add_parser("mult", parents=[seed_parent])
    p_mult.add_argument("--bits-a", type=int, required=True)
    p_mult.add_argument("--bits-b", type=int, required=True)
    p_mult.add_argument("--chains", action="store_true")
    p_mult.add_argument("--chain-strength", type=float, default=1.0)
    p_mult.add_argument("--out", default=None)
    p_mult.set_defaults(func=cmd_synth_mult)

    p_anneal = sub.add_parser("anneal", parents=[seed_parent])
    p_anneal.add_argument("model")
    _add_anneal_flags(p_anneal)
    p_anneal.add_argument("--reference-e0", type=float, default=None)
    p_anneal.add_argument("--brute-force-reference", action="store_true")
    p_anneal.add_argument("--cap", type=int, default=BRUTE_FORCE_CAP)
    p_anneal.set_defaults(func=cmd_anneal)

    p_factor = sub.add_parser("factor", parents=[seed_parent])
    p_factor.add_argument("p", type=int)
    p_factor.add_argument("--bits-a", type=int, default=None)
    p_factor.add_argument("--bits-b", type=int, default=None)
    p_factor.add_argument("--balanced", action="store_true",
                          help="use ceil(bitlen/2) factor widths (semiprime work)")
    p_factor.add_argument("--method", choices=["fold", "bias"], default="fold")
    p_factor.add_argument("--chains", action="store_true")
    _add_anneal_flags(p_factor)
    p_factor.set_defaults(func=cmd_factor)

    p_mul = sub.add_parser("multiply", parents=[seed_parent])
    p_mul.add_argument("m", type=int)
    p_mul.add_argument("n", type=int)
    p_mul.add_argument("--bits-a", type=int, default=None)
    p_mul.add_argument("--bits-b", type=int, default=None)
    p_mul.add_argument("--chains", action="store_true")
    _add_anneal_flags(p_mul, shots_default=50)
    p_mul.set_defaults(func=cmd_multiply)

    p_verify = sub.add_parser("verify", parents=[seed_parent])
    p_verify.add_argument("model")
    p_verify.add_argument("--ports", default=None, help="ports sidecar to check against")
    p_verify.add_argument("--cap", type=int, default=BRUTE_FORCE_CAP)
    p_verify.set_defaults(func=cmd_verify)

    p_circ = sub.add_parser("circuit", parents=[seed_parent])
    circ_sub = p_circ.add_subparsers(dest="circuit_command", required=True)
    p_nor = circ_sub.add_parser("nor-inverse", parents=[seed_parent])
    p_nor.add_argument("--clamp", type=int, choices=[0, 1], required=True)
    p_nor.add_argument("--shots", type=int, default=200)
    p_nor.add_argument("--ramp-ns", type=float, default=fluxsim.RAMP_DEFAULT * 1e9)
    p_nor.add_argument("--hold-ns", type=float, default=fluxsim.HOLD_DEFAULT * 1e9)
    p_nor.add_argument("--dt-fs", type=float, default=fluxsim.DT_DEFAULT * 1e15)
    p_nor.add_argument("--noise-sigma", type=float, default=0.13,
                       help="per-junction noise std in uA")
    p_nor.add_argument("--trace", metavar="PATH", default=None)
    p_nor.add_argument("--decimate", type=int, default=10)
    p_nor.add_argument("--workers", type=int, default=1)
    p_nor.set_defaults(func=cmd_circuit_nor_inverse)

    p_cap = sub.add_parser("capacity", parents=[seed_parent])
    p_cap.add_argument("--unit-w", type=float, default=515.0)
    p_cap.add_argument("--unit-h", type=float, default=530.0)
    p_cap.add_argument("--chip-mm", type=float, default=19.0)
    p_cap.add_argument("--margin-um", type=float, default=200.0)
    p_cap.add_argument("--chips", type=int, default=100)
    p_cap.set_defaults(func=cmd_capacity)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ModelFormatError, SizeCapError, SynthesisError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 3
    except (fluxsim.ShotError, ArithmeticError) as exc:
        print(f"numeric instability: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
