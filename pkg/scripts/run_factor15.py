#!/usr/bin/env python3
"""Flagship inverse run: factor 15 on a 4x4 multiplier network.

Clamps the product register to 15, anneals 200 shots, and tabulates the
decoded (M, N) pairs of the ground-hit shots.
"""
import argparse
import time

from qafactor.anneal import Schedule, format_counts_table, run_shots
from qafactor.ising import clamp_fold
from qafactor.multiplier import build_multiplier, decode_reduced, product_clamp_assignment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=15)
    ap.add_argument("--bits", type=int, default=4)
    ap.add_argument("--shots", type=int, default=200)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--sweeps", type=int, default=2000)
    args = ap.parse_args()

    net = build_multiplier(args.bits, args.bits)
    clamps = product_clamp_assignment(net, args.p)
    reduced, offset = clamp_fold(net.model, clamps)
    reference = net.expected_e0 - offset
    print(f"network {args.bits}x{args.bits}: {net.model.n} qubits, "
          f"{reduced.n} free after clamping P={args.p}")
    print(f"master_seed {args.seed}  reference_e0 {reference}")

    t0 = time.time()
    summary, shots = run_shots(reduced, Schedule(sweeps=args.sweeps), args.shots,
                               args.seed, reference_e0=reference, keep_shots=True)
    print(f"{args.shots} shots in {time.time() - t0:.1f}s, "
          f"ground-hit rate {summary.ground_hit_rate:.3f}")

    hist = {}
    for r in shots:
        out = decode_reduced(net, clamps, r.state)
        key = (out.m, out.n, out.is_ground)
        hist[key] = hist.get(key, 0) + 1
    rows = sorted({(m, n) for m, n, _ in hist})
    labels = [f"({m},{n})" for m, n in rows]
    counts = [[hist.get((m, n, True), 0), hist.get((m, n, False), 0)] for m, n in rows]
    print(format_counts_table(labels, ["ground", "excited"], counts, corner="(M,N)"))


if __name__ == "__main__":
    main()
