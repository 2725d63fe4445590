#!/usr/bin/env python3
"""Freeze-out study: inverse-NOR error rates versus barrier ramp duration.

A coupling contributes M * Iq(t)^2 to the realized spin Hamiltonian while
the single-qubit barrier grows much faster along the same ramp, so the
dynamics stop reordering at a fixed effective coupling scale (about
1.5 kT at these circuit values) almost independently of ramp duration.
This script measures that saturation: NOR-violation and clamp-miss rates
barely improve as the ramp slows by an order of magnitude.
"""
import argparse
import time

from qafactor.fluxsim import NoiseSpec, RampSpec, inverse_nor_layout, run_ensemble


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shots", type=int, default=64)
    ap.add_argument("--seed", type=int, default=5150)
    ap.add_argument("--ramps-ns", type=float, nargs="+",
                    default=[1.0, 2.0, 4.0, 8.0, 16.0])
    args = ap.parse_args()

    print("ramp_ns  clamp0_violations  clamp0_(1,1)_share  clamp1_correct   time")
    for ramp_ns in args.ramps_ns:
        ramp = RampSpec(ramp_s=ramp_ns * 1e-9)
        t0 = time.time()
        r0 = run_ensemble(inverse_nor_layout(0, ramp=ramp), NoiseSpec(), ramp=ramp,
                          n_shots=args.shots, master_seed=args.seed)
        r1 = run_ensemble(inverse_nor_layout(1, ramp=ramp), NoiseSpec(), ramp=ramp,
                          n_shots=args.shots, master_seed=args.seed)
        violations = sum(c for bits, c in r0.counts.items()
                         if (1 - (bits[0] | bits[1])) != bits[2])
        share11 = sum(c for bits, c in r0.counts.items() if bits[:3] == (1, 1, 0))
        correct1 = r1.counts.get((0, 0, 1, 1), 0)
        print(f"{ramp_ns:7.1f}  {violations:5d}/{args.shots:<11d} "
              f"{share11:5d}/{args.shots:<13d} {correct1:5d}/{args.shots:<8d} "
              f"{time.time() - t0:5.1f}s")


if __name__ == "__main__":
    main()
