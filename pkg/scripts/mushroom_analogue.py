"""Correlated errors trip the unphysical-root alarm.

Classifier 2 copies classifier 1's correctness with probability rho; sweeps
rho and counts alarms over seeds.
"""
import argparse

from agti.solver import unphysical_report
from agti.synth import GeneratorSpec, evaluate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=100_000)
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()

    for rho in (0.0, 0.25, 0.5, 0.75, 0.9):
        alarms, example = 0, None
        for seed in range(args.seeds):
            spec = GeneratorSpec(0.5, (0.65, 0.92, 0.88), (0.70, 0.90, 0.82), args.size, seed, (0, 1, rho))
            rep = evaluate(spec)
            if rep.alarms:
                alarms += 1
                if example is None and rep.pair is not None:
                    example = unphysical_report(rep.pair.root_a)
        shown = ", ".join(f"{k}={v:.3f}" for k, v in example) if example else ""
        print(f"rho={rho:<5} alarms {alarms:>2}/{args.seeds}  {shown}")


if __name__ == "__main__":
    main()
