"""Adiabaticity margins for laboratory chirp parameters.

For a start frequency nu0 and decay rate kappa, prints nu0/kappa, the end
ratio nu(T)/kappa for a list of chirp durations, whether both conditions hold,
and the shortest duration that satisfies the end condition.

Usage: python3 scripts/feasibility.py [--nu0 1e6] [--kappa 1e3] [--durations 2e-3 5e-3 1e-2]
"""
import argparse
import math

from chirposc.analytic import ExpChirpParams, adiabatic_conditions
from chirposc.io import Table, write_table


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nu0", type=float, default=1e6)
    ap.add_argument("--kappa", type=float, default=1e3)
    ap.add_argument("--durations", type=float, nargs="+", default=[2e-3, 5e-3, 7e-3, 1e-2, 2e-2])
    ap.add_argument("--start-min", type=float, default=50.0)
    ap.add_argument("--end-max", type=float, default=0.1)
    ap.add_argument("--format", choices=["csv", "json"], default="csv")
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    rows = []
    for t in args.durations:
        rep = adiabatic_conditions(ExpChirpParams(args.nu0, args.kappa, t), args.start_min, args.end_max)
        rows.append([t, rep.ratio_start, rep.ratio_end, rep.passed])
    t_min = math.log(args.nu0 / (args.kappa * args.end_max)) / args.kappa
    table = Table(["t_end", "ratio_start", "ratio_end", "pass"], rows,
                  {"nu0": args.nu0, "kappa": args.kappa, "shortest_t_end": t_min,
                   "start_min": args.start_min, "end_max": args.end_max})
    write_table(table, args.out, args.format)


if __name__ == "__main__":
    main()
