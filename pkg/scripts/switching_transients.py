"""How the sudden start and stop of an exponential chirp distort its spectrum.

Tabulates |F(delta)|^2 for four variants against the infinite-chirp closed form:

  plain      hard window [0, T], oscillator starting in the static ground state
  switched   smooth switch-on and switch-off envelope on a longer window
  in_mode    as ``switched`` but with the adiabatic in-mode replacing the
             static-trap ground state (this removes the blue-side pollution)
  closed     the closed form

Usage: python3 scripts/switching_transients.py [--nu0 200] [--format csv|json] [--out FILE]
"""
import argparse
import math

import numpy as np

from chirposc import Exponential, SimulationWindow, SmoothSwitch, fourier_amplitude, solve_modes
from chirposc.analytic import ExpChirpParams, adiabatic_in_mode, closed_form_probability
from chirposc.io import Table, write_table


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nu0", type=float, default=200.0, help="nu0/kappa (kappa = 1)")
    ap.add_argument("--plain-t", type=float, default=12.0, help="plain window length")
    ap.add_argument("--switched-t", type=float, default=40.0, help="switched window length")
    ap.add_argument("--format", choices=["csv", "json"], default="csv")
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    profile = Exponential(args.nu0, 1.0)
    plain = solve_modes(profile, SimulationWindow(args.plain_t))
    long = solve_modes(profile, SimulationWindow(args.switched_t))
    inmode = adiabatic_in_mode(long)
    # on once the chirp is underway, off at mid-window so the envelope is negligible at T
    env = SmoothSwitch(0.25, 0.04, args.switched_t / 2, args.switched_t / 12)
    p = ExpChirpParams(args.nu0, 1.0, args.switched_t)

    deltas = [d for d in np.arange(-20.0, 6.0) if d != 0]
    rows = []
    for d in deltas:
        closed = closed_form_probability(p, 1.0, d, check=False)
        values = [abs(fourier_amplitude(plain, d)) ** 2,
                  abs(fourier_amplitude(long, d, envelope=env)) ** 2,
                  abs(fourier_amplitude(inmode, d, envelope=env)) ** 2]
        rows.append([d, *values, closed, *[v / closed - 1 if closed > 0 else math.nan for v in values]])
    table = Table(["delta", "plain", "switched", "in_mode", "closed",
                   "gap_plain", "gap_switched", "gap_in_mode"], rows,
                  {"nu0_over_kappa": args.nu0, "plain_t": args.plain_t, "switched_t": args.switched_t,
                   "switch": [env.on_center, env.on_width, env.off_center, env.off_width]})
    write_table(table, args.out, args.format)


if __name__ == "__main__":
    main()
