"""Sweep the explicit right-hand side of the master inequality over R and fit its log-log slope.

Writes one CSV row per radius and prints the fitted slope next to the predicted exponent.
"""

import argparse
from pathlib import Path

from hadamard_frac.criterion import ProblemParams, sign_functionals
from hadamard_frac.initial_data import RadialProfile, total_integral
from hadamard_frac.probe import ProbeConfig, rows_to_csv, sweep, sweep_summary
from hadamard_frac.testfunctions import CutoffParams, MuParams, TestFunction, default_exponents


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--gamma", type=float, default=0.0)
    ap.add_argument("--N", type=int, default=1)
    ap.add_argument("--p", type=float, nargs="+", default=[1.5, 2.0, 2.5, 3.5])
    ap.add_argument("--R", type=float, nargs="+", default=[10, 20, 40, 80, 160])
    ap.add_argument("--out-dir", type=Path, default=Path("probe_out"))
    args = ap.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    rp = RadialProfile("exp-decay", args.N)
    f1 = total_integral(rp)
    print(f"{'p':>6s} {'slope':>10s} {'predicted':>10s}  regime")
    for p in args.p:
        pp = ProblemParams(args.alpha, args.gamma, args.N, p, 1.0)
        kappa, ell = default_exponents(pp.alpha, p)
        tf = TestFunction(MuParams(pp.a, 1.0, kappa), CutoffParams(args.R[0], ell, pp.N))
        cfg = ProbeConfig(pp, tf, tuple(args.R))
        sf = sign_functionals(pp, f1, 0.0)
        res = sweep(cfg, sf, [rp])
        summary = sweep_summary(cfg, sf, res)
        (args.out_dir / f"sweep_p{p:g}.csv").write_text(rows_to_csv(res.rows))
        print(f"{p:6.3f} {res.slope:10.6f} {summary['decay_exponent']:10.6f}  {summary['regime']}")


if __name__ == "__main__":
    main()
