"""Evaluate the three worked examples over a range of dimensions and print their p-intervals."""

import argparse

from hadamard_frac.criterion import ProblemParams, evaluate, region_combined, region_T1, sign_functionals
from hadamard_frac.initial_data import RadialProfile, total_integral


def example_rows(n_max: int):
    for N in range(5, n_max + 1):
        rp = RadialProfile("inverse-weight", N)
        lo, hi = 1.0, region_T1(0.5, -0.25, N).p_upper
        yield "inverse-weight", N, -0.25, 1.0, rp, lo, hi
    for N in range(1, n_max + 1):
        rp = RadialProfile("gauss-weight", N, "imaginary")
        g = 1.0 / N
        rc = region_combined(0.5, g, N)
        yield "gauss-weight", N, g, -1.0, rp, rc.p_lower, rc.p_upper
    for N in range(3, n_max + 1):
        rp = RadialProfile("exp-decay", N)
        g = 1.0 / (N - 2)
        rc = region_combined(0.5, g, N)
        yield "exp-decay", N, g, 1.0, rp, rc.p_lower, rc.p_upper


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=8)
    args = ap.parse_args()
    print(f"{'profile':15s} {'N':>2s} {'gamma':>8s} {'p_lower':>10s} {'p_upper':>10s} {'int f':>14s}  verdict at midpoint")
    for name, N, g, lam, rp, lo, hi in example_rows(args.n_max):
        total = total_integral(rp)
        f1, f2 = (total, 0.0) if rp.part == "real" else (0.0, total)
        pp = ProblemParams(0.5, g, N, 0.5 * (lo + hi), lam)
        verdict = evaluate(pp, sign_functionals(pp, f1, f2)).verdict
        print(f"{name:15s} {N:2d} {g:8.4f} {lo:10.6f} {hi:10.6f} {total:14.8f}  {verdict}")


if __name__ == "__main__":
    main()
