#!/usr/bin/env python3
"""Monte Carlo cross-check: estimate the analytic quantities at a chosen
parameter point and report z-scores against the closed forms."""

import argparse
import sys

from gbmdd import moments
from gbmdd.moments import GbmParams
from gbmdd.montecarlo import McConfig, estimate_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r", type=float, default=0.05)
    ap.add_argument("--sigma", type=float, default=0.2)
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--paths", type=int, default=100_000)
    ap.add_argument("--steps", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=20240613)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    p = GbmParams(r=args.r, sigma=args.sigma, T=args.T)
    cfg = McConfig(paths=args.paths, steps=args.steps, seed=args.seed)
    suite = estimate_suite(p, cfg, threads=args.threads)
    truth = {
        "mean_S": moments.mean_S(p),
        "mean_A": moments.mean_A(p),
        "second_moment_A": moments.second_moment_A(p),
        "cross_moment_SA": moments.cross_moment_SA(p),
    }
    if p.sigma > 0:
        truth["correlation"] = moments.correlation(p).R

    print(f"{'quantity':>18s} {'estimate':>12s} {'stderr':>10s} {'analytic':>12s} {'z':>7s}")
    worst = 0.0
    for name, want in truth.items():
        est = suite[name]
        z = (est.value - want) / est.stderr if est.stderr > 0 else 0.0
        worst = max(worst, abs(z))
        print(f"{name:>18s} {est.value:12.7f} {est.stderr:10.2e} {want:12.7f} {z:+7.2f}")
    print(f"max |z| = {worst:.2f} over {cfg.paths} paths x {cfg.steps} steps, seed {cfg.seed}")
    return 0 if worst <= 4.0 else 1


if __name__ == "__main__":
    sys.exit(main())
