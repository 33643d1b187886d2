"""Symmetry-breaking threshold p₀ as a function of the cap half-angle.

For each θ₀ with λ₁(θ₀) < N-1, finds the exponent where λ₁ + Λ̂₁(p) changes
sign; caps with λ₁ ≥ N-1 are reported as having no threshold.

    python3 scripts/threshold_sweep.py --N 3 --theta0 1.8 2.0944 2.4 --jobs 4
"""
from __future__ import annotations

import argparse
import math
from pathlib import Path

from conemorse.cap import cap_neumann_eigenvalues
from conemorse.errors import NoSignChangeError
from conemorse.io import csv_text, line_chart
from conemorse.morse import symmetry_breaking_threshold


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--N", type=int, default=3)
    ap.add_argument("--theta0", type=float, nargs="+",
                    default=[math.pi / 2, 1.8, 2 * math.pi / 3, 2.4, 2.7])
    ap.add_argument("--tol", type=float, default=1e-3)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args(argv)

    rows = []
    for th in args.theta0:
        ang = cap_neumann_eigenvalues(args.N, th, args.N + 1.0)
        try:
            res = symmetry_breaking_threshold(args.N, ang, tol=args.tol, jobs=args.jobs)
            p0 = res.p0
            status = res.status
        except NoSignChangeError:
            p0, status = None, "no-sign-change"
        rows.append((th, ang.first_nontrivial, p0, status))
        print(f"theta0={th:.6f} lambda1={ang.first_nontrivial:.8f} p0={p0} ({status})")

    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / f"threshold_sweep_N{args.N}.csv").write_text(
        csv_text(["theta0", "lambda1", "p0", "status"], rows), encoding="utf-8")
    found = [(th, p0) for th, _, p0, _ in rows if p0 is not None]
    if found:
        (args.out / f"threshold_sweep_N{args.N}.svg").write_text(
            line_chart({"p0": tuple(zip(*found))}, title=f"threshold exponent, N={args.N}",
                       xlabel="theta0", ylabel="p0"), encoding="utf-8")


if __name__ == "__main__":
    main()
