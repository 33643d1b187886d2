"""Subcritical limit p -> p_S: gap Λ̂₁(p) + (N-1) and the V_p diagnostic.

    python3 scripts/limit_study.py --N 3 --p 4.0 4.5 4.8 4.95 4.99 --out results/
"""
from __future__ import annotations

import argparse
from pathlib import Path

from conemorse.bubble import limit_study
from conemorse.io import line_chart


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--N", type=int, default=3)
    ap.add_argument("--p", type=float, nargs="+", default=[4.0, 4.5, 4.8, 4.95, 4.99])
    ap.add_argument("--tol", type=float, default=1e-12)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args(argv)

    table = limit_study(args.N, args.p, tol=args.tol, jobs=args.jobs)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / f"limit_N{args.N}.csv").write_text(table.to_csv(), encoding="utf-8")
    ps = [row[0] for row in table.rows]
    (args.out / f"limit_N{args.N}.svg").write_text(
        line_chart({"gap": (ps, table.gaps), "V_p diagnostic": (ps, [r[3] for r in table.rows])},
                   title=f"N={args.N}: approach to the critical exponent", xlabel="p",
                   ylabel="value", logy=True), encoding="utf-8")
    print(f"{'p':>8} {'Λ̂₁':>14} {'gap':>12} {'V_p diag':>12}")
    for p, lh, gap, vp in table.rows:
        print(f"{p:8.4f} {lh:14.10f} {gap:12.4e} {vp:12.4e}")


if __name__ == "__main__":
    main()
