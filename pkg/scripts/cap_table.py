"""Neumann spectra of geodesic caps: λ₁(θ₀) and the bubble Morse index.

    python3 scripts/cap_table.py --N 3 --steps 24
"""
from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from conemorse.cap import cap_neumann_eigenvalues
from conemorse.io import csv_text, line_chart
from conemorse.morse import bubble_morse


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--N", type=int, default=3)
    ap.add_argument("--theta-min", type=float, default=0.5)
    ap.add_argument("--theta-max", type=float, default=3.0)
    ap.add_argument("--steps", type=int, default=26)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args(argv)

    rows = []
    for th in np.linspace(args.theta_min, args.theta_max, args.steps):
        # λ₁ grows like (j'/θ₀)² for small caps; enlarge the cutoff accordingly
        spec = cap_neumann_eigenvalues(args.N, th, max(args.N + 1.0, 6.0 / th**2))
        e = spec.first_nontrivial_entry()
        rows.append((float(th), e.lam, e.ell, e.multiplicity, bubble_morse(spec, args.N)))
        print(f"theta0={th:.4f} lambda1={e.lam:.8f} ell={e.ell} mult={e.multiplicity} "
              f"m(U)={rows[-1][-1]}")

    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / f"cap_table_N{args.N}.csv").write_text(
        csv_text(["theta0", "lambda1", "ell", "multiplicity", "m_U"], rows), encoding="utf-8")
    th = [r[0] for r in rows]
    (args.out / f"cap_table_N{args.N}.svg").write_text(
        line_chart({"lambda1": (th, [r[1] for r in rows]), "N-1": (th, [args.N - 1] * len(th))},
                   title=f"first nontrivial Neumann eigenvalue, N={args.N}", xlabel="theta0",
                   ylabel="lambda1"), encoding="utf-8")


if __name__ == "__main__":
    main()
