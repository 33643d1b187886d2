"""Command-line front end.

    conemorse solve-radial    --N 3 --p 3
    conemorse radial-spectrum --N 3 --p 3 --verify
    conemorse cap-spectrum    --N 3 --theta0 2.0944
    conemorse morse           --N 3 --p 3 --theta0 2.0944 --verify
    conemorse bubble          --N 3 --theta0 1.5708
    conemorse threshold       --N 3 --theta0 2.0944 --p-from 4 --p-to 4.95 --p-steps 4

Options may also come from a JSON/YAML file (--config); command-line flags
win.  Outputs go to --out, else $CONEMORSE_OUTPUT_DIR, else the current
directory.  Errors are reported as a JSON record on stderr with exit status 1
(pipeline errors) or 2 (invalid configuration).
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import io as cio
from .bubble import (bubble_residual, eta_residual, eta_rayleigh_quotient, eta_value,
                     limit_study, q_u_on_bubble, step1_test_function_form)
from .cap import CapSpectrum, angular_mode, cap_neumann_eigenvalues, load_spectrum
from .errors import ConeMorseError, InvalidParameterError
from .morse import (bubble_morse, count_cutoff, morse_index_direct, symmetry_breaking_threshold,
                    verify_count_equality)
from .radial import critical_exponent, linearized_potential, solve_lane_emden
from .singular import (SingularSpectrum, dense_oracle_singular, negative_singular_eigenvalues)

log = logging.getLogger("conemorse")

COMMANDS = ("solve-radial", "radial-spectrum", "cap-spectrum", "morse", "bubble", "threshold")
FORMATS = ("csv", "json", "svg")
ENV_OUT = "CONEMORSE_OUTPUT_DIR"


@dataclass
class RunConfig:
    command: str
    N: int = 3
    p: Optional[float] = None
    p_from: Optional[float] = None
    p_to: Optional[float] = None
    p_steps: Optional[int] = None
    theta0: Optional[float] = None
    spectrum: Optional[str] = None
    radial_spectrum: Optional[str] = None
    lam_max: Optional[float] = None
    tol: float = 1e-9
    p_tol: float = 1e-3
    out: str = "."
    formats: tuple = ("csv", "json")
    verify: bool = False
    jobs: int = 1
    stamp: bool = False

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise InvalidParameterError(f"unknown command {self.command!r}")
        if int(self.N) != self.N or self.N < 3:
            raise InvalidParameterError("N must be an integer >= 3", N=self.N)
        self.N = int(self.N)
        pS = critical_exponent(self.N)
        for name in ("p", "p_from", "p_to"):
            v = getattr(self, name)
            if v is not None and not 1 < v < pS:
                raise InvalidParameterError(f"{name} must lie in (1, {pS:g})", **{name: v, "N": self.N})
        if self.theta0 is not None and not 0 < self.theta0 < math.pi:
            raise InvalidParameterError("theta0 must lie in (0, pi)", theta0=self.theta0)
        if self.theta0 is not None and self.spectrum is not None:
            raise InvalidParameterError("give exactly one of --theta0 and --spectrum")
        needs_angular = self.command in ("cap-spectrum", "morse", "bubble", "threshold")
        if needs_angular and self.theta0 is None and self.spectrum is None:
            raise InvalidParameterError(f"{self.command} needs --theta0 or --spectrum")
        needs_p = self.command in ("solve-radial", "radial-spectrum")
        if self.command == "morse" and self.radial_spectrum is None:
            needs_p = True
        if needs_p and self.p is None:
            raise InvalidParameterError(f"{self.command} needs --p")
        sweep = (self.p_from, self.p_to, self.p_steps)
        if any(v is not None for v in sweep) and not all(v is not None for v in sweep):
            raise InvalidParameterError("--p-from, --p-to and --p-steps go together")
        if self.p_steps is not None and self.p_steps < 2:
            raise InvalidParameterError("--p-steps must be >= 2", p_steps=self.p_steps)
        if self.p_from is not None and not self.p_from < self.p_to:
            raise InvalidParameterError("--p-from must be below --p-to")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise InvalidParameterError(f"unknown formats {sorted(bad)}")
        if self.tol <= 0 or self.p_tol <= 0 or self.jobs < 1:
            raise InvalidParameterError("tol must be > 0 and jobs >= 1", tol=self.tol, jobs=self.jobs)
        return self

    @property
    def p_sweep(self):
        if self.p_from is None:
            return None
        return [float(x) for x in np.linspace(self.p_from, self.p_to, self.p_steps)]


def _flatten(doc: dict, out=None) -> dict:
    """Nested config sections are flattened; the section names carry no meaning."""
    out = {} if out is None else out
    for k, v in doc.items():
        if isinstance(v, dict):
            _flatten(v, out)
        else:
            out[k.replace("-", "_")] = v
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(_flatten(cio.load_document(args.config)))
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known - {"format"}
    if unknown:
        raise InvalidParameterError(f"unknown config keys {sorted(unknown)}")
    if "format" in values:
        values["formats"] = values.pop("format")
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    values["command"] = args.command
    if isinstance(values.get("formats"), str):
        values["formats"] = values["formats"].split(",")
    if "formats" in values:
        values["formats"] = tuple(s.strip() for s in values["formats"] if s.strip())
    if "out" not in values:
        values["out"] = os.environ.get(ENV_OUT, ".")
    return RunConfig(**values).validate()


# ---------------------------------------------------------------- helpers

class Emitter:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.dir = Path(cfg.out)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.written = []

    def json(self, name, obj, schema: Optional[str] = None):
        if "json" in self.cfg.formats:
            if schema is not None:
                obj = {"schema": schema, **obj}
            self.written.append(str(cio.write_json(self.dir / f"{name}.json", obj)))

    def csv(self, name, header, rows):
        if "csv" in self.cfg.formats:
            self.written.append(str(cio.write_csv(self.dir / f"{name}.csv", header, rows)))

    def svg(self, name, series, **kw):
        if "svg" in self.cfg.formats:
            stamp = cio.timestamp() if self.cfg.stamp else None
            text = cio.line_chart(series, stamp=stamp, **kw)
            path = self.dir / f"{name}.svg"
            path.write_text(text, encoding="utf-8")
            self.written.append(str(path))


def _tag(cfg: RunConfig, with_p=True) -> str:
    parts = [f"N{cfg.N}"]
    if with_p and cfg.p is not None:
        parts.append(f"p{cfg.p:g}")
    if cfg.theta0 is not None:
        parts.append(f"theta{cfg.theta0:.6g}")
    elif cfg.spectrum is not None:
        parts.append("external")
    return "_".join(parts)


def _angular(cfg: RunConfig, lam_max: float) -> CapSpectrum:
    if cfg.spectrum is not None:
        spec = load_spectrum(cio.load_document(cfg.spectrum))
        if spec.N != cfg.N:
            raise InvalidParameterError("spectrum dimension does not match --N",
                                        N=cfg.N, spectrum_N=spec.N)
        return spec
    return cap_neumann_eigenvalues(cfg.N, cfg.theta0, max(lam_max, cfg.lam_max or 0.0))


def _potential(cfg: RunConfig):
    return linearized_potential(solve_lane_emden(cfg.N, cfg.p))


def _radial_spectrum(cfg: RunConfig, pot=None) -> SingularSpectrum:
    if cfg.radial_spectrum is not None:
        return SingularSpectrum.from_dict(cio.load_document(cfg.radial_spectrum))
    pot = pot if pot is not None else _potential(cfg)
    return negative_singular_eigenvalues(cfg.N, pot, tol=cfg.tol)


# ---------------------------------------------------------------- commands

def cmd_solve_radial(cfg: RunConfig, em: Emitter) -> dict:
    """Solve the Lane-Emden problem; CSV (r, u, du, a) and a JSON header."""
    sol = solve_lane_emden(cfg.N, cfg.p)
    pot = linearized_potential(sol)
    res = float(np.max(np.abs(sol.residual())))
    header = {**sol.to_header(), "sup_a": float(pot.sup_norm), "max_residual": res}
    name = f"radial_{_tag(cfg)}"
    em.csv(name, ["r", "u", "du", "a"], zip(sol.r, sol.u, sol.du, pot.values))
    em.json(name, header, "radial_header")
    em.svg(name, {"u": (sol.r, sol.u)}, title=f"Lane-Emden N={cfg.N} p={cfg.p:g}",
           xlabel="r", ylabel="u")
    return header


def cmd_radial_spectrum(cfg: RunConfig, em: Emitter) -> dict:
    """Negative singular radial eigenvalues (dense oracle with --verify)."""
    pot = _potential(cfg)
    spec = negative_singular_eigenvalues(cfg.N, pot, tol=cfg.tol)
    doc = spec.to_dict()
    if cfg.verify:
        fine = dense_oracle_singular(cfg.N, pot, n=8000)
        doc["oracle"] = {"values": [float(v) for v in fine.values], "h": fine.h,
                         "max_abs_difference": float(np.max(np.abs(
                             fine.values[:spec.count] - spec.eigenvalues))) if spec.count else 0.0}
    name = f"singular_spectrum_{_tag(cfg)}"
    em.json(name, doc, "singular_spectrum")
    em.csv(name, ["k", "value", "zeros"],
           [(i + 1, v, z) for i, (v, z) in enumerate(zip(spec.eigenvalues, spec.zeros))])
    if spec.count:
        em.svg(name, {f"psi_{k + 1}": (pot.r, spec.eigenfunctions[k]) for k in range(spec.count)},
               title="singular radial eigenfunctions", xlabel="r", ylabel="psi")
    return doc


def cmd_cap_spectrum(cfg: RunConfig, em: Emitter) -> dict:
    """Neumann spectrum of a cap, or a validated external spectrum."""
    spec = _angular(cfg, cfg.lam_max or 2.0 * cfg.N)
    doc = spec.to_dict()
    name = f"cap_spectrum_{_tag(cfg, with_p=False)}"
    em.json(name, doc, "cap_spectrum")
    em.csv(name, ["lambda", "ell", "mode", "multiplicity"],
           [(e.lam, e.ell, e.mode, e.multiplicity) for e in spec.entries])
    return doc


def cmd_morse(cfg: RunConfig, em: Emitter) -> dict:
    """Morse index by direct count and bucket formula (count equality with --verify)."""
    pot = None if cfg.radial_spectrum is not None else _potential(cfg)
    radial = _radial_spectrum(cfg, pot)
    need = -radial.eigenvalues[0] if radial.count else 0.0
    if cfg.verify and pot is not None:
        need = max(need, count_cutoff(cfg.N, pot))
    angular = _angular(cfg, need + 0.5)
    report = morse_index_direct(radial, angular)
    doc = {"N": cfg.N, "p": cfg.p, **report.to_dict()}
    if cfg.verify:
        if pot is None:
            raise InvalidParameterError("--verify needs --p (a potential), not a radial spectrum file")
        k_a, k_hat = verify_count_equality(cfg.N, pot, angular, radial)
        doc["count_equality"] = {"k_a": k_a, "k_hat_a": k_hat, "equal": k_a == k_hat}
    name = f"morse_{_tag(cfg)}"
    em.json(name, doc, "morse_report")
    em.csv(name, ["k", "j", "value"], report.pairs)
    return doc


def cmd_bubble(cfg: RunConfig, em: Emitter) -> dict:
    """Bubble Morse index, eta residuals, Q_U(U) and the step-1 test function."""
    N = cfg.N
    angular = _angular(cfg, N - 1 + 0.5)
    r = np.geomspace(1e-2, 1e2, 50)
    eta_res = eta_residual(N, r)
    rel = np.abs(eta_res) / np.maximum(1.0, np.abs(eta_value(N, r)))
    doc = {
        "N": N,
        "theta0": "external" if angular.external else angular.theta0,
        "m_U": bubble_morse(angular, N),
        "lambda1": angular.first_nontrivial,
        "eta_residual_max": float(np.max(rel)),
        "bubble_residual_max": float(max(np.max(np.abs(bubble_residual(N, 1.0, r, nm)))
                                         for nm in ("alpha", "peak"))),
        "rayleigh_quotient": eta_rayleigh_quotient(N),
        "step1": [],
    }
    if not angular.external:
        doc["q_u_on_bubble"] = q_u_on_bubble(N, angular.theta0)
        e = angular.first_nontrivial_entry()
        form = step1_test_function_form(N, angular_mode(N, e.ell, angular.theta0, e.lam, e.mode))
        doc["step1"].append({"lambda": e.lam, "ell": e.ell, "value": form.value})
    name = f"bubble_{_tag(cfg, with_p=False)}"
    em.json(name, doc, "bubble_report")
    em.csv(name + "_eta_residual", ["r", "eta", "residual"], zip(r, eta_value(N, r), eta_res))
    return doc


def cmd_threshold(cfg: RunConfig, em: Emitter) -> dict:
    """Symmetry-breaking threshold in p, plus a limit study when a p sweep is given."""
    N = cfg.N
    angular = _angular(cfg, N - 1 + 0.5)
    result = symmetry_breaking_threshold(N, angular, tol=cfg.p_tol, jobs=cfg.jobs)
    doc = result.to_dict()
    name = f"threshold_{_tag(cfg, with_p=False)}"
    em.json(name, doc, "threshold_result")
    if result.samples:
        em.csv(name + "_sweep", ["p", "lambda_hat_1_rad", "lambda1_plus_lambda_hat_1"],
               result.samples)
        ps = [row[0] for row in result.samples]
        em.svg(name, {"lambda1 + Lambda_1(p)": (ps, [row[2] for row in result.samples])},
               title="sign of lambda1 + Lambda_1(p)", xlabel="p", ylabel="value")
    if cfg.p_sweep is not None:
        table = limit_study(N, cfg.p_sweep, jobs=cfg.jobs)
        lname = f"limit_N{N}"
        if "csv" in cfg.formats:
            path = em.dir / f"{lname}.csv"
            path.write_text(table.to_csv(), encoding="utf-8")
            em.written.append(str(path))
        em.svg(lname, {"gap": ([r[0] for r in table.rows], table.gaps)}, logy=True,
               title=f"gap Lambda_1(p) + {N - 1}", xlabel="p", ylabel="gap")
        doc = {**doc, "limit_study": [list(r) for r in table.rows]}
    return doc


HANDLERS = {
    "solve-radial": cmd_solve_radial,
    "radial-spectrum": cmd_radial_spectrum,
    "cap-spectrum": cmd_cap_spectrum,
    "morse": cmd_morse,
    "bubble": cmd_bubble,
    "threshold": cmd_threshold,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conemorse", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or YAML file with default options")
    common.add_argument("--N", type=int, dest="N", help="space dimension (>= 3)")
    common.add_argument("--p", type=float, help="Lane-Emden exponent in (1, p_S)")
    common.add_argument("--p-from", type=float, dest="p_from")
    common.add_argument("--p-to", type=float, dest="p_to")
    common.add_argument("--p-steps", type=int, dest="p_steps")
    ang = common.add_mutually_exclusive_group()
    ang.add_argument("--theta0", type=float, help="cap half-angle in (0, pi)")
    ang.add_argument("--spectrum", help="external Neumann spectrum document")
    common.add_argument("--radial-spectrum", dest="radial_spectrum",
                        help="singular spectrum JSON to use instead of solving")
    common.add_argument("--lam-max", type=float, dest="lam_max",
                        help="minimum angular cutoff for cap spectra")
    common.add_argument("--tol", type=float, help="eigenvalue tolerance (default 1e-9)")
    common.add_argument("--p-tol", type=float, dest="p_tol",
                        help="threshold bracket width in p (default 1e-3)")
    common.add_argument("--out", help=f"output directory (default ${ENV_OUT} or .)")
    common.add_argument("--format", dest="formats", help="comma list of csv,json,svg")
    common.add_argument("--verify", action="store_true", default=None,
                        help="run the independent cross-checks")
    common.add_argument("--jobs", type=int, help="worker processes for sweeps")
    common.add_argument("--stamp", action="store_true", default=None,
                        help="embed a timestamp in plots")
    common.add_argument("-v", "--verbose", action="store_true")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=HANDLERS[name].__doc__)
    return parser


def _error(rec: dict, code: int) -> int:
    sys.stderr.write(cio.dumps(rec))
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args)
    except (ConeMorseError, TypeError, ValueError, OSError) as exc:
        rec = exc.record() if isinstance(exc, ConeMorseError) else {
            "error": type(exc).__name__, "module": "cli", "message": str(exc), "params": {}}
        rec["module"] = "cli"
        return _error(rec, 2)
    em = Emitter(cfg)
    try:
        doc = HANDLERS[cfg.command](cfg, em)
    except ConeMorseError as exc:
        rec = exc.record()
        rec["params"] = {**rec["params"], "command": cfg.command, "N": cfg.N, "p": cfg.p}
        return _error(rec, 1)
    summary = {"command": cfg.command, "files": em.written}
    if "status" in doc:
        summary["status"] = doc["status"]
    sys.stdout.write(cio.dumps(summary))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
