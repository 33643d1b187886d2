"""Deterministic CSV/JSON writers, schema validation hooks and a tiny SVG line chart."""
from __future__ import annotations

import csv
import datetime as _dt
import io
import json
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

SCHEMAS = ("radial_header", "singular_spectrum", "cap_spectrum", "morse_report",
           "threshold_result", "bubble_report", "error_record")


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def _cell(x):
    if isinstance(x, bool) or x is None:
        return "" if x is None else str(x).lower()
    if isinstance(x, int):
        return str(x)
    try:
        return repr(float(x))
    except (TypeError, ValueError):
        return str(x)


def write_csv(path: Path, header, rows) -> Path:
    path = Path(path)
    path.write_text(csv_text(header, rows), encoding="utf-8")
    return path


def load_schema(name: str) -> dict:
    text = resources.files("conemorse.schemas").joinpath(f"{name}.json").read_text("utf-8")
    return json.loads(text)


def load_document(path) -> dict:
    """Read a JSON or YAML document (chosen by file extension)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() in (".yaml", ".yml"):
        import yaml

        return yaml.safe_load(text) or {}
    return json.loads(text)


# ---------------------------------------------------------------- SVG

def _fmt(x: float) -> str:
    return f"{x:.6g}"


def line_chart(series: dict, title: str = "", xlabel: str = "", ylabel: str = "",
               logy: bool = False, width: int = 640, height: int = 400,
               stamp: Optional[str] = None) -> str:
    """Minimal SVG line chart; ``series`` maps a label to (xs, ys)."""
    import math

    pad_l, pad_r, pad_t, pad_b = 70, 20, 40, 50
    pts = {k: [(float(x), float(y)) for x, y in zip(*v)
               if not (logy and float(y) <= 0)] for k, v in series.items()}
    allx = [x for v in pts.values() for x, _ in v] or [0.0, 1.0]
    ally = [(math.log10(y) if logy else y) for v in pts.values() for _, y in v] or [0.0, 1.0]
    x0, x1 = min(allx), max(allx)
    y0, y1 = min(ally), max(ally)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    sx = lambda x: pad_l + (x - x0) / (x1 - x0) * (width - pad_l - pad_r)
    sy = lambda y: height - pad_b - (y - y0) / (y1 - y0) * (height - pad_t - pad_b)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">']
    if stamp:
        out.append(f"<!-- generated {stamp} -->")
    out.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    out.append(f'<text x="{width / 2}" y="22" text-anchor="middle" font-size="15">{title}</text>')
    # axes and ticks
    bx, by = height - pad_b, pad_l
    out.append(f'<line x1="{pad_l}" y1="{bx}" x2="{width - pad_r}" y2="{bx}" stroke="black"/>')
    out.append(f'<line x1="{by}" y1="{pad_t}" x2="{by}" y2="{bx}" stroke="black"/>')
    for i in range(5):
        xv = x0 + (x1 - x0) * i / 4
        yv = y0 + (y1 - y0) * i / 4
        out.append(f'<text x="{_fmt(sx(xv))}" y="{bx + 18}" text-anchor="middle" '
                   f'font-size="11">{_fmt(xv)}</text>')
        label = _fmt(10**yv) if logy else _fmt(yv)
        out.append(f'<text x="{by - 6}" y="{_fmt(sy(yv) + 4)}" text-anchor="end" '
                   f'font-size="11">{label}</text>')
    out.append(f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle" '
               f'font-size="12">{xlabel}</text>')
    out.append(f'<text x="16" y="{height / 2}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 16 {height / 2})">{ylabel}</text>')
    for i, (name, v) in enumerate(pts.items()):
        c = colors[i % len(colors)]
        path = " ".join(f"{_fmt(sx(x))},{_fmt(sy(math.log10(y) if logy else y))}" for x, y in v)
        out.append(f'<polyline fill="none" stroke="{c}" stroke-width="2" points="{path}"/>')
        out.append(f'<text x="{width - pad_r - 4}" y="{pad_t + 14 * (i + 1)}" '
                   f'text-anchor="end" font-size="11" fill="{c}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
