"""CSV, JSON and SVG emission for sweep results."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1

CSV_COLUMNS = ("law", "lambda", "n_t", "n_r", "mean_sinr", "sinr_ci_lo", "sinr_ci_hi",
               "mean_ase", "ase_ci_lo", "ase_ci_hi", "mean_norm_sinr", "censored")

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _num(x) -> str:
    # repr round-trips doubles exactly and is stable across runs
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def record_row(rec) -> list:
    return [rec.law, _num(rec.density), _num(rec.n_t), _num(rec.n_r),
            _num(rec.mean_sinr), _num(rec.sinr_ci[0]), _num(rec.sinr_ci[1]),
            _num(rec.mean_ase), _num(rec.ase_ci[0]), _num(rec.ase_ci[1]),
            _num(rec.mean_norm_sinr), _num(rec.censored)]


def csv_text(result) -> str:
    """Commented header (schema, digest, rng) followed by one row per (law, lambda)."""
    md = result.metadata
    lines = [
        f"# schema_version={SCHEMA_VERSION}",
        f"# config_digest={md.get('config_digest', '')}",
        f"# rng={md.get('rng', '')}",
        ",".join(CSV_COLUMNS),
    ]
    for rec in result.records:
        lines.append(",".join(record_row(rec)))
    return "\n".join(lines) + "\n"


def _clean(obj):
    """JSON-safe copy: non-finite floats become null, tuples become lists."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def json_text(result) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "columns": list(CSV_COLUMNS),
        "metadata": result.metadata,
        "records": [r.to_dict() for r in result.records],
    }
    return json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"


def write_csv(result, path) -> Path:
    path = Path(path)
    path.write_text(csv_text(result))
    return path


def write_json(result, path) -> Path:
    path = Path(path)
    path.write_text(json_text(result))
    return path


def read_csv(path):
    """Parse a sweep CSV back into ``(header comments, list of row dicts)``."""
    meta, rows, cols = {}, [], None
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key] = val
        elif cols is None:
            cols = line.split(",")
        elif line:
            rows.append(dict(zip(cols, line.split(","))))
    return meta, rows


# --- SVG -----------------------------------------------------------------

_W, _H = 640, 440
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 190, 40, 50


class _LogAxis:
    def __init__(self, lo, hi, start, stop):
        self.lo = math.floor(math.log10(lo))
        self.hi = math.ceil(math.log10(hi))
        if self.hi == self.lo:
            self.hi += 1
        self.start, self.stop = start, stop

    def __call__(self, v):
        t = (math.log10(v) - self.lo) / (self.hi - self.lo)
        return self.start + t * (self.stop - self.start)

    def decades(self):
        return range(self.lo, self.hi + 1)


def _fmt(p):
    return f"{p:.2f}"


def svg_plot(result, quantity="mean_sinr", asymptotes=None, title=None) -> str:
    """Log-log plot of ``quantity`` against lambda, one polyline per law.

    ``asymptotes`` maps a law label to a callable ``f(lambda)`` drawn as a
    dashed reference line over the grid.
    """
    asymptotes = asymptotes or {}
    series = []
    for law in result.laws:
        lam = result.column("density", law)
        y = result.column(quantity, law)
        keep = np.isfinite(y) & (y > 0)
        series.append((law, lam[keep], y[keep]))
    refs = []
    for law, f in asymptotes.items():
        lam = np.geomspace(min(result.column("density", law)), max(result.column("density", law)), 64)
        refs.append((law, lam, np.array([f(x) for x in lam])))
    xs = np.concatenate([s[1] for s in series] + [r[1] for r in refs])
    ys = np.concatenate([s[2] for s in series] + [r[2] for r in refs])
    ys = ys[np.isfinite(ys) & (ys > 0)]
    if xs.size == 0 or ys.size == 0:
        raise ValueError("nothing positive to plot on log axes")
    xa = _LogAxis(xs.min(), xs.max(), _LEFT, _W - _RIGHT)
    ya = _LogAxis(ys.min(), ys.max(), _H - _BOTTOM, _TOP)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>']
    x0, x1, y0, y1 = _LEFT, _W - _RIGHT, _H - _BOTTOM, _TOP
    out.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
               f'fill="none" stroke="black"/>')
    for d in xa.decades():
        px = _fmt(xa(10.0**d))
        out.append(f'<line x1="{px}" y1="{y0}" x2="{px}" y2="{y1}" stroke="#ddd"/>')
        out.append(f'<text x="{px}" y="{y0 + 16}" text-anchor="middle">1e{d}</text>')
    for d in ya.decades():
        py = _fmt(ya(10.0**d))
        out.append(f'<line x1="{x0}" y1="{py}" x2="{x1}" y2="{py}" stroke="#ddd"/>')
        out.append(f'<text x="{x0 - 6}" y="{py}" text-anchor="end" dominant-baseline="middle">1e{d}</text>')
    out.append(f'<text x="{(x0 + x1) / 2}" y="{_H - 12}" text-anchor="middle">BS density lambda</text>')
    out.append(f'<text x="16" y="{(y0 + y1) / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {(y0 + y1) / 2})">{quantity}</text>')
    if title:
        out.append(f'<text x="{(x0 + x1) / 2}" y="{_TOP - 14}" text-anchor="middle">{title}</text>')

    colors = {law: PALETTE[i % len(PALETTE)] for i, law in enumerate(result.laws)}
    for law, lam, y in refs:
        pts = " ".join(f"{_fmt(xa(a))},{_fmt(ya(b))}" for a, b in zip(lam, y) if b > 0)
        out.append(f'<polyline points="{pts}" fill="none" stroke="{colors.get(law, "gray")}" '
                   f'stroke-dasharray="6 4" stroke-width="1"/>')
    for law, lam, y in series:
        pts = " ".join(f"{_fmt(xa(a))},{_fmt(ya(b))}" for a, b in zip(lam, y))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{colors[law]}" stroke-width="2"/>')
        for a, b in zip(lam, y):
            out.append(f'<circle cx="{_fmt(xa(a))}" cy="{_fmt(ya(b))}" r="3" fill="{colors[law]}"/>')

    ly = _TOP + 10
    for law in result.laws:
        out.append(f'<line x1="{x1 + 12}" y1="{ly}" x2="{x1 + 36}" y2="{ly}" '
                   f'stroke="{colors[law]}" stroke-width="2"/>')
        out.append(f'<text x="{x1 + 42}" y="{ly}" dominant-baseline="middle">{law}</text>')
        ly += 18
    if refs:
        out.append(f'<line x1="{x1 + 12}" y1="{ly}" x2="{x1 + 36}" y2="{ly}" '
                   f'stroke="gray" stroke-dasharray="6 4"/>')
        out.append(f'<text x="{x1 + 42}" y="{ly}" dominant-baseline="middle">asymptote</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def sweep_asymptotes(result, quantity):
    """Reference curves for the linear-scaling laws in ``result``.

    Mean SINR tends to the constant recorded in the metadata; ASE then grows
    as ``lambda * log2(1 + limit)``.
    """
    refs = {}
    for label, entry in result.metadata.get("asymptotes", {}).get("laws", {}).items():
        limit = entry.get("sinr_limit")
        if limit is None or label not in result.laws:
            continue
        if quantity == "mean_sinr":
            refs[label] = lambda lam, v=limit: v
        elif quantity == "mean_ase":
            refs[label] = lambda lam, v=limit: lam * math.log2(1 + v)
    return refs


def write_plots(result, directory) -> list:
    directory = Path(directory)
    paths = []
    for quantity, name in (("mean_sinr", "sinr_vs_lambda.svg"), ("mean_ase", "ase_vs_lambda.svg")):
        p = directory / name
        p.write_text(svg_plot(result, quantity, sweep_asymptotes(result, quantity),
                              title=f"{quantity} vs lambda"))
        paths.append(p)
    return paths
