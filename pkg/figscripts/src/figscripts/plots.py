"""Renderers for the three figure kinds.

All output is deterministic: the Agg backend, fixed figure geometry, and
no date metadata in the files, so regenerating a figure from the same
inputs is byte-identical.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import matplotlib.tri as mtri
import numpy as np

from figscripts.specs import FigureSpec, SpecError

_SAVE_KW = {"dpi": 150, "metadata": {"Software": None}}


def read_columns(path) -> dict:
    """Column-oriented read of a CSV with a header row."""
    with open(path, encoding="utf-8") as f:
        rows = list(csv.reader(f))
    if not rows or len(rows) < 2:
        raise SpecError(f"{os.path.basename(path)}: empty series, nothing to plot")
    header = rows[0]
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    return {name: data[:, j] for j, name in enumerate(header)}


def _curve_data(curve, base_dir):
    cols = read_columns(os.path.join(base_dir, curve.csv))
    for name in (curve.x, curve.y):
        if name not in cols:
            raise SpecError(
                f"{curve.csv}: missing column {name!r} (has {sorted(cols)})"
            )
    return cols[curve.x], cols[curve.y]


def _draw_references(ax, spec, base_dir, xspan):
    for ref in spec.references:
        if ref.kind == "hline":
            ax.axhline(ref.value, color="k", ls="--", lw=1.0, label=ref.label)
        elif ref.kind == "line":
            x = np.linspace(*xspan, 100)
            ax.plot(x, ref.slope * x + ref.intercept, "k--", lw=1.0, label=ref.label)
        elif ref.kind == "column":
            cols = read_columns(os.path.join(base_dir, ref.csv))
            if ref.x not in cols or ref.y not in cols:
                raise SpecError(f"reference {ref.csv}: missing column {ref.x!r}/{ref.y!r}")
            ax.plot(cols[ref.x], cols[ref.y], "k--", lw=1.0, label=ref.label)
        else:
            raise SpecError(f"unknown reference kind {ref.kind!r}")


def _finish(fig, ax, spec, out_path):
    ax.set_title(spec.title)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)
    if spec.legend and ax.get_legend_handles_labels()[0]:
        ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    os.makedirs(os.path.dirname(os.path.abspath(out_path)), exist_ok=True)
    fig.savefig(out_path, **_SAVE_KW)
    plt.close(fig)
    return out_path


def plot_series(spec: FigureSpec, base_dir=".", out_dir=".") -> str:
    """Time-series plot (e.g. normalized SIF vs time with its reference)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xmin, xmax = np.inf, -np.inf
    for c in spec.curves:
        x, y = _curve_data(c, base_dir)
        ax.plot(x, y, c.style, label=c.label)
        xmin, xmax = min(xmin, x.min()), max(xmax, x.max())
    _draw_references(ax, spec, base_dir, (xmin, xmax))
    out = os.path.join(out_dir, spec.out)
    return _finish(fig, ax, spec, out)


def plot_profile(spec: FigureSpec, base_dir=".", out_dir=".") -> str:
    """Field-vs-coordinate profile (markers), with analytic overlays."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xmin, xmax = np.inf, -np.inf
    for c in spec.curves:
        x, y = _curve_data(c, base_dir)
        ax.plot(x, y, c.style if c.style != "-" else "o", ms=4, label=c.label)
        xmin, xmax = min(xmin, x.min()), max(xmax, x.max())
    _draw_references(ax, spec, base_dir, (xmin, xmax))
    out = os.path.join(out_dir, spec.out)
    return _finish(fig, ax, spec, out)


def read_vtk(path):
    """Minimal legacy-ASCII unstructured-grid reader (the solver's contract)."""
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines or not lines[0].startswith("# vtk DataFile"):
        raise SpecError(f"{os.path.basename(path)}: not a legacy VTK file")
    k = lines.index(next(l for l in lines if l.startswith("POINTS")))
    npts = int(lines[k].split()[1])
    pts = np.array([[float(v) for v in lines[k + 1 + i].split()[:2]] for i in range(npts)])
    k = k + 1 + npts
    ncells = int(lines[k].split()[1])
    cells = [[int(v) for v in lines[k + 1 + i].split()[1:]] for i in range(ncells)]
    arrays = {}
    i = k + 1 + ncells
    current = None
    while i < len(lines):
        parts = lines[i].split()
        if parts and parts[0] == "SCALARS":
            name = parts[1]
            vals = []
            i += 2
            while i < len(lines) and len(vals) < npts:
                vals.append(float(lines[i]))
                i += 1
            arrays[name] = np.asarray(vals)
            continue
        i += 1
    return pts, cells, arrays


def plot_contour(spec: FigureSpec, base_dir=".", out_dir=".") -> str:
    """Filled contour of a point array; crossed cells render their jump."""
    pts, cells, arrays = read_vtk(os.path.join(base_dir, spec.vtk))
    if spec.array not in arrays:
        raise SpecError(f"{spec.vtk}: missing point array {spec.array!r} (has {sorted(arrays)})")
    tris = []
    for c in cells:
        if len(c) == 3:
            tris.append(c)
        elif len(c) == 4:
            tris.append([c[0], c[1], c[2]])
            tris.append([c[0], c[2], c[3]])
    tri = mtri.Triangulation(pts[:, 0], pts[:, 1], np.asarray(tris))
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    m = ax.tripcolor(tri, arrays[spec.array], shading="gouraud", cmap="viridis")
    fig.colorbar(m, ax=ax, label=spec.array)
    ax.set_aspect("equal")
    out = os.path.join(out_dir, spec.out)
    return _finish(fig, ax, spec, out)


def render(spec: FigureSpec, base_dir=".", out_dir=".") -> str:
    if spec.kind == "series":
        return plot_series(spec, base_dir, out_dir)
    if spec.kind == "profile":
        return plot_profile(spec, base_dir, out_dir)
    if spec.kind == "contour":
        return plot_contour(spec, base_dir, out_dir)
    raise SpecError(f"unknown figure kind {spec.kind!r}")
