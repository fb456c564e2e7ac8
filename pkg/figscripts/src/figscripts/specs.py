"""Figure specifications: what to read, what to draw, what to overlay."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import yaml


class SpecError(ValueError):
    """Malformed figure spec or missing input."""


@dataclass
class Curve:
    csv: str
    x: str  # column name
    y: str
    label: str | None = None
    style: str = "-"


@dataclass
class Reference:
    """Overlay: a constant level, a straight line, or another CSV column."""

    kind: str  # hline | line | column
    value: float = 0.0  # hline level
    slope: float = 0.0
    intercept: float = 0.0
    csv: str | None = None
    x: str | None = None
    y: str | None = None
    label: str | None = None


@dataclass
class FigureSpec:
    kind: str  # series | profile | contour
    out: str
    curves: list = field(default_factory=list)
    references: list = field(default_factory=list)
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    xlim: tuple | None = None
    ylim: tuple | None = None
    legend: bool = True
    # contour inputs
    vtk: str | None = None
    array: str | None = None

    def validate(self, base_dir: str = ".") -> None:
        errors = []
        if self.kind not in ("series", "profile", "contour"):
            errors.append(f"kind: unknown figure kind {self.kind!r}")
        if self.kind in ("series", "profile"):
            if not self.curves:
                errors.append("curves: at least one curve is required")
            for i, c in enumerate(self.curves):
                path = os.path.join(base_dir, c.csv)
                if not os.path.exists(path):
                    errors.append(f"curves[{i}]: input file {c.csv!r} does not exist")
        if self.kind == "contour":
            if not self.vtk:
                errors.append("contour figures need a vtk input")
            elif not os.path.exists(os.path.join(base_dir, self.vtk)):
                errors.append(f"vtk input {self.vtk!r} does not exist")
            if not self.array:
                errors.append("contour figures need an array name")
        if errors:
            raise SpecError("; ".join(errors))


def load_spec(path) -> FigureSpec:
    with open(path, encoding="utf-8") as f:
        raw = yaml.safe_load(f)
    if not isinstance(raw, dict):
        raise SpecError("figure spec root must be a mapping")
    curves = [Curve(**c) for c in raw.get("curves", [])]
    references = [Reference(**r) for r in raw.get("references", [])]
    spec = FigureSpec(
        kind=raw.get("kind", "series"),
        out=raw.get("out", "figure.png"),
        curves=curves,
        references=references,
        title=raw.get("title", ""),
        xlabel=raw.get("xlabel", ""),
        ylabel=raw.get("ylabel", ""),
        xlim=tuple(raw["xlim"]) if raw.get("xlim") else None,
        ylim=tuple(raw["ylim"]) if raw.get("ylim") else None,
        legend=bool(raw.get("legend", True)),
        vtk=raw.get("vtk"),
        array=raw.get("array"),
    )
    spec.validate(base_dir=os.path.dirname(os.path.abspath(path)))
    return spec
