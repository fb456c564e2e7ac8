"""Point probes and deterministic CSV streaming of time series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from xthm.dofs import ThmState, evaluate_field


@dataclass
class ProbeSeries:
    name: str
    coords: tuple
    fld: str
    times: list
    values: list


class Prober:
    """Samples named (point, field) pairs; element lookups are cached."""

    def __init__(self, model, probes):
        self.model = model
        self.specs = []  # (key, coords, field)
        for p in probes:
            for fld in p.fields:
                self.specs.append((f"{p.name}.{fld}", np.asarray(p.coords, dtype=float), fld))

    def sample(self, X, model=None) -> dict:
        model = model or self.model
        out = {}
        by_point: dict[tuple, dict] = {}
        for key, coords, fld in self.specs:
            pt = (coords[0], coords[1])
            if pt not in by_point:
                fv = evaluate_field(
                    coords,
                    ThmState(X=X),
                    model.mesh,
                    model.cracks,
                    model.enrichment,
                    model.dofmap,
                )
                by_point[pt] = {"ux": fv.u[0], "uy": fv.u[1], "p": fv.p, "T": fv.T}
            out[key] = float(by_point[pt][fld]) if by_point[pt][fld] is not None else 0.0
        if model.contact:
            from xthm.contact import contact_diagnostics

            for k, v in contact_diagnostics(model, X).items():
                out[f"contact.{k}"] = float(v)
        return out


def write_probe_csv(path, times, records: dict) -> None:
    """CSV with header ``t,<probe>.<field>,...`` and 15-significant-digit values."""
    keys = sorted(records)
    with open(path, "w", encoding="utf-8") as f:
        f.write("t," + ",".join(keys) + "\n")
        for i, t in enumerate(times):
            row = [f"{t:.15g}"] + [f"{records[k][i]:.15g}" for k in keys]
            f.write(",".join(row) + "\n")


def read_probe_csv(path):
    with open(path, encoding="utf-8") as f:
        header = f.readline().strip().split(",")
        data = np.loadtxt(f, delimiter=",", ndmin=2)
    return header, data
