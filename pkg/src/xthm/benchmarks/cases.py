"""Benchmark definitions, their geometry choices and acceptance metrics.

Each case builds a plain config dict (dumped alongside the results for
reproducibility), runs it through the standard config/runner path, then
computes its acceptance metrics.  Geometry details the source material
leaves open (dam base extent, probe coordinates, graded mesh lines) are
fixed here and documented in the README.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import numpy as np

import yaml

from xthm.config import parse_config
from xthm.conforming import split_mesh_along_path
from xthm.dofs import BoundaryConditionSet
from xthm.errors import InvalidArgumentError
from xthm.mesh import Mesh
from xthm.probes import write_probe_csv
from xthm.runner import run_config


@dataclass
class Criterion:
    name: str
    passed: bool
    measured: object
    target: str


@dataclass
class BenchmarkReport:
    name: str
    criteria: list
    runtime: float
    files: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def summary(self) -> str:
        lines = [f"benchmark {self.name}: {'PASS' if self.passed else 'FAIL'} ({self.runtime:.1f} s)"]
        for c in self.criteria:
            lines.append(
                f"  [{'PASS' if c.passed else 'FAIL'}] {c.name}: measured {c.measured} (target {c.target})"
            )
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


# --- thermal edge crack (plate 0.5 x 2.0, 160x40, F_I -> 0.491) --------------


def edge_crack_thermal_config() -> dict:
    return {
        "name": "edge_crack_thermal",
        "plane": "plane_strain",
        "fields": ["u", "T"],
        "mesh": {
            "structured": {"nx": 40, "ny": 160, "width": 0.5, "height": 2.0},
            "node_sets": {"pin": [0]},
        },
        "materials": [
            {
                "id": 0,
                "E": "9 GPa",
                "nu": 0.3,
                "rho_s": 2000.0,
                "lambda_s": 1000.0,
                "C_s": 300.0,
                "beta_s": 3e-7,
            }
        ],
        "cracks": [{"vertices": [[0.0, 1.0], [0.25, 1.0]], "tips": [False, True]}],
        "bcs": {
            "dirichlet": [
                {"tag": "left", "field": "T", "value": -50.0},
                {"tag": "right", "field": "T", "value": 50.0},
                {"tag": "top", "field": "uy", "value": 0.0},
                {"tag": "bottom", "field": "uy", "value": 0.0},
                {"tag": "pin", "field": "ux", "value": 0.0},
            ]
        },
        "study": {
            "kind": "transient",
            "t_end": 100.0,
            "dt": [[1.0, 30], [2.5, 12], [5.0, 8]],
            "output_times": [2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 25, 30, 40, 60, 100],
        },
        "sif": {
            "tips": [{"crack": 0, "tip": 1}],
            "normalize": {"E": 9e9, "nu": 0.3, "alpha": 1e-7, "theta0": 50.0, "a": 0.25},
        },
        "outputs": {"csv": "probes.csv", "vtk": "edge_crack"},
    }


def run_edge_crack_thermal(outdir, quick=False) -> BenchmarkReport:
    t0 = time.time()
    cfg = parse_config(yaml.safe_dump(edge_crack_thermal_config()))
    rep = run_config(cfg, outdir)
    out_times = [r["label"] for r in rep.sif_rows]
    F = np.array([r["F_I"] for r in rep.sif_rows])
    F_end = F[-1]
    t_ss = next(
        (t for t, f in zip(out_times, F) if abs(f - F_end) <= 0.01 * abs(F_end)), None
    )

    # steady temperature profile vs theta(x) = (2 x - w) theta0 / w
    model, st = rep.model, rep.states[-1]
    w, h = 0.5, 0.0125
    xs = np.array([k * h for k in range(1, 40) if abs(k * h - 0.25) >= 2 * h])
    pts = np.column_stack([xs, np.full_like(xs, 1.0 - 0.6 * h)])
    Tnum = model.sample_fields(st.X, pts)["T"]
    Texact = (2 * xs - w) / w * 50.0
    prof_err = float(np.max(np.abs(Tnum - Texact) / np.abs(Texact)))

    runtime = time.time() - t0
    criteria = [
        Criterion("steady F_I in [0.481, 0.501]", 0.481 <= F_end <= 0.501, round(F_end, 4), "0.491 +/- 0.010"),
        Criterion("time to steady in [15, 25] s", t_ss is not None and 15 <= t_ss <= 25, t_ss, "about 20 s"),
        Criterion("steady profile max rel err < 1%", prof_err < 0.01, f"{100 * prof_err:.3f}%", "< 1%"),
        Criterion("desk runtime < 5 min", runtime < 300.0, f"{runtime:.1f} s", "< 300 s"),
    ]
    files = dict(rep.files)
    if outdir:
        path = os.path.join(outdir, "sif_series.csv")
        write_probe_csv(path, np.asarray(out_times, dtype=float), {"F_I": F})
        files["fi_csv"] = path
        prof_path = os.path.join(outdir, "temperature_profile.csv")
        write_probe_csv(prof_path, xs, {"T": Tnum, "T_exact": Texact})
        files["profile_csv"] = prof_path
    return BenchmarkReport("edge_crack_thermal", criteria, runtime, files)


# --- bi-material beam: temperature-induced curved crack growth ---------------


def _bimaterial_mesh_lines():
    mm = 1e-3
    xs = np.concatenate(
        [
            np.arange(0.0, 20.0, 2.5),
            np.arange(20.0, 75.0, 0.5),
            np.arange(75.0, 110.0, 2.5),
            np.arange(110.0, 300.0 + 1e-9, 5.0),
        ]
    )
    ys = np.concatenate(
        [
            np.arange(0.0, 9.2, 2.3),
            np.arange(9.2, 31.7, 0.5),
            [31.7, 32.4, 33.1, 33.8, 34.87],
        ]
    )
    return (xs * mm).tolist(), (ys * mm).tolist()


def bimaterial_beam_config() -> dict:
    xs, ys = _bimaterial_mesh_lines()
    return {
        "name": "bimaterial_beam",
        "plane": "plane_stress",
        "fields": ["u"],
        "mesh": {
            "rectilinear": {"x_lines": xs, "y_lines": ys},
            "node_sets": {"pin_left": [0], "pin_right": [len(xs) - 1]},
        },
        "materials": [
            # beta_s is volumetric: 3x the linear expansion coefficients
            {
                "id": 0,
                "E": "64 GPa",
                "nu": 0.2,
                "beta_s": 9.75e-6,
                "f_t": "80 MPa",
                "G_f": "0.4 N/mm",
            },
            {
                "id": 1,
                "E": "193 GPa",
                "nu": 0.29,
                "beta_s": 5.19e-5,
                "region": [0.0, 0.0317, 0.3, 0.03487],
            },
        ],
        "cracks": [{"vertices": [[0.030, 0.0], [0.030, 0.011]], "tips": [False, True]}],
        "bcs": {
            "dirichlet": [
                {"tag": "pin_left", "field": "u", "value": 0.0},
                {"tag": "pin_right", "field": "uy", "value": 0.0},
            ]
        },
        "uniform_delta_T": "sweep",
        "study": {
            "kind": "sweep",
            "sweep": {"parameter": "uniform_delta_T", "values": [-float(i) for i in range(1, 16)]},
        },
        # hoop stress is checked at the Irwin critical distance
        # r_c = (K_Ic/f_t)^2 / 2pi ~ 10 um for borosilicate (K_Ic ~ 0.76
        # MPa sqrt(m), f_t = 80 MPa), i.e. 0.02 local element sizes; this
        # makes the strength criterion equivalent to an energy-consistent
        # K_eq >= K_Ic trigger
        "growth": {"enabled": True, "increment": 2.5e-3, "r_eval": 0.02, "max_per_increment": 20},
        "outputs": {"vtk": "bimaterial"},
    }


def run_bimaterial_beam(outdir, quick=False) -> BenchmarkReport:
    t0 = time.time()
    cfg = parse_config(yaml.safe_dump(bimaterial_beam_config()))
    rep = run_config(cfg, outdir)
    path = rep.crack_history[-1][0] if rep.crack_history else None
    glass_top = 0.0317
    grew = path is not None and len(path) > 2
    tip_y = float(path[-1][1]) if grew else 0.011
    toward_interface = grew and tip_y > 0.02
    in_glass = tip_y < glass_top
    if grew:
        seg = path[-1] - path[-2]
        angle_from_horizontal = np.degrees(
            np.arccos(min(1.0, abs(seg[0]) / np.hypot(*seg)))
        )
    else:
        angle_from_horizontal = 90.0
    runtime = time.time() - t0
    criteria = [
        Criterion("crack initiates at the notch", grew, f"{(len(path) - 2) if grew else 0} segments", "grows"),
        Criterion("propagates toward the interface", toward_interface, f"tip y = {tip_y * 1e3:.1f} mm", "approaches y = 31.7 mm"),
        Criterion(
            "final direction within 30 deg of interface-parallel",
            grew and angle_from_horizontal <= 30.0,
            f"{angle_from_horizontal:.1f} deg from horizontal",
            "<= 30 deg",
        ),
        Criterion("tip remains in the glass layer", in_glass, f"tip y = {tip_y * 1e3:.2f} mm", "< 31.7 mm"),
    ]
    files = dict(rep.files)
    if outdir and grew:
        pth = os.path.join(outdir, "crack_path.csv")
        with open(pth, "w", encoding="utf-8") as f:
            f.write("x,y\n")
            for x, y in path:
                f.write(f"{x:.15g},{y:.15g}\n")
        files["crack_path"] = pth
    return BenchmarkReport("bimaterial_beam", criteria, runtime, files)


# --- double-clamped beam with a full-depth crack: thermo-mechanical contact --


def clamped_beam_contact_config() -> dict:
    return {
        "name": "clamped_beam_contact",
        "plane": "plane_strain",
        "fields": ["u", "T"],
        "mesh": {
            "structured": {"nx": 155, "ny": 47, "width": 10.0, "height": 3.0},
            "edge_subsets": [{"name": "load", "base": "top", "x_range": [4.8, 5.2]}],
        },
        "materials": [
            {
                "id": 0,
                "E": "10 GPa",
                "nu": 0.3,
                "rho_s": 1000.0,
                "lambda_s": 150.0,
                "C_s": 100.0,
                "beta_s": 23.86e-6,
            }
        ],
        "cracks": [
            {
                "vertices": [[5.0, -0.1], [5.0, 3.1]],
                "tips": [False, False],
                "contact": {"k_N": "1e9 MN/m^3", "h_cont": 1e5},
            }
        ],
        "bcs": {
            "dirichlet": [
                {"tag": "left", "field": "u", "value": 0.0},
                {"tag": "right", "field": "ux", "value": -0.06},
                {"tag": "right", "field": "uy", "value": 0.0},
                {"tag": "left", "field": "T", "value": 0.0},
                {"tag": "right", "field": "T", "value": 10.0},
            ],
            "neumann": [{"tag": "load", "field": "uy", "value": -6e8}],
        },
        "study": {"kind": "stationary"},
        "probes": [
            {"name": "mid_left", "coords": [4.9, 1.5], "fields": ["T", "ux"]},
            {"name": "mid_right", "coords": [5.1, 1.5], "fields": ["T", "ux"]},
        ],
        "outputs": {"vtk": "clamped_beam"},
    }


def run_clamped_beam_contact(outdir, quick=False) -> BenchmarkReport:
    t0 = time.time()
    cfg = parse_config(yaml.safe_dump(clamped_beam_contact_config()))
    rep = run_config(cfg, outdir)
    d = rep.contact or {}
    runtime = time.time() - t0
    criteria = [
        Criterion(
            "max penetration < 1e-6 m",
            d.get("max_penetration", np.inf) < 1e-6,
            f"{d.get('max_penetration', np.inf):.2e} m",
            "< 1e-6 m",
        ),
        Criterion(
            "Kuhn-Tucker complementarity < 1e-6 N/m",
            d.get("complementarity", np.inf) < 1e-6,
            f"{d.get('complementarity', np.inf):.2e}",
            "< 1e-6 N/m",
        ),
        Criterion(
            "steady temperature jump on active zone < 1e-3 C",
            d.get("max_temperature_jump", np.inf) < 1e-3,
            f"{d.get('max_temperature_jump', np.inf):.2e} C",
            "< 1e-3 C",
        ),
        Criterion("contact is active", d.get("active_length", 0.0) > 0.1, f"{d.get('active_length', 0):.2f} m", "> 0"),
    ]
    notes = [
        "the steady heat flux forced through the contact zone bounds the jump from "
        "below at lambda*dT/(L*h_cont) = 1.5e-3 C, so the 1e-3 C target cannot be "
        "met by any correct implementation with these parameters; the delta-weighted "
        "mean active-zone jump equals the analytic flux balance (~3e-3 C) and the "
        "pointwise max sits at the contact-zone edge where the flux concentrates"
    ]
    return BenchmarkReport("clamped_beam_contact", criteria, runtime, dict(rep.files), notes)


# --- embankment dam with two sheet piles: XFEM vs conforming oracle ----------

# A/B and D/E flank the piles at their mid-depths, one metre away (inside
# the tip-quantization zone the probe values inherit the O(h) effective
# slot depth); C sits at the dam-base midpoint
DAM_PROBES = [
    {"name": "A", "coords": [9.0, -2.3], "fields": ["p", "uy"]},
    {"name": "B", "coords": [11.0, -2.3], "fields": ["p", "uy"]},
    {"name": "C", "coords": [17.75, -6.75], "fields": ["p", "uy"]},
    {"name": "D", "coords": [24.5, -1.3], "fields": ["p", "uy"]},
    {"name": "E", "coords": [26.5, -1.3], "fields": ["p", "uy"]},
]


def dam_config(nx: int, ny: int, pile_x=(10.0, 25.5)) -> dict:
    x1, x2 = pile_x
    return {
        "name": "dam_sheet_piles",
        "plane": "plane_strain",
        "fields": ["u", "p"],
        "mesh": {
            "structured": {"nx": nx, "ny": ny, "width": 36.0, "height": 13.5, "origin": [0.0, -13.5]},
            "edge_subsets": [
                {"name": "upstream", "base": "top", "x_range": [-1.0, x1]},
                {"name": "dam_base", "base": "top", "x_range": [x1, x2]},
                {"name": "downstream", "base": "top", "x_range": [x2, 37.0]},
            ],
        },
        "materials": [
            {
                "id": 0,
                "E": "9 GPa",
                "nu": 0.4,
                "rho_s": 2000.0,
                "Ks": "1e14 MPa",
            }
        ],
        "fluid": {"rho_f": 1000.0, "Kf": "2e3 MPa", "mu_f": 2e-3},
        "porosity": 0.3,
        "permeability": 1e-12,
        "cracks": [
            {"vertices": [[x1, 0.0], [x1, -4.6]], "tips": [False, True]},
            {"vertices": [[x2, 0.0], [x2, -2.6]], "tips": [False, True]},
        ],
        "bcs": {
            "dirichlet": [
                {"tag": "bottom", "field": "u", "value": 0.0},
                {"tag": "left", "field": "ux", "value": 0.0},
                {"tag": "right", "field": "ux", "value": 0.0},
                {"tag": "upstream", "field": "p", "value": 1e5},
                {"tag": "downstream", "field": "p", "value": 0.0},
            ],
            "neumann": [
                {"tag": "upstream", "field": "uy", "value": -1e5},
                {"tag": "dam_base", "field": "uy", "value": -117720.0},
            ],
        },
        "study": {
            "kind": "transient",
            "t_end": 110.0,
            "dt": [[0.5, 10], [1.0, 10], [5.0, 9], [10.0, 5]],
            "output_times": [5.0, 15.0, 110.0],
        },
        "probes": DAM_PROBES,
        "outputs": {"csv": "probes.csv", "vtk": "dam"},
    }


def _dam_conforming(cfg, cracks):
    """Conforming twin: slots realized by duplicated nodes along the piles.

    Dirichlet data is aligned with the XFEM convention at slot mouths: an
    enriched Dirichlet DOF is pinned to zero there, so both faces of a
    mouth node carry the boundary value; the oracle constrains both copies
    accordingly.
    """
    import copy

    mesh = cfg.mesh
    twins = {}
    for crack in cracks:
        mesh, twin = split_mesh_along_path(mesh, crack)
        twins.update(twin)

    bcs = BoundaryConditionSet()
    node_sets = dict(mesh.node_sets)
    extra = 0
    for bc in cfg.bcs.dirichlet:
        bcs.dirichlet.append(bc)
        try:
            tagged = set(int(n) for n in mesh.tag_node_ids(bc.tag))
        except Exception:
            continue
        for orig, dup in twins.items():
            pair = {orig, dup}
            missing = pair - tagged
            if len(missing) == 1 and len(pair & tagged) == 1:
                name = f"__twin{extra}"
                extra += 1
                node_sets[name] = np.array(sorted(missing), dtype=np.int64)
                bcs.add_dirichlet(name, bc.fld, bc.value)
    bcs.neumann = list(cfg.bcs.neumann)

    mesh = Mesh(
        coords=mesh.coords,
        elements=mesh.elements,
        material_ids=mesh.material_ids,
        edge_tags=mesh.edge_tags,
        node_sets=node_sets,
    )
    ccfg = copy.copy(cfg)
    ccfg.__dict__["mesh"] = mesh
    ccfg.__dict__["cracks"] = []
    ccfg.__dict__["contact"] = {}
    ccfg.__dict__["bcs"] = bcs
    return ccfg


def _probe_matrix(rep, times):
    keys = sorted(rep.probe_values)
    out = np.zeros((len(times), len(keys)))
    for j, k in enumerate(keys):
        for i, t in enumerate(times):
            idx = int(np.argmin(np.abs(rep.probe_times - t)))
            out[i, j] = rep.probe_values[k][idx]
    return keys, out


def _field_scales(keys, mat):
    """Per-column normalization by the largest probe magnitude of its field."""
    scales = np.zeros(len(keys))
    for fld in ("p", "uy", "ux", "T"):
        cols = [j for j, k in enumerate(keys) if k.endswith("." + fld)]
        if cols:
            scales[cols] = max(float(np.max(np.abs(mat[:, cols]))), 1e-12)
    return scales


def run_dam_sheet_piles(outdir, quick=False) -> BenchmarkReport:
    t0 = time.time()
    times = [5.0, 15.0, 110.0]
    sizes = [(72, 27), (144, 54)] if quick else [(72, 27), (144, 54), (212, 80)]
    notes = []
    reports = {}
    for nx, ny in sizes:
        sub = os.path.join(outdir, f"mesh_{nx}x{ny}") if outdir else None
        cfg = parse_config(yaml.safe_dump(dam_config(nx, ny)))
        reports[(nx, ny)] = run_config(cfg, sub)

    # oracle comparison on each mesh, pile lines snapped to the grid
    comp_err = 0.0
    for nx, ny in sizes:
        hx = 36.0 / nx
        x1 = round(10.0 / hx) * hx
        x2 = round(25.5 / hx) * hx
        cfg = parse_config(yaml.safe_dump(dam_config(nx, ny, pile_x=(x1, x2))))
        xrep = run_config(cfg, None) if (x1, x2) != (10.0, 25.5) else reports[(nx, ny)]
        ccfg = _dam_conforming(cfg, cfg.cracks)
        crep = run_config(ccfg, None)
        keys, xm = _probe_matrix(xrep, times)
        _, cm = _probe_matrix(crep, times)
        scale = _field_scales(keys, cm)
        dev = float(np.max(np.abs(xm - cm) / scale))
        # the true-geometry XFEM run vs the snapped oracle exercises genuinely
        # different discretizations when the piles sit mid-element
        _, tm = _probe_matrix(reports[(nx, ny)], times)
        dev = max(dev, float(np.max(np.abs(tm - cm) / scale)))
        comp_err = max(comp_err, dev)
        notes.append(f"mesh {nx}x{ny}: max probe deviation vs conforming oracle {100 * dev:.3f}%")

    # mesh-ladder convergence at t = 110 s (true pile geometry)
    keys = _probe_matrix(reports[sizes[0]], [110.0])[0]
    mats = [_probe_matrix(reports[s], [110.0])[1] for s in sizes]
    scale = _field_scales(keys, mats[-1])
    diffs = [float(np.max(np.abs(mats[i + 1] - mats[i]) / scale)) for i in range(len(mats) - 1)]
    monotone = all(diffs[i + 1] < diffs[i] for i in range(len(diffs) - 1)) if len(diffs) > 1 else True
    finest_gap = diffs[-1] if diffs else 0.0

    runtime = time.time() - t0
    criteria = [
        Criterion(
            "probes match conforming oracle within 2% at t in {5, 15, 110} s",
            comp_err < 0.02,
            f"{100 * comp_err:.3f}%",
            "< 2%",
        ),
        Criterion("mesh ladder converges monotonically", monotone, [f"{100 * d:.3f}%" for d in diffs], "decreasing"),
        Criterion("two finest meshes differ < 1%", finest_gap < 0.01, f"{100 * finest_gap:.3f}%", "< 1%"),
    ]
    files = dict(reports[sizes[-1]].files)
    return BenchmarkReport("dam_sheet_piles", criteria, runtime, files, notes)


# --- inclined fault in a saturated block: full THM ---------------------------

FAULT_ANGLES = [0.0, 30.0, 45.0, 60.0, 90.0]


def inclined_fault_config(beta_deg: float, nx: int = 91) -> dict:
    b = np.radians(beta_deg)
    c, s = float(0.15 * np.cos(b)), float(0.15 * np.sin(b))
    nrm = np.array([-np.sin(b), np.cos(b)])
    if nrm[1] < 0:
        nrm = -nrm
    h = 1.0 / nx
    off = 2.2 * h
    low = (float(0.5 - off * nrm[0]), float(0.5 - off * nrm[1]))
    up = (float(0.5 + off * nrm[0]), float(0.5 + off * nrm[1]))
    return {
        "name": f"inclined_fault_{int(beta_deg)}",
        "plane": "plane_strain",
        "fields": ["u", "p", "T"],
        "mesh": {"structured": {"nx": nx, "ny": nx, "width": 1.0, "height": 1.0}},
        "materials": [
            {
                "id": 0,
                "E": "1.6 GPa",
                "nu": 0.33,
                "rho_s": 2000.0,
                "Ks": "1e14 MPa",
                "lambda_s": 2.88,
                "C_s": 1170.0,
                "beta_s": 6.6e-6,
            }
        ],
        # mu_f from Table 4 (2e-3 Pa.s); Table 5's 2e3 is a typo, see README
        "fluid": {
            "rho_f": 1000.0,
            "Kf": "2e3 MPa",
            "mu_f": 2e-3,
            "beta_f": 0.0,
            "lambda_f": 0.6,
            "C_f": 4200.0,
        },
        "porosity": 0.3,
        "permeability": 1e-12,
        "cracks": [
            {
                "vertices": [[round(0.5 - c, 12), round(0.5 - s, 12)], [round(0.5 + c, 12), round(0.5 + s, 12)]],
                "tips": [True, True],
            }
        ],
        "bcs": {
            "dirichlet": [
                {"tag": "bottom", "field": "T", "value": 50.0},
                {"tag": "bottom", "field": "uy", "value": 0.0},
                {"tag": "top", "field": "T", "value": 0.0},
                {"tag": "top", "field": "p", "value": 0.0},
                {"tag": "left", "field": "ux", "value": 0.0},
                {"tag": "right", "field": "ux", "value": 0.0},
            ],
            "neumann": [{"tag": "bottom", "field": "p", "value": 1e-4}],
        },
        "solver": {"reuse_jacobian": True},
        "study": {
            "kind": "transient",
            "t_end": 1e4,
            "dt": [[50.0, 10], [100.0, 5], [250.0, 4], [500.0, 4], [1000.0, 6]],
            "output_times": [2000.0, 1e4],
        },
        "probes": [
            {"name": "low", "coords": [low[0], low[1]], "fields": ["p", "T"]},
            {"name": "up", "coords": [up[0], up[1]], "fields": ["p", "T"]},
        ],
        "outputs": {"csv": "probes.csv", "vtk": "fault"},
    }


def run_inclined_fault(outdir, quick=False) -> BenchmarkReport:
    t0 = time.time()
    nx = 31 if quick else 91
    angles = FAULT_ANGLES
    dp_2000 = {}
    dT_peak = {}
    decay_ok = {}
    notes = []
    for beta in angles:
        cfg = parse_config(yaml.safe_dump(inclined_fault_config(beta, nx=nx)))
        sub = os.path.join(outdir, f"beta_{int(beta)}") if outdir else None
        rep = run_config(cfg, sub)
        t = rep.probe_times
        dp = rep.probe_values["low.p"] - rep.probe_values["up.p"]
        dT = rep.probe_values["low.T"] - rep.probe_values["up.T"]
        i2000 = int(np.argmin(np.abs(t - 2000.0)))
        dp_2000[beta] = float(dp[i2000])
        dT_peak[beta] = float(np.max(np.abs(dT)))
        # decay toward steady: settled pressure jump and temperature jump past
        # its peak; jumps below 1 Pa / 1e-3 C are noise around zero and count
        # as settled (the fault aligned with the flow barely disturbs it)
        p_settled = abs(dp[-1] - dp[len(t) // 2]) <= 0.05 * max(np.max(np.abs(dp)), 1.0)
        ipeak = int(np.argmax(np.abs(dT)))
        T_decayed = abs(dT[-1]) <= 0.95 * max(abs(dT[ipeak]), 1e-12) or dT_peak[beta] < 1e-3
        decay_ok[beta] = bool(p_settled and T_decayed)
        notes.append(
            f"beta={beta:.0f}: dp(2000s)={dp_2000[beta]:.1f} Pa, peak |dT|={dT_peak[beta]:.3f} C, "
            f"|dT|(end)={abs(dT[-1]):.3f} C"
        )
    ordered = all(
        dp_2000[angles[i]] > dp_2000[angles[i + 1]] for i in range(len(angles) - 1)
    )
    t_max_at_0 = max(dT_peak, key=dT_peak.get) == 0.0
    decays = all(decay_ok.values())
    runtime = time.time() - t0
    criteria = [
        Criterion(
            "pressure jump at t=2000 s strictly decreasing in beta",
            ordered,
            {k: round(v, 1) for k, v in dp_2000.items()},
            "dp(0) > dp(30) > dp(45) > dp(60) > dp(90)",
        ),
        Criterion(
            "temperature jump maximal for the horizontal fault",
            t_max_at_0,
            {k: round(v, 3) for k, v in dT_peak.items()},
            "max at beta = 0",
        ),
        Criterion("jumps decay toward steady state by t = 1e4 s", decays, decay_ok, "settled/decaying"),
    ]
    return BenchmarkReport("inclined_fault", criteria, runtime, {}, notes)


# --- eleven random faults ------------------------------------------------------

MULTI_FAULTS = [
    ((0.20, 0.20), 30.0),
    ((0.50, 0.15), 0.0),
    ((0.80, 0.20), 60.0),
    ((0.15, 0.50), 90.0),
    ((0.45, 0.45), 45.0),
    ((0.75, 0.50), 120.0),
    ((0.30, 0.70), 150.0),
    ((0.60, 0.75), 15.0),
    ((0.85, 0.80), 75.0),
    ((0.20, 0.85), 0.0),
    ((0.55, 0.93), 165.0),
]


def multi_fault_config(nx: int = 91) -> dict:
    cfg = inclined_fault_config(0.0, nx=nx)
    cfg["name"] = "multi_fault"
    cracks = []
    for (cx, cy), ang in MULTI_FAULTS:
        b = np.radians(ang)
        dx, dy = float(0.1 * np.cos(b)), float(0.1 * np.sin(b))
        cracks.append(
            {
                "vertices": [
                    [round(cx - dx, 12), round(cy - dy, 12)],
                    [round(cx + dx, 12), round(cy + dy, 12)],
                ],
                "tips": [True, True],
            }
        )
    cfg["cracks"] = cracks
    cfg["study"]["t_end"] = 8000.0
    cfg["study"]["dt"] = [[50.0, 10], [100.0, 5], [250.0, 4], [500.0, 4], [1000.0, 4]]
    cfg["study"]["output_times"] = [2000.0, 8000.0]
    cfg["probes"] = []
    for k, ((cx, cy), ang) in enumerate(MULTI_FAULTS):
        b = np.radians(ang)
        nrm = np.array([-np.sin(b), np.cos(b)])
        if nrm[1] < 0:
            nrm = -nrm
        off = 2.2 / nx
        cfg["probes"] += [
            {
                "name": f"f{k}_low",
                "coords": [float(cx - off * nrm[0]), float(cy - off * nrm[1])],
                "fields": ["T", "p"],
            },
            {
                "name": f"f{k}_up",
                "coords": [float(cx + off * nrm[0]), float(cy + off * nrm[1])],
                "fields": ["T", "p"],
            },
        ]
    return cfg


def run_multi_fault(outdir, quick=False) -> BenchmarkReport:
    t0 = time.time()
    nx = 31 if quick else 91
    cfg = parse_config(yaml.safe_dump(multi_fault_config(nx=nx)))
    rep = run_config(cfg, outdir)
    jumps = []
    for k in range(len(MULTI_FAULTS)):
        dT = rep.probe_values[f"f{k}_low.T"] - rep.probe_values[f"f{k}_up.T"]
        jumps.append(float(np.max(np.abs(dT))))
    runtime = time.time() - t0
    criteria = [
        Criterion(
            "temperature jumps develop across the faults",
            sum(1 for j in jumps if j > 0.05) >= 8,
            f"{sum(1 for j in jumps if j > 0.05)}/11 faults with |dT| > 0.05 C",
            ">= 8 of 11",
        )
    ]
    return BenchmarkReport("multi_fault", criteria, runtime, dict(rep.files), [f"peak jumps: {[round(j, 2) for j in jumps]}"])


BENCHMARKS = {
    "edge_crack_thermal": run_edge_crack_thermal,
    "bimaterial_beam": run_bimaterial_beam,
    "clamped_beam_contact": run_clamped_beam_contact,
    "dam_sheet_piles": run_dam_sheet_piles,
    "inclined_fault": run_inclined_fault,
    "multi_fault": run_multi_fault,
}

CONFIG_BUILDERS = {
    "edge_crack_thermal": edge_crack_thermal_config,
    "bimaterial_beam": bimaterial_beam_config,
    "clamped_beam_contact": clamped_beam_contact_config,
    "dam_sheet_piles": lambda: dam_config(144, 54),
    "inclined_fault": lambda: inclined_fault_config(45.0),
    "multi_fault": multi_fault_config,
}


def benchmark_config(name: str) -> dict:
    if name not in CONFIG_BUILDERS:
        raise InvalidArgumentError(
            f"unknown benchmark {name!r}; available: {', '.join(sorted(CONFIG_BUILDERS))}"
        )
    return CONFIG_BUILDERS[name]()


def run_benchmark(name: str, outdir: str | None = None, quick: bool = False) -> BenchmarkReport:
    if name not in BENCHMARKS:
        raise InvalidArgumentError(
            f"unknown benchmark {name!r}; available: {', '.join(sorted(BENCHMARKS))}"
        )
    if outdir:
        os.makedirs(outdir, exist_ok=True)
        with open(os.path.join(outdir, f"{name}_config.yaml"), "w", encoding="utf-8") as f:
            yaml.safe_dump(benchmark_config(name), f, sort_keys=True)
    return BENCHMARKS[name](outdir, quick=quick)
