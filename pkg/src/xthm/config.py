"""Run configuration: YAML parsing, unit conversion, validation, round-trip.

The config layer accepts scalar values either as plain numbers (SI) or as
strings with a whitelisted unit ("9 GPa", "6 cm", "1e9 MN/m^3"); everything
is converted to strict SI at parse time.  Validation collects every error
with a path-addressed message instead of stopping at the first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from xthm.contact import ContactParams
from xthm.dofs import BoundaryConditionSet, TimeFunction
from xthm.errors import ConfigError
from xthm.levelset import CrackGeometry
from xthm.materials import (
    PLANE_STRAIN,
    PLANE_STRESS,
    FluidProps,
    SolidProps,
    derive_mixture,
    solid_mixture,
)
from xthm.mesh import (
    Mesh,
    assign_material_boxes,
    build_rectilinear_grid,
    build_structured_grid,
    read_mesh,
)

UNIT_FACTORS = {
    "Pa": 1.0,
    "kPa": 1e3,
    "MPa": 1e6,
    "GPa": 1e9,
    "N": 1.0,
    "kN": 1e3,
    "MN": 1e6,
    "m": 1.0,
    "cm": 1e-2,
    "mm": 1e-3,
    "s": 1.0,
    "Pa/m": 1.0,
    "MN/m^3": 1e6,
    "N/m": 1.0,
    "N/mm": 1e3,
    "Pa*s": 1.0,
    "Pa.s": 1.0,
    "W/m.C": 1.0,
    "W/m^2.C": 1.0,
}


def parse_quantity(value, path: str, errors: list) -> float:
    """Number (SI) or '<number> <unit>' string with a whitelisted unit."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        parts = value.split()
        if len(parts) == 2:
            try:
                num = float(parts[0])
            except ValueError:
                errors.append(f"{path}: cannot parse number in {value!r}")
                return 0.0
            if parts[1] not in UNIT_FACTORS:
                errors.append(f"{path}: unknown unit {parts[1]!r}")
                return 0.0
            return num * UNIT_FACTORS[parts[1]]
        try:
            return float(value)
        except ValueError:
            errors.append(f"{path}: expected a number or '<number> <unit>', got {value!r}")
            return 0.0
    errors.append(f"{path}: expected a scalar, got {type(value).__name__}")
    return 0.0


def _time_function(value, path: str, errors: list) -> TimeFunction:
    if isinstance(value, dict):
        if "ramp" in value:
            r = value["ramp"]
            return TimeFunction(
                kind="ramp",
                t0=parse_quantity(r.get("t0", 0.0), f"{path}.ramp.t0", errors),
                t1=parse_quantity(r.get("t1", 1.0), f"{path}.ramp.t1", errors),
                v0=parse_quantity(r.get("v0", 0.0), f"{path}.ramp.v0", errors),
                v1=parse_quantity(r.get("v1", 0.0), f"{path}.ramp.v1", errors),
            )
        if "step" in value:
            s = value["step"]
            return TimeFunction(
                kind="step",
                t0=parse_quantity(s.get("t", 0.0), f"{path}.step.t", errors),
                v0=parse_quantity(s.get("before", 0.0), f"{path}.step.before", errors),
                v1=parse_quantity(s.get("after", 0.0), f"{path}.step.after", errors),
            )
        errors.append(f"{path}: unknown time function {sorted(value)}")
        return TimeFunction(value=0.0)
    return TimeFunction(kind="constant", value=parse_quantity(value, path, errors))


@dataclass
class StudyConfig:
    kind: str = "stationary"  # stationary | transient | sweep
    t_end: float = 0.0
    dt: object = None  # scalar or [[dt, n], ...]
    output_times: list = field(default_factory=list)
    sweep_parameter: str = "uniform_delta_T"
    sweep_values: list = field(default_factory=list)


@dataclass
class GrowthConfig:
    enabled: bool = False
    increment: float = 0.0
    r_eval_factor: float = 0.5  # hoop-stress evaluation radius, times h_e
    max_per_increment: int = 10


@dataclass
class SifConfig:
    tips: list = field(default_factory=list)  # (crack_id, tip_index)
    r1_factor: float = 4.0
    r2_factor: float = 8.0
    normalize: dict | None = None  # keys E, nu, alpha, theta0, a


@dataclass
class OutputConfig:
    csv: str | None = None
    vtk: str | None = None
    vtk_cadence: int = 0  # 0 = final state only
    log: str | None = None


@dataclass
class ProbeConfig:
    name: str
    coords: tuple
    fields: tuple


@dataclass
class RunConfig:
    """Validated, SI-normalized description of one solver run."""

    name: str
    plane: str
    fields: tuple
    mesh: Mesh
    solids: dict  # material id -> SolidProps
    fluid: FluidProps | None
    porosity: float
    permeability: float
    cracks: list
    contact: dict  # crack id -> ContactParams
    bcs: BoundaryConditionSet
    body_force: tuple
    T0: float
    uniform_delta_T: float
    delta_s: float
    initial: dict
    solver: dict
    study: StudyConfig
    growth: GrowthConfig
    sif: SifConfig
    probes: list
    outputs: OutputConfig
    normalized: dict  # canonical dict for lossless round-trips

    def materials(self):
        mode = self.plane
        out = {}
        for mid, solid in self.solids.items():
            if self.fluid is not None and "p" in self.fields:
                out[mid] = derive_mixture(solid, self.fluid, self.porosity, self.permeability, mode)
            else:
                out[mid] = solid_mixture(solid, mode)
        return out

    def build_model(self):
        from xthm.assembly import Model

        return Model(
            mesh=self.mesh,
            cracks=self.cracks,
            materials=self.materials(),
            fields=self.fields,
            bcs=self.bcs,
            contact=self.contact,
            body_force=self.body_force,
            T0=self.T0,
            delta_s=self.delta_s,
            uniform_delta_T=self.uniform_delta_T,
        )


def parse_config(text: str) -> RunConfig:
    """Parse and validate a YAML run configuration.

    Raises ConfigError carrying the full list of problems found.
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"YAML syntax error: {exc}"]) from exc
    if not isinstance(raw, dict):
        raise ConfigError(["config root must be a mapping"])
    errors: list[str] = []

    name = str(raw.get("name", "run"))
    plane = raw.get("plane", PLANE_STRAIN)
    if plane not in (PLANE_STRAIN, PLANE_STRESS):
        errors.append(f"plane: must be {PLANE_STRAIN} or {PLANE_STRESS}, got {plane!r}")
        plane = PLANE_STRAIN

    fields = tuple(raw.get("fields", ["u", "p", "T"]))
    for f in fields:
        if f not in ("u", "p", "T"):
            errors.append(f"fields: unknown field {f!r}")

    mesh = _parse_mesh(raw.get("mesh"), errors)

    solids: dict[int, SolidProps] = {}
    regions = []
    for i, mraw in enumerate(raw.get("materials", []) or []):
        path = f"materials[{i}]"
        if not isinstance(mraw, dict):
            errors.append(f"{path}: must be a mapping")
            continue
        mid = int(mraw.get("id", i))
        kwargs = {}
        for key in ("E", "nu", "rho_s", "Ks", "beta_s", "lambda_s", "C_s", "f_t", "G_f"):
            if key in mraw:
                kwargs[key] = parse_quantity(mraw[key], f"{path}.{key}", errors)
        try:
            solids[mid] = SolidProps(**kwargs)
        except Exception as exc:
            errors.append(f"{path}: {exc}")
        if "region" in mraw:
            box = mraw["region"]
            if not (isinstance(box, (list, tuple)) and len(box) == 4):
                errors.append(f"{path}.region: expected [x0, y0, x1, y1]")
            else:
                regions.append((mid, *[parse_quantity(v, f"{path}.region", errors) for v in box]))
    if not solids:
        errors.append("materials: at least one material is required")
        solids[0] = SolidProps(E=1e9, nu=0.3)
    if mesh is not None and regions:
        mesh = assign_material_boxes(mesh, regions)
    if mesh is not None:
        for mid in np.unique(mesh.material_ids):
            if int(mid) not in solids:
                errors.append(f"mesh references material id {int(mid)} not present in materials")

    fluid = None
    if raw.get("fluid") is not None:
        fraw = raw["fluid"]
        kwargs = {}
        for key in ("rho_f", "Kf", "mu_f", "beta_f", "lambda_f", "C_f"):
            if key in fraw:
                kwargs[key] = parse_quantity(fraw[key], f"fluid.{key}", errors)
        try:
            fluid = FluidProps(**kwargs)
        except Exception as exc:
            errors.append(f"fluid: {exc}")
    porosity = parse_quantity(raw.get("porosity", 0.3), "porosity", errors)
    permeability = parse_quantity(raw.get("permeability", 0.0), "permeability", errors)
    if "p" in fields and fluid is None:
        errors.append("fields include 'p' but no fluid block is given")

    cracks = []
    contact = {}
    for i, craw in enumerate(raw.get("cracks", []) or []):
        path = f"cracks[{i}]"
        try:
            verts = np.asarray(craw["vertices"], dtype=float)
            tips = craw.get("tips", [False, False])
            cracks.append(CrackGeometry(vertices=verts, tips=(bool(tips[0]), bool(tips[1]))))
        except Exception as exc:
            errors.append(f"{path}: {exc}")
            continue
        if "contact" in craw and craw["contact"] is not None:
            c = craw["contact"]
            try:
                contact[i] = ContactParams(
                    k_N=parse_quantity(c["k_N"], f"{path}.contact.k_N", errors),
                    h_cont=parse_quantity(c.get("h_cont", 0.0), f"{path}.contact.h_cont", errors),
                    delta_width=(
                        parse_quantity(c["delta_width"], f"{path}.contact.delta_width", errors)
                        if "delta_width" in c
                        else None
                    ),
                )
            except Exception as exc:
                errors.append(f"{path}.contact: {exc}")

    bcs = BoundaryConditionSet()
    braw = raw.get("bcs", {}) or {}
    known_tags = set(mesh.edge_tags) | set(mesh.node_sets) if mesh is not None else set()
    scalar_ok = {"ux", "uy", "p", "T", "u"}
    for i, d in enumerate(braw.get("dirichlet", []) or []):
        path = f"bcs.dirichlet[{i}]"
        tag, fld = d.get("tag"), d.get("field")
        if tag not in known_tags:
            errors.append(f"{path}: unknown tag {tag!r}")
            continue
        if fld not in scalar_ok:
            errors.append(f"{path}: unknown field {fld!r}")
            continue
        bcs.add_dirichlet(tag, fld, _time_function(d.get("value", 0.0), f"{path}.value", errors))
    for i, nb in enumerate(braw.get("neumann", []) or []):
        path = f"bcs.neumann[{i}]"
        tag, fld = nb.get("tag"), nb.get("field")
        if tag not in known_tags:
            errors.append(f"{path}: unknown tag {tag!r}")
            continue
        if fld not in ("ux", "uy", "p", "T"):
            errors.append(f"{path}: unknown field {fld!r}")
            continue
        bcs.add_neumann(tag, fld, _time_function(nb.get("value", 0.0), f"{path}.value", errors))

    initial = {}
    for fld, val in (raw.get("initial", {}) or {}).items():
        if fld not in ("u", "p", "T"):
            errors.append(f"initial.{fld}: unknown field")
        else:
            initial[fld] = parse_quantity(val, f"initial.{fld}", errors)

    solver = dict(raw.get("solver", {}) or {})
    if "scheme" in solver and solver["scheme"] not in ("backward_euler", "generalized_alpha"):
        errors.append(f"solver.scheme: unknown scheme {solver['scheme']!r}")

    sraw = raw.get("study", {}) or {}
    study = StudyConfig(
        kind=sraw.get("kind", "stationary"),
        t_end=parse_quantity(sraw.get("t_end", 0.0), "study.t_end", errors),
        dt=sraw.get("dt"),
        output_times=[
            parse_quantity(v, "study.output_times", errors)
            for v in (sraw.get("output_times", []) or [])
        ],
        sweep_parameter=(sraw.get("sweep", {}) or {}).get("parameter", "uniform_delta_T"),
        sweep_values=[
            parse_quantity(v, "study.sweep.values", errors)
            for v in ((sraw.get("sweep", {}) or {}).get("values", []) or [])
        ],
    )
    if study.kind not in ("stationary", "transient", "sweep"):
        errors.append(f"study.kind: unknown kind {study.kind!r}")
    if study.kind == "transient" and study.dt is None:
        errors.append("study: transient runs need a dt entry")
    if study.kind == "sweep" and not study.sweep_values:
        errors.append("study: sweep runs need sweep.values")

    graw = raw.get("growth", {}) or {}
    growth = GrowthConfig(
        enabled=bool(graw.get("enabled", False)),
        increment=parse_quantity(graw.get("increment", 0.0), "growth.increment", errors),
        r_eval_factor=parse_quantity(graw.get("r_eval", 0.5), "growth.r_eval", errors),
        max_per_increment=int(graw.get("max_per_increment", 10)),
    )
    if growth.enabled and growth.increment <= 0:
        errors.append("growth.increment must be positive when growth is enabled")

    sifraw = raw.get("sif", {}) or {}
    sif = SifConfig(
        tips=[(int(t.get("crack", 0)), int(t.get("tip", 1))) for t in (sifraw.get("tips") or [])],
        r1_factor=parse_quantity(sifraw.get("r1", 4.0), "sif.r1", errors),
        r2_factor=parse_quantity(sifraw.get("r2", 8.0), "sif.r2", errors),
        normalize=sifraw.get("normalize"),
    )
    for cid, tixp in sif.tips:
        if not 0 <= cid < len(cracks):
            errors.append(f"sif.tips: crack index {cid} out of range")

    probes = []
    for i, p in enumerate(raw.get("probes", []) or []):
        path = f"probes[{i}]"
        try:
            probes.append(
                ProbeConfig(
                    name=str(p["name"]),
                    coords=tuple(float(v) for v in p["coords"]),
                    fields=tuple(p.get("fields", ["p"])),
                )
            )
        except Exception as exc:
            errors.append(f"{path}: {exc}")

    oraw = raw.get("outputs", {}) or {}
    vtk_raw = oraw.get("vtk")
    outputs = OutputConfig(
        csv=oraw.get("csv"),
        vtk=(vtk_raw or {}).get("path") if isinstance(vtk_raw, dict) else vtk_raw,
        vtk_cadence=int((vtk_raw or {}).get("cadence", 0)) if isinstance(vtk_raw, dict) else 0,
        log=oraw.get("log"),
    )

    body_force = raw.get("body_force", [0.0, 0.0])
    T0 = parse_quantity(raw.get("reference_temperature", 0.0), "reference_temperature", errors)
    udT = raw.get("uniform_delta_T", 0.0)
    udT = 0.0 if udT == "sweep" else parse_quantity(udT, "uniform_delta_T", errors)
    delta_s = parse_quantity(raw.get("delta_s", 0.005), "delta_s", errors)

    if errors:
        raise ConfigError(errors)
    return RunConfig(
        name=name,
        plane=plane,
        fields=fields,
        mesh=mesh,
        solids=solids,
        fluid=fluid,
        porosity=porosity,
        permeability=permeability,
        cracks=cracks,
        contact=contact,
        bcs=bcs,
        body_force=tuple(float(v) for v in body_force),
        T0=T0,
        uniform_delta_T=udT,
        delta_s=delta_s,
        initial=initial,
        solver=solver,
        study=study,
        growth=growth,
        sif=sif,
        probes=probes,
        outputs=outputs,
        normalized=_normalize(raw),
    )


def _parse_mesh(mraw, errors: list) -> Mesh | None:
    if not isinstance(mraw, dict):
        errors.append("mesh: a mesh block is required")
        return build_structured_grid(1, 1, 1.0, 1.0)
    mesh = None
    if "structured" in mraw:
        s = mraw["structured"]
        try:
            mesh = build_structured_grid(
                int(s["nx"]),
                int(s["ny"]),
                parse_quantity(s["width"], "mesh.structured.width", errors),
                parse_quantity(s["height"], "mesh.structured.height", errors),
                tuple(s.get("origin", (0.0, 0.0))),
            )
        except Exception as exc:
            errors.append(f"mesh.structured: {exc}")
    elif "rectilinear" in mraw:
        s = mraw["rectilinear"]
        try:
            mesh = build_rectilinear_grid(np.asarray(s["x_lines"]), np.asarray(s["y_lines"]))
        except Exception as exc:
            errors.append(f"mesh.rectilinear: {exc}")
    elif "file" in mraw:
        try:
            mesh = read_mesh(mraw["file"])
        except Exception as exc:
            errors.append(f"mesh.file: {exc}")
    else:
        errors.append("mesh: need one of structured / rectilinear / file")
    if mesh is None:
        return build_structured_grid(1, 1, 1.0, 1.0)
    extra_sets = mraw.get("node_sets", {}) or {}
    subsets = mraw.get("edge_subsets", []) or []
    if extra_sets or subsets:
        node_sets = dict(mesh.node_sets)
        for nm, ids in extra_sets.items():
            node_sets[nm] = np.asarray(ids, dtype=np.int64)
        edge_tags = dict(mesh.edge_tags)
        for i, sub in enumerate(subsets):
            base = sub.get("base")
            if base not in edge_tags:
                errors.append(f"mesh.edge_subsets[{i}]: unknown base tag {base!r}")
                continue
            pairs = []
            for e, le in edge_tags[base]:
                a, b = mesh.edge_nodes(int(e), int(le))
                mid = 0.5 * (mesh.coords[a] + mesh.coords[b])
                xr, yr = sub.get("x_range"), sub.get("y_range")
                if xr and not (xr[0] <= mid[0] <= xr[1]):
                    continue
                if yr and not (yr[0] <= mid[1] <= yr[1]):
                    continue
                pairs.append((int(e), int(le)))
            edge_tags[str(sub.get("name", f"subset{i}"))] = np.asarray(
                pairs, dtype=np.int64
            ).reshape(-1, 2)
        mesh = Mesh(
            coords=mesh.coords,
            elements=mesh.elements,
            material_ids=mesh.material_ids,
            edge_tags=edge_tags,
            node_sets=node_sets,
            x_lines=mesh.x_lines,
            y_lines=mesh.y_lines,
        )
    return mesh


def _normalize(raw) -> dict:
    """Canonical plain-python structure for deterministic dumps."""
    if isinstance(raw, dict):
        return {str(k): _normalize(v) for k, v in sorted(raw.items(), key=lambda kv: str(kv[0]))}
    if isinstance(raw, (list, tuple)):
        return [_normalize(v) for v in raw]
    if isinstance(raw, (np.floating, np.integer)):
        return raw.item()
    return raw


def dump_config(cfg: RunConfig) -> str:
    """Canonical YAML text; parse(dump(parse(x))) == parse(x)."""
    return yaml.safe_dump(cfg.normalized, sort_keys=True)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as f:
        return parse_config(f.read())
