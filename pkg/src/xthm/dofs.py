"""Global DOF numbering, boundary conditions and field reconstruction.

DOF layout is field-blocked then node-ordered: one block per active scalar
field ("ux", "uy", "p", "T") holding the standard DOFs of every node, then
one block per field holding the enriched DOFs of enriched nodes in
ascending node order.  Enriched DOFs outside the enriched zone are never
allocated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from xthm.errors import ConfigError, InvalidArgumentError, OutOfDomainError
from xthm.levelset import EnrichmentMap, heaviside, polyline_distance
from xthm.mesh import Mesh, shape_eval

SCALAR_FIELDS = ("ux", "uy", "p", "T")
FIELD_COMPONENTS = {"u": ("ux", "uy"), "p": ("p",), "T": ("T",)}


def scalar_fields(active) -> tuple[str, ...]:
    """Expand {"u","p","T"} selections into scalar components, canonical order."""
    chosen = []
    for f in active:
        if f in FIELD_COMPONENTS:
            chosen.extend(FIELD_COMPONENTS[f])
        elif f in SCALAR_FIELDS:
            chosen.append(f)
        else:
            raise InvalidArgumentError(f"unknown field {f!r}")
    return tuple(f for f in SCALAR_FIELDS if f in chosen)


@dataclass(frozen=True)
class DofMap:
    fields: tuple[str, ...]
    std: dict  # field -> (n_nodes,) int array
    enr: dict  # field -> (n_nodes,) int array, -1 where absent
    total_dofs: int
    n_nodes: int

    def field_slice(self, fld: str) -> np.ndarray:
        return self.std[fld]

    def state_of(self, X: np.ndarray, fld: str) -> np.ndarray:
        """Standard nodal values of one scalar field."""
        return X[self.std[fld]]


def build_dof_map(mesh: Mesh, enrichment: EnrichmentMap | None, active_fields) -> DofMap:
    """Allocate standard DOFs for every node and enriched DOFs where psi = 1."""
    if mesh.n_nodes == 0:
        raise InvalidArgumentError("mesh has no nodes")
    flds = scalar_fields(active_fields)
    if not flds:
        raise InvalidArgumentError("no active fields")
    n = mesh.n_nodes
    std: dict[str, np.ndarray] = {}
    enr: dict[str, np.ndarray] = {}
    counter = 0
    for f in flds:
        std[f] = np.arange(counter, counter + n, dtype=np.int64)
        counter += n
    enriched = enrichment.enriched_nodes if enrichment is not None else np.zeros(0, np.int64)
    for f in flds:
        idx = np.full(n, -1, dtype=np.int64)
        if len(enriched):
            idx[enriched] = np.arange(counter, counter + len(enriched), dtype=np.int64)
            counter += len(enriched)
        enr[f] = idx
    return DofMap(fields=flds, std=std, enr=enr, total_dofs=counter, n_nodes=n)


@dataclass(frozen=True)
class ThmState:
    """Full solution vector at one time instant (SI units)."""

    X: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if not np.all(np.isfinite(X)):
            raise InvalidArgumentError("state vector contains non-finite entries")
        object.__setattr__(self, "X", X)


# --- boundary conditions ----------------------------------------------------


@dataclass(frozen=True)
class TimeFunction:
    """Whitelisted time dependence: constant, linear ramp or step."""

    kind: str = "constant"  # constant | ramp | step
    value: float = 0.0
    t0: float = 0.0
    t1: float = 1.0
    v0: float = 0.0
    v1: float = 0.0

    def __call__(self, t: float) -> float:
        if self.kind == "constant":
            return self.value
        if self.kind == "ramp":
            if t <= self.t0:
                return self.v0
            if t >= self.t1:
                return self.v1
            return self.v0 + (self.v1 - self.v0) * (t - self.t0) / (self.t1 - self.t0)
        if self.kind == "step":
            return self.v0 if t < self.t0 else self.v1
        raise InvalidArgumentError(f"unknown time function kind {self.kind!r}")


def as_time_function(value) -> TimeFunction:
    if isinstance(value, TimeFunction):
        return value
    return TimeFunction(kind="constant", value=float(value))


@dataclass(frozen=True)
class DirichletBC:
    tag: str  # edge tag or node set name
    fld: str  # scalar field
    value: TimeFunction


@dataclass(frozen=True)
class NeumannBC:
    """Edge load: traction component for u, inflow flux for p and T.

    Fluxes are declared inflow-positive (an injected fluid/heat flux adds a
    positive right-hand side); tractions follow the outward stress vector.
    """

    tag: str
    fld: str  # "ux"/"uy" traction components, or "p"/"T" normal influx
    value: TimeFunction


@dataclass
class BoundaryConditionSet:
    dirichlet: list = field(default_factory=list)
    neumann: list = field(default_factory=list)

    def add_dirichlet(self, tag: str, fld: str, value) -> None:
        for comp in FIELD_COMPONENTS.get(fld, (fld,)):
            self.dirichlet.append(DirichletBC(tag, comp, as_time_function(value)))

    def add_neumann(self, tag: str, fld: str, value) -> None:
        self.neumann.append(NeumannBC(tag, fld, as_time_function(value)))

    def validate(self, mesh: Mesh, flds) -> None:
        errors = []
        seen = {}
        for bc in self.dirichlet + self.neumann:
            if bc.tag not in mesh.edge_tags and bc.tag not in mesh.node_sets:
                errors.append(f"boundary condition references unknown tag {bc.tag!r}")
            if bc.fld not in flds:
                errors.append(f"boundary condition on inactive field {bc.fld!r}")
            kind = "dirichlet" if isinstance(bc, DirichletBC) else "neumann"
            prev = seen.setdefault((bc.tag, bc.fld), kind)
            if prev != kind:
                errors.append(
                    f"tag {bc.tag!r} field {bc.fld!r} appears in both Dirichlet and Neumann sets"
                )
        if errors:
            raise ConfigError(errors)


def collect_dirichlet(
    mesh: Mesh, dofmap: DofMap, enrichment: EnrichmentMap | None, bcs: BoundaryConditionSet, t: float
) -> tuple[np.ndarray, np.ndarray]:
    """Resolve Dirichlet data to (dof indices, prescribed values) at time t.

    Enriched DOFs of constrained nodes are pinned to zero so the continuous
    field carries the boundary value exactly.  Conflicting prescriptions on
    one DOF raise ConfigError.
    """
    idx: list[int] = []
    vals: list[float] = []
    assigned: dict[int, float] = {}
    for bc in bcs.dirichlet:
        try:
            nodes = mesh.tag_node_ids(bc.tag)
        except InvalidArgumentError as exc:
            raise ConfigError(str(exc)) from exc
        if bc.fld not in dofmap.std:
            raise ConfigError(f"Dirichlet on inactive field {bc.fld!r}")
        value = bc.value(t)
        for n in nodes:
            dof = int(dofmap.std[bc.fld][n])
            if dof in assigned and assigned[dof] != value:
                raise ConfigError(
                    f"node {n} field {bc.fld!r} receives two Dirichlet values "
                    f"({assigned[dof]} and {value})"
                )
            if dof not in assigned:
                idx.append(dof)
                vals.append(value)
                assigned[dof] = value
            edof = int(dofmap.enr[bc.fld][n])
            if edof >= 0 and edof not in assigned:
                idx.append(edof)
                vals.append(0.0)
                assigned[edof] = 0.0
    return np.asarray(idx, dtype=np.int64), np.asarray(vals, dtype=float)


# --- field reconstruction ---------------------------------------------------


@dataclass(frozen=True)
class FieldValues:
    u: np.ndarray
    p: float | None
    T: float | None


def evaluate_field(
    x,
    state: ThmState,
    mesh: Mesh,
    cracks,
    enrichment: EnrichmentMap | None,
    dofmap: DofMap,
) -> FieldValues:
    """Reconstruct (u, p, T) at a physical point, including enrichment.

    On the crack itself the positive side is reported (H(0) = +1).  Points
    outside the mesh raise OutOfDomainError.
    """
    x = np.asarray(x, dtype=float)
    e, xi = mesh.locate(x)
    vals, _ = shape_eval(xi)
    conn = mesh.elements[e]
    H = _shifted_values(x, conn, cracks, enrichment)

    def combine(fld):
        if fld not in dofmap.std:
            return None
        out = float(vals @ state.X[dofmap.std[fld][conn]])
        if enrichment is not None:
            for a, n in enumerate(conn):
                edof = dofmap.enr[fld][n]
                if edof >= 0 and H[a] != 0:
                    out += vals[a] * H[a] * state.X[edof]
        return out

    ux, uy = combine("ux"), combine("uy")
    u = np.array([ux if ux is not None else np.nan, uy if uy is not None else np.nan])
    return FieldValues(u=u, p=combine("p"), T=combine("T"))


def _shifted_values(x, conn, cracks, enrichment) -> np.ndarray:
    """Per-local-node shifted Heaviside H_i(x) in {-2, 0, +2}."""
    H = np.zeros(len(conn))
    if enrichment is None:
        return H
    for a, n in enumerate(conn):
        cid = enrichment.node_crack[n]
        if enrichment.psi[n] != 1 or cid < 0:
            continue
        phi, _, _, _ = polyline_distance(x[None, :], cracks[cid])
        H[a] = heaviside(float(phi[0])) - int(enrichment.node_sign[n])
    return H
