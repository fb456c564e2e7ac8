"""Global assembly of the coupled THM weak forms.

The residual is organised as

    R(X, Xdot, t) = K X + M Xdot + C(X, Xdot) - F(t)

where K collects all stiffness-like (state-multiplying) terms, M the
transient terms (storage, thermal capacity, solid-velocity coupling), C the
nonlinear contributions (heat convection by the Darcy velocity, penalty
contact) and F the loads (tractions, influxes, body force, gravity drive,
thermal-expansion loads).  K, M and the load vectors are assembled once per
model build; Newton iterations only reassemble C.

Enriched degrees of freedom use per-node shifted Heaviside basis functions
phi_i(x) = N_i(x) (H(phi(x)) - H(phi(x_i))), so all standard/enriched block
combinations emerge from one basis loop.  Standard elements integrate with
a 2x2 Gauss rule; elements bisected by a crack use 20x20.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from xthm.dofs import (
    BoundaryConditionSet,
    DofMap,
    ThmState,
    build_dof_map,
    collect_dirichlet,
)
from xthm.errors import ConfigError, InvalidArgumentError
from xthm.levelset import CrackGeometry, EnrichmentMap, classify_enrichment, heaviside_many, polyline_distance
from xthm.materials import MixtureProps
from xthm.mesh import EDGE_LOCAL_NODES, Mesh, gauss_rule, gauss_rule_1d, shape_eval_many

STANDARD_ORDER = 2
ENRICHED_ORDER = 20
EDGE_ORDER = 4


@dataclass
class GlobalSystem:
    """Sparse operator, right-hand side and optional transient matrix."""

    A: sp.csr_matrix
    rhs: np.ndarray
    M: sp.csr_matrix | None = None

    def __post_init__(self):
        if self.A.shape[0] != self.A.shape[1] or self.A.shape[0] != len(self.rhs):
            raise InvalidArgumentError("system dimensions are inconsistent")
        if not np.all(np.isfinite(self.rhs)):
            raise InvalidArgumentError("rhs contains non-finite entries")


def apply_dirichlet(system: GlobalSystem, constraints) -> GlobalSystem:
    """Eliminate constrained DOFs by the symmetric substitution method.

    `constraints` is a pair (dof_indices, values).  Constrained rows and
    columns are zeroed, unit diagonals inserted, and the right-hand side
    receives ``rhs -= A[:, c] * value`` before fixing ``rhs[c] = value``.
    """
    idx, vals = constraints
    idx = np.asarray(idx, dtype=np.int64)
    vals = np.asarray(vals, dtype=float)
    if idx.size == 0:
        return system
    A = system.A.tocsc(copy=True)
    rhs = system.rhs.copy()
    rhs -= A[:, idx] @ vals
    n = A.shape[0]
    keep = np.ones(n)
    keep[idx] = 0.0
    Dk = sp.diags(keep)
    A = Dk @ A @ Dk
    A = A.tolil()
    A[idx, idx] = 1.0
    rhs[idx] = vals
    return GlobalSystem(A=A.tocsr(), rhs=rhs, M=system.M)


@dataclass
class _ElementGroup:
    """Vectorized quadrature data for plain elements sharing one material."""

    element_ids: np.ndarray
    conn: np.ndarray  # (ne, 4)
    material: MixtureProps
    N: np.ndarray  # (g, 4)
    dNdx: np.ndarray  # (ne, g, 4, 2)
    detJw: np.ndarray  # (ne, g)
    xg: np.ndarray  # (ne, g, 2)


@dataclass
class _EnrichedElement:
    """Per-element quadrature data where enriched basis functions live."""

    element_id: int
    conn: np.ndarray
    material: MixtureProps
    nodes: np.ndarray  # basis owner node per entry (nb,)
    kinds: np.ndarray  # 0 std, 1 enr, per entry
    phi: np.ndarray  # (g, nb) scalar basis values (enr entries carry H)
    grad: np.ndarray  # (g, nb, 2)
    detJw: np.ndarray  # (g,)
    xg: np.ndarray  # (g, 2)
    N4: np.ndarray  # (g, 4) plain bilinear values (for H-independent uses)
    enr_entries: np.ndarray  # indices into entries with kind == 1
    H: np.ndarray  # (g, n_enr) shifted Heaviside per enriched entry


class Model:
    """Discrete THM model: mesh, cracks, materials, BCs and cached operators."""

    def __init__(
        self,
        mesh: Mesh,
        cracks=None,
        materials=None,
        fields=("u", "p", "T"),
        bcs: BoundaryConditionSet | None = None,
        contact=None,
        body_force=(0.0, 0.0),
        T0: float = 0.0,
        delta_s: float = 0.005,
        enrichment: EnrichmentMap | None = None,
        uniform_delta_T: float = 0.0,
    ):
        self.mesh = mesh
        self.cracks: list[CrackGeometry] = list(cracks or [])
        if materials is None:
            raise InvalidArgumentError("materials mapping is required")
        self.materials: dict[int, MixtureProps] = dict(materials)
        self.bcs = bcs or BoundaryConditionSet()
        self.contact = dict(contact or {})  # crack_id -> ContactParams
        self.body_force = np.asarray(body_force, dtype=float)
        self.T0 = float(T0)
        self.uniform_delta_T = float(uniform_delta_T)
        self.delta_s = float(delta_s)

        self.enrichment = (
            enrichment
            if enrichment is not None
            else classify_enrichment(mesh, self.cracks, delta_s)
            if self.cracks
            else None
        )
        self.dofmap: DofMap = build_dof_map(mesh, self.enrichment, fields)
        self.fields = self.dofmap.fields
        self.bcs.validate(mesh, self.fields)

        self.has_u = "ux" in self.fields
        self.has_p = "p" in self.fields
        self.has_T = "T" in self.fields
        if self.uniform_delta_T != 0.0 and self.has_T:
            raise InvalidArgumentError("uniform_delta_T applies only when T is not a field")
        for mid in np.unique(mesh.material_ids):
            if int(mid) not in self.materials:
                raise ConfigError(f"mesh references material id {int(mid)} with no properties")

        self._groups: list[_ElementGroup] = []
        self._enriched: list[_EnrichedElement] = []
        self._K: sp.csr_matrix | None = None
        self._M: sp.csr_matrix | None = None
        self._F_static: np.ndarray | None = None
        self._V_thermal: np.ndarray | None = None
        self._time_loads: list = []
        self._contact_points = None  # filled lazily by xthm.contact
        self._elem_lookup: dict[int, tuple[int, int]] = {}
        self._prepare_quadrature()
        self._build_linear_parts()

    # --- preparation --------------------------------------------------------

    def _prepare_quadrature(self):
        mesh = self.mesh
        enriched_set = (
            set(self.enrichment.elements_with_enrichment.tolist())
            if self.enrichment is not None
            else set()
        )
        plain = np.array(
            [e for e in range(mesh.n_elements) if e not in enriched_set], dtype=np.int64
        )
        rule = gauss_rule(STANDARD_ORDER)
        N, dN = shape_eval_many(rule.points)  # (g,4), (g,4,2)
        for mid in np.unique(mesh.material_ids[plain]) if plain.size else []:
            ids = plain[mesh.material_ids[plain] == mid]
            conn = mesh.elements[ids]
            xy = mesh.coords[conn]  # (ne,4,2)
            J = np.einsum("eni,gnj->egij", xy, dN)  # J[e,g,i,j] = sum_n x[e,n,i] dN[g,n,j]
            detJ = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
            if np.any(detJ <= 0):
                bad = ids[np.any(detJ <= 0, axis=1)][0]
                raise InvalidArgumentError(f"element {bad} has non-positive Jacobian")
            Jinv = np.empty_like(J)
            Jinv[..., 0, 0] = J[..., 1, 1]
            Jinv[..., 1, 1] = J[..., 0, 0]
            Jinv[..., 0, 1] = -J[..., 0, 1]
            Jinv[..., 1, 0] = -J[..., 1, 0]
            Jinv /= detJ[..., None, None]
            dNdx = np.einsum("gnj,egji->egni", dN, Jinv)
            xg = np.einsum("gn,eni->egi", N, xy)
            self._groups.append(
                _ElementGroup(
                    element_ids=ids,
                    conn=conn,
                    material=self.materials[int(mid)],
                    N=N,
                    dNdx=dNdx,
                    detJw=detJ * rule.weights[None, :],
                    xg=xg,
                )
            )
        for e in sorted(enriched_set):
            self._enriched.append(self._prepare_enriched_element(int(e)))
        for gi, g in enumerate(self._groups):
            for pos, e in enumerate(g.element_ids):
                self._elem_lookup[int(e)] = (gi, pos)
        for k, ee in enumerate(self._enriched):
            self._elem_lookup[ee.element_id] = (-1, k)

    def _prepare_enriched_element(self, e: int) -> _EnrichedElement:
        mesh, enr = self.mesh, self.enrichment
        conn = mesh.elements[e]
        cut = enr.cut_elements.get(e)
        order = ENRICHED_ORDER if (cut is not None and not cut.degenerate) else STANDARD_ORDER
        rule = gauss_rule(order)
        N, dN = shape_eval_many(rule.points)
        xy = mesh.coords[conn]
        J = np.einsum("ni,gnj->gij", xy, dN)
        detJ = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        Jinv = np.empty_like(J)
        Jinv[:, 0, 0] = J[:, 1, 1]
        Jinv[:, 1, 1] = J[:, 0, 0]
        Jinv[:, 0, 1] = -J[:, 0, 1]
        Jinv[:, 1, 0] = -J[:, 1, 0]
        Jinv /= detJ[:, None, None]
        dNdx = np.einsum("gnj,gji->gni", dN, Jinv)
        xg = N @ xy

        enr_local = [a for a in range(4) if enr.psi[conn[a]] == 1]
        nb = 4 + len(enr_local)
        nodes = np.concatenate([conn, conn[enr_local]]).astype(np.int64)
        kinds = np.array([0] * 4 + [1] * len(enr_local), dtype=np.int8)
        phi = np.zeros((len(xg), nb))
        grad = np.zeros((len(xg), nb, 2))
        phi[:, :4] = N
        grad[:, :4, :] = dNdx
        H = np.zeros((len(xg), len(enr_local)))
        for k, a in enumerate(enr_local):
            node = conn[a]
            cid = enr.node_crack[node]
            dist, _, _, _ = polyline_distance(xg, self.cracks[cid])
            Hk = heaviside_many(dist).astype(float) - float(enr.node_sign[node])
            H[:, k] = Hk
            phi[:, 4 + k] = N[:, a] * Hk
            grad[:, 4 + k, :] = dNdx[:, a, :] * Hk[:, None]
        return _EnrichedElement(
            element_id=e,
            conn=conn,
            material=self.materials[int(mesh.material_ids[e])],
            nodes=nodes,
            kinds=kinds,
            phi=phi,
            grad=grad,
            detJw=detJ * rule.weights,
            xg=xg,
            N4=N,
            enr_entries=np.arange(4, nb, dtype=np.int64),
            H=H,
        )

    def _entry_dofs(self, nodes: np.ndarray, kinds: np.ndarray, fld: str) -> np.ndarray:
        dm = self.dofmap
        out = np.where(kinds == 0, dm.std[fld][nodes], dm.enr[fld][nodes])
        if np.any(out < 0):
            raise InvalidArgumentError("enriched basis entry without an allocated DOF")
        return out

    # --- linear operator assembly -------------------------------------------

    def _build_linear_parts(self):
        n = self.dofmap.total_dofs
        trips_K: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        trips_M: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        F = np.zeros(n)
        V_th = np.zeros(n)

        for g in self._groups:
            self._linear_group(g, trips_K, trips_M, F, V_th)
        for ee in self._enriched:
            self._linear_enriched(ee, trips_K, trips_M, F, V_th)

        self._K = _to_csr(trips_K, n)
        self._M = _to_csr(trips_M, n)
        self._V_thermal = V_th
        self._F_static = F
        self._assemble_neumann_loads()

    def _linear_group(self, g: _ElementGroup, tK, tM, F, V_th):
        m = g.material
        dm = self.dofmap
        ne, ngp = g.detJw.shape
        w = g.detJw

        if self.has_u:
            B = np.zeros((ne, ngp, 3, 8))
            B[:, :, 0, 0::2] = g.dNdx[..., 0]
            B[:, :, 1, 1::2] = g.dNdx[..., 1]
            B[:, :, 2, 0::2] = g.dNdx[..., 1]
            B[:, :, 2, 1::2] = g.dNdx[..., 0]
            Ke = np.einsum("egia,ij,egjb,eg->eab", B, m.D, B, w, optimize=True)
            udofs = np.empty((ne, 8), dtype=np.int64)
            udofs[:, 0::2] = dm.std["ux"][g.conn]
            udofs[:, 1::2] = dm.std["uy"][g.conn]
            _scatter(tK, udofs, udofs, Ke)
            divB = np.einsum("egia,i->ega", B, np.array([1.0, 1.0, 0.0]))  # (ne,g,8)
            if np.any(self.body_force):
                load = np.einsum("ga,eg->ea", g.N, w) * m.rho  # per node
                Fu = np.zeros((ne, 8))
                Fu[:, 0::2] = load * self.body_force[0]
                Fu[:, 1::2] = load * self.body_force[1]
                np.add.at(F, udofs, Fu)
            vth = np.einsum("ega,eg->ea", divB, w) * (m.beta_s * m.Kt)
            np.add.at(V_th, udofs, vth)
            if self.has_p:
                Kup = m.alpha * np.einsum("ega,gb,eg->eab", divB, g.N, w, optimize=True)
                pdofs = dm.std["p"][g.conn]
                _scatter(tK, udofs, pdofs, Kup)
                Mpu = m.alpha * np.einsum("ga,egb,eg->eab", g.N, divB, w, optimize=True)
                _scatter(tM, pdofs, udofs, Mpu)
            if self.has_T:
                KuT = -(m.beta_s * m.Kt) * np.einsum(
                    "ega,gb,eg->eab", divB, g.N, w, optimize=True
                )
                Tdofs = dm.std["T"][g.conn]
                _scatter(tK, udofs, Tdofs, KuT)

        mass = np.einsum("ga,gb,eg->eab", g.N, g.N, w, optimize=True)
        lap = np.einsum("egad,egbd,eg->eab", g.dNdx, g.dNdx, w, optimize=True)
        if self.has_p:
            pdofs = dm.std["p"][g.conn]
            kmu = m.k_f / m.fluid.mu_f if m.fluid is not None else 0.0
            _scatter(tK, pdofs, pdofs, kmu * lap)
            if m.inv_Qt:
                _scatter(tM, pdofs, pdofs, m.inv_Qt * mass)
            if self.has_T and m.beta_t:
                Tdofs = dm.std["T"][g.conn]
                _scatter(tM, pdofs, Tdofs, -m.beta_t * mass)
            if np.any(self.body_force) and m.fluid is not None:
                drive = kmu * m.fluid.rho_f * np.einsum(
                    "egad,d,eg->ea", g.dNdx, self.body_force, w
                )
                np.add.at(F, pdofs, drive)
        if self.has_T:
            Tdofs = dm.std["T"][g.conn]
            _scatter(tK, Tdofs, Tdofs, m.lambda_eff * lap)
            _scatter(tM, Tdofs, Tdofs, m.rhoC_eff * mass)

    def _linear_enriched(self, ee: _EnrichedElement, tK, tM, F, V_th):
        m = ee.material
        dm = self.dofmap
        w = ee.detJw
        nb = len(ee.nodes)

        if self.has_u:
            B = np.zeros((len(w), 3, 2 * nb))
            B[:, 0, 0::2] = ee.grad[..., 0]
            B[:, 1, 1::2] = ee.grad[..., 1]
            B[:, 2, 0::2] = ee.grad[..., 1]
            B[:, 2, 1::2] = ee.grad[..., 0]
            Ke = np.einsum("gia,ij,gjb,g->ab", B, m.D, B, w, optimize=True)
            udofs = np.empty(2 * nb, dtype=np.int64)
            udofs[0::2] = self._entry_dofs(ee.nodes, ee.kinds, "ux")
            udofs[1::2] = self._entry_dofs(ee.nodes, ee.kinds, "uy")
            _scatter1(tK, udofs, udofs, Ke)
            divB = B[:, 0, :] + B[:, 1, :]  # (g, 2nb)
            if np.any(self.body_force):
                load = np.einsum("ga,g->a", ee.phi, w) * m.rho
                Fu = np.zeros(2 * nb)
                Fu[0::2] = load * self.body_force[0]
                Fu[1::2] = load * self.body_force[1]
                np.add.at(F, udofs, Fu)
            np.add.at(V_th, udofs, np.einsum("ga,g->a", divB, w) * (m.beta_s * m.Kt))
            if self.has_p:
                pdofs = self._entry_dofs(ee.nodes, ee.kinds, "p")
                Kup = m.alpha * np.einsum("ga,gb,g->ab", divB, ee.phi, w, optimize=True)
                _scatter1(tK, udofs, pdofs, Kup)
                Mpu = m.alpha * np.einsum("ga,gb,g->ab", ee.phi, divB, w, optimize=True)
                _scatter1(tM, pdofs, udofs, Mpu)
            if self.has_T:
                Tdofs = self._entry_dofs(ee.nodes, ee.kinds, "T")
                KuT = -(m.beta_s * m.Kt) * np.einsum(
                    "ga,gb,g->ab", divB, ee.phi, w, optimize=True
                )
                _scatter1(tK, udofs, Tdofs, KuT)

        mass = np.einsum("ga,gb,g->ab", ee.phi, ee.phi, w, optimize=True)
        lap = np.einsum("gad,gbd,g->ab", ee.grad, ee.grad, w, optimize=True)
        if self.has_p:
            pdofs = self._entry_dofs(ee.nodes, ee.kinds, "p")
            kmu = m.k_f / m.fluid.mu_f if m.fluid is not None else 0.0
            _scatter1(tK, pdofs, pdofs, kmu * lap)
            if m.inv_Qt:
                _scatter1(tM, pdofs, pdofs, m.inv_Qt * mass)
            if self.has_T and m.beta_t:
                Tdofs = self._entry_dofs(ee.nodes, ee.kinds, "T")
                _scatter1(tM, pdofs, Tdofs, -m.beta_t * mass)
            if np.any(self.body_force) and m.fluid is not None:
                drive = kmu * m.fluid.rho_f * np.einsum("gad,d,g->a", ee.grad, self.body_force, w)
                np.add.at(F, pdofs, drive)
        if self.has_T:
            Tdofs = self._entry_dofs(ee.nodes, ee.kinds, "T")
            _scatter1(tK, Tdofs, Tdofs, m.lambda_eff * lap)
            _scatter1(tM, Tdofs, Tdofs, m.rhoC_eff * mass)

    def _assemble_neumann_loads(self):
        """Edge loads: traction components for u, inflow fluxes for p and T."""
        mesh = self.mesh
        s1d, w1d = gauss_rule_1d(EDGE_ORDER)
        for bc in self.bcs.neumann:
            if bc.tag not in mesh.edge_tags:
                raise ConfigError(f"Neumann condition needs an edge tag, got {bc.tag!r}")
            vec = np.zeros(self.dofmap.total_dofs)
            for e, le in mesh.edge_tags[bc.tag]:
                e, le = int(e), int(le)
                xi = _edge_reference_points(le, s1d)
                N, _ = shape_eval_many(xi)
                a, b = mesh.edge_nodes(e, le)
                L = float(np.hypot(*(mesh.coords[b] - mesh.coords[a])))
                xg = N @ mesh.coords[mesh.elements[e]]
                phi, dofs = self._edge_basis(e, xg, N, bc.fld)
                vec_local = np.einsum("ga,g->a", phi, w1d) * (L / 2.0)
                np.add.at(vec, dofs, vec_local)
            self._time_loads.append((bc.value, vec))

    def _edge_basis(self, e: int, xg: np.ndarray, N: np.ndarray, fld: str):
        """Basis values/dofs along a boundary edge, with H-weighted enriched rows."""
        conn = self.mesh.elements[e]
        enr = self.enrichment
        entries_nodes = list(conn)
        entries_kinds = [0] * 4
        cols = [N[:, a] for a in range(4)]
        if enr is not None:
            for a in range(4):
                node = conn[a]
                if enr.psi[node] == 1:
                    cid = enr.node_crack[node]
                    dist, _, _, _ = polyline_distance(xg, self.cracks[cid])
                    Hk = heaviside_many(dist).astype(float) - float(enr.node_sign[node])
                    entries_nodes.append(node)
                    entries_kinds.append(1)
                    cols.append(N[:, a] * Hk)
        nodes = np.asarray(entries_nodes, dtype=np.int64)
        kinds = np.asarray(entries_kinds, dtype=np.int8)
        dofs = self._entry_dofs(nodes, kinds, fld if fld in ("p", "T") else fld)
        return np.column_stack(cols), dofs

    # --- evaluation ----------------------------------------------------------

    @property
    def K(self) -> sp.csr_matrix:
        return self._K

    @property
    def M(self) -> sp.csr_matrix:
        return self._M

    def load_vector(self, t: float, uniform_delta_T: float | None = None) -> np.ndarray:
        dTu = self.uniform_delta_T if uniform_delta_T is None else uniform_delta_T
        F = self._F_static.copy()
        for fn, vec in self._time_loads:
            F += fn(t) * vec
        scale = dTu - self.T0
        if scale:
            F += scale * self._V_thermal
        return F

    def dirichlet_constraints(self, t: float):
        return collect_dirichlet(self.mesh, self.dofmap, self.enrichment, self.bcs, t)

    @property
    def is_nonlinear(self) -> bool:
        return bool(self.contact) or (self.has_T and self.has_p)

    def residual_and_jacobian(self, X, Xdot, t, c0, need_jacobian=True):
        """R and (optionally) J = dR/dX given the stage rate Xdot and c0 = dXdot/dX."""
        R = self._K @ X + self._M @ Xdot - self.load_vector(t)
        J = None
        trips: list = []
        n = self.dofmap.total_dofs
        if self.has_T and self.has_p:
            self._convection(X, Xdot, R, trips if need_jacobian else None)
        if self.contact:
            from xthm.contact import contact_contribution

            contact_contribution(self, X, R, trips if need_jacobian else None)
        if need_jacobian:
            J = self._K + c0 * self._M
            if trips:
                J = J + _to_csr(trips, n)
        return R, J

    def _convection(self, X, Xdot, R, trips):
        """Heat advection rho_f C_f w_dot . grad T with w_dot from the total grad p."""
        dm = self.dofmap
        b = self.body_force
        for g in self._groups:
            m = g.material
            if m.fluid is None:
                continue
            kmu = m.k_f / m.fluid.mu_f
            rfCf = m.fluid.rho_f * m.fluid.C_f
            pdofs = dm.std["p"][g.conn]  # (ne, 4)
            Tdofs = dm.std["T"][g.conn]
            gradp = np.einsum("egad,ea->egd", g.dNdx, X[pdofs])
            gradT = np.einsum("egad,ea->egd", g.dNdx, X[Tdofs])
            wdot = kmu * (-gradp + m.fluid.rho_f * b)  # (ne, g, 2)
            conv = np.einsum("egd,egd->eg", wdot, gradT)  # (ne, g)
            Rt = rfCf * np.einsum("ga,eg,eg->ea", g.N, conv, g.detJw)
            np.add.at(R, Tdofs, Rt)
            if trips is not None:
                Jtt = rfCf * np.einsum(
                    "ga,egd,egbd,eg->eab", g.N, wdot, g.dNdx, g.detJw, optimize=True
                )
                _scatter(trips, Tdofs, Tdofs, Jtt)
                Jtp = -rfCf * kmu * np.einsum(
                    "ga,egbd,egd,eg->eab", g.N, g.dNdx, gradT, g.detJw, optimize=True
                )
                _scatter(trips, Tdofs, pdofs, Jtp)
        for ee in self._enriched:
            m = ee.material
            if m.fluid is None:
                continue
            kmu = m.k_f / m.fluid.mu_f
            rfCf = m.fluid.rho_f * m.fluid.C_f
            pdofs = self._entry_dofs(ee.nodes, ee.kinds, "p")
            Tdofs = self._entry_dofs(ee.nodes, ee.kinds, "T")
            gradp = np.einsum("gad,a->gd", ee.grad, X[pdofs])
            gradT = np.einsum("gad,a->gd", ee.grad, X[Tdofs])
            wdot = kmu * (-gradp + m.fluid.rho_f * b)
            conv = np.einsum("gd,gd->g", wdot, gradT)
            np.add.at(R, Tdofs, rfCf * np.einsum("ga,g,g->a", ee.phi, conv, ee.detJw))
            if trips is not None:
                Jtt = rfCf * np.einsum(
                    "ga,gd,gbd,g->ab", ee.phi, wdot, ee.grad, ee.detJw, optimize=True
                )
                _scatter1(trips, Tdofs, Tdofs, Jtt)
                Jtp = -rfCf * kmu * np.einsum(
                    "ga,gbd,gd,g->ab", ee.phi, ee.grad, gradT, ee.detJw, optimize=True
                )
                _scatter1(trips, Tdofs, pdofs, Jtp)

    # --- field-wise views used by tests and diagnostics ----------------------

    def field_rows(self, names) -> np.ndarray:
        dm = self.dofmap
        rows = []
        for f in names:
            rows.append(dm.std[f])
            rows.append(dm.enr[f][dm.enr[f] >= 0])
        return np.concatenate(rows)

    def gauss_strain_stress(self, X: np.ndarray):
        """Per-Gauss-point strain/stress over all elements (postprocessing).

        Returns a list of (element_id, xg, strain, stress) arrays.
        """
        out = []
        dm = self.dofmap
        for g in self._groups:
            ux = X[dm.std["ux"][g.conn]]
            uy = X[dm.std["uy"][g.conn]]
            exx = np.einsum("ega,ea->eg", g.dNdx[..., 0], ux)
            eyy = np.einsum("ega,ea->eg", g.dNdx[..., 1], uy)
            gxy = np.einsum("ega,ea->eg", g.dNdx[..., 1], ux) + np.einsum(
                "ega,ea->eg", g.dNdx[..., 0], uy
            )
            eps = np.stack([exx, eyy, gxy], axis=-1)
            sig = np.einsum("ij,egj->egi", g.material.D, eps)
            sig += self._stress_offsets(g.material, g.conn, g.N, X)
            for k, e in enumerate(g.element_ids):
                out.append((int(e), g.xg[k], eps[k], sig[k]))
        for ee in self._enriched:
            ux = X[self._entry_dofs(ee.nodes, ee.kinds, "ux")]
            uy = X[self._entry_dofs(ee.nodes, ee.kinds, "uy")]
            exx = np.einsum("ga,a->g", ee.grad[..., 0], ux)
            eyy = np.einsum("ga,a->g", ee.grad[..., 1], uy)
            gxy = np.einsum("ga,a->g", ee.grad[..., 1], ux) + np.einsum(
                "ga,a->g", ee.grad[..., 0], uy
            )
            eps = np.stack([exx, eyy, gxy], axis=-1)
            sig = np.einsum("ij,gj->gi", ee.material.D, eps)
            m = ee.material
            if self.has_T:
                Tg = ee.phi @ X[self._entry_dofs(ee.nodes, ee.kinds, "T")] - self.T0
                sig += -(m.beta_s * m.Kt) * Tg[:, None] * np.array([1.0, 1.0, 0.0])
            elif self.uniform_delta_T:
                sig += -(m.beta_s * m.Kt) * self.uniform_delta_T * np.array([1.0, 1.0, 0.0])
            if self.has_p:
                pg = ee.phi @ X[self._entry_dofs(ee.nodes, ee.kinds, "p")]
                sig += m.alpha * pg[:, None] * np.array([1.0, 1.0, 0.0])
            out.append((ee.element_id, ee.xg, eps, sig))
        out.sort(key=lambda rec: rec[0])
        return out

    def _stress_offsets(self, m, conn, N, X):
        dm = self.dofmap
        off = 0.0
        mvec = np.array([1.0, 1.0, 0.0])
        if self.has_T:
            Tg = np.einsum("ga,ea->eg", N, X[dm.std["T"][conn]]) - self.T0
            off = off - (m.beta_s * m.Kt) * Tg[..., None] * mvec
        elif self.uniform_delta_T:
            off = off - (m.beta_s * m.Kt) * self.uniform_delta_T * mvec
        if self.has_p:
            pg = np.einsum("ga,ea->eg", N, X[dm.std["p"][conn]])
            off = off + m.alpha * pg[..., None] * mvec
        return off

    def element_data(self, e: int):
        """Quadrature bundle (xg, detJw, phi, grad, nodes, kinds, material) for one element."""
        gi, pos = self._elem_lookup[int(e)]
        if gi < 0:
            ee = self._enriched[pos]
            return ee.xg, ee.detJw, ee.phi, ee.grad, ee.nodes, ee.kinds, ee.material
        g = self._groups[gi]
        nodes = g.conn[pos]
        kinds = np.zeros(4, dtype=np.int8)
        return (
            g.xg[pos],
            g.detJw[pos],
            g.N,
            g.dNdx[pos],
            nodes,
            kinds,
            g.material,
        )

    def sample_fields(self, X: np.ndarray, points) -> dict:
        """Fields and gradients at physical points (basis interpolation).

        Returns arrays: u (n,2), grad_u (n,2,2), strain (n,3 Voigt), T, grad_T,
        p, grad_p, sigma (n,3; effective stress incl. thermal term).
        """
        from xthm.levelset import heaviside_many, polyline_distance
        from xthm.mesh import shape_eval_many

        pts = np.atleast_2d(np.asarray(points, dtype=float))
        n = len(pts)
        out = {
            "u": np.zeros((n, 2)),
            "grad_u": np.zeros((n, 2, 2)),
            "strain": np.zeros((n, 3)),
            "T": np.zeros(n),
            "grad_T": np.zeros((n, 2)),
            "p": np.zeros(n),
            "grad_p": np.zeros((n, 2)),
            "sigma": np.zeros((n, 3)),
        }
        dm = self.dofmap
        enr = self.enrichment
        for i, x in enumerate(pts):
            e, xi = self.mesh.locate(x)
            conn = self.mesh.elements[e]
            N, dN = shape_eval_many(xi[None, :])
            xy = self.mesh.coords[conn]
            J = xy.T @ dN[0]
            dNdx = dN[0] @ np.linalg.inv(J)
            nodes = list(conn)
            kinds = [0] * 4
            vals = [N[0, a] for a in range(4)]
            grads = [dNdx[a] for a in range(4)]
            if enr is not None:
                for a in range(4):
                    node = conn[a]
                    if enr.psi[node] == 1:
                        cid = enr.node_crack[node]
                        dist, _, _, _ = polyline_distance(x[None, :], self.cracks[cid])
                        H = float(heaviside_many(dist)[0]) - float(enr.node_sign[node])
                        nodes.append(node)
                        kinds.append(1)
                        vals.append(N[0, a] * H)
                        grads.append(dNdx[a] * H)
            nodes = np.asarray(nodes, dtype=np.int64)
            kinds = np.asarray(kinds, dtype=np.int8)
            vals = np.asarray(vals)
            grads = np.asarray(grads)
            m = self.materials[int(self.mesh.material_ids[e])]
            if self.has_u:
                ux = X[self._entry_dofs(nodes, kinds, "ux")]
                uy = X[self._entry_dofs(nodes, kinds, "uy")]
                out["u"][i] = (vals @ ux, vals @ uy)
                gu = np.array([grads.T @ ux, grads.T @ uy])  # (2,2): du_i/dx_j
                out["grad_u"][i] = gu
                eps = np.array([gu[0, 0], gu[1, 1], gu[0, 1] + gu[1, 0]])
                out["strain"][i] = eps
                theta = 0.0
                if self.has_T:
                    theta = float(vals @ X[self._entry_dofs(nodes, kinds, "T")]) - self.T0
                elif self.uniform_delta_T:
                    theta = self.uniform_delta_T
                out["sigma"][i] = m.D @ eps - m.beta_s * m.Kt * theta * np.array([1.0, 1.0, 0.0])
            if self.has_T:
                Td = X[self._entry_dofs(nodes, kinds, "T")]
                out["T"][i] = vals @ Td
                out["grad_T"][i] = grads.T @ Td
            if self.has_p:
                pd = X[self._entry_dofs(nodes, kinds, "p")]
                out["p"][i] = vals @ pd
                out["grad_p"][i] = grads.T @ pd
        return out

    def initial_state(self, values=None) -> ThmState:
        """Zero state with optional constant per-field initial values."""
        X = np.zeros(self.dofmap.total_dofs)
        for fld, val in (values or {}).items():
            for comp in ("ux", "uy") if fld == "u" else (fld,):
                if comp in self.dofmap.std:
                    X[self.dofmap.std[comp]] = val
        return ThmState(X=X, time=0.0)


# --- spec-level physics views -------------------------------------------------


def assemble_physics(model: Model, row_fields, dt: float = 1.0) -> GlobalSystem:
    """System restricted to the weak-form rows of the given scalar fields.

    A = K + M/dt on those rows (zero elsewhere), rhs = load vector rows.
    """
    rows = model.field_rows(row_fields)
    n = model.dofmap.total_dofs
    mask = np.zeros(n)
    mask[rows] = 1.0
    P = sp.diags(mask)
    A = P @ (model.K + model.M / dt)
    rhs = np.zeros(n)
    rhs[rows] = model.load_vector(0.0)[rows]
    return GlobalSystem(A=A.tocsr(), rhs=rhs, M=(P @ model.M).tocsr())


def assemble_momentum(model: Model, dt: float = 1.0) -> GlobalSystem:
    return assemble_physics(model, ("ux", "uy"), dt)


def assemble_flow(model: Model, dt: float = 1.0) -> GlobalSystem:
    return assemble_physics(model, ("p",), dt)


def assemble_heat(model: Model, dt: float = 1.0) -> GlobalSystem:
    return assemble_physics(model, ("T",), dt)


def assemble_neumann(model: Model, t: float) -> np.ndarray:
    """Edge-load contributions at time t (without body/thermal terms)."""
    F = np.zeros(model.dofmap.total_dofs)
    for fn, vec in model._time_loads:
        F += fn(t) * vec
    return F


# --- helpers ------------------------------------------------------------------


def _edge_reference_points(local_edge: int, s: np.ndarray) -> np.ndarray:
    if local_edge == 0:
        return np.column_stack([s, -np.ones_like(s)])
    if local_edge == 1:
        return np.column_stack([np.ones_like(s), s])
    if local_edge == 2:
        return np.column_stack([s, np.ones_like(s)])
    return np.column_stack([-np.ones_like(s), s])


def _scatter(trips, rows, cols, vals):
    """Append (ne, a, b) element blocks to the triplet list."""
    ne, na = rows.shape
    nb = cols.shape[1]
    r = np.repeat(rows[:, :, None], nb, axis=2).ravel()
    c = np.repeat(cols[:, None, :], na, axis=1).ravel()
    trips.append((r, c, vals.ravel()))


def _scatter1(trips, rows, cols, vals):
    r = np.repeat(rows[:, None], len(cols), axis=1).ravel()
    c = np.repeat(cols[None, :], len(rows), axis=0).ravel()
    trips.append((r, c, vals.ravel()))


def _to_csr(trips, n) -> sp.csr_matrix:
    if not trips:
        return sp.csr_matrix((n, n))
    rows = np.concatenate([t[0] for t in trips])
    cols = np.concatenate([t[1] for t in trips])
    vals = np.concatenate([t[2] for t in trips])
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
