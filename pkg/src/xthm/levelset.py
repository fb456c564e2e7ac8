"""Crack geometry, signed distances, Heaviside enrichment and classification.

Cracks are open polylines.  The signed distance uses the nearest-segment
normal (counter-clockwise rotation of the segment direction); ties at
segment joints are broken by the pseudo-normal (angle bisector) rule.

Nodes lying on a crack are handled by perturbing their nodal level set to
+1e-9 * h_e, which is equivalent to displacing the crack infinitesimally
to its negative side.  This makes cracks aligned with mesh edges behave
exactly like a duplicated-node conforming discretization: the elements on
the negative side are degenerately cut, the on-line nodes carry the jump,
and Remark-2 support ratios come out as 0.5.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from xthm.errors import GeometryConflictError, InvalidArgumentError
from xthm.mesh import Mesh, element_area

PHI_PERTURBATION = 1e-9


@dataclass(frozen=True)
class CrackGeometry:
    """An open, non-self-intersecting polyline discontinuity.

    Attributes:
        vertices: Ordered polyline vertices, shape (k, 2), k >= 2.
        tips: (start_active, end_active); an endpoint is "active" when it is
            a physical crack tip interior to the domain (an endpoint resting
            on the domain boundary is inactive).
    """

    vertices: np.ndarray
    tips: tuple[bool, bool] = (False, False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 2:
            raise InvalidArgumentError("crack needs at least two 2D vertices")
        seg = np.diff(v, axis=0)
        lengths = np.hypot(seg[:, 0], seg[:, 1])
        if np.any(lengths <= 0.0):
            raise InvalidArgumentError("consecutive crack vertices must be distinct")
        if _polyline_self_intersects(v):
            raise GeometryConflictError("crack polyline is self-intersecting")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "tips", (bool(self.tips[0]), bool(self.tips[1])))
        v.setflags(write=False)

    @property
    def segments(self) -> np.ndarray:
        """(k-1, 2, 2) array of segment endpoints."""
        return np.stack([self.vertices[:-1], self.vertices[1:]], axis=1)

    @property
    def length(self) -> float:
        seg = np.diff(self.vertices, axis=0)
        return float(np.hypot(seg[:, 0], seg[:, 1]).sum())

    def tip_coords(self, tip_index: int) -> np.ndarray:
        return self.vertices[0 if tip_index == 0 else -1]

    def segment_normals(self) -> np.ndarray:
        """Unit normals per segment (CCW rotation of the segment direction)."""
        seg = np.diff(self.vertices, axis=0)
        length = np.hypot(seg[:, 0], seg[:, 1])
        return np.column_stack([-seg[:, 1] / length, seg[:, 0] / length])


CrackSet = list  # list[CrackGeometry]; nodes may be enriched by at most one crack


@dataclass(frozen=True)
class LevelSetSample:
    """Signed distance evaluation at one point."""

    phi: float
    closest_segment: int
    normal: np.ndarray  # unit normal of the closest segment


def _polyline_self_intersects(v: np.ndarray) -> bool:
    n = len(v) - 1
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1 and len(v) > 3 and np.allclose(v[0], v[-1]):
                continue
            if _segments_cross(v[i], v[i + 1], v[j], v[j + 1]):
                return True
    return False


def _segments_cross(a, b, c, d) -> bool:
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    d1, d2 = orient(c, d, a), orient(c, d, b)
    d3, d4 = orient(a, b, c), orient(a, b, d)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True
    return False


def polyline_distance(points: np.ndarray, crack: CrackGeometry):
    """Vectorized distance data from points to the crack polyline.

    Returns (phi, seg_idx, normals, t_clamped) where phi is the signed
    distance, seg_idx the nearest segment, normals the nearest-segment unit
    normal and t_clamped the clamped projection parameter on that segment.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a = crack.vertices[:-1]  # (s, 2)
    d = crack.vertices[1:] - a
    len2 = np.einsum("ij,ij->i", d, d)
    # (n, s) projection parameters
    t = np.einsum("nij,ij->ni", pts[:, None, :] - a[None, :, :], d) / len2
    tc = np.clip(t, 0.0, 1.0)
    proj = a[None, :, :] + tc[:, :, None] * d[None, :, :]
    diff = pts[:, None, :] - proj
    dist2 = np.einsum("nij,nij->ni", diff, diff)
    seg = np.argmin(dist2, axis=1)
    rows = np.arange(len(pts))
    tbest = tc[rows, seg]
    vec = diff[rows, seg]
    dist = np.sqrt(dist2[rows, seg])

    normals = crack.segment_normals()
    nseg = normals[seg]
    sign_ref = np.einsum("ij,ij->i", vec, nseg)

    # joint tie-break: projection pinned to a shared vertex uses the bisector
    interior = (tbest > 1e-12) & (tbest < 1.0 - 1e-12)
    if not np.all(interior):
        pseudo = _vertex_pseudo_normals(crack)
        at_start = tbest <= 1e-12
        vid = np.where(at_start, seg, seg + 1)
        pick = ~interior
        vvec = pts[pick] - crack.vertices[vid[pick]]
        sign_ref[pick] = np.einsum("ij,ij->i", vvec, pseudo[vid[pick]])

    sign = np.where(sign_ref >= 0.0, 1.0, -1.0)
    return sign * dist, seg, nseg, tbest


def _vertex_pseudo_normals(crack: CrackGeometry) -> np.ndarray:
    n = crack.segment_normals()
    pseudo = np.zeros((len(crack.vertices), 2))
    pseudo[0] = n[0]
    pseudo[-1] = n[-1]
    for j in range(1, len(crack.vertices) - 1):
        v = n[j - 1] + n[j]
        norm = np.hypot(v[0], v[1])
        pseudo[j] = v / norm if norm > 1e-14 else n[j]
    return pseudo


def signed_distance(x, crack: CrackGeometry) -> LevelSetSample:
    """Signed distance from one point to the crack (total function)."""
    phi, seg, normal, _ = polyline_distance(np.asarray(x, dtype=float)[None, :], crack)
    return LevelSetSample(phi=float(phi[0]), closest_segment=int(seg[0]), normal=normal[0])


def heaviside(phi: float) -> int:
    """Sign-valued Heaviside: +1 for phi >= 0 (including 0), else -1."""
    return 1 if phi >= 0.0 else -1


def heaviside_many(phi: np.ndarray) -> np.ndarray:
    return np.where(np.asarray(phi) >= 0.0, 1, -1).astype(np.int8)


def shifted_heaviside(x, node_phi: float, crack: CrackGeometry) -> int:
    """H(phi(x)) - H(phi(x_I)): 0 on the node's own side, +/-2 across."""
    return heaviside(signed_distance(x, crack).phi) - heaviside(node_phi)


@dataclass
class CutElement:
    """Geometry of one element crossed by a crack."""

    element_id: int
    crack_id: int
    chain: np.ndarray  # (k, 2) polyline of the crack inside the element
    degenerate: bool  # chain lies on the element boundary (edge-aligned crack)
    area_plus: float
    area_minus: float

    @property
    def chord_length(self) -> float:
        seg = np.diff(self.chain, axis=0)
        return float(np.hypot(seg[:, 0], seg[:, 1]).sum())


@dataclass
class EnrichmentMap:
    """Enriched nodes/elements and their geometric bookkeeping.

    psi is the 0/1 nodal indicator of the enriched zone; node_crack,
    node_phi and node_sign are only meaningful where psi == 1.
    """

    n_nodes: int
    psi: np.ndarray  # (n_nodes,) int8
    node_crack: np.ndarray  # (n_nodes,) int, -1 outside the enriched zone
    node_phi: np.ndarray  # perturbed signed distance to the node's crack
    node_sign: np.ndarray  # (n_nodes,) int8, H(node_phi)
    support_ratio: dict = field(default_factory=dict)  # node -> min-area ratio
    cut_elements: dict = field(default_factory=dict)  # element -> CutElement
    elements_with_enrichment: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))

    @property
    def enriched_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.psi == 1)

    @property
    def enriched_elements(self) -> np.ndarray:
        """Elements bisected by a crack (carriers of the discontinuity)."""
        return np.array(sorted(self.cut_elements), dtype=np.int64)

    def is_empty(self) -> bool:
        return not np.any(self.psi == 1)


def classify_enrichment(mesh: Mesh, cracks, delta_s: float) -> EnrichmentMap:
    """Identify crossed elements and Heaviside-enriched nodes.

    A node is enriched when its whole support is crossed by one crack (no
    polyline endpoint strictly inside the support) and the smaller of the
    two support sub-areas exceeds ``delta_s`` of the support area.
    Supports cut by two different cracks are rejected.
    """
    if not 0.0 < delta_s < 0.5:
        raise InvalidArgumentError("delta_s must lie in (0, 0.5)")
    if isinstance(cracks, CrackGeometry):
        cracks = [cracks]

    n_nodes = mesh.n_nodes
    psi = np.zeros(n_nodes, dtype=np.int8)
    node_crack = np.full(n_nodes, -1, dtype=np.int64)
    node_phi = np.zeros(n_nodes)
    node_sign = np.zeros(n_nodes, dtype=np.int8)
    support_ratio: dict[int, float] = {}
    cut_elements: dict[int, CutElement] = {}

    supports = mesh.node_supports()
    areas = mesh.element_areas()
    elem_xy = mesh.coords[mesh.elements]
    diam = np.sqrt(areas.max()) * 2.0 if len(areas) else 0.0

    for cid, crack in enumerate(cracks):
        # candidate elements from the padded crack bounding box
        lo = crack.vertices.min(axis=0) - diam
        hi = crack.vertices.max(axis=0) + diam
        emin = elem_xy.min(axis=1)
        emax = elem_xy.max(axis=1)
        cand = np.flatnonzero(np.all(emax >= lo, axis=1) & np.all(emin <= hi, axis=1))
        if cand.size == 0:
            continue

        cand_nodes = np.unique(mesh.elements[cand])
        h_node = np.sqrt(
            np.array([areas[supports[n]].mean() if supports[n] else 1.0 for n in cand_nodes])
        )
        phi_c = np.full(n_nodes, np.nan)
        raw, _, _, _ = polyline_distance(mesh.coords[cand_nodes], crack)
        eps = PHI_PERTURBATION * h_node
        raw = np.where(np.abs(raw) < eps, eps, raw)
        phi_c[cand_nodes] = raw

        # per-element classification:
        #   tip        endpoint strictly inside (terminates the enriched zone)
        #   uniform+/- all perturbed nodal signs equal
        #   crossed    positive-length chord splitting the element
        #   degenerate chord on the boundary (edge-aligned crack)
        #   corner     crack interior passes exactly through a corner
        #   shadow     mixed signs from the beyond-tip extension, crack absent;
        #              shadow and endpoint-corner-touch elements veto their nodes
        state: dict[int, str] = {}
        areas_pm: dict[int, tuple[float, float]] = {}
        local_cut: dict[int, CutElement] = {}
        for e in cand:
            conn = mesh.elements[e]
            poly = elem_xy[e]
            scale = np.sqrt(areas[e])
            signs = np.sign(phi_c[conn])
            if _endpoint_strictly_inside(crack.vertices, poly):
                state[e] = "tip"
                continue
            if np.all(signs > 0) or np.all(signs < 0):
                state[e] = "uniform+" if signs[0] > 0 else "uniform-"
                areas_pm[e] = (areas[e], 0.0) if signs[0] > 0 else (0.0, areas[e])
                continue
            chain = _clip_polyline_to_polygon(crack.vertices, poly)
            if chain is None:
                touch = _polyline_polygon_distance(crack.vertices, poly) <= 1e-9 * scale
                endpoint_near = any(
                    _dist_to_polygon(p, poly) <= 1e-9 * scale
                    for p in (crack.vertices[0], crack.vertices[-1])
                )
                if touch and not endpoint_near:
                    state[e] = "corner"
                    centroid_phi, _, _, _ = polyline_distance(poly.mean(axis=0)[None, :], crack)
                    areas_pm[e] = (
                        (areas[e], 0.0) if centroid_phi[0] >= 0 else (0.0, areas[e])
                    )
                else:
                    state[e] = "shadow"
                continue
            plus, minus, degenerate = _split_areas(poly, chain, crack)
            if degenerate:
                # an endpoint terminating strictly inside one of this
                # element's edges means its support is not fully separated:
                # treat like a tip element so edge-aligned and mid-element
                # cracks terminate the enriched zone consistently
                if _endpoint_on_boundary_interior(crack.vertices, poly, 1e-9 * scale):
                    state[e] = "tip"
                    continue
                # chain on the boundary: whole element lies on its interior side
                centroid_phi, _, _, _ = polyline_distance(poly.mean(axis=0)[None, :], crack)
                if centroid_phi[0] >= 0:
                    plus, minus = areas[e], 0.0
                else:
                    plus, minus = 0.0, areas[e]
            state[e] = "degenerate" if degenerate else "crossed"
            areas_pm[e] = (plus, minus)
            local_cut[e] = CutElement(
                element_id=int(e),
                crack_id=cid,
                chain=chain,
                degenerate=degenerate,
                area_plus=plus,
                area_minus=minus,
            )

        # per-node rule over the support
        for n in cand_nodes:
            sup = supports[n]
            if not sup:
                continue
            states = [state.get(e) for e in sup]
            if any(s in (None, "tip", "shadow") for s in states):
                continue
            if not any(s in ("crossed", "degenerate") for s in states):
                continue
            ap = sum(areas_pm[e][0] for e in sup)
            am = sum(areas_pm[e][1] for e in sup)
            ratio = min(ap, am) / (ap + am)
            if ratio < delta_s:
                continue
            if psi[n] == 1 and node_crack[n] != cid:
                raise GeometryConflictError(
                    f"node {n} qualifies for enrichment by cracks {node_crack[n]} and {cid}; "
                    "cracks must be separated by at least one nodal support"
                )
            psi[n] = 1
            node_crack[n] = cid
            node_phi[n] = phi_c[n]
            node_sign[n] = 1 if phi_c[n] >= 0 else -1
            support_ratio[int(n)] = float(ratio)

        for e, info in local_cut.items():
            if e in cut_elements and cut_elements[e].crack_id != cid:
                raise GeometryConflictError(
                    f"element {e} is crossed by cracks {cut_elements[e].crack_id} and {cid}"
                )
            cut_elements[e] = info

    # keep only cuts whose discontinuity is actually representable
    active_cuts = {
        e: info
        for e, info in cut_elements.items()
        if np.any(psi[mesh.elements[e]] == 1)
    }
    has_enr = np.array(
        sorted(e for e in range(mesh.n_elements) if np.any(psi[mesh.elements[e]] == 1)),
        dtype=np.int64,
    )
    return EnrichmentMap(
        n_nodes=n_nodes,
        psi=psi,
        node_crack=node_crack,
        node_phi=node_phi,
        node_sign=node_sign,
        support_ratio=support_ratio,
        cut_elements=active_cuts,
        elements_with_enrichment=has_enr,
    )


def update_crack(crack: CrackGeometry, tip_index: int, angle: float, increment: float) -> CrackGeometry:
    """Extend one active tip by `increment` at `angle` in the local tip frame.

    The local frame x' points out of the material ahead of the tip; angle 0
    extends collinearly, positive angles kink toward the local +y' side.
    """
    if tip_index not in (0, 1):
        raise InvalidArgumentError("tip_index must be 0 (start) or 1 (end)")
    if not crack.tips[tip_index]:
        raise InvalidArgumentError(f"tip {tip_index} is not active")
    if increment <= 0.0:
        raise InvalidArgumentError("growth increment must be positive")

    v = crack.vertices
    if tip_index == 1:
        tip, prev = v[-1], v[-2]
    else:
        tip, prev = v[0], v[1]
    xhat = tip - prev
    xhat = xhat / np.hypot(*xhat)
    yhat = np.array([-xhat[1], xhat[0]])
    direction = np.cos(angle) * xhat + np.sin(angle) * yhat
    new_vertex = tip + increment * direction
    if tip_index == 1:
        new_vertices = np.vstack([v, new_vertex])
    else:
        new_vertices = np.vstack([new_vertex, v])
    try:
        return CrackGeometry(vertices=new_vertices, tips=crack.tips)
    except GeometryConflictError as exc:
        raise GeometryConflictError(f"crack growth self-intersects: {exc}") from exc


# --- polygon/polyline geometry --------------------------------------------


def _endpoint_strictly_inside(vertices: np.ndarray, poly: np.ndarray) -> bool:
    tol = 1e-10 * np.sqrt(element_area(poly))
    for endpoint in (vertices[0], vertices[-1]):
        if _point_in_polygon(endpoint, poly) and _dist_to_boundary(endpoint, poly) > tol:
            return True
    return False


def _endpoint_on_boundary_interior(vertices: np.ndarray, poly: np.ndarray, tol: float) -> bool:
    """An endpoint sits on the polygon boundary but not at one of its corners."""
    for endpoint in (vertices[0], vertices[-1]):
        if _dist_to_boundary(endpoint, poly) <= tol:
            corner = min(np.hypot(*(poly - endpoint).T))
            if corner > tol:
                return True
    return False


def _point_in_polygon(p, poly) -> bool:
    inside = False
    n = len(poly)
    j = n - 1
    for i in range(n):
        xi, yi = poly[i]
        xj, yj = poly[j]
        if (yi > p[1]) != (yj > p[1]) and p[0] < (xj - xi) * (p[1] - yi) / (yj - yi) + xi:
            inside = not inside
        j = i
    return inside


def _dist_to_boundary(p, poly) -> float:
    best = np.inf
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        d = b - a
        t = np.clip(np.dot(p - a, d) / np.dot(d, d), 0.0, 1.0)
        best = min(best, float(np.hypot(*(p - (a + t * d)))))
    return best


def _dist_to_polygon(p, poly) -> float:
    if _point_in_polygon(p, poly):
        return 0.0
    return _dist_to_boundary(p, poly)


def _polyline_polygon_distance(vertices: np.ndarray, poly: np.ndarray) -> float:
    """Minimum distance between a polyline and a convex polygon."""
    best = min(_dist_to_polygon(v, poly) for v in vertices)
    if best == 0.0:
        return 0.0
    n = len(poly)
    for i in range(n):
        for k in range(len(vertices) - 1):
            best = min(
                best,
                _segment_segment_distance(vertices[k], vertices[k + 1], poly[i], poly[(i + 1) % n]),
            )
    return best


def _segment_segment_distance(a, b, c, d) -> float:
    if _segments_cross(a, b, c, d):
        return 0.0
    return min(
        _point_segment_distance(a, c, d),
        _point_segment_distance(b, c, d),
        _point_segment_distance(c, a, b),
        _point_segment_distance(d, a, b),
    )


def _point_segment_distance(p, a, b) -> float:
    d = b - a
    t = np.clip(np.dot(p - a, d) / np.dot(d, d), 0.0, 1.0)
    return float(np.hypot(*(p - (a + t * d))))


def _clip_segment_to_polygon(a, b, poly):
    """Clip segment [a,b] to a convex CCW polygon; returns (t0, t1) or None."""
    t0, t1 = 0.0, 1.0
    d = b - a
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        edge = q - p
        # inward normal of a CCW polygon edge
        nrm = np.array([-edge[1], edge[0]])
        denom = np.dot(nrm, d)
        num = np.dot(nrm, a - p)
        if abs(denom) < 1e-300:
            if num < -1e-12 * np.hypot(*edge):
                return None
            continue
        t_hit = -num / denom
        if denom > 0:
            t0 = max(t0, t_hit)
        else:
            t1 = min(t1, t_hit)
        if t0 > t1:
            return None
    return (t0, t1) if t1 - t0 > 1e-12 else None


def _clip_polyline_to_polygon(vertices: np.ndarray, poly: np.ndarray):
    """The connected chain of the polyline inside the polygon, or None."""
    pieces = []
    for k in range(len(vertices) - 1):
        a, b = vertices[k], vertices[k + 1]
        hit = _clip_segment_to_polygon(a, b, poly)
        if hit is None:
            continue
        t0, t1 = hit
        pieces.append((a + t0 * (b - a), a + t1 * (b - a)))
    if not pieces:
        return None
    chain = [pieces[0][0], pieces[0][1]]
    scale = np.sqrt(element_area(poly))
    for p0, p1 in pieces[1:]:
        if np.hypot(*(p0 - chain[-1])) > 1e-9 * scale:
            # disconnected re-entry: keep only the longest connected chain
            break
        chain.append(p1)
    chain = np.asarray(chain)
    if np.hypot(*(chain[-1] - chain[0])) < 1e-12 * scale and len(chain) == 2:
        return None
    return chain


def _split_areas(poly: np.ndarray, chain: np.ndarray, crack: CrackGeometry):
    """Areas of the element on the +/- sides of the crossing chain.

    Returns (area_plus, area_minus, degenerate); degenerate means the chain
    lies on the polygon boundary and no interior split exists.
    """
    scale = np.sqrt(element_area(poly))
    entry, exit_ = chain[0], chain[-1]
    if np.hypot(*(entry - exit_)) < 1e-12 * scale:
        return element_area(poly), 0.0, True
    loops = _split_polygon_by_chain(poly, chain)
    if loops is None:
        return element_area(poly), 0.0, True
    a_first, a_second, first_loop = loops
    if a_first < 1e-12 * scale**2 or a_second < 1e-12 * scale**2:
        return element_area(poly), 0.0, True
    probe = _interior_point(first_loop)
    phi, _, _, _ = polyline_distance(probe[None, :], crack)
    if phi[0] >= 0:
        return a_first, a_second, False
    return a_second, a_first, False


def _boundary_parameter(p, poly) -> float:
    """Arc-length-like parameter of a boundary point: edge index + fraction."""
    n = len(poly)
    best, best_val = np.inf, 0.0
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        d = b - a
        t = np.clip(np.dot(p - a, d) / np.dot(d, d), 0.0, 1.0)
        dist = np.hypot(*(p - (a + t * d)))
        if dist < best:
            best, best_val = dist, i + t
    return best_val


def _split_polygon_by_chain(poly: np.ndarray, chain: np.ndarray):
    """Split a convex CCW polygon by a crossing chain.

    Returns (area_1, area_2, loop_1) or None when the chain does not cross.
    """
    n = len(poly)
    s_in = _boundary_parameter(chain[0], poly)
    s_out = _boundary_parameter(chain[-1], poly)
    if abs(s_in - s_out) < 1e-12 or abs(abs(s_in - s_out) - n) < 1e-12:
        return None

    loop1 = [chain[-1]]
    loop1 += _vertices_between(poly, s_out, s_in)
    loop1 += [chain[0]]
    loop1 += list(chain[1:-1])
    loop2 = [chain[0]]
    loop2 += _vertices_between(poly, s_in, s_out)
    loop2 += [chain[-1]]
    loop2 += list(chain[-2:0:-1])
    a1 = _loop_area(np.asarray(loop1))
    a2 = _loop_area(np.asarray(loop2))
    return a1, a2, np.asarray(loop1)


def _vertices_between(poly: np.ndarray, s_from: float, s_to: float):
    """Polygon vertices passed when walking CCW from s_from to s_to."""
    n = len(poly)
    out = []
    s = s_from
    total = (s_to - s_from) % n
    walked = 0.0
    k = int(np.floor(s + 1.0 - 1e-9))
    while True:
        step = k - s
        if walked + step >= total - 1e-9:
            break
        out.append(poly[k % n])
        walked += step
        s = float(k)
        k += 1
        if len(out) > n:
            break
    return out


def _loop_area(loop: np.ndarray) -> float:
    x, y = loop[:, 0], loop[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


def _interior_point(loop: np.ndarray) -> np.ndarray:
    return loop.mean(axis=0)
