"""Quadrilateral meshes, bilinear shape functions and Gauss quadrature.

Local node numbering is counter-clockwise with reference corners
(-1,-1), (1,-1), (1,1), (-1,1); local edge ``e`` joins local nodes
``e`` and ``(e+1) % 4`` (bottom, right, top, left for an axis-aligned
element).  Meshes and quadrature rules are immutable after construction
and safe for concurrent reads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from xthm.errors import DegenerateGeometryError, InvalidArgumentError, OutOfDomainError

EDGE_LOCAL_NODES = ((0, 1), (1, 2), (2, 3), (3, 0))


@dataclass(frozen=True)
class QuadratureRule:
    """Tensor-product Gauss-Legendre rule on the reference square."""

    points: np.ndarray  # (n, 2)
    weights: np.ndarray  # (n,)

    def __post_init__(self):
        self.points.setflags(write=False)
        self.weights.setflags(write=False)


@dataclass(frozen=True)
class Mesh:
    """Nodes, 4-node elements and named boundary tags.

    Attributes:
        coords: Node coordinates, shape (n_nodes, 2), metres.
        elements: Connectivity, shape (n_elements, 4), counter-clockwise.
        material_ids: Per-element material key, shape (n_elements,).
        edge_tags: Named boundary edge sets; each entry is an integer array
            of shape (k, 2) holding (element_id, local_edge) pairs.
        node_sets: Named node-id sets.
        x_lines, y_lines: Grid lines when the mesh is rectilinear (enables
            O(log n) point location); None for general meshes.
    """

    coords: np.ndarray
    elements: np.ndarray
    material_ids: np.ndarray
    edge_tags: dict = field(default_factory=dict)
    node_sets: dict = field(default_factory=dict)
    x_lines: np.ndarray | None = None
    y_lines: np.ndarray | None = None

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        elements = np.asarray(self.elements, dtype=np.int64)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise InvalidArgumentError("coords must have shape (n_nodes, 2)")
        if elements.ndim != 2 or elements.shape[1] != 4:
            raise InvalidArgumentError("elements must have shape (n_elements, 4)")
        if not np.all(np.isfinite(coords)):
            raise InvalidArgumentError("node coordinates must be finite")
        if elements.size and (elements.min() < 0 or elements.max() >= len(coords)):
            raise InvalidArgumentError("element connectivity references unknown node ids")
        for row in elements:
            if len(set(row.tolist())) != 4:
                raise InvalidArgumentError(f"element {row} has repeated node ids")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "material_ids", np.asarray(self.material_ids, dtype=np.int64))
        coords.setflags(write=False)
        elements.setflags(write=False)
        self.material_ids.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return len(self.coords)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    def element_coords(self, element_id: int) -> np.ndarray:
        """Corner coordinates of one element, shape (4, 2)."""
        return self.coords[self.elements[element_id]]

    def element_size(self, element_id: int) -> float:
        """Characteristic length: square root of the element area."""
        return float(np.sqrt(element_area(self.element_coords(element_id))))

    def element_areas(self) -> np.ndarray:
        xy = self.coords[self.elements]
        x, y = xy[:, :, 0], xy[:, :, 1]
        return 0.5 * np.abs(
            np.sum(x * np.roll(y, -1, axis=1) - np.roll(x, -1, axis=1) * y, axis=1)
        )

    def edge_nodes(self, element_id: int, local_edge: int) -> tuple[int, int]:
        a, b = EDGE_LOCAL_NODES[local_edge]
        conn = self.elements[element_id]
        return int(conn[a]), int(conn[b])

    def tag_node_ids(self, tag: str) -> np.ndarray:
        """All node ids referenced by a tag (edge tag or node set)."""
        if tag in self.node_sets:
            return np.asarray(self.node_sets[tag], dtype=np.int64)
        if tag in self.edge_tags:
            pairs = self.edge_tags[tag]
            ids = [self.edge_nodes(int(e), int(le)) for e, le in pairs]
            return np.unique(np.asarray(ids, dtype=np.int64))
        raise InvalidArgumentError(f"unknown mesh tag {tag!r}")

    def node_supports(self) -> list[list[int]]:
        """element ids incident to each node."""
        supports: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for e, conn in enumerate(self.elements):
            for n in conn:
                supports[n].append(e)
        return supports

    def locate(self, x, tol: float = 1e-10) -> tuple[int, np.ndarray]:
        """Find the element containing physical point x and its reference coords.

        Raises OutOfDomainError when the point lies outside the mesh.
        """
        x = np.asarray(x, dtype=float)
        if self.x_lines is not None and self.y_lines is not None:
            return self._locate_rectilinear(x, tol)
        for e in range(self.n_elements):
            xi = self._try_invert(e, x, tol)
            if xi is not None:
                return e, xi
        raise OutOfDomainError(f"point {x.tolist()} is outside the mesh")

    def _locate_rectilinear(self, x, tol):
        xl, yl = self.x_lines, self.y_lines
        pad_x = tol * max(1.0, xl[-1] - xl[0])
        pad_y = tol * max(1.0, yl[-1] - yl[0])
        if not (xl[0] - pad_x <= x[0] <= xl[-1] + pad_x) or not (
            yl[0] - pad_y <= x[1] <= yl[-1] + pad_y
        ):
            raise OutOfDomainError(f"point {x.tolist()} is outside the mesh")
        i = int(np.clip(np.searchsorted(xl, x[0]) - 1, 0, len(xl) - 2))
        j = int(np.clip(np.searchsorted(yl, x[1]) - 1, 0, len(yl) - 2))
        e = j * (len(xl) - 1) + i
        xi = np.array(
            [
                -1.0 + 2.0 * (x[0] - xl[i]) / (xl[i + 1] - xl[i]),
                -1.0 + 2.0 * (x[1] - yl[j]) / (yl[j + 1] - yl[j]),
            ]
        )
        return e, np.clip(xi, -1.0, 1.0)

    def _try_invert(self, element_id, x, tol):
        xy = self.element_coords(element_id)
        lo, hi = xy.min(axis=0), xy.max(axis=0)
        pad = tol * max(1.0, float(np.max(hi - lo)))
        if np.any(x < lo - pad) or np.any(x > hi + pad):
            return None
        xi = inverse_map(xy, x)
        if np.all(np.abs(xi) <= 1.0 + 1e-8):
            return np.clip(xi, -1.0, 1.0)
        return None


def shape_eval(xi) -> tuple[np.ndarray, np.ndarray]:
    """Bilinear basis values and reference gradients at one reference point.

    Returns (values, gradients) with shapes (4,) and (4, 2).  Values sum to
    one and gradient rows sum to zero (partition of unity).
    """
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (2,):
        raise InvalidArgumentError("xi must be a length-2 reference coordinate")
    if np.any(np.abs(xi) > 1.0 + 1e-12):
        raise InvalidArgumentError(f"reference coordinate {xi.tolist()} outside [-1,1]^2")
    vals, grads = shape_eval_many(xi[None, :])
    return vals[0], grads[0]


def shape_eval_many(xis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized bilinear basis: (n,2) -> values (n,4), gradients (n,4,2)."""
    xis = np.asarray(xis, dtype=float)
    s, t = xis[:, 0], xis[:, 1]
    sm, sp = 1.0 - s, 1.0 + s
    tm, tp = 1.0 - t, 1.0 + t
    vals = 0.25 * np.stack([sm * tm, sp * tm, sp * tp, sm * tp], axis=1)
    dds = 0.25 * np.stack([-tm, tm, tp, -tp], axis=1)
    ddt = 0.25 * np.stack([-sm, -sp, sp, sm], axis=1)
    return vals, np.stack([dds, ddt], axis=2)


def gauss_rule(order: int) -> QuadratureRule:
    """Tensor-product Gauss-Legendre rule of the given 1D order (1..30)."""
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= 30:
        raise InvalidArgumentError(f"unsupported quadrature order {order!r}")
    pts, wts = np.polynomial.legendre.leggauss(int(order))
    X, Y = np.meshgrid(pts, pts, indexing="ij")
    W = np.outer(wts, wts)
    return QuadratureRule(
        points=np.column_stack([X.ravel(), Y.ravel()]),
        weights=W.ravel(),
    )


def gauss_rule_1d(order: int) -> tuple[np.ndarray, np.ndarray]:
    if not 1 <= order <= 30:
        raise InvalidArgumentError(f"unsupported quadrature order {order!r}")
    return np.polynomial.legendre.leggauss(int(order))


def jacobian(mesh: Mesh, element_id: int, xi) -> tuple[np.ndarray, float, np.ndarray]:
    """Isoparametric Jacobian, its determinant and the mapped physical point.

    J[i, j] = d x_i / d xi_j.  Raises DegenerateGeometryError for
    non-positive determinants (inverted or collapsed elements).
    """
    vals, grads = shape_eval(xi)
    xy = mesh.element_coords(element_id)
    J = xy.T @ grads  # (2,2): x_I outer dN_I
    detJ = float(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
    if detJ <= 0.0 or not np.isfinite(detJ):
        raise DegenerateGeometryError(
            f"element {element_id} has non-positive Jacobian determinant {detJ:g}"
        )
    return J, detJ, vals @ xy


def element_area(xy: np.ndarray) -> float:
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


def inverse_map(xy: np.ndarray, x, max_iter: int = 30) -> np.ndarray:
    """Invert the bilinear map of one element (Newton on the reference square)."""
    x = np.asarray(x, dtype=float)
    xi = np.zeros(2)
    for _ in range(max_iter):
        vals, grads = shape_eval_many(xi[None, :])
        r = vals[0] @ xy - x
        if np.dot(r, r) < 1e-28 * max(1.0, float(np.max(np.abs(xy)))) ** 2:
            break
        J = xy.T @ grads[0]
        xi = xi - np.linalg.solve(J, r)
        xi = np.clip(xi, -1.5, 1.5)
    return xi


def build_rectilinear_grid(xs, ys, material_id: int = 0) -> Mesh:
    """Structured grid from explicit, strictly increasing grid lines."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 2 or len(ys) < 2:
        raise InvalidArgumentError("need at least two grid lines per direction")
    if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
        raise InvalidArgumentError("grid lines must be strictly increasing")
    nx, ny = len(xs) - 1, len(ys) - 1
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    coords = np.column_stack([X.ravel(), Y.ravel()])

    j, i = np.meshgrid(np.arange(ny), np.arange(nx), indexing="ij")
    n0 = j * (nx + 1) + i
    elements = np.column_stack(
        [n0.ravel(), n0.ravel() + 1, n0.ravel() + nx + 2, n0.ravel() + nx + 1]
    )

    bottom = np.column_stack([np.arange(nx), np.zeros(nx, dtype=np.int64)])
    top = np.column_stack([np.arange(nx) + (ny - 1) * nx, np.full(nx, 2, dtype=np.int64)])
    left = np.column_stack([np.arange(ny) * nx, np.full(ny, 3, dtype=np.int64)])
    right = np.column_stack([np.arange(ny) * nx + nx - 1, np.ones(ny, dtype=np.int64)])
    return Mesh(
        coords=coords,
        elements=elements,
        material_ids=np.full(nx * ny, material_id, dtype=np.int64),
        edge_tags={"bottom": bottom, "top": top, "left": left, "right": right},
        node_sets={},
        x_lines=xs,
        y_lines=ys,
    )


def build_structured_grid(nx: int, ny: int, width: float, height: float, origin=(0.0, 0.0)) -> Mesh:
    """Uniform nx-by-ny grid covering width x height from the given origin.

    Boundary edge tags "left", "right", "top", "bottom" are populated.
    """
    if not (isinstance(nx, (int, np.integer)) and isinstance(ny, (int, np.integer))):
        raise InvalidArgumentError("nx and ny must be integers")
    if nx < 1 or ny < 1:
        raise InvalidArgumentError("nx and ny must be at least 1")
    if width <= 0 or height <= 0:
        raise InvalidArgumentError("width and height must be positive")
    ox, oy = float(origin[0]), float(origin[1])
    return build_rectilinear_grid(
        ox + np.linspace(0.0, width, nx + 1),
        oy + np.linspace(0.0, height, ny + 1),
    )


def assign_material_boxes(mesh: Mesh, boxes: list[tuple[int, float, float, float, float]]) -> Mesh:
    """Return a mesh whose elements inside each (id, x0, y0, x1, y1) box get that material."""
    centroids = mesh.coords[mesh.elements].mean(axis=1)
    mats = mesh.material_ids.copy()
    for mat, x0, y0, x1, y1 in boxes:
        inside = (
            (centroids[:, 0] >= x0)
            & (centroids[:, 0] <= x1)
            & (centroids[:, 1] >= y0)
            & (centroids[:, 1] <= y1)
        )
        mats[inside] = mat
    return Mesh(
        coords=mesh.coords,
        elements=mesh.elements,
        material_ids=mats,
        edge_tags=mesh.edge_tags,
        node_sets=mesh.node_sets,
        x_lines=mesh.x_lines,
        y_lines=mesh.y_lines,
    )


# --- line-oriented text format ------------------------------------------------
#
#   nodes <N>
#   <id> <x> <y>            (N lines, ids dense 0..N-1, any order)
#   elements <M>
#   <id> <n1> <n2> <n3> <n4> <mat>
#   tags
#   edge <name> <K>
#   <element_id> <local_edge>   (K lines)
#   nodeset <name> <K>
#   <node_id> ...               (ids across one or more lines, K total)
#   end


def write_mesh(mesh: Mesh, path) -> None:
    lines = [f"nodes {mesh.n_nodes}"]
    for i, (x, y) in enumerate(mesh.coords):
        lines.append(f"{i} {x:.17g} {y:.17g}")
    lines.append(f"elements {mesh.n_elements}")
    for e, conn in enumerate(mesh.elements):
        lines.append(f"{e} {conn[0]} {conn[1]} {conn[2]} {conn[3]} {mesh.material_ids[e]}")
    lines.append("tags")
    for name in sorted(mesh.edge_tags):
        pairs = mesh.edge_tags[name]
        lines.append(f"edge {name} {len(pairs)}")
        for e, le in pairs:
            lines.append(f"{e} {le}")
    for name in sorted(mesh.node_sets):
        ids = np.asarray(mesh.node_sets[name], dtype=np.int64)
        lines.append(f"nodeset {name} {len(ids)}")
        lines.append(" ".join(str(int(i)) for i in ids))
    lines.append("end")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def read_mesh(path) -> Mesh:
    with open(path, encoding="utf-8") as f:
        tokens = f.read().split()
    pos = 0

    def take(n=1):
        nonlocal pos
        out = tokens[pos : pos + n]
        if len(out) != n:
            raise InvalidArgumentError(f"mesh file truncated near token {pos}")
        pos += n
        return out

    kw, n = take(2)
    if kw != "nodes":
        raise InvalidArgumentError("mesh file must start with 'nodes <N>'")
    n = int(n)
    coords = np.zeros((n, 2))
    seen = np.zeros(n, dtype=bool)
    for _ in range(n):
        i, x, y = take(3)
        i = int(i)
        if not 0 <= i < n or seen[i]:
            raise InvalidArgumentError(f"bad or repeated node id {i}")
        coords[i] = (float(x), float(y))
        seen[i] = True

    kw, m = take(2)
    if kw != "elements":
        raise InvalidArgumentError("expected 'elements <M>' section")
    m = int(m)
    elements = np.zeros((m, 4), dtype=np.int64)
    mats = np.zeros(m, dtype=np.int64)
    for _ in range(m):
        row = take(6)
        e = int(row[0])
        if not 0 <= e < m:
            raise InvalidArgumentError(f"bad element id {e}")
        elements[e] = [int(v) for v in row[1:5]]
        mats[e] = int(row[5])

    edge_tags: dict[str, np.ndarray] = {}
    node_sets: dict[str, np.ndarray] = {}
    (kw,) = take(1)
    if kw != "tags":
        raise InvalidArgumentError("expected 'tags' section")
    while True:
        (kw,) = take(1)
        if kw == "end":
            break
        if kw == "edge":
            name, k = take(2)
            pairs = np.array([[int(v) for v in take(2)] for _ in range(int(k))], dtype=np.int64)
            edge_tags[name] = pairs.reshape(-1, 2)
        elif kw == "nodeset":
            name, k = take(2)
            node_sets[name] = np.array([int(v) for v in take(int(k))], dtype=np.int64)
        else:
            raise InvalidArgumentError(f"unknown tags entry {kw!r}")

    mesh = Mesh(
        coords=coords,
        elements=elements,
        material_ids=mats,
        edge_tags=edge_tags,
        node_sets=node_sets,
    )
    # validate that tagged edges exist and the mapping is sane
    for name, pairs in edge_tags.items():
        if pairs.size and (pairs[:, 0].max() >= m or pairs[:, 1].max() > 3):
            raise InvalidArgumentError(f"edge tag {name!r} references unknown element/edge")
    return mesh
