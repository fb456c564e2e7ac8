"""Legacy-ASCII VTK export with crack-subdivided cells.

Elements crossed by a crack are exported as sub-polygons on each side of
the chord, fan-triangulated, with their own points so the field jump
renders sharply; uncrossed elements share the global points (nodal values
equal the standard DOFs by the shift property).
"""

from __future__ import annotations

import numpy as np

from xthm.levelset import _split_polygon_by_chain, heaviside_many, polyline_distance
from xthm.mesh import shape_eval_many


def _side_value(model, X, e, pts, side):
    """Fields at points of element e forcing the Heaviside side (+1/-1)."""
    mesh = model.mesh
    conn = mesh.elements[e]
    xy = mesh.coords[conn]
    out = {f: np.zeros(len(pts)) for f in ("ux", "uy", "p", "T")}
    enr = model.enrichment
    from xthm.mesh import inverse_map

    for i, x in enumerate(pts):
        xi = inverse_map(xy, x)
        N, _ = shape_eval_many(np.clip(xi, -1, 1)[None, :])
        for fld in model.dofmap.fields:
            v = float(N[0] @ X[model.dofmap.std[fld][conn]])
            if enr is not None:
                for a in range(4):
                    node = conn[a]
                    edof = model.dofmap.enr[fld][node]
                    if edof >= 0:
                        H = side - int(enr.node_sign[node])
                        v += N[0, a] * H * X[edof]
            out[fld][i] = v
    return out


def _fan_triangles(k: int):
    return [(0, i, i + 1) for i in range(1, k - 1)]


def export_vtk(model, state, path, title="xthm") -> None:
    """Write a legacy ASCII unstructured-grid file for one state."""
    mesh = model.mesh
    X = state.X
    enr = model.enrichment
    cut = dict(enr.cut_elements) if enr is not None else {}

    points = [tuple(p) for p in mesh.coords]
    pdata = {f: [0.0] * mesh.n_nodes for f in ("ux", "uy", "p", "T")}
    psi = [0.0] * mesh.n_nodes
    if enr is not None:
        for n in range(mesh.n_nodes):
            psi[n] = float(enr.psi[n])
    for fld in model.dofmap.fields:
        vals = X[model.dofmap.std[fld]]
        pdata[fld] = [float(v) for v in vals]

    cells = []
    cell_types = []
    cell_elems = []  # element id + centroid for cell data

    for e in range(mesh.n_elements):
        conn = mesh.elements[e]
        info = cut.get(e)
        if info is None or info.degenerate:
            cells.append(list(int(n) for n in conn))
            cell_types.append(9)  # VTK_QUAD
            cell_elems.append((e, mesh.coords[conn].mean(axis=0)))
            continue
        poly = mesh.coords[conn]
        split = _split_polygon_by_chain(poly, info.chain)
        if split is None:
            cells.append(list(int(n) for n in conn))
            cell_types.append(9)
            cell_elems.append((e, mesh.coords[conn].mean(axis=0)))
            continue
        _, _, loop1 = split
        crack = model.cracks[info.crack_id]
        # rebuild both loops: second loop from the complementary walk
        from xthm.levelset import _boundary_parameter, _vertices_between

        s_in = _boundary_parameter(info.chain[0], poly)
        s_out = _boundary_parameter(info.chain[-1], poly)
        loop2 = (
            [info.chain[0]]
            + _vertices_between(poly, s_in, s_out)
            + [info.chain[-1]]
            + list(info.chain[-2:0:-1])
        )
        for loop in (loop1, np.asarray(loop2)):
            loop = np.asarray(loop)
            phi, _, _, _ = polyline_distance(loop.mean(axis=0)[None, :], crack)
            side = int(heaviside_many(phi)[0])
            vals = _side_value(model, X, e, loop, side)
            base = len(points)
            points.extend(tuple(p) for p in loop)
            for f in ("ux", "uy", "p", "T"):
                pdata[f].extend(float(v) for v in vals[f])
            psi_vals = []
            for p in loop:
                d = np.hypot(*(mesh.coords[conn] - p).T)
                psi_vals.append(float(enr.psi[conn[int(np.argmin(d))]]))
            psi.extend(psi_vals)
            for tri in _fan_triangles(len(loop)):
                cells.append([base + tri[0], base + tri[1], base + tri[2]])
                cell_types.append(5)  # VTK_TRIANGLE
                cell_elems.append((e, loop[list(tri)].mean(axis=0)))

    centroids = np.array([c for _, c in cell_elems])
    fields = model.sample_fields(X, centroids)
    sig = fields["sigma"]
    if model.has_p:
        for k, (e, _) in enumerate(cell_elems):
            m = model.materials[int(mesh.material_ids[e])]
            sig[k] += m.alpha * fields["p"][k] * np.array([1.0, 1.0, 0.0])
    darcy = np.zeros((len(cell_elems), 2))
    heatflux = np.zeros((len(cell_elems), 2))
    for k, (e, _) in enumerate(cell_elems):
        m = model.materials[int(mesh.material_ids[e])]
        if model.has_p and m.fluid is not None:
            darcy[k] = (m.k_f / m.fluid.mu_f) * (
                -fields["grad_p"][k] + m.fluid.rho_f * model.body_force
            )
        if model.has_T:
            heatflux[k] = -m.lambda_eff * fields["grad_T"][k]

    with open(path, "w", encoding="utf-8") as f:
        f.write("# vtk DataFile Version 3.0\n")
        f.write(f"{title}\n")
        f.write("ASCII\nDATASET UNSTRUCTURED_GRID\n")
        f.write(f"POINTS {len(points)} double\n")
        for x, y in points:
            f.write(f"{x:.15g} {y:.15g} 0\n")
        size = sum(len(c) + 1 for c in cells)
        f.write(f"CELLS {len(cells)} {size}\n")
        for c in cells:
            f.write(str(len(c)) + " " + " ".join(str(i) for i in c) + "\n")
        f.write(f"CELL_TYPES {len(cells)}\n")
        for t in cell_types:
            f.write(f"{t}\n")
        f.write(f"POINT_DATA {len(points)}\n")
        f.write("VECTORS displacement double\n")
        for i in range(len(points)):
            f.write(f"{pdata['ux'][i]:.9g} {pdata['uy'][i]:.9g} 0\n")
        for name, arr in (("pressure", pdata["p"]), ("temperature", pdata["T"]), ("psi", psi)):
            f.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            for v in arr:
                f.write(f"{v:.9g}\n")
        f.write(f"CELL_DATA {len(cells)}\n")
        f.write("TENSORS stress double\n")
        for s in sig:
            f.write(f"{s[0]:.9g} {s[2]:.9g} 0 {s[2]:.9g} {s[1]:.9g} 0 0 0 0\n")
        f.write("VECTORS darcy_velocity double\n")
        for v in darcy:
            f.write(f"{v[0]:.9g} {v[1]:.9g} 0\n")
        f.write("VECTORS heat_flux double\n")
        for v in heatflux:
            f.write(f"{v[0]:.9g} {v[1]:.9g} 0\n")


def validate_vtk(path) -> bool:
    """Light grammar check: header, section counts, cell-size consistency."""
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines[0].startswith("# vtk DataFile"):
        return False
    if lines[2] != "ASCII" or lines[3] != "DATASET UNSTRUCTURED_GRID":
        return False
    k = 4
    assert lines[k].startswith("POINTS")
    npts = int(lines[k].split()[1])
    k += 1 + npts
    assert lines[k].startswith("CELLS")
    ncells, size = int(lines[k].split()[1]), int(lines[k].split()[2])
    total = 0
    for j in range(ncells):
        row = lines[k + 1 + j].split()
        if int(row[0]) != len(row) - 1:
            return False
        if any(not 0 <= int(i) < npts for i in row[1:]):
            return False
        total += len(row)
    if total != size:
        return False
    k += 1 + ncells
    if not lines[k].startswith("CELL_TYPES"):
        return False
    return True
