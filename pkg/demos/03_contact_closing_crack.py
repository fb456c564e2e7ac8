"""Thermo-mechanical contact across a closing crack.

A block with a full-depth vertical crack is squeezed from the right while
a temperature difference is held across it.  Without contact the crack
would interpenetrate and insulate; the penalty contact resists closure
(Kuhn-Tucker complementarity) and the interface conductance re-connects
the temperature field across the closed zone, integrated with the
calibrated equivalent-domain Dirac of the crack level set.
"""

import numpy as np

from xthm import (
    BoundaryConditionSet,
    ContactParams,
    CrackGeometry,
    Model,
    SolidProps,
    contact_diagnostics,
    solid_mixture,
    solve_stationary,
)
from xthm.mesh import build_structured_grid

mesh = build_structured_grid(24, 24, 1.0, 1.0)
crack = CrackGeometry(vertices=[[0.515, -0.1], [0.515, 1.1]])
solid = SolidProps(E=1e9, nu=0.3, lambda_s=10.0, rho_s=1.0, C_s=1.0)

bcs = BoundaryConditionSet()
bcs.add_dirichlet("left", "u", 0.0)
bcs.add_dirichlet("right", "ux", -1e-3)  # push the block shut
bcs.add_dirichlet("right", "uy", 0.0)
bcs.add_dirichlet("left", "T", 0.0)
bcs.add_dirichlet("right", "T", 10.0)

for h_cont in (0.0, 1e5):
    model = Model(
        mesh,
        cracks=[crack],
        materials={0: solid_mixture(solid)},
        fields=("u", "T"),
        bcs=bcs,
        contact={0: ContactParams(k_N=1e13, h_cont=h_cont)},
    )
    st = solve_stationary(model)
    d = contact_diagnostics(model, st.X)
    left = model.sample_fields(st.X, [[0.505, 0.5]])["T"][0]
    right = model.sample_fields(st.X, [[0.525, 0.5]])["T"][0]
    print(
        f"h_cont = {h_cont:8.0f}: active length {d['active_length']:.2f} m, "
        f"force {d['total_normal_force']:.3e} N/m, penetration {d['max_penetration']:.2e} m, "
        f"T jump at mid-height {right - left:.4f} C"
    )
print("with zero conductance the closed crack still insulates; "
      "a large h_cont makes the temperature field effectively continuous")
