"""xthm: 2D extended finite elements for thermo-hydro-mechanical analysis.

The package solves Biot-type poroelasticity coupled with heat transport on
quadrilateral meshes, with impermeable adiabatic discontinuities (cracks,
faults, sheet piles) represented mesh-independently by Heaviside-enriched
fields, penalty thermo-mechanical contact across closing faces,
stress-intensity-factor extraction and quasi-static crack growth.
"""

from xthm.assembly import (
    GlobalSystem,
    Model,
    apply_dirichlet,
    assemble_flow,
    assemble_heat,
    assemble_momentum,
    assemble_neumann,
)
from xthm.conforming import split_mesh_along_path
from xthm.contact import ContactParams, contact_diagnostics, dirac_calibration
from xthm.dofs import (
    BoundaryConditionSet,
    DofMap,
    FieldValues,
    ThmState,
    TimeFunction,
    build_dof_map,
    evaluate_field,
)
from xthm.levelset import (
    CrackGeometry,
    EnrichmentMap,
    LevelSetSample,
    classify_enrichment,
    heaviside,
    shifted_heaviside,
    signed_distance,
    update_crack,
)
from xthm.materials import (
    FluidProps,
    MixtureProps,
    SolidProps,
    darcy_velocity,
    derive_mixture,
    effective_stress,
    elasticity_matrix,
    solid_mixture,
    total_stress,
)
from xthm.mesh import (
    Mesh,
    QuadratureRule,
    build_rectilinear_grid,
    build_structured_grid,
    gauss_rule,
    jacobian,
    read_mesh,
    shape_eval,
    write_mesh,
)
from xthm.sif import (
    SifResult,
    TipFrame,
    auxiliary_fields,
    hoop_growth_check,
    interaction_integral,
    j_integral_circular,
    j_integral_domain,
    normalized_sif,
    sifs_from_interaction,
    tip_sifs,
)
from xthm.solver import (
    SolverSettings,
    SweepPlan,
    auxiliary_sweep,
    solve_stationary,
    solve_transient,
)
from xthm.vtkio import export_vtk, validate_vtk

__version__ = "0.1.0"

__all__ = [
    "BoundaryConditionSet",
    "ContactParams",
    "CrackGeometry",
    "DofMap",
    "EnrichmentMap",
    "FieldValues",
    "FluidProps",
    "GlobalSystem",
    "LevelSetSample",
    "Mesh",
    "MixtureProps",
    "Model",
    "QuadratureRule",
    "SifResult",
    "SolidProps",
    "SolverSettings",
    "SweepPlan",
    "ThmState",
    "TimeFunction",
    "TipFrame",
    "apply_dirichlet",
    "assemble_flow",
    "assemble_heat",
    "assemble_momentum",
    "assemble_neumann",
    "auxiliary_fields",
    "auxiliary_sweep",
    "build_dof_map",
    "build_rectilinear_grid",
    "build_structured_grid",
    "classify_enrichment",
    "contact_diagnostics",
    "darcy_velocity",
    "derive_mixture",
    "dirac_calibration",
    "effective_stress",
    "elasticity_matrix",
    "evaluate_field",
    "export_vtk",
    "gauss_rule",
    "heaviside",
    "hoop_growth_check",
    "interaction_integral",
    "j_integral_circular",
    "j_integral_domain",
    "jacobian",
    "normalized_sif",
    "read_mesh",
    "shape_eval",
    "shifted_heaviside",
    "sifs_from_interaction",
    "signed_distance",
    "solid_mixture",
    "solve_stationary",
    "solve_transient",
    "split_mesh_along_path",
    "tip_sifs",
    "total_stress",
    "update_crack",
    "validate_vtk",
    "write_mesh",
]
