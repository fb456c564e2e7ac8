"""Acceptance suite: one test (and one printed PASS/FAIL line) per criterion.

Benchmarks run once per session through the same harness the CLI uses;
criteria are asserted at their stated tolerances.  The clamped-beam
temperature-jump criterion is expected to fail for physical reasons (see
the xfail reason: the steady section flux forces a jump of at least
lambda dT / (L h_cont) = 1.5e-3 C for any correct implementation).
"""

import numpy as np
import pytest

from xthm.benchmarks import run_benchmark


def _report(request, name):
    cache = request.config.cache
    key = f"xthm/{name}"
    if not hasattr(request.session, "_xthm_reports"):
        request.session._xthm_reports = {}
    store = request.session._xthm_reports
    if name not in store:
        store[name] = run_benchmark(name, outdir=None)
    return store[name]


def _criterion(rep, needle):
    for c in rep.criteria:
        if needle in c.name:
            print(f"ACCEPTANCE [{rep.name}] {c.name}: "
                  f"{'PASS' if c.passed else 'FAIL'} (measured {c.measured}, target {c.target})")
            return c
    raise AssertionError(f"criterion {needle!r} not found in {rep.name}")


@pytest.fixture(scope="session")
def edge_crack(request):
    return _report(request, "edge_crack_thermal")


@pytest.fixture(scope="session")
def clamped_beam(request):
    return _report(request, "clamped_beam_contact")


@pytest.fixture(scope="session")
def dam(request):
    return _report(request, "dam_sheet_piles")


@pytest.fixture(scope="session")
def fault(request):
    return _report(request, "inclined_fault")


@pytest.fixture(scope="session")
def bimaterial(request):
    return _report(request, "bimaterial_beam")


# --- thermal edge crack -------------------------------------------------------


def test_edge_crack_steady_F(edge_crack):
    assert _criterion(edge_crack, "steady F_I").passed


def test_edge_crack_time_to_steady(edge_crack):
    assert _criterion(edge_crack, "time to steady").passed


def test_edge_crack_temperature_profile(edge_crack):
    assert _criterion(edge_crack, "profile").passed


def test_edge_crack_runtime(edge_crack):
    assert _criterion(edge_crack, "runtime").passed


# --- conforming oracle (Remark-1 substitute) ----------------------------------


def test_conforming_oracle_equivalence():
    import time

    from xthm.assembly import Model
    from xthm.conforming import split_mesh_along_path
    from xthm.dofs import BoundaryConditionSet
    from xthm.levelset import CrackGeometry
    from xthm.materials import FluidProps, SolidProps, derive_mixture
    from xthm.mesh import build_structured_grid
    from xthm.solver import solve_stationary

    t0 = time.time()
    solid = SolidProps(E=1e9, nu=0.3, lambda_s=100.0, rho_s=1.0, C_s=1.0)
    fluid = FluidProps(rho_f=1000.0, Kf=2e9, mu_f=2e-3, lambda_f=0.6, C_f=4200.0)
    mix = derive_mixture(solid, fluid, 0.3, 1e-12)
    mesh = build_structured_grid(20, 20, 1.0, 1.0)
    crack = CrackGeometry(vertices=[[0.5, 0.0], [0.5, 0.5]], tips=(False, True))
    cmesh, twin = split_mesh_along_path(mesh, crack)

    def bcs_for(field):
        b = BoundaryConditionSet()
        if field == "u":
            b.add_dirichlet("left", "ux", 0.0)
            b.add_dirichlet("right", "ux", 0.01)
            b.add_dirichlet("bottom", "uy", 0.0)
        else:
            b.add_dirichlet("left", field, 1.0)
            b.add_dirichlet("right", field, 0.0)
        return b

    worst = 0.0
    for field in ("u", "p", "T"):
        mx = Model(mesh, cracks=[crack], materials={0: mix}, fields=(field,), bcs=bcs_for(field))
        sx = solve_stationary(mx)
        mc = Model(cmesh, materials={0: mix}, fields=(field,), bcs=bcs_for(field))
        sc = solve_stationary(mc)
        for f in mx.dofmap.fields:
            std_x = sx.X[mx.dofmap.std[f]]
            enr_x = np.zeros(mesh.n_nodes)
            has = mx.dofmap.enr[f] >= 0
            enr_x[has] = sx.X[mx.dofmap.enr[f][has]]
            std_c = sc.X[mc.dofmap.std[f]]
            scale = max(1e-30, float(np.abs(std_c).max()))
            worst = max(worst, float(np.abs(std_x - std_c[: mesh.n_nodes]).max()) / scale)
            for orig, dup in twin.items():
                worst = max(worst, abs((std_x[orig] - 2 * enr_x[orig]) - std_c[dup]) / scale)
    elapsed = time.time() - t0
    ok = worst < 1e-8 and elapsed < 60
    print(f"ACCEPTANCE [conforming_oracle] nodal equality u/p/T: "
          f"{'PASS' if ok else 'FAIL'} (max rel dev {worst:.2e}, {elapsed:.1f} s)")
    assert worst < 1e-8
    assert elapsed < 60


# --- clamped beam contact -------------------------------------------------------


def test_contact_penetration(clamped_beam):
    assert _criterion(clamped_beam, "penetration").passed


def test_contact_complementarity(clamped_beam):
    assert _criterion(clamped_beam, "complementarity").passed


def test_contact_zone_active(clamped_beam):
    assert _criterion(clamped_beam, "contact is active").passed


@pytest.mark.xfail(
    strict=True,
    reason=(
        "physically unattainable as stated: the steady section flux "
        "lambda*dT*H/L = 450 W/m must cross the contact zone, so even a fully "
        "closed, uniformly conducting interface carries a jump of at least "
        "lambda*dT/(L*h_cont) = 1.5e-3 C > 1e-3 C; the converged run gives a "
        "delta-weighted mean active jump of 3.2e-3 C (exactly the flux "
        "balance) with the pointwise max 0.11 C at the contact-zone edge "
        "where the flux concentrates. The source claim being quantified is "
        "qualitative (temperature contours look continuous at the 10 C scale)."
    ),
)
def test_contact_temperature_jump(clamped_beam):
    assert _criterion(clamped_beam, "temperature jump").passed


# --- dam with sheet piles -------------------------------------------------------


def test_dam_oracle_agreement(dam):
    assert _criterion(dam, "conforming oracle").passed


def test_dam_mesh_ladder_monotone(dam):
    assert _criterion(dam, "monotonically").passed


def test_dam_finest_pair(dam):
    assert _criterion(dam, "finest").passed


# --- inclined fault --------------------------------------------------------------


def test_fault_pressure_ordering(fault):
    assert _criterion(fault, "strictly decreasing").passed


def test_fault_temperature_jump_max_at_horizontal(fault):
    assert _criterion(fault, "maximal for the horizontal").passed


def test_fault_jumps_decay(fault):
    assert _criterion(fault, "decay").passed


# --- bi-material beam (qualitative) ----------------------------------------------


def test_bimaterial_initiation(bimaterial):
    assert _criterion(bimaterial, "initiates").passed


def test_bimaterial_approaches_interface(bimaterial):
    assert _criterion(bimaterial, "toward the interface").passed


def test_bimaterial_final_direction(bimaterial):
    assert _criterion(bimaterial, "interface-parallel").passed


def test_bimaterial_stays_in_glass(bimaterial):
    assert _criterion(bimaterial, "glass").passed


# --- property suite (runs without any benchmark) ---------------------------------


def test_property_suite_composite():
    """Compact re-verification of the spec's standalone property list."""
    import numpy as np

    from xthm.assembly import Model
    from xthm.contact import dirac_calibration
    from xthm.dofs import BoundaryConditionSet, ThmState, evaluate_field
    from xthm.levelset import CrackGeometry
    from xthm.materials import SolidProps, solid_mixture
    from xthm.mesh import build_structured_grid, gauss_rule, shape_eval_many
    from xthm.sif import eprime, normalized_sif, tip_sifs
    from xthm.solver import solve_stationary

    results = {}

    rng = np.random.default_rng(99)
    vals, grads = shape_eval_many(rng.uniform(-1, 1, size=(10_000, 2)))
    results["partition of unity"] = float(np.max(np.abs(vals.sum(axis=1) - 1))) < 1e-13

    ok = True
    for order in (1, 2, 3):
        rule = gauss_rule(order)
        for a in range(2 * order):
            num = float(np.sum(rule.weights * rule.points[:, 0] ** a))
            exact = (1 - (-1) ** (a + 1)) / (a + 1) * 2
            ok &= abs(num - exact) < 1e-12 * max(1, abs(exact))
    results["gauss exactness"] = ok

    solid = SolidProps(E=1e9, nu=0.3, lambda_s=2.0, rho_s=1000.0, C_s=1.0, beta_s=1e-6)
    mesh = build_structured_grid(5, 4, 1.0, 1.0)
    bcs = BoundaryConditionSet()
    bcs.add_dirichlet("left", "ux", 0.0)
    bcs.add_dirichlet("bottom", "uy", 0.0)
    bcs.add_neumann("right", "ux", 1e6)
    model = Model(mesh, materials={0: solid_mixture(solid)}, fields=("u",), bcs=bcs)
    f = model.sample_fields(solve_stationary(model).X, [[0.4, 0.6]])
    results["patch test"] = abs(f["sigma"][0][0] - 1e6) < 1e-4

    cmesh = build_structured_grid(8, 8, 1.0, 1.0)
    crack = CrackGeometry(vertices=[[-0.1, 0.47], [1.1, 0.47]])
    cmodel = Model(cmesh, cracks=[crack], materials={0: solid_mixture(solid)}, fields=("u",))
    X = rng.normal(size=cmodel.dofmap.total_dofs)
    st = ThmState(X=X)
    shift_ok = True
    jump_ok = True
    for n in cmodel.enrichment.enriched_nodes[:4]:
        fv = evaluate_field(cmesh.coords[n], st, cmesh, [crack], cmodel.enrichment, cmodel.dofmap)
        shift_ok &= abs(fv.u[0] - X[cmodel.dofmap.std["ux"][n]]) < 1e-9 * max(1, np.abs(X).max())
    results["shifted-Heaviside nodal vanishing"] = shift_ok

    from xthm.mesh import shape_eval

    X2 = np.zeros(cmodel.dofmap.total_dofs)
    for n in cmodel.enrichment.enriched_nodes:
        X2[cmodel.dofmap.enr["ux"][n]] = rng.normal()
    st2 = ThmState(X=X2)
    for xs in np.linspace(0.1, 0.9, 9):
        x = np.array([xs, 0.47])
        up = evaluate_field(x + [0, 1e-9], st2, cmesh, [crack], cmodel.enrichment, cmodel.dofmap)
        dn = evaluate_field(x - [0, 1e-9], st2, cmesh, [crack], cmodel.enrichment, cmodel.dofmap)
        e, xi = cmesh.locate(x)
        nv, _ = shape_eval(xi)
        expected = sum(
            2 * nv[a] * X2[cmodel.dofmap.enr["ux"][n]]
            for a, n in enumerate(cmesh.elements[e])
            if cmodel.enrichment.psi[n]
        )
        jump_ok &= abs((up.u[0] - dn.u[0]) - expected) < 1e-6
    results["jump factor 2"] = jump_ok

    mesh91 = build_structured_grid(91, 91, 1.0, 1.0)
    fc = CrackGeometry(vertices=[[0.35, 0.5], [0.65, 0.5]], tips=(True, True))
    raw = dirac_calibration(mesh91, fc, order=20)
    results["dirac calibration 1%"] = abs(raw - 0.3) / 0.3 < 0.01

    # interaction-integral self-consistency on the solved edge-crack state
    mesh2 = build_structured_grid(40, 160, 0.5, 2.0)
    mesh2.node_sets["pin"] = np.array([0])
    ec = CrackGeometry(vertices=[[0.0, 1.0], [0.25, 1.0]], tips=(False, True))
    solid2 = SolidProps(E=9e9, nu=0.3, rho_s=2000.0, lambda_s=1000.0, C_s=300.0, beta_s=3e-7)
    bcs2 = BoundaryConditionSet()
    bcs2.add_dirichlet("left", "T", -50.0)
    bcs2.add_dirichlet("right", "T", 50.0)
    bcs2.add_dirichlet("top", "uy", 0.0)
    bcs2.add_dirichlet("bottom", "uy", 0.0)
    bcs2.add_dirichlet("pin", "ux", 0.0)
    m2 = Model(mesh2, cracks=[ec], materials={0: solid_mixture(solid2)}, fields=("u", "T"), bcs=bcs2)
    st3 = solve_stationary(m2)
    s = tip_sifs(m2, st3.X, 0, 1)
    Ep = eprime(9e9, 0.3, "plane_strain")
    results["A.2 consistency 5%"] = abs(s.J - (s.K_I**2 + s.K_II**2) / Ep) / s.J < 0.05
    h = 0.0125
    s2 = tip_sifs(m2, st3.X, 0, 1, r1=6 * h, r2=12 * h, with_j=False)
    results["path independence 3%"] = abs(s2.K_I - s.K_I) / s.K_I < 0.03

    # classification equals the brute-force oracle on random configurations
    from test_levelset import _oracle_classify
    from xthm.levelset import classify_enrichment

    ok = True
    for seed in range(20):
        r2 = np.random.default_rng(2000 + seed)
        nx = int(r2.integers(5, 11))
        m = build_structured_grid(nx, nx, 1.0, 1.0)
        hh = 1.0 / nx
        while True:
            a = r2.uniform(0.15, 0.85, 2)
            b = r2.uniform(0.15, 0.85, 2)
            if np.hypot(*(a - b)) > 0.3:
                fa = np.abs(a / hh - np.round(a / hh))
                fb = np.abs(b / hh - np.round(b / hh))
                if np.all(fa > 0.05) and np.all(fb > 0.05):
                    break
        ck = CrackGeometry(vertices=[a, b], tips=(True, True))
        em = classify_enrichment(m, [ck], 0.005)
        ok &= set(em.enriched_nodes.tolist()) == _oracle_classify(m, ck, 0.005)
    results["classification oracle (20 cases)"] = ok

    for name, passed in results.items():
        print(f"ACCEPTANCE [property suite] {name}: {'PASS' if passed else 'FAIL'}")
    assert all(results.values()), results
