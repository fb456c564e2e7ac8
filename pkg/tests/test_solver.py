import numpy as np
import pytest

from xthm.assembly import Model
from xthm.dofs import BoundaryConditionSet
from xthm.errors import ConfigError, InvalidArgumentError
from xthm.levelset import CrackGeometry
from xthm.materials import SolidProps, solid_mixture
from xthm.mesh import build_structured_grid
from xthm.solver import (
    SolverSettings,
    SweepPlan,
    auxiliary_sweep,
    solve_stationary,
    solve_transient,
)

SOLID = SolidProps(E=1e9, nu=0.3, rho_s=1000.0, lambda_s=2.0, C_s=1.0, beta_s=1e-6)


def _conduction_model(nx=40):
    mesh = build_structured_grid(nx, 2, 1.0, 0.1)
    bcs = BoundaryConditionSet()
    bcs.add_dirichlet("left", "T", 1.0)
    bcs.add_dirichlet("right", "T", 0.0)
    return Model(mesh, materials={0: solid_mixture(SOLID)}, fields=("T",), bcs=bcs)


def _series(x, t, kappa, L=1.0, terms=200):
    s = 1 - x / L
    n = np.arange(1, terms + 1)
    s -= np.sum(2 / (n * np.pi) * np.sin(n * np.pi * x / L) * np.exp(-(n**2) * np.pi**2 * kappa * t / L**2))
    return s


def test_transient_conduction_vs_series_oracle():
    kappa = SOLID.lambda_s / (SOLID.rho_s * SOLID.C_s)
    t_end = 0.1 * 1.0**2 / kappa
    model = _conduction_model()
    res = solve_transient(model, SolverSettings(), t_end, dt=[(t_end / 100, 100)])
    X = res.states[-1].X
    for x in np.linspace(0.05, 0.95, 19):
        n = int(np.argmin(np.abs(model.mesh.coords[:, 0] - x) + np.abs(model.mesh.coords[:, 1] - 0.05)))
        Tn = X[model.dofmap.std["T"][n]]
        exact = _series(model.mesh.coords[n, 0], t_end, kappa)
        assert Tn == pytest.approx(exact, abs=0.01)


def test_scheme_agreement_steady_limit():
    model = _conduction_model(nx=20)
    kappa = SOLID.lambda_s / (SOLID.rho_s * SOLID.C_s)
    t_long = 5.0 / kappa
    be = solve_transient(model, SolverSettings(), t_long, dt=[(t_long / 60, 60)])
    ga = solve_transient(
        model, SolverSettings(scheme="generalized_alpha", rho_inf=0.75), t_long, dt=[(t_long / 60, 60)]
    )
    st = solve_stationary(model)
    assert np.abs(be.states[-1].X - st.X).max() < 1e-6
    assert np.abs(ga.states[-1].X - st.X).max() < 1e-6


def test_zero_load_stays_constant():
    mesh = build_structured_grid(4, 4, 1.0, 1.0)
    model = Model(mesh, materials={0: solid_mixture(SOLID)}, fields=("T",))
    init = model.initial_state({"T": 3.0})
    res = solve_transient(model, SolverSettings(), 10.0, dt=[(1.0, 10)], initial=init)
    assert np.abs(res.states[-1].X - 3.0).max() < 1e-12


def test_maximum_principle_conduction():
    model = _conduction_model(nx=25)
    kappa = SOLID.lambda_s / (SOLID.rho_s * SOLID.C_s)
    res = solve_transient(model, SolverSettings(), 0.05 / kappa, dt=[(0.005 / kappa, 10)])
    for st in res.states:
        assert st.X.min() >= -1e-12
        assert st.X.max() <= 1.0 + 1e-12


def test_linear_problem_converges_in_one_newton_step(tmp_path):
    model = _conduction_model(nx=10)
    log = tmp_path / "conv.jsonl"
    st = solve_stationary(model, SolverSettings(log_path=str(log)))
    assert st.X.max() == pytest.approx(1.0)
    import json

    records = [json.loads(line) for line in log.read_text().splitlines()]
    assert max(r["iter"] for r in records) == 1  # reference pass + one solve
    assert all("T" in r for r in records)


def test_newton_superlinear_tail_on_convection(tmp_path):
    # consistent Jacobian on the convection nonlinearity: successive
    # residual reductions accelerate sharply (quadratic tail)
    import json

    from xthm.materials import FluidProps, derive_mixture

    solid = SolidProps(E=1e9, nu=0.3, rho_s=2000.0, lambda_s=2.0, C_s=1000.0)
    fluid = FluidProps(rho_f=1000.0, Kf=2e9, mu_f=1e-3, lambda_f=0.6, C_f=4200.0)
    mix = derive_mixture(solid, fluid, 0.3, 1e-10)
    mesh = build_structured_grid(16, 16, 1.0, 1.0)
    bcs = BoundaryConditionSet()
    bcs.add_dirichlet("bottom", "p", 2e4)
    bcs.add_dirichlet("top", "p", 0.0)
    bcs.add_dirichlet("bottom", "T", 50.0)
    bcs.add_dirichlet("top", "T", 0.0)
    model = Model(mesh, materials={0: mix}, fields=("p", "T"), bcs=bcs)
    log = tmp_path / "conv.jsonl"
    solve_stationary(model, SolverSettings(log_path=str(log)))
    rs = [json.loads(line)["T"] for line in log.read_text().splitlines()]
    assert len(rs) >= 3
    first, last = rs[1] / rs[0], rs[-1] / rs[-2]
    assert last < 0.01 * first


def test_nonconvergence_reports_residual_history():
    from xthm.contact import ContactParams
    from xthm.errors import NonConvergenceError

    mesh = build_structured_grid(8, 8, 1.0, 1.0)
    crack = CrackGeometry(vertices=[[0.53, -0.1], [0.53, 1.1]])
    bcs = BoundaryConditionSet()
    bcs.add_dirichlet("left", "u", 0.0)
    bcs.add_dirichlet("right", "ux", -1e-3)
    bcs.add_dirichlet("right", "uy", 0.0)
    model = Model(
        mesh,
        cracks=[crack],
        materials={0: solid_mixture(SOLID)},
        fields=("u",),
        bcs=bcs,
        contact={0: ContactParams(k_N=1e13)},
    )
    with pytest.raises(NonConvergenceError) as err:
        solve_stationary(model, SolverSettings(max_newton=0))
    assert err.value.history
    assert "u" in err.value.history[-1]


def test_contradictory_dirichlet_raises_before_solve():
    mesh = build_structured_grid(3, 3, 1.0, 1.0)
    bcs = BoundaryConditionSet()
    bcs.add_dirichlet("left", "T", 0.0)
    bcs.add_dirichlet("bottom", "T", 5.0)
    model = Model(mesh, materials={0: solid_mixture(SOLID)}, fields=("T",), bcs=bcs)
    with pytest.raises(ConfigError):
        solve_stationary(model)


def test_dt_ladder_must_cover_t_end():
    model = _conduction_model(nx=5)
    with pytest.raises(InvalidArgumentError):
        solve_transient(model, SolverSettings(), 10.0, dt=[(1.0, 5)])


def test_sweep_empty_plan():
    mesh = build_structured_grid(3, 3, 1.0, 1.0)
    model = Model(mesh, materials={0: solid_mixture(SOLID)}, fields=("u",), uniform_delta_T=0.0)
    res = auxiliary_sweep(model, SweepPlan(parameter="uniform_delta_T", values=[]))
    assert res.increments == []


def test_sweep_without_growth_keeps_geometry():
    mesh = build_structured_grid(6, 6, 1.0, 1.0)
    mesh.node_sets["pinA"] = np.array([0])
    mesh.node_sets["pinB"] = np.array([6])
    crack = CrackGeometry(vertices=[[-0.1, 0.42], [0.45, 0.42]], tips=(False, True))
    bcs = BoundaryConditionSet()
    bcs.add_dirichlet("pinA", "u", 0.0)
    bcs.add_dirichlet("pinB", "uy", 0.0)
    model = Model(
        mesh, cracks=[crack], materials={0: solid_mixture(SOLID)}, fields=("u",), bcs=bcs
    )
    plan = SweepPlan(parameter="uniform_delta_T", values=[-1.0, -2.0, -3.0])
    res = auxiliary_sweep(model, plan, growth_hook=lambda m, s: None)
    assert len(res.increments) == 3
    for inc in res.increments:
        assert np.allclose(inc.cracks[0], crack.vertices)
        assert not inc.grew


def test_sweep_non_monotone_rejected():
    with pytest.raises(InvalidArgumentError):
        SweepPlan(parameter="uniform_delta_T", values=[-1.0, -3.0, -2.0])


def test_time_step_halving_converges():
    # dt-halving changes late-time probe pressures by < 0.5% on the
    # inclined-fault configuration (reduced 31x31 mesh; the property tests
    # the time scheme, not spatial resolution)
    import yaml

    from xthm.benchmarks.cases import inclined_fault_config
    from xthm.config import parse_config
    from xthm.runner import run_config

    vals = {}
    for halve in (False, True):
        raw = inclined_fault_config(45.0, nx=31)
        if halve:
            raw["study"]["dt"] = [[dt / 2.0, 2 * n] for dt, n in raw["study"]["dt"]]
        cfg = parse_config(yaml.safe_dump(raw))
        rep = run_config(cfg, None)
        vals[halve] = np.array(
            [rep.probe_values["low.p"][-1], rep.probe_values["up.p"][-1]]
        )
    scale = np.abs(vals[True]).max()
    assert np.max(np.abs(vals[True] - vals[False])) / scale < 0.005


def test_newton_quadratic_tail_on_contact_problem():
    # smooth steps without active-set changes show at least superlinear decay
    from xthm.contact import ContactParams

    mesh = build_structured_grid(10, 10, 1.0, 1.0)
    crack = CrackGeometry(vertices=[[0.53, -0.1], [0.53, 1.1]])
    bcs = BoundaryConditionSet()
    bcs.add_dirichlet("left", "u", 0.0)
    bcs.add_dirichlet("right", "ux", -1e-3)
    bcs.add_dirichlet("right", "uy", 0.0)
    model = Model(
        mesh,
        cracks=[crack],
        materials={0: solid_mixture(SOLID)},
        fields=("u",),
        bcs=bcs,
        contact={0: ContactParams(k_N=1e13)},
    )
    settings = SolverSettings()
    st = solve_stationary(model, settings)
    from xthm.contact import contact_diagnostics

    d = contact_diagnostics(model, st.X)
    assert d["max_penetration"] > 0  # the compressed crack is closed
    assert d["complementarity"] == pytest.approx(0.0, abs=1e-9)
