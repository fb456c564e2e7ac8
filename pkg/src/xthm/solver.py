"""Monolithic nonlinear solution: stationary, transient and swept studies.

Time integration treats the coupled system as a first-order DAE
R(X, Xdot, t) = 0 (momentum rows are algebraic).  Backward Euler is the
default; the generalized-alpha family for first-order systems is available
with parameters derived from rho_inf:

    alpha_m = (3 - rho_inf) / (2 (1 + rho_inf)),  alpha_f = 1 / (1 + rho_inf),
    gamma = 1/2 + alpha_m - alpha_f,

which reduces to backward Euler for alpha_m = alpha_f = gamma = 1.

Newton iterations use per-field residual norms (momentum, mass, energy rows
differ by many orders of magnitude in SI); convergence requires each field
to drop below max(abs_floor, rel * first_residual).  Linear models (no
contact, no heat convection) reuse a single sparse LU per (c0, scheme).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from xthm.assembly import Model
from xthm.dofs import ThmState
from xthm.errors import ConfigError, InvalidArgumentError, NonConvergenceError

DEFAULT_ABS_FLOORS = {"u": 1e-9, "p": 1e-14, "T": 1e-11}


@dataclass
class SolverSettings:
    scheme: str = "backward_euler"  # or "generalized_alpha"
    rho_inf: float = 0.75
    newton_tol_rel: float = 1e-8
    newton_abs: dict = field(default_factory=lambda: dict(DEFAULT_ABS_FLOORS))
    max_newton: int = 30
    log_path: str | None = None
    # modified Newton: keep the factorized Jacobian across iterations/steps
    # while convergence stays healthy (good for mild convection coupling;
    # leave off for contact problems where the active set moves)
    reuse_jacobian: bool = False

    def __post_init__(self):
        if self.scheme not in ("backward_euler", "generalized_alpha"):
            raise InvalidArgumentError(f"unknown scheme {self.scheme!r}")
        if not 0.0 <= self.rho_inf <= 1.0:
            raise InvalidArgumentError("rho_inf must lie in [0, 1]")
        if self.newton_tol_rel <= 0:
            raise InvalidArgumentError("newton_tol_rel must be positive")

    def alphas(self) -> tuple[float, float, float]:
        if self.scheme == "backward_euler":
            return 1.0, 1.0, 1.0
        r = self.rho_inf
        am = 0.5 * (3.0 - r) / (1.0 + r)
        af = 1.0 / (1.0 + r)
        return am, af, 0.5 + am - af


@dataclass
class SweepPlan:
    parameter: str
    values: list

    def __post_init__(self):
        d = np.diff(np.asarray(self.values, dtype=float))
        if len(d) and not (np.all(d >= 0) or np.all(d <= 0)):
            raise InvalidArgumentError("sweep values must be monotone")


class _NewtonWorkspace:
    """Free/constrained bookkeeping and the linear-model LU cache."""

    def __init__(self, model: Model, settings: SolverSettings):
        self.model = model
        self.settings = settings
        idx, _ = model.dirichlet_constraints(0.0)
        n = model.dofmap.total_dofs
        self.constrained = idx
        free_mask = np.ones(n, dtype=bool)
        free_mask[idx] = False
        self.free = np.flatnonzero(free_mask)
        # momentum components share one residual norm (one physical field)
        groups = {}
        if "ux" in model.fields:
            groups["u"] = ["ux", "uy"]
        for f in ("p", "T"):
            if f in model.fields:
                groups[f] = [f]
        self.field_free = {}
        for name, comps in groups.items():
            rows = model.field_rows(comps)
            self.field_free[name] = rows[free_mask[rows]]
        self._lu = {}
        self.log: list[dict] = []
        self.global_ref = {f: 0.0 for f in self.field_free}

    def field_norms(self, R) -> dict:
        return {f: float(np.linalg.norm(R[rows])) for f, rows in self.field_free.items()}

    def has_lu(self, c0) -> bool:
        return (round(float(c0), 14),) in self._lu

    def solve_linearized(self, J, R, c0):
        key = (round(float(c0), 14),)
        reuse = not self.model.is_nonlinear or self.settings.reuse_jacobian
        if reuse and J is None and key in self._lu:
            lu = self._lu[key]
        else:
            Jff = J[self.free, :][:, self.free].tocsc()
            lu = spla.splu(Jff)
            if reuse:
                self._lu[key] = lu
        return lu.solve(-R[self.free])


def _newton_solve(ws: _NewtonWorkspace, X, stage_fn, t_stage, c0, af, step_label):
    """Iterate X (free part) until all field residuals converge.

    stage_fn maps the end-of-step iterate to the (state, rate) pair at which
    the residual is evaluated (identity for backward Euler).
    """
    model, settings = ws.model, ws.settings
    history = []
    ref = None
    for it in range(settings.max_newton + 1):
        if it == 8 and settings.reuse_jacobian:
            ws._lu.clear()  # stale Jacobian is slowing convergence
        need_J = not (
            (settings.reuse_jacobian or not model.is_nonlinear) and ws.has_lu(c0)
        )
        Xs, Vs = stage_fn(X)
        R, J = model.residual_and_jacobian(Xs, Vs, t_stage, c0, need_jacobian=need_J)
        norms = ws.field_norms(R)
        history.append(norms)
        if ws.log is not None:
            ws.log.append({"step": step_label, "t": t_stage, "iter": it, **norms})
        if ref is None:
            ref = norms
            # the convergence reference tracks the largest load imbalance seen
            # over the whole study, so near-steady steps accept immediately
            for f in norms:
                ws.global_ref[f] = max(ws.global_ref[f], norms[f])
        done = all(
            norms[f]
            <= max(settings.newton_abs.get(f, 1e-12), settings.newton_tol_rel * ws.global_ref[f])
            for f in norms
        )
        if done:
            return X, history
        if it == settings.max_newton:
            break
        dX = ws.solve_linearized(J, R, c0) / af
        X = X.copy()
        X[ws.free] += dX
        # an update at floating-point level means the residual has hit its
        # roundoff floor (e.g. an unloaded coupled field): accept
        if np.linalg.norm(dX) <= 1e-12 * max(np.linalg.norm(X), 1e-30):
            return X, history
    raise NonConvergenceError(
        f"Newton failed to converge at {step_label} (t={t_stage:g}); "
        f"last residuals {history[-1]}",
        history=history,
    )


def _apply_constraints(model: Model, X, t) -> np.ndarray:
    idx, vals = model.dirichlet_constraints(t)
    X = X.copy()
    if len(idx):
        X[idx] = vals
    return X


def solve_stationary(model: Model, settings: SolverSettings | None = None, initial=None) -> ThmState:
    """Newton-converged steady state (transient terms dropped)."""
    settings = settings or SolverSettings()
    ws = _NewtonWorkspace(model, settings)
    X0 = initial.X.copy() if initial is not None else np.zeros(model.dofmap.total_dofs)
    X0 = _apply_constraints(model, X0, 0.0)
    zero = np.zeros_like(X0)
    X, history = _newton_solve(ws, X0, lambda Xc: (Xc, zero), 0.0, 0.0, 1.0, "stationary")
    _write_log(settings, ws.log)
    return ThmState(X=X, time=0.0)


@dataclass
class TransientResult:
    states: list  # ThmState at requested output times (always includes t_end)
    times: np.ndarray  # all accepted step times
    probe_times: np.ndarray
    probe_values: dict  # (probe, field) -> np.ndarray over probe_times
    log: list


def _expand_ladder(dt_ladder, t_end):
    if isinstance(dt_ladder, (int, float)):
        n = max(1, int(round(t_end / dt_ladder)))
        return np.full(n, t_end / n)
    steps = []
    for dt, count in dt_ladder:
        steps.extend([float(dt)] * int(count))
    steps = np.asarray(steps)
    total = steps.sum()
    if abs(total - t_end) > 1e-9 * max(1.0, abs(t_end)):
        raise InvalidArgumentError(f"dt ladder covers {total:g} s but t_end is {t_end:g} s")
    return steps


def solve_transient(
    model: Model,
    settings: SolverSettings,
    t_end: float,
    dt,
    initial: ThmState | None = None,
    output_times=(),
    prober=None,
) -> TransientResult:
    """March the coupled system to t_end with the configured scheme.

    `dt` is a constant step or a ladder [(dt, n), ...] summing to t_end.
    States are retained at `output_times` (matched to step ends) and at
    t_end; probes are sampled after every accepted step.
    """
    am, af, gamma = settings.alphas()
    steps = _expand_ladder(dt, t_end)
    ws = _NewtonWorkspace(model, settings)

    X = initial.X.copy() if initial is not None else np.zeros(model.dofmap.total_dofs)
    t = initial.time if initial is not None else 0.0
    X = _apply_constraints(model, X, t)
    V = np.zeros_like(X)

    wanted = sorted(float(tau) for tau in output_times)
    states: list[ThmState] = []
    times = [t]
    probe_times = [t]
    probe_records = [prober.sample(X, model)] if prober is not None else None

    for k, dtk in enumerate(steps):
        t_next = t + dtk
        t_stage = t + af * dtk
        c0 = am / (af * gamma * dtk)
        Xn, Vn = X, V

        def stage(Xc, Xn=Xn, Vn=Vn, dtk=dtk):
            Vc = (Xc - Xn) / (gamma * dtk) + (1.0 - 1.0 / gamma) * Vn
            Xs = (1.0 - af) * Xn + af * Xc
            Vs = (1.0 - am) * Vn + am * Vc
            return Xs, Vs

        X_new = _apply_constraints(model, Xn, t_next)
        X_new, _ = _newton_solve(ws, X_new, stage, t_stage, c0, af, f"step {k + 1}")
        V = (X_new - Xn) / (gamma * dtk) + (1.0 - 1.0 / gamma) * Vn
        X, t = X_new, t_next
        times.append(t)
        if prober is not None:
            probe_times.append(t)
            probe_records.append(prober.sample(X, model))
        while wanted and t >= wanted[0] - 1e-9 * max(1.0, t_end):
            states.append(ThmState(X=X.copy(), time=t))
            wanted.pop(0)

    if not states or states[-1].time < t_end - 1e-9 * max(1.0, t_end):
        states.append(ThmState(X=X.copy(), time=t))
    _write_log(settings, ws.log)

    probe_values = {}
    if prober is not None:
        for key in probe_records[0]:
            probe_values[key] = np.array([rec[key] for rec in probe_records])
    return TransientResult(
        states=states,
        times=np.asarray(times),
        probe_times=np.asarray(probe_times),
        probe_values=probe_values,
        log=ws.log,
    )


@dataclass
class SweepIncrement:
    value: float
    state: ThmState
    cracks: list
    grew: bool


@dataclass
class SweepResult:
    increments: list
    model: Model

    @property
    def states(self):
        return [inc.state for inc in self.increments]


def auxiliary_sweep(
    model: Model,
    plan: SweepPlan,
    growth_hook=None,
    settings: SolverSettings | None = None,
    max_growth_per_increment: int = 10,
) -> SweepResult:
    """Quasi-static parameter sweep with optional crack growth between solves.

    After each stationary solve the hook may return updated crack polylines;
    the model is then rebuilt (solution transfer: standard DOFs copied,
    enriched DOFs reborn at zero) and the increment re-solved.
    """
    settings = settings or SolverSettings()
    if plan.parameter != "uniform_delta_T":
        raise ConfigError(f"unsupported sweep parameter {plan.parameter!r}")
    increments: list[SweepIncrement] = []
    carry = None
    for value in plan.values:
        model.uniform_delta_T = float(value)
        grew_any = False
        state = solve_stationary(model, settings, initial=carry)
        if growth_hook is not None:
            for _ in range(max_growth_per_increment):
                new_cracks = growth_hook(model, state)
                if new_cracks is None:
                    break
                model = rebuild_with_cracks(model, new_cracks, carry_state=state)
                state = solve_stationary(model, settings, initial=ThmState(X=_transfer(model, state), time=0.0))
                grew_any = True
        carry = state
        increments.append(
            SweepIncrement(
                value=float(value),
                state=state,
                cracks=[c.vertices.copy() for c in model.cracks],
                grew=grew_any,
            )
        )
    return SweepResult(increments=increments, model=model)


def rebuild_with_cracks(model: Model, cracks, carry_state: ThmState | None = None) -> Model:
    """New Model with updated crack geometry; caller transfers state if needed."""
    return Model(
        mesh=model.mesh,
        cracks=cracks,
        materials=model.materials,
        fields=tuple(
            f for f in ("u", "p", "T") if (f == "u" and model.has_u) or f in model.fields
        ),
        bcs=model.bcs,
        contact=model.contact,
        body_force=model.body_force,
        T0=model.T0,
        delta_s=model.delta_s,
        uniform_delta_T=model.uniform_delta_T,
    )


def _transfer(new_model: Model, old_state: ThmState) -> np.ndarray:
    """Copy standard DOFs into the new layout; enriched DOFs start at zero."""
    X = np.zeros(new_model.dofmap.total_dofs)
    n_std = len(new_model.fields) * new_model.dofmap.n_nodes
    X[:n_std] = old_state.X[:n_std]
    return X


def _write_log(settings: SolverSettings, log) -> None:
    if settings.log_path:
        with open(settings.log_path, "w", encoding="utf-8") as f:
            for rec in log:
                f.write(json.dumps(rec) + "\n")
