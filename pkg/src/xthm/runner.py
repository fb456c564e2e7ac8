"""Execute a validated RunConfig end to end and write its outputs."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import numpy as np

from xthm.config import RunConfig
from xthm.contact import contact_diagnostics
from xthm.errors import ConfigError
from xthm.probes import Prober, write_probe_csv
from xthm.sif import hoop_growth_check, normalized_sif, tip_sifs
from xthm.levelset import update_crack
from xthm.solver import (
    SolverSettings,
    SweepPlan,
    auxiliary_sweep,
    solve_stationary,
    solve_transient,
)
from xthm.vtkio import export_vtk


@dataclass
class RunReport:
    name: str
    states: list
    times: np.ndarray
    probe_times: np.ndarray
    probe_values: dict
    sif_rows: list  # dicts: t/value, tip, K_I, K_II, J, F_I, angle
    crack_history: list
    contact: dict | None
    model: object
    runtime: float
    files: dict = field(default_factory=dict)


def make_settings(cfg: RunConfig, outdir=None) -> SolverSettings:
    s = dict(cfg.solver)
    log = cfg.outputs.log
    if log and outdir:
        log = os.path.join(outdir, log)
    return SolverSettings(
        scheme=s.get("scheme", "backward_euler"),
        rho_inf=float(s.get("rho_inf", 0.75)),
        newton_tol_rel=float(s.get("newton_tol_rel", 1e-8)),
        max_newton=int(s.get("max_newton", 30)),
        reuse_jacobian=bool(s.get("reuse_jacobian", False)),
        log_path=log,
    )


def _sif_row(model, X, cid, tix, cfg: RunConfig, label):
    crack = model.cracks[cid]
    from xthm.sif import TipFrame, _tip_element

    tipf = TipFrame.from_crack(crack, tix)
    h = model.mesh.element_size(_tip_element(model, tipf))
    s = tip_sifs(model, X, cid, tix, r1=cfg.sif.r1_factor * h, r2=cfg.sif.r2_factor * h)
    row = {
        "label": label,
        "crack": cid,
        "tip": tix,
        "K_I": s.K_I,
        "K_II": s.K_II,
        "J": s.J,
        "theta_c": hoop_growth_check(s.K_I, s.K_II, np.inf, h / 2)[1],
    }
    if cfg.sif.normalize:
        n = cfg.sif.normalize
        row["F_I"] = normalized_sif(
            s.K_I, float(n["E"]), float(n["nu"]), float(n["alpha"]), float(n["theta0"]), float(n["a"])
        )
    return row


def make_growth_hook(cfg: RunConfig, telemetry: list):
    from xthm.sif import TipFrame, _tip_element

    def hook(model, state):
        new_cracks = list(model.cracks)
        grew = False
        for cid, crack in enumerate(new_cracks):
            for tix, active in enumerate(crack.tips):
                if not active:
                    continue
                tipf = TipFrame.from_crack(crack, tix)
                e_tip = _tip_element(model, tipf)
                mat = model.materials[int(model.mesh.material_ids[e_tip])]
                if mat.solid.f_t is None:
                    continue
                h = model.mesh.element_size(e_tip)
                s = tip_sifs(
                    model,
                    state.X,
                    cid,
                    tix,
                    r1=cfg.sif.r1_factor * h,
                    r2=cfg.sif.r2_factor * h,
                    with_j=False,
                )
                grow, angle = hoop_growth_check(
                    s.K_I, s.K_II, mat.solid.f_t, cfg.growth.r_eval_factor * h
                )
                telemetry.append(
                    {
                        "delta_T": model.uniform_delta_T,
                        "crack": cid,
                        "tip": tix,
                        "K_I": s.K_I,
                        "K_II": s.K_II,
                        "grow": grow,
                        "angle": angle,
                        "tip_xy": tipf.tip.tolist(),
                    }
                )
                if grow:
                    new_cracks[cid] = update_crack(crack, tix, angle, cfg.growth.increment)
                    grew = True
        return new_cracks if grew else None

    return hook


def run_config(cfg: RunConfig, outdir: str | None = None) -> RunReport:
    t_start = time.time()
    if outdir:
        os.makedirs(outdir, exist_ok=True)
    model = cfg.build_model()
    settings = make_settings(cfg, outdir)
    prober = Prober(model, cfg.probes) if cfg.probes else None
    sif_rows: list[dict] = []
    crack_history: list = []
    files: dict = {}

    if cfg.study.kind == "stationary":
        st = solve_stationary(model, settings, initial=model.initial_state(cfg.initial))
        states, times = [st], np.array([0.0])
        probe_times = np.array([0.0])
        probe_values = (
            {k: np.array([v]) for k, v in prober.sample(st.X).items()} if prober else {}
        )
        for cid, tix in cfg.sif.tips:
            sif_rows.append(_sif_row(model, st.X, cid, tix, cfg, 0.0))
    elif cfg.study.kind == "transient":
        if cfg.study.dt is None:
            raise ConfigError("transient study needs dt")
        res = solve_transient(
            model,
            settings,
            cfg.study.t_end,
            cfg.study.dt,
            initial=model.initial_state(cfg.initial),
            output_times=cfg.study.output_times,
            prober=prober,
        )
        states, times = res.states, res.times
        probe_times, probe_values = res.probe_times, res.probe_values
        for st in states:
            for cid, tix in cfg.sif.tips:
                sif_rows.append(_sif_row(model, st.X, cid, tix, cfg, st.time))
    elif cfg.study.kind == "sweep":
        plan = SweepPlan(parameter=cfg.study.sweep_parameter, values=cfg.study.sweep_values)
        hook = make_growth_hook(cfg, sif_rows) if cfg.growth.enabled else None
        sw = auxiliary_sweep(
            model, plan, growth_hook=hook, settings=settings,
            max_growth_per_increment=cfg.growth.max_per_increment,
        )
        model = sw.model
        states = [inc.state for inc in sw.increments]
        times = np.asarray([inc.value for inc in sw.increments])
        crack_history = [inc.cracks for inc in sw.increments]
        probe_times = times
        probe_values = {}
        if prober is not None:
            # crack growth rebuilds the DOF layout; only states matching the
            # final layout can be probed with the final model
            p2 = Prober(model, cfg.probes)
            recs = [
                p2.sample(st.X, model)
                for st in states
                if len(st.X) == model.dofmap.total_dofs
            ]
            probe_values = {k: np.array([r[k] for r in recs]) for k in recs[0]} if recs else {}
    else:
        raise ConfigError(f"unknown study kind {cfg.study.kind!r}")

    contact = contact_diagnostics(model, states[-1].X) if model.contact else None

    if outdir:
        if cfg.outputs.csv and probe_values:
            path = os.path.join(outdir, cfg.outputs.csv)
            write_probe_csv(path, probe_times, probe_values)
            files["csv"] = path
        if sif_rows:
            path = os.path.join(outdir, f"{cfg.name}_sif.csv")
            keys = ["label", "crack", "tip", "K_I", "K_II", "J", "theta_c"]
            if any("F_I" in r for r in sif_rows):
                keys.append("F_I")
            if any("grow" in r for r in sif_rows):
                keys += ["grow", "angle", "delta_T"]
            with open(path, "w", encoding="utf-8") as f:
                f.write(",".join(keys) + "\n")
                for r in sif_rows:
                    f.write(
                        ",".join(_fmt(r.get(k)) for k in keys) + "\n"
                    )
            files["sif_csv"] = path
        if cfg.outputs.vtk:
            if cfg.outputs.vtk_cadence > 0 and len(states) > 1:
                for k, st in enumerate(states[:: cfg.outputs.vtk_cadence]):
                    if len(st.X) != model.dofmap.total_dofs:
                        continue
                    p = os.path.join(outdir, f"{cfg.outputs.vtk}_{k:04d}.vtk")
                    export_vtk(model, st, p, title=f"{cfg.name} t={st.time:g}")
            path = os.path.join(outdir, f"{cfg.outputs.vtk}_final.vtk")
            export_vtk(model, states[-1], path, title=cfg.name)
            files["vtk"] = path

    return RunReport(
        name=cfg.name,
        states=states,
        times=np.asarray(times),
        probe_times=np.asarray(probe_times),
        probe_values=probe_values,
        sif_rows=sif_rows,
        crack_history=crack_history,
        contact=contact,
        model=model,
        runtime=time.time() - t_start,
        files=files,
    )


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.15g}"
    return str(v)
