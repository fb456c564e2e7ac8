"""Command-line interface.

Exit codes: 0 success / benchmark PASS, 1 solver failure, 2 configuration
error, 3 benchmark FAIL.
"""

from __future__ import annotations

import sys

import click
import numpy as np
import yaml

from xthm.config import dump_config, load_config, parse_config
from xthm.errors import ConfigError, NonConvergenceError, XthmError


@click.group()
def main():
    """2D XFEM solver for thermo-hydro-mechanical analysis of cracked porous media."""


@main.command()
@click.argument("config_path", type=click.Path(exists=True))
@click.option("--outdir", "-o", default="out", show_default=True, help="Output directory.")
def run(config_path, outdir):
    """Run a study described by a YAML config file."""
    from xthm.runner import run_config

    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        for msg in exc.messages:
            click.echo(f"config error: {msg}", err=True)
        sys.exit(2)
    try:
        rep = run_config(cfg, outdir)
    except NonConvergenceError as exc:
        click.echo(f"solver failure: {exc}", err=True)
        sys.exit(1)
    except XthmError as exc:
        click.echo(f"run failed: {exc}", err=True)
        sys.exit(1)
    click.echo(f"run {rep.name}: {len(rep.states)} state(s), {rep.runtime:.1f} s")
    for kind, path in rep.files.items():
        click.echo(f"  {kind}: {path}")


@main.command()
@click.argument("name")
@click.option("--outdir", "-o", default="bench_out", show_default=True)
@click.option("--quick", is_flag=True, help="Reduced meshes for smoke runs.")
def benchmark(name, outdir, quick):
    """Run a named benchmark and report PASS/FAIL per criterion."""
    from xthm.benchmarks import run_benchmark

    try:
        rep = run_benchmark(name, outdir=outdir, quick=quick)
    except XthmError as exc:
        click.echo(str(exc), err=True)
        sys.exit(2 if isinstance(exc, ConfigError) or "unknown benchmark" in str(exc) else 1)
    click.echo(rep.summary())
    sys.exit(0 if rep.passed else 3)


@main.command("validate-config")
@click.argument("config_path", type=click.Path(exists=True))
def validate_config(config_path):
    """Validate a config file; lists every problem found."""
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        for msg in exc.messages:
            click.echo(f"error: {msg}", err=True)
        sys.exit(2)
    click.echo(f"config {cfg.name!r} is valid "
               f"({cfg.mesh.n_nodes} nodes, {cfg.mesh.n_elements} elements, fields {list(cfg.fields)})")
    click.echo(dump_config(cfg), nl=False)


@main.command("mesh-gen")
@click.option("--nx", type=int, required=True)
@click.option("--ny", type=int, required=True)
@click.option("--width", type=float, required=True)
@click.option("--height", type=float, required=True)
@click.option("--origin", nargs=2, type=float, default=(0.0, 0.0), show_default=True)
@click.option("--out", "-o", required=True, type=click.Path())
def mesh_gen(nx, ny, width, height, origin, out):
    """Generate a structured grid and write it in the text mesh format."""
    from xthm.mesh import build_structured_grid, write_mesh

    try:
        mesh = build_structured_grid(nx, ny, width, height, origin)
    except XthmError as exc:
        click.echo(str(exc), err=True)
        sys.exit(2)
    write_mesh(mesh, out)
    click.echo(f"wrote {mesh.n_nodes} nodes, {mesh.n_elements} elements to {out}")


@main.command()
@click.argument("config_path", type=click.Path(exists=True))
@click.option("--point", nargs=2, type=float, multiple=True, required=True, help="x y (repeatable)")
def probe(config_path, point):
    """Solve the (stationary) study and print field values at points."""
    from xthm.runner import make_settings, run_config

    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        click.echo(str(exc), err=True)
        sys.exit(2)
    try:
        rep = run_config(cfg, None)
    except NonConvergenceError as exc:
        click.echo(f"solver failure: {exc}", err=True)
        sys.exit(1)
    model, st = rep.model, rep.states[-1]
    f = model.sample_fields(st.X, list(point))
    click.echo("x,y,ux,uy,p,T")
    for i, (x, y) in enumerate(point):
        click.echo(
            f"{x:g},{y:g},{f['u'][i][0]:.9g},{f['u'][i][1]:.9g},{f['p'][i]:.9g},{f['T'][i]:.9g}"
        )


@main.command()
@click.argument("config_path", type=click.Path(exists=True))
@click.option("--crack", type=int, default=0, show_default=True)
@click.option("--tip", type=int, default=1, show_default=True)
def sif(config_path, crack, tip):
    """Solve the study and print per-tip SIF rows as CSV."""
    from xthm.runner import run_config
    from xthm.sif import hoop_growth_check, tip_sifs

    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        click.echo(str(exc), err=True)
        sys.exit(2)
    try:
        rep = run_config(cfg, None)
    except NonConvergenceError as exc:
        click.echo(f"solver failure: {exc}", err=True)
        sys.exit(1)
    click.echo("t,K_I,K_II,J,F_I,theta_c")
    try:
        if rep.sif_rows:
            for r in rep.sif_rows:
                if r["crack"] != crack or r["tip"] != tip:
                    continue
                click.echo(
                    f"{r['label']},{r['K_I']:.9g},{r['K_II']:.9g},{r['J']:.9g},"
                    f"{r.get('F_I', float('nan')):.9g},{r['theta_c']:.9g}"
                )
        else:
            for st in rep.states:
                s = tip_sifs(rep.model, st.X, crack, tip)
                th = hoop_growth_check(s.K_I, s.K_II, np.inf, 1e-3)[1]
                click.echo(f"{st.time},{s.K_I:.9g},{s.K_II:.9g},{s.J:.9g},nan,{th:.9g}")
    except XthmError as exc:
        click.echo(
            f"SIF extraction failed: {exc} (set sif.r1/r2 in the config for coarse meshes)",
            err=True,
        )
        sys.exit(1)


if __name__ == "__main__":
    main()
