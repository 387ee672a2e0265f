"""Command-line front end.

Two commands: ``run`` plans a mission from a catalog and a config and
writes the report plus plot data, ``check`` validates a catalog and
prints per-row precession rates.  Exit codes: 0 success, 2 input
error, 3 infeasible mission, 4 finished without convergence.
"""

from __future__ import annotations

from dataclasses import replace

import click

from .bnb import BRANCH_RULES, STRATEGIES
from .catalog import parse_catalog, validate_catalog
from .config import load_config
from .errors import CatalogError, ConfigError, InfeasibleMission
from .orbital import precession_rate
from .planner import plan
from .report import write_outputs
from .units import DAY, rad_to_deg

EXIT_INPUT_ERROR = 2
EXIT_INFEASIBLE = 3
EXIT_NOT_CONVERGED = 4


@click.group()
def main() -> None:
    """Plan multi-debris collection missions on drift orbits."""


@main.command()
@click.argument("catalog_path", type=click.Path(dir_okay=False))
@click.argument("config_path", type=click.Path(dir_okay=False))
@click.option("--out", "out_dir", required=True,
              type=click.Path(file_okay=False),
              help="Directory for the report and plot data.")
@click.option("--strategy", type=click.Choice(STRATEGIES), default=None,
              help="Override the configured tree-search strategy.")
@click.option("--branch-rule", type=click.Choice(BRANCH_RULES), default=None,
              help="Override the configured branching rule.")
@click.option("--verbose", is_flag=True, help="Print the iteration trace.")
def run(catalog_path: str, config_path: str, out_dir: str,
        strategy: str | None, branch_rule: str | None,
        verbose: bool) -> None:
    """Plan a mission for CATALOG_PATH under CONFIG_PATH."""
    try:
        catalog = parse_catalog(catalog_path)
        cfg = load_config(config_path)
    except (CatalogError, ConfigError) as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(EXIT_INPUT_ERROR)
    if cfg.n_select > len(catalog):
        click.echo(f"error: n_select={cfg.n_select} exceeds the "
                   f"{len(catalog)}-debris catalog", err=True)
        raise SystemExit(EXIT_INPUT_ERROR)
    search = cfg.search
    if strategy is not None:
        search = replace(search, strategy=strategy)
    if branch_rule is not None:
        search = replace(search, branch_rule=branch_rule)

    try:
        mission = plan(catalog.elements(), cfg.n_select, cfg.planner,
                       search, start=cfg.start)
    except InfeasibleMission as exc:
        click.echo(f"infeasible: {exc}", err=True)
        raise SystemExit(EXIT_INFEASIBLE)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(EXIT_INPUT_ERROR)

    paths = write_outputs(mission, catalog, out_dir)
    if verbose:
        for r in mission.iterations:
            click.echo(
                f"it {r.index:2d}  width {r.half_width_km:7.3f} km  "
                f"model {r.model_objective:8.3f}  exact {r.exact_dv:8.3f}  "
                f"{r.exact_duration_days:7.2f} d  nodes {r.nodes}")
        for p in paths:
            click.echo(f"wrote {p}")
    click.echo(f"path {' -> '.join(str(p) for p in mission.path)}  "
               f"dv {mission.total_dv:.1f} m/s  "
               f"duration {mission.duration_days:.1f} d  "
               f"({mission.n_iterations} iterations, "
               f"{'converged' if mission.converged else 'not converged'})")
    if not mission.converged:
        raise SystemExit(EXIT_NOT_CONVERGED)


@main.command()
@click.argument("catalog_path", type=click.Path(dir_okay=False))
def check(catalog_path: str) -> None:
    """Validate CATALOG_PATH and print per-row precession rates."""
    try:
        epoch, results = validate_catalog(catalog_path)
    except CatalogError as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(EXIT_INPUT_ERROR)
    click.echo(f"epoch: {epoch or '(unspecified)'}")
    click.echo("  id     a_km       e     i_deg  raan_deg  rate_deg_day")
    bad = 0
    for no, status, payload in results:
        if status != "ok":
            bad += 1
            click.echo(f"line {no}: {payload}")
            continue
        debris_id, row = payload
        rate = rad_to_deg(precession_rate(row.elements())) * DAY
        click.echo(f"{debris_id:4d}  {row.a_km:9.3f}  {row.e:6.4f}  "
                   f"{row.i_deg:8.3f}  {row.raan_deg:8.3f}  {rate:12.4f}")
    click.echo(f"{len(results) - bad} valid, {bad} invalid")
    if bad or not results:
        raise SystemExit(EXIT_INPUT_ERROR)


if __name__ == "__main__":
    main()
