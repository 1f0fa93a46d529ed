"""Command-line front end.

Exit codes: 0 success, 1 analysis findings (with --fail-on-special),
2 input/usage errors.  Output is byte-deterministic for identical inputs and
seed; wall-clock timings appear only behind --timings.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path
from typing import Optional

import click

from . import caseio
from .fixtures import FIXTURES, get_fixture
from .model import NetworkError, PowerNetwork, validate
from .netflow import Infeasible, build_flow, cut_transfer
from .feasibility import ft_edge, ft_sweep
from .oracles import (
    IslandingError,
    dc_post_contingency_overloads,
    enumerate_cuts,
)
from .session import SessionError, run_scenario
from .units import to_mw


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _load(case: str) -> PowerNetwork:
    """Resolve a case argument: named fixture or file path."""
    if case in FIXTURES:
        return get_fixture(case)
    p = Path(case)
    if not p.exists():
        raise click.ClickException(
            f"no such case file or fixture {case!r} "
            f"(fixtures: {', '.join(sorted(FIXTURES))})"
        )
    return caseio.load_case(p)


def _default_seed() -> Optional[int]:
    env = os.environ.get("GRIDCUTS_SEED")
    return int(env) if env else None


class _Cli(click.Group):
    def main(self, *args, **kwargs):
        kwargs.setdefault("standalone_mode", False)
        try:
            return super().main(*args, **kwargs)
        except click.ClickException as exc:
            exc.show()
            sys.exit(2)
        except click.Abort:
            sys.exit(2)
        except (NetworkError, caseio.ParseError, Infeasible, SessionError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)


@click.group(cls=_Cli)
@click.version_option(package_name="gridcuts")
def main() -> None:
    """Cut-saturation screening for meshed transmission networks."""


@main.command("validate")
@click.argument("case")
def validate_cmd(case: str) -> None:
    """Check a case for balance, connectivity, and completeness."""
    network = _load(case)
    report = validate(network)
    for issue in report.issues:
        click.echo(f"{issue.severity}: [{issue.code}] {issue.message}")
    click.echo(
        f"{network.name}: {len(network.buses)} buses, "
        f"{len(network.live_branches())} in-service branches, "
        f"{_fmt(network.total_gen_mw())} MW generation, "
        f"{_fmt(network.total_load_mw())} MW load"
    )
    if not report.ok:
        sys.exit(2)
    click.echo("ok")


@main.command("flow")
@click.argument("case")
@click.option("--seed", type=int, default=None, help="Seeded source/sink ordering.")
@click.option("--deterministic", is_flag=True, help="Force lowest-id ordering.")
def flow_cmd(case: str, seed: Optional[int], deterministic: bool) -> None:
    """Build a network flow solution and print branch loadings."""
    network = _load(case)
    if seed is None and not deterministic:
        seed = _default_seed()
    state = build_flow(
        network,
        ordering="deterministic" if seed is None else "seeded",
        seed=seed,
    )
    click.echo(f"# flow solution for {network.name}"
               + (f" (seed {seed})" if seed is not None else " (deterministic)"))
    for bid in state.live_branch_ids():
        br = network.branch_map[bid]
        click.echo(
            f"{bid} {br.from_bus}->{br.to_bus} flow={_fmt(state.flow_mw(bid))}"
            f" rating={_fmt(br.rating_mw)}"
        )


@main.command("ft")
@click.argument("case")
@click.option("--branch", "branch_id", default=None, help="Test a single branch.")
@click.option("--all", "all_branches", is_flag=True, help="Test every loaded branch.")
@click.option("--seed", type=int, default=None)
@click.option(
    "--oracle",
    is_flag=True,
    help="Cross-check margins against exhaustive cut enumeration (<=16 buses) "
    "and flag divergences from the linearized physical dispatch model.",
)
@click.option("--fail-on-special", is_flag=True, help="Exit 1 if any special asset found.")
def ft_cmd(
    case: str,
    branch_id: Optional[str],
    all_branches: bool,
    seed: Optional[int],
    oracle: bool,
    fail_on_special: bool,
) -> None:
    """Feasibility-test branches for post-outage cut saturation."""
    if branch_id is None and not all_branches:
        all_branches = True
    network = _load(case)
    if seed is None:
        seed = _default_seed()
    state = build_flow(
        network,
        ordering="deterministic" if seed is None else "seeded",
        seed=seed,
    )
    if branch_id is not None:
        if branch_id not in network.branch_map:
            raise click.ClickException(f"unknown branch {branch_id!r}")
        results = [ft_edge(network, state, branch_id)]
    else:
        results = ft_sweep(network, state)
    any_special = False
    for r in results:
        tag = "SPECIAL" if r.special else ("radial" if r.radial else "ok")
        any_special |= r.special
        click.echo(
            f"{r.branch}: flow={_fmt(r.flow_mw)} reroute_capacity={_fmt(r.tc_mw)} "
            f"margin={_fmt(r.margin_mw)} [{tag}]"
            + (f" kcrit={{{','.join(sorted(r.kcrit))}}}" if r.special else "")
        )
        if oracle:
            if len(network.buses) <= 16:
                enum = enumerate_cuts(network, state, r.branch)
                em = to_mw(enum.min_margin_units())
                agree = abs(em - r.margin_mw) < 1e-9
                click.echo(
                    f"  oracle cut-enumeration margin={_fmt(em)} "
                    f"{'agrees' if agree else 'DISAGREES'}"
                )
            try:
                overloads = dc_post_contingency_overloads(network, None, r.branch)
            except (IslandingError, NetworkError):
                overloads = None
            if overloads:
                flagged = ", ".join(f"{b} (+{_fmt(o)} MW)" for b, o in overloads)
                click.echo(f"  physical-dispatch overloads after outage: {flagged}")
                if not r.special:
                    click.echo(
                        "  note: cut-based test passes but the impedance-weighted "
                        "dispatch overloads individual branches"
                    )
    if fail_on_special and any_special:
        sys.exit(1)


@main.command("scenario")
@click.argument("scenario_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--no-shortlist", is_flag=True, help="Re-test every branch after each event.")
@click.option("--report", "report_format", type=click.Choice(["json", "csv", "table"]), default="table")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@click.option("--timings", is_flag=True, help="Include wall-clock columns (breaks byte determinism).")
@click.option("--figures", is_flag=True, help="Render margin/timing charts next to the report.")
@click.option("--fail-on-special", is_flag=True)
def scenario_cmd(
    scenario_file: str,
    no_shortlist: bool,
    report_format: str,
    out_path: Optional[str],
    timings: bool,
    figures: bool,
    fail_on_special: bool,
) -> None:
    """Play an event sequence and report new special assets per event."""
    scen = caseio.load_scenario(scenario_file)
    network = caseio.load_case(scen.resolve_case(scenario_file))
    session, rows = run_scenario(network, scen, use_shortlist=not no_shortlist)
    payload = caseio.write_report(rows, format=report_format, timings=timings)
    if out_path:
        Path(out_path).write_bytes(payload)
        click.echo(f"report written to {out_path}")
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    if figures:
        base = Path(out_path) if out_path else Path(f"{scen.name}-report")
        from .figures import render_margin_figure, render_timing_figure

        m = render_margin_figure(rows, base.with_suffix(".margins.png"))
        t = render_timing_figure(rows, base.with_suffix(".timings.png"))
        click.echo(f"figures written to {m} and {t}")
    if fail_on_special and session.specials():
        sys.exit(1)


@main.command("serve")
@click.argument("case", required=False, default=None)
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
def serve_cmd(case: Optional[str], port: int, host: str) -> None:
    """Serve the HTTP API for the operator UI."""
    import uvicorn

    from .service import create_app

    preload = _load(case) if case else None
    app = create_app(preload)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
