"""Command-line interface: figure sweeps and closed-form validation.

All internals work in linear power units; decibels are converted exactly once
at this boundary.
"""

from __future__ import annotations

import json
import sys

import click

from .experiments import (
    ConfigError,
    load_config,
    run_sweep_ratio,
    run_sweep_relays,
    run_sweep_snr,
    run_validate,
    write_csv,
)


def _common_options(f):
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     default=None, help="JSON config file; flags override it."),
        click.option("--slots", type=int, default=None, help="Slots per Monte Carlo run."),
        click.option("--seed", type=int, default=None, help="Root random seed."),
        click.option("--out", type=click.Path(dir_okay=False), default=None,
                     help="Output file path."),
        click.option("--evaluator", type=click.Choice(["mc", "analytic", "both"]),
                     default=None, help="Throughput evaluator(s) to run."),
        click.option("--scheme", "schemes", multiple=True,
                     type=click.Choice(["ifd-mrrs", "max-link-ratio", "max-min-ratio"]),
                     help="Restrict to these schemes (repeatable)."),
        click.option("--workers", type=int, default=1, show_default=True,
                     help="Worker processes for sweep points."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _load(config_path, slots, seed, evaluator, schemes):
    try:
        return load_config(
            config_path,
            slots=slots,
            seed=seed,
            evaluator=evaluator,
            schemes=list(schemes) if schemes else None,
        )
    except (ConfigError, ValueError) as exc:
        raise click.ClickException(str(exc)) from None


def _run_sweep(runner, command, default_out, config_path, slots, seed, out,
               evaluator, schemes, workers):
    config = _load(config_path, slots, seed, evaluator, schemes)
    try:
        columns, rows = runner(config, workers=workers)
    except (ConfigError, ValueError) as exc:
        raise click.ClickException(str(exc)) from None
    path = out or default_out
    write_csv(path, command, config, columns, rows)
    click.echo(f"wrote {len(rows)} rows to {path}")


@click.group()
@click.version_option(package_name="relaysec")
def main():
    """Secrecy-throughput experiments for buffer-aided relay selection."""


@main.command("sweep-ratio")
@_common_options
def sweep_ratio(config_path, slots, seed, out, evaluator, schemes, workers):
    """Throughput versus source/relay power ratio at fixed total power."""
    _run_sweep(run_sweep_ratio, "sweep-ratio", "sweep_ratio.csv",
               config_path, slots, seed, out, evaluator, schemes, workers)


@main.command("sweep-snr")
@_common_options
def sweep_snr(config_path, slots, seed, out, evaluator, schemes, workers):
    """Optimized throughput versus the total-power budget in dB."""
    _run_sweep(run_sweep_snr, "sweep-snr", "sweep_snr.csv",
               config_path, slots, seed, out, evaluator, schemes, workers)


@main.command("sweep-relays")
@_common_options
def sweep_relays(config_path, slots, seed, out, evaluator, schemes, workers):
    """Optimized throughput versus the number of relays."""
    _run_sweep(run_sweep_relays, "sweep-relays", "sweep_relays.csv",
               config_path, slots, seed, out, evaluator, schemes, workers)


@main.command("validate")
@_common_options
def validate(config_path, slots, seed, out, evaluator, schemes, workers):
    """Check every closed form against its Monte Carlo oracle.

    Exits nonzero if any quantity misses its tolerance.
    """
    del workers  # validation is a single work item
    config = _load(config_path, slots, seed, evaluator, schemes)
    try:
        report = run_validate(config)
    except (ConfigError, ValueError) as exc:
        raise click.ClickException(str(exc)) from None
    path = out or "validate_report.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        click.echo(
            f"{status} {check['quantity']}: analytic={check['analytic']} "
            f"mc={check['mc']} tol={check['tolerance']}"
        )
    click.echo(f"report written to {path}")
    if not report["all_pass"]:
        sys.exit(1)


if __name__ == "__main__":
    main()
