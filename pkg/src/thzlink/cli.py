"""Batch command-line front-end: run scenarios, trace rays, sweep, post-process.

Outputs are plain tables meant for offline plotting. Every command is
deterministic: identical flags and input files give byte-identical output
files. Exit codes: 0 success, 1 runtime failure, 2 usage/config error.
"""

from __future__ import annotations

import math
import os
from dataclasses import replace

import click
import numpy as np

from . import engine as eng
from . import geometry as geo
from . import io_formats as iof

OUT_ROOT_ENV = "THZLINK_OUT_ROOT"

_AXES = ("beamwidth", "source_rate", "channel")


def _load(scenario_path) -> eng.ScenarioConfig:
    try:
        return iof.load_scenario(scenario_path)
    except iof.ScenarioError as exc:
        raise click.UsageError(str(exc))


def _override(cfg: eng.ScenarioConfig, channel=None, rate=None, beamwidth=None,
              seed=None) -> eng.ScenarioConfig:
    if channel is not None:
        try:
            cfg = replace(cfg, channel_type=eng.ChannelType(channel.upper()))
        except ValueError:
            raise click.UsageError(f"unknown channel type {channel!r}")
    if rate is not None:
        cfg = replace(cfg, source_rate_bps=float(rate))
    if beamwidth is not None:
        pattern = replace(cfg.rx_antenna.pattern, hpbw_deg=float(beamwidth))
        cfg = replace(cfg, rx_antenna=replace(cfg.rx_antenna, pattern=pattern))
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    return cfg


def _out_dir(option_value, default_leaf) -> str:
    if option_value:
        return option_value
    root = os.environ.get(OUT_ROOT_ENV, "runs")
    return os.path.join(root, default_leaf)


@click.group()
def main():
    """Indoor >100 GHz link simulator."""


@main.command("run")
@click.option("--scenario", required=True, type=str, help="Scenario config file.")
@click.option("--channel", default=None, help="Override channel type (LOS_BASELINE|FSC|HBC).")
@click.option("--rate", default=None, type=float, help="Override source rate [bit/s].")
@click.option("--beamwidth", default=None, type=float, help="Override RX HPBW [deg].")
@click.option("--seed", default=None, type=int, help="Override RNG seed.")
@click.option("--out-dir", default=None, type=str, help="Output directory.")
def cmd_run(scenario, channel, rate, beamwidth, seed, out_dir):
    """Run one scenario and write packets/power/throughput/summary tables."""
    cfg = _override(_load(scenario), channel, rate, beamwidth, seed)
    out = _out_dir(out_dir, "run")
    try:
        stats = eng.run(cfg)
        iof.write_run_outputs(stats, out)
    except Exception as exc:  # noqa: BLE001 - map to exit code 1
        raise click.ClickException(f"run failed: {exc}")
    click.echo(f"run complete: {out}")
    click.echo(f"mean_throughput_bps {eng.run_summary(stats)['mean_throughput_bps']:.6g}")


@main.command("raytrace")
@click.option("--scenario", required=True, type=str)
@click.option("--out-dir", default=None, type=str)
def cmd_raytrace(scenario, out_dir):
    """Trace rays along the scenario trajectory and export one ray file."""
    cfg = _load(scenario)
    out = _out_dir(out_dir, "raytrace")
    try:
        n_slots = int(math.ceil(cfg.duration_s / cfg.channel_update_interval_s - 1e-12))
        snapshots = []
        for i in range(n_slots):
            t0 = i * cfg.channel_update_interval_s
            tx = eng.position_at(cfg.tx_waypoints, cfg.speed_mps, t0)
            rx = eng.position_at(cfg.rx_waypoints, cfg.speed_mps, t0)
            snapshots.append(geo.trace(cfg.room, tx, rx, cfg.max_order,
                                       cfg.polarization,
                                       direct_penetration_db=cfg.penetration_db))
        os.makedirs(out, exist_ok=True)
        iof.export_rays(snapshots, os.path.join(out, "rays.txt"))
    except Exception as exc:  # noqa: BLE001
        raise click.ClickException(f"raytrace failed: {exc}")
    click.echo(f"ray file written: {os.path.join(out, 'rays.txt')}")


@main.command("sweep")
@click.option("--scenario", required=True, type=str)
@click.option("--axis", required=True, type=str, help="beamwidth | source_rate | channel")
@click.option("--values", required=True, type=str, help="Comma-separated sweep values.")
@click.option("--replicas", default=20, type=int, show_default=True)
@click.option("--seed", default=None, type=int, help="Override base seed.")
@click.option("--rate", default=None, type=float, help="Override source rate [bit/s].")
@click.option("--channel", default=None, help="Override channel type.")
@click.option("--out-dir", default=None, type=str)
def cmd_sweep(scenario, axis, values, replicas, seed, rate, channel, out_dir):
    """One run per (value, replica); aggregate throughput and latency."""
    if axis not in _AXES:
        raise click.UsageError(f"unknown axis {axis!r}; choose from {_AXES}")
    value_list = [v.strip() for v in values.split(",") if v.strip()]
    if not value_list:
        raise click.UsageError("sweep needs a non-empty value list")
    if replicas < 1:
        raise click.UsageError("replicas must be >= 1")
    base = _override(_load(scenario), channel=channel, rate=rate, seed=seed)
    out = _out_dir(out_dir, f"sweep_{axis}")
    rows = []
    try:
        for value in value_list:
            tps, p50s, p90s, p99s = [], [], [], []
            for rep in range(replicas):
                if axis == "beamwidth":
                    cfg = _override(base, beamwidth=float(value))
                elif axis == "source_rate":
                    cfg = _override(base, rate=float(value))
                else:
                    cfg = _override(base, channel=value)
                cfg = replace(cfg, seed=base.seed + rep)
                stats = eng.run(cfg)
                run_dir = os.path.join(out, f"{axis}_{value}", f"rep{rep}")
                iof.write_run_outputs(stats, run_dir)
                pct = stats.latency_percentiles((50.0, 90.0, 99.0))
                tps.append(stats.mean_throughput_bps)
                p50s.append(pct[50.0])
                p90s.append(pct[90.0])
                p99s.append(pct[99.0])
            tps = np.asarray(tps)
            ci = 1.96 * tps.std(ddof=1) / math.sqrt(len(tps)) if len(tps) > 1 else 0.0
            rows.append((value, float(tps.mean()), float(ci),
                         float(np.mean(p50s)), float(np.mean(p90s)), float(np.mean(p99s))))
        os.makedirs(out, exist_ok=True)
        iof.write_table(os.path.join(out, "sweep.tsv"),
                        ("value", "mean_throughput_bps", "throughput_ci95_bps",
                         "latency_p50_s", "latency_p90_s", "latency_p99_s"), rows)
    except click.ClickException:
        raise
    except Exception as exc:  # noqa: BLE001
        raise click.ClickException(f"sweep failed: {exc}")
    click.echo(f"sweep table written: {os.path.join(out, 'sweep.tsv')}")


@main.command("stats")
@click.option("--run-dir", required=True, type=str, help="Directory written by `run`.")
@click.option("--kind", required=True, type=click.Choice(["cdf", "aoa_hist", "power_trace"]))
@click.option("--bins", default=36, type=int, show_default=True, help="Bins for aoa_hist.")
@click.option("--out", "out_file", default=None, type=str, help="Output table path.")
def cmd_stats(run_dir, kind, bins, out_file):
    """Figure-ready tables from run outputs."""
    trace_path = os.path.join(run_dir, "power_trace.tsv")
    if not os.path.exists(trace_path):
        raise click.ClickException(f"missing input file: {trace_path}")
    trace = iof.read_table(trace_path)
    if kind == "cdf":
        values, probs = eng.ecdf(trace[:, 1])
        header, rows = ("rx_dbm", "cdf"), zip(values, probs)
    elif kind == "aoa_hist":
        if bins < 4:
            raise click.UsageError("aoa_hist needs bins >= 4")
        rel = (trace[:, 2] + 180.0) % 360.0 - 180.0
        counts, edges = np.histogram(rel, bins=bins, range=(-180.0, 180.0))
        centers = 0.5 * (edges[:-1] + edges[1:])
        header, rows = ("aoa_deg", "fraction"), zip(centers, counts / counts.sum())
    else:
        header, rows = ("t", "rx_dbm", "los_flag"), \
            ((r[0], r[1], int(r[3])) for r in trace)
    out_path = out_file or os.path.join(run_dir, f"{kind}.tsv")
    iof.write_table(out_path, header, rows)
    click.echo(f"stats table written: {out_path}")


if __name__ == "__main__":
    main()
