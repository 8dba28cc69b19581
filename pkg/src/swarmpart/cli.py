"""Command-line front end.

One subcommand per experiment: partition, evaluate, pdf, fill, scree,
density, duals, bench, pso. Parameters come from an optional JSON config
file (strict schema, versioned) with command-line flags taking precedence.
All randomness derives from one master seed, so rerunning a command with the
same inputs overwrites its outputs byte-identically. SWARMPART_THREADS caps
the process fan-out used by trial-heavy commands.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import fields
from pathlib import Path

import click
import numpy as np

from . import io as sio
from .cvt import CvtConfig
from .environment import Environment, environment_from_dict
from .evaluation import (
    METHODS,
    MethodConfigs,
    area_fill_cdf,
    dual_degree_histogram,
    evaluate_points,
    modal_degree,
    pca_scree,
    pdf_symmetry_score,
    placement_pdf,
    timing_benchmark,
    window_density_test,
)
from .partitioner import PartitionConfig, run
from .pso import PsoConfig, experiment_grid
from .seeding import child_seed

SCHEMA_VERSION = 1

_SECTION_KEYS = {
    "environment": {"domain", "obstacles", "regions"},
    "partition": {
        "algorithm",
        "agents",
        "tolerance_converge",
        "tolerance_normalization",
        "max_iters",
        "expand_by",
        "stall_sweeps",
    },
    "cvt": {"generators", "lloyd_iters", "samples_per_iter"},
    "evaluation": {
        "method",
        "trials",
        "bins",
        "windows",
        "window_area",
        "window_shape",
        "grid_resolution",
        "executions",
        "fill_trials",
        "bench_iters",
        "bench_dims",
        "bench_agents",
    },
    "pso": {
        "particles",
        "max_iters",
        "inertia",
        "cognitive",
        "social",
        "success_tolerance",
        "repeats",
        "methods",
        "functions",
    },
}
_TOP_KEYS = {"schema_version", "seed", "output_dir"} | set(_SECTION_KEYS)


def load_config(path: str | None) -> dict:
    """Load and validate the JSON experiment config (unknown keys rejected)."""
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    unknown = set(cfg) - _TOP_KEYS
    if unknown:
        raise click.ClickException(f"unknown config keys: {sorted(unknown)}")
    version = cfg.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise click.ClickException(f"unsupported schema_version: {version}")
    for section, keys in _SECTION_KEYS.items():
        if section == "environment":
            continue
        extra = set(cfg.get(section, {})) - keys
        if extra:
            raise click.ClickException(f"unknown {section} keys: {sorted(extra)}")
    return cfg


def _environment(cfg: dict) -> Environment:
    try:
        return environment_from_dict(cfg.get("environment", {}))
    except ValueError as exc:
        raise click.ClickException(str(exc))


def _filtered(config_cls, section: dict, overrides: dict):
    merged = dict(section)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    allowed = {f.name for f in fields(config_cls)}
    try:
        return config_cls(**{k: v for k, v in merged.items() if k in allowed})
    except ValueError as exc:
        raise click.ClickException(str(exc))


def _partition_config(cfg: dict, **overrides) -> PartitionConfig:
    return _filtered(PartitionConfig, cfg.get("partition", {}), overrides)


def _cvt_config(cfg: dict, **overrides) -> CvtConfig:
    return _filtered(CvtConfig, cfg.get("cvt", {}), overrides)


def _pso_config(cfg: dict, **overrides) -> PsoConfig:
    section = {
        k: v
        for k, v in cfg.get("pso", {}).items()
        if k not in ("repeats", "methods", "functions")
    }
    return _filtered(PsoConfig, section, overrides)


def _outdir(cfg: dict, flag: str | None) -> Path:
    out = Path(flag or cfg.get("output_dir", "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _seed(cfg: dict, flag: int | None) -> int:
    return flag if flag is not None else int(cfg.get("seed", 0))


def _workers(flag: int | None) -> int:
    cap = int(os.environ.get("SWARMPART_THREADS", "1"))
    return max(1, min(flag if flag is not None else 1, cap))


def _eval_section(cfg: dict) -> dict:
    return cfg.get("evaluation", {})


def _read_points(path: str):
    try:
        return sio.read_points_csv(path)
    except (OSError, ValueError) as exc:
        raise click.ClickException(str(exc))


@click.group()
@click.version_option(package_name="swarmpart")
def main():
    """Repulsive-agent spatial partitioning toolkit."""


config_opt = click.option(
    "--config", "config_path", type=click.Path(exists=True), default=None,
    help="JSON experiment config file.",
)
out_opt = click.option(
    "--out", "out_flag", default=None,
    help="Output directory (default: config output_dir or ./out).",
)
seed_opt = click.option("--seed", type=int, default=None, help="Master seed override.")
points_opt = click.option(
    "--points", "points_path", type=click.Path(exists=True), required=True,
    help="Point-set CSV (header d0,d1,...).",
)
method_opt = click.option(
    "--method", type=click.Choice(list(METHODS)), default=None,
    help="Placement method.",
)


@main.command()
@config_opt
@out_opt
@seed_opt
@click.option("--algo", "algorithm", type=click.Choice(["rao", "onnrao"]), default=None)
@click.option("--agents", type=int, default=None)
@click.option("--max-iters", "max_iters", type=int, default=None)
@click.option("--tol-converge", "tolerance_converge", type=float, default=None)
@click.option("--tol-norm", "tolerance_normalization", type=float, default=None)
@click.option("--expand-by", "expand_by", type=float, default=None)
def partition(config_path, out_flag, seed, algorithm, agents, max_iters,
              tolerance_converge, tolerance_normalization, expand_by):
    """Run one partitioning and write points.csv plus result.json."""
    cfg = load_config(config_path)
    env = _environment(cfg)
    pconf = _partition_config(
        cfg,
        algorithm=algorithm,
        agents=agents,
        max_iters=max_iters,
        tolerance_converge=tolerance_converge,
        tolerance_normalization=tolerance_normalization,
        expand_by=expand_by,
        seed=_seed(cfg, seed),
    )
    try:
        result = run(pconf, env)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    out = _outdir(cfg, out_flag)
    sio.write_points_csv(out / "points.csv", result.points)
    sio.write_json(out / "result.json", sio.result_payload(result))
    click.echo(f"wrote {out / 'points.csv'}")
    click.echo(f"wrote {out / 'result.json'}")


@main.command()
@config_opt
@out_opt
@seed_opt
@points_opt
def evaluate(config_path, out_flag, seed, points_path):
    """Full statistics report for a stored point set."""
    cfg = load_config(config_path)
    env = _environment(cfg)
    points = _read_points(points_path)
    section = _eval_section(cfg)
    try:
        report = evaluate_points(
            points,
            env,
            n_windows=section.get("windows", 10_000),
            window_area=section.get("window_area"),
            window_shape=section.get("window_shape", "square"),
            grid_resolution=section.get("grid_resolution", 1000),
            seed=_seed(cfg, seed),
        )
    except ValueError as exc:
        raise click.ClickException(str(exc))
    out = _outdir(cfg, out_flag)
    sio.write_json(out / "report.json", sio.report_payload(report))
    click.echo(f"wrote {out / 'report.json'}")


@main.command()
@config_opt
@out_opt
@seed_opt
@method_opt
@click.option("--agents", type=int, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--workers", type=int, default=None, help="Process fan-out (capped by SWARMPART_THREADS).")
def pdf(config_path, out_flag, seed, method, agents, trials, workers):
    """Placement-probability heatmap over repeated seeded runs."""
    cfg = load_config(config_path)
    env = _environment(cfg)
    section = _eval_section(cfg)
    method = method or section.get("method", "onnrao")
    agents = agents or section.get("trials_agents", None) or _partition_config(cfg).agents
    trials = trials or section.get("trials", 1000)
    configs = MethodConfigs(partition=_partition_config(cfg), cvt=_cvt_config(cfg))
    heatmap = placement_pdf(
        method,
        agents,
        trials,
        env,
        configs,
        seed=_seed(cfg, seed),
        bins=section.get("bins", 100),
        workers=_workers(workers),
    )
    out = _outdir(cfg, out_flag)
    sio.write_heatmap_csv(out / f"pdf_{method}.csv", heatmap)
    payload = sio.heatmap_payload(heatmap, method)
    payload["symmetry_score"] = pdf_symmetry_score(heatmap)
    sio.write_json(out / f"pdf_{method}.json", payload)
    click.echo(f"wrote {out / f'pdf_{method}.csv'}")
    click.echo(f"wrote {out / f'pdf_{method}.json'}")


@main.command()
@config_opt
@out_opt
@seed_opt
@method_opt
@click.option("--agents", type=int, default=None)
@click.option("--executions", type=int, default=None)
@click.option("--trials", type=int, default=None, help="Outer trials for the 2-sigma band.")
def fill(config_path, out_flag, seed, method, agents, executions, trials):
    """Cumulative area-fill curve versus repeated executions."""
    cfg = load_config(config_path)
    env = _environment(cfg)
    section = _eval_section(cfg)
    method = method or section.get("method", "onnrao")
    agents = agents or _partition_config(cfg).agents
    configs = MethodConfigs(partition=_partition_config(cfg), cvt=_cvt_config(cfg))
    curve = area_fill_cdf(
        method,
        agents,
        env,
        configs,
        max_executions=executions or section.get("executions", 50),
        outer_trials=trials or section.get("fill_trials", 30),
        seed=_seed(cfg, seed),
        bins=section.get("bins", 100),
    )
    out = _outdir(cfg, out_flag)
    sio.write_fill_csv(out / f"fill_{method}.csv", curve)
    sio.write_json(
        out / f"fill_{method}.json",
        {
            "method": method,
            "executions": int(curve.executions[-1]),
            "trials": curve.trials,
            "final_mean_fraction": float(curve.mean_fraction[-1]),
        },
    )
    click.echo(f"wrote {out / f'fill_{method}.csv'}")
    click.echo(f"wrote {out / f'fill_{method}.json'}")


@main.command()
@config_opt
@out_opt
@points_opt
def scree(config_path, out_flag, points_path):
    """Covariance eigenvalue fractions of a stored point set."""
    cfg = load_config(config_path)
    points = _read_points(points_path)
    try:
        ratios = pca_scree(points)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    out = _outdir(cfg, out_flag)
    sio.write_json(out / "scree.json", {"ratios": [float(r) for r in ratios]})
    click.echo(f"wrote {out / 'scree.json'}")


@main.command()
@config_opt
@out_opt
@seed_opt
@points_opt
@click.option("--windows", type=int, default=None)
@click.option("--area", "window_area", type=float, default=None)
@click.option("--shape", type=click.Choice(["square", "circle"]), default=None)
def density(config_path, out_flag, seed, points_path, windows, window_area, shape):
    """Random-window density test on a stored point set."""
    cfg = load_config(config_path)
    env = _environment(cfg)
    section = _eval_section(cfg)
    points = _read_points(points_path)
    try:
        mean, variance = window_density_test(
            points,
            env,
            n_windows=windows or section.get("windows", 10_000),
            window_area=window_area if window_area is not None else section.get("window_area"),
            shape=shape or section.get("window_shape", "square"),
            rng=np.random.default_rng(child_seed(_seed(cfg, seed), "density")),
        )
    except ValueError as exc:
        raise click.ClickException(str(exc))
    out = _outdir(cfg, out_flag)
    sio.write_json(out / "density.json", {"mean": mean, "variance": variance})
    click.echo(f"wrote {out / 'density.json'}")


@main.command()
@config_opt
@out_opt
@points_opt
@click.option("--resolution", type=int, default=None)
def duals(config_path, out_flag, points_path, resolution):
    """Voronoi-dual degree histogram of a stored 2-D point set."""
    cfg = load_config(config_path)
    env = _environment(cfg)
    section = _eval_section(cfg)
    points = _read_points(points_path)
    try:
        hist = dual_degree_histogram(
            points, env, resolution or section.get("grid_resolution", 1000)
        )
        interior = dual_degree_histogram(
            points, env, resolution or section.get("grid_resolution", 1000),
            interior_only=True,
        )
    except ValueError as exc:
        raise click.ClickException(str(exc))
    out = _outdir(cfg, out_flag)
    payload = {
        "degrees": {str(k): v for k, v in sorted(hist.items())},
        "modal_degree": modal_degree(hist) if hist else None,
        "interior_degrees": {str(k): v for k, v in sorted(interior.items())},
        "interior_modal_degree": modal_degree(interior) if interior else None,
    }
    sio.write_json(out / "duals.json", payload)
    click.echo(f"wrote {out / 'duals.json'}")


@main.command()
@config_opt
@out_opt
@seed_opt
@click.option("--iters", type=int, default=None)
def bench(config_path, out_flag, seed, iters):
    """Per-iteration timing grid over algorithms, dimensions and counts."""
    cfg = load_config(config_path)
    section = _eval_section(cfg)
    rows = timing_benchmark(
        dims=tuple(section.get("bench_dims", (2, 3, 4, 5))),
        agent_counts=tuple(section.get("bench_agents", (5, 10, 25, 50, 75))),
        iters=iters or section.get("bench_iters", 1000),
        seed=_seed(cfg, seed),
    )
    out = _outdir(cfg, out_flag)
    sio.write_bench_csv(out / "bench.csv", rows)
    click.echo(f"wrote {out / 'bench.csv'}")


@main.command()
@config_opt
@out_opt
@seed_opt
@click.option("--methods", default=None, help="Comma-separated placement methods.")
@click.option("--functions", default=None, help="Comma-separated test functions.")
@click.option("--repeats", type=int, default=None)
@click.option("--particles", type=int, default=None)
@click.option("--iters", "max_iters", type=int, default=None)
def pso(config_path, out_flag, seed, methods, functions, repeats, particles, max_iters):
    """Seeded-start PSO experiment grid; summary CSV plus JSON bundle."""
    cfg = load_config(config_path)
    section = cfg.get("pso", {})
    method_list = [m for m in (methods.split(",") if methods else section.get("methods", list(METHODS))) if m]
    function_list = [f for f in (functions.split(",") if functions else section.get("functions", ["rosenbrock", "griewank", "schwefel"])) if f]
    if not method_list:
        raise click.UsageError("no placement methods given")
    if not function_list:
        raise click.UsageError("no test functions given")
    pso_cfg = _pso_config(cfg, particles=particles, max_iters=max_iters)
    master = _seed(cfg, seed)
    try:
        summaries = experiment_grid(
            method_list,
            function_list,
            repeats or section.get("repeats", 1000),
            pso_cfg,
            seed=master,
            partition_config=_partition_config(cfg),
            cvt_config=_cvt_config(cfg),
            keep_runs=True,
        )
    except ValueError as exc:
        raise click.ClickException(str(exc))
    out = _outdir(cfg, out_flag)
    header = ["method", "function", "epsilon", "success_rate", "relative_nfe", "efficiency", "repeats", "seed"]
    csv_path = out / "pso_summary.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for s in summaries:
            writer.writerow(
                [s.method, s.function, format(s.epsilon, ".17g"), s.success_rate,
                 s.relative_nfe, s.efficiency, s.repeats, s.seed]
            )
    # methods-by-functions pivot of the average absolute errors
    eps = {(s.method, s.function): s.epsilon for s in summaries}
    matrix_path = out / "pso_epsilon_matrix.csv"
    with matrix_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method"] + function_list)
        for m in method_list:
            writer.writerow([m] + [format(eps[(m, fn)], ".17g") for fn in function_list])
    bundle = {
        "pso_config": {
            "particles": pso_cfg.particles,
            "max_iters": pso_cfg.max_iters,
            "inertia": pso_cfg.inertia,
            "cognitive": pso_cfg.cognitive,
            "social": pso_cfg.social,
            "success_tolerance": pso_cfg.success_tolerance,
        },
        "seed": master,
        "summaries": [
            {
                "method": s.method,
                "function": s.function,
                "epsilon": s.epsilon,
                "success_rate": s.success_rate,
                "mean_nfe": s.mean_nfe,
                "relative_nfe": s.relative_nfe,
                "efficiency": s.efficiency,
                "repeats": s.repeats,
                "runs": s.runs,
            }
            for s in summaries
        ],
    }
    sio.write_json(out / "pso.json", bundle)
    click.echo(f"wrote {csv_path}")
    click.echo(f"wrote {matrix_path}")
    click.echo(f"wrote {out / 'pso.json'}")


if __name__ == "__main__":
    main()
