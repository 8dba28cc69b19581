"""File formats: point-set CSV, result/report JSON, heatmap and table CSV.

CSV is RFC-4180 (CRLF, header row, '.' decimal); floats carry 17 significant
digits so point sets round-trip exactly. JSON is UTF-8 with sorted keys, so
rerunning a seeded experiment overwrites outputs byte-identically.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .evaluation import BenchRow, EvalReport, FillCurve, Heatmap
from .geometry import PointSet
from .partitioner import PartitionResult


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_points_csv(path, points: PointSet) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"d{i}" for i in range(points.dims)])
        for col in points.coords.T:
            writer.writerow([_fmt(v) for v in col])


def read_points_csv(path) -> PointSet:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or not header[0].startswith("d"):
            raise ValueError(f"{path}: expected a d0,d1,... header row")
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: no points")
    return PointSet(np.asarray(rows).T)


def write_json(path, payload) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def result_payload(result: PartitionResult) -> dict:
    cfg = result.config
    return {
        "points": [[float(v) for v in col] for col in result.points.coords.T],
        "iterations_used": result.iterations_used,
        "converged": result.converged,
        "diff_trace": [float(v) for v in result.diff_trace],
        "ssd_trace": [float(v) for v in result.ssd_trace],
        "mean_expand_final": result.mean_expand_final,
        "init_sweeps": result.init_sweeps,
        "config": {
            "algorithm": cfg.algorithm,
            "agents": cfg.agents,
            "tolerance_converge": cfg.tolerance_converge,
            "tolerance_normalization": cfg.tolerance_normalization,
            "max_iters": cfg.max_iters,
            "expand_by": cfg.expand_by,
            "seed": cfg.seed,
            "stall_sweeps": cfg.stall_sweeps,
        },
        "seed": cfg.seed,
    }


def write_heatmap_csv(path, heatmap: Heatmap) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for row in heatmap.bins:
            writer.writerow([_fmt(v) for v in row])


def heatmap_payload(heatmap: Heatmap, method: str) -> dict:
    return {
        "method": method,
        "bins": heatmap.bins.shape[0],
        "trials": heatmap.trials,
        "agents_per_trial": heatmap.agents_per_trial,
        "max_bin": float(heatmap.bins.max()),
    }


def write_fill_csv(path, curve: FillCurve) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["executions", "mean_fraction", "lower_2sigma", "upper_2sigma"])
        for i in range(len(curve.executions)):
            writer.writerow(
                [
                    int(curve.executions[i]),
                    _fmt(curve.mean_fraction[i]),
                    _fmt(curve.lower[i]),
                    _fmt(curve.upper[i]),
                ]
            )


def write_bench_csv(path, rows: list[BenchRow]) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "dims", "agents", "seconds_per_iteration"])
        for row in rows:
            writer.writerow([row.algorithm, row.dims, row.agents, _fmt(row.seconds_per_iteration)])


def report_payload(report: EvalReport) -> dict:
    return {
        "nn_cv": report.nn_cv,
        "next_nn_cv": report.next_nn_cv,
        "density_mean": report.density_mean,
        "density_variance": report.density_variance,
        "scree": report.scree,
        "dual_degree_hist": {str(k): v for k, v in sorted(report.dual_degree_hist.items())},
    }
