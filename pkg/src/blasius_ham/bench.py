"""Run configuration, orchestration and CSV/JSON output for the CLI commands."""
from __future__ import annotations

import csv
import dataclasses
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .blasius_oracle import BLASIUS_FPP0, OracleProfile, solve_reference
from .grid_ops import Grid, build_grid
from .param_optimizer import (OptimConfig, OptimResult, SolverContext, evaluate,
                              order_adaptive_solve)
from .pi_loss import LossWeights

logger = logging.getLogger(__name__)

BENCH_ORDERS = (4, 6, 8, 10, 12, 14, 16, 18, 20, 24, 28, 32, 35)
WEIGHT_PRESETS = ((0.8, 0.2), (0.5, 0.5), (0.0, 1.0), (1.0, 0.0))
RES_THRESHOLD = 1e-4

ORDERS_COLUMNS = ("order", "j_res", "j_bc", "j_data", "j_total", "abs_err_fpp0",
                  "cpu_s_cumulative")
PROFILE_COLUMNS = ("eta", "f", "fp", "fpp", "f_oracle", "fp_oracle", "fpp_oracle")
ORACLE_COLUMNS = ("eta", "f", "fp", "fpp")
TIMING_COLUMNS = frozenset({"cpu_s", "cpu_s_cumulative", "total_s"})


@dataclass(frozen=True)
class RunConfig:
    eta_max: float = 8.0
    n_points: int = 801
    max_order: int = 60
    hbar_min: float = -1.0
    hbar_max: float = -0.05
    a_min: float = 0.6
    a_max: float = 2.0
    sweep_hbar: int = 10
    sweep_a: int = 10
    w_bc: float = 1.0
    w_data: float = 0.0
    eps_tol: float = 1e-7
    eps_imp: float = 1e-10
    eps_ham: float = 1e-10
    first_order: int = 2
    substeps: int = 10
    oracle_tol: float = 1e-10
    workers: int = 0
    out: str = "results"
    emit_profile: bool = False
    reference: str | None = None

    def __post_init__(self):
        # fail fast on anything that cannot map onto a grid + optimizer config
        self.grid()
        self.optim_config()
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")
        if not self.oracle_tol > 0:
            raise ValueError("oracle_tol must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def grid(self) -> Grid:
        return build_grid(self.eta_max, self.n_points)

    def weights(self) -> LossWeights:
        return LossWeights(self.w_bc, self.w_data)

    def optim_config(self) -> OptimConfig:
        return OptimConfig(hbar_bounds=(self.hbar_min, self.hbar_max),
                           a_bounds=(self.a_min, self.a_max),
                           sweep_hbar=self.sweep_hbar, sweep_a=self.sweep_a,
                           eps_tol=self.eps_tol, eps_imp=self.eps_imp,
                           max_order=self.max_order, weights=self.weights(),
                           first_order=self.first_order)


@dataclass(frozen=True)
class RunReport:
    config: dict
    result: OptimResult
    fpp0: float
    abs_err_fpp0: float
    oracle_fpp0: float
    optimize_s: float
    series_s: float
    total_s: float
    stop_reason: str = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "stop_reason", self.result.stop_reason)

    def to_dict(self) -> dict:
        return {"config": self.config, "result": self.result.as_dict(), "fpp0": self.fpp0,
                "abs_err_fpp0": self.abs_err_fpp0, "oracle_fpp0": self.oracle_fpp0,
                "optimize_s": self.optimize_s, "series_s": self.series_s,
                "total_s": self.total_s, "stop_reason": self.stop_reason}

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(d["config"], OptimResult.from_dict(d["result"]), d["fpp0"],
                   d["abs_err_fpp0"], d["oracle_fpp0"], d["optimize_s"], d["series_s"],
                   d["total_s"])

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @classmethod
    def from_json(cls, path) -> "RunReport":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.15e}"


def write_csv(path, columns, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_csv(path) -> dict:
    """Columns of a CSV written by :func:`write_csv` as float arrays."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {name: np.array([float(r[i]) for r in body]) for i, name in enumerate(header)}


def write_oracle_profile(path, profile: OracleProfile):
    write_csv(path, ORACLE_COLUMNS, zip(profile.nodes, profile.f, profile.fp, profile.fpp))


def load_reference(path, grid: Grid) -> OracleProfile:
    cols = read_csv(path)
    eta = cols["eta"]
    if eta.shape != (grid.n,) or not np.allclose(eta, grid.nodes, rtol=0, atol=1e-12):
        raise ValueError(f"reference {path} is not sampled on the run grid")
    fpp = cols.get("fpp", np.full(grid.n, np.nan))
    return OracleProfile(eta, cols["f"], cols.get("fp", np.full(grid.n, np.nan)), fpp,
                         float(fpp[0]))


def reference_profile(config: RunConfig, grid: Grid) -> OracleProfile:
    if config.reference:
        return load_reference(config.reference, grid)
    return solve_reference(grid, config.oracle_tol, config.substeps)


def orders_rows(result: OptimResult):
    for r in result.history:
        L = r.loss
        yield (r.order, L.j_res, L.j_bc, L.j_data, L.j_total, r.abs_err_fpp0, r.cumulative_s)


def _solve(config: RunConfig, grid: Grid, ref: OracleProfile, progress=None):
    ctx = SolverContext(grid, config.weights(), ref.f, config.eps_ham)
    t0 = time.perf_counter()
    result = order_adaptive_solve(config.optim_config(), ctx, config.workers, progress)
    total = time.perf_counter() - t0
    return ctx, result, total


def cmd_solve(config: RunConfig, progress=None) -> RunReport:
    """Order-adaptive solve; writes ``report.json``, ``orders.csv`` and optionally ``profile.csv``."""
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = config.grid()
    ref = reference_profile(config, grid)
    ctx, result, total = _solve(config, grid, ref, progress)
    _, F = evaluate(result.hbar_star, result.a_star, result.m_star, ctx)
    fpp = ctx.ops.d2 @ F
    report = RunReport(
        config=config.to_dict(), result=result, fpp0=float(fpp[0]),
        abs_err_fpp0=abs(float(fpp[0]) - BLASIUS_FPP0), oracle_fpp0=ref.fpp0,
        optimize_s=sum(r.optimize_s for r in result.history),
        series_s=sum(r.series_s for r in result.history), total_s=total)
    report.to_json(out / "report.json")
    write_csv(out / "orders.csv", ORDERS_COLUMNS, orders_rows(result))
    if config.emit_profile:
        fp = ctx.ops.d1 @ F
        write_csv(out / "profile.csv", PROFILE_COLUMNS,
                  zip(grid.nodes, F, fp, fpp, ref.f, ref.fp, ref.fpp))
    return report


def cmd_bench_orders(config: RunConfig, orders=BENCH_ORDERS, progress=None) -> list:
    """Error in f''(0) and cumulative time at fixed orders; writes ``table1.csv``.

    Both stopping rules are disabled so every listed order is reached.
    """
    orders = tuple(sorted(orders))
    cfg = config.replace(eps_tol=0.0, eps_imp=0.0, max_order=orders[-1])
    grid = cfg.grid()
    ref = reference_profile(cfg, grid)
    _, result, _ = _solve(cfg, grid, ref, progress)
    by_order = {r.order: r for r in result.history}
    rows = [(M, by_order[M].abs_err_fpp0, by_order[M].cumulative_s)
            for M in orders if M in by_order]
    write_csv(Path(config.out) / "table1.csv", ("order", "abs_err_fpp0", "cpu_s"), rows)
    return rows


def preset_name(w_bc: float, w_data: float) -> str:
    return f"bc{w_bc:g}_data{w_data:g}"


def order_to_threshold(result: OptimResult, threshold: float = RES_THRESHOLD):
    for r in result.history:
        if r.loss.j_res <= threshold:
            return r.order
    return None


def cmd_weight_study(config: RunConfig, presets=WEIGHT_PRESETS, progress=None) -> list:
    """Order-adaptive solve per weight preset; writes per-preset ``orders.csv`` and ``weight_study.csv``."""
    out = Path(config.out)
    grid = config.grid()
    ref = reference_profile(config, grid)
    summary = []
    for w_bc, w_data in presets:
        cfg = config.replace(w_bc=w_bc, w_data=w_data)
        _, result, total = _solve(cfg, grid, ref, progress)
        name = preset_name(w_bc, w_data)
        write_csv(out / name / "orders.csv", ORDERS_COLUMNS, orders_rows(result))
        m = order_to_threshold(result)
        summary.append({"preset": name, "w_bc": w_bc, "w_data": w_data,
                        "order_to_threshold": m, "m_star": result.m_star,
                        "stop_reason": result.stop_reason, "total_s": total,
                        "hbar_star": result.hbar_star, "a_star": result.a_star,
                        "j_res_final": result.history[-1].loss.j_res})
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "weight_study.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["preset", "order_to_threshold", "total_s", "hbar_star", "a_star"])
        for s in summary:
            m = s["order_to_threshold"]
            w.writerow([s["preset"], "" if m is None else m, fmt(s["total_s"]),
                        fmt(s["hbar_star"]), fmt(s["a_star"])])
    return summary


def cmd_oracle(config: RunConfig) -> OracleProfile:
    """Shooting reference on the run grid; writes ``profile.csv``."""
    grid = config.grid()
    profile = solve_reference(grid, config.oracle_tol, config.substeps)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    write_oracle_profile(out / "profile.csv", profile)
    return profile

