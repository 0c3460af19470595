"""Joint tuning of (hbar, a) and automatic choice of the truncation order.

At the first order a tensor-grid sweep locates a basin, then a bound-constrained
L-BFGS-B refinement (central finite-difference gradients, probes clamped to the
box) polishes it.  Every later order warm-starts the refinement from the
previous optimum.  The loop stops once the optimized loss drops below
``eps_tol`` or changes by less than ``eps_imp`` between orders.
"""
from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from .blasius_oracle import error_fpp0
from .exceptions import AllDivergentError, NonFiniteTermError
from .grid_ops import Grid, Operators
from .ham_engine import HamParams, partial_sum, run_series
from .linear_solver import build_embedded_operator, factorize
from .pi_loss import LossBreakdown, LossWeights, total_loss

logger = logging.getLogger(__name__)

TOL_REACHED = "tol-reached"
IMPROVEMENT_STALLED = "improvement-stalled"
MAX_ORDER = "max-order"

# log-loss assigned to divergent candidates inside the refinement
_DIVERGENT_LOG_LOSS = 1e3


@dataclass(frozen=True)
class OptimConfig:
    hbar_bounds: tuple = (-1.0, -0.05)
    a_bounds: tuple = (0.6, 2.0)
    sweep_hbar: int = 10
    sweep_a: int = 10
    eps_tol: float = 1e-7
    eps_imp: float = 1e-10
    max_order: int = 60
    weights: LossWeights = field(default_factory=LossWeights)
    first_order: int = 2
    fd_rel_step: float = 1e-4
    fd_abs_step: float = 1e-6
    refine_maxiter: int = 60

    def __post_init__(self):
        (h0, h1), (a0, a1) = self.hbar_bounds, self.a_bounds
        if not h0 < h1:
            raise ValueError(f"empty hbar interval {self.hbar_bounds}")
        if not 0 < a0 < a1:
            raise ValueError(f"a interval must satisfy 0 < a_min < a_max, got {self.a_bounds}")
        if self.sweep_hbar < 1 or self.sweep_a < 1:
            raise ValueError("sweep counts must be >= 1")
        if self.max_order < 1:
            raise ValueError(f"max_order must be >= 1, got {self.max_order}")
        if self.first_order < 1:
            raise ValueError("first_order must be >= 1")

    @property
    def lower(self) -> np.ndarray:
        return np.array([self.hbar_bounds[0], self.a_bounds[0]], dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.hbar_bounds[1], self.a_bounds[1]], dtype=float)


class SolverContext:
    """Grid, operators, factorization, loss weights and optional reference.

    Everything here is read-only once built.  Pickling ships only the recipe;
    the receiving process rebuilds the operators and the factorization.
    """

    def __init__(self, grid: Grid, weights: LossWeights | None = None,
                 f_ref: np.ndarray | None = None, eps_ham: float = 1e-10):
        self.grid = grid
        self.weights = weights if weights is not None else LossWeights()
        self.f_ref = None if f_ref is None else np.asarray(f_ref, dtype=float)
        if self.f_ref is not None and self.f_ref.shape != (grid.n,):
            raise ValueError("reference profile does not match the grid")
        self.eps_ham = eps_ham
        self.ops = Operators.build(grid)
        self.fac = factorize(build_embedded_operator(self.ops.d3, self.ops.d1))

    def with_weights(self, weights: LossWeights) -> "SolverContext":
        clone = object.__new__(SolverContext)
        clone.__dict__.update(self.__dict__)
        clone.weights = weights
        return clone

    def __getstate__(self):
        return {"grid": (self.grid.eta_max, self.grid.n), "weights": self.weights,
                "f_ref": self.f_ref, "eps_ham": self.eps_ham}

    def __setstate__(self, state):
        self.__init__(Grid(*state["grid"]), state["weights"], state["f_ref"], state["eps_ham"])


def evaluate(hbar: float, a: float, M: int, ctx: SolverContext):
    """Loss and truncated solution ``F`` at order ``M``; ``F`` is None on divergence."""
    params = HamParams(float(hbar), float(a), max_order=max(M, 1), eps_ham=ctx.eps_ham)
    try:
        series = run_series(ctx.grid, ctx.ops, ctx.fac, params, M)
    except NonFiniteTermError:
        return LossBreakdown.divergent(), None
    # an early term-wise truncation caps the order
    F = partial_sum(series, min(M, series.orders_computed))
    with np.errstate(over="ignore", invalid="ignore"):
        loss = total_loss(F, ctx.weights, ctx.f_ref, ctx.ops)
    if not math.isfinite(loss.j_total):
        return LossBreakdown.divergent(), None
    return loss, F


def objective(hbar: float, a: float, M: int, ctx: SolverContext) -> LossBreakdown:
    return evaluate(hbar, a, M, ctx)[0]


_worker_ctx = None


def _init_worker(ctx):
    global _worker_ctx
    _worker_ctx = ctx


def _worker_eval(args):
    hbar, a, M = args
    return objective(hbar, a, M, _worker_ctx)


def resolve_workers(workers: int | None) -> int:
    if workers is None or workers <= 0:
        return os.cpu_count() or 1
    return int(workers)


def parallel_map_candidates(candidates, M: int, ctx: SolverContext,
                            workers: int | None = 1) -> list:
    """Evaluate ``objective`` for each ``(hbar, a)``; output keeps candidate order."""
    candidates = [(float(h), float(a)) for h, a in candidates]
    workers = min(resolve_workers(workers), len(candidates))
    if workers <= 1:
        return [objective(h, a, M, ctx) for h, a in candidates]
    chunk = max(1, len(candidates) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                             initargs=(ctx,)) as pool:
        return list(pool.map(_worker_eval, [(h, a, M) for h, a in candidates],
                             chunksize=chunk))


def sweep_candidates(cfg: OptimConfig) -> list:
    hs = np.linspace(*cfg.hbar_bounds, cfg.sweep_hbar)
    As = np.linspace(*cfg.a_bounds, cfg.sweep_a)
    return [(float(h), float(a)) for h in hs for a in As]


def _rank_key(item):
    (h, a), loss = item
    j = loss.j_total
    return (j if math.isfinite(j) else math.inf, h, a)


def coarse_sweep(cfg: OptimConfig, M: int, ctx: SolverContext, workers: int | None = 1):
    cands = sweep_candidates(cfg)
    losses = parallel_map_candidates(cands, M, ctx, workers)
    (h, a), best = min(zip(cands, losses), key=_rank_key)
    if not math.isfinite(best.j_total):
        raise AllDivergentError(f"all {len(cands)} sweep candidates diverged at order {M}")
    return h, a, best


def local_refine(start, cfg: OptimConfig, M: int, ctx: SolverContext):
    """Bound-constrained quasi-Newton polish of ``log J``.

    Returns the best point evaluated (the start included), so the result is
    never worse than ``start``.
    """
    lo, hi = cfg.lower, cfg.upper
    x0 = np.clip(np.asarray(start, dtype=float), lo, hi)
    seen = {}

    def loss_at(x):
        key = (float(x[0]), float(x[1]))
        if key not in seen:
            seen[key] = objective(key[0], key[1], M, ctx)
        return seen[key].j_total

    def log_loss(x):
        j = loss_at(np.clip(x, lo, hi))
        if not math.isfinite(j):
            return _DIVERGENT_LOG_LOSS
        return math.log(max(j, 1e-300))

    def fun_and_grad(x):
        x = np.clip(x, lo, hi)
        fx = log_loss(x)
        g = np.zeros(2)
        for i in range(2):
            step = max(cfg.fd_rel_step * abs(x[i]), cfg.fd_abs_step)
            xp, xm = x.copy(), x.copy()
            xp[i] = min(x[i] + step, hi[i])
            xm[i] = max(x[i] - step, lo[i])
            if xp[i] > xm[i]:
                g[i] = (log_loss(xp) - log_loss(xm)) / (xp[i] - xm[i])
        return fx, g

    loss_at(x0)
    try:
        minimize(fun_and_grad, x0, jac=True, method="L-BFGS-B", bounds=list(zip(lo, hi)),
                 options={"maxiter": cfg.refine_maxiter, "ftol": 1e-12, "gtol": 1e-9})
    except (ValueError, FloatingPointError) as exc:  # pragma: no cover - defensive
        logger.warning("refinement at order %d failed (%s); keeping best point", M, exc)
    (h, a), best = min(seen.items(), key=_rank_key)
    return h, a, best


@dataclass(frozen=True)
class OrderRecord:
    order: int
    hbar: float
    a: float
    loss: LossBreakdown
    abs_err_fpp0: float
    optimize_s: float
    series_s: float
    cumulative_s: float
    effective_order: int

    def as_dict(self) -> dict:
        d = asdict(self)
        d["loss"] = self.loss.as_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "OrderRecord":
        d = dict(d)
        d["loss"] = LossBreakdown(**d["loss"])
        return cls(**d)


@dataclass(frozen=True)
class OptimResult:
    hbar_star: float
    a_star: float
    m_star: int
    history: tuple
    stop_reason: str

    def as_dict(self) -> dict:
        return {"hbar_star": self.hbar_star, "a_star": self.a_star, "m_star": self.m_star,
                "stop_reason": self.stop_reason,
                "history": [r.as_dict() for r in self.history]}

    @classmethod
    def from_dict(cls, d: dict) -> "OptimResult":
        return cls(d["hbar_star"], d["a_star"], d["m_star"],
                   tuple(OrderRecord.from_dict(r) for r in d["history"]), d["stop_reason"])


def order_adaptive_solve(cfg: OptimConfig, ctx: SolverContext, workers: int | None = 1,
                         progress=None) -> OptimResult:
    """Increase the order until the optimized loss meets ``eps_tol`` or stalls.

    An order whose optimized loss is worse than the previous record keeps the
    previous parameters and solution, which makes the recorded loss sequence
    non-increasing.  ``progress`` is called with each :class:`OrderRecord`.
    """
    m0 = min(cfg.first_order, cfg.max_order)
    history = []
    t_start = time.perf_counter()
    h = a = None
    stop = MAX_ORDER
    for M in range(m0, cfg.max_order + 1):
        t0 = time.perf_counter()
        if M == m0:
            h, a, _ = coarse_sweep(cfg, M, ctx, workers)
        h, a, _ = local_refine((h, a), cfg, M, ctx)
        t1 = time.perf_counter()
        loss, F = evaluate(h, a, M, ctx)
        err = error_fpp0(F, ctx.ops.d2) if F is not None else math.inf
        t2 = time.perf_counter()
        eff = M
        prev = history[-1] if history else None
        if prev is not None and not loss.j_total <= prev.loss.j_total:
            h, a, loss, err, eff = prev.hbar, prev.a, prev.loss, prev.abs_err_fpp0, prev.effective_order
        rec = OrderRecord(M, h, a, loss, err, t1 - t0, t2 - t1, t2 - t_start, eff)
        history.append(rec)
        logger.info("order %d: J=%.3e err=%.3e hbar=%.5f a=%.5f", M, loss.j_total, err, h, a)
        if progress is not None:
            progress(rec)
        if loss.j_total < cfg.eps_tol:
            stop = TOL_REACHED
            break
        if prev is not None and abs(loss.j_total - prev.loss.j_total) < cfg.eps_imp:
            stop = IMPROVEMENT_STALLED
            break
    last = history[-1]
    return OptimResult(last.hbar, last.a, last.effective_order, tuple(history), stop)
