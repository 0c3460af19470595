"""Discrete homotopy-analysis series for the Blasius equation.

The zeroth-order term is the parametric guess ``f0 = eta - (1 - exp(-a eta)) / a``
which carries all inhomogeneous boundary data.  Every later term solves the
linear deformation problem

    f_m = chi_m f_{m-1} + hbar * L^{-1} R_m,   chi_1 = 0, chi_m = 1 (m >= 2)

with the residual convolution

    R_m = D3 f_{m-1} + 1/2 sum_{k=0}^{m-1} f_k * (D2 f_{m-1-k})

so each correction is homogeneous at the three constrained rows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NonFiniteTermError
from .grid_ops import DiscreteOperator, Grid, Operators
from .linear_solver import Factorization, solve_homogeneous


@dataclass(frozen=True)
class HamParams:
    hbar: float
    a: float
    max_order: int = 60
    eps_ham: float = 1e-10

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"shape parameter a must be positive, got {self.a}")
        if self.max_order < 1:
            raise ValueError(f"max_order must be >= 1, got {self.max_order}")
        if not self.eps_ham >= 0:
            raise ValueError(f"eps_ham must be non-negative, got {self.eps_ham}")


@dataclass
class HamSeries:
    """Correction terms ``f_0 .. f_M`` with cached ``D2 f_k`` and running sums."""

    terms: list = field(default_factory=list)
    d2_terms: list = field(default_factory=list, repr=False)
    sums: list = field(default_factory=list, repr=False)
    truncated_early: bool = False

    @classmethod
    def start(cls, f0: np.ndarray, d2: DiscreteOperator) -> "HamSeries":
        s = cls()
        s.append(f0, d2)
        return s

    @property
    def orders_computed(self) -> int:
        return len(self.terms) - 1

    def append(self, term: np.ndarray, d2: DiscreteOperator):
        self.terms.append(term)
        self.d2_terms.append(d2 @ term)
        self.sums.append(term.copy() if not self.sums else self.sums[-1] + term)


def initial_guess(grid: Grid, a: float) -> np.ndarray:
    if not a > 0:
        raise ValueError(f"shape parameter a must be positive, got {a}")
    eta = grid.nodes
    return eta + np.expm1(-a * eta) / a


def ham_residual(series: HamSeries, m: int, d2: DiscreteOperator,
                 d3: DiscreteOperator) -> np.ndarray:
    if not 1 <= m <= series.orders_computed + 1:
        raise IndexError(f"residual of order {m} needs terms 0..{m - 1}; "
                         f"series holds 0..{series.orders_computed}")
    f, d2f = series.terms, series.d2_terms
    conv = np.zeros_like(f[0])
    for k in range(m):
        conv += f[k] * d2f[m - 1 - k]
    return d3 @ f[m - 1] + 0.5 * conv


def ham_step(fac: Factorization, series: HamSeries, hbar: float, m: int,
             d2: DiscreteOperator, d3: DiscreteOperator) -> np.ndarray:
    """Return ``f_m``; the caller appends it."""
    u = solve_homogeneous(fac, ham_residual(series, m, d2, d3))
    if m == 1:
        return hbar * u
    return series.terms[m - 1] + hbar * u


def run_series(grid: Grid, ops: Operators, fac: Factorization, params: HamParams,
               target_order: int, series: HamSeries | None = None) -> HamSeries:
    """Build (or extend) the series up to ``target_order``.

    Stops early once ``max|f_m - f_{m-1}| < eps_ham``; ``eps_ham = 0`` never
    fires.  Raises :class:`NonFiniteTermError` as soon as a term overflows.
    """
    if target_order > params.max_order:
        raise ValueError(f"target order {target_order} exceeds max_order {params.max_order}")
    if target_order < 0:
        raise ValueError("target order must be non-negative")
    if series is None:
        series = HamSeries.start(initial_guess(grid, params.a), ops.d2)
    with np.errstate(over="ignore", invalid="ignore"):
        for m in range(series.orders_computed + 1, target_order + 1):
            if series.truncated_early:
                break
            fm = ham_step(fac, series, params.hbar, m, ops.d2, ops.d3)
            if not np.all(np.isfinite(fm)):
                raise NonFiniteTermError(m)
            step = np.max(np.abs(fm - series.terms[m - 1]))
            series.append(fm, ops.d2)
            if not math.isfinite(step):
                raise NonFiniteTermError(m)
            if step < params.eps_ham:
                series.truncated_early = True
    return series


def partial_sum(series: HamSeries, M: int) -> np.ndarray:
    if not 0 <= M <= series.orders_computed:
        raise IndexError(f"order {M} not computed (have 0..{series.orders_computed})")
    return series.sums[M]
