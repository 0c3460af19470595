"""Composite physics-informed loss of a truncated series solution.

``J = J_res + w_bc * J_bc + w_data * J_data`` where

* ``J_res``  mean square of ``D3 F + F * (D2 F) / 2`` over all N nodes,
* ``J_bc``   ``F(0)^2 + F'(0)^2 + (F'(eta_max) - 1)^2`` with one-sided D1 rows,
* ``J_data`` mean square deviation from a reference profile.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import MissingReferenceError
from .grid_ops import DiscreteOperator, Operators


@dataclass(frozen=True)
class LossWeights:
    lambda_bc: float = 1.0
    lambda_data: float = 0.0

    def __post_init__(self):
        for name in ("lambda_bc", "lambda_data"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class LossBreakdown:
    j_res: float
    j_bc: float
    j_data: float
    j_total: float

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def divergent(cls) -> "LossBreakdown":
        inf = math.inf
        return cls(inf, inf, inf, inf)


def blasius_residual(F: np.ndarray, d2: DiscreteOperator, d3: DiscreteOperator) -> np.ndarray:
    """Pointwise discrete residual ``D3 F + F * (D2 F) / 2``."""
    return d3 @ F + 0.5 * F * (d2 @ F)


def residual_loss(F: np.ndarray, d2: DiscreteOperator, d3: DiscreteOperator) -> float:
    r = blasius_residual(F, d2, d3)
    return float(np.dot(r, r) / r.size)


def bc_loss(F: np.ndarray, d1: DiscreteOperator) -> float:
    fp = d1.matrix[[0, F.size - 1], :] @ F
    return float(F[0] ** 2 + fp[0] ** 2 + (fp[1] - 1.0) ** 2)


def data_loss(F: np.ndarray, f_ref: np.ndarray) -> float:
    F = np.asarray(F)
    f_ref = np.asarray(f_ref)
    if F.shape != f_ref.shape:
        raise ValueError(f"length mismatch: {F.shape} vs {f_ref.shape}")
    d = F - f_ref
    return float(np.dot(d, d) / d.size)


def total_loss(F: np.ndarray, weights: LossWeights, f_ref: np.ndarray | None,
               ops: Operators) -> LossBreakdown:
    """Weighted loss; ``j_data`` is still reported when its weight is zero."""
    if f_ref is None and weights.lambda_data > 0:
        raise MissingReferenceError("lambda_data > 0 requires reference data")
    j_res = residual_loss(F, ops.d2, ops.d3)
    j_bc = bc_loss(F, ops.d1)
    j_data = data_loss(F, f_ref) if f_ref is not None else 0.0
    j_total = j_res + weights.lambda_bc * j_bc + weights.lambda_data * j_data
    return LossBreakdown(j_res, j_bc, j_data, j_total)
