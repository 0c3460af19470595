"""Boundary-embedded third-derivative operator and its LU factorization.

Rows 0, 1 and N-1 of ``D3`` are replaced by the constraint rows
``u[0]``, ``(D1 u)[0]`` and ``(D1 u)[N-1]``.  The resulting matrix is factorized
once per grid and reused for every series order and every parameter candidate.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .exceptions import SingularOperatorError
from .grid_ops import DiscreteOperator

PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class EmbeddedOperator:
    base: DiscreteOperator
    bc_rows: tuple = field(default=())

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def matrix(self):
        return self.base.matrix


def build_embedded_operator(d3: DiscreteOperator, d1: DiscreteOperator) -> EmbeddedOperator:
    if d3.n != d1.n:
        raise ValueError("d1 and d3 come from different grids")
    n = d3.n
    m = sparse.lil_array(d3.matrix)
    d1m = sparse.lil_array(d1.matrix)
    m[0, :] = 0.0
    m[0, 0] = 1.0
    m[1, :] = d1m[0, :]
    m[n - 1, :] = d1m[n - 1, :]
    csr = sparse.csr_array(m)
    csr.eliminate_zeros()
    return EmbeddedOperator(DiscreteOperator("L-embedded", csr), (0, 1, n - 1))


class Factorization:
    """Sparse LU factors (row partial pivoting, natural column order).

    Rows are equilibrated to unit max-norm before factorizing; the constraint
    rows are O(1) and O(1/h) while the D3 rows are O(1/h^3).  Solves only read
    the factors, so one instance can be shared by concurrent callers.
    """

    def __init__(self, matrix):
        a = sparse.csr_matrix(matrix, dtype=float)
        if a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        row_max = np.asarray(abs(a).max(axis=1).todense()).ravel()
        if not np.all(row_max > 0):
            raise SingularOperatorError("matrix has an all-zero row")
        self._row_scale = 1.0 / row_max
        # after equilibration max|entry| == 1, so the pivot threshold is absolute
        a = sparse.csc_matrix(sparse.diags(self._row_scale) @ a)
        try:
            # diag_pivot_thresh=1 makes SuperLU pick the largest pivot in each column
            self._lu = splu(a, permc_spec="NATURAL", diag_pivot_thresh=1.0,
                            options={"SymmetricMode": False})
        except RuntimeError as exc:
            raise SingularOperatorError(str(exc)) from exc
        pivots = np.abs(self._lu.U.diagonal())
        if not np.all(np.isfinite(pivots)) or pivots.min() <= PIVOT_RTOL:
            raise SingularOperatorError(
                f"pivot {pivots.min():.3e} below {PIVOT_RTOL:g} x max|entry|")
        self.n = a.shape[0]

    def solve(self, b: np.ndarray) -> np.ndarray:
        return self._lu.solve(self._row_scale * np.asarray(b, dtype=float))


def factorize(op) -> Factorization:
    """Factorize an :class:`EmbeddedOperator` (or any square matrix)."""
    matrix = op.matrix if hasattr(op, "matrix") else op
    return Factorization(matrix)


def solve_homogeneous(fac: Factorization, b: np.ndarray) -> np.ndarray:
    """Solve ``L u = b`` after zeroing the constraint entries 0, 1 and N-1 of ``b``."""
    b = np.array(b, dtype=float)
    if b.shape != (fac.n,):
        raise ValueError(f"expected vector of length {fac.n}, got shape {b.shape}")
    b[[0, 1, fac.n - 1]] = 0.0
    return fac.solve(b)
