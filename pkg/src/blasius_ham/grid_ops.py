"""Uniform grid on [0, eta_max] and second-order finite-difference operators.

The first- and second-derivative operators use central stencils in the
interior and one-sided second-order stencils on the two end rows.  The
third-derivative operator is the explicit product ``D1 @ D2`` so its rows are
available when the boundary-embedded operator is assembled.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

MIN_NODES = 6


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``nodes[i] = i * h`` with ``h = eta_max / (n - 1)``."""

    eta_max: float
    n: int
    h: float = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not np.isfinite(self.eta_max) or self.eta_max <= 0:
            raise ValueError(f"eta_max must be positive, got {self.eta_max}")
        if int(self.n) != self.n or self.n < MIN_NODES:
            raise ValueError(f"need at least {MIN_NODES} nodes, got {self.n}")
        n = int(self.n)
        h = self.eta_max / (n - 1)
        nodes = np.arange(n) * h
        nodes[-1] = self.eta_max
        nodes.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "nodes", nodes)


def build_grid(eta_max: float, n: int) -> Grid:
    return Grid(float(eta_max), n)


@dataclass(frozen=True)
class DiscreteOperator:
    """Square banded operator acting on grid vectors.

    ``kind`` is one of ``"D1"``, ``"D2"``, ``"D3"`` or ``"L-embedded"``.
    """

    kind: str
    matrix: sparse.csr_array = field(repr=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, v):
        return self.matrix @ v

    def row(self, i: int) -> np.ndarray:
        return self.matrix[[i], :].toarray().ravel()

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _banded(n, interior, first, last, scale, kind):
    # interior: {offset: coeff}; first/last: coefficients on the end rows
    diags = {k: np.full(n - abs(k), c, dtype=float) for k, c in interior.items()}
    m = sparse.diags(list(diags.values()), list(diags.keys()), shape=(n, n), format="lil")
    m[0, :] = 0.0
    m[n - 1, :] = 0.0
    for j, c in enumerate(first):
        m[0, j] = c
    for j, c in enumerate(last):
        m[n - 1, n - len(last) + j] = c
    csr = sparse.csr_array(m.tocsr() * scale)
    csr.eliminate_zeros()
    return DiscreteOperator(kind, csr)


def build_d1(grid: Grid) -> DiscreteOperator:
    return _banded(grid.n, {-1: -1.0, 1: 1.0}, (-3.0, 4.0, -1.0), (1.0, -4.0, 3.0),
                   1.0 / (2.0 * grid.h), "D1")


def build_d2(grid: Grid) -> DiscreteOperator:
    return _banded(grid.n, {-1: 1.0, 0: -2.0, 1: 1.0}, (2.0, -5.0, 4.0, -1.0),
                   (-1.0, 4.0, -5.0, 2.0), 1.0 / grid.h**2, "D2")


def build_d3(grid: Grid, d1: DiscreteOperator | None = None,
             d2: DiscreteOperator | None = None) -> DiscreteOperator:
    d1 = d1 if d1 is not None else build_d1(grid)
    d2 = d2 if d2 is not None else build_d2(grid)
    prod = sparse.csr_array(d1.matrix @ d2.matrix)
    prod.eliminate_zeros()
    prod.sort_indices()
    return DiscreteOperator("D3", prod)


@dataclass(frozen=True)
class Operators:
    """The three derivative operators of one grid."""

    grid: Grid
    d1: DiscreteOperator
    d2: DiscreteOperator
    d3: DiscreteOperator

    @classmethod
    def build(cls, grid: Grid) -> "Operators":
        d1, d2 = build_d1(grid), build_d2(grid)
        return cls(grid, d1, d2, build_d3(grid, d1, d2))
