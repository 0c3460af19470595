import numpy as np
import pytest

from blasius_ham import (Operators, SolverContext, build_embedded_operator, build_grid,
                         factorize, solve_reference)


@pytest.fixture(scope="session")
def grid():
    return build_grid(8.0, 801)


@pytest.fixture(scope="session")
def ops(grid):
    return Operators.build(grid)


@pytest.fixture(scope="session")
def fac(ops):
    return factorize(build_embedded_operator(ops.d3, ops.d1))


@pytest.fixture(scope="session")
def oracle(grid):
    return solve_reference(grid, tol=1e-10, substeps=10)


@pytest.fixture(scope="session")
def ctx(grid, oracle):
    return SolverContext(grid, f_ref=oracle.f)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
