"""Numerical homotopy-analysis solver for the Blasius boundary layer.

The convergence-control parameter ``hbar`` and the initial-guess shape
parameter ``a`` are tuned by minimizing a physics-informed loss, and the
series order is chosen adaptively.  A shooting solver supplies the reference
profile.

Typical use::

    from blasius_ham import build_grid, SolverContext, OptimConfig, order_adaptive_solve

    ctx = SolverContext(build_grid(8.0, 801))
    result = order_adaptive_solve(OptimConfig(), ctx)
"""
from .blasius_oracle import BLASIUS_FPP0, OracleProfile, error_fpp0, integrate_ivp, solve_reference
from .exceptions import (AllDivergentError, BracketError, MissingReferenceError,
                         NonFiniteStateError, NonFiniteTermError, SingularOperatorError)
from .grid_ops import (DiscreteOperator, Grid, Operators, build_d1, build_d2, build_d3,
                       build_grid)
from .ham_engine import (HamParams, HamSeries, ham_residual, ham_step, initial_guess,
                         partial_sum, run_series)
from .linear_solver import (EmbeddedOperator, Factorization, build_embedded_operator,
                            factorize, solve_homogeneous)
from .param_optimizer import (OptimConfig, OptimResult, OrderRecord, SolverContext,
                              coarse_sweep, evaluate, local_refine, objective,
                              order_adaptive_solve, parallel_map_candidates)
from .pi_loss import (LossBreakdown, LossWeights, bc_loss, blasius_residual, data_loss,
                      residual_loss, total_loss)

__version__ = "0.1.0"
