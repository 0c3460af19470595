"""Command-line entry point: ``solve``, ``bench-orders``, ``weight-study``, ``oracle``."""
from __future__ import annotations

import argparse
import logging
import sys

from . import bench
from .bench import RunConfig
from .exceptions import AllDivergentError, SingularOperatorError

# flag -> (config key, type)
_FLAGS = {
    "--eta-max": ("eta_max", float),
    "--n-points": ("n_points", int),
    "--max-order": ("max_order", int),
    "--hbar-min": ("hbar_min", float),
    "--hbar-max": ("hbar_max", float),
    "--a-min": ("a_min", float),
    "--a-max": ("a_max", float),
    "--sweep-hbar": ("sweep_hbar", int),
    "--sweep-a": ("sweep_a", int),
    "--w-bc": ("w_bc", float),
    "--w-data": ("w_data", float),
    "--eps-tol": ("eps_tol", float),
    "--eps-imp": ("eps_imp", float),
    "--eps-ham": ("eps_ham", float),
    "--first-order": ("first_order", int),
    "--substeps": ("substeps", int),
    "--oracle-tol": ("oracle_tol", float),
    "--workers": ("workers", int),
    "--out": ("out", str),
    "--reference": ("reference", str),
}


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON config file; flags override its keys")
    for flag, (dest, typ) in _FLAGS.items():
        p.add_argument(flag, dest=dest, type=typ, default=None)
    p.add_argument("--emit-profile", dest="emit_profile", action="store_true", default=None)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blasius-ham",
        description="Loss-tuned homotopy-analysis solver for the Blasius boundary layer.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()
    sub.add_parser("solve", parents=[common], help="order-adaptive solve with default weights")
    sub.add_parser("bench-orders", parents=[common], help="f''(0) error at fixed orders")
    sub.add_parser("weight-study", parents=[common], help="compare loss-weight presets")
    sub.add_parser("oracle", parents=[common], help="shooting reference profile")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    base = RunConfig.from_json(args.config).to_dict() if args.config else RunConfig().to_dict()
    for dest, _ in list(_FLAGS.values()) + [("emit_profile", bool)]:
        value = getattr(args, dest, None)
        if value is not None:
            base[dest] = value
    return RunConfig.from_dict(base)


def _print_progress(rec):
    print(f"order {rec.order:3d}  J={rec.loss.j_total:.3e}  |f''(0)-ref|={rec.abs_err_fpp0:.3e}"
          f"  hbar={rec.hbar:.5f}  a={rec.a:.5f}  t={rec.cumulative_s:.2f}s", flush=True)


def run(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    progress = _print_progress if args.verbose else None
    if args.command == "solve":
        rep = bench.cmd_solve(config, progress)
        print(f"stop: {rep.stop_reason}  M*={rep.result.m_star}  hbar*={rep.result.hbar_star:.6f}"
              f"  a*={rep.result.a_star:.6f}")
        print(f"J_total={rep.result.history[-1].loss.j_total:.6e}  f''(0)={rep.fpp0:.8f}"
              f"  error={rep.abs_err_fpp0:.3e}  time={rep.total_s:.2f}s")
    elif args.command == "bench-orders":
        for M, err, t in bench.cmd_bench_orders(config, progress=progress):
            print(f"{M:3d}  {err:.3e}  {t:8.3f}s")
    elif args.command == "weight-study":
        for s in bench.cmd_weight_study(config, progress=progress):
            print(f"{s['preset']:>16s}  order(j_res<=1e-4)={s['order_to_threshold']}"
                  f"  M*={s['m_star']}  hbar*={s['hbar_star']:.5f}  a*={s['a_star']:.5f}"
                  f"  {s['total_s']:.2f}s")
    elif args.command == "oracle":
        profile = bench.cmd_oracle(config)
        print(f"{profile.fpp0:.10f}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    except (AllDivergentError, SingularOperatorError, ArithmeticError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
