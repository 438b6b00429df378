"""
The ``femforge`` command-line program.

Subcommands::

    femforge assemble  assemble A and b and export them
    femforge solve     assemble and solve with conjugate gradients
    femforge bench     time evaluator x mode combinations over mesh sizes
    femforge codegen   emit kernel source and the program disassembly
    femforge mesh      write a structured unit square mesh

Exit codes: 0 when every requested artifact was written, 2 for invalid
configuration or input, 1 for failures while running.
"""
import argparse
import csv
import logging
import statistics
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, List, Optional, Sequence

from pydantic import ValidationError

from ..codegen import CompiledForm, compile_form, emit_source
from ..device import (
    GlobalSystem,
    assemble_dense,
    assemble_sparse,
    build_sparsity,
    flatten_mesh,
)
from ..errors import DeviceError, KernelError, SolverBreakdownError
from ..fem import Mesh, instantiate
from ..linalg import cg_solve, export, export_vector, l2_error
from ..meshgen import unit_square_mesh, write_mesh
from ..symbolic import parse
from ..utils.text_formatter import format_table
from .models import PRESETS, ProblemConfig, log_level_from_env

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2

BENCH_COLUMNS = ["n", "nodes", "elements", "evaluator", "mode", "workers", "median_ms",
                 "speedup_vs_interpreted"]
_SUFFIX = {"matrixmarket": ".mtx", "csv": ".csv"}


@dataclass
class Prepared:
    """Everything a command needs before the launch."""
    mesh: Mesh
    compiled: CompiledForm


def prepare(cfg: ProblemConfig, mesh: Optional[Mesh] = None) -> Prepared:
    mesh = mesh if mesh is not None else cfg.mesh()
    cfg.check_dense_memory(mesh.n_nodes)
    form = instantiate(cfg.problem().weak_form())
    return Prepared(mesh, compile_form(form, cfg.rule()))


def assemble(cfg: ProblemConfig, prepared: Prepared, **launch_overrides) -> GlobalSystem:
    """Assemble with the layout, evaluator and launch settings of ``cfg``."""
    d = flatten_mesh(prepared.mesh)
    launch_cfg = cfg.launch_config(**launch_overrides)
    if cfg.layout == "dense":
        return assemble_dense(prepared.compiled, d, launch_cfg, cfg.evaluator)
    return assemble_sparse(prepared.compiled, d, build_sparsity(prepared.mesh), launch_cfg, cfg.evaluator)


def emit(headers: Sequence[str], rows: Sequence[Sequence[Any]], csv_path: Optional[Path] = None) -> None:
    """Print an aligned table and optionally write the same rows as CSV."""
    print(format_table(headers, rows))
    if csv_path is not None:
        with open(csv_path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(headers)
            writer.writerows(rows)
        logging.info(f"Wrote {len(rows)} row(s) to {csv_path}")


def _max_nz(system: GlobalSystem, mesh: Mesh) -> int:
    if system.layout == "ell":
        return system.A.max_nz
    return build_sparsity(mesh).max_nz


def cmd_assemble(cfg: ProblemConfig, out_matrix: Optional[Path] = None, out_vector: Optional[Path] = None,
                 fmt: str = "matrixmarket", csv_path: Optional[Path] = None) -> int:
    """Assemble, export A and b, and report N, nnz, MAX_NZ and wall time."""
    prepared = prepare(cfg)
    started = time.perf_counter()
    system = assemble(cfg, prepared)
    wall = time.perf_counter() - started
    suffix = _SUFFIX[fmt]
    matrix_path = export(system.A, out_matrix or Path(f"matrix{suffix}"), fmt)
    vector_path = export_vector(system.b, out_vector or Path(f"vector{suffix}"), fmt)
    emit(["N", "nnz", "MAX_NZ", "layout", "evaluator", "wall_ms", "matrix", "vector"],
         [[system.n, int(system.A.nnz), int(_max_nz(system, prepared.mesh)), system.layout,
           cfg.evaluator, wall * 1e3, str(matrix_path), str(vector_path)]],
         csv_path)
    return EXIT_OK


def cmd_solve(cfg: ProblemConfig, tol: float = 1e-10, max_iter: Optional[int] = None,
              out_vector: Optional[Path] = None, fmt: str = "matrixmarket",
              csv_path: Optional[Path] = None) -> int:
    """
    Assemble and solve with CG; report iterations, residual and, when an
    exact solution is known, the L2 error. The solution vector is written
    only when CG converged.

    Returns:
        0 on convergence, 1 when CG stops at the iteration cap
    """
    prepared = prepare(cfg)
    system = assemble(cfg, prepared)
    result = cg_solve(system.A, system.b, tol=tol, max_iter=max_iter)
    error = None
    if cfg.exact is not None:
        error = l2_error(result.x, parse(cfg.exact), prepared.mesh, cfg.rule())
    emit(["N", "iterations", "residual", "converged", "l2_error"],
         [[system.n, result.iterations, result.residual, result.converged, error]],
         csv_path)
    if not result.converged:
        print(f"error: CG did not reach tol={tol} within the iteration cap", file=sys.stderr)
        return EXIT_RUNTIME
    if out_vector is not None:
        export_vector(result.x, out_vector, fmt)
    return EXIT_OK


def cmd_bench(cfg: ProblemConfig, sizes: Sequence[int], repeats: int = 3,
              csv_path: Optional[Path] = None) -> int:
    """
    Time every evaluator x mode combination on generated meshes.

    Deterministic runs use one worker, parallel runs ``cfg.workers``. The
    median kernel time over ``repeats`` runs is reported together with the
    interpreted/compiled ratio at equal mode.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    rows: List[List[Any]] = []
    for n in sizes:
        prepared = prepare(cfg, unit_square_mesh(n))
        medians = {}
        for evaluator in ("compiled", "interpreted"):
            run_cfg = cfg.model_copy(update={"evaluator": evaluator})
            for mode in ("deterministic", "parallel"):
                workers = cfg.workers if mode == "parallel" else 1
                times = [assemble(run_cfg, prepared, mode=mode, workers=workers).stats.kernel_seconds
                         for _ in range(repeats)]
                medians[evaluator, mode] = (workers, statistics.median(times) * 1e3)
        for (evaluator, mode), (workers, median_ms) in medians.items():
            speedup = medians["interpreted", mode][1] / median_ms if median_ms > 0 else None
            rows.append([n, prepared.mesh.n_nodes, prepared.mesh.n_elements, evaluator, mode,
                         workers, median_ms, speedup])
    emit(BENCH_COLUMNS, rows, csv_path)
    return EXIT_OK


def cmd_codegen(cfg: ProblemConfig, out: Path, out_ir: Optional[Path] = None) -> int:
    """Write the rendered kernel source and the disassembly of every program."""
    prepared = prepare(cfg)
    params = {"elems_per_block": cfg.elems_per_block, "max_nz": build_sparsity(prepared.mesh).max_nz}
    source = emit_source(prepared.compiled, params)
    out = Path(out)
    out_ir = Path(out_ir) if out_ir is not None else out.with_suffix(".ir")
    out.write_text(source)
    out_ir.write_text(prepared.compiled.disassembly())
    print(f"Wrote {out} and {out_ir} ({len(prepared.compiled.programs())} programs)")
    return EXIT_OK


def cmd_mesh(n: int, out: Path) -> int:
    """Write the n x n unit square mesh."""
    mesh = unit_square_mesh(n)
    write_mesh(mesh, out)
    print(f"Wrote {out}: {mesh.n_nodes} nodes, {mesh.n_elements} elements")
    return EXIT_OK


def _sigma(text: str) -> List[str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("--sigma needs four comma-separated expressions")
    return parts


def _sizes(text: str) -> List[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("--sizes needs comma-separated integers") from None


def _add_problem_arguments(parser: argparse.ArgumentParser, mesh_source: bool = True) -> None:
    group = parser.add_argument_group("problem")
    group.add_argument("--problem", default="demo", choices=sorted(PRESETS),
                       help="built-in problem the other problem flags override")
    group.add_argument("--sigma", type=_sigma, help="s11,s12,s21,s22 expressions in x and y")
    group.add_argument("--lambda", dest="lam", type=float, help="reaction coefficient")
    group.add_argument("--f", help="right-hand side expression")
    group.add_argument("--exact", help="exact solution expression for the L2 error")
    group.add_argument("--quad-degree", type=int, choices=(1, 2, 4), help="quadrature degree")
    if mesh_source:
        group.add_argument("--n", type=int, help="cells per side of the generated mesh (default 16)")
        group.add_argument("--mesh-file", type=Path, help="mesh file instead of a generated mesh")

    launch = parser.add_argument_group("execution")
    launch.add_argument("--layout", choices=("dense", "ell"), help="global matrix storage (default ell)")
    launch.add_argument("--mode", help="det|par (default det)")
    launch.add_argument("--workers", type=int, help="parallel workers (default FEMFORGE_WORKERS or 1)")
    launch.add_argument("--elems-per-block", type=int, help="elements per thread block (default 4)")
    launch.add_argument("--evaluator", choices=("compiled", "interpreted"), help="integrand evaluator")
    launch.add_argument("--engine", choices=("lockstep", "cooperative"), help="device execution engine")
    launch.add_argument("--seed", type=int, help="block shuffle seed in parallel mode")
    launch.add_argument("--mem-cap-bytes", type=int, help="dense matrix memory cap (default 2 GiB)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="femforge",
                                     description="Symbolic-numeric P1 finite element assembly")
    parser.add_argument("--verbose", "-v", action="store_true", help="log progress at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assemble", help="assemble and export A and b")
    _add_problem_arguments(p)
    p.add_argument("--out-matrix", type=Path, help="matrix file (default matrix.mtx or matrix.csv)")
    p.add_argument("--out-vector", type=Path, help="vector file (default vector.mtx or vector.csv)")
    p.add_argument("--format", dest="fmt", default="matrixmarket", choices=("matrixmarket", "csv"))
    p.add_argument("--csv", type=Path, help="also write the report table as CSV")

    p = sub.add_parser("solve", help="assemble and solve with conjugate gradients")
    _add_problem_arguments(p)
    p.add_argument("--tol", type=float, default=1e-10, help="relative residual target")
    p.add_argument("--max-iter", type=int, help="iteration cap (default 10 N)")
    p.add_argument("--out-vector", type=Path, help="write the solution vector")
    p.add_argument("--format", dest="fmt", default="matrixmarket", choices=("matrixmarket", "csv"))
    p.add_argument("--csv", type=Path, help="also write the report table as CSV")

    p = sub.add_parser("bench", help="time evaluators and scheduling modes")
    _add_problem_arguments(p, mesh_source=False)
    p.add_argument("--sizes", type=_sizes, default=[64, 128, 256], help="comma-separated mesh sizes")
    p.add_argument("--repeats", type=int, default=3, help="runs per configuration")
    p.add_argument("--csv", type=Path, help="also write the timing table as CSV")

    p = sub.add_parser("codegen", help="emit kernel source and program disassembly")
    _add_problem_arguments(p)
    p.add_argument("--out", type=Path, default=Path("assembly_kernel.cu"), help="kernel source file")
    p.add_argument("--out-ir", type=Path, help="disassembly file (default: --out with .ir suffix)")

    p = sub.add_parser("mesh", help="write a structured unit square mesh")
    p.add_argument("--n", type=int, required=True, help="cells per side")
    p.add_argument("--out", type=Path, required=True, help="mesh file")
    return parser


def config_from_args(args: argparse.Namespace) -> ProblemConfig:
    """Merge the chosen preset with the flags given on the command line."""
    overrides = {
        "sigma": args.sigma, "lam": args.lam, "f": args.f, "exact": args.exact,
        "quad_degree": args.quad_degree, "n": getattr(args, "n", None),
        "mesh_file": getattr(args, "mesh_file", None), "layout": args.layout, "mode": args.mode,
        "workers": args.workers, "elems_per_block": args.elems_per_block,
        "evaluator": args.evaluator, "engine": args.engine, "seed": args.seed,
        "mem_cap_bytes": args.mem_cap_bytes,
    }
    if overrides["mesh_file"] is not None and overrides["n"] is not None:
        raise ValueError("Give either --n or --mesh-file, not both")
    return ProblemConfig.from_preset(args.problem, **overrides)


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "mesh":
        return cmd_mesh(args.n, args.out)
    cfg = config_from_args(args)
    if args.command == "assemble":
        return cmd_assemble(cfg, args.out_matrix, args.out_vector, args.fmt, args.csv)
    if args.command == "solve":
        return cmd_solve(cfg, args.tol, args.max_iter, args.out_vector, args.fmt, args.csv)
    if args.command == "bench":
        return cmd_bench(cfg, args.sizes, args.repeats, args.csv)
    if args.command == "codegen":
        return cmd_codegen(cfg, args.out, args.out_ir)
    raise ValueError(f"Unsupported command: {args.command}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse ``argv``, run the command and map failures to exit codes.

    Returns:
        0 on success, 2 for configuration or input errors, 1 for failures
        while running
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        level = logging.INFO if args.verbose else log_level_from_env()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return dispatch(args)
    except (DeviceError, KernelError, SolverBreakdownError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValidationError as exc:
        messages = "; ".join(err["msg"] for err in exc.errors())
        print(f"error: invalid configuration: {messages}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())
