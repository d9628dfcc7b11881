"""Command-line driver: solve, stokes, couette, mms, sweep, diag.

Exit codes: 0 success, 1 validation error, 2 non-convergence.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .bc import BoundarySpec
from .config import (
    ConfigError,
    RunConfig,
    parse_config,
    profile_from_string,
    profile_to_string,
    resolved_text,
)
from .diag import build_report
from .fieldfile import FieldFileError, read_fields, write_fields
from .grid import GridError, build_grid
from .linsolve import LinearSolveError
from .march import MarchConfig, MarchDivergedError, run_until_stalled
from .mms import ManufacturedCase, StudyError, convergence_study
from .newton import NewtonError, solve_steady, solve_steady_continued
from .ops import FieldSet, OpsError
from .stokes import SwirlStokesProblem, couette_exact, solve_swirl_stokes

VALIDATION_ERRORS = (ConfigError, GridError, OpsError, FieldFileError,
                     ValueError, OSError)


class NonConverged(RuntimeError):
    pass


def _load_config(path: str) -> RunConfig:
    return parse_config(Path(path).read_text())


def _scaled_bc(cfg: RunConfig, c: float) -> BoundarySpec:
    """Boundary data with the wall swirl scaled by c (for continuation)."""
    from .bc import RotationProfile
    from .hopf import HopfParams

    prof = cfg.bc.profile
    if prof.kind == "uniform":
        scaled = RotationProfile.uniform(c * prof.gamma)
    else:
        scaled = RotationProfile.piecewise(*[(z, c * v) for z, v in prof.breakpoints])
    hopf = cfg.bc.hopf
    if hopf is not None:
        hopf = HopfParams(eps=hopf.eps, sigma=hopf.sigma, gamma=c * hopf.gamma)
    return BoundarySpec(profile=scaled, bottom=cfg.bc.bottom, hopf=hopf,
                        outer_swirl=c * cfg.bc.outer_swirl)


def run_solve_pipeline(cfg: RunConfig):
    """Seed (march / stokes / continuation per strategy) and Newton-solve.
    Returns (solution, grid)."""
    grid = build_grid(cfg.domain, cfg.nr, cfg.nz)
    params = cfg.physics
    strategy = cfg.solver.strategy
    newton_cfg = cfg.solver.newton
    scheme = cfg.solver.scheme

    def march_seed(bc, t_scale=1.0):
        m = cfg.solver.march
        mc = MarchConfig(dt=m.dt, t_end=None if m.t_end is None else m.t_end * t_scale,
                         stall_tol=m.stall_tol, cfl_limit=m.cfl_limit)
        return run_until_stalled(FieldSet.zeros(grid), params, bc, grid, mc).fields

    def continuation():
        seed = march_seed(_scaled_bc(cfg, cfg.solver.continuation_start))
        return solve_steady_continued(
            seed, params, lambda c: _scaled_bc(cfg, c), grid, newton_cfg,
            scheme=scheme, c_start=cfg.solver.continuation_start,
            dc=cfg.solver.continuation_step)

    if strategy == "stokes":
        guess = FieldSet.zeros(grid)
        guess.v = solve_swirl_stokes(SwirlStokesProblem(grid=grid, gamma=cfg.gamma(),
                                                        nu=params.nu))
        sol = solve_steady(guess, params, cfg.bc, grid, newton_cfg, scheme=scheme)
    elif strategy == "march":
        sol = solve_steady(march_seed(cfg.bc), params, cfg.bc, grid, newton_cfg,
                           scheme=scheme)
    elif strategy == "continuation":
        sol = continuation()
    else:  # auto: march first, continuation as fallback
        sol = solve_steady(march_seed(cfg.bc), params, cfg.bc, grid, newton_cfg,
                           scheme=scheme)
        if not sol.converged:
            sol = continuation()
    return sol, grid


def _write_outputs(cfg: RunConfig, sol, grid, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    report = build_report(sol.fields, grid, cfg.physics, cfg.bc)
    meta = {
        "nu": cfg.physics.nu,
        "profile": profile_to_string(cfg.bc.profile),
        "bottom": cfg.bc.bottom,
        "converged": str(sol.converged).lower(),
        "newton_iterations": str(len(sol.residual_history) - 1),
    }
    if cfg.bc.bottom == "hopf":
        meta["hopf_eps"] = f"{cfg.bc.hopf.eps:.17g}"
    for line in report.lines():
        k, v = line.split("=", 1)
        meta[f"diag_{k}"] = v
    write_fields(sol.fields, grid, meta, out_dir / cfg.output.fields_file,
                 precision=cfg.output.precision)
    (out_dir / "diagnostics.txt").write_text(
        "\n".join([f"converged={str(sol.converged).lower()}"]
                  + [f"residual_history={','.join(f'{h:.6e}' for h in sol.residual_history)}"]
                  + report.lines()) + "\n")
    (out_dir / "resolved.ini").write_text(resolved_text(cfg))


def cmd_solve(args) -> int:
    cfg = _load_config(args.config)
    sol, grid = run_solve_pipeline(cfg)
    _write_outputs(cfg, sol, grid, Path(args.out))
    if not sol.converged:
        print(f"non-converged: residual {sol.residual_history[-1]:.3e}",
              file=sys.stderr)
        return 2
    print(f"converged in {len(sol.residual_history) - 1} Newton iterations; "
          f"outputs in {args.out}")
    return 0


def cmd_stokes(args) -> int:
    cfg = _load_config(args.config)
    grid = build_grid(cfg.domain, cfg.nr, cfg.nz)
    prob = SwirlStokesProblem(grid=grid, gamma=cfg.gamma(), nu=cfg.physics.nu)
    v = solve_swirl_stokes(prob)
    fields = FieldSet.zeros(grid)
    fields.v = v
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = {"nu": cfg.physics.nu, "profile": profile_to_string(cfg.bc.profile),
            "kind": "swirl-stokes"}
    write_fields(fields, grid, meta, out_dir / cfg.output.fields_file,
                 precision=cfg.output.precision)
    (out_dir / "resolved.ini").write_text(resolved_text(cfg))
    print(f"swirl range [{v.min():.6e}, {v.max():.6e}]; outputs in {args.out}")
    return 0


def cmd_couette(args) -> int:
    cfg = _load_config(args.config)
    grid = build_grid(cfg.domain, cfg.nr, cfg.nz)
    prob = SwirlStokesProblem(grid=grid, gamma=cfg.gamma(), nu=cfg.physics.nu,
                              bottom="neumann", top="neumann")
    v = solve_swirl_stokes(prob)
    exact = couette_exact(cfg.domain.sigma, cfg.domain.R, prob.wall_speed,
                          grid.r_centers)
    err = float(np.max(np.abs(v - exact[:, None])))
    rel = err / float(np.max(np.abs(exact)))
    print(f"max error vs oracle: {err:.6e} (relative {rel:.6e})")
    return 0


def cmd_mms(args) -> int:
    cfg = _load_config(args.config)
    case = ManufacturedCase(domain=cfg.domain, nu=cfg.physics.nu)
    result = convergence_study(case, levels=args.levels, coarsest=args.coarsest)
    for line in result.lines():
        print(line)
    print("final orders:", " ".join(f"{k}={v:.3f}"
                                    for k, v in sorted(result.final_orders().items())))
    return 0


def cmd_sweep(args) -> int:
    base_text = Path(args.config).read_text()
    try:
        section, key_values = args.vary.split(".", 1)
        key, values_raw = key_values.split("=", 1)
        values = [v.strip() for v in values_raw.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad --vary, want section.key=v1,v2,..., got {args.vary!r}")
    if not values:
        raise ConfigError("no sweep values given")
    worst = 0
    for val in values:
        text = _override(base_text, section, key, val)
        cfg = parse_config(text)
        sol, grid = run_solve_pipeline(cfg)
        sub = Path(args.out) / f"{section}.{key}={val}"
        _write_outputs(cfg, sol, grid, sub)
        status = "converged" if sol.converged else "NON-CONVERGED"
        print(f"{section}.{key}={val}: {status}")
        if not sol.converged:
            worst = 2
    return worst


def _override(text: str, section: str, key: str, value: str) -> str:
    """Set [section] key = value in the INI text (replace or append)."""
    lines = text.splitlines()
    out = []
    in_section = False
    replaced = False
    for line in lines:
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            if in_section and not replaced:
                out.append(f"{key} = {value}")
                replaced = True
            in_section = stripped[1:-1] == section
        elif in_section and stripped.split("=")[0].strip() == key:
            out.append(f"{key} = {value}")
            replaced = True
            continue
        out.append(line)
    if not replaced:
        if in_section:
            out.append(f"{key} = {value}")
        else:
            raise ConfigError(f"--vary section [{section}] not in config")
    return "\n".join(out)


def cmd_diag(args) -> int:
    ff = read_fields(args.field)
    grid = ff.grid()
    params = bc = None
    try:
        from .ops import PhysParams

        params = PhysParams(nu=ff.nu)
        bc = BoundarySpec(profile=profile_from_string(ff.profile),
                          bottom="noslip")
    except (ConfigError, OpsError):
        pass  # residual norms are optional when the header lacks usable data
    report = build_report(ff.fields, grid, params, bc)
    for line in report.lines():
        print(line)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; keep 1 for validation
        self.exit(1, f"{self.prog}: error: {message}\n")


def main(argv=None) -> int:
    parser = _Parser(prog="vortexflow",
                     description="Steady axisymmetric rotating-cylinder vortex solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="march/continuation seed + Newton solve")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("stokes", help="linear azimuthal Stokes solve")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stokes)

    p = sub.add_parser("couette", help="double-Neumann solve vs analytic oracle")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_couette)

    p = sub.add_parser("mms", help="manufactured-solution convergence study")
    p.add_argument("--config", required=True)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--coarsest", type=int, default=32)
    p.set_defaults(func=cmd_mms)

    p = sub.add_parser("sweep", help="run solve over a list of values")
    p.add_argument("--config", required=True)
    p.add_argument("--vary", required=True,
                   help="section.key=v1,v2,... (e.g. physics.nu=0.02,0.01)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("diag", help="print diagnostics of a field file")
    p.add_argument("--field", required=True)
    p.set_defaults(func=cmd_diag)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NewtonError, MarchDivergedError, LinearSolveError, StudyError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
