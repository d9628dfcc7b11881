"""Steady-state Newton solver on the fully coupled (u, v, w, p) system.

The analytic Jacobian is assembled per iteration, the linear step solved
with the sparse direct path by default, and a backtracking (halving) line
search on the residual max-norm guards against overshoot at the higher
Reynolds numbers. Convergence is judged on the full residual, boundary rows
and the pinned-pressure gauge included.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bc import as_discrete
from .grid import StaggeredGrid
from .linsolve import LinearSolveError, solve_linear
from .ops import (
    DofMap,
    FieldSet,
    MomentumSources,
    PhysParams,
    apply_dirichlet,
    assemble_jacobian,
    flatten_residual,
    steady_residual,
)


class NewtonError(RuntimeError):
    """Unrecoverable solver failure (singular Jacobian, non-finite state)."""


@dataclass
class NewtonConfig:
    tol_abs: float = 1e-10
    max_iters: int = 30
    damping: float = 1.0
    linear_method: str = "direct"
    line_search_floor: float = 1e-4

    def __post_init__(self):
        if not self.tol_abs > 0:
            raise ValueError(f"need tol_abs > 0, got {self.tol_abs}")
        if not (0.0 < self.damping <= 1.0):
            raise ValueError(f"need damping in (0, 1], got {self.damping}")


@dataclass
class SteadySolution:
    fields: FieldSet
    residual_history: list[float] = field(default_factory=list)
    converged: bool = False
    iterations: int = 0


def solve_steady(initial: FieldSet, params: PhysParams, bc, grid: StaggeredGrid,
                 cfg: NewtonConfig | None = None, scheme: str = "centered",
                 sources: MomentumSources | None = None) -> SteadySolution:
    """Newton iteration from an initial guess that satisfies the boundary
    values. Returns a converged solution or the non-converged history (only
    a singular Jacobian or non-finite state raises)."""
    cfg = cfg or NewtonConfig()
    dbc = as_discrete(bc, grid)
    dof = DofMap(grid)
    fields = initial.copy()
    fields.p = fields.p - fields.p[0, 0]  # gauge shift, free constant
    x = dof.pack(fields)
    history: list[float] = []

    def norm_of(xvec):
        f = dof.unpack(xvec, grid)
        resid = steady_residual(f, params, dbc, grid, scheme=scheme, sources=sources)
        F = flatten_residual(resid, f, dbc, grid, dof)
        return max(resid.max_norm(), float(np.max(np.abs(F)))), f

    rnorm, fields = norm_of(x)
    history.append(rnorm)
    for it in range(1, cfg.max_iters + 1):
        if rnorm <= cfg.tol_abs:
            return SteadySolution(fields, history, converged=True, iterations=it - 1)
        system = assemble_jacobian(fields, params, dbc, grid, scheme=scheme,
                                   sources=sources)
        try:
            delta = solve_linear(system, tol=1e-8, method=cfg.linear_method)
        except LinearSolveError as exc:
            raise NewtonError(f"linear step failed at iteration {it}: {exc}") from exc

        alpha = cfg.damping
        while True:
            trial_norm, trial_fields = norm_of(x + alpha * delta)
            if np.isfinite(trial_norm) and trial_norm < rnorm * (1.0 - 1e-4 * alpha):
                break
            if alpha <= cfg.line_search_floor:
                break
            alpha = max(alpha / 2.0, cfg.line_search_floor)
        if not np.isfinite(trial_norm):
            raise NewtonError(f"non-finite residual in line search at iteration {it}")
        fields = trial_fields
        apply_dirichlet(fields, dbc)  # keep Dirichlet faces exact, not just to LU roundoff
        x = dof.pack(fields)
        rnorm = trial_norm
        history.append(rnorm)

    converged = rnorm <= cfg.tol_abs
    return SteadySolution(fields, history, converged=converged,
                          iterations=cfg.max_iters)


def solve_steady_continued(initial: FieldSet, params: PhysParams,
                           bc_at_amplitude, grid: StaggeredGrid,
                           cfg: NewtonConfig | None = None,
                           scheme: str = "centered",
                           c_start: float = 0.2,
                           dc: float = 0.2,
                           dc_min: float = 0.005) -> SteadySolution:
    """Amplitude continuation to the full boundary data.

    `bc_at_amplitude(c)` must return the boundary spec with the wall data
    scaled by c in (0, 1]. Newton is solved along an adaptive ramp of c;
    needed because the evolutionary flow does not settle at the higher
    Reynolds numbers (the steady state exists but is unstable), so a
    large-time march cannot supply a close enough guess on its own.
    """
    cfg = cfg or NewtonConfig()
    fields = initial
    c = c_start
    sol = solve_steady(fields, params, bc_at_amplitude(c), grid, cfg, scheme)
    if not sol.converged:
        return sol
    fields = sol.fields
    step = dc
    while c < 1.0:
        c_next = min(1.0, c + step)
        trial = solve_steady(fields, params, bc_at_amplitude(c_next), grid, cfg,
                             scheme)
        if trial.converged:
            c = c_next
            fields = trial.fields
            sol = trial
            if len(trial.residual_history) <= 7:
                step = min(1.3 * step, 0.25)
        else:
            step /= 2.0
            if step < dc_min:
                return trial  # non-converged result at the failing amplitude
    return sol
