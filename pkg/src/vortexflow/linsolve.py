"""Sparse systems and the linear solvers behind the Stokes, marching, and
Newton paths: sparse LU (default, robust near turning points at desk-scale
grids) and restarted GMRES with an incomplete-LU preconditioner for larger
problems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class LinearSolveError(RuntimeError):
    """Solver breakdown or non-convergence; carries the residual history."""

    def __init__(self, message: str, history: list[float] | None = None):
        super().__init__(message)
        self.history = history or []


@dataclass
class SparseSystem:
    """CSR matrix plus right-hand side (gauge rows already applied)."""

    matrix: sp.csr_matrix
    rhs: np.ndarray

    def __post_init__(self):
        self.matrix = sp.csr_matrix(self.matrix)
        self.rhs = np.asarray(self.rhs, dtype=float)
        if self.matrix.shape[0] != self.matrix.shape[1]:
            raise LinearSolveError(f"matrix is not square: {self.matrix.shape}")
        if self.rhs.shape != (self.matrix.shape[0],):
            raise LinearSolveError(
                f"rhs has shape {self.rhs.shape}, expected {(self.matrix.shape[0],)}"
            )

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def check_format(self) -> None:
        """Validate the CSR invariants (sorted per-row indices, monotone offsets)."""
        m = self.matrix
        if not np.all(np.diff(m.indptr) >= 0):
            raise LinearSolveError("row offsets not monotone")
        if m.nnz and (m.indices.min() < 0 or m.indices.max() >= self.n):
            raise LinearSolveError("column index out of range")
        if not m.has_sorted_indices:
            raise LinearSolveError("column indices not sorted within rows")

    def residual_norm(self, x: np.ndarray) -> float:
        b = self.rhs
        scale = np.linalg.norm(b)
        res = np.linalg.norm(self.matrix @ x - b)
        return res / scale if scale > 0 else res


def solve_linear(system: SparseSystem, tol: float = 1e-10,
                 method: str = "direct", max_iter: int = 2000) -> np.ndarray:
    """Solve Ax=b to a relative residual <= tol.

    method="direct": sparse LU with partial pivoting (SuperLU).
    method="iterative": restarted GMRES preconditioned with ILU.
    """
    system.check_format()
    A = system.matrix.tocsc()
    b = system.rhs

    if method == "direct":
        try:
            lu = spla.splu(A)
        except RuntimeError as exc:  # structurally/numerically singular
            raise LinearSolveError(f"sparse LU failed: {exc}") from exc
        x = lu.solve(b)
        res = system.residual_norm(x)
        if not np.isfinite(res) or res > tol:
            raise LinearSolveError(
                f"direct solve residual {res:.3e} exceeds tol {tol:.3e}", [res]
            )
        return x

    if method != "iterative":
        raise LinearSolveError(f"unknown method {method!r}")

    try:
        ilu = spla.spilu(A, drop_tol=1e-5, fill_factor=20)
    except RuntimeError as exc:
        raise LinearSolveError(f"ILU factorization failed: {exc}") from exc
    M = spla.LinearOperator(A.shape, ilu.solve)
    history: list[float] = []
    bnorm = np.linalg.norm(b)

    def callback(rk):
        history.append(float(rk))

    x, info = spla.gmres(A, b, rtol=tol, atol=tol * bnorm, restart=80,
                         maxiter=max_iter, M=M, callback=callback,
                         callback_type="pr_norm")
    if info != 0:
        raise LinearSolveError(
            f"GMRES did not converge within {max_iter} iterations (info={info})",
            history,
        )
    res = system.residual_norm(x)
    if not np.isfinite(res) or res > 10 * tol:
        raise LinearSolveError(
            f"GMRES returned residual {res:.3e} above tol {tol:.3e}", history
        )
    return x
