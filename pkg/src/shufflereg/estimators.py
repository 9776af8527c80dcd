"""Estimators for the row-shuffled linear model.

* ``one_step_estimate`` — one assignment solve on the cost Y Y^T X X^T,
  followed by one least-squares solve. Tuning-free: needs neither the noise
  level nor the number of displaced rows.
* ``oracle_permutation_estimate`` — assignment solve with the true signal as
  the matching direction (invariant to positive rescaling of it).
* ``least_squares_signal`` — signal recovery for a known permutation using an
  orthogonal factorization; the normal equations are never formed.
* ``alternating_minimization`` — diagnostic baseline alternating assignment
  and least-squares steps; reports a full per-iteration trace so stagnation
  is observable.
* ``reduce_known_direction`` — collapses a p-column problem with known signal
  direction to the single-column model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from . import instrument
from .lap import Assignment, lap_maximize
from .metrics import hamming_distance
from .model import Permutation, apply_permutation, require_matrix

_RANK_RTOL = 1e-10


class RankDeficiencyError(ValueError):
    """Design matrix is numerically rank deficient for least squares."""


@dataclass(frozen=True)
class EstimationResult:
    perm_hat: Permutation
    b_hat: np.ndarray
    objective: float
    iterations: int


@dataclass(frozen=True)
class AltMinRecord:
    iteration: int
    perm: Permutation
    residual: float
    hamming: int | None  # distance to the reference permutation, when given


@dataclass(frozen=True)
class AltMinResult:
    perm_hat: Permutation
    b_hat: np.ndarray
    objective: float
    iterations: int
    trace: tuple[AltMinRecord, ...]


def _validate_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    xa = require_matrix(x, "x")
    ya = require_matrix(y, "y")
    if xa.shape[0] != ya.shape[0]:
        raise ValueError(f"x has {xa.shape[0]} rows but y has {ya.shape[0]}")
    return xa, ya


def _qr_full_rank(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Economic QR of x, raising RankDeficiencyError below the spectral cutoff."""
    q, r = np.linalg.qr(x, mode="reduced")
    # Singular values of R equal those of x since Q has orthonormal columns.
    svals = np.linalg.svd(r, compute_uv=False)
    if svals[-1] < _RANK_RTOL * svals[0]:
        cond = np.inf if svals[-1] == 0 else svals[0] / svals[-1]
        raise RankDeficiencyError(
            f"design matrix is numerically rank deficient "
            f"(condition estimate {cond:.3e}, cutoff {1 / _RANK_RTOL:.1e})"
        )
    return q, r


def least_squares_signal(x, y, perm: Permutation) -> np.ndarray:
    """argmin_B || inverse-permuted Y - X B ||_F via QR, columnwise back-substitution."""
    xa, ya = _validate_pair(x, y)
    n, p = xa.shape
    if n < p:
        raise ValueError(f"least squares needs n >= p, got n={n}, p={p}")
    if len(perm) != n:
        raise ValueError(f"permutation length {len(perm)} != n={n}")
    instrument.record("ls_solve")
    q, r = _qr_full_rank(xa)
    aligned = apply_permutation(perm.inverse(), ya)
    return solve_triangular(r, q.T @ aligned, lower=False)


def _cost_flops_gram(n: int, p: int, m: int) -> int:
    # (Y Y^T)(X X^T): two Gram products then an n x n square multiply.
    return n * n * m + n * n * p + n * n * n


def _cost_flops_factored(n: int, p: int, m: int) -> int:
    # (Y (Y^T X)) X^T: two skinny products then one n x n assembly.
    return 2 * n * m * p + n * n * p


def _onestep_cost_gram(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return (y @ y.T) @ (x @ x.T)


def _onestep_cost_factored(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return (y @ (y.T @ x)) @ x.T


def build_onestep_cost(x, y) -> np.ndarray:
    """n-by-n matching cost C = Y Y^T X X^T, associated to minimize flops."""
    xa, ya = _validate_pair(x, y)
    n, p = xa.shape
    m = ya.shape[1]
    if _cost_flops_factored(n, p, m) <= _cost_flops_gram(n, p, m):
        return _onestep_cost_factored(xa, ya)
    return _onestep_cost_gram(xa, ya)


def one_step_estimate(x, y) -> EstimationResult:
    """Single assignment solve on Y Y^T X X^T, then one least-squares solve."""
    xa, ya = _validate_pair(x, y)
    n, p = xa.shape
    if n < p:
        raise ValueError(f"one-step estimation needs n >= p, got n={n}, p={p}")
    assignment = lap_maximize(build_onestep_cost(xa, ya))
    b_hat = least_squares_signal(xa, ya, assignment.perm)
    return EstimationResult(
        perm_hat=assignment.perm,
        b_hat=b_hat,
        objective=assignment.objective,
        iterations=1,
    )


def oracle_permutation_estimate(x, y, b_true) -> Permutation:
    """Assignment solve on Y (X B)^T for a known matching direction B."""
    xa, ya = _validate_pair(x, y)
    ba = require_matrix(b_true, "b_true")
    if ba.shape[0] != xa.shape[1]:
        raise ValueError(f"b_true has {ba.shape[0]} rows but x has {xa.shape[1]} columns")
    if ba.shape[1] != ya.shape[1]:
        raise ValueError(f"b_true has {ba.shape[1]} columns but y has {ya.shape[1]}")
    return lap_maximize(ya @ (xa @ ba).T).perm


def _residual(x: np.ndarray, y: np.ndarray, perm: Permutation, b: np.ndarray) -> float:
    return float(np.linalg.norm(y - apply_permutation(perm, x @ b)))


def alternating_minimization(
    x,
    y,
    init_b=None,
    max_iters: int = 100,
    *,
    ref_perm: Permutation | None = None,
    stop_on_repeat: bool = True,
) -> AltMinResult:
    """Alternate assignment and least-squares steps starting from ``init_b``.

    ``init_b`` defaults to X^T Y, so iteration 0 reproduces the one-step
    estimate. Each half-step minimizes the shared residual ||Y - P X B||_F,
    which is therefore non-increasing along the trace. Stops after
    ``max_iters`` further iterations, or earlier once the permutation repeats
    (a fixed point) unless ``stop_on_repeat`` is false. When ``ref_perm`` is
    given, each record carries the Hamming distance to it.
    """
    xa, ya = _validate_pair(x, y)
    n, p = xa.shape
    if n < p:
        raise ValueError(f"alternating minimization needs n >= p, got n={n}, p={p}")
    if max_iters < 0:
        raise ValueError(f"max_iters must be >= 0, got {max_iters}")
    b = require_matrix(init_b, "init_b") if init_b is not None else xa.T @ ya

    trace: list[AltMinRecord] = []
    perm_prev: Permutation | None = None
    assignment: Assignment | None = None
    b_hat = b
    for t in range(max_iters + 1):
        assignment = lap_maximize(ya @ (xa @ b).T)
        perm = assignment.perm
        b_hat = least_squares_signal(xa, ya, perm)
        trace.append(
            AltMinRecord(
                iteration=t,
                perm=perm,
                residual=_residual(xa, ya, perm, b_hat),
                hamming=None if ref_perm is None else hamming_distance(perm, ref_perm),
            )
        )
        if stop_on_repeat and perm_prev is not None and perm == perm_prev:
            break
        perm_prev = perm
        b = b_hat
    return AltMinResult(
        perm_hat=trace[-1].perm,
        b_hat=b_hat,
        objective=assignment.objective,
        iterations=len(trace),
        trace=tuple(trace),
    )


def complete_orthonormal_basis(e) -> np.ndarray:
    """Orthonormal p-by-p matrix whose first column is the unit vector ``e``.

    Gram-Schmidt over [e, I] with a second orthogonalization pass, so
    Q^T Q = I holds to ~1e-15.
    """
    vec = np.asarray(e, dtype=np.float64).reshape(-1)
    p = vec.size
    if p < 1:
        raise ValueError("direction vector must be non-empty")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"direction must be a unit vector, got norm {norm!r}")
    cols = [vec / norm]
    for k in range(p):
        if len(cols) == p:
            break
        v = np.zeros(p)
        v[k] = 1.0
        for _ in range(2):
            for c in cols:
                v = v - (c @ v) * c
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            cols.append(v / nrm)
    if len(cols) != p:  # pragma: no cover - [e, I] always spans R^p
        raise ValueError("failed to complete an orthonormal basis")
    return np.column_stack(cols)


def reduce_known_direction(x, e) -> np.ndarray:
    """Project the design onto a known unit signal direction.

    Returns the first column of X Q as an n-by-1 matrix, where Q completes
    ``e`` to an orthonormal basis; the p-column problem with known direction
    then reads as the single-column model on that projection.
    """
    xa = require_matrix(x, "x")
    q = complete_orthonormal_basis(e)
    if q.shape[0] != xa.shape[1]:
        raise ValueError(f"direction has length {q.shape[0]} but x has {xa.shape[1]} columns")
    return (xa @ q)[:, :1]
