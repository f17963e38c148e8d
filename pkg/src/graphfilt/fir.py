"""FIR graph filter design by least squares on a frequency grid.

The design solves g = pinv(Psi) h for the Vandermonde matrix Psi of the
grid frequencies; conjugate-pair symmetry of the desired response makes the
solution real-valued up to floating-point residue.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericalFailureError, ParameterError
from .graphs import ShiftOperator, shift_apply
from .spectral import FrequencyGrid, validate_conjugate_pairs

_LSTSQ_RCOND = 1e-12
_IMAG_TRUNCATE_TOL = 1e-6


@dataclass(frozen=True)
class FirFilter:
    """Polynomial filter coefficients g0..gK applied as sum g_k S^k."""

    g: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        object.__setattr__(self, "g", g)
        if g.ndim != 1 or g.size == 0:
            raise ParameterError("coefficients must be a non-empty vector")
        if not np.all(np.isfinite(g)):
            raise ParameterError("coefficients must be finite")

    @property
    def order(self) -> int:
        return len(self.g) - 1


@dataclass(frozen=True)
class VandermondeSystem:
    """Vandermonde matrix of grid frequencies with a conditioning estimate."""

    psi: np.ndarray
    lambdas: np.ndarray
    condition_estimate: float


@dataclass(frozen=True)
class FirDesign:
    filter: FirFilter
    rnmse: float
    imag_residue: float
    condition_estimate: float


def vandermonde(grid: FrequencyGrid, cols: int) -> VandermondeSystem:
    """N x cols matrix of ascending frequency powers, [psi]_{n,k} = lambda_n^k."""
    if cols < 1:
        raise ParameterError(f"need at least one column, got {cols}")
    psi = grid.lambdas[:, None] ** np.arange(cols)[None, :]
    return VandermondeSystem(
        psi=psi,
        lambdas=grid.lambdas.copy(),
        condition_estimate=float(np.linalg.cond(psi)),
    )


def group_close_frequencies(grid: FrequencyGrid, h_hat, tol: float):
    """Merge grid points closer than tol, averaging their desired responses.

    Optional conditioning aid; returns (grid, h_hat) with representatives of
    each cluster. Clustering is greedy in index order, so conjugate-pair
    structure survives for symmetric inputs.
    """
    from .spectral import pair_conjugates

    lam = grid.lambdas
    h = np.asarray(h_hat, dtype=complex)
    taken = np.zeros(grid.n, dtype=bool)
    new_lam, new_h = [], []
    for i in range(grid.n):
        if taken[i]:
            continue
        cluster = np.flatnonzero(~taken & (np.abs(lam - lam[i]) <= tol))
        taken[cluster] = True
        new_lam.append(lam[cluster].mean())
        new_h.append(h[cluster].mean())
    pair, lam_adj = pair_conjugates(np.array(new_lam))
    merged = FrequencyGrid(lambdas=lam_adj, kind=grid.kind, pair=pair)
    return merged, np.array(new_h)


def _solve_real_lstsq(matrix, rhs):
    """Complex least squares whose minimizer is real under pair symmetry.

    Returns (solution, max imaginary residue before truncation, rank).
    """
    if matrix.shape[1] == 0:
        return np.zeros(0), 0.0, 0
    theta, _, rank, _ = np.linalg.lstsq(matrix, rhs, rcond=_LSTSQ_RCOND)
    residue = float(np.max(np.abs(theta.imag))) if np.iscomplexobj(theta) else 0.0
    return theta.real, residue, int(rank)


def fir_design(
    grid: FrequencyGrid,
    h_hat,
    order: int,
    group_tol: float | None = None,
) -> FirDesign:
    """Fit FIR coefficients to a desired response by least squares.

    The response must satisfy the grid's conjugate-pair symmetry; the
    resulting coefficients are real up to numerical residue, which is
    truncated when below tolerance and rejected above it.
    """
    if order < 0:
        raise ParameterError(f"order must be non-negative, got {order}")
    h = np.asarray(h_hat, dtype=complex)
    validate_conjugate_pairs(h, grid)
    if group_tol is not None:
        grid, h = group_close_frequencies(grid, h, group_tol)
    if grid.n < order + 1:
        raise ParameterError(f"need at least {order + 1} grid points, got {grid.n}")
    system = vandermonde(grid, order + 1)
    g, residue, _ = _solve_real_lstsq(system.psi, h)
    if residue > _IMAG_TRUNCATE_TOL:
        raise NumericalFailureError(
            f"imaginary residue {residue:.3e} exceeds {_IMAG_TRUNCATE_TOL:.0e}"
        )
    filt = FirFilter(g=g)
    fitted = system.psi @ filt.g
    rnmse = float(np.linalg.norm(h - fitted) / np.linalg.norm(h)) if np.any(h) else float(
        np.linalg.norm(fitted)
    )
    return FirDesign(
        filter=filt,
        rnmse=rnmse,
        imag_residue=residue,
        condition_estimate=system.condition_estimate,
    )


def fir_response(filt: FirFilter, grid: FrequencyGrid) -> np.ndarray:
    """Frequency response sum g_k lambda^k at every grid point."""
    psi = grid.lambdas[:, None] ** np.arange(len(filt.g))[None, :]
    return psi @ filt.g


def fir_apply(filt: FirFilter, op: ShiftOperator, x) -> np.ndarray:
    """Apply sum g_k S^k to a signal via nested shifts, O(K E)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (op.n,):
        raise DimensionError(f"signal length {x.shape} does not match n={op.n}")
    y = filt.g[0] * x
    power = x
    for k in range(1, len(filt.g)):
        power = shift_apply(op, power)
        y = y + filt.g[k] * power
    return y


@dataclass(frozen=True)
class FirMatrixFit:
    filter: FirFilter
    frobenius_error: float
    rank: int
    rank_deficient: bool


def fir_matrix_fit(target, op: ShiftOperator, order: int) -> FirMatrixFit:
    """Fit sum g_k S^k to a target matrix in the Frobenius norm.

    Least squares over vectorized shift powers; rank deficiency is reported
    and the minimum-norm solution returned.
    """
    t = np.asarray(target, dtype=float)
    n = op.n
    if t.shape != (n, n):
        raise DimensionError(f"target shape {t.shape} does not match ({n},{n})")
    if n * n < order + 1:
        raise ParameterError(f"n^2={n * n} rows cannot fit {order + 1} coefficients")
    s = op.dense()
    cols = np.empty((n * n, order + 1))
    power = np.eye(n)
    cols[:, 0] = power.ravel()
    for k in range(1, order + 1):
        power = power @ s
        cols[:, k] = power.ravel()
    g, _, rank, _ = np.linalg.lstsq(cols, t.ravel(), rcond=_LSTSQ_RCOND)
    filt = FirFilter(g=g)
    err = float(np.linalg.norm(cols @ g - t.ravel()))
    return FirMatrixFit(
        filter=filt, frobenius_error=err, rank=int(rank), rank_deficient=rank < order + 1
    )


def fir_to_json(filt: FirFilter) -> str:
    return json.dumps({"type": "fir", "g": [float(v) for v in filt.g]})


def fir_from_json(text: str) -> FirFilter:
    payload = json.loads(text)
    if payload.get("type") != "fir":
        raise ParameterError(f"expected filter type 'fir', got {payload.get('type')!r}")
    return FirFilter(g=np.asarray(payload["g"], dtype=float))
