"""ARMA graph filter representation, stability checking, and direct application.

An ARMA filter applies (sum a_p S^p)^{-1} (sum b_q S^q); the direct solver
here is the dense-factorization reference that the conjugate-gradient path
is validated against.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    InstabilityError,
    ParameterError,
    SingularSystemError,
)
from .fir import FirFilter, fir_apply
from .graphs import ShiftOperator
from .spectral import FrequencyGrid

_DIRECT_SOLVE_MAX_N = 2000
DEFAULT_STABILITY_THRESHOLD = 1e-8


@dataclass(frozen=True)
class ArmaFilter:
    """Rational filter coefficients: denominator a (a0 = 1) and numerator b."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a.ndim != 1 or a.size == 0 or b.ndim != 1 or b.size == 0:
            raise ParameterError("coefficient vectors must be non-empty")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ParameterError("coefficients must be finite")
        if a[0] != 1.0:
            raise ParameterError(f"first AR coefficient must be 1, got {a[0]}")

    @property
    def ar_order(self) -> int:
        return len(self.a) - 1

    @property
    def ma_order(self) -> int:
        return len(self.b) - 1


@dataclass(frozen=True)
class StabilityReport:
    min_denominator_magnitude: float
    stable: bool
    offending: tuple
    threshold: float


def _denominator(filt: ArmaFilter, grid: FrequencyGrid) -> np.ndarray:
    psi = grid.lambdas[:, None] ** np.arange(len(filt.a))[None, :]
    return psi @ filt.a


def arma_response(filt: ArmaFilter, grid: FrequencyGrid) -> np.ndarray:
    """Frequency response (sum b_q lambda^q) / (sum a_p lambda^p)."""
    denom = _denominator(filt, grid)
    bad = np.flatnonzero(np.abs(denom) <= 1e-12)
    if bad.size:
        raise InstabilityError(
            f"denominator vanishes at grid index {int(bad[0])}",
            offending=[int(i) for i in bad],
        )
    psi_b = grid.lambdas[:, None] ** np.arange(len(filt.b))[None, :]
    return (psi_b @ filt.b) / denom


def check_stability(
    filt: ArmaFilter,
    grid: FrequencyGrid,
    threshold: float = DEFAULT_STABILITY_THRESHOLD,
) -> StabilityReport:
    """Post-design check that the denominator stays away from zero on the grid."""
    mags = np.abs(_denominator(filt, grid))
    offending = tuple(int(i) for i in np.flatnonzero(mags <= threshold))
    return StabilityReport(
        min_denominator_magnitude=float(np.min(mags)),
        stable=not offending,
        offending=offending,
        threshold=threshold,
    )


def arma_polynomial_matrix(filt: ArmaFilter, op: ShiftOperator) -> np.ndarray:
    """Dense sum a_p S^p; the left-hand operator of the ARMA linear system."""
    s = op.dense()
    out = filt.a[0] * np.eye(op.n)
    power = np.eye(op.n)
    for p in range(1, len(filt.a)):
        power = power @ s
        out += filt.a[p] * power
    return out


def arma_apply_direct(filt: ArmaFilter, op: ShiftOperator, x) -> np.ndarray:
    """Exact ARMA application: pre-filter with the numerator, then solve.

    Uses a partial-pivoting dense factorization; the desk-scale reference
    oracle for the conjugate-gradient path (n capped at 2000).
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (op.n,):
        raise DimensionError(f"signal length {x.shape} does not match n={op.n}")
    if op.n > _DIRECT_SOLVE_MAX_N:
        raise ParameterError(
            f"direct solve capped at n={_DIRECT_SOLVE_MAX_N}; use the CG path"
        )
    z = fir_apply(FirFilter(g=filt.b), op, x)
    p_mat = arma_polynomial_matrix(filt, op)
    try:
        return np.linalg.solve(p_mat, z)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError("AR polynomial matrix is singular") from exc


def arma_to_json(filt: ArmaFilter) -> str:
    return json.dumps(
        {"type": "arma", "a": [float(v) for v in filt.a], "b": [float(v) for v in filt.b]}
    )


def arma_from_json(text: str) -> ArmaFilter:
    payload = json.loads(text)
    if payload.get("type") != "arma":
        raise ParameterError(f"expected filter type 'arma', got {payload.get('type')!r}")
    a = np.asarray(payload["a"], dtype=float)
    if a.size == 0 or a[0] != 1.0:
        raise ParameterError("loaded ARMA filter must have a0 = 1")
    return ArmaFilter(a=a, b=np.asarray(payload["b"], dtype=float))
