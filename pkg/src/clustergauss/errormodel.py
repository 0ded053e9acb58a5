"""Closed-form implementation-error variances and the phase optimizer.

All variances are reported in units of the resource squeezed-quadrature
variance: multiply by ``SqueezingSpec.var_y`` to get absolute numbers.

Two algebraically equivalent routes exist for the Gaussian scheme:

* ``error_vector_raw`` evaluates the error directly from measurement
  phases (the form the derivation produces first);
* ``error_vector_gaussian`` evaluates the substituted closed form in the
  target entries (b, d) and theta4'.

They are kept as separate code paths on purpose — their agreement on
random instances is a regression check on the whole phase-solution
algebra, so neither is implemented in terms of the other.

The x-component of the error always carries a term scaled by
1/(12*gamma*I_m) in the cubic variant where the Gaussian scheme has the
same term at full weight; the cubic error is therefore never larger,
candidate-for-candidate, than the Gaussian one.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import (
    POLE_TOL,
    CubicConfig,
    DenominatorPole,
    DomainError,
    ErrorVector,
    NonpositiveIm,
    PhaseSet,
    SymplecticTarget,
    WeightConfig,
    arccot,
    validate_target,
)

__all__ = [
    "MODES",
    "ErrorSurfaceSpec",
    "ErrorSurface",
    "OptimizeResult",
    "error_vector_raw",
    "error_vector_gaussian",
    "error_vector_cubic",
    "inf_norm",
    "optimize_theta4",
    "error_surface",
    "theta4_candidates",
]

MODE_GAUSSIAN_FIXED = "gaussian_fixed_phase"
MODE_GAUSSIAN_OPTIMIZED = "gaussian_optimized_phase"
MODE_CUBIC_OPTIMIZED = "cubic_optimized_phase"
MODES = (MODE_GAUSSIAN_FIXED, MODE_GAUSSIAN_OPTIMIZED, MODE_CUBIC_OPTIMIZED)

_GOLDEN_ITERATIONS = 90
_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


class OptimizeResult(NamedTuple):
    """Minimizing node-3 phase and the minimized inf-norm error."""

    theta4p: float
    err_inf: float


def inf_norm(e: ErrorVector) -> float:
    """Scalar error measure: max of the two quadrature error variances."""
    return e.inf_norm


def _components_from_cots(cot3, u4, w: WeightConfig, mid_weight):
    """(ex, ey) from stage-two cotangents.

    ``mid_weight`` scales the middle term of each component: 1 for the
    Gaussian scheme, 1/(12*gamma*I_m) for the cubic variant.
    """
    g1, g2, g3, g4 = w.as_tuple()
    r2 = w.g3_over_g2
    ex = (1.0 / g1**2) * ((cot3 * u4 - 1.0) / r2) ** 2 \
        + mid_weight * (u4 / r2) ** 2 + 1.0 / g3**2
    ey = (1.0 / g1**2) * (r2 * cot3) ** 2 + mid_weight * r2**2 + 1.0
    return ex, ey


def _solved_cot3(b, d, u4, w: WeightConfig, pole_tol: float = POLE_TOL):
    """Stage-two node cot solved from (b, d) at a given cot(theta4').

    Returns (cot3, pole_mask); on the removable 0/0 set (vanishing
    denominator with d equal to the weight cross ratio) the finite limit
    cot3 = 0 is used and the cell is not flagged.
    """
    b, d, u4 = np.broadcast_arrays(
        *(np.asarray(x, dtype=float) for x in (b, d, u4))
    )
    r2 = w.g3_over_g2
    ratio = w.cross_ratio
    denom = r2**2 * b + d * u4
    near = np.abs(denom) <= pole_tol
    scale = np.maximum(np.maximum(np.abs(d), ratio), 1.0)
    resolvable = near & (np.abs(d - ratio) <= 1e-9 * scale)
    pole = near & ~resolvable
    with np.errstate(divide="ignore", invalid="ignore"):
        cot3 = np.where(near, 0.0, (d - ratio) / np.where(near, 1.0, denom))
    return cot3, pole


def error_vector_raw(phases: PhaseSet, w: WeightConfig) -> ErrorVector:
    """Error variances evaluated directly from the measurement phases.

    Args:
        phases: homodyne phases (only theta3 and theta4' enter).
        w: cluster weights.

    Returns:
        ErrorVector in units of the squeezed-quadrature variance.
    """
    ex, ey = _components_from_cots(phases.cot3, phases.cot4p, w, 1.0)
    return ErrorVector(float(ex), float(ey))


def error_vector_gaussian(
    target: SymplecticTarget, w: WeightConfig, theta4p: float,
    *, pole_tol: float = POLE_TOL,
) -> ErrorVector:
    """Error variances in closed form from the target entries (b, d).

    Args:
        target: symplectic target; only b and d enter the result.
        w: cluster weights.
        theta4p: node-3 measurement phase in (0, pi).

    Returns:
        ErrorVector in units of the squeezed-quadrature variance.

    Raises:
        DenominatorPole: if b + d*(g2/g3)^2*cot(theta4') vanishes away
            from the removable set d = g1*g3/(g2*g4), where the finite
            0/0 limit is returned instead.
    """
    validate_target(target)
    g1, g2, g3, g4 = w.as_tuple()
    b, d = target.b, target.d
    if not (0.0 < theta4p < np.pi):
        raise DomainError(f"theta4p = {theta4p!r} outside (0, pi)")
    u4 = float(np.cos(theta4p) / np.sin(theta4p))

    r2 = w.g3_over_g2
    denom = b + d * (g2 / g3) ** 2 * u4
    if abs(denom) * r2**2 <= pole_tol:
        scale = max(abs(d), w.cross_ratio, 1.0)
        if abs(d - w.cross_ratio) <= 1e-9 * scale:
            ex, ey = _components_from_cots(0.0, u4, w, 1.0)
            return ErrorVector(float(ex), float(ey))
        raise DenominatorPole(
            "error denominator b + d*(g2/g3)^2*cot(theta4') vanishes"
        )
    ex = 1.0 / g3**2 + (g2 / g3) ** 2 * u4**2 \
        + g2**2 * (b * g4 / g1 + (g2 / g3) * u4) ** 2 \
        / (g3**2 * g4**2 * denom**2)
    ey = 1.0 + (g3 / g2) ** 2 \
        + (d * (g2 / g3) * (g4 / g1) - 1.0) ** 2 / (g4**2 * denom**2)
    return ErrorVector(float(ex), float(ey))


def error_vector_cubic(
    target: Optional[SymplecticTarget],
    w: WeightConfig,
    theta3p: Optional[float],
    theta4p: float,
    cubic: CubicConfig,
) -> ErrorVector:
    """Error variances of the cubic-resource variant.

    Args:
        target: symplectic target; used to solve theta3' when ``theta3p``
            is None, ignored otherwise.
        w: cluster weights.
        theta3p: corrected stage-two input phase; None means "solve it
            from the target at this theta4'".
        theta4p: node-3 measurement phase in (0, pi).
        cubic: nonlinearity, displacement and measured-value operating
            point supplying 12*gamma*I_m.

    Returns:
        ErrorVector in units of the squeezed-quadrature variance.

    Raises:
        NonpositiveIm: if 12*gamma*I_m is not positive.
        DenominatorPole: when theta3p must be solved and the shared
            denominator vanishes irremovably.
    """
    twelve = cubic.twelve_gamma_im
    if not (twelve > 0):
        raise NonpositiveIm(f"12*gamma*I_m = {twelve!r} must be positive")
    if not (0.0 < theta4p < np.pi):
        raise DomainError(f"theta4p = {theta4p!r} outside (0, pi)")
    u4 = float(np.cos(theta4p) / np.sin(theta4p))
    if theta3p is None:
        if target is None:
            raise DomainError("either target or theta3p must be given")
        validate_target(target)
        cot3, pole = _solved_cot3(target.b, target.d, u4, w)
        if pole:
            raise DenominatorPole(
                "phase-solution denominator vanishes at this theta4'"
            )
        cot3 = float(cot3)
    else:
        if not (0.0 < theta3p < np.pi):
            raise DomainError(f"theta3p = {theta3p!r} outside (0, pi)")
        cot3 = float(np.cos(theta3p) / np.sin(theta3p))
    ex, ey = _components_from_cots(cot3, u4, w, 1.0 / twelve)
    return ErrorVector(float(ex), float(ey))


def theta4_candidates() -> np.ndarray:
    """Sorted scan grid for cot(theta4'): symmetric log grid plus zero."""
    positive = np.logspace(-6.0, 4.0, 101)
    return np.concatenate([-positive[::-1], [0.0], positive])


def _objective(b, d, u4, w: WeightConfig, mid_weight):
    cot3, pole = _solved_cot3(b, d, u4, w)
    ex, ey = _components_from_cots(cot3, u4, w, mid_weight)
    return np.where(pole, np.inf, np.maximum(ex, ey))


def _optimize_u(b, d, w: WeightConfig, mid_weight):
    """Vectorised scan + golden-section refinement of cot(theta4').

    Args:
        b, d: flat cell arrays.
        w: cluster weights.
        mid_weight: middle-term scale (1 or 1/(12*gamma*I_m)).

    Returns:
        (u_best, err_best); err_best is +inf where no candidate avoids
        the denominator pole (only b = d = 0 behaves this way).
    """
    b = np.asarray(b, dtype=float).ravel()
    d = np.asarray(d, dtype=float).ravel()
    cand = theta4_candidates()
    vals = _objective(b[None, :], d[None, :], cand[:, None], w, mid_weight)
    idx = np.argmin(vals, axis=0)
    cells = np.arange(b.size)
    best_val = vals[idx, cells]
    best_u = cand[idx]

    lo = cand[np.maximum(idx - 1, 0)]
    hi = cand[np.minimum(idx + 1, cand.size - 1)]
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1 = _objective(b, d, x1, w, mid_weight)
    f2 = _objective(b, d, x2, w, mid_weight)
    for _ in range(_GOLDEN_ITERATIONS):
        take = f1 < f2
        hi = np.where(take, x2, hi)
        lo = np.where(take, lo, x1)
        x1 = hi - _INVPHI * (hi - lo)
        x2 = lo + _INVPHI * (hi - lo)
        f1 = _objective(b, d, x1, w, mid_weight)
        f2 = _objective(b, d, x2, w, mid_weight)
    u_ref = 0.5 * (lo + hi)
    f_ref = _objective(b, d, u_ref, w, mid_weight)
    improved = f_ref < best_val
    return np.where(improved, u_ref, best_u), np.where(improved, f_ref, best_val)


def optimize_theta4(
    target: SymplecticTarget,
    w: WeightConfig,
    mode: str = MODE_GAUSSIAN_OPTIMIZED,
    cubic: Optional[CubicConfig] = None,
) -> OptimizeResult:
    """Minimize the inf-norm error over the free phase theta4'.

    Args:
        target: symplectic target (only b, d enter the objective).
        w: cluster weights.
        mode: one of MODES; the fixed-phase mode evaluates at pi/2
            without searching.
        cubic: required for the cubic mode, forbidden otherwise.

    Returns:
        OptimizeResult(theta4p, err_inf).  Pi/2 is always among the
        scanned candidates, so err_inf never exceeds the fixed-phase
        value.
    """
    validate_target(target)
    mid = _mode_mid_weight(mode, cubic)
    if mode == MODE_GAUSSIAN_FIXED:
        val = _objective(target.b, target.d, 0.0, w, mid)
        if not np.isfinite(val):
            raise DenominatorPole(
                "error denominator vanishes at theta4' = pi/2"
            )
        return OptimizeResult(float(np.pi / 2), float(val))
    u_best, err_best = _optimize_u(
        np.array([target.b]), np.array([target.d]), w, mid
    )
    if not np.isfinite(err_best[0]):
        raise DenominatorPole("no pole-free theta4' candidate for this target")
    return OptimizeResult(float(arccot(u_best[0])), float(err_best[0]))


def _mode_mid_weight(mode: str, cubic: Optional[CubicConfig]) -> float:
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}; expected one of {MODES}")
    if mode == MODE_CUBIC_OPTIMIZED:
        if cubic is None:
            raise DomainError("cubic mode requires a CubicConfig")
        twelve = cubic.twelve_gamma_im
        if not (twelve > 0):
            raise NonpositiveIm(f"12*gamma*I_m = {twelve!r} must be positive")
        return 1.0 / twelve
    if cubic is not None:
        raise DomainError(f"mode {mode!r} does not accept a CubicConfig")
    return 1.0


@dataclass(frozen=True)
class ErrorSurfaceSpec:
    """Grid specification for an error surface over target entries (b, d).

    Attributes:
        b_range: inclusive (min, max) interval for b.
        d_range: inclusive (min, max) interval for d.
        nb: number of b samples (>= 1).
        nd: number of d samples (>= 1).
        w: cluster weights.
        mode: one of MODES.
        cubic: operating point; present exactly when mode is cubic.
    """

    b_range: tuple
    d_range: tuple
    nb: int
    nd: int
    w: WeightConfig
    mode: str
    cubic: Optional[CubicConfig] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(
                f"unknown mode {self.mode!r}; expected one of {MODES}"
            )
        for name, rng in (("b_range", self.b_range), ("d_range", self.d_range)):
            if len(rng) != 2 or not all(np.isfinite(v) for v in rng):
                raise DomainError(f"{name} must be a finite (min, max) pair")
            if rng[0] > rng[1]:
                raise DomainError(f"{name} must satisfy min <= max")
        for name, n in (("nb", self.nb), ("nd", self.nd)):
            if int(n) != n or n < 1:
                raise DomainError(f"{name} must be an integer >= 1")
        if (self.mode == MODE_CUBIC_OPTIMIZED) != (self.cubic is not None):
            raise DomainError(
                "cubic operating point must be given exactly for the cubic mode"
            )

    @property
    def b_values(self) -> np.ndarray:
        return np.linspace(self.b_range[0], self.b_range[1], self.nb)

    @property
    def d_values(self) -> np.ndarray:
        return np.linspace(self.d_range[0], self.d_range[1], self.nd)


@dataclass(frozen=True)
class ErrorSurface:
    """Error surface on a (b, d) grid.

    Arrays are indexed [i_b, i_d].  Cells with no pole-free evaluation
    hold NaN and serialize as missing values.
    """

    spec: ErrorSurfaceSpec
    b_values: np.ndarray
    d_values: np.ndarray
    ex: np.ndarray
    ey: np.ndarray
    err_inf: np.ndarray
    theta4p: np.ndarray

    @property
    def n_invalid(self) -> int:
        return int(np.count_nonzero(~np.isfinite(self.err_inf)))

    def to_rows(self):
        """Flatten to (b, d, ex, ey, err_inf, theta4p) rows, b-major.

        Missing cells yield None in the numeric fields.
        """
        rows = []
        for i, bv in enumerate(self.b_values):
            for j, dv in enumerate(self.d_values):
                vals = (self.ex[i, j], self.ey[i, j],
                        self.err_inf[i, j], self.theta4p[i, j])
                rows.append(
                    [float(bv), float(dv)]
                    + [float(v) if np.isfinite(v) else None for v in vals]
                )
        return rows

    def to_json_dict(self) -> dict:
        def cell(v):
            return float(v) if np.isfinite(v) else None

        return {
            "mode": self.spec.mode,
            "weights": list(self.spec.w.as_tuple()),
            "b_values": [float(v) for v in self.b_values],
            "d_values": [float(v) for v in self.d_values],
            "ex": [[cell(v) for v in row] for row in self.ex],
            "ey": [[cell(v) for v in row] for row in self.ey],
            "err_inf": [[cell(v) for v in row] for row in self.err_inf],
            "theta4p": [[cell(v) for v in row] for row in self.theta4p],
            "n_invalid": self.n_invalid,
        }


def _surface_chunk(b_flat, d_flat, w, mode, mid):
    """Evaluate one flat chunk of grid cells; pure and order-preserving."""
    if mode == MODE_GAUSSIAN_FIXED:
        u = np.zeros_like(b_flat)
        err = _objective(b_flat, d_flat, u, w, mid)
    else:
        u, err = _optimize_u(b_flat, d_flat, w, mid)
    cot3, pole = _solved_cot3(b_flat, d_flat, u, w)
    ex, ey = _components_from_cots(cot3, u, w, mid)
    invalid = ~np.isfinite(err) | pole
    nan = np.nan
    ex = np.where(invalid, nan, ex)
    ey = np.where(invalid, nan, ey)
    err = np.where(invalid, nan, err)
    theta = np.where(invalid, nan, arccot(u))
    return ex, ey, err, theta


def error_surface(spec: ErrorSurfaceSpec, n_workers: int = 1) -> ErrorSurface:
    """Evaluate the selected error mode on the (b, d) grid.

    Cells are independent; with ``n_workers`` > 1 they are evaluated in
    parallel chunks and reassembled in index order, so the result is
    identical for any worker count.

    Args:
        spec: grid specification.
        n_workers: number of evaluation threads.

    Returns:
        ErrorSurface with NaN marking pole cells.
    """
    mid = _mode_mid_weight(spec.mode, spec.cubic)
    bs = spec.b_values
    ds = spec.d_values
    B, D = np.meshgrid(bs, ds, indexing="ij")
    b_flat = B.ravel()
    d_flat = D.ravel()

    if n_workers <= 1 or b_flat.size < 2:
        parts = [_surface_chunk(b_flat, d_flat, spec.w, spec.mode, mid)]
    else:
        chunks = np.array_split(np.arange(b_flat.size), n_workers)
        chunks = [c for c in chunks if c.size]
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            futures = [
                pool.submit(
                    _surface_chunk, b_flat[c], d_flat[c], spec.w, spec.mode, mid
                )
                for c in chunks
            ]
            parts = [f.result() for f in futures]

    ex, ey, err, theta = (
        np.concatenate([p[k] for p in parts]).reshape(spec.nb, spec.nd)
        for k in range(4)
    )
    return ErrorSurface(
        spec=spec, b_values=bs, d_values=ds,
        ex=ex, ey=ey, err_inf=err, theta4p=theta,
    )
