"""Residual error probability of grid-state correction, and gain surfaces.

After a computation, each output quadrature carries Gaussian noise of
variance (multiplier * var_s).  Correcting that displacement noise with
non-ideal grid states fails with probability

    P_err = 1 - erf(sqrt(pi) / (2*sqrt(2)*sqrt(var_s*(x_er + (sqrt5+1)/2))))
              * erf(sqrt(pi) / (2*sqrt(2)*sqrt(var_s*(y_er + sqrt5 + 1))))

where the two additive constants are the correction-circuit overhead
(the asymmetry reflects the order in which the quadratures are
corrected).  The correction model is calibrated in units where the
vacuum quadrature variance is 1/2; this package works in vacuum-1/4
units, so squeezed variances must be doubled on the way in
(CORRECTION_VARIANCE_UNITS).  ``gain_surface`` applies the conversion;
``p_err`` takes ``var_s`` literally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .core import DomainError, SqueezingSpec
from .errormodel import ErrorSurface, ErrorSurfaceSpec, error_surface

__all__ = [
    "GKP_X_OFFSET",
    "GKP_Y_OFFSET",
    "CORRECTION_VARIANCE_UNITS",
    "PerrInput",
    "GainSurface",
    "p_err",
    "p_err_values",
    "gain_surface",
]

GKP_X_OFFSET = (np.sqrt(5.0) + 1.0) / 2.0
GKP_Y_OFFSET = np.sqrt(5.0) + 1.0

# The correction-probability formula is calibrated with vacuum variance
# 1/2; this package's squeezed variances use vacuum 1/4.  Multiply a
# var_y from SqueezingSpec by this factor before feeding the formula.
CORRECTION_VARIANCE_UNITS = 2.0


@dataclass(frozen=True)
class PerrInput:
    """Dimensionless error multipliers and the squeezed variance scale.

    The actual quadrature error variances are x_er*var_s and y_er*var_s;
    ``var_s`` must already be expressed in the correction model's
    vacuum-1/2 units.
    """

    x_er: float
    y_er: float
    var_s: float

    def __post_init__(self):
        if not (np.isfinite(self.x_er) and self.x_er >= 0):
            raise DomainError(f"x_er = {self.x_er!r} must be >= 0")
        if not (np.isfinite(self.y_er) and self.y_er >= 0):
            raise DomainError(f"y_er = {self.y_er!r} must be >= 0")
        if not (np.isfinite(self.var_s) and self.var_s > 0):
            raise DomainError(f"var_s = {self.var_s!r} must be > 0")


def p_err_values(x_er, y_er, var_s):
    """Vectorised residual-failure probability (see module docstring).

    Evaluated as a + b - a*b with a, b the complementary error functions
    of the two arguments; this is exactly 1 - erf*erf but immune to the
    cancellation both erf factors ~ 1 would cause.
    """
    x_er = np.asarray(x_er, dtype=float)
    y_er = np.asarray(y_er, dtype=float)
    amp = np.sqrt(np.pi) / (2.0 * np.sqrt(2.0))
    with np.errstate(invalid="ignore"):
        a = erfc(amp / np.sqrt(var_s * (x_er + GKP_X_OFFSET)))
        b = erfc(amp / np.sqrt(var_s * (y_er + GKP_Y_OFFSET)))
    return a + b - a * b


def p_err(inp: PerrInput) -> float:
    """Probability that the quadrature-displacement correction fails."""
    return float(p_err_values(inp.x_er, inp.y_er, inp.var_s))


@dataclass(frozen=True)
class GainSurface:
    """Cellwise ratio of baseline over optimized failure probabilities.

    Arrays are indexed [i_b, i_d]; cells missing in either input surface
    are NaN.
    """

    baseline: ErrorSurface
    optimized: ErrorSurface
    squeezing: SqueezingSpec
    b_values: np.ndarray
    d_values: np.ndarray
    p_base: np.ndarray
    p_opt: np.ndarray
    ratio: np.ndarray

    @property
    def max_ratio(self) -> float:
        valid = np.isfinite(self.ratio)
        if not valid.any():
            return float("nan")
        return float(np.max(self.ratio[valid]))

    @property
    def argmax_cell(self) -> tuple:
        """(b, d) of the maximal ratio cell (NaN pair if none valid)."""
        valid = np.isfinite(self.ratio)
        if not valid.any():
            return (float("nan"), float("nan"))
        masked = np.where(valid, self.ratio, -np.inf)
        i, j = np.unravel_index(int(np.argmax(masked)), self.ratio.shape)
        return (float(self.b_values[i]), float(self.d_values[j]))

    def to_rows(self):
        """Flatten to (b, d, p_err_base, p_err_opt, ratio) rows, b-major."""
        rows = []
        for i, bv in enumerate(self.b_values):
            for j, dv in enumerate(self.d_values):
                vals = (self.p_base[i, j], self.p_opt[i, j], self.ratio[i, j])
                rows.append(
                    [float(bv), float(dv)]
                    + [float(v) if np.isfinite(v) else None for v in vals]
                )
        return rows

    def to_json_dict(self) -> dict:
        def cell(v):
            return float(v) if np.isfinite(v) else None

        bmax, dmax = self.argmax_cell
        return {
            "baseline_mode": self.baseline.spec.mode,
            "optimized_mode": self.optimized.spec.mode,
            "squeezing_db": self.squeezing.db,
            "b_values": [float(v) for v in self.b_values],
            "d_values": [float(v) for v in self.d_values],
            "ratio": [[cell(v) for v in row] for row in self.ratio],
            "max_ratio": cell(self.max_ratio),
            "argmax_b": cell(bmax),
            "argmax_d": cell(dmax),
        }


def gain_surface(
    baseline: ErrorSurfaceSpec,
    optimized: ErrorSurfaceSpec,
    squeezing: SqueezingSpec,
    n_workers: int = 1,
) -> GainSurface:
    """Ratio of correction-failure probabilities, baseline over optimized.

    Both specs must describe the same (b, d) grid.  Error multipliers
    come from the closed-form surfaces; the squeezed variance is
    converted to the correction model's units before entering the
    probability formula.

    Args:
        baseline: spec of the non-optimized computation (typically
            unweighted, fixed phase).
        optimized: spec of the optimized computation.
        squeezing: resource squeezing level.
        n_workers: threads for the two surface evaluations.

    Returns:
        GainSurface; a cell is NaN if either surface is missing there.
    """
    if (tuple(baseline.b_range) != tuple(optimized.b_range)
            or tuple(baseline.d_range) != tuple(optimized.d_range)
            or baseline.nb != optimized.nb or baseline.nd != optimized.nd):
        raise DomainError("baseline and optimized specs must share the grid")

    base = error_surface(baseline, n_workers=n_workers)
    opt = error_surface(optimized, n_workers=n_workers)
    var_s = CORRECTION_VARIANCE_UNITS * squeezing.var_y

    with np.errstate(invalid="ignore", divide="ignore"):
        p_base = p_err_values(base.ex, base.ey, var_s)
        p_opt = p_err_values(opt.ex, opt.ey, var_s)
        ratio = p_base / p_opt
    invalid = ~np.isfinite(base.err_inf) | ~np.isfinite(opt.err_inf)
    p_base = np.where(invalid, np.nan, p_base)
    p_opt = np.where(invalid, np.nan, p_opt)
    ratio = np.where(invalid, np.nan, ratio)

    return GainSurface(
        baseline=base,
        optimized=opt,
        squeezing=squeezing,
        b_values=base.b_values,
        d_values=base.d_values,
        p_base=p_base,
        p_opt=p_opt,
        ratio=ratio,
    )
