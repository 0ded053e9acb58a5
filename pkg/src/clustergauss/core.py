"""Shared conventions, value types and validation helpers.

Units
-----
All quadrature variances are expressed in units where the vacuum variance
is 1/4.  A y-squeezed oscillator with squeezing parameter ``r`` then has

    var_y = exp(-2 r) / 4        (squeezed quadrature)
    var_x = exp(+2 r) / 4        (anti-squeezed quadrature)

and the decibel scale used throughout is ``db = 10 log10(4 var_y)``, so
vacuum is 0 dB and squeezed states are negative.

Angles
------
Homodyne phases live on the open interval (0, pi), on which the cotangent
is a bijection onto the real line.  ``arccot`` below always returns the
branch in (0, pi).  Because a double-precision angle near 0 or pi cannot
carry the full precision of a huge cotangent, :class:`PhaseSet` optionally
caches the exact cotangent values it was built from; downstream consumers
use the cached values so that solve -> forward round trips are not limited
by angle quantisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Vacuum quadrature variance in the units used throughout the package.
VACUUM_VARIANCE = 0.25

#: Tolerance on |det - 1| for a matrix to count as symplectic.
SYMPLECTIC_TOL = 1e-12

#: |d| below this is treated as degenerate (the phase solution divides by d).
DEGENERATE_D_TOL = 1e-9

#: |b g3^2/g2^2 + d cot(theta4')| below this is treated as a denominator pole.
POLE_TOL = 1e-9


class DomainError(ValueError):
    """Base class for configuration/domain errors raised by this package."""


class NotSymplectic(DomainError):
    """Target matrix determinant differs from 1 beyond tolerance."""


class DegenerateD(DomainError):
    """Target has |d| too small for the closed-form phase solution."""


class DenominatorPole(DomainError):
    """The shared phase-solution denominator vanishes for this input."""


class NonpositiveIm(DomainError):
    """The measured/assumed photocurrent combination I_m is not positive."""


class InvalidReflectivity(DomainError):
    """Beam-splitter reflectivity outside the physical interval (0, 1]."""


def cot(theta):
    """Cotangent, elementwise on arrays.

    Args:
        theta: angle(s) in radians, expected in (0, pi).

    Returns:
        cos(theta) / sin(theta).
    """
    theta = np.asarray(theta, dtype=float)
    out = np.cos(theta) / np.sin(theta)
    return out if out.ndim else float(out)


def arccot(value):
    """Inverse cotangent on the branch (0, pi), elementwise on arrays.

    ``arccot`` is continuous and strictly decreasing on this branch, with
    ``arccot(0) = pi/2``.
    """
    value = np.asarray(value, dtype=float)
    out = np.arctan2(1.0, value)
    return out if out.ndim else float(out)


def db_to_variance(db: float) -> float:
    """Convert squeezing in dB to the squeezed-quadrature variance.

    Args:
        db: squeezing level, ``db = 10 log10(4 var_y)``; negative values
            mean squeezing below vacuum.

    Returns:
        ``10**(db/10) / 4``.
    """
    return 10.0 ** (db / 10.0) / 4.0


def variance_to_db(var: float) -> float:
    """Inverse of :func:`db_to_variance`."""
    if var <= 0:
        raise DomainError(f"variance must be positive, got {var}")
    return 10.0 * math.log10(4.0 * var)


@dataclass(frozen=True)
class SymplecticTarget:
    """A 2x2 real symplectic matrix ((a, b), (c, d)) with ad - bc = 1."""

    a: float
    b: float
    c: float
    d: float

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    @classmethod
    def from_matrix(cls, m) -> "SymplecticTarget":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise DomainError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))


def validate_target(
    target: SymplecticTarget,
    *,
    det_tol: float = SYMPLECTIC_TOL,
    degenerate_tol: float = DEGENERATE_D_TOL,
) -> SymplecticTarget:
    """Check that ``target`` is symplectic and usable by the phase solver.

    Args:
        target: candidate single-mode operation.
        det_tol: allowed |det - 1|.
        degenerate_tol: |d| below this raises :class:`DegenerateD`, because
            the closed-form phase solution divides by d.

    Returns:
        The validated target, unchanged.

    Raises:
        NotSymplectic: if |det - 1| > det_tol.
        DegenerateD: if |d| < degenerate_tol.
    """
    det = target.det
    if not math.isfinite(det) or abs(det - 1.0) > det_tol:
        raise NotSymplectic(f"determinant {det!r} differs from 1 beyond {det_tol}")
    if abs(target.d) < degenerate_tol:
        raise DegenerateD(f"matrix element d = {target.d!r} is degenerate")
    return target


@dataclass(frozen=True)
class WeightConfig:
    """Edge weights (g1, g2, g3, g4) of the four-node linear cluster.

    g4 couples the input to node 1, g1 links nodes 1-2, g2 couples the
    stage-one output to node 3, and g3 links nodes 3-4.  All weights are
    strictly positive.
    """

    g1: float
    g2: float
    g3: float
    g4: float

    def __post_init__(self):
        for name in ("g1", "g2", "g3", "g4"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"weight {name} must be positive, got {value!r}")

    @property
    def g1_over_g4(self) -> float:
        return self.g1 / self.g4

    @property
    def g3_over_g2(self) -> float:
        return self.g3 / self.g2

    @property
    def cross_ratio(self) -> float:
        """g1 g3 / (g2 g4); the d-value at which cot(theta3) changes sign."""
        return self.g1 * self.g3 / (self.g2 * self.g4)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.g1, self.g2, self.g3, self.g4)


@dataclass(frozen=True)
class SqueezingSpec:
    """Resource squeezing described redundantly by r, variance and dB.

    The three fields must agree; use the ``from_*`` constructors instead of
    filling them by hand.
    """

    r: float
    var_y: float
    db: float

    def __post_init__(self):
        if not (self.var_y > 0):
            raise DomainError(f"var_y must be positive, got {self.var_y!r}")
        expected_var = math.exp(-2.0 * self.r) / 4.0
        expected_db = 10.0 * math.log10(4.0 * self.var_y)
        if abs(expected_var - self.var_y) > 1e-12 * max(1.0, self.var_y):
            raise DomainError("r and var_y are inconsistent")
        if abs(expected_db - self.db) > 1e-9:
            raise DomainError("var_y and db are inconsistent")

    @classmethod
    def from_db(cls, db: float) -> "SqueezingSpec":
        var_y = db_to_variance(db)
        r = -db * math.log(10.0) / 20.0
        return cls(r=r, var_y=var_y, db=db)

    @classmethod
    def from_r(cls, r: float) -> "SqueezingSpec":
        var_y = math.exp(-2.0 * r) / 4.0
        return cls(r=r, var_y=var_y, db=10.0 * math.log10(4.0 * var_y))

    @classmethod
    def from_variance(cls, var_y: float) -> "SqueezingSpec":
        return cls(
            r=-0.5 * math.log(4.0 * var_y),
            var_y=var_y,
            db=variance_to_db(var_y),
        )

    @property
    def var_x(self) -> float:
        """Anti-squeezed quadrature variance exp(2r)/4 (minimum uncertainty)."""
        return math.exp(2.0 * self.r) / 4.0


def _check_angle(name: str, theta: float) -> None:
    if not (0.0 < theta < math.pi):
        raise DomainError(f"{name} = {theta!r} outside the open interval (0, pi)")


@dataclass(frozen=True)
class PhaseSet:
    """Homodyne phases (theta1, theta2', theta3, theta4') in radians.

    theta2' and theta4' are the weight-rescaled node phases with
    cot(theta2) = g4^2 cot(theta2') and cot(theta4) = g2^2 cot(theta4').
    ``theta3p`` optionally carries the cubic-corrected stage-two phase.

    The private ``_cots`` field caches the exact cotangents the phases were
    constructed from (see module docstring); it does not participate in
    equality.
    """

    theta1: float
    theta2p: float
    theta3: float
    theta4p: float
    theta3p: float | None = None
    _cots: tuple | None = None

    def __post_init__(self):
        _check_angle("theta1", self.theta1)
        _check_angle("theta2p", self.theta2p)
        _check_angle("theta3", self.theta3)
        _check_angle("theta4p", self.theta4p)
        if self.theta3p is not None:
            _check_angle("theta3p", self.theta3p)

    @classmethod
    def from_cots(cls, cot1: float, cot2p: float, cot3: float, cot4p: float) -> "PhaseSet":
        """Build a phase set from cotangent values, caching them exactly."""
        return cls(
            theta1=arccot(cot1),
            theta2p=arccot(cot2p),
            theta3=arccot(cot3),
            theta4p=arccot(cot4p),
            _cots=(float(cot1), float(cot2p), float(cot3), float(cot4p)),
        )

    def __eq__(self, other):
        if not isinstance(other, PhaseSet):
            return NotImplemented
        return (
            self.theta1 == other.theta1
            and self.theta2p == other.theta2p
            and self.theta3 == other.theta3
            and self.theta4p == other.theta4p
            and self.theta3p == other.theta3p
        )

    @property
    def cot1(self) -> float:
        return self._cots[0] if self._cots is not None else cot(self.theta1)

    @property
    def cot2p(self) -> float:
        return self._cots[1] if self._cots is not None else cot(self.theta2p)

    @property
    def cot3(self) -> float:
        return self._cots[2] if self._cots is not None else cot(self.theta3)

    @property
    def cot4p(self) -> float:
        return self._cots[3] if self._cots is not None else cot(self.theta4p)


@dataclass(frozen=True)
class ErrorVector:
    """Dimensionless error-variance multipliers (ex, ey).

    The physical added variances are (ex, ey) * var_y of the resource
    squeezing.  ey >= 1 always: the last node's squeezed noise enters the
    output y-quadrature with unit weight.
    """

    ex: float
    ey: float

    def __post_init__(self):
        if not (self.ex >= -1e-12):
            raise DomainError(f"ex must be non-negative, got {self.ex!r}")
        if not (self.ey >= 1.0 - 1e-9):
            raise DomainError(f"ey must be >= 1, got {self.ey!r}")

    @property
    def inf_norm(self) -> float:
        return max(self.ex, self.ey)

    def as_tuple(self) -> tuple[float, float]:
        return (self.ex, self.ey)


@dataclass(frozen=True)
class CubicConfig:
    """Operating point of the cubic-phase-state variant.

    Args:
        gamma: cubicity of the auxiliary gate.
        alpha: y-displacement of the node-2 state.
        i_m: photocurrent combination used by the closed-form error model;
            defaults to its model estimate 3 * gamma * alpha**2.
    """

    gamma: float
    alpha: float
    i_m: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise DomainError(f"gamma must be positive, got {self.gamma!r}")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        if self.i_m is None:
            object.__setattr__(self, "i_m", 3.0 * self.gamma * self.alpha**2)
        if not (self.i_m > 0):
            raise NonpositiveIm(f"i_m must be positive, got {self.i_m!r}")

    @property
    def twelve_gamma_im(self) -> float:
        return 12.0 * self.gamma * self.i_m
