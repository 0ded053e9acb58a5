"""Monte Carlo validation of the cluster computation by direct sampling.

This module is an oracle deliberately independent of the closed forms: it
samples every initial quadrature (input mode + four resource modes),
propagates the exact measurement-and-feedforward protocol shot by shot,
and compares empirical statistics against the analytic predictions.

Protocol per shot:

1. All CZ couplings in—(g4)—1—(g1)—2—(g2)—3—(g3)—4 act on the sampled
   quadratures (x unchanged, y picks up g * x of each neighbour).
2. Four homodyne measurements at the physical phases theta1, theta2,
   theta3, theta4 (node phases relate to the primed solver angles by
   cot(theta2) = g4^2 cot(theta2'), cot(theta4) = g2^2 cot(theta4')).
3. One displacement on the output node removes every measured c-number
   term, leaving out = U @ (x_in, y_in) + noise.

In the Gaussian variant the relation above is exact and affine.  In the
cubic variant node 2 carries the non-Gaussian state
(x, y) = (-y_s2 + 3*gamma*(alpha + x_s2)^2, alpha + x_s2); the first-pair
photocurrent combination I_m is computed from measured data, the mode-2
measurement basis is precompensated per shot so the realised matrix is
the target one, and the feedforward additionally removes sqrt(I_m/(3*gamma)).
Shots with I_m <= 0 are discarded and counted, never clamped.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    CubicConfig,
    DomainError,
    PhaseSet,
    SqueezingSpec,
    SymplecticTarget,
    WeightConfig,
)
from .phases import solve_phases

__all__ = [
    "VARIANT_GAUSSIAN",
    "VARIANT_CUBIC",
    "VARIANTS",
    "SHOT_BLOCK",
    "RECORD_COLUMNS",
    "SmallDisplacementWarning",
    "InputState",
    "SimConfig",
    "SimSummary",
    "LinearizationReport",
    "run_gaussian",
    "run_cubic",
    "run",
    "replay_record",
    "linearization_check",
]

VARIANT_GAUSSIAN = "gaussian"
VARIANT_CUBIC = "cubic"
VARIANTS = (VARIANT_GAUSSIAN, VARIANT_CUBIC)

# Shots are generated in fixed-size blocks; block k always uses the
# counter-based generator advanced by k * _BLOCK_STRIDE from the seed, so
# results are bit-identical for any worker partitioning.
SHOT_BLOCK = 8192
_BLOCK_STRIDE = 2**40

RECORD_COLUMNS = (
    "x_in", "y_in",
    "x_s1", "y_s1", "x_s2", "y_s2", "x_s3", "y_s3", "x_s4", "y_s4",
    "i_in", "i_1", "i_2", "i_3", "i_m",
    "ff_x", "ff_y", "x_out", "y_out",
    "cot_theta3_used", "discarded",
)


class SmallDisplacementWarning(UserWarning):
    """Cubic displacement alpha^2 is not large against the node-2 x spread."""


@dataclass(frozen=True)
class InputState:
    """Gaussian input mode: coherent amplitudes plus quadrature variances.

    Defaults describe a coherent state at the origin (vacuum variances
    1/4 in both quadratures).
    """

    mean_x: float = 0.0
    mean_y: float = 0.0
    var_x: float = 0.25
    var_y: float = 0.25

    def __post_init__(self):
        for name, v in (("mean_x", self.mean_x), ("mean_y", self.mean_y)):
            if not np.isfinite(v):
                raise DomainError(f"{name} must be finite")
        for name, v in (("var_x", self.var_x), ("var_y", self.var_y)):
            if not (np.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite")
        if self.var_x * self.var_y < 1.0 / 16.0 - 1e-12:
            raise DomainError(
                "var_x * var_y below the uncertainty bound 1/16"
            )

    @property
    def mean(self) -> np.ndarray:
        return np.array([self.mean_x, self.mean_y])

    @property
    def covariance(self) -> np.ndarray:
        return np.diag([self.var_x, self.var_y])


@dataclass(frozen=True)
class SimConfig:
    """Full description of one Monte Carlo run."""

    target: SymplecticTarget
    w: WeightConfig
    theta4p: float
    squeezing: SqueezingSpec
    variant: str
    n_shots: int
    seed: int
    cubic: Optional[CubicConfig] = None
    input_state: InputState = field(default_factory=InputState)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(
                f"unknown variant {self.variant!r}; expected one of {VARIANTS}"
            )
        if (self.variant == VARIANT_CUBIC) != (self.cubic is not None):
            raise DomainError(
                "cubic operating point must be given exactly for the cubic variant"
            )
        if int(self.n_shots) != self.n_shots or self.n_shots < 1:
            raise DomainError("n_shots must be an integer >= 1")
        if int(self.seed) != self.seed or self.seed < 0:
            raise DomainError("seed must be a nonnegative integer")
        if not (0.0 < self.theta4p < np.pi):
            raise DomainError(f"theta4p = {self.theta4p!r} outside (0, pi)")
        if self.variant == VARIANT_CUBIC:
            spread = self.squeezing.var_x
            if self.cubic.alpha**2 < 100.0 * spread:
                warnings.warn(
                    "alpha^2 = {:.4g} is less than 100x the node-2 x spread "
                    "{:.4g}; the square-root linearisation may be inaccurate"
                    .format(self.cubic.alpha**2, spread),
                    SmallDisplacementWarning,
                    stacklevel=2,
                )


@dataclass(frozen=True)
class SimSummary:
    """Monte Carlo estimates next to their closed-form predictions.

    The per-shot error is out - U @ (x_in, y_in) with U the realised
    target matrix; its empirical covariance is compared against the
    predicted error covariance (diagonal = the closed-form error vector
    times the squeezed variance).
    """

    variant: str
    n_shots: int
    n_kept: int
    n_discarded: int
    mean_out: np.ndarray
    cov_out: np.ndarray
    error_mean: np.ndarray
    error_cov: np.ndarray
    predicted_mean: np.ndarray
    predicted_out_cov: np.ndarray
    predicted_error_cov: np.ndarray
    z_mean: np.ndarray
    z_error_var: np.ndarray
    mean_im: Optional[float]
    realized: SymplecticTarget
    phases: PhaseSet
    records: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        def arr(a):
            return np.asarray(a).tolist()

        return {
            "variant": self.variant,
            "n_shots": int(self.n_shots),
            "n_kept": int(self.n_kept),
            "n_discarded": int(self.n_discarded),
            "mean_out": arr(self.mean_out),
            "cov_out": arr(self.cov_out),
            "error_mean": arr(self.error_mean),
            "error_cov": arr(self.error_cov),
            "predicted_mean": arr(self.predicted_mean),
            "predicted_out_cov": arr(self.predicted_out_cov),
            "predicted_error_cov": arr(self.predicted_error_cov),
            "z_mean": arr(self.z_mean),
            "z_error_var": arr(self.z_error_var),
            "mean_im": None if self.mean_im is None else float(self.mean_im),
            "realized": arr(self.realized.as_matrix()),
            "phases": {
                "theta1": self.phases.theta1,
                "theta2p": self.phases.theta2p,
                "theta3": self.phases.theta3,
                "theta4p": self.phases.theta4p,
            },
        }


@dataclass(frozen=True)
class LinearizationReport:
    """Dimensionless validity ratios of the square-root series truncation."""

    ratio_first_moment: float
    ratio_second_moment: float
    safety: float

    @property
    def passed(self) -> bool:
        return min(self.ratio_first_moment, self.ratio_second_moment) \
            >= self.safety


def _sin_cos_from_cot(cot):
    """sin, cos of an angle in (0, pi) given its cotangent (sin > 0)."""
    sin = 1.0 / np.sqrt(1.0 + np.square(cot))
    return sin, cot * sin


def _block_rng(seed: int, block: int) -> np.random.Generator:
    bitgen = np.random.Philox(key=seed)
    return np.random.Generator(bitgen.advance(block * _BLOCK_STRIDE))


def _sample_block(config: SimConfig, block: int, n: int) -> np.ndarray:
    """Sample the 10 initial quadratures for block ``block`` (shape 10 x n).

    Row order: x_in, y_in, then (x_s, y_s) for nodes 1..4.  The node x
    rows carry the anti-squeezed variance e^{2r}/4, the node y rows the
    squeezed variance e^{-2r}/4.
    """
    z = _block_rng(config.seed, block).standard_normal((10, SHOT_BLOCK))
    z = z[:, :n]
    inp = config.input_state
    sd_x = math.sqrt(config.squeezing.var_x)
    sd_y = math.sqrt(config.squeezing.var_y)
    out = np.empty_like(z)
    out[0] = inp.mean_x + math.sqrt(inp.var_x) * z[0]
    out[1] = inp.mean_y + math.sqrt(inp.var_y) * z[1]
    for j in range(4):
        out[2 + 2 * j] = sd_x * z[2 + 2 * j]
        out[3 + 2 * j] = sd_y * z[3 + 2 * j]
    return out


@dataclass(frozen=True)
class _Params:
    """Solved per-run constants shared by every shot."""

    g1: float
    g2: float
    g3: float
    g4: float
    cot1: float
    cot2: float
    cot3: float
    cot4: float
    cot4p: float
    r2: float
    gamma: float = 0.0
    alpha: float = 0.0


def _run_params(config: SimConfig):
    solved = solve_phases(config.target, config.w, config.theta4p)
    p = solved.phases
    g1, g2, g3, g4 = config.w.as_tuple()
    params = _Params(
        g1=g1, g2=g2, g3=g3, g4=g4,
        cot1=p.cot1,
        cot2=g4**2 * p.cot2p,
        cot3=p.cot3,
        cot4=g2**2 * p.cot4p,
        cot4p=p.cot4p,
        r2=config.w.g3_over_g2,
        gamma=config.cubic.gamma if config.cubic else 0.0,
        alpha=config.cubic.alpha if config.cubic else 0.0,
    )
    return params, solved


def _propagate_gaussian(q: np.ndarray, p: _Params) -> np.ndarray:
    """Exact affine protocol on sampled quadratures; returns a record block.

    ``q`` has shape (10, n) in _sample_block row order; the result has
    shape (n, len(RECORD_COLUMNS)).
    """
    x_in, y_in = q[0], q[1]
    x1, y1, x2, y2, x3, y3, x4, y4 = q[2:10]
    s1, c1 = _sin_cos_from_cot(p.cot1)
    s2, c2 = _sin_cos_from_cot(p.cot2)
    s3, c3 = _sin_cos_from_cot(p.cot3)
    s4, c4 = _sin_cos_from_cot(p.cot4)

    i_in = s1 * (y_in + p.g4 * x1) + c1 * x_in
    i_1 = s2 * (y1 + p.g1 * x2 + p.g4 * x_in) + c2 * x1
    i_2 = s3 * (y2 + p.g1 * x1 + p.g2 * x3) + c3 * x2
    i_3 = s4 * (y3 + p.g2 * x2 + p.g3 * x4) + c4 * x3

    c1x = i_1 / (p.g1 * s2) - i_in * p.cot2 / (p.g1 * p.g4 * s1)
    c1y = i_in * p.g1 / (p.g4 * s1)
    c2x = i_3 / (p.g3 * s4) - i_2 * p.cot4 / (p.g3 * p.g2 * s3)
    c2y = i_2 * p.g3 / (p.g2 * s3)

    f00 = (p.cot3 * p.cot4p - 1.0) / p.r2
    f01 = p.cot4p / p.r2
    f10 = -p.r2 * p.cot3
    f11 = -p.r2
    ff_x = f00 * c1x + f01 * c1y + c2x
    ff_y = f10 * c1x + f11 * c1y + c2y

    x_out = x4 - ff_x
    y_out = (y4 + p.g3 * x3) - ff_y

    n = x_in.size
    rec = np.empty((n, len(RECORD_COLUMNS)))
    rec[:, 0:10] = q.T
    rec[:, 10] = i_in
    rec[:, 11] = i_1
    rec[:, 12] = i_2
    rec[:, 13] = i_3
    rec[:, 14] = c1x
    rec[:, 15] = ff_x
    rec[:, 16] = ff_y
    rec[:, 17] = x_out
    rec[:, 18] = y_out
    rec[:, 19] = p.cot3
    rec[:, 20] = 0.0
    return rec


def _propagate_cubic(q: np.ndarray, p: _Params) -> np.ndarray:
    """Exact nonlinear protocol with per-shot basis precompensation.

    Node 2 holds the displaced cubic-phase state; its x-quadrature feeds
    the neighbours through the CZ couplings.  I_m <= 0 shots are marked
    discarded: stage-2 columns are NaN and the flag column is 1.
    """
    x_in, y_in = q[0], q[1]
    x1, y1, x2, y2, x3, y3, x4, y4 = q[2:10]
    s1, c1 = _sin_cos_from_cot(p.cot1)
    s2, c2 = _sin_cos_from_cot(p.cot2)
    s4, c4 = _sin_cos_from_cot(p.cot4)

    node2_x = -y2 + 3.0 * p.gamma * (p.alpha + x2) ** 2
    node2_y = p.alpha + x2

    i_in = s1 * (y_in + p.g4 * x1) + c1 * x_in
    i_1 = s2 * (y1 + p.g1 * node2_x + p.g4 * x_in) + c2 * x1
    i_m = i_1 / (p.g1 * s2) - i_in * p.cot2 / (p.g1 * p.g4 * s1)

    valid = i_m > 0.0
    im_safe = np.where(valid, i_m, 1.0)
    cot3_used = p.cot3 - 1.0 / np.sqrt(12.0 * p.gamma * im_safe)
    s3, c3 = _sin_cos_from_cot(cot3_used)

    i_2 = s3 * (node2_y + p.g1 * x1 + p.g2 * x3) + c3 * node2_x
    i_3 = s4 * (y3 + p.g2 * node2_x + p.g3 * x4) + c4 * x3

    c1x = i_m
    c1y = i_in * p.g1 / (p.g4 * s1) + np.sqrt(im_safe / (3.0 * p.gamma))
    cot4_used = p.g2**2 * p.cot4p
    c2x = i_3 / (p.g3 * s4) - i_2 * cot4_used / (p.g3 * p.g2 * s3)
    c2y = i_2 * p.g3 / (p.g2 * s3)

    f00 = (cot3_used * p.cot4p - 1.0) / p.r2
    f01 = p.cot4p / p.r2
    f10 = -p.r2 * cot3_used
    f11 = -p.r2
    ff_x = f00 * c1x + f01 * c1y + c2x
    ff_y = f10 * c1x + f11 * c1y + c2y

    x_out = x4 - ff_x
    y_out = (y4 + p.g3 * x3) - ff_y

    nanmask = ~valid
    for a in (i_2, i_3, ff_x, ff_y, x_out, y_out, cot3_used):
        a[nanmask] = np.nan

    n = x_in.size
    rec = np.empty((n, len(RECORD_COLUMNS)))
    rec[:, 0:10] = q.T
    rec[:, 10] = i_in
    rec[:, 11] = i_1
    rec[:, 12] = i_2
    rec[:, 13] = i_3
    rec[:, 14] = i_m
    rec[:, 15] = ff_x
    rec[:, 16] = ff_y
    rec[:, 17] = x_out
    rec[:, 18] = y_out
    rec[:, 19] = cot3_used
    rec[:, 20] = nanmask.astype(float)
    return rec


def _block_stats(rec: np.ndarray, u: np.ndarray):
    """Per-block accumulators: counts and raw sums for mean/covariance."""
    kept = rec[:, 20] == 0.0
    out = rec[kept][:, 17:19]
    xin = rec[kept][:, 0:2]
    err = out - xin @ u.T
    err2 = err * err
    return {
        "n_kept": int(np.count_nonzero(kept)),
        "n_disc": int(np.count_nonzero(~kept)),
        "sum_out": out.sum(axis=0),
        "sum_outer_out": out.T @ out,
        "sum_err": err.sum(axis=0),
        "sum_outer_err": err.T @ err,
        "sum_err3": (err2 * err).sum(axis=0),
        "sum_err4": (err2 * err2).sum(axis=0),
        "sum_im": float(rec[kept][:, 14].sum()),
    }


def _mean_cov(n, s1, s2):
    mean = s1 / n
    cov = (s2 - n * np.outer(mean, mean)) / (n - 1)
    return mean, cov


def _predicted_error_cov(params: _Params, var_y: float,
                         mean_im: Optional[float]) -> np.ndarray:
    """Full 2x2 error covariance from the stage-noise propagation.

    Stage-1 noise (-y_s1/g1, y_s2 [/sqrt(12 gamma I_m) in the cubic
    variant]) passes through the stage-2 matrix; stage-2 adds
    (-y_s3/g3, y_s4).  The diagonal reproduces the closed-form error
    vector times var_y.
    """
    m2 = np.array([
        [(params.cot3 * params.cot4p - 1.0) / params.r2, params.cot4p / params.r2],
        [-params.r2 * params.cot3, -params.r2],
    ])
    mid = 1.0 if mean_im is None else 1.0 / (12.0 * params.gamma * mean_im)
    stage1 = np.diag([var_y / params.g1**2, var_y * mid])
    stage2 = np.diag([var_y / params.g3**2, var_y])
    return m2 @ stage1 @ m2.T + stage2


def _summarize(config: SimConfig, parts, u: np.ndarray, params: _Params,
               solved, records: Optional[np.ndarray]) -> SimSummary:
    n_kept = sum(p["n_kept"] for p in parts)
    n_disc = sum(p["n_disc"] for p in parts)
    if n_kept < 2:
        raise DomainError("fewer than two kept shots; cannot form statistics")
    sum_out = sum((p["sum_out"] for p in parts), np.zeros(2))
    sum_outer_out = sum((p["sum_outer_out"] for p in parts), np.zeros((2, 2)))
    sum_err = sum((p["sum_err"] for p in parts), np.zeros(2))
    sum_outer_err = sum((p["sum_outer_err"] for p in parts), np.zeros((2, 2)))
    sum_err3 = sum((p["sum_err3"] for p in parts), np.zeros(2))
    sum_err4 = sum((p["sum_err4"] for p in parts), np.zeros(2))
    sum_im = sum(p["sum_im"] for p in parts)

    mean_out, cov_out = _mean_cov(n_kept, sum_out, sum_outer_out)
    err_mean, err_cov = _mean_cov(n_kept, sum_err, sum_outer_err)
    mean_im = sum_im / n_kept if config.variant == VARIANT_CUBIC else None

    var_y = config.squeezing.var_y
    pred_err_cov = _predicted_error_cov(params, var_y, mean_im)
    inp = config.input_state
    pred_mean = u @ inp.mean
    pred_out_cov = u @ inp.covariance @ u.T + pred_err_cov

    # Distribution-free standard errors.  The cubic variant's per-shot
    # error is heavy-tailed (near-zero photocurrents), so the Gaussian
    # sqrt(2/n) rule understates the variance estimator's sampling
    # error; the fourth-moment formula is exact asymptotically for any
    # distribution and reduces to sqrt(2/n) in the Gaussian variant.
    se_mean = np.sqrt(np.diag(cov_out) / n_kept)
    z_mean = (mean_out - pred_mean) / se_mean
    pred_var = np.diag(pred_err_cov)
    mu = sum_err / n_kept
    m2 = sum_outer_err.diagonal() / n_kept - mu**2
    m4 = (sum_err4 / n_kept - 4.0 * mu * sum_err3 / n_kept
          + 6.0 * mu**2 * sum_outer_err.diagonal() / n_kept - 3.0 * mu**4)
    se_var = np.sqrt(np.maximum(m4 - m2**2, 0.0) / n_kept)
    se_var = np.where(se_var > 0.0, se_var,
                      pred_var * np.sqrt(2.0 / (n_kept - 1)))
    with np.errstate(divide="ignore", invalid="ignore"):
        z_err = (np.diag(err_cov) - pred_var) / se_var
    z_err = np.where(np.isnan(z_err), 0.0, z_err)

    return SimSummary(
        variant=config.variant,
        n_shots=config.n_shots,
        n_kept=n_kept,
        n_discarded=n_disc,
        mean_out=mean_out,
        cov_out=cov_out,
        error_mean=err_mean,
        error_cov=err_cov,
        predicted_mean=pred_mean,
        predicted_out_cov=pred_out_cov,
        predicted_error_cov=pred_err_cov,
        z_mean=z_mean,
        z_error_var=z_err,
        mean_im=mean_im,
        realized=solved.realized,
        phases=solved.phases,
        records=records,
    )


def run(config: SimConfig, n_workers: int = 1,
        record_shots: bool = False) -> SimSummary:
    """Run the Monte Carlo protocol described by ``config``.

    Shots are generated in fixed blocks with counter-based seeding, and
    block statistics are reduced in block order, so the summary is
    bit-identical for any ``n_workers``.

    Args:
        config: run description.
        n_workers: number of propagation threads.
        record_shots: attach the full per-shot record array
            (RECORD_COLUMNS order) to the summary.

    Returns:
        SimSummary.
    """
    params, solved = _run_params(config)
    u = solved.realized.as_matrix()
    propagate = _propagate_gaussian if config.variant == VARIANT_GAUSSIAN \
        else _propagate_cubic

    n_blocks = -(-config.n_shots // SHOT_BLOCK)
    sizes = [
        min(SHOT_BLOCK, config.n_shots - k * SHOT_BLOCK)
        for k in range(n_blocks)
    ]

    def one_block(k: int) -> np.ndarray:
        return propagate(_sample_block(config, k, sizes[k]), params)

    if n_workers <= 1 or n_blocks == 1:
        blocks = [one_block(k) for k in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            blocks = list(pool.map(one_block, range(n_blocks)))

    parts = [_block_stats(rec, u) for rec in blocks]
    records = np.vstack(blocks) if record_shots else None
    return _summarize(config, parts, u, params, solved, records)


def run_gaussian(config: SimConfig, n_workers: int = 1,
                 record_shots: bool = False) -> SimSummary:
    """Run the Gaussian variant (config.variant must agree)."""
    if config.variant != VARIANT_GAUSSIAN:
        raise DomainError("run_gaussian requires variant='gaussian'")
    return run(config, n_workers=n_workers, record_shots=record_shots)


def run_cubic(config: SimConfig, n_workers: int = 1,
              record_shots: bool = False) -> SimSummary:
    """Run the cubic variant (config.variant must agree)."""
    if config.variant != VARIANT_CUBIC:
        raise DomainError("run_cubic requires variant='cubic'")
    return run(config, n_workers=n_workers, record_shots=record_shots)


def replay_record(config: SimConfig, record_row: np.ndarray):
    """Recompute one stored shot from its sampled initial quadratures.

    The protocol is affine in the Gaussian variant and deterministic in
    both, so the returned (x_out, y_out) reproduces the stored values
    exactly (bit-for-bit) for kept shots.
    """
    params, _ = _run_params(config)
    q = np.asarray(record_row, dtype=float)[:10].reshape(10, 1).copy()
    propagate = _propagate_gaussian if config.variant == VARIANT_GAUSSIAN \
        else _propagate_cubic
    rec = propagate(q, params)
    return float(rec[0, 17]), float(rec[0, 18])


def linearization_check(config: SimConfig, safety: float = 10.0
                        ) -> LinearizationReport:
    """Check the square-root series truncation for a cubic run.

    Evaluates the two dimensionless validity conditions — the
    first-moment condition 3*gamma*alpha^2 >> |M11 <x_in> + M12 <y_in>|
    and the second-moment condition (3*gamma*alpha^2)^2 >>
    M11^2 <x_in^2> + 2 M11 M12 <x_in><y_in> + M12^2 <y_in^2>
    + <y_s1^2>/g1^2 + <y_s2^2> — and reports the two ratios against a
    safety factor.

    Args:
        config: cubic run description.
        safety: required minimum of both ratios for ``passed``.

    Returns:
        LinearizationReport (ratios are +inf when the moment term is 0).
    """
    if config.variant != VARIANT_CUBIC:
        raise DomainError("linearization_check requires variant='cubic'")
    solved = solve_phases(config.target, config.w, config.theta4p)
    p = solved.phases
    r1 = config.w.g1_over_g4
    m11 = (p.cot1 * p.cot2p - 1.0) / r1
    m12 = p.cot2p / r1

    inp = config.input_state
    var_y = config.squeezing.var_y
    scale = 3.0 * config.cubic.gamma * config.cubic.alpha**2

    first = abs(m11 * inp.mean_x + m12 * inp.mean_y)
    second = (
        m11**2 * (inp.var_x + inp.mean_x**2)
        + 2.0 * m11 * m12 * inp.mean_x * inp.mean_y
        + m12**2 * (inp.var_y + inp.mean_y**2)
        + var_y / config.w.g1**2
        + var_y
    )
    ratio1 = math.inf if first == 0.0 else scale / first
    ratio2 = math.inf if second == 0.0 else scale**2 / second
    return LinearizationReport(
        ratio_first_moment=float(ratio1),
        ratio_second_moment=float(ratio2),
        safety=float(safety),
    )
