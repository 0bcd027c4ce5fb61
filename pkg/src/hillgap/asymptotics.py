"""Predicted eigenvalue pairs and remainder-decay classification.

Predictions carry the principal branch of the resonant square root; the
sign ambiguity of the pair is resolved only at comparison time by taking
the minimum over both signs, which makes every remainder branch
independent.  Remainder sequences are classified by a log-log slope fit
over a window that excludes the pre-asymptotic head (n < 8 by default).
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import riesz
from .seqspace import (
    DecayFit,
    FourierSequence,
    decay_exponent,
    h_membership_bounded,
    normalize_zero_mode,
    weighted_norm,
)
from .eigensolver import EigenPairTable, GammaRadius, compute_pair_table

__all__ = [
    "PredictionRow",
    "predict_pair",
    "RemainderKind",
    "RemainderReport",
    "tau_remainder",
    "gamma_remainder",
    "one_term_check",
    "alpha1_experiment",
    "DEFAULT_EPSILON",
    "FIT_RANGE_START",
]

DEFAULT_EPSILON = 0.05
FIT_RANGE_START = 8


@dataclass(frozen=True)
class PredictionRow:
    """Predicted pair around one center: the zero-mode shift plus the
    resonant square root, optionally corrected by the quadratic sequence."""

    n: int
    center: float
    shift: complex
    root_term: complex
    root_term_corr: complex
    predicted_pair: tuple[complex, complex]
    predicted_pair_corr: tuple[complex, complex]


def predict_pair(v_raw: FourierSequence, m: int, alpha: float, n: int) -> PredictionRow:
    """Prediction from the raw potential (zero mode intact): the pair
    center + v(0) -+ sqrt(v(-2(2n-1)) v(2(2n-1))), and the corrected variant
    with v replaced by v + l on the resonant indices."""
    center = float(2 * n - 1) ** (2 * m) * math.pi ** (2 * m)
    shift = v_raw(0)
    v0, _ = normalize_zero_mode(v_raw)
    q = 2 * (2 * n - 1)
    root = cmath.sqrt(v0(-q) * v0(q))
    l_plus, l_minus = riesz.l_pair(v0, m, n)
    root_corr = cmath.sqrt((v0(-q) + l_minus) * (v0(q) + l_plus))
    base = center + shift
    return PredictionRow(
        n=n,
        center=center,
        shift=shift,
        root_term=root,
        root_term_corr=root_corr,
        predicted_pair=(base - root, base + root),
        predicted_pair_corr=(base - root_corr, base + root_corr),
    )


class RemainderKind(enum.Enum):
    TAU = "TauRemainder"
    GAMMA = "GammaRemainder"
    GAMMA_CORRECTED = "GammaRemainderCorrected"
    ONE_TERM = "OneTerm"
    ALPHA_ONE = "AlphaOne"


@dataclass(frozen=True)
class RemainderReport:
    kind: RemainderKind
    ns: tuple[int, ...]
    values: tuple[float, ...]
    target_exponent: float
    fitted_slope: float
    fit_residual: float
    bounded_flag: bool
    exact_zero: bool
    n0_below_one: int | None = None

    def pairs(self) -> list[tuple[int, float]]:
        return list(zip(self.ns, self.values))


def _converged_rows(table: EigenPairTable):
    rows = [r for r in table.rows if r.converged]
    if not rows:
        raise ValueError("no converged rows in the pair table")
    return rows


def _fit(ns, values, target, fit_range) -> tuple[DecayFit, bool]:
    points = list(zip(ns, values))
    if fit_range is None:
        fit_range = (min(FIT_RANGE_START, max(ns)), max(ns))
    if all(v == 0.0 for _, v in points):
        return DecayFit(-math.inf, 0.0, True), True
    fit = decay_exponent(points, fit_range)
    bounded = h_membership_bounded(points, target, fit_range)
    return fit, bounded


def tau_remainder(
    table: EigenPairTable,
    v_raw: FourierSequence,
    m: int,
    alpha: float,
    epsilon: float = DEFAULT_EPSILON,
    fit_range: tuple[int, int] | None = None,
) -> RemainderReport:
    """Remainder of the pair mean: |tau_n - (2n-1)^{2m} pi^{2m} - v(0)|,
    classified against the exponent m(1 - 2 alpha) - epsilon."""
    rows = _converged_rows(table)
    shift = v_raw(0)
    ns = tuple(r.n for r in rows)
    values = tuple(
        abs(r.tau - float(2 * r.n - 1) ** (2 * m) * math.pi ** (2 * m) - shift)
        for r in rows
    )
    target = m * (1.0 - 2.0 * alpha) - epsilon
    fit, bounded = _fit(ns, values, target, fit_range)
    return RemainderReport(
        RemainderKind.TAU, ns, values, target, fit.slope, fit.residual, bounded, fit.exact_zero
    )


def gamma_remainder(
    table: EigenPairTable,
    v_raw: FourierSequence,
    m: int,
    alpha: float,
    corrected: bool = False,
    epsilon: float = DEFAULT_EPSILON,
    fit_range: tuple[int, int] | None = None,
) -> RemainderReport:
    """Remainder of the pair gap: min over signs of |gamma_n +- 2 root|,
    where root is the (optionally corrected) resonant square root.

    Uncorrected target: m(1/2 - alpha) for alpha in [0, 1/2), else
    m(1 - 2 alpha) - epsilon.  Corrected target: m(1 - 2 alpha) - epsilon.
    """
    rows = _converged_rows(table)
    ns = tuple(r.n for r in rows)
    values = []
    for r in rows:
        pred = predict_pair(v_raw, m, alpha, r.n)
        root = pred.root_term_corr if corrected else pred.root_term
        values.append(min(abs(r.gamma + 2.0 * root), abs(r.gamma - 2.0 * root)))
    values = tuple(values)
    if corrected or alpha >= 0.5:
        target = m * (1.0 - 2.0 * alpha) - epsilon
    else:
        target = m * (0.5 - alpha)
    fit, bounded = _fit(ns, values, target, fit_range)
    kind = RemainderKind.GAMMA_CORRECTED if corrected else RemainderKind.GAMMA
    return RemainderReport(
        kind, ns, values, target, fit.slope, fit.residual, bounded, fit.exact_zero
    )


def one_term_check(
    table: EigenPairTable,
    m: int,
    alpha: float,
    R: float,
    C: float,
    fit_range: tuple[int, int] | None = None,
) -> RemainderReport:
    """Scaled one-term deviations |lambda - center| / (2n-1)^{m alpha}; the
    bounded flag demands every value stay below 3^m sqrt(2) C R."""
    rows = _converged_rows(table)
    ns = tuple(r.n for r in rows)
    values = []
    for r in rows:
        center = float(2 * r.n - 1) ** (2 * m) * math.pi ** (2 * m)
        scale = float(2 * r.n - 1) ** (m * alpha)
        values.append(
            max(abs(r.lambda_lo - center), abs(r.lambda_hi - center)) / scale
        )
    values = tuple(values)
    bound = 3.0**m * math.sqrt(2.0) * C * R
    bounded = all(val <= bound for val in values)
    if all(val == 0.0 for val in values):
        fit = DecayFit(-math.inf, 0.0, True)
    else:
        points = list(zip(ns, values))
        if fit_range is None:
            fit_range = (min(FIT_RANGE_START, max(ns)), max(ns))
        fit = decay_exponent(points, fit_range)
    return RemainderReport(
        RemainderKind.ONE_TERM, ns, values, 0.0, fit.slope, fit.residual, bounded, fit.exact_zero
    )


def alpha1_experiment(
    v: FourierSequence,
    m: int,
    n_max: int,
    K: int | None = None,
    validate: bool = True,
) -> RemainderReport:
    """Limiting-scale experiment: ratios |lambda - center| / (2n-1)^m for a
    potential that is only required to have a finite h^{-m} norm.

    The sublinear-growth claim is verified as a downward trend of the ratio
    sequence together with an empirical index beyond which every ratio stays
    below one.
    """
    if not math.isfinite(weighted_norm(v, -float(m), 0)):
        raise ValueError("potential must have a finite h^{-m} norm")
    if K is None:
        K = 4 * n_max
    table = compute_pair_table(
        v, m, K, radius_rule=GammaRadius(scale=3.0), n_max=n_max, validate=validate
    )
    rows = table.rows
    if not rows:
        raise ValueError("no paired rows; window too small or potential too strong")
    ns = tuple(r.n for r in rows)
    values = tuple(
        max(
            abs(r.lambda_lo - float(2 * r.n - 1) ** (2 * m) * math.pi ** (2 * m)),
            abs(r.lambda_hi - float(2 * r.n - 1) ** (2 * m) * math.pi ** (2 * m)),
        )
        / float(2 * r.n - 1) ** m
        for r in rows
    )
    n0 = 0
    for n, val in zip(ns, values):
        if val >= 1.0:
            n0 = n
    if all(val == 0.0 for val in values):
        fit = DecayFit(-math.inf, 0.0, True)
    else:
        fit = decay_exponent(list(zip(ns, values)), (min(ns), max(ns)))
    return RemainderReport(
        RemainderKind.ALPHA_ONE,
        ns,
        values,
        float(m),
        fit.slope,
        fit.residual,
        bounded_flag=all(v < 1.0 for n, v in zip(ns, values) if n > n0),
        exact_zero=fit.exact_zero,
        n0_below_one=n0,
    )
