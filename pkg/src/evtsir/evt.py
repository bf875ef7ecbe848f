"""Frechet limit of the maximum of L i.i.d. SIR variates.

The limit has shape ``beta = sum_i mu_i`` and scale
``a_L = F^{-1}(1 - 1/L)`` with no location shift.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import gamma as gamma_fn

from .fading import Scenario, beta_prime_sir_quantile
from .sirdist import DEFAULT_CONTROL, _workspace, log_survival
from .specfun import SeriesControl

__all__ = [
    "FrechetParams",
    "ConvergenceBound",
    "Ordering",
    "RootBracketError",
    "MomentDivergenceError",
    "frechet_shape",
    "frechet_scale",
    "frechet_params",
    "frechet_cdf",
    "frechet_pdf",
    "frechet_quantile",
    "frechet_moment",
    "frechet_sample",
    "convergence_exponent",
    "stochastic_compare",
]


class RootBracketError(RuntimeError):
    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(f"{message} (last bracket {bracket})")
        self.bracket = bracket


class MomentDivergenceError(ValueError):
    """Requested moment order is at or above the Frechet shape."""


@dataclass(frozen=True)
class FrechetParams:
    scale: float
    shape: float
    L: int = 1

    def __post_init__(self):
        if not (self.scale > 0 and self.shape > 0):
            raise ValueError(f"Frechet scale and shape must be positive, got {self}")
        if self.L < 1:
            raise ValueError("L must be >= 1")


@dataclass(frozen=True)
class ConvergenceBound:
    delta: float
    description: str


class Ordering(enum.Enum):
    FIRST_DOMINATES = 1
    EQUAL = 0
    SECOND_DOMINATES = -1


def frechet_shape(s: Scenario) -> float:
    return s.total_mu


def frechet_scale(s: Scenario, L: int, ctl: SeriesControl | None = None, rtol: float = 1e-10) -> float:
    """``a_L``: the ``1 - 1/L`` quantile of the exact SIR law.

    Solves ``ln P(SIR > z) = -ln L`` with Brent's method.  The bracket starts
    at ten times either side of the beta-prime approximation and widens
    geometrically until it straddles the root.
    """
    if int(L) != L or L < 2:
        raise ValueError(f"L must be an integer >= 2, got {L}")
    ctl = ctl or DEFAULT_CONTROL
    target = -math.log(L)

    def g(z):
        return log_survival(s, z, ctl) - target

    guess = beta_prime_sir_quantile(s, 1.0 - 1.0 / L)
    if not (math.isfinite(guess) and guess > 0):
        guess = 1.0
    lo, hi = guess / 10.0, guess * 10.0
    for _ in range(60):
        glo, ghi = g(lo), g(hi)
        if glo > 0 and ghi < 0:
            break
        if glo <= 0:
            lo /= 10.0
        if ghi >= 0:
            hi *= 10.0
    else:
        raise RootBracketError("could not bracket the SIR quantile", (lo, hi))
    ws = _workspace(s, ctl)
    hits = ws.cap_hits
    try:
        root = float(brentq(g, lo, hi, xtol=1e-300, rtol=rtol, maxiter=200))
    except (ValueError, RuntimeError) as exc:
        raise RootBracketError(str(exc), (lo, hi)) from exc
    if ws.cap_hits > hits:
        raise RootBracketError("SIR series hit its term cap while solving for the quantile", (lo, hi))
    return root


def frechet_params(s: Scenario, L: int, ctl: SeriesControl | None = None) -> FrechetParams:
    return FrechetParams(frechet_scale(s, L, ctl), frechet_shape(s), int(L))


def frechet_cdf(fp: FrechetParams, z):
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        out = np.where(z > 0, np.exp(-np.power(np.where(z > 0, z, 1.0) / fp.scale, -fp.shape)), 0.0)
    return out[()] if out.ndim == 0 else out


def frechet_pdf(fp: FrechetParams, z):
    z = np.asarray(z, dtype=float)
    a, b = fp.scale, fp.shape
    zz = np.where(z > 0, z, 1.0)
    with np.errstate(over="ignore", under="ignore"):
        t = np.power(zz / a, -b)
        out = np.where(z > 0, b / a * np.power(zz / a, -b - 1.0) * np.exp(-t), 0.0)
    return out[()] if out.ndim == 0 else out


def frechet_quantile(fp: FrechetParams, q):
    q = np.asarray(q, dtype=float)
    if np.any((q <= 0) | (q >= 1)):
        raise ValueError("quantile level must lie strictly inside (0, 1)")
    out = fp.scale * np.power(-np.log(q), -1.0 / fp.shape)
    return out[()] if out.ndim == 0 else out


def frechet_moment(fp: FrechetParams, nu: float) -> float:
    """``E[Z^nu] = a^nu Gamma(1 - nu/beta)``, finite only for ``nu < beta``."""
    if not nu > 0:
        raise ValueError("moment order must be positive")
    if nu >= fp.shape:
        raise MomentDivergenceError(
            f"moment of order {nu} does not exist for Frechet shape {fp.shape}"
        )
    return float(fp.scale**nu * gamma_fn(1.0 - nu / fp.shape))


def frechet_sample(fp: FrechetParams, rng, size=None):
    """Inverse-transform Frechet draws, ``a * E^(-1/beta)`` with ``E ~ Exp(1)``."""
    from .streams import as_generator

    e = as_generator(rng).standard_exponential(size)
    return fp.scale * np.power(e, -1.0 / fp.shape)


def convergence_exponent(s: Scenario) -> ConvergenceBound:
    beta = s.total_mu
    delta = 1.0 / beta
    if delta >= 1.0:
        desc = "O(L^-1)" if delta == 1.0 else f"O(L^-{delta:g})"
    else:
        desc = f"O(L^-{delta:g} + L^-1)"
    return ConvergenceBound(delta, desc)


def stochastic_compare(fp1: FrechetParams, fp2: FrechetParams) -> Ordering:
    """Usual stochastic order between two Frechet laws sharing a shape."""
    if fp1.shape != fp2.shape:
        raise ValueError("stochastic comparison needs equal Frechet shapes")
    if fp1.scale > fp2.scale:
        return Ordering.FIRST_DOMINATES
    if fp1.scale < fp2.scale:
        return Ordering.SECOND_DOMINATES
    return Ordering.EQUAL
