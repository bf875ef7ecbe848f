"""kappa-mu shadowed fading: parameters, derived series constants, sampling,
and the gamma / beta-prime approximations of the SIR law."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .specfun import reg_inc_beta
from .streams import as_generator

__all__ = [
    "FadingParams",
    "Scenario",
    "DerivedParams",
    "GammaApprox",
    "derive_params",
    "sample_power",
    "sample_sir",
    "gamma_match",
    "interferer_sum_match",
    "gamma_approx",
    "beta_prime_sir_cdf",
    "beta_prime_sir_quantile",
    "beta_prime_sir_pdf",
]


@dataclass(frozen=True)
class FadingParams:
    """One kappa-mu shadowed power: ``kappa``, ``mu``, ``m`` and its mean."""

    kappa: float
    mu: float
    m: float
    mean_power: float = 1.0

    def __post_init__(self):
        if not (self.kappa >= 0 and math.isfinite(self.kappa)):
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        for name in ("mu", "m", "mean_power"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be a positive finite number, got {v}")

    @property
    def theta(self) -> float:
        return self.mean_power / (self.mu * (1.0 + self.kappa))

    @property
    def lam(self) -> float:
        return (self.mu * self.kappa + self.m) * self.theta / self.m

    @classmethod
    def from_dict(cls, d: dict) -> "FadingParams":
        unknown = set(d) - {"kappa", "mu", "m", "mean_power"}
        if unknown:
            raise ValueError(f"unknown fading fields: {sorted(unknown)}")
        return cls(float(d["kappa"]), float(d["mu"]), float(d["m"]), float(d.get("mean_power", 1.0)))


@dataclass(frozen=True)
class Scenario:
    """A source power and ``N >= 1`` independent interferer powers."""

    source: FadingParams
    interferers: tuple[FadingParams, ...]

    def __post_init__(self):
        object.__setattr__(self, "interferers", tuple(self.interferers))
        if len(self.interferers) < 1:
            raise ValueError("a scenario needs at least one interferer")

    @property
    def n_interferers(self) -> int:
        return len(self.interferers)

    @property
    def total_mu(self) -> float:
        return float(sum(p.mu for p in self.interferers))

    def to_dict(self) -> dict:
        return {
            "source": asdict(self.source),
            "interferers": [asdict(p) for p in self.interferers],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        try:
            src = FadingParams.from_dict(d["source"])
            intf = [FadingParams.from_dict(p) for p in d["interferers"]]
        except KeyError as exc:
            raise ValueError(f"scenario is missing field {exc}") from None
        return cls(src, tuple(intf))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        return cls.from_json(Path(path).read_text())

    def permuted(self, order: Sequence[int]) -> "Scenario":
        return Scenario(self.source, tuple(self.interferers[i] for i in order))

    def with_source(self, **changes) -> "Scenario":
        return Scenario(FadingParams(**{**asdict(self.source), **changes}), self.interferers)


@dataclass(frozen=True)
class DerivedParams:
    theta: float
    lam: float
    theta_i: tuple[float, ...]
    lambda_i: tuple[float, ...]


@dataclass(frozen=True)
class GammaApprox:
    psi1: float
    psi2: float
    phi1: float
    phi2: float


def derive_params(s: Scenario) -> DerivedParams:
    """Scale constants ``theta, lambda`` of the source and each interferer."""
    return DerivedParams(
        theta=s.source.theta,
        lam=s.source.lam,
        theta_i=tuple(p.theta for p in s.interferers),
        lambda_i=tuple(p.lam for p in s.interferers),
    )


def sample_power(p: FadingParams, rng=None, size=None):
    """Draw kappa-mu shadowed powers.

    Shadowing ``s ~ Gamma(m, 1/m)`` sets the Poisson mean ``mu*kappa*s`` of
    the number of extra dominant-component degrees of freedom ``P``; the
    power is then ``theta * Gamma(mu + P, 1)``.
    """
    rng = as_generator(rng)
    if p.kappa == 0:
        return rng.gamma(p.mu, p.theta, size)
    shadow = rng.gamma(p.m, 1.0 / p.m, size)
    extra = rng.poisson(p.mu * p.kappa * shadow)
    return p.theta * rng.standard_gamma(p.mu + extra)


def sample_sir(s: Scenario, rng=None, size=None):
    """Draw SIR variates: one source power over the sum of interferer powers."""
    rng = as_generator(rng)
    x = sample_power(s.source, rng, size)
    y = sample_power(s.interferers[0], rng, size)
    for q in s.interferers[1:]:
        y = y + sample_power(q, rng, size)
    return x / y


def gamma_match(p: FadingParams) -> tuple[float, float]:
    """Two-moment gamma fit ``(shape, scale)`` of a kappa-mu shadowed power."""
    k, mu, m = p.kappa, p.mu, p.m
    psi1 = m * mu * (1 + k) ** 2 / (m + mu * k**2 + 2 * m * k)
    return psi1, p.mean_power / psi1


def interferer_sum_match(s: Scenario) -> tuple[float, float]:
    """Gamma fit of the interference sum matching its mean and variance."""
    fits = [gamma_match(p) for p in s.interferers]
    mean = sum(a * b for a, b in fits)
    var = sum(a * b * b for a, b in fits)
    phi2 = var / mean
    return mean / phi2, phi2


def gamma_approx(s: Scenario) -> GammaApprox:
    psi1, psi2 = gamma_match(s.source)
    phi1, phi2 = interferer_sum_match(s)
    return GammaApprox(psi1, psi2, phi1, phi2)


def beta_prime_sir_cdf(s: Scenario, z: float) -> float:
    """Approximate SIR CDF from the gamma-ratio (beta-prime) law."""
    if z <= 0:
        return 0.0
    if math.isinf(z):
        return 1.0
    g = gamma_approx(s)
    u = z * g.phi2 / g.psi2
    return reg_inc_beta(g.psi1, g.phi1, u / (1.0 + u))


def beta_prime_sir_pdf(s: Scenario, z: float) -> float:
    """Density of the beta-prime approximation to the SIR law."""
    from scipy.special import betaln

    if z <= 0 or math.isinf(z):
        return 0.0
    g = gamma_approx(s)
    k = g.phi2 / g.psi2
    u = z * k
    log_f = (g.psi1 - 1) * math.log(u) - (g.psi1 + g.phi1) * math.log1p(u) - betaln(g.psi1, g.phi1)
    return k * math.exp(log_f)


def beta_prime_sir_quantile(s: Scenario, q: float) -> float:
    """Inverse of :func:`beta_prime_sir_cdf`."""
    from scipy.special import betaincinv

    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    g = gamma_approx(s)
    v = float(betaincinv(g.psi1, g.phi1, q))
    if v >= 1.0:
        return math.inf
    return v / (1.0 - v) * g.psi2 / g.phi2
