"""Exact CDF and PDF of one SIR variate ``X / sum_i Y_i``.

Both come from Lauricella-type series.  Each interferer power is expanded
into two gamma-like factors, shapes ``mu_i - m_i`` (scale ``theta_i``) and
``m_i`` (scale ``lambda_i``); the source power is a negative-binomial
mixture of ``Gamma(mu + p, theta)`` laws indexed by the outer sum ``p``.

CDF.  Every ``F_D`` of the outer sum has the form
``F_D(1-p-mu; b; 1+sum mu_i; theta/(theta + z s_j))``.  Summed as written,
its terms alternate with magnitudes near ``(1+x)^p`` and the result is lost
to cancellation once the outer sum runs past a few dozen terms.  The default
route therefore applies two exact transformations first: Euler's (giving
``c - a``, which is positive) followed by the pivot transformation on the
smallest interferer scale ``s_1``.  The transformed arguments are
``x_1 = theta/(theta + z s_1)`` and
``w_j = theta (s_j - s_1) / (s_j (theta + z s_1))``, all in ``[0, 1)``, so
every term is positive whenever all ``mu_i >= m_i``.  ``method="direct"``
keeps the untransformed sum for cross-checks where it is stable (large z).

The transformed series is a power series in ``x_1``, which crawls as z
shrinks.  Grouping its terms by source order ``p`` and interferer shell
``n`` turns each group into a regularized incomplete beta value, and the
result (``method="mixture"``, the default) is a double sum of nonnegative
terms for either tail.  The pivot route stays available as a cross-check.

PDF.  The transformed confluent ``E_D`` form with the same pivot.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import betainc, gammaln

from .fading import Scenario, derive_params
from .specfun import (
    LogSeriesResult,
    SeriesControl,
    SeriesConvergenceWarning,
    _ed_log,
    _fd_log,
    _finish,
    _lnpoch_vec,
    _log_abs_sign,
    _ShellCoefficients,
    _stop_index,
    _sum_log_terms,
)

__all__ = [
    "DEFAULT_CONTROL",
    "SeriesWorkspace",
    "exact_cdf",
    "exact_ccdf",
    "exact_pdf",
    "survival_series",
    "METHODS",
    "log_survival",
    "pdf_series",
]

DEFAULT_CONTROL = SeriesControl(max_total_order=1 << 18, max_outer_p=20_000)

# below z_min the pivot argument x_1 exceeds this and the series crawls
_X1_LIMIT = 0.995
_P_BLOCK = 64
# largest (p, n) grid the small-z mixture may evaluate at once
_MIXTURE_BUDGET = 1 << 24


@dataclass
class SeriesWorkspace:
    """Per-scenario constants for the CDF and PDF series.

    Everything cached here is a function of the scenario alone; the outer
    weights are extended lazily as deeper ``p`` are requested.
    """

    scenario: Scenario
    ctl: SeriesControl = DEFAULT_CONTROL
    shells_evaluated: int = 0
    cap_hits: int = 0
    _outer_log: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    def __post_init__(self):
        s = self.scenario
        d = derive_params(s)
        self.derived = d
        self.mu = s.source.mu
        self.m = s.source.m
        self.beta = s.total_mu
        self.theta, self.lam = d.theta, d.lam
        self.ratio = 1.0 - self.theta / self.lam  # NB success ratio of the source
        # interferer factors (shape, scale)
        self.b = np.array([p.mu - p.m for p in s.interferers] + [p.m for p in s.interferers])
        self.scales = np.array(list(d.theta_i) + list(d.lambda_i))
        self.pivot = int(np.argmin(d.theta_i))
        self.s1 = d.theta_i[self.pivot]
        self.z_min = self.theta * (1.0 - _X1_LIMIT) / (_X1_LIMIT * self.s1)
        # CDF and survival mixtures meet where v = 1/2
        self.z_mid = self.theta / self.s1
        self._mix_coeffs = _ShellCoefficients(self.b, 1.0 - self.s1 / self.scales)
        self._log_mix_pref = self.m * math.log(self.theta / self.lam) + float(
            np.sum(self.b * np.log(self.s1 / self.scales))
        )
        self._log_pref = (
            self.m * math.log(self.theta / self.lam)
            - math.lgamma(self.beta + 1.0)
            - math.lgamma(self.mu)
        )
        self._log_k5 = (
            (self.m + self.beta) * math.log(self.theta)
            + math.lgamma(self.mu + self.beta)
            - self.m * math.log(self.lam)
            - math.lgamma(self.mu)
            - math.lgamma(self.beta)
            - float(np.sum(self.b * np.log(self.scales)))
        )

    # ---------------------------------------------------------------- outer
    def outer_log_weights(self, P: int) -> np.ndarray:
        """``ln[(m)_p r^p Gamma(beta+mu+p) / ((mu)_p p!)]`` for p < P."""
        if len(self._outer_log) < P:
            p = np.arange(P)
            if self.ratio > 0:
                lr = p * math.log(self.ratio)
            else:
                lr = np.where(p == 0, 0.0, -np.inf)
            lm, _ = _lnpoch_vec(self.m, p)
            lmu, _ = _lnpoch_vec(self.mu, p)
            self._outer_log = lm + lr + gammaln(self.beta + self.mu + p) - lmu - gammaln(p + 1.0)
        return self._outer_log[:P]

    @property
    def n_outer(self) -> int:
        return 1 if self.ratio == 0 else self.ctl.max_outer_p

    # -------------------------------------------------------------- survival
    def _pivot_arguments(self, z):
        denom = self.theta + z * self.s1
        x1 = self.theta / denom
        keep = np.ones(len(self.b), dtype=bool)
        keep[self.pivot] = False
        w = self.theta * (self.scales[keep] - self.s1) / (self.scales[keep] * denom)
        return x1, self.b[keep], w

    def log_survival(self, z: float) -> LogSeriesResult:
        """``ln P(SIR > z)`` via the transformed outer/inner series.

        Each inner row ``(A)_k / (c)_k g_k`` peaks near
        ``k = (A xmax - c) / (1 - xmax)``, so its shell count starts from
        that estimate and doubles until the row converges.
        """
        x1, b_rest, w = self._pivot_arguments(z)
        coeffs = _ShellCoefficients(np.concatenate([[1.0], b_rest]), np.concatenate([[x1], w]))
        c = 1.0 + self.beta
        log_1mx1 = math.log(z * self.s1 / (self.theta + z * self.s1))
        log_pref = self._log_pref + float(np.sum(self.b * np.log(self.theta / (z * self.scales))))
        cap = self.ctl.max_total_order + 1
        xmax = coeffs.xmax
        shells = _InnerShells(coeffs, c)

        def inner(A: float) -> LogSeriesResult:
            peak = max(0.0, (A * xmax - c) / (1.0 - xmax))
            K = min(cap, max(64, 1 << math.ceil(math.log2(2.0 * peak + 64.0))))
            while True:
                base, sh = shells.upto(K)
                row = gammaln(A + np.arange(K)) - gammaln(A) + base
                self.shells_evaluated += K
                shift, scaled = _sum_log_terms(row, sh)
                r = _finish(scaled, shift, self.ctl)
                if r.converged or K >= cap:
                    return r
                K = min(2 * K, cap)

        n_outer = self.n_outer
        outer_logs, outer_signs = [], []
        inner_ok = True
        p0 = 0
        while p0 < n_outer:
            P = min(p0 + _P_BLOCK, n_outer)
            lw = self.outer_log_weights(P)
            for p in range(p0, P):
                A = p + self.mu + self.beta
                r = inner(A)
                if not r.converged:
                    inner_ok = False
                    self.cap_hits += 1
                outer_logs.append(lw[p] + A * log_1mx1 + r.log_abs)
                outer_signs.append(r.sign)
            p0 = P
            if n_outer == 1:
                break
            shift, scaled = _sum_log_terms(np.array(outer_logs), np.array(outer_signs))
            stop, _ = _stop_index(scaled, np.cumsum(scaled), self.ctl)
            if stop is not None:
                break
        ol = np.array(outer_logs)
        shift, scaled = _sum_log_terms(ol, np.array(outer_signs))
        outer = _finish(scaled, shift, self.ctl, exact=(self.ratio == 0))
        converged = outer.converged and inner_ok
        if not converged:
            warnings.warn(
                f"SIR survival series at z={z:g} did not converge (outer terms {len(ol)})",
                SeriesConvergenceWarning,
                stacklevel=4,
            )
        return LogSeriesResult(
            log_pref + outer.log_abs, outer.sign, outer.terms_used, converged, outer.est_tail_rel
        )

    def log_mixture(self, z: float, upper: bool = False) -> LogSeriesResult:
        """``ln P(SIR <= z)``, or ``ln P(SIR > z)`` when ``upper``, as a double
        mixture of regularized incomplete beta values.

        Expanding the interference sum about the pivot scale ``s_1`` writes it
        as a mixture of ``Gamma(beta + n, s_1)`` laws, with weights
        ``prod_j (s_1/s_j)^b_j`` times the coefficients of
        ``prod_j (1 - (1 - s_1/s_j) u)^-b_j``.  The source is the
        negative-binomial mixture of ``Gamma(mu + p, theta)``.  Each pair
        contributes ``I_v(mu + p, beta + n)`` to the CDF, with
        ``v = z s_1 / (theta + z s_1)``, and ``I_{1-v}(beta + n, mu + p)`` to
        the survival.  This is the pivot-transformed series with its
        ``x_1 = 1 - v`` direction summed in closed form.  Every weight is
        nonnegative, so neither side suffers cancellation.
        """
        v = z * self.s1 / (self.theta + z * self.s1)
        w1 = self.theta / (self.theta + z * self.s1)
        coeffs = self._mix_coeffs
        p_cap = self.n_outer
        n_cap = self.ctl.max_total_order
        P, N = min(16, p_cap), min(64, n_cap)
        while True:
            lw = self.mixture_log_weights(P)
            h = np.maximum(coeffs.extend(N), 0.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                ld = np.log(h)
                if coeffs.xmax > 0:
                    ld = ld + np.arange(N) * coeffs.log_xmax
                else:
                    ld[1:] = -np.inf
            shift = float(np.max(lw)) + float(np.max(ld))
            with np.errstate(under="ignore"):
                weight = np.exp(lw[:, None] + ld[None, :] - shift)
            a = self.mu + np.arange(P)[:, None]
            b = self.beta + np.arange(N)[None, :]
            terms = weight * (betainc(b, a, w1) if upper else betainc(a, b, v))
            self.shells_evaluated += P * N
            rows, cols = terms.sum(axis=1), terms.sum(axis=0)
            p_ok = self.ratio == 0 or _stop_index(rows, np.cumsum(rows), self.ctl)[0] is not None
            n_ok = coeffs.xmax == 0 or _stop_index(cols, np.cumsum(cols), self.ctl)[0] is not None
            grow_p = not p_ok and P < p_cap
            grow_n = not n_ok and N < n_cap
            budget_left = (2 if grow_p else 1) * (2 if grow_n else 1) * P * N <= _MIXTURE_BUDGET
            if not (grow_p or grow_n) or not budget_left:
                break
            if grow_p:
                P = min(2 * P, p_cap)
            if grow_n:
                N = min(2 * N, n_cap)
        total = float(terms.sum())
        converged = p_ok and n_ok
        if not converged:
            self.cap_hits += 1
            side = "survival" if upper else "CDF"
            warnings.warn(
                f"SIR {side} mixture at z={z:g} did not converge ({P} x {N} terms)",
                SeriesConvergenceWarning,
                stacklevel=4,
            )
        if total <= 0:
            return LogSeriesResult(-math.inf, 0.0, P * N, converged, 0.0)
        tail = max(float(rows[-1]), float(cols[-1])) / total
        return LogSeriesResult(self._log_mix_pref + shift + math.log(total), 1.0, P * N, converged, tail)

    def mixture_log_weights(self, P: int) -> np.ndarray:
        """``ln[(m)_p r^p / p!]`` for p < P, without the ``(theta/lambda)^m`` factor."""
        p = np.arange(P)
        if self.ratio > 0:
            lr = p * math.log(self.ratio)
        else:
            lr = np.where(p == 0, 0.0, -np.inf)
        return _lnpoch_vec(self.m, p)[0] - gammaln(p + 1.0) + lr

    def log_survival_direct(self, z: float) -> LogSeriesResult:
        """Untransformed outer sum of ``F_D(1-p-mu; ...)`` terms."""
        x = self.theta / (self.theta + z * self.scales)
        log_k1 = self._log_pref + float(np.sum(self.b * np.log(x)))
        c = 1.0 + self.beta
        n_outer = self.n_outer
        logs, signs = [], []
        converged = True
        P = 0
        while P < n_outer:
            P = min(P + _P_BLOCK, n_outer)
            lw = self.outer_log_weights(P)
            for p in range(len(logs), P):
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", SeriesConvergenceWarning)
                    r = _fd_log(1.0 - p - self.mu, self.b, c, x, self.ctl)
                converged &= r.converged
                logs.append(lw[p] + r.log_abs)
                signs.append(r.sign)
            shift, scaled = _sum_log_terms(np.array(logs), np.array(signs))
            if _stop_index(scaled, np.cumsum(scaled), self.ctl)[0] is not None or n_outer == 1:
                break
        shift, scaled = _sum_log_terms(np.array(logs), np.array(signs))
        outer = _finish(scaled, shift, self.ctl, exact=(self.ratio == 0))
        return LogSeriesResult(
            log_k1 + outer.log_abs, outer.sign, outer.terms_used,
            converged and outer.converged, outer.est_tail_rel,
        )

    # ------------------------------------------------------------------- pdf
    def log_pdf(self, z: float) -> LogSeriesResult:
        d = self.derived
        th, lam, t1 = self.theta, self.lam, self.s1
        denom = th + z * t1
        n = self.scenario.n_interferers
        b = [self.m]
        x = [z * t1 * (lam - th) / (lam * denom)]
        for i, q in enumerate(self.scenario.interferers):
            if i != self.pivot:
                b.append(q.mu - q.m)
                x.append(th * (d.theta_i[i] - t1) / (d.theta_i[i] * denom))
        for i, q in enumerate(self.scenario.interferers):
            b.append(q.m)
            x.append(th * (d.lambda_i[i] - t1) / (d.lambda_i[i] * denom))
        assert len(b) == 2 * n
        ed = _ed_log(self.mu + self.beta, b, self.mu, self.beta, x, self.ctl)
        if not ed.converged:
            self.cap_hits += 1
        log_f = (
            self._log_k5
            - (1.0 + self.beta) * math.log(z)
            - (self.mu + self.beta) * math.log1p(th / (z * t1))
            + ed.log_abs
        )
        return LogSeriesResult(log_f, ed.sign, ed.terms_used, ed.converged, ed.est_tail_rel)


class _InnerShells:
    """``k ln xmax + ln|g_k| - ln (c)_k`` and the signs of ``g_k``, grown on demand."""

    def __init__(self, coeffs: _ShellCoefficients, c: float):
        self.coeffs, self.c = coeffs, c
        self.base = np.zeros(0)
        self.sign = np.zeros(0)

    def upto(self, K: int):
        if len(self.base) < K:
            k = np.arange(K)
            lh, sh = _log_abs_sign(self.coeffs.extend(K))
            lc, _ = _lnpoch_vec(self.c, k)
            with np.errstate(invalid="ignore"):
                base = k * self.coeffs.log_xmax + lh - lc
            base[0] = lh[0] - lc[0]
            self.base, self.sign = base, sh
        return self.base[:K], self.sign[:K]


@lru_cache(maxsize=64)
def _workspace(s: Scenario, ctl: SeriesControl) -> SeriesWorkspace:
    return SeriesWorkspace(s, ctl)


def _check_z(z):
    if not z > 0:
        raise ValueError(f"z must be positive, got {z}")


METHODS = ("mixture", "pivot", "direct")


def _series(ws: SeriesWorkspace, z: float, method: str, upper: bool) -> LogSeriesResult:
    """``ln P(SIR > z)`` (``upper``) or ``ln P(SIR <= z)`` by the chosen route.

    The Lauricella routes produce the survival only; the lower side is
    requested from them as a survival and complemented by the caller.
    """
    if method == "mixture":
        return ws.log_mixture(z, upper)
    if method == "direct":
        return ws.log_survival_direct(z)
    if z < ws.z_min:
        # the pivot argument is too close to 1 for the power series
        return ws.log_mixture(z, upper)
    return ws.log_survival(z)


def _check_method(method: str):
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def survival_series(s: Scenario, z: float, ctl: SeriesControl | None = None,
                    method: str = "mixture") -> LogSeriesResult:
    """Survival ``P(SIR > z)`` as a log-domain series result with diagnostics."""
    _check_z(z)
    _check_method(method)
    return _series(_workspace(s, ctl or DEFAULT_CONTROL), z, method, upper=True)


def pdf_series(s: Scenario, z: float, ctl: SeriesControl | None = None) -> LogSeriesResult:
    _check_z(z)
    return _workspace(s, ctl or DEFAULT_CONTROL).log_pdf(z)


def _both_sides(s, z, ctl, method) -> tuple[float, float]:
    """``(F, 1 - F)`` with whichever side is small computed directly."""
    ws = _workspace(s, ctl or DEFAULT_CONTROL)
    lower = method != "direct" and z < ws.z_mid
    if method == "pivot" and z >= ws.z_min:
        lower = False
    r = _series(ws, z, method, upper=not lower)
    small = min(math.exp(r.log_abs), 1.0) if r.sign > 0 else 0.0
    return (small, 1.0 - small) if lower else (1.0 - small, small)


def _cdf_scalar(s, z, ctl, method):
    _check_z(z)
    _check_method(method)
    if math.isinf(z):
        return 1.0
    return _both_sides(s, z, ctl, method)[0]


def _ccdf_scalar(s, z, ctl, method):
    _check_z(z)
    _check_method(method)
    if math.isinf(z):
        return 0.0
    return _both_sides(s, z, ctl, method)[1]


def log_survival(s: Scenario, z: float, ctl: SeriesControl | None = None) -> float:
    """``ln P(SIR > z)`` for scalar ``z``, valid across the whole positive axis."""
    if z <= 0:
        return 0.0
    if math.isinf(z):
        return -math.inf
    ws = _workspace(s, ctl or DEFAULT_CONTROL)
    if z < ws.z_mid:
        r = ws.log_mixture(z, upper=False)
        return math.log1p(-math.exp(r.log_abs)) if r.sign > 0 else 0.0
    r = ws.log_mixture(z, upper=True)
    return r.log_abs if r.sign > 0 else -math.inf


def _pdf_scalar(s, z, ctl):
    _check_z(z)
    r = pdf_series(s, z, ctl)
    return 0.0 if r.sign <= 0 else math.exp(r.log_abs)


def _vectorised(fn, s, z, *args):
    if np.ndim(z) == 0:
        return fn(s, float(z), *args)
    z = np.asarray(z, dtype=float)
    return np.array([fn(s, float(v), *args) for v in z.ravel()]).reshape(z.shape)


def exact_cdf(s: Scenario, z, ctl: SeriesControl | None = None, method: str = "mixture"):
    """``P(SIR <= z)`` for ``z > 0``; accepts a scalar or an array of thresholds.

    ``method`` picks the summation: ``"mixture"`` (incomplete beta shells),
    ``"pivot"`` (transformed Lauricella series) or ``"direct"`` (the series
    as written, reliable only where its terms do not cancel).
    """
    return _vectorised(_cdf_scalar, s, z, ctl, method)


def exact_ccdf(s: Scenario, z, ctl: SeriesControl | None = None, method: str = "mixture"):
    """``P(SIR > z)`` summed directly, without the ``1 - F`` cancellation."""
    return _vectorised(_ccdf_scalar, s, z, ctl, method)


def exact_pdf(s: Scenario, z, ctl: SeriesControl | None = None):
    """SIR density; accepts a scalar or an array."""
    return _vectorised(_pdf_scalar, s, z, ctl)
