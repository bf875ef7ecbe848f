"""Scalar special functions and multivariate hypergeometric series kernels.

The Lauricella ``F_D`` and confluent ``E_D`` series are summed by total-degree
shells.  For ``F_D`` every term of shell ``k`` shares the factor
``(a)_k / (c)_k``, and the remaining shell sum

    S_k = sum_{p_1+...+p_n=k} prod_i (b_i)_{p_i} x_i^{p_i} / p_i!

is the coefficient of ``t^k`` in ``prod_i (1 - x_i t)^{-b_i}``.  Those
coefficients come from a power-sum recurrence, so a shell costs ``O(k)``
instead of enumerating every composition of ``k``.

All Pochhammer arithmetic is carried in the log domain with explicit signs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import betainc, gammaln, gammasgn

__all__ = [
    "SeriesControl",
    "SeriesResult",
    "SeriesConvergenceWarning",
    "ln_gamma",
    "ln_pochhammer",
    "kummer_1f1",
    "lauricella_fd",
    "lauricella_fd_exact",
    "confluent_ed",
    "reg_inc_beta",
]


class SeriesConvergenceWarning(RuntimeWarning):
    """A series hit its term cap before meeting the stop tolerance."""


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy shared by every series evaluation."""

    rel_tol: float = 1e-12
    max_total_order: int = 200
    max_outer_p: int = 500
    stall_window: int = 3

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        for name in ("max_total_order", "max_outer_p", "stall_window"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms_used: int
    converged: bool
    est_tail: float


@dataclass(frozen=True)
class LogSeriesResult:
    """Series value kept as ``sign * exp(log_abs)`` to survive over/underflow."""

    log_abs: float
    sign: float
    terms_used: int
    converged: bool
    est_tail_rel: float

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)

    def to_result(self) -> SeriesResult:
        v = self.value
        return SeriesResult(v, self.terms_used, self.converged, self.est_tail_rel * abs(v))


# --------------------------------------------------------------------------
# scalar functions
# --------------------------------------------------------------------------


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    if not x > 0:
        raise ValueError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _is_nonpos_int(a: float) -> bool:
    return a <= 0 and float(a).is_integer()


def ln_pochhammer(a: float, p: int) -> tuple[float, int]:
    """Log-magnitude and sign of the rising factorial ``(a)_p``.

    Returns ``(-inf, 0)`` when the product is exactly zero, i.e. ``a`` is a
    non-positive integer and ``p > -a``.
    """
    if p < 0 or int(p) != p:
        raise ValueError(f"p must be a nonnegative integer, got {p}")
    p = int(p)
    if p == 0:
        return 0.0, 1
    if _is_nonpos_int(a):
        n = int(-a)
        if p > n:
            return -math.inf, 0
        # (-n)_p = (-1)^p n! / (n-p)!
        return math.lgamma(n + 1) - math.lgamma(n - p + 1), (-1) ** p
    if p <= 32:
        # short products are more accurate done directly
        log_abs, sign = 0.0, 1
        for j in range(p):
            t = a + j
            if t < 0:
                sign = -sign
            log_abs += math.log(abs(t))
        return log_abs, sign
    if a > 0:
        return math.lgamma(a + p) - math.lgamma(a), 1
    sign = int(gammasgn(a + p) * gammasgn(a))
    return float(gammaln(a + p) - gammaln(a)), sign


def _lnpoch_vec(a: float, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``ln|(a)_k|`` and sign over an integer array ``k``."""
    k = np.asarray(k)
    if _is_nonpos_int(a):
        n = int(-a)
        kk = np.minimum(k, n)
        logs = gammaln(n + 1.0) - gammaln(n - kk + 1.0)
        sign = np.where(k % 2 == 0, 1.0, -1.0)
        dead = k > n
        logs = np.where(dead, -np.inf, logs)
        sign = np.where(dead, 0.0, sign)
        return logs, sign
    if a > 0:
        return gammaln(a + k) - gammaln(a), np.ones(k.shape)
    logs = gammaln(a + k) - gammaln(a)
    sign = gammasgn(a + k) * gammasgn(a)
    return logs, sign


def _ln_poch_ratio(a: float, c: float, K: int) -> tuple[np.ndarray, np.ndarray]:
    """``ln|(a)_k / (c)_k|`` and sign for ``k < K`` as a running sum.

    Each step adds ``log1p((a - c)/(c + i))``, a small number once ``i`` is
    large, and the running sum is kept in extended precision.  A term held
    as its logarithm loses about ``|ln t|`` ulps when rounded to a double;
    the extra bits keep alternating sums with large peak terms accurate.
    """
    out = np.zeros(K, dtype=np.longdouble)
    sign = np.ones(K)
    if K > 1:
        i = np.arange(K - 1, dtype=np.longdouble)
        den = np.longdouble(c) + i
        r = (np.longdouble(a) + i) / den
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(r > 0, np.log1p((a - c) / den), np.log(np.abs(r)))
        out[1:] = np.cumsum(step)
        sign[1:] = np.cumprod(np.sign(r).astype(float))
        out[1:][sign[1:] == 0] = -np.inf
    return out, sign


def reg_inc_beta(a: float, b: float, u: float) -> float:
    """Regularized incomplete beta ``I_u(a, b)``."""
    if not (a > 0 and b > 0):
        raise ValueError("reg_inc_beta requires a, b > 0")
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"u must lie in [0, 1], got {u}")
    return float(betainc(a, b, u))


# --------------------------------------------------------------------------
# stopping rule
# --------------------------------------------------------------------------


def _stop_index(terms: np.ndarray, partial: np.ndarray, ctl: SeriesControl):
    """First index where ``stall_window`` consecutive terms are negligible.

    Returns ``(index, tail_rel)`` or ``(None, tail_rel_at_end)``.  ``index``
    is the last term included in the sum.
    """
    w = ctl.stall_window
    scale = np.abs(partial)
    # leading terms can underflow to exactly zero; they are not "negligible"
    small = (np.abs(terms) <= ctl.rel_tol * scale) & (scale > 0)
    n = len(terms)
    if n < w:
        return None, math.inf
    run = np.convolve(small.astype(np.int64), np.ones(w, dtype=np.int64), mode="valid")
    hits = np.flatnonzero(run == w)
    for h in hits:
        end = h + w - 1
        tail = _tail_estimate(terms[h : end + 1])
        ref = scale[end]
        rel = tail / ref if ref > 0 else (0.0 if tail == 0 else math.inf)
        # the geometric extrapolation can be optimistic by a small factor
        # when term ratios still drift, hence the margin
        if rel <= _TAIL_MARGIN * ctl.rel_tol:
            return end, rel
    ref = scale[-1]
    tail = _tail_estimate(terms[-w:])
    rel = tail / ref if ref > 0 else (0.0 if tail == 0 else math.inf)
    return None, rel


_TAIL_MARGIN = 0.1


def _tail_estimate(window: np.ndarray) -> float:
    """Geometric tail bound from the trailing terms of a series."""
    a = np.abs(window)
    last = a[-1]
    if last == 0:
        return 0.0
    prev = a[:-1]
    if np.any(prev == 0):
        return float(last)
    rho = float(np.max(a[1:] / prev))
    if rho >= 1:
        return math.inf
    return float(last * rho / (1.0 - rho))


# --------------------------------------------------------------------------
# Kummer 1F1
# --------------------------------------------------------------------------


def kummer_1f1(a: float, b: float, x: float, ctl: SeriesControl | None = None) -> SeriesResult:
    """Confluent hypergeometric ``1F1(a; b; x)`` by its power series.

    Negative arguments go through Kummer's reflection
    ``1F1(a;b;x) = e^x 1F1(b-a;b;-x)`` so the summed terms share one sign.
    """
    ctl = ctl or SeriesControl()
    if _is_nonpos_int(b):
        raise ValueError(f"b must not be a non-positive integer, got {b}")
    if x == 0:
        return SeriesResult(1.0, 1, True, 0.0)
    prefactor = 1.0
    if x < 0:
        prefactor = math.exp(x)
        a, x = b - a, -x
    terms = np.empty(ctl.max_total_order + 1)
    t = 1.0
    terms[0] = t
    n_terms = 1
    for k in range(ctl.max_total_order):
        t *= (a + k) * x / ((b + k) * (k + 1))
        terms[k + 1] = t
        n_terms += 1
        if t == 0:
            break
    terms = terms[:n_terms]
    partial = np.cumsum(terms)
    stop, tail_rel = _stop_index(terms, partial, ctl)
    if t == 0:
        stop, tail_rel = n_terms - 1, 0.0
    converged = stop is not None
    if not converged:
        stop = n_terms - 1
        warnings.warn(
            f"1F1({a}; {b}; {x}) did not converge in {n_terms} terms",
            SeriesConvergenceWarning,
            stacklevel=2,
        )
    value = prefactor * float(partial[stop])
    return SeriesResult(value, int(stop) + 1, converged, float(tail_rel * abs(value)))


# --------------------------------------------------------------------------
# shell coefficients of prod (1 - x_j t)^{-b_j}
# --------------------------------------------------------------------------


class _ShellCoefficients:
    """Coefficients ``g_k`` of ``prod_j (1 - x_j t)^{-b_j}``, extended on demand.

    Stored scaled: ``g_k = xmax^k * h_k`` with ``xmax = max |x_j|``, so the
    ``h_k`` stay polynomially bounded for any ``k``.
    """

    def __init__(self, b: Sequence[float], x: Sequence[float]):
        b = np.asarray(b, dtype=float)
        x = np.asarray(x, dtype=float)
        keep = (b != 0) & (x != 0)
        self.b, x = b[keep], x[keep]
        self.xmax = float(np.max(np.abs(x))) if x.size else 0.0
        self.y = x / self.xmax if self.xmax > 0 else x
        self.h = np.ones(1)

    @property
    def log_xmax(self) -> float:
        return math.log(self.xmax) if self.xmax > 0 else -math.inf

    @property
    def log_xmax_ext(self) -> np.longdouble:
        return np.log(np.longdouble(self.xmax)) if self.xmax > 0 else np.longdouble(-np.inf)

    def extend(self, K: int) -> np.ndarray:
        """Return ``h_0..h_{K-1}``.

        Each factor ``(1 - y t)^-b`` has coefficients ``(b)_k y^k / k!``,
        taken from log-gamma values and cut where they become negligible;
        the factors are then multiplied by direct convolution.  Unlike a
        power-sum recurrence this never subtracts large intermediate
        quantities when some ``y`` or ``b`` is negative.
        """
        if K <= len(self.h):
            return self.h[:K]
        h = np.zeros(K)
        h[0] = 1.0
        for b, y in zip(self.b, self.y):
            if b == 1.0 and y == 1.0:
                h = np.cumsum(h)
                continue
            h = np.convolve(h, _factor_coefficients(b, y, K))[:K]
        self.h = h
        return h


def _factor_coefficients(b: float, y: float, K: int) -> np.ndarray:
    """``(b)_k y^k / k!`` for ``k < K``, trimmed once the terms are negligible."""
    k = np.arange(K)
    lp, sg = _ln_poch_ratio(b, 1.0, K)
    with np.errstate(divide="ignore", invalid="ignore"):
        lc = lp + k * np.log(np.longdouble(abs(y)))
    c = np.where(sg != 0, sg * np.sign(y) ** k * np.exp(lc).astype(float), 0.0)
    big = np.flatnonzero(np.abs(c) > 1e-18 * np.max(np.abs(c)))
    return c[: big[-1] + 1] if big.size else c[:1]


def _log_abs_sign(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(v)), np.sign(v)


def _sum_log_terms(log_terms: np.ndarray, signs: np.ndarray):
    """Stable signed sum of ``signs * exp(log_terms)``; returns (shift, scaled terms)."""
    finite = np.isfinite(log_terms) & (signs != 0)
    if not np.any(finite):
        return 0.0, np.zeros_like(log_terms)
    shift = np.max(log_terms[finite])
    with np.errstate(under="ignore"):
        rel = np.exp(np.where(finite, log_terms, 0.0) - shift).astype(float)
    scaled = np.where(finite, signs * rel, 0.0)
    return float(shift), scaled


def _finish(scaled: np.ndarray, shift: float, ctl: SeriesControl, exact: bool = False):
    partial = np.cumsum(scaled)
    if exact:
        stop, tail_rel = len(scaled) - 1, 0.0
    else:
        stop, tail_rel = _stop_index(scaled, partial, ctl)
    converged = stop is not None
    if not converged:
        stop = len(scaled) - 1
    total = float(partial[stop])
    if total == 0:
        return LogSeriesResult(-math.inf, 0.0, int(stop) + 1, converged, float(tail_rel))
    return LogSeriesResult(
        shift + math.log(abs(total)), math.copysign(1.0, total), int(stop) + 1, converged, float(tail_rel)
    )


def _doubling(evaluate, cap: int, start: int = 32):
    """Re-evaluate with doubling shell counts until converged or at ``cap``."""
    K = min(start, cap)
    while True:
        res = evaluate(K)
        if res.converged or K >= cap:
            return res
        K = min(2 * K, cap)


# --------------------------------------------------------------------------
# Lauricella F_D
# --------------------------------------------------------------------------


def _check_fd_args(b, c, x):
    if len(b) != len(x):
        raise ValueError("b and x must have equal length")
    if _is_nonpos_int(c):
        raise ValueError(f"c must not be a non-positive integer, got {c}")
    if any(not abs(xi) < 1 for xi in x):
        raise ValueError("lauricella_fd requires |x_i| < 1 for every argument")


def _fd_log(a, b, c, x, ctl: SeriesControl) -> LogSeriesResult:
    coeffs = _ShellCoefficients(b, x)
    terminating = _is_nonpos_int(a)

    def evaluate(K):
        k = np.arange(K)
        lr, sr = _ln_poch_ratio(a, c, K)
        lh, sh = _log_abs_sign(coeffs.extend(K).astype(np.longdouble))
        with np.errstate(invalid="ignore"):
            logs = lr + k * coeffs.log_xmax_ext + lh
        logs[0] = lr[0] + lh[0]
        shift, scaled = _sum_log_terms(logs, sr * sh)
        return _finish(scaled, shift, ctl, exact=terminating)

    if terminating:
        return evaluate(int(-a) + 1)
    res = _doubling(evaluate, ctl.max_total_order + 1)
    if not res.converged:
        warnings.warn(
            f"F_D series hit max_total_order={ctl.max_total_order} before converging",
            SeriesConvergenceWarning,
            stacklevel=3,
        )
    return res


def lauricella_fd(
    a: float,
    b: Sequence[float],
    c: float,
    x: Sequence[float],
    ctl: SeriesControl | None = None,
) -> SeriesResult:
    """Lauricella ``F_D^{(n)}(a; b_1..b_n; c; x_1..x_n)`` for ``|x_i| < 1``.

    A non-positive integer ``a`` terminates the series after ``-a + 1``
    shells; the sum is then exact up to rounding.
    """
    ctl = ctl or SeriesControl()
    _check_fd_args(b, c, x)
    return _fd_log(a, b, c, x, ctl).to_result()


def lauricella_fd_exact(a: int, b: Sequence, c, x: Sequence) -> Fraction:
    """Terminating ``F_D`` in exact rational arithmetic, by degree shells.

    ``a`` must be a non-positive integer.  Shell sums are built by
    convolving the single-variable series ``(b_i)_p x_i^p / p!`` one
    variable at a time.
    """
    if not (int(a) == a and a <= 0):
        raise ValueError("exact evaluation needs a terminating series (a <= 0 integer)")
    degree = int(-a)
    shells = [Fraction(1)] + [Fraction(0)] * degree
    for bi, xi in zip(b, x):
        bi, xi = Fraction(bi), Fraction(xi)
        single = [Fraction(1)]
        for p in range(degree):
            single.append(single[-1] * (bi + p) * xi / (p + 1))
        shells = [sum(shells[j] * single[k - j] for j in range(k + 1)) for k in range(degree + 1)]
    total = Fraction(0)
    ratio = Fraction(1)
    a, c = Fraction(a), Fraction(c)
    for k in range(degree + 1):
        total += ratio * shells[k]
        ratio = ratio * (a + k) / (c + k)
    return total


# --------------------------------------------------------------------------
# confluent E_D with split denominators
# --------------------------------------------------------------------------


def _ed_log(a, b, c1, c2, x, ctl: SeriesControl) -> LogSeriesResult:
    b0, x0 = float(b[0]), float(x[0])
    rest = _ShellCoefficients(b[1:], x[1:])
    lx0 = math.log(abs(x0)) if x0 != 0 else -math.inf
    s0 = 1.0 if x0 >= 0 else -1.0
    terminating = _is_nonpos_int(a)

    def evaluate(K):
        k = np.arange(K)
        # first index: (b0)_j x0^j / ((c1)_j j!)
        lb, sb = _lnpoch_vec(b0, k)
        lc1, sc1 = _lnpoch_vec(c1, k)
        with np.errstate(invalid="ignore"):
            f1 = lb - lc1 - gammaln(k + 1.0) + k * lx0
        f1[0] = 0.0
        sf1 = sb * sc1 * np.where(k % 2 == 1, s0, 1.0)
        # remaining indices share (c2)_q
        lh, sh = _log_abs_sign(rest.extend(K))
        lc2, sc2 = _lnpoch_vec(c2, k)
        with np.errstate(invalid="ignore"):
            g = lh - lc2 + k * rest.log_xmax
        g[0] = lh[0] - lc2[0]
        sg = sh * sc2
        la, sa = _lnpoch_vec(a, k)
        live_j = np.flatnonzero(np.isfinite(f1) & (sf1 != 0))
        live_q = np.isfinite(g) & (sg != 0)
        if live_j.size == 0:
            return _finish(np.zeros(K), 0.0, ctl)
        # global shift for the (j, q) grid
        shift = -math.inf
        for j in live_j:
            q = np.arange(K - j)
            cand = la[j + q] + f1[j] + g[q]
            ok = live_q[q] & np.isfinite(cand)
            if np.any(ok):
                shift = max(shift, float(np.max(cand[ok])))
        if not np.isfinite(shift):
            shift = 0.0
        shells = np.zeros(K)
        for j in live_j:
            q = np.arange(K - j)
            lt = la[j + q] + f1[j] + g[q]
            st = sa[j + q] * sf1[j] * sg[q]
            ok = live_q[q] & np.isfinite(lt) & (st != 0)
            with np.errstate(under="ignore"):
                shells[j:] += np.where(ok, st * np.exp(np.where(ok, lt, 0.0) - shift), 0.0)
        return _finish(shells, shift, ctl, exact=terminating and K > -a)

    if terminating:
        return evaluate(int(-a) + 1)
    res = _doubling(evaluate, ctl.max_total_order + 1)
    if not res.converged:
        warnings.warn(
            f"E_D series hit max_total_order={ctl.max_total_order} before converging",
            SeriesConvergenceWarning,
            stacklevel=3,
        )
    return res


def confluent_ed(
    a: float,
    b: Sequence[float],
    c1: float,
    c2: float,
    x: Sequence[float],
    ctl: SeriesControl | None = None,
) -> SeriesResult:
    """Confluent Lauricella ``(1)(1)E_D^{(n)}[a, b; c1, c2; x]``.

    The first summation index carries ``(c1)_{p_1}`` in the denominator, the
    remaining ones share ``(c2)_{p_2+...+p_n}``.
    """
    ctl = ctl or SeriesControl()
    if len(b) != len(x) or len(b) < 1:
        raise ValueError("b and x must have equal, nonzero length")
    for c in (c1, c2):
        if _is_nonpos_int(c):
            raise ValueError(f"denominator parameter must not be a non-positive integer, got {c}")
    if any(not abs(xi) < 1 for xi in x):
        raise ValueError("confluent_ed requires |x_i| < 1 for every argument")
    return _ed_log(a, b, c1, c2, x, ctl).to_result()
