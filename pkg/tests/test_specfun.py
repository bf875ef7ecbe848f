import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evtsir.specfun import (
    SeriesControl,
    SeriesConvergenceWarning,
    confluent_ed,
    kummer_1f1,
    lauricella_fd,
    lauricella_fd_exact,
    ln_gamma,
    ln_pochhammer,
    reg_inc_beta,
)
from oracles import fd_bruteforce_exact, fd_bruteforce_float, hyp2f1_partial


class TestLnGamma:
    def test_known_values(self):
        assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
        assert ln_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-13)
        assert ln_gamma(10.0) == pytest.approx(math.log(362880.0), rel=1e-13)

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            ln_gamma(x)


class TestLnPochhammer:
    def test_empty_product(self):
        assert ln_pochhammer(3, 0) == (0.0, 1)

    def test_direct_product(self):
        la, sg = ln_pochhammer(2, 3)
        assert sg == 1 and math.exp(la) == pytest.approx(24.0, rel=1e-14)

    def test_terminating_zero(self):
        la, sg = ln_pochhammer(-1, 2)
        assert sg == 0 and la == -math.inf

    def test_negative_sign(self):
        la, sg = ln_pochhammer(-2.5, 3)  # (-2.5)(-1.5)(-0.5)
        assert sg == -1 and math.exp(la) == pytest.approx(1.875, rel=1e-14)

    def test_large_order_uses_gamma_ratio(self):
        la, sg = ln_pochhammer(0.7, 400)
        assert sg == 1
        assert la == pytest.approx(math.lgamma(400.7) - math.lgamma(0.7), rel=1e-13)

    @settings(max_examples=200, deadline=None)
    @given(
        a=st.floats(-12.0, 12.0, allow_nan=False).filter(lambda v: abs(v - round(v)) > 1e-6),
        p=st.integers(0, 10),
        q=st.integers(0, 10),
    )
    def test_additivity(self, a, p, q):
        l1, s1 = ln_pochhammer(a, p)
        l2, s2 = ln_pochhammer(a + p, q)
        l3, s3 = ln_pochhammer(a, p + q)
        assert s1 * s2 == s3
        assert l1 + l2 == pytest.approx(l3, abs=1e-11 * max(1.0, abs(l3)))


class TestKummer:
    def test_zero_argument(self):
        assert kummer_1f1(0.3, 1.7, 0.0).value == 1.0

    def test_exponential(self):
        assert kummer_1f1(1, 1, 2).value == pytest.approx(math.exp(2), rel=1e-13)

    def test_closed_form(self):
        assert kummer_1f1(1, 2, 1).value == pytest.approx(math.e - 1, rel=1e-13)

    def test_negative_argument_reflection(self):
        from scipy.special import hyp1f1

        for a, b, x in [(0.3, 1.7, -20.0), (2.0, 3.5, -5.0), (1.5, 0.5, -40.0)]:
            r = kummer_1f1(a, b, x)
            assert r.converged
            assert r.value == pytest.approx(hyp1f1(a, b, x), rel=1e-10)

    def test_cap_is_reported(self):
        ctl = SeriesControl(max_total_order=5)
        with pytest.warns(SeriesConvergenceWarning):
            r = kummer_1f1(1, 1, 30.0, ctl)
        assert not r.converged


class TestLauricellaFD:
    def test_zero_arguments(self):
        assert lauricella_fd(0.7, [1.5, 2.0], 3.0, [0.0, 0.0]).value == 1.0

    def test_two_shell_terminating(self):
        b, c, x = [2.0, 0.5, 3.0], 2.5, [0.2, 0.4, 0.1]
        r = lauricella_fd(-1, b, c, x)
        assert r.terms_used == 2
        assert r.value == pytest.approx(1 - sum(bi * xi for bi, xi in zip(b, x)) / c, rel=1e-14)

    def test_spec_point_matches_gauss(self):
        r = lauricella_fd(0.5, [1.0], 2.0, [0.3])
        assert r.value == pytest.approx(hyp2f1_partial(0.5, 1.0, 2.0, 0.3), rel=1e-12)

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.5])
    @pytest.mark.parametrize("b", [0.5, 1.0, 2.5])
    @pytest.mark.parametrize("c", [0.5, 1.0, 2.5])
    @pytest.mark.parametrize("x", [-0.9, -0.5, -0.1, 0.1, 0.5, 0.9])
    def test_single_variable_grid(self, a, b, c, x):
        r = lauricella_fd(a, [b], c, [x], SeriesControl(max_total_order=5000))
        assert r.converged
        assert r.value == pytest.approx(hyp2f1_partial(a, b, c, x), rel=1e-10)

    def test_two_variable_against_nested_sums(self):
        a, b, c, x = 1.3, [0.7, 2.2], 3.1, [0.35, -0.2]
        ref = fd_bruteforce_float(a, b, c, x, max_deg=80)
        assert lauricella_fd(a, b, c, x).value == pytest.approx(ref, rel=1e-12)

    @pytest.mark.parametrize(
        "a,b,c,x",
        [
            (-3, [1, 2], 3, ["1/3", "1/5"]),
            (-2, [-1, 2, 1], 2, ["1/2", "1/7", "2/3"]),
            (-4, [3, 1], 5, ["3/4", "1/9"]),
            (0, [2, 5], 1, ["1/2", "1/2"]),
        ],
    )
    def test_terminating_exact_rational(self, a, b, c, x):
        from fractions import Fraction

        xs = [Fraction(v) for v in x]
        exact = lauricella_fd_exact(a, b, c, xs)
        assert exact == fd_bruteforce_exact(a, b, c, xs)
        assert lauricella_fd(a, b, c, [float(v) for v in xs]).value == pytest.approx(float(exact), rel=1e-13)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            lauricella_fd(0.5, [1.0], 2.0, [1.0])
        with pytest.raises(ValueError):
            lauricella_fd(0.5, [1.0], -2.0, [0.3])

    def test_raising_cap_keeps_converged_value(self):
        a, b, c, x = 2.5, [1.5, 0.5], 1.5, [0.8, -0.6]
        lo = lauricella_fd(a, b, c, x, SeriesControl(max_total_order=400))
        hi = lauricella_fd(a, b, c, x, SeriesControl(max_total_order=4000))
        assert lo.converged and hi.converged
        assert abs(lo.value - hi.value) <= 1e-12 * abs(hi.value)

    def test_cap_stop_is_flagged(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SeriesConvergenceWarning)
            r = lauricella_fd(3.0, [2.0], 1.0, [0.99], SeriesControl(max_total_order=10))
        assert not r.converged


class TestConfluentED:
    def test_zero_arguments(self):
        assert confluent_ed(2.0, [1.0, 0.5], 1.5, 2.5, [0.0, 0.0]).value == 1.0

    def test_single_index_partial_sums(self):
        a, b1, c1, x = 2.0, 1.0, 1.0, 0.4
        ref, term = 0.0, 1.0
        for k in range(400):
            ref += term
            term *= (a + k) * (b1 + k) / ((c1 + k) * (k + 1)) * x
        assert confluent_ed(a, [b1], c1, 5.0, [x]).value == pytest.approx(ref, rel=1e-12)

    def test_terminating_first_index(self):
        # b1 = -1 leaves p1 in {0, 1}; single remaining variable sums in closed form
        a, c1, c2, b2, x1, x2 = 1.5, 2.0, 3.0, 0.5, 0.3, 0.2
        r = confluent_ed(a, [-1.0, b2], c1, c2, [x1, x2])
        ref = 0.0
        for p1 in (0, 1):
            for p2 in range(400):
                k = p1 + p2
                t = math.exp(
                    math.lgamma(a + k) - math.lgamma(a)
                    + math.lgamma(b2 + p2) - math.lgamma(b2)
                    - math.lgamma(c1 + p1) + math.lgamma(c1)
                    - math.lgamma(c2 + p2) + math.lgamma(c2)
                    - math.lgamma(p1 + 1) - math.lgamma(p2 + 1)
                )
                ref += (-1.0) ** p1 * t * x1**p1 * x2**p2
        assert r.value == pytest.approx(ref, rel=1e-12)


class TestRegIncBeta:
    def test_values(self):
        assert reg_inc_beta(1, 1, 0.7) == pytest.approx(0.7, rel=1e-15)
        assert reg_inc_beta(2, 2, 0.5) == pytest.approx(0.5, rel=1e-15)
        assert reg_inc_beta(3.2, 1.1, 0.0) == 0.0
        assert reg_inc_beta(3.2, 1.1, 1.0) == 1.0

    def test_monotone(self):
        u = np.linspace(0, 1, 101)
        v = [reg_inc_beta(2.5, 0.7, x) for x in u]
        assert np.all(np.diff(v) >= 0)

    @pytest.mark.parametrize("args", [(1, 1, -0.1), (1, 1, 1.1), (0, 1, 0.5), (1, -1, 0.5)])
    def test_domain(self, args):
        with pytest.raises(ValueError):
            reg_inc_beta(*args)


def test_series_control_validation():
    with pytest.raises(ValueError):
        SeriesControl(rel_tol=0)
    with pytest.raises(ValueError):
        SeriesControl(max_total_order=0)
