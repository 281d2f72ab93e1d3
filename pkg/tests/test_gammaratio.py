import math

import mpmath as mp
import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expgamma import gammaratio as gr
from expgamma.errors import DomainError, InputError, NoBracketError, PreconditionError, UnsupportedOrderError
from expgamma.ineq import LambdaMatrix, LambdaTensor
from expgamma.monocheck import GridSpec
from expgamma.specfun import polygamma

ONES = LambdaMatrix(np.ones((2, 2)))


def _spec(lam, rho=2.0, theta=0.0):
    return gr.RatioSpec(LambdaMatrix(lam), rho, theta)


def _mp_ln_F(t, spec):
    # runs at the caller's precision so mpmath differentiation can raise it
    w, c = spec.weights()
    t = mp.mpf(t)
    return mp.fsum(mp.mpf(ci) * mp.mpf(wi) ** spec.theta * mp.loggamma(1 + mp.mpf(wi) * t) for wi, ci in zip(w, c))


def _central(f, t, h):
    return (f(t + h) - f(t - h)) / (2 * h)


class TestSpecs:
    def test_ratio_json(self):
        s = gr.RatioSpec.from_json('{"lambda": [[1, 2], [3, 4]], "rho": 1.5, "theta": 0.5}')
        assert (s.rho, s.theta, s.lm.shape) == (1.5, 0.5, (2, 2))
        assert gr.RatioSpec.from_json({"lambda": [[1.0]]}).rho == 2.0

    def test_ratio_json_errors(self):
        with pytest.raises(InputError) as exc:
            gr.RatioSpec.from_json({"lambda": [[1.0, -2.0]]})
        assert exc.value.field == "lambda[0][1]"
        with pytest.raises(InputError):
            gr.RatioSpec.from_json({"lambda": [[1.0]], "rho": "abc"})

    def test_conjecture_json(self):
        s = gr.ConjectureSpec.from_json({"lambda3": [[[1.0, 2.0]]], "variant": "R2"})
        assert s.variant == "R2" and s.rho == 3.0
        with pytest.raises(InputError):
            gr.ConjectureSpec(s.lt, variant="L3")

    def test_binom_multinom_validation(self):
        with pytest.raises(DomainError):
            gr.BinomSpec(2, 3, 0.5)
        with pytest.raises(DomainError):
            gr.BinomSpec(2, 1, 1.0)
        with pytest.raises(DomainError):
            gr.MultinomSpec((1.0, 1.0), (0.5, 0.6))
        gr.MultinomSpec((2.0,), (1.0,))


class TestHistoryFunctions:
    def test_ln_G_examples(self):
        for spec in (gr.BinomSpec(2, 1, 0.5), gr.BinomSpec(7, 3, 0.2)):
            assert abs(gr.ln_G(1e-12, spec)) < 1e-9
        assert gr.ln_G(1.0, gr.BinomSpec(2, 1, 0.5)) == pytest.approx(math.log(0.5), rel=1e-15)
        assert gr.ln_G(2.0, gr.BinomSpec(5, 0, 0.3)) == pytest.approx(10 * math.log(0.7), rel=1e-15)

    def test_ln_Q_examples(self):
        x = np.array([0.1, 1.0, 5.0])
        assert all(gr.ln_Q(v, gr.MultinomSpec((2.0,), (1.0,))) == pytest.approx(0.0, abs=1e-15) for v in x)
        assert gr.ln_Q(1.0, gr.MultinomSpec((1.0, 1.0), (0.5, 0.5))) == pytest.approx(-math.log(2), rel=1e-15)

    def test_q_variant_against_product(self):
        spec = gr.MultinomSpec((1.0, 1.0), (0.5, 0.5), q=0.5)
        with mp.workdps(40):
            q = mp.mpf("0.5")

            def lgq(x):
                x = mp.mpf(x)
                return mp.log(mp.fprod((1 - q ** (k + 1)) / (1 - q ** (k + x)) for k in range(400))
                              * (1 - q) ** (1 - x))

            ref = float(lgq(3) - 2 * lgq(2) + mp.log(mp.mpf(1) / 4))
        assert gr.ln_Q(1.0, spec) == pytest.approx(ref, rel=1e-8)

    def test_monotone_convex(self):
        x = np.linspace(0.05, 20, 400)
        for spec in (gr.BinomSpec(6, 2, 0.3), gr.BinomSpec(4, 4, 0.9)):
            y = gr.ln_G(x, spec)
            assert np.all(np.diff(y) <= 1e-12)
            assert np.all(np.diff(y, 2) >= -1e-12)
        spec = gr.MultinomSpec((0.5, 1.0, 2.0), (0.2, 0.3, 0.5))
        y = np.array([gr.ln_Q(v, spec) for v in x])
        assert np.all(np.diff(y) <= 1e-12)
        assert np.all(np.diff(y, 2) >= -1e-12)

    def test_ln_gamma1p_small_argument(self):
        for x in (1e-12, 1e-6, 0.05, 0.19, 0.21, 3.0):
            assert gr.ln_gamma1p(x) == pytest.approx(float(mp.loggamma(1 + mp.mpf(x))), rel=1e-14)


class TestF:
    def test_trivial(self):
        s = _spec([[1.7]])
        t = np.geomspace(1e-3, 1e3, 20)
        npt.assert_array_equal(gr.ln_F(t, s), 0.0)
        npt.assert_array_equal(gr.P_eval(t, s), 0.0)
        assert gr.lnF_d1_sup(s) == 0.0

    def test_against_mpmath(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            s = _spec(rng.uniform(0.1, 5, (2, 3)), rng.choice([2.0, 1.0, 0.5]), rng.choice([0.0, 1.0, 0.5]))
            for t in (1e-3, 0.7, 50.0):
                with mp.workdps(40):
                    ref = float(_mp_ln_F(t, s))
                scale = float(gr.ln_F_deriv_scale(t, s, 0))
                assert abs(gr.ln_F(t, s) - ref) <= 1e-14 * scale

    def test_limits_and_growth(self):
        s = gr.RatioSpec(ONES, 2.0, 0.0)
        assert abs(gr.ln_F(1e-10, s)) < 1e-9
        assert gr.ln_F(10.0, s) > 0 and gr.ln_F(10.5, s) > gr.ln_F(10.0, s)
        for rho, theta in ((1.0, 0.0), (2.0, 1.0)):
            g = gr.RatioSpec(ONES, rho, theta)
            assert gr.ln_F(1e4, g) > gr.ln_F(1e2, g) > 0

    def test_log_convex(self):
        rng = np.random.default_rng(4)
        t = np.linspace(0.01, 30, 500)
        for rho, theta in ((2.0, 0.0), (1.0, 1.0), (-1.0, 2.0)):
            s = _spec(rng.uniform(0.1, 4, (3, 2)), rho, theta)
            scale = np.max(gr.ln_F_deriv_scale(t, s, 0))
            assert np.all(np.diff(gr.ln_F(t, s), 2) >= -1e-10 * scale)

    def test_derivative_chain(self):
        s = _spec(np.random.default_rng(8).uniform(0.2, 3, (2, 3)), 1.0, 0.5)
        t = 2.0
        fd = _central(lambda u: gr.ln_F(u, s), t, 1e-4)
        assert gr.ln_F_deriv(t, s, 1) == pytest.approx(fd, rel=1e-7)
        with mp.workdps(40):
            for k in range(1, 6):
                ref = float(mp.diff(lambda u: _mp_ln_F(u, s), mp.mpf(t), k))
                assert gr.ln_F_deriv(t, s, k) == pytest.approx(ref, rel=1e-10)

    def test_second_derivative_is_P(self):
        s = _spec([[1.0, 2.0], [0.5, 3.0]], 1.5, 1.0)
        t = np.geomspace(1e-3, 1e3, 50)
        npt.assert_array_equal(gr.ln_F_deriv(t, s, 2), gr.P_eval(t, s))
        npt.assert_array_equal(gr.P_deriv(t, s, 0), gr.P_eval(t, s))

    def test_increasing_concave_derivative(self):
        rng = np.random.default_rng(21)
        t = np.geomspace(1e-3, 1e3, 100)
        for rho, theta in ((2.0, 0.0), (0.0, 1.0)):
            s = _spec(rng.uniform(0.1, 4, (3, 3)), rho, theta)
            d1 = gr.ln_F_deriv(t, s, 1)
            assert np.all(np.diff(d1) >= -1e-12 * np.max(gr.ln_F_deriv_scale(t, s, 1)))
            assert np.all(gr.ln_F_deriv(t, s, 3) <= 1e-10 * np.max(gr.ln_F_deriv_scale(t, s, 3)))

    def test_order_limit(self):
        with pytest.raises(UnsupportedOrderError):
            gr.ln_F_deriv(1.0, gr.RatioSpec(ONES), 10)
        with pytest.raises(UnsupportedOrderError):
            gr.P_deriv(1.0, gr.RatioSpec(ONES), 9)


class TestP:
    def test_ones_value(self):
        v = gr.P_eval(1.0, gr.RatioSpec(ONES, 2.0, 0.0))
        # two row sums and two column sums of 2, four unit entries with rho = 2
        ref = 16 * polygamma(1, 3.0) - 8 * polygamma(1, 2.0)
        assert v == pytest.approx(ref, rel=1e-14)
        assert v > 0

    def test_boundary(self):
        s = _spec([[0.4, 1.1], [2.0, 0.3]], 1.0, 1.0)
        w, c = s.weights()
        ref = math.pi**2 / 6 * math.fsum(c * w ** (s.theta + 2))
        assert gr.P_eval(1e-9, s) == pytest.approx(ref, rel=1e-6)
        assert gr.lnF_d2_sup(s) == pytest.approx(ref, rel=1e-14)

    def test_derivative_finite_difference(self):
        s = gr.RatioSpec(ONES, 0.0, 0.0)
        fd = _central(lambda u: gr.P_eval(u, s), 1.0, 1e-4)
        assert gr.P_deriv(1.0, s, 1) == pytest.approx(fd, rel=1e-7)

    def test_complete_monotonicity_example(self):
        s = _spec(np.random.default_rng(17).uniform(0.1, 5, (3, 4)), 2.0, 1.0)
        t = np.geomspace(1e-3, 1e3, 100)
        for k in range(6):
            v = (-1) ** k * gr.P_deriv(t, s, k)
            assert np.all(v >= -1e-10 * np.max(gr.P_deriv_scale(t, s, k)))

    def test_fails_outside_range(self):
        # rho > 2: P ~ (sum nu + sum tau - rho sum lambda)/t < 0 for large t
        s = gr.RatioSpec(ONES, 2.5, 0.0)
        assert gr.P_eval(1e3, s) < 0 < gr.P_eval(1e-3, s)


class TestLimits:
    def test_sup_examples(self):
        assert gr.lnF_d1_sup(gr.RatioSpec(ONES)) == pytest.approx(8 * math.log(2), rel=1e-15)
        with pytest.raises(PreconditionError):
            gr.lnF_d1_sup(gr.RatioSpec(ONES, 1.0, 0.0))

    def test_sup_positive(self):
        rng = np.random.default_rng(30)
        for _ in range(50):
            m, n = rng.integers(2, 6, 2)
            assert gr.lnF_d1_sup(_spec(np.exp(rng.uniform(-3, 3, (m, n))))) > 0

    def test_sup_is_large_t_limit(self):
        s = _spec([[0.3, 1.0, 2.0], [1.5, 0.2, 0.7]])
        assert gr.ln_F_deriv(1e7, s, 1) == pytest.approx(gr.lnF_d1_sup(s), rel=1e-3)

    def test_d1_range(self):
        r = gr.lnF_d1_range(gr.RatioSpec(ONES))
        assert r.lower == 0.0 and r.upper == pytest.approx(8 * math.log(2))
        s = gr.RatioSpec(ONES, 1.0, 0.0)
        r = gr.lnF_d1_range(s)
        assert r.upper is gr.UNBOUNDED
        w, c = s.weights()
        assert r.lower == pytest.approx(-float(mp.euler) * math.fsum(c * w), rel=1e-15)
        assert gr.ln_F_deriv(1e-9, s, 1) == pytest.approx(r.lower, rel=1e-6)
        with pytest.raises(PreconditionError):
            gr.lnF_d1_range(gr.RatioSpec(ONES, 3.0, 0.0))


class TestMinimum:
    def test_single_entry(self):
        t = gr.find_min_F(_spec([[1.0]], 1.0, 0.0))
        with mp.workdps(30):
            ref = mp.findroot(lambda u: mp.digamma(1 + u), 0.46)
        assert t == pytest.approx(float(ref), rel=1e-12)

    def test_sign_change_direction(self):
        s = gr.RatioSpec(ONES, 1.5, 0.0)
        t = gr.find_min_F(s)
        lo, hi = gr.ln_F_deriv(np.array([t * 0.999, t * 1.001]), s, 1)
        assert lo < 0 < hi
        v = gr.ln_F(np.array([t, t / 2, 2 * t]), s)
        assert v[0] < min(v[1], v[2])

    def test_window_expands(self):
        s = gr.RatioSpec(ONES, 1.5, 0.0)
        narrow = GridSpec(10.0, 100.0, 50)
        assert gr.find_min_F(s, narrow) == pytest.approx(gr.find_min_F(s), rel=1e-10)

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            gr.find_min_F(gr.RatioSpec(ONES, 2.0, 0.0))

    def test_no_bracket(self):
        # rho = 2 with tiny theta: the minimum sits far beyond the window
        s = gr.RatioSpec(ONES, 2.0, 1e-300)
        with pytest.raises(NoBracketError):
            gr.find_min_F(s)


class TestStirling:
    def test_examples(self):
        assert gr.stirling_theta(1e-4) == pytest.approx(1 / 12, abs=1e-6)
        assert gr.stirling_theta(1.0) == pytest.approx(1 / (math.e - 1) - 1 + 0.5, rel=1e-14)
        assert gr.stirling_theta(100.0) == pytest.approx((0.5 - 0.01) / 100, rel=1e-10)

    def test_against_mpmath(self):
        s = np.geomspace(1e-6, 700, 200)
        with mp.workdps(50):
            ref = [float((1 / mp.expm1(mp.mpf(v)) - 1 / mp.mpf(v) + mp.mpf(1) / 2) / mp.mpf(v)) for v in s]
        npt.assert_allclose(gr.stirling_theta(s), ref, rtol=1e-14)

    def test_positive_decreasing(self):
        s = np.geomspace(1e-4, 1e3, 1000)
        v = gr.stirling_theta(s)
        assert np.all(v > 0) and np.all(np.diff(v) < 0)

    @pytest.mark.parametrize("z", [0.5, 1.0, 3.7, 20.0])
    def test_binet_representation(self, z):
        assert gr.binet_ln_gamma1p(z) == pytest.approx(gr.ln_gamma1p(z), rel=1e-10, abs=1e-12)


class TestConjecture:
    def test_trivial_tensor(self):
        lt = LambdaTensor([[[1.3]]])
        t = np.geomspace(1e-2, 1e2, 10)
        for k in range(4):
            spec = gr.ConjectureSpec(lt, 3.0, 0.0, "L1")
            npt.assert_allclose(gr.conjecture_eval(t, spec, k), 0.0, atol=1e-15 * np.max(gr.conjecture_scale(t, spec, k)))
        spec = gr.ConjectureSpec(lt, 3.0, 0.0, "R1")
        npt.assert_allclose(gr.conjecture_eval(t, spec, 0), 0.0, atol=1e-15 * np.max(gr.conjecture_scale(t, spec, 0)))

    @pytest.mark.parametrize("variant", ["L1", "L2", "R1", "R2"])
    def test_derivative_consistency(self, variant):
        spec = gr.ConjectureSpec(LambdaTensor(np.ones((2, 2, 2))), 3.0, 1.0, variant)
        f = lambda u: gr.conjecture_eval(u, spec, 0)
        fd = (4 * _central(f, 1.0, 5e-4) - _central(f, 1.0, 1e-3)) / 3
        assert gr.conjecture_eval(1.0, spec, 1) == pytest.approx(fd, rel=1e-7)

    @pytest.mark.parametrize("variant", ["L1", "R2"])
    def test_higher_orders_against_mpmath(self, variant):
        spec = gr.ConjectureSpec(LambdaTensor(np.random.default_rng(6).uniform(0.2, 2, (2, 2, 3))), 3.0, 1.0, variant)
        w, c = spec.weights()
        order = 1 if variant.startswith("L") else -1
        with mp.workdps(40):
            def g(u):
                fn = (lambda z: mp.psi(1, z)) if order == 1 else mp.loggamma
                return mp.fsum(mp.mpf(ci) * mp.mpf(wi) ** spec.theta * fn(1 + mp.mpf(wi) * u) for wi, ci in zip(w, c))

            for k in range(5):
                ref = float(mp.diff(g, mp.mpf("0.7"), k))
                assert gr.conjecture_eval(0.7, spec, k) == pytest.approx(ref, rel=1e-11)

    def test_l1_explicit(self):
        rng = np.random.default_rng(2)
        lam = rng.uniform(0.2, 2.0, (2, 3, 2))
        spec = gr.ConjectureSpec(LambdaTensor(lam), 3.0, 0.5, "L1")
        t, th = 0.8, 0.5
        terms = [lam.sum(axis=2).ravel(), lam.sum(axis=1).ravel(), lam.sum(axis=0).ravel()]
        ref = sum(np.sum(w**th * polygamma(1, 1 + w * t)) for w in terms)
        ref -= 3.0 * np.sum(lam.ravel() ** th * polygamma(1, 1 + lam.ravel() * t))
        assert gr.conjecture_eval(t, spec, 0) == pytest.approx(ref, rel=1e-12)

    def test_order_limit(self):
        spec = gr.ConjectureSpec(LambdaTensor(np.ones((1, 1, 1))))
        with pytest.raises(UnsupportedOrderError):
            gr.conjecture_eval(1.0, spec, 7)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(0.05, 5.0), st.floats(0.05, 5.0), st.floats(0.05, 5.0), st.floats(1e-3, 1e3))
def test_transpose_invariance(a, b, c, d, t):
    s = _spec([[a, b], [c, d]], 1.5, 0.5)
    st_ = gr.RatioSpec(s.lm.transpose(), 1.5, 0.5)
    assert gr.ln_F(t, s) == pytest.approx(gr.ln_F(t, st_), rel=1e-12, abs=1e-12 * gr.ln_F_deriv_scale(t, s, 0))
