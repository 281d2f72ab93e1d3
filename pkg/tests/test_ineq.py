import json
import math

import mpmath as mp
import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from expgamma import ineq
from expgamma.errors import DomainError, InputError
from expgamma.ineq import LambdaMatrix, LambdaTensor, SweepConfig


def _f(w, x, e):
    return w**e / math.expm1(x / w)


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


class TestTypes:
    def test_matrix_sums(self):
        lm = LambdaMatrix([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
        npt.assert_array_equal(lm.nu, [6.0, 15.0])
        npt.assert_array_equal(lm.tau, [5.0, 7.0, 9.0])
        assert lm.nu.sum() == pytest.approx(lm.tau.sum(), rel=1e-14)
        assert lm.transpose().shape == (3, 2)

    def test_entries_read_only(self):
        lm = LambdaMatrix([[1.0]])
        with pytest.raises(ValueError):
            lm.entries[0, 0] = 2.0

    def test_matrix_json_round_trip(self):
        lm = LambdaMatrix([[0.1, 2.5], [3.0, 7.25]])
        back = LambdaMatrix.from_json(lm.to_json())
        npt.assert_array_equal(back.entries, lm.entries)

    @pytest.mark.parametrize(
        "payload, field",
        [
            ({"lambda": [[1.0, 2.0], [3.0, -1.0]]}, "lambda[1][1]"),
            ({"lambda": [[1.0, 0.0]]}, "lambda[0][1]"),
            ({"lambda": [1.0, 2.0]}, "lambda"),
            ({"lambda": [["a"]]}, "lambda"),
            ({"lam": [[1.0]]}, "lambda"),
        ],
    )
    def test_invalid_matrix_names_field(self, payload, field):
        with pytest.raises(InputError) as exc:
            LambdaMatrix.from_json(payload)
        assert exc.value.field == field

    def test_tensor_sums(self):
        rng = np.random.default_rng(1)
        lt = LambdaTensor(rng.uniform(0.1, 2.0, (2, 3, 4)))
        singles, doubles = lt.single_sums, lt.double_sums
        assert [s.shape for s in singles] == [(3, 4), (2, 4), (2, 3)]
        assert [d.shape for d in doubles] == [(4,), (2,), (3,)]
        for agg in (*singles, *doubles):
            assert agg.sum() == pytest.approx(lt.total, rel=1e-14)
        back = LambdaTensor.from_json(json.loads(lt.to_json()))
        npt.assert_array_equal(back.entries, lt.entries)

    def test_tensor_bad_entry(self):
        with pytest.raises(InputError) as exc:
            LambdaTensor.from_json({"lambda3": [[[1.0, math.inf]]]})
        assert exc.value.field == "lambda3[0][0][1]"


class TestMargins:
    def test_sum_split_examples(self):
        assert ineq.margin_sum_split(1.0, [0.7], 1.3).margin == 0.0
        assert ineq.margin_sum_split(1.0, [0.3, 0.7], 0.0).margin > 0
        m = ineq.margin_sum_split(2.0, [1.0, 2.0, 3.0], 2.0)
        lhs = _f(6.0, 2.0, 2.0)
        rhs = sum(_f(w, 2.0, 2.0) for w in (1.0, 2.0, 3.0))
        assert m.lhs == pytest.approx(lhs, rel=1e-15)
        assert m.rhs == pytest.approx(rhs, rel=1e-15)
        assert m.margin >= 0

    def test_matrix_examples(self):
        for lam in (0.01, 1.0, 30.0):
            for a in (-1.0, 0.5, 3.0):
                assert ineq.margin_matrix(1.0, LambdaMatrix([[lam]]), a).margin == 0.0
        m = ineq.margin_matrix(1.0, LambdaMatrix(np.ones((2, 2))), 1.0)
        assert m.lhs == pytest.approx(4 / (math.exp(0.5) - 1), rel=1e-15)
        assert m.rhs == pytest.approx(8 / (math.e - 1), rel=1e-15)
        assert m.margin > 0
        rng = np.random.default_rng(34)
        assert ineq.margin_matrix(0.7, LambdaMatrix(rng.uniform(0.1, 5, (3, 4))), 1.0).margin >= 0

    def test_tensor_examples(self):
        one = LambdaTensor([[[2.5]]])
        assert ineq.margin_tensor_2to1(1.0, one, 1.0).margin == 0.0
        assert ineq.margin_tensor_1to2(1.0, one, 1.0).margin == 0.0
        ones = LambdaTensor(np.ones((2, 2, 2)))
        assert ineq.margin_tensor_2to1(1.0, ones, 1.0).margin > 0
        assert ineq.margin_tensor_1to2(1.0, ones, 1.0).margin > 0
        rng = np.random.default_rng(5)
        assert ineq.margin_tensor_2to1(3.0, LambdaTensor(rng.uniform(0.1, 5, (2, 2, 3))), 1.5).margin >= 0
        assert ineq.margin_tensor_1to2(0.5, LambdaTensor(rng.uniform(0.1, 5, (3, 2, 2))), 2.0).margin >= 0

    def test_tensor_against_explicit_sums(self):
        rng = np.random.default_rng(9)
        lam = rng.uniform(0.2, 3.0, (2, 3, 2))
        x, a = 1.3, 1.7
        e = a - 1
        l, m, n = lam.shape
        lhs21 = (sum(_f(lam[:, j, k].sum(), x, e) for j in range(m) for k in range(n))
                 + sum(_f(lam[i, :, k].sum(), x, e) for i in range(l) for k in range(n))
                 + sum(_f(lam[i, j, :].sum(), x, e) for i in range(l) for j in range(m)))
        lhs12 = (sum(_f(lam[:, :, k].sum(), x, e) for k in range(n))
                 + sum(_f(lam[i, :, :].sum(), x, e) for i in range(l))
                 + sum(_f(lam[:, j, :].sum(), x, e) for j in range(m)))
        rhs = 3 * sum(_f(v, x, e) for v in lam.ravel())
        lt = LambdaTensor(lam)
        m21 = ineq.margin_tensor_2to1(x, lt, a)
        m12 = ineq.margin_tensor_1to2(x, lt, a)
        assert m21.lhs == pytest.approx(lhs21, rel=1e-14) and m21.rhs == pytest.approx(rhs, rel=1e-14)
        assert m12.lhs == pytest.approx(lhs12, rel=1e-14) and m12.rhs == pytest.approx(rhs, rel=1e-14)

    def test_extended_precision_agreement(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            lam = np.exp(rng.uniform(-5, 5, (3, 3)))
            x = float(np.exp(rng.uniform(-5, 5)))
            m = ineq.margin_matrix(x, LambdaMatrix(lam), 1.0)
            ref = ineq.precise_margin("matrix", lam, x, 1.0, 2.0)
            assert m.relative_margin == pytest.approx(ref.relative_margin, rel=1e-9, abs=1e-14)

    def test_log_scaled_extremes(self):
        lam = np.array([[1e-3, 2e-3], [1.5e-3, 1e-3]])
        m = ineq.margin_matrix(1e3, LambdaMatrix(lam), 1.0)
        ref = ineq.precise_margin("matrix", lam, 1e3, 1.0, 2.0)
        assert m.log_scale != 0.0
        assert m.relative_margin == pytest.approx(ref.relative_margin, rel=1e-9)
        assert m.relative_margin > 0

    def test_domain(self):
        with pytest.raises(DomainError):
            ineq.margin_sum_split(0.0, [1.0], 1.0)
        with pytest.raises(InputError):
            ineq.margin_sum_split(1.0, [], 1.0)


class TestInvariances:
    def test_transpose(self):
        rng = np.random.default_rng(11)
        lm = LambdaMatrix(rng.uniform(0.1, 10, (3, 5)))
        a, b = ineq.margin_matrix(0.9, lm, 1.4), ineq.margin_matrix(0.9, lm.transpose(), 1.4)
        assert a.margin == pytest.approx(b.margin, rel=1e-14, abs=1e-14 * a.lhs)

    def test_permutations(self):
        rng = np.random.default_rng(12)
        lam = rng.uniform(0.1, 10, (3, 4))
        base = ineq.margin_matrix(2.0, LambdaMatrix(lam), 1.0)
        perm = ineq.margin_matrix(2.0, LambdaMatrix(lam[rng.permutation(3)][:, rng.permutation(4)]), 1.0)
        assert perm.relative_margin == pytest.approx(base.relative_margin, rel=1e-12)
        t = rng.uniform(0.1, 10, (2, 3, 4))
        tp = t[rng.permutation(2)][:, rng.permutation(3)][:, :, rng.permutation(4)]
        for fn in (ineq.margin_tensor_2to1, ineq.margin_tensor_1to2):
            assert fn(1.0, LambdaTensor(tp), 2.0).relative_margin == pytest.approx(
                fn(1.0, LambdaTensor(t), 2.0).relative_margin, rel=1e-12)
        # relabelling the axes permutes the aggregate families together
        tt = np.transpose(t, (2, 0, 1))
        for fn in (ineq.margin_tensor_2to1, ineq.margin_tensor_1to2):
            assert fn(1.0, LambdaTensor(tt), 2.0).relative_margin == pytest.approx(
                fn(1.0, LambdaTensor(t), 2.0).relative_margin, rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(
        arrays(np.float64, (2, 3), elements=st.floats(0.01, 100.0)),
        st.floats(0.01, 100.0),
        st.floats(0.01, 100.0),
        st.floats(-2.0, 4.0),
    )
    def test_scaling_covariance(self, lam, x, c, alpha):
        m = ineq.margin_matrix(x, LambdaMatrix(lam), alpha)
        s = ineq.margin_matrix(c * x, LambdaMatrix(c * lam), alpha)
        # sides may be stored divided by exp(log_scale), so compare logs
        shift = (alpha - 1) * math.log(c)
        assert math.log(s.lhs) + s.log_scale == pytest.approx(math.log(m.lhs) + m.log_scale + shift, abs=1e-12)
        assert math.log(s.rhs) + s.log_scale == pytest.approx(math.log(m.rhs) + m.log_scale + shift, abs=1e-12)
        assert s.relative_margin == pytest.approx(m.relative_margin, rel=1e-9, abs=1e-12)


class TestReduction:
    def test_single_entry(self):
        mm, ms = ineq.reduction_check([1.7], 1e-8, 1.0, 1.0)
        assert mm.margin == 0.0 and ms.margin == 0.0

    def test_convergence(self):
        diffs = []
        for eps in (1e-6, 1e-7, 1e-8):
            mm, ms = ineq.reduction_check([1.0, 2.0], eps, 1.0, 1.0)
            diffs.append(abs(mm.margin - ms.margin))
        assert diffs[0] > diffs[1] > diffs[2]
        assert diffs[2] < 1e-6

    def test_positive_case(self):
        mm, ms = ineq.reduction_check([0.5, 0.5, 1.0], 1e-8, 2.0, 1.0)
        assert mm.margin > 0 and ms.margin > 0

    def test_eps_precondition(self):
        with pytest.raises(DomainError):
            ineq.reduction_check([1.0, 2.0], 1e-3, 1.0, 1.0)


class TestSweep:
    def test_config_validation(self):
        with pytest.raises(InputError):
            SweepConfig("matrix", (2,))
        with pytest.raises(InputError):
            SweepConfig("nope", (2,))
        with pytest.raises(InputError):
            SweepConfig("matrix", (2, 2), samples=0)
        with pytest.raises(InputError):
            SweepConfig("matrix", (2, 2), lambda_range=(1.0, 0.5))
        assert SweepConfig("tensor_2to1", (1, 1, 1)).effective_rho == 3.0

    def test_draws_are_order_independent(self):
        cfg = SweepConfig("matrix", (3, 4), samples=100, seed=7)
        lam5, x5 = ineq.draw_sample(cfg, 5)
        lams, xs = ineq._draw_block(cfg, 0, 10)
        npt.assert_array_equal(lams[5], lam5)
        assert xs[5] == x5
        assert np.all((lam5 >= 1e-3) & (lam5 <= 1e3))

    def test_batch_matches_scalar(self):
        cfg = SweepConfig("matrix", (2, 3), samples=50, seed=1, alpha=1.5)
        lams, xs = ineq._draw_block(cfg, 0, 50)
        rel = ineq._batch_relative_margins("matrix", lams, xs, 1.5, 2.0)
        for j in range(50):
            m = ineq.margin_matrix(xs[j], LambdaMatrix(lams[j]), 1.5)
            assert rel[j] == pytest.approx(m.relative_margin, rel=1e-9, abs=1e-13)

    def test_reproducible(self):
        cfg = SweepConfig("matrix", (3, 4), samples=1000, seed=7)
        assert ineq.sweep(cfg).to_json() == ineq.sweep(cfg).to_json()

    def test_no_violations_in_proven_range(self):
        for kind, dims, a in (("matrix", (3, 3), 1.0), ("sum_split", (4,), 2.0), ("tensor_2to1", (2, 2, 2), 1.5)):
            rep = ineq.sweep(SweepConfig(kind, dims, samples=3000, seed=42, alpha=a))
            assert rep.passed and rep.min_relative_margin >= -1e-9

    def test_violations_found_and_reproducible(self):
        cfg = SweepConfig("matrix", (1, 1), samples=20, seed=3, alpha=1.0, rho=2.5)
        rep = ineq.sweep(cfg)
        assert len(rep.violations) == 20
        v = rep.violations[4]
        lam, x = ineq.draw_sample(cfg, v["index"])
        assert lam.tolist() == v["lambda"] and x == v["x"]
        assert v["margin"]["relative_margin"] == pytest.approx(-0.2, rel=1e-12)

    def test_open_range_is_recorded(self):
        rep = ineq.sweep(SweepConfig("matrix", (2, 2), samples=2000, seed=42, alpha=0.0, rho=2.0))
        assert math.isfinite(rep.min_relative_margin)
        assert 0 <= rep.argmin_index < 2000

    def test_frontier(self):
        cfg = SweepConfig("matrix", (2, 2), samples=500, seed=1, frontier_alphas=(0.0, 1.0),
                          frontier_rhos=(2.0, 3.0))
        pts = {(p["alpha"], p["rho"]): p for p in ineq.sweep(cfg).frontier_points}
        assert set(pts) == {(0.0, 2.0), (0.0, 3.0), (1.0, 2.0), (1.0, 3.0)}
        assert pts[(1.0, 2.0)]["worst_relative_margin"] >= -1e-9
        assert pts[(1.0, 3.0)]["flagged"] > 0

    def test_precise_margin_matches_mpmath_direct(self):
        lam = np.array([[0.3, 1.2], [2.0, 0.8]])
        with mp.workdps(50):
            f = lambda w: mp.mpf(w) ** 0 / mp.expm1(mp.mpf(1.1) / mp.mpf(w))
            lhs = sum(f(v) for v in lam.sum(axis=1)) + sum(f(v) for v in lam.sum(axis=0))
            rhs = 2 * sum(f(v) for v in lam.ravel())
        m = ineq.precise_margin("matrix", lam, 1.1, 1.0, 2.0)
        assert m.margin == pytest.approx(float(lhs - rhs), rel=1e-14)
