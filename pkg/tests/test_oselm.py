import numpy as np
import pytest

from fxrange import oselm
from fxrange.data import gen_synthetic, init_weights
from fxrange.oselm import InitSingular, ModelState, NotPositiveDefinite


def _random_model(seed, n=4, n_hidden=5, m=3, initial=30):
    alpha, bias = init_weights(seed, n, n_hidden)
    ds = gen_synthetic(seed, n, m, (initial, 60, 1))
    H0 = ds.initial_x @ alpha + bias
    P0, beta0 = oselm.init(H0, ds.initial_t)
    return ModelState(alpha, bias, P0, beta0), ds


class TestInit:
    def test_scalar_hand_case(self):
        # H0 = [[2]]: gram = 4, P0 = 1/4, beta0 = P0 * H0' T0 = 0.25 * 2 * 3
        P0, beta0 = oselm.init(np.array([[2.0]]), np.array([[3.0]]))
        assert P0[0, 0] == pytest.approx(0.25)
        assert beta0[0, 0] == pytest.approx(1.5)

    def test_matches_direct_inverse(self):
        rng = np.random.default_rng(11)
        H0 = rng.uniform(-1, 1, size=(20, 5))
        T0 = rng.uniform(0, 1, size=(20, 3))
        P0, beta0 = oselm.init(H0, T0)
        np.testing.assert_allclose(P0, np.linalg.inv(H0.T @ H0), rtol=1e-10, atol=1e-12)
        np.testing.assert_allclose(beta0, np.linalg.pinv(H0) @ T0, rtol=1e-8, atol=1e-10)

    def test_p0_symmetric_spd(self):
        state, _ = _random_model(3)
        np.testing.assert_array_equal(state.P, state.P.T)
        assert oselm.is_spd(state.P)

    def test_rank_deficient_rejected(self):
        # fewer initial rows than hidden units: gram is singular
        with pytest.raises(InitSingular):
            oselm.init(np.array([[1.0, 2.0]]), np.array([[1.0]]))


class TestTrainStep:
    def test_hand_case_identity_p(self):
        # P = I, h = [1, 0]: g4 = 1, g5 = 2, P' = [[0.5, 0], [0, 1]]
        state = ModelState(
            alpha=np.array([[1.0, 0.0]]),
            bias=np.array([0.0, 0.0]),
            P=np.eye(2),
            beta=np.zeros((2, 1)),
        )
        new, trace = oselm.train_step(state, np.array([1.0]), np.array([1.0]))
        np.testing.assert_allclose(trace.h, [1.0, 0.0])
        assert trace.gamma4 == pytest.approx(1.0)
        assert trace.gamma5 == pytest.approx(2.0)
        np.testing.assert_allclose(new.P, [[0.5, 0.0], [0.0, 1.0]])
        # g7 = P' h = [0.5, 0], g9 = t - 0 = 1, beta' = [[0.5], [0]]
        np.testing.assert_allclose(new.beta, [[0.5], [0.0]])

    def test_trace_consistent_with_definitions(self):
        state, ds = _random_model(5)
        x, t = ds.online_x[0], ds.online_t[0]
        _, tr = oselm.train_step(state, x, t)
        np.testing.assert_allclose(tr.h, x @ state.alpha + state.bias)
        np.testing.assert_allclose(tr.gamma3, np.outer(tr.gamma1, tr.gamma2))
        assert tr.gamma5 == pytest.approx(1.0 + tr.gamma4)
        np.testing.assert_allclose(tr.P, state.P - tr.gamma6)
        np.testing.assert_allclose(tr.beta, state.beta + tr.gamma10)

    def test_gamma5_above_one_over_run(self):
        state, ds = _random_model(9, initial=40)
        for x, t in zip(ds.online_x, ds.online_t):
            state, tr = oselm.train_step(state, x, t)
            assert tr.gamma5 > 1.0

    def test_p_stays_spd(self):
        state, ds = _random_model(13)
        for x, t in zip(ds.online_x[:40], ds.online_t[:40]):
            state, _ = oselm.train_step(state, x, t)
        assert oselm.is_spd(state.P)


class TestEquivalence:
    def test_sequential_matches_batch(self):
        state, ds = _random_model(21, initial=30)
        X = np.vstack([ds.initial_x, ds.online_x])
        T = np.vstack([ds.initial_t, ds.online_t])
        target = oselm.batch_elm(X, T, state.alpha, state.bias)
        for x, t in zip(ds.online_x, ds.online_t):
            state, _ = oselm.train_step(state, x, t)
        err = np.linalg.norm(state.beta - target) / np.linalg.norm(target)
        assert err < 1e-10

    def test_sherman_morrison_cross_check(self):
        state, ds = _random_model(17)
        for x, t in zip(ds.online_x[:20], ds.online_t[:20]):
            h = x @ state.alpha + state.bias
            ref = oselm.sherman_morrison_P(state, h)
            state, _ = oselm.train_step(state, x, t)
            np.testing.assert_allclose(state.P, ref, rtol=1e-8, atol=1e-10)

    def test_sherman_morrison_rejects_non_spd(self):
        state, _ = _random_model(2)
        bad = ModelState(state.alpha, state.bias, -np.eye(state.P.shape[0]), state.beta)
        with pytest.raises(NotPositiveDefinite):
            oselm.sherman_morrison_P(bad, np.ones(state.P.shape[0]))


class TestPredict:
    def test_identity_activation_path(self):
        state, ds = _random_model(8)
        x = ds.test_x[0]
        y = oselm.predict(state, x)
        np.testing.assert_allclose(y, (x @ state.alpha + state.bias) @ state.beta)

    def test_sigmoid_helper(self):
        z = np.array([0.0, 100.0, -100.0])
        s = oselm.sigmoid(z)
        np.testing.assert_allclose(s, [0.5, 1.0, 0.0], atol=1e-12)
