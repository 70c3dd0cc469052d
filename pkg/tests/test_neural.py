import numpy as np
import pytest

from conftest import fd_gradient, flatten_params, rel_error
from rlncs.neural import (DenseParams, LrSchedule, clip_global_norm, dense_backward,
                          dense_forward, dqn_loss, dqn_loss_grad, global_norm,
                          init_dense, init_lstm, init_qnet, joint_loss, load_checkpoint,
                          lstm_forward, lstm_loss, lstm_loss_grad, lstm_train_backward,
                          lstm_train_forward, named_arrays, q_backward, q_forward,
                          q_forward_cache, q_output_scale, save_checkpoint, sgd_step,
                          tree_map)
from rlncs.rng import make_rng


def randomize_biases(q, np_rng):
    for layer in (q.h1, q.h2, q.out):
        layer.b[:] = np_rng.uniform(-0.3, 0.3, layer.b.shape)


class TestQNet:
    def test_zero_params_give_midpoint(self):
        q = init_qnet(6, (4, 3), 0.1, make_rng(0))
        q = tree_map(np.zeros_like, q)
        q = type(q)(h1=q.h1, h2=q.h2, out=q.out, q_max=q_output_scale(0.1))
        out = q_forward(q, np.zeros(6))
        assert np.allclose(out, q.q_max * 0.5)

    def test_output_range_and_scale(self, np_rng):
        qmax = q_output_scale(0.1)
        assert qmax == pytest.approx(2.0 / 0.9)
        q = init_qnet(10, (8, 5), 0.1, make_rng(1))
        for _ in range(20):
            s = (np_rng.random(10) < 0.3).astype(float)
            out = q_forward(q, s)
            assert out.shape == (2,)
            assert np.all(out > 0) and np.all(out < qmax)

    def test_purity(self, np_rng):
        q = init_qnet(7, (6, 4), 0.1, make_rng(2))
        s = (np_rng.random(7) < 0.5).astype(float)
        assert np.array_equal(q_forward(q, s), q_forward(q, s))

    def test_shape_mismatch(self):
        q = init_qnet(7, (6, 4), 0.1, make_rng(2))
        with pytest.raises(ValueError, match="input size"):
            q_forward(q, np.zeros(8))

    def test_gradient_check(self, np_rng):
        for draw in range(20):
            q = init_qnet(5, (6, 4), 0.1, make_rng(100 + draw))
            randomize_biases(q, np_rng)  # keep ReLU kinks away from the FD probes
            states = (np_rng.random((3, 5)) < 0.4).astype(float)
            actions = np_rng.integers(0, 2, 3)
            beta = np_rng.uniform(0, 2, 3)

            def loss(p):
                vals, _ = q_forward_cache(p, states)
                return dqn_loss_grad(vals[np.arange(3), actions], beta)[0]

            vals, cache = q_forward_cache(q, states)
            _, dsel = dqn_loss_grad(vals[np.arange(3), actions], beta)
            dq = np.zeros_like(vals)
            dq[np.arange(3), actions] = dsel
            analytic = flatten_params(q_backward(q, cache, dq))
            assert rel_error(analytic, fd_gradient(loss, q)) < 1e-4


class TestLstm:
    def test_zero_params_give_half(self):
        p = init_lstm(6, 4, make_rng(3))
        p = tree_map(np.zeros_like, p)
        o, _ = lstm_forward(p, np.zeros((3, 6)))
        assert np.allclose(o, 0.5)

    def test_output_in_unit_interval(self, np_rng):
        p = init_lstm(8, 5, make_rng(4))
        o, _ = lstm_forward(p, (np_rng.random((10, 8)) < 0.5).astype(float))
        assert np.all(o > 0) and np.all(o < 1)

    def test_recurrence_unrolling_identity(self, np_rng):
        # running one step from the carry equals running the longer window
        p = init_lstm(6, 4, make_rng(5))
        w = (np_rng.random((2, 6)) < 0.5).astype(float)
        o_two, carry_two = lstm_forward(p, w)
        _, carry_one = lstm_forward(p, w[:1])
        o_chain, carry_chain = lstm_forward(p, w[1:], carry_one)
        assert np.allclose(o_two, o_chain, atol=1e-12)
        for a, b in zip(carry_two.h + carry_two.c, carry_chain.h + carry_chain.c):
            assert np.allclose(a, b, atol=1e-12)

    def test_stateful_carry_changes_output(self, np_rng):
        p = init_lstm(6, 4, make_rng(6))
        s = (np_rng.random(6) < 0.5).astype(float)
        o_cold, _ = lstm_forward(p, s[None, :])
        _, carry = lstm_forward(p, (np_rng.random((4, 6)) < 0.5).astype(float))
        o_warm, _ = lstm_forward(p, s[None, :], carry)
        assert not np.allclose(o_cold, o_warm)

    @pytest.mark.parametrize("layers", [1, 2])
    def test_bptt_gradient_check(self, np_rng, layers):
        # through-time gradients over the full training window length
        for draw in range(20 if layers == 1 else 5):
            p = init_lstm(4, 3, make_rng(200 + draw), n_layers=layers)
            windows = [(np_rng.random((20, 4)) < 0.5).astype(float) for _ in range(2)]
            targets = (np_rng.random((2, 4)) < 0.5).astype(float)

            def loss(params):
                o, _ = lstm_train_forward(params, windows)
                return lstm_loss_grad(o, targets, 5.0)[0]

            o, caches = lstm_train_forward(p, windows)
            _, d_o = lstm_loss_grad(o, targets, 5.0)
            analytic = flatten_params(lstm_train_backward(p, caches, d_o))
            assert rel_error(analytic, fd_gradient(loss, p)) < 1e-4

    def test_variable_length_grouping(self, np_rng):
        p = init_lstm(5, 4, make_rng(7))
        windows = [(np_rng.random((l, 5)) < 0.5).astype(float) for l in (3, 8, 3, 1)]
        batched, _ = lstm_train_forward(p, windows)
        for i, w in enumerate(windows):
            single, _ = lstm_forward(p, w)
            assert np.allclose(batched[i], single, atol=1e-12)


class TestLosses:
    def test_dqn_loss_values(self):
        assert dqn_loss(1.7, 1.7) == 0.0
        assert dqn_loss(1.0, 1.7) == pytest.approx(0.49)
        assert dqn_loss(1.7, 1.0) == pytest.approx(0.49)  # symmetric

    def test_weighted_ce_values(self):
        # positive class at 0.5 with weight 5: -5 log(1/2); negative: -log(1/2)
        assert lstm_loss(np.array([0.5]), np.array([1.0]), 5.0) == \
            pytest.approx(3.4657359027997265)
        assert lstm_loss(np.array([0.5]), np.array([0.0]), 5.0) == \
            pytest.approx(0.6931471805599453)
        near_hit = lstm_loss(np.array([1 - 1e-9]), np.array([1.0]), 5.0)
        assert near_hit == pytest.approx(0.0, abs=1e-7)

    def test_ce_clamps_exact_endpoints(self):
        val = lstm_loss(np.array([0.0, 1.0]), np.array([1.0, 0.0]), 5.0)
        assert np.isfinite(val) and val > 0

    def test_ce_nonnegative_and_batch_mean(self, np_rng):
        o = np_rng.uniform(0.01, 0.99, (4, 6))
        tar = (np_rng.random((4, 6)) < 0.5).astype(float)
        total = lstm_loss(o, tar, 5.0)
        per = [lstm_loss(o[i], tar[i], 5.0) for i in range(4)]
        assert total == pytest.approx(np.mean(per))
        assert total >= 0

    def test_joint_mixture(self):
        assert joint_loss(0.49, 3.4657359027997265, 0.0) == pytest.approx(0.49)
        assert joint_loss(0.49, 3.4657359027997265, 1.0) == \
            pytest.approx(3.4657359027997265)
        assert joint_loss(0.49, 3.4657359027997265, 0.5) == \
            pytest.approx(1.9778679513998632)
        with pytest.raises(ValueError):
            joint_loss(1.0, 1.0, 1.5)

    def test_joint_loss_gradient_check(self, np_rng):
        # mixed objective across both parameter sets at lambda = 0.3
        lam = 0.3
        for draw in range(20):
            q = init_qnet(4, (5, 3), 0.1, make_rng(300 + draw))
            randomize_biases(q, np_rng)
            lp = init_lstm(4, 3, make_rng(400 + draw))
            states = (np_rng.random((2, 4)) < 0.5).astype(float)
            actions = np_rng.integers(0, 2, 2)
            beta = np_rng.uniform(0, 2, 2)
            windows = [(np_rng.random((6, 4)) < 0.5).astype(float) for _ in range(2)]
            targets = (np_rng.random((2, 4)) < 0.5).astype(float)

            def qloss(p):
                vals, _ = q_forward_cache(p, states)
                j_dqn = dqn_loss_grad(vals[np.arange(2), actions], beta)[0]
                o, _ = lstm_train_forward(lp, windows)
                return joint_loss(j_dqn, lstm_loss_grad(o, targets, 5.0)[0], lam)

            def lloss(p):
                vals, _ = q_forward_cache(q, states)
                j_dqn = dqn_loss_grad(vals[np.arange(2), actions], beta)[0]
                o, _ = lstm_train_forward(p, windows)
                return joint_loss(j_dqn, lstm_loss_grad(o, targets, 5.0)[0], lam)

            vals, qcache = q_forward_cache(q, states)
            _, dsel = dqn_loss_grad(vals[np.arange(2), actions], beta)
            dq = np.zeros_like(vals)
            dq[np.arange(2), actions] = (1 - lam) * dsel
            q_analytic = flatten_params(q_backward(q, qcache, dq))
            assert rel_error(q_analytic, fd_gradient(qloss, q)) < 1e-4

            o, caches = lstm_train_forward(lp, windows)
            _, d_o = lstm_loss_grad(o, targets, 5.0)
            l_analytic = flatten_params(lstm_train_backward(lp, caches, lam * d_o))
            assert rel_error(l_analytic, fd_gradient(lloss, lp)) < 1e-4


class TestDense:
    def test_gradient_check(self, np_rng):
        for draw in range(20):
            p = init_dense(6, 4, make_rng(500 + draw))
            x = np_rng.standard_normal((3, 6))
            t = np_rng.standard_normal((3, 4))

            def loss(params):
                return float(np.sum((dense_forward(params, x) - t) ** 2))

            dz = 2.0 * (dense_forward(p, x) - t)
            grads, _ = dense_backward(p, x, dz)
            assert rel_error(flatten_params(grads), fd_gradient(loss, p)) < 1e-4


class TestOptimizer:
    def test_lr_schedule_reference_points(self):
        sched = LrSchedule()
        assert sched.at(0) == pytest.approx(0.05)
        assert sched.at(4999) == pytest.approx(0.05)
        assert sched.at(5000) == pytest.approx(0.0375)
        assert sched.at(10000) == pytest.approx(0.028125)

    def test_zero_gradient_keeps_params(self):
        p = init_dense(4, 3, make_rng(8))
        z = tree_map(np.zeros_like, p)
        p2 = sgd_step(p, z, 0.1)
        assert np.array_equal(p.w, p2.w) and np.array_equal(p.b, p2.b)

    def test_sgd_direction(self):
        p = DenseParams(w=np.ones((2, 2)), b=np.zeros(2))
        g = DenseParams(w=np.full((2, 2), 2.0), b=np.ones(2))
        p2 = sgd_step(p, g, 0.5)
        assert np.allclose(p2.w, 0.0) and np.allclose(p2.b, -0.5)

    def test_nonfinite_gradient_names_tensor(self):
        p = init_dense(3, 2, make_rng(9))
        g = DenseParams(w=np.zeros((2, 3)), b=np.array([np.nan, 0.0]))
        with pytest.raises(FloatingPointError, match="'b'"):
            sgd_step(p, g, 0.1)

    def test_global_norm_clip(self):
        g = DenseParams(w=np.full((2, 2), 3.0), b=np.zeros(2))
        norm = global_norm(g)
        assert norm == pytest.approx(6.0)
        clipped, reported = clip_global_norm(g, 3.0)
        assert reported == pytest.approx(6.0)
        assert global_norm(clipped) == pytest.approx(3.0)
        same, _ = clip_global_norm(g, 10.0)
        assert np.array_equal(same.w, g.w)


class TestCheckpoint:
    def test_round_trip_exact(self, tmp_path):
        q = init_qnet(9, (6, 4), 0.1, make_rng(10))
        lstm = init_lstm(9, 5, make_rng(11), n_layers=2)
        path = tmp_path / "ckpt.npz"
        save_checkpoint(path, {"q": q, "lstm": lstm})
        loaded = load_checkpoint(path, {"q": q, "lstm": lstm})
        for (n1, a), (n2, b) in zip(named_arrays(q, "q"),
                                    named_arrays(loaded["q"], "q")):
            assert n1 == n2
            assert np.array_equal(a, b)
        o1, _ = lstm_forward(lstm, np.ones((2, 9)))
        o2, _ = lstm_forward(loaded["lstm"], np.ones((2, 9)))
        assert np.array_equal(o1, o2)

    def test_shape_mismatch_detected(self, tmp_path):
        q = init_qnet(9, (6, 4), 0.1, make_rng(12))
        other = init_qnet(8, (6, 4), 0.1, make_rng(12))
        path = tmp_path / "ckpt.npz"
        save_checkpoint(path, {"q": q})
        with pytest.raises(ValueError, match="shape"):
            load_checkpoint(path, {"q": other})


class TestInit:
    def test_paper_init_is_normal_scale(self):
        p = init_dense(2000, 10, make_rng(13), paper_init=True)
        assert abs(np.std(p.w) - 0.1) < 0.005

    def test_default_init_bounded(self):
        p = init_dense(30, 20, make_rng(14))
        bound = np.sqrt(6.0 / 50)
        assert np.max(np.abs(p.w)) <= bound
        assert np.array_equal(p.b, np.zeros(20))

    def test_lstm_forget_bias(self):
        p = init_lstm(6, 4, make_rng(15))
        assert np.array_equal(p.layers[0].b[4:8], np.ones(4))
        assert np.array_equal(p.layers[0].b[:4], np.zeros(4))
