import math

import numpy as np
import pytest

from sgmc.core import ParameterVector, RandomKey, make_layout, split
from sgmc.data import BatchSpec, MiniBatch, init_batch_state, load_in_memory, next_batch
from sgmc.models import get_model, synth_data_generate
from sgmc.potential import (LogDensityModel, fd_gradient, full_potential_eval,
                            minibatch_potential_eval, minibatch_value_grad)

LOG_NORM_1 = -1.4189385332046727  # log N(1; 0, 1)
LOG_2PI = np.log(2.0 * np.pi)


def gaussian_two_points():
    """y ~ N(theta, 1) with an improper flat prior, over y = [1, 3]."""
    layout = make_layout({"mu": ()})

    def log_likelihood(theta, obs):
        r = float(obs["y"]) - theta.values[0]
        return -0.5 * r * r - 0.5 * LOG_2PI

    def grad_log_likelihood(theta, obs):
        return ParameterVector(layout, np.array([float(obs["y"]) - theta.values[0]]))

    density = LogDensityModel(
        layout, log_likelihood, grad_log_likelihood,
        log_prior=lambda theta: 0.0,
        grad_log_prior=lambda theta: ParameterVector(layout, np.zeros(1)),
    )
    ds = load_in_memory(arrays={"y": np.array([1.0, 3.0])})
    return density, ds


def batch_of(ds, rows, mask=None, full_size=None):
    rows = np.asarray(rows)
    mask = np.ones(len(rows), dtype=bool) if mask is None else np.asarray(mask)
    return MiniBatch({"y": ds["y"][rows]}, mask, full_size or ds.size, rows)


class TestMinibatchPotential:
    def test_hand_evaluated_value(self):
        density, ds = gaussian_two_points()
        theta = ParameterVector(density.layout, np.zeros(1))
        batch = batch_of(ds, [0])  # y = 1, N = 2
        value, _ = minibatch_potential_eval(density, theta, batch)
        # prior term is ~0 by the huge prior scale; U~ = -(2/1) log N(1;0,1)
        assert value == pytest.approx(-2.0 * LOG_NORM_1, abs=1e-6)

    def test_gradient_is_scaled_score_sum(self):
        density, ds = gaussian_two_points()
        theta = ParameterVector(density.layout, np.array([0.25]))
        batch = batch_of(ds, [0, 1])
        _, grad = minibatch_potential_eval(density, theta, batch)
        scores = (ds["y"] - 0.25)  # per-row d/dtheta log p
        expected = -(2 / 2) * scores.sum() - (-0.25 / 1e18)
        assert grad.values[0] == pytest.approx(expected, rel=1e-12)

    def test_mask_equivalent_to_smaller_batch(self):
        density, ds = gaussian_two_points()
        theta = ParameterVector(density.layout, np.array([0.7]))
        masked = batch_of(ds, [0, 1], mask=[True, False])
        solo = batch_of(ds, [0])
        va, ga = minibatch_potential_eval(density, theta, masked)
        vb, gb = minibatch_potential_eval(density, theta, solo)
        assert va == pytest.approx(vb, rel=1e-14)
        assert ga == gb

    def test_masked_rows_may_hold_nan(self):
        density, ds = gaussian_two_points()
        theta = ParameterVector(density.layout, np.array([0.7]))
        poisoned = MiniBatch({"y": np.array([1.0, np.nan])},
                             np.array([True, False]), 2, np.array([0, 0]))
        solo = batch_of(ds, [0])
        va, ga = minibatch_potential_eval(density, theta, poisoned)
        vb, gb = minibatch_potential_eval(density, theta, solo)
        assert va == vb and ga == gb

    def test_all_masked_rejected(self):
        density, ds = gaussian_two_points()
        theta = ParameterVector(density.layout, np.zeros(1))
        with pytest.raises(ValueError, match="masked"):
            minibatch_potential_eval(density, theta,
                                     batch_of(ds, [0, 1], mask=[False, False]))

    def test_full_batch_equals_full_potential_exactly(self):
        density, ds = gaussian_two_points()
        theta = ParameterVector(density.layout, np.array([0.3]))
        batch = batch_of(ds, [0, 1])
        v_mini, g_mini = minibatch_potential_eval(density, theta, batch)
        v_full, g_full = full_potential_eval(density, theta, ds, 2)
        assert v_mini == v_full
        assert g_mini == g_full


class TestFullPotential:
    def test_hand_evaluated_value(self):
        density, ds = gaussian_two_points()
        theta = ParameterVector(density.layout, np.zeros(1))
        value, _ = full_potential_eval(density, theta, ds, 2)
        # -log N(1;0,1) - log N(3;0,1) = 1.4189385 + 5.4189385
        assert value == pytest.approx(6.8378771, abs=1e-6)

    def test_independent_of_sweep_batch_size(self):
        model = get_model("gaussian_mean")
        ds = model.generate(RandomKey(3), 57, {"mu": 0.1})
        theta = ParameterVector(model.layout, np.array([0.4]))
        values = [full_potential_eval(model.density, theta, ds, n)[0]
                  for n in (1, 5, 8, 57)]
        assert max(values) - min(values) < 1e-12

    def test_minibatch_estimator_unbiased(self):
        model = get_model("gaussian_mean")
        ds = model.generate(RandomKey(8), 40, {"mu": 0.2})
        theta = ParameterVector(model.layout, np.array([-0.1]))
        exact, _ = full_potential_eval(model.density, theta, ds, 40)
        spec = BatchSpec(8, "draw_replacement", RandomKey(1234))
        state = init_batch_state(ds, spec)
        draws = np.empty(10000)
        for i in range(draws.shape[0]):
            batch, state = next_batch(ds, spec, state)
            draws[i], _ = minibatch_potential_eval(model.density, theta, batch)
        se = draws.std(ddof=1) / math.sqrt(draws.shape[0])
        assert abs(draws.mean() - exact) < 3 * se


class TestFiniteDifferences:
    def test_quadratic(self):
        layout = make_layout({"x": (2,)})
        theta = ParameterVector(layout, np.array([1.0, 2.0]))
        grad = fd_gradient(lambda pv: 0.5 * float(pv.values @ pv.values), theta)
        assert np.allclose(grad.values, [1.0, 2.0], atol=1e-8)

    def test_constant(self):
        layout = make_layout({"x": (3,)})
        grad = fd_gradient(lambda pv: 4.2, ParameterVector(layout, np.ones(3)))
        assert np.array_equal(grad.values, np.zeros(3))

    def test_h_must_be_positive(self, tiny_pv):
        with pytest.raises(ValueError):
            fd_gradient(lambda pv: 0.0, tiny_pv, h=0.0)

    def test_oracle_self_check_on_stochastic_potential(self):
        model = get_model("gaussian_mean")
        ds = model.generate(RandomKey(9), 20, {"mu": 1.0})
        batch = MiniBatch({"y": ds["y"][:4]}, np.ones(4, dtype=bool), 20,
                          np.arange(4))
        theta = ParameterVector(model.layout, np.array([0.6]))
        _, analytic = minibatch_potential_eval(model.density, theta, batch)
        fd = fd_gradient(
            lambda pv: minibatch_potential_eval(model.density, pv, batch)[0],
            theta, h=1e-5)
        rel = np.linalg.norm(analytic.values - fd.values) / max(
            np.linalg.norm(analytic.values), 1e-8)
        assert rel <= 1e-5


class TestEvaluatorObjects:
    def test_bound_evaluators_agree_with_functions(self):
        from sgmc.potential import stochastic_potential, true_potential
        density, ds = gaussian_two_points()
        theta = ParameterVector(density.layout, np.array([0.2]))
        batch = batch_of(ds, [0, 1])
        stoch = stochastic_potential(density)
        exact = true_potential(density, ds, 2)
        assert stoch.kind == "stochastic" and exact.kind == "exact"
        assert stoch(theta, batch) == minibatch_potential_eval(density, theta, batch)
        assert exact(theta) == full_potential_eval(density, theta, ds, 2)
        with pytest.raises(ValueError):
            stoch(theta)  # stochastic evaluation needs a batch


class TestBatchFastPath:
    @pytest.mark.parametrize("name", ["gaussian_mean", "linreg_sigma", "logreg_2d"])
    def test_vectorized_paths_match_row_loop(self, name):
        model = get_model(name)
        ds = synth_data_generate(model, RandomKey(31), 16)
        density = model.density
        stripped = density.__class__(
            density.layout, density.log_likelihood, density.grad_log_likelihood,
            density.log_prior, density.grad_log_prior)
        keys = split(RandomKey(5), 10)
        for key in keys:
            flat = key.generator().standard_normal(density.dim) * 0.5
            rows = key.generator().integers(0, 16, size=6)
            batch = MiniBatch({k: v[rows] for k, v in ds.arrays.items()},
                              np.ones(6, dtype=bool), 16, rows)
            v_fast, g_fast = minibatch_value_grad(density, flat, batch)
            v_slow, g_slow = minibatch_value_grad(stripped, flat, batch)
            assert v_fast == pytest.approx(v_slow, rel=1e-12)
            assert np.allclose(g_fast, g_slow, rtol=1e-12)
