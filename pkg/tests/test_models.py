import math

import numpy as np
import pytest

from sgmc.core import ParameterVector, RandomKey, split
from sgmc.data import MiniBatch
from sgmc.models import (builtin_names, ensemble_predict, get_model,
                         model_logdensity_and_grad, rwmh_oracle,
                         synth_data_generate)
from sgmc.potential import fd_gradient, minibatch_potential_eval


class TestLogDensities:
    def test_gaussian_mean_values(self):
        model = get_model("gaussian_mean")
        theta = ParameterVector(model.layout, np.zeros(1))
        logp, score = model_logdensity_and_grad(model, theta, {"y": np.float64(1.0)})
        assert logp == pytest.approx(-1.4189385, abs=1e-6)
        assert score.values[0] == pytest.approx(1.0)

    def test_linreg_zero_residual_score(self):
        model = get_model("linreg_sigma", n_weights=2)
        theta = ParameterVector.from_named({"w": [1.0, -2.0], "log_sigma": 0.3})
        x = np.array([0.5, 1.5])
        obs = {"x": x, "y": np.float64(x @ [1.0, -2.0])}
        _, score = model_logdensity_and_grad(model, theta, obs)
        assert np.allclose(score["w"], 0.0, atol=1e-14)

    def test_logreg_symmetry_at_zero_logit(self):
        model = get_model("logreg_2d")
        theta = ParameterVector(model.layout, np.zeros(2))
        for label in (0.0, 1.0):
            logp, _ = model_logdensity_and_grad(
                model, theta, {"x": np.array([1.0, 2.0]), "y": np.float64(label)})
            assert logp == pytest.approx(-math.log(2.0), rel=1e-12)

    def test_mixture_modes_equal_height(self):
        model = get_model("mixture_1d")
        lp = model.density.log_prior
        at = lambda v: lp(ParameterVector(model.layout, np.array([v])))
        assert at(3.0) == pytest.approx(at(-3.0), rel=1e-12)
        assert at(0.0) < at(3.0)


class TestGradientChecks:
    @pytest.mark.parametrize("name", sorted(builtin_names()))
    def test_analytic_matches_finite_differences(self, name):
        model = get_model(name)
        dataset = synth_data_generate(model, RandomKey(100), 12)
        rows = np.arange(min(6, dataset.size))
        batch = MiniBatch({k: v[rows] for k, v in dataset.arrays.items()},
                          np.ones(rows.shape[0], dtype=bool), dataset.size, rows)
        for key in split(RandomKey(55), 20):
            flat = key.generator().standard_normal(model.density.dim) * 0.8
            theta = ParameterVector(model.layout, flat)
            _, analytic = minibatch_potential_eval(model.density, theta, batch)
            fd = fd_gradient(
                lambda pv: minibatch_potential_eval(model.density, pv, batch)[0],
                theta, h=1e-5)
            rel = np.linalg.norm(analytic.values - fd.values) / max(
                np.linalg.norm(analytic.values), 1e-8)
            assert rel <= 1e-5, f"{name}: rel err {rel}"


class TestGenerators:
    def test_reproducible(self):
        model = get_model("linreg_sigma")
        a = synth_data_generate(model, RandomKey(4), 20)
        b = synth_data_generate(model, RandomKey(4), 20)
        assert np.array_equal(a["x"], b["x"])
        assert np.array_equal(a["y"], b["y"])

    def test_linreg_residual_variance(self):
        model = get_model("linreg_sigma")
        true = {"w": [0.5, -1.0, 2.0, 0.25], "sigma": 0.5, "x_scale": 1.0}
        ds = synth_data_generate(model, RandomKey(6), 10000, true)
        resid = ds["y"] - ds["x"] @ np.asarray(true["w"])
        assert abs(resid.var() - 0.25) / 0.25 < 0.10

    def test_gaussian_mean_clt(self):
        model = get_model("gaussian_mean")
        n = 10000
        ds = synth_data_generate(model, RandomKey(8), n, {"mu": 1.3})
        assert abs(ds["y"].mean() - 1.3) < 3.0 / math.sqrt(n)

    def test_mixture_draws_cover_both_modes(self):
        model = get_model("mixture_1d")
        ds = synth_data_generate(model, RandomKey(10), 2000)
        frac = (ds["y"] > 0).mean()
        assert 0.4 < frac < 0.6


class TestRWMHOracle:
    def test_standard_normal_moments(self):
        model = get_model("std_normal")
        ds = synth_data_generate(model, RandomKey(0), 1)
        out = rwmh_oracle(model, ds, model.init, 2.4, steps=100000, key=RandomKey(13))
        x = out["samples"][:, 0]
        ess_floor = x.shape[0] / 50  # generous autocorrelation allowance
        assert abs(x.mean()) < 3.0 / math.sqrt(ess_floor)
        assert abs(x.var(ddof=1) - 1.0) < 0.05
        assert 0.2 < out["acceptance_rate"] < 0.7

    def test_zero_proposal_scale_freezes_chain(self):
        model = get_model("std_normal")
        ds = synth_data_generate(model, RandomKey(0), 1)
        theta0 = ParameterVector(model.layout, np.array([0.4]))
        out = rwmh_oracle(model, ds, theta0, 0.0, steps=500, key=RandomKey(3))
        assert out["acceptance_rate"] == 1.0
        assert np.all(out["samples"] == 0.4)

    def test_detailed_balance_three_bins(self):
        model = get_model("std_normal")
        ds = synth_data_generate(model, RandomKey(0), 1)
        out = rwmh_oracle(model, ds, model.init, 1.5, steps=100000,
                          key=RandomKey(21), burn_in=1000)
        x = out["samples"][:, 0]
        bins = np.digitize(x, [-0.5, 0.5])
        counts = np.zeros((3, 3))
        np.add.at(counts, (bins[:-1], bins[1:]), 1)
        for i in range(3):
            for j in range(i + 1, 3):
                nij, nji = counts[i, j], counts[j, i]
                # reversibility: N_ij ~= N_ji within 3 s.e. of the difference
                assert abs(nij - nji) < 3.0 * math.sqrt(nij + nji)


class TestEnsemblePredict:
    def test_two_model_average(self):
        model = get_model("gaussian_mean")
        samples = [ParameterVector(model.layout, np.array([v])) for v in (0.2, 0.4)]
        out = ensemble_predict(samples, None, model)
        assert out["mean"] == pytest.approx(0.3)

    def test_identical_samples_zero_spread(self):
        model = get_model("gaussian_mean")
        samples = [ParameterVector(model.layout, np.array([0.7]))] * 5
        assert ensemble_predict(samples, None, model)["std"] == 0.0

    def test_empty_rejected(self):
        model = get_model("gaussian_mean")
        with pytest.raises(ValueError):
            ensemble_predict([], None, model)

    def test_conjugate_predictive_mean(self):
        model = get_model("gaussian_mean")
        ds = synth_data_generate(model, RandomKey(33), 100, {"mu": -0.4})
        post = model.analytic_posterior(ds)
        rng = RandomKey(44).generator()
        draws = post["mean"]["mu"] + post["std"]["mu"] * rng.standard_normal(4000)
        out = ensemble_predict(draws[:, None], None, model)
        se = post["std"]["mu"] / math.sqrt(4000)
        assert abs(out["mean"] - post["mean"]["mu"]) < 3 * se

    def test_flat_matrix_input(self):
        model = get_model("logreg_2d")
        mat = np.array([[0.0, 0.0], [1.0, 1.0]])
        out = ensemble_predict(mat, np.array([1.0, 1.0]), model)
        assert out["outputs"][0] == pytest.approx(0.5)
        assert out["n_models"] == 2
