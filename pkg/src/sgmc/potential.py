"""Potential builders: negative unnormalized log posterior and its gradient.

The user supplies a per-observation log-likelihood and a log-prior (all in
log space).  The stochastic potential scales the mini-batch likelihood sum by
N/n_eff, where n_eff counts unmasked rows, so padded epoch tails stay
unbiased; the true potential sums the whole dataset via masked sweeps.

Models may additionally carry vectorized batch evaluators.  Those are a pure
fast path: they must agree with the per-observation functions row for row
(the test suite enforces this), and evaluation falls back to the row loop
whenever they are absent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import Layout, ParameterVector, layout_size, structure
from .data import Dataset, MiniBatch, full_data_map, sequential_batches


@dataclass(frozen=True)
class LogDensityModel:
    """Per-observation log-likelihood/score plus log-prior/gradient.

    ``log_likelihood(theta, obs)`` consumes a single observation (a mapping
    name -> row) and returns a float; ``grad_log_likelihood`` returns the
    score as a ParameterVector.  ``batch_log_likelihood(flat_theta, arrays)``
    and ``batch_score(flat_theta, arrays)`` are optional vectorized versions
    returning shape (n,) and (n, dim).
    """

    layout: Layout
    log_likelihood: Callable
    grad_log_likelihood: Callable
    log_prior: Callable
    grad_log_prior: Callable
    batch_log_likelihood: Optional[Callable] = None
    batch_score: Optional[Callable] = None

    @property
    def dim(self) -> int:
        return layout_size(self.layout)


def _row(batch: MiniBatch, i: int) -> dict[str, np.ndarray]:
    return {name: arr[i] for name, arr in batch.arrays.items()}


def _batch_loglik(model: LogDensityModel, flat: np.ndarray, batch: MiniBatch) -> np.ndarray:
    if model.batch_log_likelihood is not None:
        return np.asarray(model.batch_log_likelihood(flat, batch.arrays), dtype=np.float64)
    theta = structure(model.layout, flat)
    return np.array(
        [model.log_likelihood(theta, _row(batch, i)) for i in range(batch.size)]
    )


def _batch_scores(model: LogDensityModel, flat: np.ndarray, batch: MiniBatch) -> np.ndarray:
    if model.batch_score is not None:
        return np.asarray(model.batch_score(flat, batch.arrays), dtype=np.float64)
    theta = structure(model.layout, flat)
    return np.stack(
        [model.grad_log_likelihood(theta, _row(batch, i)).values for i in range(batch.size)]
    )


def minibatch_value_grad(model: LogDensityModel, flat: np.ndarray, batch: MiniBatch):
    """Flat-vector stochastic potential: (U~, grad U~)."""
    n_eff = batch.n_effective
    if n_eff == 0:
        raise ValueError("mini-batch is fully masked")
    scale = batch.full_size / n_eff
    ll = _batch_loglik(model, flat, batch)
    scores = _batch_scores(model, flat, batch)
    if batch.mask.all():
        ll_sum, score_sum = float(ll.sum()), scores.sum(axis=0)
    else:
        # select, don't multiply: masked rows may hold arbitrary garbage
        ll_sum = float(ll[batch.mask].sum())
        score_sum = scores[batch.mask].sum(axis=0)
    theta = structure(model.layout, flat)
    value = -scale * ll_sum - float(model.log_prior(theta))
    grad = -scale * score_sum - model.grad_log_prior(theta).values
    return value, grad


def minibatch_potential_eval(model: LogDensityModel, theta: ParameterVector, batch: MiniBatch):
    """Stochastic potential U~ and its gradient for one mini-batch."""
    value, grad = minibatch_value_grad(model, theta.values, batch)
    return value, ParameterVector(model.layout, grad)


def full_value(model: LogDensityModel, flat: np.ndarray, dataset: Dataset, n: int) -> float:
    def fn(_, batch):
        ll = _batch_loglik(model, flat, batch)
        return float(ll[batch.mask].sum())

    total = full_data_map(fn, dataset, None, n, reduce="sum")
    theta = structure(model.layout, flat)
    return -total - float(model.log_prior(theta))


def full_value_grad(model: LogDensityModel, flat: np.ndarray, dataset: Dataset, n: int):
    value = None
    total_ll = 0.0
    total_score = np.zeros(model.dim)
    for batch in sequential_batches(dataset, n):
        ll = _batch_loglik(model, flat, batch)
        scores = _batch_scores(model, flat, batch)
        total_ll += float(ll[batch.mask].sum())
        total_score += scores[batch.mask].sum(axis=0)
    theta = structure(model.layout, flat)
    value = -total_ll - float(model.log_prior(theta))
    grad = -total_score - model.grad_log_prior(theta).values
    return value, grad


def full_potential_eval(model: LogDensityModel, theta: ParameterVector, dataset: Dataset, n: int):
    """True potential U = -sum_i log p(y_i | x_i, theta) - log p(theta)."""
    value, grad = full_value_grad(model, theta.values, dataset, n)
    return value, ParameterVector(model.layout, grad)


@dataclass(frozen=True)
class PotentialEvaluator:
    """Bound potential: ``stochastic`` takes (theta, batch), ``exact`` takes theta."""

    kind: str
    model: LogDensityModel
    dataset: Optional[Dataset] = None
    batch_size: int = 0

    def __call__(self, theta: ParameterVector, batch: MiniBatch | None = None):
        if self.kind == "stochastic":
            if batch is None:
                raise ValueError("stochastic potential requires a mini-batch")
            return minibatch_potential_eval(self.model, theta, batch)
        return full_potential_eval(self.model, theta, self.dataset, self.batch_size)


def stochastic_potential(model: LogDensityModel) -> PotentialEvaluator:
    return PotentialEvaluator("stochastic", model)


def true_potential(model: LogDensityModel, dataset: Dataset, batch_size: int) -> PotentialEvaluator:
    return PotentialEvaluator("exact", model, dataset, batch_size)


def fd_gradient(f, theta: ParameterVector, h: float = 1e-5) -> ParameterVector:
    """Central finite differences of a scalar function of theta (oracle use)."""
    if h <= 0:
        raise ValueError("step h must be > 0")
    flat = theta.values
    grad = np.zeros_like(flat)
    for i in range(flat.shape[0]):
        up, dn = flat.copy(), flat.copy()
        up[i] += h
        dn[i] -= h
        grad[i] = (
            f(ParameterVector(theta.layout, up)) - f(ParameterVector(theta.layout, dn))
        ) / (2.0 * h)
    return ParameterVector(theta.layout, grad)
