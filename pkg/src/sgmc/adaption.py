"""Quantities adapted online while a chain runs.

RMSProp supplies the diagonal preconditioner for preconditioned Langevin
steps; the Welford accumulator tracks streaming mean/covariance (used e.g.
for the tempered-swap noise correction); the Fisher block estimates the
diagonal empirical Fisher information from per-observation scores.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import NumericError


@dataclass(frozen=True)
class RMSPropState:
    """Second-moment estimate V with decay ``alpha`` and regularizer ``lam``."""

    v: np.ndarray
    alpha: float = 0.99
    lam: float = 1e-5

    @classmethod
    def init(cls, dim: int, alpha: float = 0.99, lam: float = 1e-5) -> "RMSPropState":
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if lam <= 0.0:
            raise ValueError("lam must be > 0")
        return cls(np.zeros(dim), alpha, lam)


def rmsprop_step(state: RMSPropState, grad: np.ndarray):
    """Update V <- alpha V + (1-alpha) g*g; return (state', preconditioner).

    The preconditioner 1/(lam + sqrt(V)) is strictly positive and bounded by
    1/lam elementwise.
    """
    grad = np.asarray(grad, dtype=np.float64)
    if not np.all(np.isfinite(grad)):
        raise NumericError("non-finite gradient fed to rmsprop_step")
    v = state.alpha * state.v + (1.0 - state.alpha) * grad * grad
    precond = 1.0 / (state.lam + np.sqrt(v))
    return replace(state, v=v), precond


@dataclass(frozen=True)
class OnlineCovState:
    """Welford accumulator: count, running mean, sum of squared deviations."""

    count: int
    mean: np.ndarray
    m2: np.ndarray  # (d, d) matrix, or (d,) when diagonal_only
    diagonal_only: bool = False

    @classmethod
    def init(cls, dim: int, diagonal_only: bool = False) -> "OnlineCovState":
        m2 = np.zeros(dim) if diagonal_only else np.zeros((dim, dim))
        return cls(0, np.zeros(dim), m2, diagonal_only)


def welford_step(state: OnlineCovState, x) -> OnlineCovState:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.shape != state.mean.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {state.mean.shape}")
    count = state.count + 1
    delta = x - state.mean
    mean = state.mean + delta / count
    delta2 = x - mean
    if state.diagonal_only:
        m2 = state.m2 + delta * delta2
    else:
        m2 = state.m2 + np.outer(delta, delta2)
    return OnlineCovState(count, mean, m2, state.diagonal_only)


def welford_finalize(state: OnlineCovState):
    """Return (mean, unbiased covariance); needs at least two observations."""
    if state.count < 2:
        raise ValueError(f"covariance needs count >= 2, have {state.count}")
    return state.mean.copy(), state.m2 / (state.count - 1)


@dataclass(frozen=True)
class FisherDiagState:
    """Running mean of elementwise squared scores (diagonal empirical Fisher)."""

    diag: np.ndarray
    count: int = 0

    @classmethod
    def init(cls, dim: int) -> "FisherDiagState":
        return cls(np.zeros(dim), 0)


def fisher_diag_step(state: FisherDiagState, scores) -> FisherDiagState:
    """Fold a set of per-observation score vectors (rows) into the estimate."""
    scores = np.atleast_2d(np.asarray(scores, dtype=np.float64))
    m = scores.shape[0]
    if m == 0:
        raise ValueError("score set must be nonempty")
    count = state.count + m
    # running mean is associative over batches
    diag = state.diag + ((scores * scores).sum(axis=0) - m * state.diag) / count
    return FisherDiagState(diag, count)
