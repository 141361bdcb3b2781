"""Per-iteration process parameters: step size, temperature, burn-in, thinning.

Static schedules are pure functions of the iteration index; the adaptive
(dual-averaging) schedule consumes acceptance feedback from Metropolis-based
solvers, explores with the primal iterate during burn-in and freezes at the
averaged iterate afterwards.  Thinning is decided up front as a random plan:
kept iterations are drawn without replacement outside burn-in, weighted by
the static step size (uniformly for adaptive runs, where future step sizes
are unknown when the plan is drawn).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import RandomKey
from .errors import ConfigurationError


@dataclass(frozen=True)
class ScheduleItem:
    """Bundle consumed by the chain loop for one iteration."""

    step_size: float
    temperature: float
    burn_in: bool
    keep: bool


@dataclass(frozen=True)
class PolynomialSchedule:
    """eps_t = a (b + t)^(-gamma), hitting ``first`` at t=0 and ``last`` at t=n."""

    first: float
    last: float
    gamma: float
    n: int
    a: float
    b: float

    def __call__(self, t) -> float | np.ndarray:
        return self.a * (self.b + np.asarray(t, dtype=np.float64)) ** (-self.gamma)

    def values(self, n: int) -> np.ndarray:
        return self(np.arange(n))


def polynomial_schedule(first: float, last: float, gamma: float, n_iterations: int) -> PolynomialSchedule:
    if not first > last > 0:
        raise ValueError("need first > last > 0")
    if not 0 < gamma <= 1:
        raise ValueError("decay exponent must lie in (0, 1]")
    if n_iterations < 1:
        raise ValueError("need at least one iteration")
    b = n_iterations / ((first / last) ** (1.0 / gamma) - 1.0)
    a = first * b**gamma
    return PolynomialSchedule(first, last, gamma, n_iterations, a, b)


@dataclass(frozen=True)
class DualAveragingState:
    """Step-size adaptation toward a target acceptance probability ``delta``."""

    iteration: int
    h_bar: float
    log_eps: float
    log_eps_avg: float
    delta: float
    mu: float
    gamma: float = 0.05
    t0: float = 10.0
    kappa: float = 0.75

    @classmethod
    def init(cls, eps_init: float, delta: float = 0.65, gamma: float = 0.05,
             t0: float = 10.0, kappa: float = 0.75) -> "DualAveragingState":
        if eps_init <= 0:
            raise ValueError("initial step size must be > 0")
        if not 0 < delta < 1:
            raise ValueError("target acceptance must lie in (0, 1)")
        return cls(0, 0.0, math.log(eps_init), math.log(eps_init), delta,
                   math.log(10.0 * eps_init), gamma, t0, kappa)

    @property
    def eps(self) -> float:
        return math.exp(self.log_eps)

    @property
    def eps_avg(self) -> float:
        return math.exp(self.log_eps_avg)


def dual_averaging_step(state: DualAveragingState, accept_prob: float) -> DualAveragingState:
    """Fold one observed acceptance probability into the adaptation."""
    if not 0.0 <= accept_prob <= 1.0:
        raise ValueError("acceptance probability must lie in [0, 1]")
    m = state.iteration + 1
    eta = 1.0 / (m + state.t0)
    h_bar = (1.0 - eta) * state.h_bar + eta * (state.delta - accept_prob)
    log_eps = state.mu - math.sqrt(m) * h_bar / state.gamma
    w = m ** (-state.kappa)
    log_eps_avg = w * log_eps + (1.0 - w) * state.log_eps_avg
    return replace(state, iteration=m, h_bar=h_bar, log_eps=log_eps,
                   log_eps_avg=log_eps_avg)


def random_thinning_plan(step_sizes, burn_in: int, selections: int, n_iterations: int,
                         key: RandomKey) -> frozenset[int]:
    """Pick ``selections`` distinct non-burn-in iterations, P(t) ~ eps_t.

    Drawn without replacement; with a constant schedule the inclusion
    frequency is uniform over the eligible range.
    """
    eligible = np.arange(burn_in, n_iterations)
    if selections > eligible.shape[0]:
        raise ValueError(
            f"cannot keep {selections} of {eligible.shape[0]} eligible iterations"
        )
    if selections < 0:
        raise ValueError("selections must be >= 0")
    if callable(step_sizes):
        weights = np.asarray(step_sizes(eligible), dtype=np.float64)
    else:
        weights = np.asarray(step_sizes, dtype=np.float64)[eligible]
    if np.any(weights <= 0):
        raise ValueError("step sizes must be positive")
    if selections == eligible.shape[0]:
        return frozenset(int(t) for t in eligible)
    rng = key.generator()
    chosen = rng.choice(eligible, size=selections, replace=False, p=weights / weights.sum())
    return frozenset(int(t) for t in chosen)


@dataclass(frozen=True)
class SchedulerState:
    """Value-semantic scheduler; one instance per chain, advanced by ``scheduler_next``."""

    iteration: int
    n_iterations: int
    burn_in: int
    temperature: float
    step_sizes: Optional[np.ndarray]  # static schedule, None when adaptive
    plan: frozenset[int]
    adaptive: Optional[DualAveragingState] = None
    seen_proposals: int = 0

    @property
    def is_adaptive(self) -> bool:
        return self.adaptive is not None


def init_scheduler(n_iterations: int, *, step_size=None, adaptive: DualAveragingState = None,
                   burn_in: int = 0, selections: int = None, temperature: float = 1.0,
                   key: RandomKey = None) -> SchedulerState:
    """Assemble the per-iteration schedule bundle.

    ``step_size`` is a PolynomialSchedule, an array of length n, or a constant;
    pass ``adaptive`` instead for dual averaging.  ``selections=None`` keeps
    every non-burn-in iteration.
    """
    if n_iterations < 1:
        raise ConfigurationError("need at least one iteration", field="iterations")
    if not 0 <= burn_in <= n_iterations:
        raise ConfigurationError("burn-in outside [0, iterations]", field="burn_in")
    if temperature < 0:
        raise ConfigurationError("temperature must be >= 0", field="temperature")
    if (step_size is None) == (adaptive is None):
        raise ConfigurationError("provide exactly one of step_size / adaptive",
                                 field="step_size")
    eps = None
    if step_size is not None:
        if isinstance(step_size, PolynomialSchedule):
            eps = step_size.values(n_iterations)
        elif np.ndim(step_size) == 0:
            eps = np.full(n_iterations, float(step_size))
        else:
            eps = np.asarray(step_size, dtype=np.float64)
            if eps.shape[0] != n_iterations:
                raise ConfigurationError("step-size array length != iterations",
                                         field="step_size")
        if np.any(eps <= 0):
            raise ConfigurationError("step sizes must be positive", field="step_size")
    eligible = n_iterations - burn_in
    if selections is None:
        plan = frozenset(range(burn_in, n_iterations))
    else:
        if key is None:
            raise ConfigurationError("thinning needs a random key", field="key")
        weights = eps if eps is not None else np.ones(n_iterations)
        plan = random_thinning_plan(weights, burn_in, selections, n_iterations, key)
        assert len(plan) == min(selections, eligible)
    return SchedulerState(0, n_iterations, burn_in, temperature, eps, plan,
                          adaptive=adaptive)


def scheduler_next(state: SchedulerState, feedback=None):
    """Emit the next ScheduleItem; ``feedback`` carries solver acceptance stats.

    Guarantees keep => not burn_in for every emitted item.
    """
    t = state.iteration
    if t >= state.n_iterations:
        raise ValueError(f"schedule exhausted after {state.n_iterations} iterations")
    adaptive = state.adaptive
    seen = state.seen_proposals
    if adaptive is not None and feedback is not None:
        # one adaptation step per completed MH round, burn-in only
        if feedback.proposals > seen and feedback.last_alpha is not None and t <= state.burn_in:
            adaptive = dual_averaging_step(adaptive, feedback.last_alpha)
        seen = max(seen, feedback.proposals)
    if adaptive is not None:
        eps = adaptive.eps if t < state.burn_in else adaptive.eps_avg
    else:
        eps = float(state.step_sizes[t])
    burn = t < state.burn_in
    item = ScheduleItem(eps, state.temperature, burn, (not burn) and (t in state.plan))
    new_state = replace(state, iteration=t + 1, adaptive=adaptive, seen_proposals=seen)
    return item, new_state
