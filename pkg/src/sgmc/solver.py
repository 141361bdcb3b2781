"""Markov-chain transitions and the chain driver.

Accept-all solvers (SGLD, pSGLD, SGHMC) take one integrator step per
iteration.  The amortized Metropolis solvers (AMAGOLD, SGGMC) run a stochastic
multi-step trajectory per round, resample momenta at the start of every round,
and accept with exp((U(start) - U(end) + W) / tau) where the exact potential
is evaluated only at the endpoints (the start value is cached from the last
accept) and W is the trajectory's accumulated stochastic work.  On rejection
the position is kept and the round's initial momentum is flipped.

Replica exchange couples a tau=1 chain with a tempered one and proposes state
swaps at a fixed interval, with a variance correction for the mini-batch noise
of the potential estimate.

Per-chain randomness is split from the chain key into fixed streams:
child(0) batches, child(1).child(t) iteration t, child(2) extras.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import io as sample_io
from .adaption import (OnlineCovState, RMSPropState, rmsprop_step,
                       welford_finalize, welford_step)
from .core import ParameterVector, RandomKey, normal_flat
from .data import BatchSpec, BatchState, Dataset, init_batch_state, next_batch
from .errors import ChainError, ConfigurationError, NumericError
from .integrator import (langevin_step, obabo_trajectory,
                         reversible_leapfrog_trajectory, sghmc_step)
from .models import BuiltinModel
from .potential import LogDensityModel, full_value, minibatch_value_grad
from .scheduler import (DualAveragingState, ScheduleItem, SchedulerState,
                        init_scheduler, polynomial_schedule, scheduler_next)

SAMPLER_NAMES = ("sgld", "psgld", "sghmc", "amagold", "sggmc", "resgld")

# fixed per-chain stream indices (see module docstring)
_STREAM_BATCH = 0
_STREAM_ITER = 1
_STREAM_EXTRA = 2


@dataclass(frozen=True)
class AcceptanceStats:
    proposals: int = 0
    accepts: int = 0
    last_alpha: Optional[float] = None
    last_exponent: Optional[float] = None
    last_delta_h: Optional[float] = None  # debug runs only

    @property
    def rate(self) -> float:
        return self.accepts / self.proposals if self.proposals else 0.0


@dataclass(frozen=True)
class SolverState:
    """Per-chain sampler state; value-semantic, replaced on every step."""

    theta: np.ndarray
    key: RandomKey
    batch_spec: BatchSpec
    batch_state: BatchState
    step_index: int = 0
    p: Optional[np.ndarray] = None
    rms: Optional[RMSPropState] = None
    cached_potential: Optional[float] = None
    stats: AcceptanceStats = AcceptanceStats()
    gradient_evals: int = 0


@dataclass(frozen=True)
class SamplerContext:
    """Static bindings shared by every step of one sampler."""

    density: LogDensityModel
    dataset: Dataset
    batch_size: int
    batch_strategy: str = "draw_replacement"
    cache_count: int = 1
    leapfrog_steps: int = 5
    obabo_steps: int = 1
    friction: float = 0.0        # C for sghmc/amagold, gamma for sggmc
    noise_estimate: float = 0.0  # sghmc B-hat
    rms_prop: bool = False
    rms_alpha: float = 0.99
    rms_lam: float = 1e-5
    debug: bool = False


@dataclass(frozen=True)
class Solver:
    name: str
    context: SamplerContext
    init: Callable
    step: Callable
    metropolis: bool


def _init_state(ctx: SamplerContext, theta0: ParameterVector, key: RandomKey,
                momentum: bool, cache_potential: bool) -> SolverState:
    spec = BatchSpec(ctx.batch_size, ctx.batch_strategy, key.child(_STREAM_BATCH),
                     ctx.cache_count)
    flat = theta0.values.copy()
    dim = flat.shape[0]
    return SolverState(
        theta=flat,
        key=key,
        batch_spec=spec,
        batch_state=init_batch_state(ctx.dataset, spec),
        p=np.zeros(dim) if momentum else None,
        rms=RMSPropState.init(dim, ctx.rms_alpha, ctx.rms_lam) if ctx.rms_prop else None,
        cached_potential=(
            full_value(ctx.density, flat, ctx.dataset, ctx.dataset.size)
            if cache_potential else None
        ),
    )


def _fresh_grad(ctx: SamplerContext, state_box: list, flat: np.ndarray):
    """Stochastic gradient on a fresh mini-batch; advances the boxed cursor."""
    batch, state_box[0] = next_batch(ctx.dataset, state_box[1], state_box[0])
    _, grad = minibatch_value_grad(ctx.density, flat, batch)
    return grad


# ---------------------------------------------------------------------------
# Accept-all solvers

def sgmc_update(ctx: SamplerContext, state: SolverState, item: ScheduleItem,
                kind: str) -> SolverState:
    """One accept-all transition (kind in {sgld, psgld, sghmc})."""
    t = state.step_index
    it_key = state.key.child(_STREAM_ITER).child(t)
    batch, bstate = next_batch(ctx.dataset, state.batch_spec, state.batch_state)
    _, grad = minibatch_value_grad(ctx.density, state.theta, batch)
    rms = state.rms
    p = state.p
    if kind == "sghmc":
        theta, p = sghmc_step(state.theta, state.p, grad, item.step_size,
                              ctx.friction, ctx.noise_estimate, item.temperature,
                              key=it_key.child(0))
    else:
        precond = None
        if kind == "psgld":
            rms, precond = rmsprop_step(rms, grad)
        theta = langevin_step(state.theta, grad, item.step_size, item.temperature,
                              precond, key=it_key.child(0))
    stats = replace(state.stats, proposals=state.stats.proposals + 1,
                    accepts=state.stats.accepts + 1)
    return replace(state, theta=theta, p=p, rms=rms, batch_state=bstate,
                   step_index=t + 1, stats=stats,
                   gradient_evals=state.gradient_evals + 1)


# ---------------------------------------------------------------------------
# Amortized Metropolis solvers

def _check_cached(ctx: SamplerContext, state: SolverState):
    if not ctx.debug:
        return
    fresh = full_value(ctx.density, state.theta, ctx.dataset, ctx.dataset.size)
    if abs(fresh - state.cached_potential) > 1e-8 * max(1.0, abs(fresh)):
        raise AssertionError(
            f"cached potential {state.cached_potential} stale (fresh {fresh})"
        )


def _mh_round(ctx: SamplerContext, state: SolverState, item: ScheduleItem,
              trajectory) -> SolverState:
    tau = item.temperature
    if tau <= 0:
        raise ValueError("Metropolis solvers need temperature > 0")
    _check_cached(ctx, state)
    t = state.step_index
    it_key = state.key.child(_STREAM_ITER).child(t)
    dim = state.theta.shape[0]
    p0 = normal_flat(it_key.child(0), dim, math.sqrt(tau))

    box = [state.batch_state, state.batch_spec]
    evals = [0]

    def grad_fn(flat):
        evals[0] += 1
        return _fresh_grad(ctx, box, flat)

    theta_new, p_new, work = trajectory(state.theta, p0, grad_fn, it_key.child(1))

    u0 = state.cached_potential
    u_new = full_value(ctx.density, theta_new, ctx.dataset, ctx.dataset.size)
    exponent = (u0 - u_new + work) / tau
    if not math.isfinite(exponent):
        raise NumericError(f"non-finite acceptance exponent {exponent}")
    alpha = math.exp(min(exponent, 0.0))
    accept = math.log(it_key.child(2).generator().random()) < exponent

    delta_h = None
    if ctx.debug:
        k0 = 0.5 * float(p0 @ p0)
        k_new = 0.5 * float(p_new @ p_new)
        delta_h = (u_new + k_new - u0 - k0) / tau
    stats = AcceptanceStats(state.stats.proposals + 1,
                            state.stats.accepts + (1 if accept else 0),
                            alpha, exponent, delta_h)
    if accept:
        return replace(state, theta=theta_new, p=p_new, cached_potential=u_new,
                       batch_state=box[0], step_index=t + 1, stats=stats,
                       gradient_evals=state.gradient_evals + evals[0])
    return replace(state, p=-p0, batch_state=box[0], step_index=t + 1, stats=stats,
                   gradient_evals=state.gradient_evals + evals[0])


def amagold_round(ctx: SamplerContext, state: SolverState, item: ScheduleItem) -> SolverState:
    """Time-reversible noisy leapfrog round with amortized MH correction."""
    beta = 0.5 * item.step_size * ctx.friction
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"half-step friction beta={beta} outside [0, 1)")

    def trajectory(theta, p0, grad_fn, key):
        return reversible_leapfrog_trajectory(
            theta, p0, ctx.leapfrog_steps, item.step_size, beta, grad_fn,
            tau=item.temperature, key=key)

    return _mh_round(ctx, state, item, trajectory)


def sggmc_round(ctx: SamplerContext, state: SolverState, item: ScheduleItem) -> SolverState:
    """OBABO round: OU half-steps bracket the Metropolized BAB cores."""

    def trajectory(theta, p0, grad_fn, key):
        return obabo_trajectory(theta, p0, ctx.obabo_steps, item.step_size,
                                ctx.friction, grad_fn, tau=item.temperature, key=key)

    return _mh_round(ctx, state, item, trajectory)


# ---------------------------------------------------------------------------
# Replica exchange

@dataclass(frozen=True)
class TemperingPair:
    """A tau=1 chain coupled to a tempered one, swapping states periodically."""

    low: SolverState
    high: SolverState
    tau_low: float
    tau_high: float
    swap_interval: int
    correction: float  # F in the noise-corrected swap exponent
    noise_var: OnlineCovState
    context: SamplerContext = field(repr=False)
    hot_step_factor: float = 1.0  # step-size multiplier for the tempered chain
    steps_since_swap: int = 0
    swap_attempts: int = 0
    stats: AcceptanceStats = AcceptanceStats()

    # chain-loop protocol: expose the cold chain
    @property
    def theta(self) -> np.ndarray:
        return self.low.theta

    @property
    def step_index(self) -> int:
        return self.low.step_index

    @property
    def gradient_evals(self) -> int:
        return self.low.gradient_evals + self.high.gradient_evals


def swap_exponent(tau_low: float, tau_high: float, u_low: float, u_high: float,
                  noise_var: float = 0.0, correction: float = 1.0) -> float:
    """Log swap probability with the mini-batch noise correction."""
    dbeta = 1.0 / tau_low - 1.0 / tau_high
    return dbeta * (u_low - u_high - dbeta * noise_var / correction)


def _stochastic_u_pair(ctx: SamplerContext, state: SolverState):
    """Two independent fresh-batch potential estimates at the current position."""
    box = [state.batch_state, state.batch_spec]
    batch_a, box[0] = next_batch(ctx.dataset, box[1], box[0])
    u_a, _ = minibatch_value_grad(ctx.density, state.theta, batch_a)
    batch_b, box[0] = next_batch(ctx.dataset, box[1], box[0])
    u_b, _ = minibatch_value_grad(ctx.density, state.theta, batch_b)
    return u_a, u_b, box[0]


def resgld_swap(pair: TemperingPair) -> TemperingPair:
    """Attempt one state swap between the two chains of the pair.

    The noise variance of the stochastic potential is estimated online from
    paired fresh-batch evaluations, Var(U~) ~= Var((U~_a - U~_b)/sqrt(2)),
    which isolates mini-batch noise from the drift of the chains.
    """
    ctx = pair.context
    u_low, u_low_b, bstate_low = _stochastic_u_pair(ctx, pair.low)
    u_high, u_high_b, bstate_high = _stochastic_u_pair(ctx, pair.high)
    nv = welford_step(pair.noise_var, (u_low - u_low_b) / math.sqrt(2.0))
    nv = welford_step(nv, (u_high - u_high_b) / math.sqrt(2.0))
    sigma2 = float(welford_finalize(nv)[1][0]) if nv.count >= 2 else 0.0
    exponent = swap_exponent(pair.tau_low, pair.tau_high, u_low, u_high,
                             sigma2, pair.correction)
    key = pair.low.key.child(_STREAM_EXTRA).child(pair.swap_attempts)
    accept = math.log(key.generator().random()) < exponent
    low = replace(pair.low, batch_state=bstate_low)
    high = replace(pair.high, batch_state=bstate_high)
    if accept:
        # exchange position and position-bound solver state; streams stay put
        low, high = (
            replace(low, theta=high.theta.copy(), rms=high.rms,
                    cached_potential=high.cached_potential),
            replace(high, theta=low.theta.copy(), rms=low.rms,
                    cached_potential=low.cached_potential),
        )
    stats = AcceptanceStats(pair.stats.proposals + 1,
                            pair.stats.accepts + (1 if accept else 0),
                            math.exp(min(exponent, 0.0)), exponent)
    return replace(pair, low=low, high=high, noise_var=nv, steps_since_swap=0,
                   swap_attempts=pair.swap_attempts + 1, stats=stats)


def resgld_step(pair: TemperingPair, item: ScheduleItem) -> TemperingPair:
    """Advance both chains one SGLD step; swap every ``swap_interval`` steps."""
    ctx = pair.context
    if abs(item.temperature - pair.tau_low) > 1e-12:
        raise ValueError("replica exchange requires a constant temperature schedule")
    hot_item = replace(item,
                       temperature=item.temperature * pair.tau_high / pair.tau_low,
                       step_size=item.step_size * pair.hot_step_factor)
    kind = "psgld" if ctx.rms_prop else "sgld"
    pair = replace(pair,
                   low=sgmc_update(ctx, pair.low, item, kind),
                   high=sgmc_update(ctx, pair.high, hot_item, kind),
                   steps_since_swap=pair.steps_since_swap + 1)
    if pair.steps_since_swap >= pair.swap_interval:
        pair = resgld_swap(pair)
    return pair


# ---------------------------------------------------------------------------
# Solver factories

def _accept_all_factory(name: str, kind: str, ctx: SamplerContext) -> Solver:
    def init(theta0, key):
        return _init_state(ctx, theta0, key, momentum=(kind == "sghmc"),
                           cache_potential=False)

    def step(state, item):
        return sgmc_update(ctx, state, item, kind)

    return Solver(name, ctx, init, step, metropolis=False)


def sgld_solver(density: LogDensityModel, dataset: Dataset, batch_size: int,
                *, rms_prop: bool = False, batch_strategy: str = "draw_replacement",
                cache_count: int = 1, rms_alpha: float = 0.99, rms_lam: float = 1e-5) -> Solver:
    ctx = SamplerContext(density, dataset, batch_size, batch_strategy, cache_count,
                         rms_prop=rms_prop, rms_alpha=rms_alpha, rms_lam=rms_lam)
    return _accept_all_factory("psgld" if rms_prop else "sgld",
                               "psgld" if rms_prop else "sgld", ctx)


def sghmc_solver(density: LogDensityModel, dataset: Dataset, batch_size: int,
                 *, friction: float, noise_estimate: float = 0.0,
                 batch_strategy: str = "draw_replacement", cache_count: int = 1) -> Solver:
    ctx = SamplerContext(density, dataset, batch_size, batch_strategy, cache_count,
                         friction=friction, noise_estimate=noise_estimate)
    return _accept_all_factory("sghmc", "sghmc", ctx)


def amagold_solver(density: LogDensityModel, dataset: Dataset, batch_size: int,
                   *, leapfrog_steps: int, friction: float = 0.1,
                   batch_strategy: str = "draw_replacement", cache_count: int = 1,
                   debug: bool = False) -> Solver:
    if leapfrog_steps < 1:
        raise ConfigurationError("need at least one leapfrog step", field="leapfrog_steps")
    ctx = SamplerContext(density, dataset, batch_size, batch_strategy, cache_count,
                         leapfrog_steps=leapfrog_steps, friction=friction, debug=debug)

    def init(theta0, key):
        return _init_state(ctx, theta0, key, momentum=True, cache_potential=True)

    def step(state, item):
        return amagold_round(ctx, state, item)

    return Solver("amagold", ctx, init, step, metropolis=True)


def sggmc_solver(density: LogDensityModel, dataset: Dataset, batch_size: int,
                 *, obabo_steps: int, friction: float = 0.0,
                 batch_strategy: str = "draw_replacement", cache_count: int = 1,
                 debug: bool = False) -> Solver:
    if obabo_steps < 1:
        raise ConfigurationError("need at least one OBABO step", field="obabo_steps")
    ctx = SamplerContext(density, dataset, batch_size, batch_strategy, cache_count,
                         obabo_steps=obabo_steps, friction=friction, debug=debug)

    def init(theta0, key):
        return _init_state(ctx, theta0, key, momentum=True, cache_potential=True)

    def step(state, item):
        return sggmc_round(ctx, state, item)

    return Solver("sggmc", ctx, init, step, metropolis=True)


def resgld_solver(density: LogDensityModel, dataset: Dataset, batch_size: int,
                  *, tau_high: float, swap_interval: int = 50, correction: float = 1.0,
                  hot_step_factor: float = 1.0, rms_prop: bool = False,
                  batch_strategy: str = "draw_replacement",
                  cache_count: int = 1, temperature: float = 1.0) -> Solver:
    if tau_high <= 1.0:
        raise ConfigurationError("tempered chain needs tau_high > 1", field="tau_high")
    if swap_interval < 1:
        raise ConfigurationError("swap interval must be >= 1", field="swap_interval")
    if correction <= 0:
        raise ConfigurationError("correction factor must be > 0", field="correction")
    if hot_step_factor <= 0:
        raise ConfigurationError("hot-chain step factor must be > 0",
                                 field="hot_step_factor")
    ctx = SamplerContext(density, dataset, batch_size, batch_strategy, cache_count,
                         rms_prop=rms_prop)

    def init(theta0, key):
        low = _init_state(ctx, theta0, key.child(0), momentum=False, cache_potential=False)
        high = _init_state(ctx, theta0, key.child(1), momentum=False, cache_potential=False)
        return TemperingPair(low, high, temperature, tau_high, swap_interval,
                             correction, OnlineCovState.init(1, diagonal_only=True),
                             context=ctx, hot_step_factor=hot_step_factor)

    def step(pair, item):
        return resgld_step(pair, item)

    return Solver("resgld", ctx, init, step, metropolis=False)


# ---------------------------------------------------------------------------
# Chain driver

def _chain_result(store, stats, runtime, chain_id, gradient_evals, iterations):
    mem = sample_io.finalize_results(store, "memory")
    mem.update({
        "acceptance_rate": stats.rate,
        "runtime": runtime,
        "iterations": iterations,
        "gradient_evaluations": gradient_evals,
        "store": store,
    })
    return mem


def _run_chain(solver: Solver, scheduler: SchedulerState, init_theta: ParameterVector,
               iterations: int, chain_key: RandomKey, chain_id: int, metadata: dict,
               collector_factory=None):
    layout = solver.context.density.layout
    state = solver.init(init_theta, chain_key)
    sched = scheduler
    if collector_factory is None:
        store = sample_io.SampleStore(layout, chain_id, dict(metadata))
    else:
        store = collector_factory(chain_id, layout)
    started = time.perf_counter()
    for t in range(iterations):
        item, sched = scheduler_next(sched, feedback=state.stats)
        try:
            state = solver.step(state, item)
        except (NumericError, FloatingPointError) as exc:
            partial = _chain_result(store, state.stats, time.perf_counter() - started,
                                    chain_id, state.gradient_evals, t)
            raise ChainError(str(exc), iteration=t, partial=partial) from exc
        if item.keep:
            sample_io.collect_sample(store, ParameterVector(layout, state.theta.copy()), t)
    return _chain_result(store, state.stats, time.perf_counter() - started,
                         chain_id, state.gradient_evals, iterations)


def run_mcmc(solver: Solver, scheduler: SchedulerState, init_theta: ParameterVector,
             iterations: int, *, key: RandomKey, chains: int = 1,
             parallel: bool = False, metadata: dict | None = None,
             collector_factory=None) -> list[dict]:
    """Run ``chains`` independent chains; returns one result mapping per chain.

    Chain c draws every stream from ``key.child(c)``, so results are
    reproducible regardless of execution order.  ``collector_factory``
    (chain_id, layout) -> SampleStore swaps in a custom collector.  On a
    numeric failure a ChainError propagates with ``.partial`` holding the
    failing chain's collected samples.
    """
    if iterations < 1:
        raise ConfigurationError("need at least one iteration", field="iterations")
    if chains < 1:
        raise ConfigurationError("need at least one chain", field="chains")
    metadata = metadata or {}
    if scheduler.is_adaptive and not solver.metropolis:
        raise ConfigurationError(
            "adaptive step sizes need a Metropolis solver (no acceptance statistics "
            f"exist for {solver.name})", field="step_size")

    def one(chain_id):
        return _run_chain(solver, scheduler, init_theta, iterations,
                          key.child(chain_id), chain_id, metadata,
                          collector_factory)

    if chains == 1 or not parallel:
        return [one(c) for c in range(chains)]
    with ThreadPoolExecutor(max_workers=chains) as pool:
        futures = [pool.submit(one, c) for c in range(chains)]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# High-level assembly

_REQUIRED = {
    "sgld": (),
    "psgld": (),
    "sghmc": ("friction",),
    "amagold": ("leapfrog_steps",),
    "sggmc": ("obabo_steps",),
    "resgld": ("tau_high",),
}


@dataclass
class SamplerBundle:
    """Everything run_mcmc needs, assembled from one configuration."""

    name: str
    solver: Solver
    scheduler: SchedulerState
    init_theta: ParameterVector
    run_key: RandomKey
    iterations: int
    config: dict

    def run(self, iterations: int | None = None, chains: int = 1,
            parallel: bool = False, metadata: dict | None = None) -> list[dict]:
        return run_mcmc(self.solver, self.scheduler, self.init_theta,
                        iterations or self.iterations, key=self.run_key,
                        chains=chains, parallel=parallel, metadata=metadata)


def build_sampler(name: str, config: dict) -> SamplerBundle:
    """Assemble a ready-to-run sampler from a flat configuration mapping.

    Required for every sampler: model (BuiltinModel), dataset, iterations,
    batch_size, seed, and a step-size block (step_size_first/step_size_last/
    step_size_decay, or target_accept/step_size_init for adaptive runs).
    Sampler-specific requirements: sghmc -> friction, amagold ->
    leapfrog_steps, sggmc -> obabo_steps, resgld -> tau_high.
    """
    if name not in SAMPLER_NAMES:
        raise ConfigurationError(f"unknown sampler {name!r}", field="sampler")
    cfg = dict(config)

    def need(field_name):
        if field_name not in cfg or cfg[field_name] is None:
            raise ConfigurationError(f"sampler {name!r} requires a value",
                                     field=field_name)
        return cfg[field_name]

    model: BuiltinModel = need("model")
    dataset: Dataset = need("dataset")
    iterations = int(need("iterations"))
    batch_size = int(need("batch_size"))
    seed = int(need("seed"))
    for field_name in _REQUIRED[name]:
        need(field_name)
    if iterations < 1:
        raise ConfigurationError("iterations must be >= 1", field="iterations")

    root = RandomKey(seed)
    burn_in = int(cfg.get("burn_in", 0))
    selections = cfg.get("selections")
    temperature = float(cfg.get("temperature", 1.0))
    strategy = cfg.get("batch_strategy", "draw_replacement")
    cache_count = int(cfg.get("cache_count", 1))

    adaptive = None
    step_sizes = None
    if cfg.get("target_accept") is not None:
        adaptive = DualAveragingState.init(
            float(cfg.get("step_size_init", 0.1)), float(cfg["target_accept"]))
    else:
        first = need("step_size_first")
        last = need("step_size_last")
        decay = float(cfg.get("step_size_decay", 0.33))
        step_sizes = polynomial_schedule(float(first), float(last), decay, iterations)

    common = dict(batch_strategy=strategy, cache_count=cache_count)
    density = model.density
    if name in ("sgld", "psgld"):
        rms = bool(cfg.get("rms_prop", name == "psgld"))
        solver = sgld_solver(density, dataset, batch_size, rms_prop=rms,
                             rms_alpha=float(cfg.get("rms_alpha", 0.99)),
                             rms_lam=float(cfg.get("rms_lam", 1e-5)), **common)
    elif name == "sghmc":
        solver = sghmc_solver(density, dataset, batch_size,
                              friction=float(cfg["friction"]),
                              noise_estimate=float(cfg.get("noise_estimate", 0.0)),
                              **common)
    elif name == "amagold":
        solver = amagold_solver(density, dataset, batch_size,
                                leapfrog_steps=int(cfg["leapfrog_steps"]),
                                friction=float(cfg.get("friction", 0.1)),
                                debug=bool(cfg.get("debug", False)), **common)
    elif name == "sggmc":
        solver = sggmc_solver(density, dataset, batch_size,
                              obabo_steps=int(cfg["obabo_steps"]),
                              friction=float(cfg.get("friction", 0.0)),
                              debug=bool(cfg.get("debug", False)), **common)
    else:
        solver = resgld_solver(density, dataset, batch_size,
                               tau_high=float(cfg["tau_high"]),
                               swap_interval=int(cfg.get("swap_interval", 50)),
                               correction=float(cfg.get("correction", 1.0)),
                               hot_step_factor=float(cfg.get("hot_step_factor", 1.0)),
                               rms_prop=bool(cfg.get("rms_prop", False)),
                               temperature=temperature, **common)

    if adaptive is not None and not solver.metropolis:
        raise ConfigurationError(
            f"adaptive step size is not available for accept-all sampler {name!r}",
            field="target_accept")
    if solver.metropolis and temperature <= 0:
        raise ConfigurationError("Metropolis solvers need temperature > 0",
                                 field="temperature")

    scheduler = init_scheduler(
        iterations,
        step_size=step_sizes,
        adaptive=adaptive,
        burn_in=burn_in,
        selections=selections,
        temperature=temperature,
        key=root.child(1),
    )
    init_theta = cfg.get("init_theta") or model.init
    return SamplerBundle(name, solver, scheduler, init_theta, root.child(2),
                         iterations, cfg)
