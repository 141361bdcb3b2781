"""One-step / one-trajectory simulators of the sampling dynamics.

All integrators operate on flat float64 vectors with unit mass, a temperature
``tau >= 0`` (tau = 0 switches noise off) and an explicit RandomKey per call.
Work accumulators (``W``) follow the amortized Metropolis convention: with
exact gradients and no friction the acceptance exponent U0 - UL + W of the
wrapping solver reduces to -dH, which the test suite enforces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import RandomKey, normal_flat
from .errors import NumericError


@dataclass(frozen=True)
class FrictionParams:
    """Friction coefficient C and the derived half-step damping beta = eps*C/2."""

    coefficient: float  # C >= 0

    def __post_init__(self):
        if self.coefficient < 0:
            raise ValueError("friction coefficient must be >= 0")

    def beta(self, step_size: float) -> float:
        b = 0.5 * step_size * self.coefficient
        if not 0.0 <= b < 1.0:
            raise ValueError(f"half-step friction beta={b} outside [0, 1)")
        return b


def langevin_step(theta, grad, step_size, tau=1.0, precond=None, key: RandomKey = None):
    """Overdamped Langevin update with optional diagonal preconditioner P:

    theta' = theta - (eps/2) P g + sqrt(eps tau) sqrt(P) xi,   xi ~ N(0, I)
    """
    if step_size <= 0:
        raise ValueError("step size must be > 0")
    theta = np.asarray(theta, dtype=np.float64)
    drift = grad if precond is None else precond * grad
    out = theta - 0.5 * step_size * drift
    if tau > 0.0:
        noise = normal_flat(key, theta.shape[0], math.sqrt(step_size * tau))
        out = out + (noise if precond is None else np.sqrt(precond) * noise)
    if not np.all(np.isfinite(out)):
        raise NumericError("langevin_step produced a non-finite position")
    return out


def sghmc_step(theta, p, grad, step_size, friction, noise_estimate=0.0, tau=1.0,
               key: RandomKey = None):
    """Leapfrog-with-friction update (momentum first, then position):

    p' = p - eps g - eps C p + xi,  xi ~ N(0, 2 (C - B) eps tau I)
    theta' = theta + eps p'
    """
    if step_size <= 0:
        raise ValueError("step size must be > 0")
    if friction < noise_estimate or noise_estimate < 0:
        raise ValueError("need C >= B >= 0 (noise variance would be negative)")
    theta = np.asarray(theta, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    var = 2.0 * (friction - noise_estimate) * step_size * tau
    p_new = p - step_size * grad - step_size * friction * p
    if var > 0.0:
        p_new = p_new + normal_flat(key, p.shape[0], math.sqrt(var))
    theta_new = theta + step_size * p_new
    if not (np.all(np.isfinite(theta_new)) and np.all(np.isfinite(p_new))):
        raise NumericError("sghmc_step produced a non-finite state")
    return theta_new, p_new


def reversible_leapfrog_trajectory(theta0, p0, n_steps, step_size, beta, grad_fn,
                                   tau=1.0, key: RandomKey = None):
    """Time-reversible noisy leapfrog over ``n_steps``; returns (theta, p, W).

    Positions live at half steps; each momentum update damps by
    (1-beta)/(1+beta) and injects N(0, 4 beta tau I) noise.  W is the
    trapezoidal work of the (stochastic) gradient force,
    sum_t (eps/2) (p_{t-1} + p_t) . g_t, which telescopes to -dK when
    beta = 0 and the gradients are exact.
    """
    if n_steps < 1:
        raise ValueError("trajectory needs at least one step")
    if not 0.0 <= beta < 1.0:
        raise ValueError("beta must lie in [0, 1)")
    eps = float(step_size)
    theta = np.asarray(theta0, dtype=np.float64) + 0.5 * eps * np.asarray(p0, dtype=np.float64)
    p = np.asarray(p0, dtype=np.float64)
    noise_scale = math.sqrt(4.0 * beta * tau) if beta > 0 and tau > 0 else 0.0
    work = 0.0
    for t in range(n_steps):
        g = np.asarray(grad_fn(theta), dtype=np.float64)
        kick = (1.0 - beta) * p - eps * g
        if noise_scale > 0.0:
            kick = kick + normal_flat(key.child(t), p.shape[0], noise_scale)
        p_new = kick / (1.0 + beta)
        work += 0.5 * eps * float((p + p_new) @ g)
        p = p_new
        theta = theta + (eps if t < n_steps - 1 else 0.5 * eps) * p
    if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(p))):
        raise NumericError("leapfrog trajectory diverged")
    return theta, p, work


def obabo_trajectory(theta0, p0, n_steps, step_size, friction_gamma, grad_fn,
                     tau=1.0, key: RandomKey = None):
    """Symmetric OU / kick / drift / kick / OU splitting; returns (theta, p, W).

    Per step, with a = exp(-gamma eps / 2):
      O: p <- a p + sqrt((1 - a^2) tau) xi
      B: p <- p - (eps/2) g(theta)
      A: theta <- theta + eps p
      B: p <- p - (eps/2) g(theta)
      O: as above
    W accumulates the kinetic-energy drop across each BAB core (equivalently
    the trapezoidal stochastic work, the two coincide exactly), so the
    wrapping solver's exponent U_start - U_end + W is the exact -dH of the
    Metropolized segment when gradients are exact.
    """
    if n_steps < 1:
        raise ValueError("trajectory needs at least one step")
    if friction_gamma < 0:
        raise ValueError("friction must be >= 0")
    eps = float(step_size)
    a = math.exp(-0.5 * friction_gamma * eps)
    ou_scale = math.sqrt(max(0.0, (1.0 - a * a) * tau))
    theta = np.asarray(theta0, dtype=np.float64).copy()
    p = np.asarray(p0, dtype=np.float64).copy()
    dim = p.shape[0]
    work = 0.0

    def ou_half(p_in, subkey):
        out = a * p_in if a < 1.0 else p_in
        if ou_scale > 0.0:
            out = out + normal_flat(subkey, dim, ou_scale)
        return out

    for t in range(n_steps):
        kstep = key.child(t) if key is not None else None
        p = ou_half(p, kstep.child(0) if kstep else None)
        k_in = 0.5 * float(p @ p)
        p = p - 0.5 * eps * np.asarray(grad_fn(theta), dtype=np.float64)
        theta = theta + eps * p
        p = p - 0.5 * eps * np.asarray(grad_fn(theta), dtype=np.float64)
        work += k_in - 0.5 * float(p @ p)
        p = ou_half(p, kstep.child(1) if kstep else None)
    if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(p))):
        raise NumericError("OBABO trajectory diverged")
    return theta, p, work
