import math

import numpy as np
import pytest

from sgmc.core import RandomKey
from sgmc.errors import ConfigurationError
from sgmc.scheduler import (DualAveragingState, dual_averaging_step,
                            init_scheduler, polynomial_schedule,
                            random_thinning_plan, scheduler_next)



class TestPolynomialSchedule:
    def test_endpoints_exact(self):
        sched = polynomial_schedule(0.05, 0.001, 0.33, 10000)
        assert abs(sched(0) - 0.05) < 1e-12
        assert abs(sched(10000) - 0.001) < 1e-12

    def test_strictly_decreasing(self):
        values = polynomial_schedule(0.05, 0.001, 0.33, 10000).values(10001)
        assert np.all(np.diff(values) < 0)

    def test_midpoint_against_closed_form(self):
        first, last, gamma, n = 0.05, 0.001, 0.33, 10000
        sched = polynomial_schedule(first, last, gamma, n)
        # independent evaluation of eps_t = a (b + t)^(-gamma)
        b = n / ((first / last) ** (1.0 / gamma) - 1.0)
        a = first * b**gamma
        assert sched(5000) == pytest.approx(a * (b + 5000) ** (-gamma), rel=1e-14)

    def test_ordering_validated(self):
        with pytest.raises(ValueError):
            polynomial_schedule(0.001, 0.05, 0.33, 100)
        with pytest.raises(ValueError):
            polynomial_schedule(0.05, 0.001, 1.5, 100)


class TestDualAveraging:
    def test_on_target_is_fixed_point(self):
        state = DualAveragingState.init(0.1, delta=0.65)
        for _ in range(50):
            state = dual_averaging_step(state, 0.65)
        assert state.h_bar == 0.0
        assert state.eps == pytest.approx(math.exp(state.mu))

    def test_zero_acceptance_shrinks_step(self):
        state = DualAveragingState.init(0.1, delta=0.65)
        sizes = []
        for _ in range(30):
            state = dual_averaging_step(state, 0.0)
            sizes.append(state.eps)
        assert all(b < a for a, b in zip(sizes, sizes[1:]))

    def test_probability_domain(self):
        state = DualAveragingState.init(0.1)
        with pytest.raises(ValueError):
            dual_averaging_step(state, 1.2)

    def test_averaged_iterate_settles(self):
        # i.i.d. feedback around the target: averaged step size goes Cauchy
        state = DualAveragingState.init(1e-3, delta=0.65)
        rng = RandomKey(40).generator()
        tail = []
        n = 20000
        for m in range(n):
            state = dual_averaging_step(state, float(rng.beta(65, 35)))
            if m >= int(0.9 * n):
                tail.append(state.eps_avg)
        assert max(tail) - min(tail) < 1e-3
        assert (max(tail) - min(tail)) / state.eps_avg < 0.2


class TestThinningPlan:
    def test_counts_and_range(self):
        eps = polynomial_schedule(0.05, 0.001, 0.33, 10000)
        plan = random_thinning_plan(eps, 2000, 1000, 10000, RandomKey(4))
        assert len(plan) == 1000
        assert min(plan) >= 2000 and max(plan) < 10000

    def test_all_eligible_kept(self):
        plan = random_thinning_plan(np.ones(10), 4, 6, 10, RandomKey(4))
        assert plan == frozenset(range(4, 10))

    def test_infeasible(self):
        with pytest.raises(ValueError):
            random_thinning_plan(np.ones(10), 4, 7, 10, RandomKey(4))

    def test_uniform_inclusion_for_constant_step(self):
        counts = np.zeros(80)
        key = RandomKey(123)
        for i in range(10000):
            plan = random_thinning_plan(np.ones(100), 20, 20, 100, key.child(i))
            for t in plan:
                counts[t - 20] += 1
        expected = 10000 * 20 / 80
        stat = ((counts - expected) ** 2 / expected).sum()
        # chi-square with 79 dof, 99th percentile ~= 111.1
        assert stat < 111.1

    def test_inclusion_tracks_step_size(self):
        # weights 9:1 -> inclusion frequencies near 9:1 for small selections
        eps = np.concatenate([np.full(50, 0.9), np.full(50, 0.1)])
        hot = cold = 0
        key = RandomKey(9)
        for i in range(4000):
            plan = random_thinning_plan(eps, 0, 5, 100, key.child(i))
            hot += sum(1 for t in plan if t < 50)
            cold += sum(1 for t in plan if t >= 50)
        assert hot / (hot + cold) > 0.8


class TestSchedulerNext:
    def test_static_bundle(self):
        state = init_scheduler(10, step_size=polynomial_schedule(0.1, 0.01, 0.5, 10),
                               burn_in=3, selections=4, temperature=2.0,
                               key=RandomKey(0))
        items = []
        for _ in range(10):
            item, state = scheduler_next(state)
            items.append(item)
        assert all(i.temperature == 2.0 for i in items)
        assert all(not (i.keep and i.burn_in) for i in items)
        assert sum(i.keep for i in items) == 4
        assert [i.burn_in for i in items[:3]] == [True] * 3
        with pytest.raises(ValueError, match="exhausted"):
            scheduler_next(state)

    def test_burn_in_blocks_keep(self):
        state = init_scheduler(5, step_size=0.1, burn_in=5, key=RandomKey(1))
        for _ in range(5):
            item, state = scheduler_next(state)
            assert item.burn_in and not item.keep

    def test_replay_is_identical(self):
        def run():
            state = init_scheduler(50, step_size=polynomial_schedule(0.1, 0.01, 0.5, 50),
                                   burn_in=10, selections=20, key=RandomKey(7))
            out = []
            for _ in range(50):
                item, state = scheduler_next(state)
                out.append(item)
            return out

        assert run() == run()

    def test_adaptive_uses_feedback_then_freezes(self):
        class Feedback:
            def __init__(self, proposals, alpha):
                self.proposals = proposals
                self.last_alpha = alpha

        adaptive = DualAveragingState.init(0.1, delta=0.65)
        state = init_scheduler(100, adaptive=adaptive, burn_in=50)
        item0, state = scheduler_next(state, Feedback(0, None))
        assert item0.step_size == pytest.approx(0.1)
        for t in range(1, 50):
            item, state = scheduler_next(state, Feedback(t, 0.0))
        assert item.step_size < 0.1  # persistent rejects shrink epsilon
        frozen, state = scheduler_next(state, Feedback(50, 0.0))
        follow, state = scheduler_next(state, Feedback(51, 0.0))
        assert frozen.step_size == follow.step_size  # averaged iterate after burn-in

    def test_selections_need_key(self):
        with pytest.raises(ConfigurationError):
            init_scheduler(10, step_size=0.1, selections=2)
