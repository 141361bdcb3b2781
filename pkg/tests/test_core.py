import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgmc.core import (ParameterVector, RandomKey, flatten, gaussian_like,
                       layout_size, make_layout, split, structure)
from sgmc.errors import LayoutError

from conftest import CHI2_99


def layouts():
    shapes = st.one_of(
        st.just(()),
        st.tuples(st.integers(1, 4)),
        st.tuples(st.integers(1, 3), st.integers(1, 3)),
    )
    return st.dictionaries(
        st.text("abcdefgh", min_size=1, max_size=4), shapes, min_size=1, max_size=4
    ).map(make_layout)


class TestParameterVector:
    def test_declared_ordering(self):
        pv = ParameterVector.from_named({"w": [1.0, 2.0], "log_sigma": 0.5})
        assert np.array_equal(flatten(pv), [1.0, 2.0, 0.5])

    def test_structure_wrong_length(self, tiny_pv):
        with pytest.raises(LayoutError):
            structure(tiny_pv.layout, np.zeros(4))

    def test_named_view(self, tiny_pv):
        named = tiny_pv.to_named()
        assert named["w"].shape == (2,)
        assert named["log_sigma"].shape == ()
        assert float(named["log_sigma"]) == 0.5

    def test_arithmetic_layout_mismatch(self, tiny_pv):
        other = ParameterVector.from_named({"w": [1.0, 2.0, 3.0]})
        with pytest.raises(LayoutError):
            tiny_pv + other

    @given(layouts(), st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_roundtrip(self, layout, seed):
        vec = RandomKey(seed).generator().standard_normal(layout_size(layout))
        pv = structure(layout, vec)
        assert structure(layout, flatten(pv)) == pv
        assert np.array_equal(flatten(pv), vec)

    @given(layouts(), st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_arithmetic_commutes_with_flatten(self, layout, seed):
        k1, k2 = split(RandomKey(seed), 2)
        a = gaussian_like(k1, layout, 1.0)
        b = gaussian_like(k2, layout, 1.0)
        assert np.array_equal(flatten(a + b), flatten(a) + flatten(b))
        assert np.array_equal(flatten(a * 2.5), flatten(a) * 2.5)
        assert np.array_equal(flatten(a * b), flatten(a) * flatten(b))
        assert (a + b).layout == layout


class TestGaussianLike:
    def test_zero_scale_exact_zeros(self, tiny_pv):
        out = gaussian_like(RandomKey(7), tiny_pv.layout, 0.0)
        assert np.array_equal(out.values, np.zeros(3))

    def test_negative_scale(self, tiny_pv):
        with pytest.raises(ValueError):
            gaussian_like(RandomKey(7), tiny_pv.layout, -1.0)

    def test_same_key_same_draw(self, tiny_pv):
        key = RandomKey(123, (4, 5))
        a = gaussian_like(key, tiny_pv.layout, 2.0)
        b = gaussian_like(key, tiny_pv.layout, 2.0)
        assert a == b

    def test_unit_variance_monte_carlo(self):
        # 10^6 draws: sample variance within 0.01 of 1
        layout = make_layout({"x": (1000000,)})
        draws = gaussian_like(RandomKey(2024), layout, 1.0)
        assert abs(draws.values.var() - 1.0) < 0.01


class TestSplit:
    def test_zero_count(self):
        with pytest.raises(ValueError):
            split(RandomKey(1), 0)

    def test_deterministic(self):
        a = split(RandomKey(9, (1,)), 2)
        b = split(RandomKey(9, (1,)), 2)
        assert a == b

    def test_consuming_does_not_mutate(self):
        key = RandomKey(5)
        before = (key.seed, key.path)
        gaussian_like(key, make_layout({"x": (3,)}), 1.0)
        split(key, 4)
        assert (key.seed, key.path) == before

    def test_children_distinct_and_streams_collision_free(self):
        # distinct (parent, child) pairs never produce equal first draws
        seen = set()
        for parent in range(1000):
            for child in split(RandomKey(parent), 100):
                seen.add(int(child.generator().integers(0, 2**63)))
        assert len(seen) == 100000

    def test_sibling_independence_chi_square(self):
        k1, k2 = split(RandomKey(77), 2)
        n = 4096
        x = k1.generator().standard_normal(n)
        y = k2.generator().standard_normal(n)
        # 4x4 contingency table over quartile bins
        qx = np.searchsorted(np.quantile(x, [0.25, 0.5, 0.75]), x)
        qy = np.searchsorted(np.quantile(y, [0.25, 0.5, 0.75]), y)
        table = np.zeros((4, 4))
        np.add.at(table, (qx, qy), 1)
        expected = table.sum(axis=1, keepdims=True) * table.sum(axis=0) / n
        stat = ((table - expected) ** 2 / expected).sum()
        assert stat < CHI2_99[9]  # independence not rejected at the 1% level
