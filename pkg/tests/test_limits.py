import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tubehomog import (Coupled, DecoupledThreshold, InsufficientBase, Pencil, PencilParams, ScaledLaplacian, Spectrum,
                       box_dirichlet_spectrum, branch_root, eigenvalue_limit, homogenized_spectrum,
                       threshold_index)
from tubehomog.pencil import hard_branch, interval_bounds

PI2 = math.pi**2
UNIT = box_dirichlet_spectrum([1, 1], 60)
SQ3 = box_dirichlet_spectrum([3, 3], 60)


class TestThresholdIndex:
    def test_three_by_three(self):
        # 2, 5, 5, 8 (x pi^2 / 9) lie below pi^2, each doubled
        assert threshold_index(SQ3, 1.0) == 8

    def test_unit_square_empty(self):
        assert threshold_index(UNIT, 1.0) == 0

    def test_strict_inequality(self):
        base = Spectrum([PI2 / 2, PI2, 2 * PI2], [1, 1, 1])
        assert threshold_index(base, 1.0) == 2

    def test_short_base_rejected(self):
        with pytest.raises(InsufficientBase):
            threshold_index(box_dirichlet_spectrum([3, 3], 3), 1.0)


class TestEigenvalueLimit:
    def test_threshold_for_large_m(self):
        for m in range(9, 29):
            res = eigenvalue_limit(DecoupledThreshold(q=1.0), SQ3, m)
            assert res.limit_value == PI2
            assert res.kind == "threshold"

    def test_discrete_below_threshold(self):
        res = eigenvalue_limit(DecoupledThreshold(q=1.0), SQ3, 3)
        assert res.limit_value == pytest.approx(5 * PI2 / 9, rel=1e-14)
        assert res.kind == "discrete eigenvalue"
        # doubled: m = 1, 2 both give the ground value
        assert eigenvalue_limit(DecoupledThreshold(q=1.0), SQ3, 2).limit_value == pytest.approx(2 * PI2 / 9)

    def test_pencil_first(self):
        res = eigenvalue_limit(Pencil(p=1.0, q=1.0, omega=2 * math.pi), UNIT, 1)
        assert res.limit_value == pytest.approx(3.538354994313674589, rel=1e-13)

    def test_pencil_agrees_with_spectrum_head(self):
        prob = Pencil(p=0.5, q=1.0, omega=2 * math.pi)
        spec = homogenized_spectrum(prob, UNIT, 60, n_max=1).expanded()
        for m in range(1, 11):
            assert eigenvalue_limit(prob, UNIT, m).limit_value == pytest.approx(spec[m - 1], rel=1e-12)

    def test_pencil_soft_branch_enters_head(self):
        # tiny q makes J_1 wide, so the cot branch contributes below the tan roots
        prob = Pencil(p=1.0, q=0.2, omega=2 * math.pi)
        vals = [eigenvalue_limit(prob, UNIT, m).limit_value for m in range(1, 8)]
        assert vals == sorted(vals)
        assert all(0 < v < (math.pi / 0.2) ** 2 for v in vals)

    def test_coupled_and_scaled(self):
        assert eigenvalue_limit(Coupled(V=0.0), UNIT, 2).limit_value == pytest.approx(2 * PI2)
        assert eigenvalue_limit(ScaledLaplacian(c=0.5), UNIT, 1).limit_value == pytest.approx(PI2)

    def test_bad_m(self):
        with pytest.raises(ValueError):
            eigenvalue_limit(Coupled(V=1.0), UNIT, 0)

    def test_base_too_short(self):
        with pytest.raises(InsufficientBase):
            eigenvalue_limit(Coupled(V=1.0), box_dirichlet_spectrum([1, 1], 2), 5)


@settings(max_examples=40, deadline=None)
@given(side=st.floats(1.5, 5.0), q=st.floats(0.5, 2.0), extra=st.integers(1, 20))
def test_threshold_constancy(side, q, extra):
    base = box_dirichlet_spectrum([side, side], 400)
    try:
        M = threshold_index(base, q)
    except InsufficientBase:
        return
    res = eigenvalue_limit(DecoupledThreshold(q=q), base, M + extra)
    assert res.limit_value == (math.pi / q) ** 2 and res.kind == "threshold"
    if M:
        below = eigenvalue_limit(DecoupledThreshold(q=q), base, M)
        assert below.limit_value < (math.pi / q) ** 2 and below.kind == "discrete eigenvalue"


class TestHomogenizedSpectrum:
    def test_coupled_merge(self):
        s = homogenized_spectrum(Coupled(V=math.pi), UNIT, 6)
        expected = np.sort(np.concatenate([UNIT.expanded()[:6], UNIT.expanded()[:6] + 2 * math.pi]))[:6]
        np.testing.assert_allclose(s.expanded(), expected, rtol=1e-14)
        assert "plus2V" in s.tags
        assert s.total_multiplicity == 6

    def test_coupled_zero_doubles(self):
        s = homogenized_spectrum(Coupled(V=0.0), UNIT, 10)
        np.testing.assert_allclose(s.expanded(), np.repeat(UNIT.expanded()[:5], 2), rtol=1e-15)
        np.testing.assert_allclose(s.expanded(), UNIT.with_multiplicity_factor(2).truncated(10).expanded())

    @settings(max_examples=40, deadline=None)
    @given(V=st.floats(0, 100), count=st.integers(1, 40))
    def test_coupled_is_union_of_shift(self, V, count):
        s = homogenized_spectrum(Coupled(V=V), UNIT, count)
        expected = np.sort(np.concatenate([UNIT.expanded()[:count], UNIT.expanded()[:count] + 2 * V]))[:count]
        np.testing.assert_allclose(s.expanded(), expected, rtol=1e-12)

    def test_scaled(self):
        c = 1 / (1 + math.pi)
        s = homogenized_spectrum(ScaledLaplacian(c=c), UNIT, 5)
        np.testing.assert_allclose(s.expanded(), UNIT.expanded()[:5] * c, rtol=1e-15)
        assert set(s.tags) == {"scaled"}

    def test_decoupled_accumulation(self):
        s = homogenized_spectrum(DecoupledThreshold(q=2.0), UNIT, 10, n_max=4)
        np.testing.assert_allclose(s.accumulation_points, [(math.pi * n / 2) ** 2 for n in range(1, 5)], rtol=1e-15)
        np.testing.assert_allclose(s.expanded(), UNIT.with_multiplicity_factor(2).truncated(10).expanded())

    def test_decoupled_drops_value_on_threshold(self):
        base = Spectrum([PI2 / 2, PI2], [1, 1])
        s = homogenized_spectrum(DecoupledThreshold(q=1.0), base, 4)
        assert list(s.values) == [PI2 / 2]
        assert PI2 in list(s.accumulation_points)

    def test_pencil_accumulation_and_content(self):
        prob = Pencil(p=1.0, q=1.0, omega=2 * math.pi)
        s = homogenized_spectrum(prob, UNIT, 20, n_max=3)
        np.testing.assert_allclose(s.accumulation_points, [PI2, 4 * PI2, 9 * PI2])
        for v in s.values:
            assert not np.any(np.isclose(v, s.accumulation_points, rtol=1e-12))

    def test_pencil_hausdorff_gap(self):
        base = box_dirichlet_spectrum([1, 1], 4000)
        prob = Pencil(p=1.0, q=1.0, omega=2 * math.pi)
        s = homogenized_spectrum(prob, base, 4000, n_max=3)
        for n in (1, 2, 3):
            lo, hi = interval_bounds(n, 1.0)
            inside = s.values[(s.values > lo) & (s.values < hi)]
            assert hi - inside.max() < 1e-2 * (hi - lo)
        # the gap closes as mu grows
        params = PencilParams(prob.p, prob.q, prob.omega)
        for n, mu in ((1, 1e7), (2, 1e8), (3, 1e9)):
            lo, hi = interval_bounds(n, 1.0)
            lam = branch_root(hard_branch(n), n, mu, params)
            assert hi - lam < 1e-3 * (hi - lo)

    def test_negative_count(self):
        with pytest.raises(ValueError):
            homogenized_spectrum(Coupled(V=0.0), UNIT, -1)
