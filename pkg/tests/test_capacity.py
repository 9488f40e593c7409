from __future__ import annotations

import math

import numpy as np
import pytest

from pluripot.capacity import alexander_capacity, alexander_sup
from pluripot.extremal import LOG2_HALF


class TestAlexanderSup:
    def test_one_variable(self):
        result = alexander_sup(1)
        assert result.converged
        assert result.sup_value == pytest.approx(LOG2_HALF, abs=1e-8)
        if result.chart == "affine":
            # maximizers polish onto 1 + z^2 = 0, i.e. z = +-i
            assert abs(1.0 + np.sum(result.argmax**2)) < 1e-6

    def test_three_variables(self):
        result = alexander_sup(3)
        assert result.sup_value == pytest.approx(LOG2_HALF, abs=1e-8)

    def test_n_independence(self):
        sups = [alexander_sup(n).sup_value for n in range(1, 7)]
        assert max(sups) - min(sups) < 1e-10

    def test_sup_within_bounds(self):
        result = alexander_sup(2)
        assert 0.0 <= result.sup_value <= LOG2_HALF + 1e-9

    def test_invalid_dimension(self):
        with pytest.raises(ValueError):
            alexander_sup(0)


class TestAlexanderCapacity:
    def test_inverse_root_two(self):
        for n in (1, 4):
            assert alexander_capacity(n) == pytest.approx(1 / math.sqrt(2), abs=1e-8)

    def test_capacity_at_most_one(self):
        assert alexander_capacity(2) <= 1.0


class TestChartCompatibility:
    def test_affine_approaches_infinity_chart(self, rng):
        # far out along a ray the two chart formulas agree
        from pluripot.extremal import omega_extremal
        for _ in range(25):
            w = rng.normal(size=3) + 1j * rng.normal(size=3)
            w /= np.linalg.norm(w)
            z = 1e6 * w
            gap = abs(omega_extremal("affine", z) - omega_extremal("infinity", z))
            assert gap < 1e-6
