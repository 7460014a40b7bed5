import math

import numpy as np
import pytest

from rarefied.errors import ConvergenceError, NonDecayError
from rarefied.quadrature import (
    GridSpec,
    pairwise_sum,
    refine,
    roots_of_unity,
    torus_integral,
    torus_integral_2d,
    vertical_line_integral,
)


class TestGridSpec:
    @pytest.mark.parametrize("n", [4, 12, 33])
    def test_rejects_bad_sizes(self, n):
        with pytest.raises(ValueError):
            GridSpec(n)

    def test_rejects_bad_fields(self):
        with pytest.raises(ValueError):
            GridSpec(16, rank=3)
        with pytest.raises(ValueError):
            GridSpec(16, refine_limit=0)
        with pytest.raises(ValueError):
            GridSpec(16, target_rel=0.0)

    def test_with_rank(self):
        g = GridSpec(64, target_rel=1e-9).with_rank(2)
        assert (g.points_per_dim, g.rank, g.target_rel) == (64, 2, 1e-9)


class TestTorus:
    def test_roots(self):
        w = roots_of_unity(16)
        assert np.allclose(w**16, 1) and abs(w.sum()) < 1e-14

    def test_pairwise_sum_deterministic(self):
        v = np.arange(7) + 1j
        assert pairwise_sum(v) == pairwise_sum(v.copy())
        assert abs(pairwise_sum(v) - v.sum()) < 1e-13
        assert pairwise_sum(np.array([])) == 0

    def test_constant_term(self):
        a = 0.4
        res = torus_integral(lambda z: 1 / ((1 - a * z) * (1 - a / z)))
        assert abs(res.value - 1 / (1 - a * a)) < 1e-14

    def test_separable_2d(self):
        a, c = 0.3, 0.5
        f1 = lambda z: 1 / ((1 - a * z) * (1 - a / z))
        f2 = lambda z: 1 / ((1 - c * z) * (1 - c / z))
        res = torus_integral_2d(lambda z1, z2: f1(z1) * f2(z2) * (1 + z1 / z2))
        assert abs(res.value - 1 / ((1 - a * a) * (1 - c * c)) * (1 + a * c)) < 1e-13

    def test_refinement_history(self):
        res = torus_integral(lambda z: np.exp(z + 1 / z), GridSpec(8))
        assert res.history[0][0] == 8 and res.grid_used >= 16
        # I_0(2)
        assert abs(res.value - 2.2795853023360673) < 1e-13

    def test_non_finite(self):
        with pytest.raises(ConvergenceError):
            refine(lambda n: complex("nan"), GridSpec(8))

    def test_not_settling(self):
        with pytest.raises(ConvergenceError):
            refine(lambda n: complex(n), GridSpec(8, refine_limit=2))

    def test_exact_zero(self):
        assert refine(lambda n: 0j, GridSpec(8)).value == 0


class TestVerticalLine:
    def test_gaussian(self):
        # (1/2 pi) ∫ exp(-y^2) dy = 1 / (2 sqrt(pi))
        res = vertical_line_integral(lambda x: np.exp(x * x), height_cut=10.0)
        assert abs(res.value - 1 / (2 * math.sqrt(math.pi))) < 1e-13

    def test_non_decay(self):
        with pytest.raises(NonDecayError):
            vertical_line_integral(lambda x: 1 / (1 - x * x), height_cut=10.0)
