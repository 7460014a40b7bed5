import cmath
import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given
from hypothesis import strategies as st

from conftest import polar, rel
from rarefied.ellgamma import (
    GammaEvalOptions,
    elliptic_gamma,
    elliptic_gamma2,
    elliptic_gamma_pm,
    elliptic_gamma_product,
    log_gamma_classical,
    residue_limit_check,
)
from rarefied.errors import PoleError
from rarefied.qseries import principal_sqrt, qpochhammer_inf, theta

FAST = GammaEvalOptions(fast_path=True)


def brute_gamma(z, p, q, n=90):
    j = np.arange(n)
    P, Q = np.meshgrid(p**j, q**j, indexing="ij")
    return complex(np.prod((1 - (p * q / z) * P * Q) / (1 - z * P * Q)))


def brute_gamma2(z, p, q, t, n=45):
    j = np.arange(n)
    P, Q, T = np.meshgrid(p**j, q**j, t**j, indexing="ij")
    return complex(np.prod((1 - z * P * Q * T) * (1 - (p * q * t / z) * P * Q * T)))


def factorized_r1(z, p, q, n=80):
    pq = p * q
    out = 1.0 + 0j
    for j in range(n):
        out *= (1 - (pq) ** (j + 1) / z) / (1 - z * pq**j)
        for k in range(n):
            out *= (1 - pq ** (j + 1) * p ** (k + 1) / z) / (1 - z * pq**j * p ** (k + 1))
            out *= (1 - pq ** (j + 1) * q ** (k + 1) / z) / (1 - z * pq**j * q ** (k + 1))
    return out


class TestEllipticGamma:
    def test_center_is_one(self):
        p, q = 0.2 * cmath.exp(0.4j), 0.15 * cmath.exp(-1.1j)
        assert abs(elliptic_gamma(principal_sqrt(p * q), p, q) - 1) <= 1e-14

    def test_against_deep_product(self):
        assert rel(elliptic_gamma(0.5, 0.1, 0.15), brute_gamma(0.5, 0.1, 0.15)) <= 1e-13

    def test_factorized_representation(self, rng):
        for _ in range(5):
            z, p, q = polar(rng, 0.3, 1.5), polar(rng, 0.05, 0.3), polar(rng, 0.05, 0.3)
            assert rel(elliptic_gamma(z, p, q), factorized_r1(z, p, q)) <= 1e-12

    def test_inversion(self, rng):
        for _ in range(20):
            z, p, q = polar(rng, 0.2, 3), polar(rng, 0.05, 0.3), polar(rng, 0.05, 0.3)
            assert abs(elliptic_gamma(z, p, q) * elliptic_gamma(p * q / z, p, q) - 1) <= 1e-12

    def test_pq_symmetry(self, rng):
        for _ in range(50):
            z, p, q = polar(rng, 0.2, 3), polar(rng, 0.05, 0.3), polar(rng, 0.05, 0.3)
            assert rel(elliptic_gamma(z, p, q), elliptic_gamma(z, q, p)) <= 1e-13

    def test_difference_equations(self, rng):
        for _ in range(20):
            z, p, q = polar(rng, 0.2, 3), polar(rng, 0.05, 0.3), polar(rng, 0.05, 0.3)
            g = elliptic_gamma(z, p, q)
            assert rel(elliptic_gamma(q * z, p, q), theta(z, p) * g) <= 1e-12
            assert rel(elliptic_gamma(p * z, p, q), theta(z, q) * g) <= 1e-12

    def test_fast_path_agrees(self, rng):
        p, q = 0.2 * cmath.exp(0.3j), 0.25 * cmath.exp(2.0j)
        z = np.array([polar(rng, abs(p * q) + 0.06, 0.94) for _ in range(200)])
        assert np.max(np.abs(elliptic_gamma(z, p, q, FAST) / elliptic_gamma(z, p, q) - 1)) <= 1e-11

    def test_vectorized_matches_scalar(self, rng):
        p, q = 0.2, 0.1j
        z = np.array([polar(rng, 0.3, 2) for _ in range(7)])
        vals = elliptic_gamma(z, p, q)
        for zi, v in zip(z, vals):
            assert rel(v, elliptic_gamma(complex(zi), p, q)) <= 1e-15

    @pytest.mark.parametrize("z", [1.0, 0.2 ** -1, 1 / (0.2 * 0.1)])
    def test_pole(self, z):
        with pytest.raises(PoleError):
            elliptic_gamma(z, 0.2, 0.1)

    def test_products(self, rng):
        t, z, p, q = polar(rng, 0.3, 0.8), polar(rng, 0.8, 1.2), 0.2, 0.15
        assert elliptic_gamma_product([], p, q) == 1
        assert rel(elliptic_gamma_pm(t, z, p, q), elliptic_gamma(t * z, p, q) * elliptic_gamma(t / z, p, q)) <= 1e-15
        assert rel(elliptic_gamma_product([t, z], p, q), elliptic_gamma(t, p, q) * elliptic_gamma(z, p, q)) <= 1e-15


class TestEllipticGamma2:
    def test_against_deep_product(self):
        assert rel(elliptic_gamma2(0.4, 0.1, 0.15, 0.2), brute_gamma2(0.4, 0.1, 0.15, 0.2)) <= 1e-13

    def test_difference_equation(self, rng):
        for _ in range(10):
            z = polar(rng, 0.3, 2)
            p, q, t = 0.2 * cmath.exp(0.2j), 0.15, 0.1 * cmath.exp(-1j)
            ratio = elliptic_gamma2(q * z, p, q, t) / elliptic_gamma2(z, p, q, t)
            assert rel(ratio, elliptic_gamma(z, p, t)) <= 1e-12

    def test_inversion(self, rng):
        p, q, t = 0.2, 0.15j, 0.1
        for _ in range(10):
            z = polar(rng, 0.3, 2)
            assert rel(elliptic_gamma2(p * q * t * z, p, q, t), elliptic_gamma2(1 / z, p, q, t)) <= 1e-12


class TestLogGamma:
    def test_values(self):
        assert abs(log_gamma_classical(1.0)) <= 1e-14
        assert abs(log_gamma_classical(0.5) - 0.5 * math.log(math.pi)) <= 1e-14

    def test_against_scipy(self, rng):
        z = np.array([complex(rng.uniform(0.05, 5), rng.uniform(-60, 60)) for _ in range(200)])
        mine = log_gamma_classical(z)
        ref = scipy.special.loggamma(z)
        assert np.max(np.abs(np.exp(mine - ref) - 1)) <= 1e-12

    @given(st.floats(0.05, 10), st.floats(-50, 50))
    def test_functional_equation(self, x, y):
        z = complex(x, y)
        assert abs(cmath.exp(log_gamma_classical(z + 1) - log_gamma_classical(z)) / z - 1) <= 1e-12

    @pytest.mark.parametrize("z", [0.0, -1.0, -3.0])
    def test_pole(self, z):
        with pytest.raises(PoleError):
            log_gamma_classical(z)


class TestResidue:
    def test_limit(self):
        assert abs(residue_limit_check(0.1, 0.2)) <= 1e-4

    def test_symmetric(self):
        # the deviation is a difference of O(1) numbers, so compare absolutely
        assert abs(residue_limit_check(0.1, 0.2) - residue_limit_check(0.2, 0.1)) <= 1e-14

    def test_linear_rate(self):
        d1 = abs(residue_limit_check(0.1, 0.2, h=1e-4))
        d2 = abs(residue_limit_check(0.1, 0.2, h=1e-5))
        assert 8 < d1 / d2 < 12
