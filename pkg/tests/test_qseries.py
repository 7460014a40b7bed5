import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import polar, rel
from rarefied.errors import InvalidBaseError, TruncationExhaustedError, ZeroArgumentError
from rarefied.qseries import (
    Bases,
    Truncation,
    elliptic_pochhammer,
    principal_sqrt,
    qpochhammer_inf,
    theta,
    theta_pm,
    theta_product,
)

mods = st.floats(0.5, 2.0)
phases = st.floats(0.0, 2 * math.pi)


def cx(m, ph):
    return m * complex(math.cos(ph), math.sin(ph))


def brute_qp(z, p, terms):
    out = 1.0 + 0j
    for j in range(terms):
        out *= 1 - z * p**j
    return out


class TestQPochhammer:
    def test_trivial_values(self):
        assert qpochhammer_inf(0, 0.3) == 1
        assert qpochhammer_inf(1, 0.3) == 0

    def test_against_deep_product(self):
        assert rel(qpochhammer_inf(0.5, 0.2), brute_qp(0.5, 0.2, 200)) <= 1e-14

    def test_against_mpmath(self):
        z, p = 0.4 + 0.3j, 0.25 * np.exp(0.7j)
        ref = complex(mpmath.qp(mpmath.mpc(z), mpmath.mpc(p)))
        assert rel(qpochhammer_inf(z, p), ref) <= 1e-14

    def test_split(self, rng):
        for _ in range(20):
            z, p = polar(rng, 0.1, 3.0), polar(rng, 0.05, 0.5)
            assert rel(qpochhammer_inf(z, p), (1 - z) * qpochhammer_inf(z * p, p)) <= 1e-13

    def test_vectorized(self):
        z = np.array([0.1, 0.2 + 0.1j, 2.0])
        vals = qpochhammer_inf(z, 0.3)
        assert vals.shape == (3,)
        assert all(rel(v, qpochhammer_inf(complex(x), 0.3)) == 0 for v, x in zip(vals, z))

    def test_invalid_base(self):
        with pytest.raises(InvalidBaseError):
            qpochhammer_inf(0.5, 1.0)

    def test_truncation_exhausted(self):
        with pytest.raises(TruncationExhaustedError):
            qpochhammer_inf(0.5, 0.99, Truncation(max_terms=10))


class TestTheta:
    def test_zero_at_one(self):
        assert theta(1.0, 0.3) == 0

    def test_zero_argument(self):
        with pytest.raises(ZeroArgumentError):
            theta(0.0, 0.3)

    @given(mods, phases, st.floats(0.05, 0.5), phases)
    def test_inversion_symmetry(self, m, ph, pm, pph):
        x, p = cx(m, ph), cx(pm, pph)
        lhs, r2 = theta(1 / x, p), -theta(x, p) / x
        # x may land on a zero p^k of theta; the floor covers that case
        assert abs(lhs - r2) <= 1e-12 * max(abs(lhs), abs(r2)) + 1e-15

    @given(mods, phases, st.floats(0.05, 0.5), phases)
    def test_p_shift(self, m, ph, pm, pph):
        # theta(pz; p) = theta(1/z; p) = -theta(z; p)/z
        z, p = cx(m, ph), cx(pm, pph)
        a, b = theta(p * z, p), -theta(z, p) / z
        assert abs(a - b) <= 1e-12 * max(abs(a), abs(b)) + 1e-15

    @pytest.mark.parametrize("k", [-2, -1, 0, 1, 2])
    def test_quasiperiodicity(self, k, rng):
        for _ in range(10):
            z, p = polar(rng, 0.5, 2.0), polar(rng, 0.05, 0.4)
            lhs = theta(p**k * z, p)
            rhs = (-z) ** (-k) * p ** (-k * (k - 1) // 2) * theta(z, p)
            assert rel(lhs, rhs) <= 1e-12

    def test_reflection(self, rng):
        for _ in range(20):
            z, p = polar(rng, 0.5, 2.0), polar(rng, 0.05, 0.5)
            assert rel(theta(z, p), theta(p / z, p)) <= 1e-12

    def test_product_conventions(self, rng):
        assert theta_product([], 0.3) == 1
        t, x, p = polar(rng, 0.5, 2), polar(rng, 0.5, 2), polar(rng, 0.05, 0.4)
        assert rel(theta_pm(t, x, p), theta(t * x, p) * theta(t / x, p)) <= 1e-15
        assert rel(theta_product([t, x], p), theta(t, p) * theta(x, p)) == 0


class TestEllipticPochhammer:
    def test_zero_length(self):
        assert elliptic_pochhammer(0.7, 0, 0.2, 0.3) == 1

    def test_two(self):
        x, p, q = 0.7 + 0.1j, 0.2, 0.3j
        assert rel(elliptic_pochhammer(x, 2, p, q), theta(x, p) * theta(x * q, p)) <= 1e-15

    def test_negative_is_inverse(self):
        x, p, q = 0.7 + 0.1j, 0.2, 0.3j
        assert rel(elliptic_pochhammer(x, -2, p, q) * elliptic_pochhammer(x / q**2, 2, p, q), 1.0) <= 1e-13


class TestBases:
    def test_cached_values(self):
        b = Bases(0.2 * np.exp(0.3j), 0.1, 3)
        assert rel(b.pr, b.p**3) <= 1e-15 and rel(b.qr, b.q**3) <= 1e-15 and rel(b.pq, b.p * b.q) <= 1e-15
        assert rel(b.sqrt_pq**2, b.pq) <= 1e-15 and b.sqrt_pq.real >= 0

    @pytest.mark.parametrize("p,q,r", [(1.0, 0.2, 1), (0.2, 0.0, 1), (0.2, 0.1, 0)])
    def test_invalid(self, p, q, r):
        with pytest.raises(ValueError):
            Bases(p, q, r)

    def test_swapped(self):
        b = Bases(0.2, 0.1j, 2)
        s = b.swapped()
        assert (s.p, s.q, s.r) == (b.q, b.p, 2)

    def test_principal_sqrt_branch(self):
        assert principal_sqrt(-4) == 2j
        assert principal_sqrt(4) == 2
        assert principal_sqrt(-1 - 1e-300j).real >= 0
