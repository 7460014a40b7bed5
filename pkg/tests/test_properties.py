import cmath

from hypothesis import assume, given
from hypothesis import strategies as st

from rarefied.kernels import Kind
from rarefied.qseries import Bases
from rarefied.verify.properties import (
    PROPERTIES,
    factorized_residual,
    h_ellipticity_residual,
    inversion_residual,
    kernel_difference_residual,
    pq_symmetry_residual,
    quasiperiodicity_residual,
    run_properties,
    run_property,
    theta_addition_residual,
)
from rarefied.verify.sampler import SamplerConfig, make_rng, sample_balanced

phase = st.floats(0.0, 2 * cmath.pi)


def cpx(lo, hi):
    return st.builds(cmath.rect, st.floats(lo, hi), phase)


bases = st.builds(Bases, cpx(0.05, 0.3), cpx(0.05, 0.3), st.integers(1, 3))
arg = cpx(0.5, 1.5)


class TestGammaProperties:
    @given(z=arg, m=st.integers(0, 2), k=st.integers(-2, 2), b=st.builds(Bases, cpx(0.05, 0.3), cpx(0.05, 0.3), st.integers(2, 3)))
    def test_quasiperiodicity(self, z, m, k, b):
        assert quasiperiodicity_residual(z, m % b.r, k, b) <= 1e-11

    @given(z=arg, m=st.integers(-3, 3), b=bases)
    def test_inversion(self, z, m, b):
        # the theta form is ill-conditioned next to the pole at z = 1
        assume(abs(z - 1) > 0.05)
        assert inversion_residual(z, m, b) <= 1e-12

    @given(z=arg, m=st.integers(-3, 3), b=bases)
    def test_pq_symmetry(self, z, m, b):
        assert pq_symmetry_residual(z, m, b) <= 1e-12

    @given(z=arg, m=st.integers(0, 3), b=bases)
    def test_factorized(self, z, m, b):
        assert factorized_residual(z, min(m, b.r), b) <= 1e-11


class TestKernelProperties:
    @given(seed=st.integers(0, 2**31), z=cpx(0.7, 1.3), m=st.integers(-2, 2), b=bases, eps=st.integers(0, 1))
    def test_h_ellipticity_and_difference(self, seed, z, m, b, eps):
        # the kernel vanishes at z = +-1, where h has a removable 0/0
        assume(abs(z * z - 1) > 0.05)
        P = sample_balanced(Kind.BETA6, 1, b.r, eps, SamplerConfig(), b, make_rng(SamplerConfig(seed=seed), "h"))
        assert h_ellipticity_residual(z, m, P, b) <= 1e-10
        assert kernel_difference_residual(z, m, P, b) <= 1e-10

    @given(x=cpx(0.5, 2.0), y=cpx(0.5, 2.0), w=cpx(0.5, 2.0), z=cpx(0.5, 2.0), p=cpx(0.0, 0.5))
    def test_theta_addition(self, x, y, w, z, p):
        # coincident arguments make every term vanish and leave only roundoff
        pts = [v for a in (x, y, w, z) for v in (a, 1 / a)]
        assume(min(abs(a - c) for i, a in enumerate(pts) for c in pts[i + 1 :]) > 0.05)
        assert theta_addition_residual(x, y, w, z, p) <= 1e-12


class TestRunner:
    def test_suite_passes(self):
        results = run_properties(samples=50)
        assert [r.name for r in results] == [p.name for p in PROPERTIES]
        assert all(r.passed and r.samples == 50 for r in results), [(r.name, r.worst) for r in results if not r.passed]

    def test_deterministic(self):
        a = run_property(PROPERTIES[0], samples=5, seed=3)
        b = run_property(PROPERTIES[0], samples=5, seed=3)
        assert a.residuals == b.residuals
