"""Property suites: functional equations checked at many seeded random points.

Each property is a residual function of one random draw plus a tolerance.
:func:`run_property` evaluates it on ``samples`` draws and records the worst
residual; :func:`run_properties` runs the whole suite.  The same residual
functions are driven by hypothesis in the test-suite.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..kernels import BalancedParams, Kind, LatticePoint, h_coefficients, kernel_beta
from ..qseries import Bases, theta
from ..rargamma import gamma_rarefied, gamma_rarefied_factorized, inverse_pair, normalization_prefactor, gamma_lens, quasiperiod_factor
from .sampler import SamplerConfig, _phase, make_rng, sample_balanced


def rel(a, b) -> float:
    a, b = complex(a), complex(b)
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0


def _bases(rng, r=None) -> Bases:
    r = int(rng.integers(1, 4)) if r is None else r
    return Bases(rng.uniform(0.05, 0.3) * _phase(rng), rng.uniform(0.05, 0.3) * _phase(rng), r)


def _z(rng, lo=0.5, hi=1.5) -> complex:
    return rng.uniform(lo, hi) * _phase(rng)


# --------------------------------------------------------------------------
# residuals (each takes explicit arguments so that hypothesis can drive them)


def quasiperiodicity_residual(z: complex, m: int, k: int, b: Bases) -> float:
    """Closed-form multiplier against Gamma(z, m + k r) / Gamma(z, m), both through the lens route."""
    direct = gamma_rarefied(z, m + k * b.r, b, method="lens") / gamma_rarefied(z, m, b, method="lens")
    return rel(direct, quasiperiod_factor(z, m, k, b))


def inversion_residual(z: complex, m: int, b: Bases) -> float:
    """Gamma(z, m) Gamma(pq/z, -m) = 1, plus the theta form of 1/(Gamma(z, m) Gamma(1/z, -m))."""
    one = gamma_rarefied(z, m, b) * gamma_rarefied(b.pq / z, -m, b)
    pair = gamma_rarefied(z, m, b) * gamma_rarefied(1 / z, -m, b) * inverse_pair(z, m, b)
    return max(abs(one - 1), abs(pair - 1))


def pq_symmetry_residual(z: complex, m: int, b: Bases) -> float:
    """Gamma(z, m; p, q) = Gamma(z, -m; q, p)."""
    return rel(gamma_rarefied(z, m, b), gamma_rarefied(z, -m, b.swapped()))


def factorized_residual(z: complex, m: int, b: Bases) -> float:
    """Factorized product over bases (p^r, q^r) against the lens route for 0 <= m <= r."""
    return rel(gamma_rarefied_factorized(z, m, b), normalization_prefactor(z, m, b) * gamma_lens(z, m, b))


def h_ellipticity_residual(z: complex, m: int, P: BalancedParams, b: Bases) -> float:
    """h1 is q^r-periodic and h2 is p^r-periodic in z under balancing."""
    h1, h2 = h_coefficients(z, m, P, b)
    h1s, _ = h_coefficients(b.qr * z, m, P, b)
    _, h2s = h_coefficients(b.pr * z, m, P, b)
    return max(rel(h1, h1s), rel(h2, h2s))


def kernel_difference_residual(z: complex, m: int, P: BalancedParams, b: Bases) -> float:
    """Delta(p^r z, m)/Delta(z, m) = prod_k h1(p^k z, m-k), and the q^r partner with h2."""
    K = lambda x, mm: kernel_beta(LatticePoint((x,), (mm,)), P, b, validate=False)
    base = K(z, m)
    prod1 = prod2 = 1.0 + 0j
    for k in range(b.r):
        prod1 *= h_coefficients(b.p**k * z, m - k, P, b)[0]
        prod2 *= h_coefficients(b.q**k * z, m + k, P, b)[1]
    return max(rel(K(b.pr * z, m) / base, prod1), rel(K(b.qr * z, m) / base, prod2))


def theta_addition_residual(x, y, w, z, p) -> float:
    """theta(x w^+-, y z^+-) - theta(x z^+-, y w^+-) - y/w theta(x y^+-, w z^+-), relative to the largest term."""
    th = lambda a, c: theta(a * c, p) * theta(a / c, p)
    t1 = th(x, w) * th(y, z)
    t2 = th(x, z) * th(y, w)
    t3 = y / w * th(x, y) * th(w, z)
    scale = max(abs(t1), abs(t2), abs(t3))
    return abs(t1 - t2 - t3) / scale if scale else 0.0


# --------------------------------------------------------------------------
# random drivers


def _draw_quasi(rng):
    b = _bases(rng, int(rng.integers(2, 4)))
    return quasiperiodicity_residual(_z(rng), int(rng.integers(0, b.r)), int(rng.integers(-2, 3)), b)


def _draw_inversion(rng):
    b = _bases(rng)
    return inversion_residual(_z(rng), int(rng.integers(-3, 4)), b)


def _draw_sym(rng):
    b = _bases(rng)
    return pq_symmetry_residual(_z(rng), int(rng.integers(-3, 4)), b)


def _draw_factorized(rng):
    b = _bases(rng)
    return factorized_residual(_z(rng), int(rng.integers(0, b.r + 1)), b)


def _beta_draw(rng):
    b = _bases(rng)
    P = sample_balanced(Kind.BETA6, 1, b.r, int(rng.integers(0, 2)), SamplerConfig(), b, rng)
    return P, b


def _draw_h(rng):
    P, b = _beta_draw(rng)
    return h_ellipticity_residual(_z(rng, 0.7, 1.3), int(rng.integers(-2, 3)), P, b)


def _draw_diff(rng):
    P, b = _beta_draw(rng)
    return kernel_difference_residual(_z(rng, 0.7, 1.3), int(rng.integers(-2, 3)), P, b)


def _draw_addition(rng):
    x, y, w, z = (_z(rng, 0.5, 2.0) for _ in range(4))
    return theta_addition_residual(x, y, w, z, rng.uniform(0.0, 0.5) * _phase(rng))


@dataclass(frozen=True)
class Property:
    name: str
    draw: Callable[[np.random.Generator], float]
    tolerance: float


PROPERTIES = (
    Property("quasiperiodicity", _draw_quasi, 1e-11),
    Property("inversion", _draw_inversion, 1e-12),
    Property("pq_symmetry", _draw_sym, 1e-12),
    Property("h_ellipticity", _draw_h, 1e-10),
    Property("kernel_difference", _draw_diff, 1e-10),
    Property("theta_addition", _draw_addition, 1e-12),
    Property("factorized_equivalence", _draw_factorized, 1e-11),
)


@dataclass
class PropertyResult:
    name: str
    samples: int
    failures: int
    worst: float
    tolerance: float
    wall_time: float
    residuals: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return self.failures == 0


def run_property(prop: Property, samples: int = 50, seed: int = 20240601) -> PropertyResult:
    rng = make_rng(SamplerConfig(seed=seed), "property", prop.name)
    t0 = time.perf_counter()
    res = [float(prop.draw(rng)) for _ in range(samples)]
    bad = sum(1 for v in res if not (math.isfinite(v) and v <= prop.tolerance))
    return PropertyResult(prop.name, samples, bad, max(res), prop.tolerance, time.perf_counter() - t0, res)


def run_properties(samples: int = 50, seed: int = 20240601) -> list:
    return [run_property(p, samples, seed) for p in PROPERTIES]


__all__ = [
    "Property",
    "PROPERTIES",
    "PropertyResult",
    "run_property",
    "run_properties",
    "quasiperiodicity_residual",
    "inversion_residual",
    "pq_symmetry_residual",
    "factorized_residual",
    "h_ellipticity_residual",
    "kernel_difference_residual",
    "theta_addition_residual",
]
