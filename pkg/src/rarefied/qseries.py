"""Infinite q-products, theta functions and elliptic Pochhammer symbols.

Everything here accepts scalars or numpy arrays for the multiplicative
argument and broadcasts; scalar input gives a Python ``complex`` back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    InvalidBaseError,
    PoleError,
    TruncationExhaustedError,
    ZeroArgumentError,
)

# element budget for one (points x factors) block before chunking
_BLOCK = 2_000_000


@dataclass(frozen=True)
class Truncation:
    """Stopping rule for infinite products.

    A product stops at the first index whose factor deviates from 1 by less
    than ``tail_threshold``; ``max_terms`` bounds the index per dimension.
    """

    tail_threshold: float = 1e-17
    max_terms: int = 400

    def __post_init__(self):
        if not 0.0 < self.tail_threshold < 1.0:
            raise ValueError("tail_threshold must lie in (0, 1)")
        if self.max_terms < 1:
            raise ValueError("max_terms must be positive")


DEFAULT_TRUNCATION = Truncation()


def principal_sqrt(z: complex) -> complex:
    """Square root with nonnegative real part; +i|z|^(1/2) on the negative real axis."""
    z = complex(z)
    # strip a signed zero so the negative axis always maps to +i
    z = complex(z.real, z.imag + 0.0)
    return complex(np.sqrt(z))


@dataclass(frozen=True)
class Bases:
    """The pair of nomes (p, q) together with the lens level r.

    Square roots are fixed once: ``sqrt_pq`` is the principal root and the
    ratios are derived from it, so sqrt(p/q) * q == sqrt(pq) holds exactly
    and every half-integer power downstream uses one consistent branch.
    """

    p: complex
    q: complex
    r: int = 1

    def __post_init__(self):
        object.__setattr__(self, "p", complex(self.p))
        object.__setattr__(self, "q", complex(self.q))
        if int(self.r) != self.r or self.r < 1:
            raise ValueError(f"r must be a positive integer, got {self.r!r}")
        object.__setattr__(self, "r", int(self.r))
        for name in ("p", "q"):
            mag = abs(getattr(self, name))
            if not 0.0 < mag < 1.0:
                raise InvalidBaseError(f"need 0 < |{name}| < 1, got |{name}| = {mag}")

    @cached_property
    def pr(self) -> complex:
        return self.p**self.r

    @cached_property
    def qr(self) -> complex:
        return self.q**self.r

    @cached_property
    def pq(self) -> complex:
        return self.p * self.q

    @cached_property
    def sqrt_pq(self) -> complex:
        return principal_sqrt(self.pq)

    @cached_property
    def sqrt_p_over_q(self) -> complex:
        return self.sqrt_pq / self.q

    @cached_property
    def sqrt_q_over_p(self) -> complex:
        return self.sqrt_pq / self.p

    @cached_property
    def qpoch_pr(self) -> complex:
        """(p^r; p^r)_inf"""
        return qpochhammer_inf(self.pr, self.pr)

    @cached_property
    def qpoch_qr(self) -> complex:
        """(q^r; q^r)_inf"""
        return qpochhammer_inf(self.qr, self.qr)

    def swapped(self) -> "Bases":
        return Bases(self.q, self.p, self.r)

    def with_r(self, r: int) -> "Bases":
        return Bases(self.p, self.q, r)

    def as_dict(self) -> dict:
        return {"p": [self.p.real, self.p.imag], "q": [self.q.real, self.q.imag], "r": self.r}


def _as_complex_array(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _finish(values, scalar):
    if scalar:
        return complex(values.reshape(()))
    return values


def _check_base(p: complex, name: str = "p"):
    p = complex(p)
    if not abs(p) < 1.0:
        raise InvalidBaseError(f"need |{name}| < 1, got {abs(p)}")
    return p


def _n_terms(amplitude: float, ratio: float, tr: Truncation) -> int:
    """Number of factors j = 0..J-1 before amplitude*ratio^J drops under the threshold."""
    if amplitude < tr.tail_threshold:
        return 0
    if ratio == 0.0:
        return 1
    n = int(math.floor(math.log(tr.tail_threshold / amplitude) / math.log(ratio))) + 1
    n = max(n, 1)
    while amplitude * ratio ** (n - 1) < tr.tail_threshold and n > 1:
        n -= 1
    while amplitude * ratio**n >= tr.tail_threshold:
        n += 1
    if n > tr.max_terms:
        raise TruncationExhaustedError(
            f"product needs {n} factors (> max_terms={tr.max_terms}) for amplitude {amplitude:.3g}, ratio {ratio:.3g}"
        )
    return n


def product_one_minus(x: np.ndarray, factors: np.ndarray) -> np.ndarray:
    """prod_l (1 - x * factors[l]) for every element of x, in memory-bounded blocks."""
    flat = x.reshape(-1)
    out = np.ones(flat.shape, dtype=complex)
    n_f = factors.size
    if n_f == 0 or flat.size == 0:
        return out.reshape(x.shape)
    step = max(1, _BLOCK // n_f)
    for start in range(0, flat.size, step):
        block = flat[start : start + step]
        out[start : start + step] = np.prod(1.0 - block[:, None] * factors[None, :], axis=1)
    return out.reshape(x.shape)


def min_abs_one_minus(x: np.ndarray, factors: np.ndarray) -> float:
    """min over elements and factors of |1 - x * factor|."""
    flat = x.reshape(-1)
    if factors.size == 0 or flat.size == 0:
        return math.inf
    step = max(1, _BLOCK // factors.size)
    best = math.inf
    for start in range(0, flat.size, step):
        block = flat[start : start + step]
        best = min(best, float(np.min(np.abs(1.0 - block[:, None] * factors[None, :]))))
    return best


def qpochhammer_inf(z, p, tr: Truncation = DEFAULT_TRUNCATION):
    """(z; p)_inf = prod_{j>=0} (1 - z p^j)."""
    p = _check_base(p)
    x, scalar = _as_complex_array(z)
    amp = float(np.max(np.abs(x))) if x.size else 0.0
    n = _n_terms(amp, abs(p), tr)
    powers = p ** np.arange(n)
    return _finish(product_one_minus(x, powers), scalar)


def theta(z, p, tr: Truncation = DEFAULT_TRUNCATION):
    """theta(z; p) = (z; p)_inf (p/z; p)_inf."""
    p = _check_base(p)
    x, scalar = _as_complex_array(z)
    if np.any(x == 0):
        raise ZeroArgumentError("theta(z; p) is undefined at z = 0")
    val = qpochhammer_inf(x, p, tr) * qpochhammer_inf(p / x, p, tr)
    return _finish(np.asarray(val), scalar)


def theta_product(args: Iterable, p, tr: Truncation = DEFAULT_TRUNCATION):
    """theta(x_1, ..., x_k; p): product of theta values (empty product is 1)."""
    out = 1.0 + 0.0j
    for a in args:
        out = out * theta(a, p, tr)
    return out


def theta_pm(t, x, p, tr: Truncation = DEFAULT_TRUNCATION):
    """theta(t x^{+-1}; p) = theta(t x; p) theta(t / x; p)."""
    x = np.asarray(x, dtype=complex)
    val = theta(t * x, p, tr) * theta(t / x, p, tr)
    return _finish(np.asarray(val), x.ndim == 0)


def elliptic_pochhammer(x, n: int, p, q, tr: Truncation = DEFAULT_TRUNCATION, pole_tol: float = 1e-13):
    """theta(x; p | q)_n for any integer n (two-sided definition)."""
    n = int(n)
    q = complex(q)
    arr, scalar = _as_complex_array(x)
    if np.any(arr == 0):
        raise ZeroArgumentError("elliptic Pochhammer symbol needs x != 0")
    out = np.ones(arr.shape, dtype=complex)
    if n > 0:
        for j in range(n):
            out = out * theta(arr * q**j, p, tr)
    elif n < 0:
        for j in range(1, -n + 1):
            arg = arr * q ** (-j)
            den = theta(arg, p, tr)
            scale = np.abs(qpochhammer_inf(np.abs(arg), abs(p), tr)) + 1.0
            if np.any(np.abs(den) <= pole_tol * scale):
                raise PoleError(f"theta(x q^-{j}; p) vanishes in the denominator", family="theta-zero", index=j)
            out = out / den
    return _finish(out, scalar)


def is_scalar(z) -> bool:
    return np.ndim(z) == 0


__all__ = [
    "Bases",
    "Truncation",
    "DEFAULT_TRUNCATION",
    "principal_sqrt",
    "qpochhammer_inf",
    "theta",
    "theta_product",
    "theta_pm",
    "elliptic_pochhammer",
]
