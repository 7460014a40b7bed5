"""The lens gamma function and the normalized rarefied elliptic gamma function.

``gamma_lens`` is the two-gamma product gamma^(r)(z, m).  ``gamma_rarefied``
is its normalized version Gamma^(r)(z, m).  The normalized function needs no
square roots at all: the prefactor collapses to

    (-z)^{m(m-1)/2} (pq)^{m(m-1)(m-2)/6} q^{-m(m-1)(2m-1)/6},

because the power of sqrt(pq) that appears is always even.  The default
route writes Gamma^(r) as a product of ordinary elliptic gammas with bases
(p^r, q^r) for 0 <= m < r and reaches other m through the closed-form
quasiperiodicity multiplier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ellgamma import DEFAULT_OPTIONS, GammaEvalOptions, elliptic_gamma
from .errors import PoleError, ZeroArgumentError
from .qseries import Bases, _as_complex_array, _finish, qpochhammer_inf, theta


@dataclass(frozen=True)
class RarefiedArg:
    """A pair (z, m) with z != 0 and an unrestricted integer m."""

    z: complex
    m: int

    def __post_init__(self):
        if complex(self.z) == 0:
            raise ZeroArgumentError("rarefied gamma argument must be nonzero")
        if int(self.m) != self.m:
            raise ValueError("discrete argument must be an integer")


def _as_int(m) -> int:
    mi = int(round(float(m)))
    if mi != m:
        raise ValueError(f"discrete argument must be an integer, got {m!r}")
    return mi


def gamma_lens(z, m: int, b: Bases, opts: GammaEvalOptions = DEFAULT_OPTIONS):
    """gamma^(r)(z, m) = Gamma(z p^m; p^r, pq) Gamma(z q^{r-m}; q^r, pq)."""
    m = _as_int(m)
    x, scalar = _as_complex_array(z)
    r = b.r
    try:
        first = elliptic_gamma(x * b.p**m, b.pr, b.pq, opts)
    except PoleError as exc:
        raise PoleError(f"z p^m hits the p-family poles: {exc}", family="p-family") from exc
    try:
        second = elliptic_gamma(x * b.q ** (r - m), b.qr, b.pq, opts)
    except PoleError as exc:
        raise PoleError(f"z q^(r-m) hits the q-family poles: {exc}", family="q-family") from exc
    return _finish(np.asarray(first * second), scalar)


def normalization_prefactor(z, m: int, b: Bases):
    """(-z/sqrt(pq))^{m(m-1)/2} (p/q)^{m(m-1)(2m-1)/12} in branch-free integer-power form."""
    m = _as_int(m)
    x = np.asarray(z, dtype=complex)
    a = m * (m - 1) // 2
    c = m * (m - 1) * (2 * m - 1) // 6
    e = m * (m - 1) * (m - 2) // 6
    if abs(m) > 6:
        # log-magnitude/phase form keeps the huge powers from overflowing early
        logv = a * np.log(-x + 0j) + e * np.log(b.pq) - c * np.log(b.q)
        return np.exp(logv)
    return (-x) ** a * b.pq**e * b.q ** (-c)


def _factorized_product(x: np.ndarray, m: int, b: Bases, opts: GammaEvalOptions) -> np.ndarray:
    """prod_{k<m} Gamma(q^{r-m} z (pq)^k) prod_{k<r-m} Gamma(p^m z (pq)^k), bases (p^r, q^r)."""
    r = b.r
    out = np.ones(x.shape, dtype=complex)
    for k in range(m):
        out = out * elliptic_gamma(x * b.q ** (r - m) * b.pq**k, b.pr, b.qr, opts)
    for k in range(r - m):
        out = out * elliptic_gamma(x * b.p**m * b.pq**k, b.pr, b.qr, opts)
    return out


def gamma_rarefied_factorized(z, m: int, b: Bases, opts: GammaEvalOptions = DEFAULT_OPTIONS):
    """Gamma^(r)(z, m) for 0 <= m <= r through the factorized product."""
    m = _as_int(m)
    if not 0 <= m <= b.r:
        raise ValueError("the factorized form covers 0 <= m <= r only")
    x, scalar = _as_complex_array(z)
    pref = (-x) ** (m * (m - 1) // 2) * b.p ** (m * (m - 1) * (m - 2) // 6) * b.q ** (-(m * (m * m - 1)) // 6)
    return _finish(pref * _factorized_product(x, m, b, opts), scalar)


def quasiperiod_factor(z, m: int, k: int, b: Bases):
    """Gamma^(r)(z, m + k r) / Gamma^(r)(z, m) in closed form.

    Both exponents are integers once the outer k(r-1)/2 is distributed, so
    the value is an integer power of (-z/sqrt(pq)) times an integer power of
    sqrt(p/q), with the roots fixed by ``b``.
    """
    m = _as_int(m)
    k = _as_int(k)
    r = b.r
    x = np.asarray(z, dtype=complex)
    scalar = x.ndim == 0
    if k == 0 or r == 1:
        return _finish(np.ones(x.shape, dtype=complex), scalar)
    # exponent of (-z/sqrt(pq)): (2m + rk) k (r-1) / 2
    num1 = (2 * m + r * k) * k * (r - 1)
    # exponent of sqrt(p/q): [m(m+rk) + r(2rk^2-1)/6] k (r-1)
    num2 = 6 * m * (m + r * k) * k * (r - 1) + r * (2 * r * k * k - 1) * k * (r - 1)
    assert num1 % 2 == 0 and num2 % 6 == 0
    e1, e2 = num1 // 2, num2 // 6
    base1 = -x / b.sqrt_pq
    if abs(e1) > 40:
        val = np.exp(e1 * np.log(base1) + e2 * np.log(b.sqrt_p_over_q + 0j))
    else:
        val = base1**e1 * b.sqrt_p_over_q**e2
    return _finish(np.asarray(val), scalar)


def gamma_rarefied(z, m: int, b: Bases, opts: GammaEvalOptions = DEFAULT_OPTIONS, method: str = "factorized"):
    """The rarefied elliptic gamma function Gamma^(r)(z, m; p, q).

    ``method="factorized"`` (default) reduces m = l + k r with 0 <= l < r and
    uses the product over bases (p^r, q^r) times the quasiperiodicity
    multiplier.  ``method="lens"`` multiplies the normalization prefactor
    onto :func:`gamma_lens` directly; it serves as an independent route.
    """
    m = _as_int(m)
    x, scalar = _as_complex_array(z)
    if np.any(x == 0):
        raise ZeroArgumentError("rarefied gamma argument must be nonzero")
    if method == "lens":
        val = normalization_prefactor(x, m, b) * gamma_lens(x, m, b, opts)
        return _finish(np.asarray(val), scalar)
    if method != "factorized":
        raise ValueError(f"unknown method {method!r}")
    r = b.r
    k, l = divmod(m, r)
    val = gamma_rarefied_factorized(x, l, b, opts)
    if k:
        val = val * quasiperiod_factor(x, l, k, b)
    return _finish(np.asarray(val), scalar)


def inverse_pair(z, m: int, b: Bases):
    """1 / (Gamma^(r)(z, m) Gamma^(r)(1/z, -m)) as a theta product.

    Equals theta(z q^{-m}; q^r) theta(z^{-1} p^{-m}; p^r) (pq)^{m(m+1)/2}; it
    vanishes exactly where the pair has poles, so kernels use it for the
    z^{+-2} and cross-term denominators.
    """
    m = _as_int(m)
    x, scalar = _as_complex_array(z)
    val = theta(x * b.q ** (-m), b.qr) * theta(1.0 / x * b.p ** (-m), b.pr) * b.pq ** (m * (m + 1) // 2)
    return _finish(np.asarray(val), scalar)


def recurrence_check(z, m: int, b: Bases, opts: GammaEvalOptions = DEFAULT_OPTIONS):
    """Relative residuals of the q-shift and p-shift recurrences of Gamma^(r)."""
    m = _as_int(m)
    z = complex(z)
    g = gamma_rarefied(z, m, b, opts)
    lhs_q = gamma_rarefied(b.q * z, m + 1, b, opts)
    rhs_q = (-z) ** m * b.p ** (m * (m - 1) // 2) * theta(z * b.p**m, b.pr) * g
    lhs_p = gamma_rarefied(b.p * z, m - 1, b, opts)
    rhs_p = (-z) ** (-m) * b.q ** (m * (m + 1) // 2) * theta(z * b.q ** (-m), b.qr) * g
    res_q = abs(lhs_q - rhs_q) / max(abs(lhs_q), abs(rhs_q), 1e-300)
    res_p = abs(lhs_p - rhs_p) / max(abs(lhs_p), abs(rhs_p), 1e-300)
    return float(res_q), float(res_p)


def lens_recurrence_check(z, m: int, b: Bases, opts: GammaEvalOptions = DEFAULT_OPTIONS):
    """Relative residuals of the raw recurrences of gamma_lens."""
    m = _as_int(m)
    z = complex(z)
    g = gamma_lens(z, m, b, opts)
    lq = gamma_lens(b.q * z, m + 1, b, opts)
    rq = theta(z * b.p**m, b.pr) * g
    lp = gamma_lens(b.p * z, m - 1, b, opts)
    rp = theta(z * b.q ** (b.r - m), b.qr) * g
    return abs(lq - rq) / max(abs(lq), 1e-300), abs(lp - rp) / max(abs(lp), 1e-300)


def residue_limit_rarefied(b: Bases, h: float = 1e-6, opts: GammaEvalOptions = DEFAULT_OPTIONS) -> complex:
    """(1 - z) Gamma^(r)(z, 0) at z = 1 - h minus 1/((p^r;p^r)(q^r;q^r))."""
    z = 1.0 - h
    lhs = (1.0 - z) * gamma_rarefied(z, 0, b, opts)
    return complex(lhs - 1.0 / (b.qpoch_pr * b.qpoch_qr))


def small_p_asymptotic(z, m: int, q, r: int, p=None):
    """Leading p -> 0 form of gamma^(r)(z, m; p, q) for -r < m <= r.

    The branch m < 0 carries an explicit power of p; pass the small p at
    which the comparison is made.
    """
    m = _as_int(m)
    r = int(r)
    if not -r < m <= r:
        raise ValueError(f"small-p form needs -r < m <= r, got m={m}, r={r}")
    x, scalar = _as_complex_array(z)
    q = complex(q)
    qr = q**r
    if m > 0:
        val = 1.0 / qpochhammer_inf(x * q ** (r - m), qr)
    elif m == 0:
        val = 1.0 / qpochhammer_inf(x, qr)
    else:
        if p is None:
            raise ValueError("the m < 0 branch needs the value of p")
        a = -m
        p = complex(p)
        val = (-p / x) ** a * (p / q) ** (a * (a - 1) // 2) / qpochhammer_inf(x * q**a, qr)
    return _finish(np.asarray(val), scalar)


__all__ = [
    "RarefiedArg",
    "gamma_lens",
    "gamma_rarefied",
    "gamma_rarefied_factorized",
    "normalization_prefactor",
    "quasiperiod_factor",
    "inverse_pair",
    "recurrence_check",
    "lens_recurrence_check",
    "residue_limit_rarefied",
    "small_p_asymptotic",
]
