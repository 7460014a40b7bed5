"""Elliptic gamma functions of first and second order and the Euler log-gamma.

The elliptic gamma function is evaluated as a truncated double product over
the lattice p^j q^k.  The lattice is pruned by magnitude, so the number of
factors adapts to |p|, |q| and to the size of the argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import PoleError, ZeroArgumentError
from .qseries import (
    DEFAULT_TRUNCATION,
    Truncation,
    _as_complex_array,
    _check_base,
    _finish,
    qpochhammer_inf,
)

POLE_TOL = 1e-12
FAST_PATH_MARGIN = 0.05
_BLOCK = 2_000_000


@dataclass(frozen=True)
class GammaEvalOptions:
    """Evaluation knobs for :func:`elliptic_gamma`.

    ``fast_path`` switches to the logarithmic series for the points that lie
    safely inside the annulus |pq| < |z| < 1; the other points still go through
    the product.
    """

    truncation: Truncation = field(default_factory=Truncation)
    fast_path: bool = False
    pole_tol: float = POLE_TOL


DEFAULT_OPTIONS = GammaEvalOptions()


# --------------------------------------------------------------------------
# lattices


def _level(amplitude: float, tail: float) -> int:
    # bucket the required depth so nearby amplitudes share a cached lattice
    return max(0, int(math.ceil(math.log(amplitude / tail) / math.log(2.0)))) if amplitude > tail else -1


@lru_cache(maxsize=512)
def _lattice(bases: tuple, level: int, max_terms: int) -> np.ndarray:
    """All products of powers of the given bases with magnitude above 2**(-level).

    Returned in a fixed deterministic order.
    """
    if level < 0:
        return np.zeros(0, dtype=complex)
    floor = 2.0 ** (-level)
    vals = [1.0 + 0.0j]
    mags = [1.0]
    for base in bases:
        b = complex(base)
        ab = abs(b)
        new_vals, new_mags = [], []
        for v, mv in zip(vals, mags):
            w, mw = v, mv
            count = 0
            while mw >= floor:
                new_vals.append(w)
                new_mags.append(mw)
                w *= b
                mw *= ab
                count += 1
                if count > max_terms:
                    from .errors import TruncationExhaustedError

                    raise TruncationExhaustedError(
                        f"lattice index exceeded max_terms={max_terms} (base modulus {ab:.3g})"
                    )
                if ab == 0.0:
                    break
        vals, mags = new_vals, new_mags
    return np.asarray(vals, dtype=complex)


def lattice(bases: Sequence[complex], amplitude: float, tr: Truncation = DEFAULT_TRUNCATION) -> np.ndarray:
    """Lattice points w = prod b_i^{k_i} with amplitude * |w| >= tail_threshold."""
    lev = _level(amplitude, tr.tail_threshold)
    return _lattice(tuple(complex(b) for b in bases), lev, tr.max_terms)


def _prod_and_min(x: np.ndarray, w: np.ndarray):
    """prod_l (1 - x w_l) and min |1 - x w_l| over everything."""
    flat = x.reshape(-1)
    out = np.ones(flat.shape, dtype=complex)
    best = math.inf
    if w.size == 0 or flat.size == 0:
        return out.reshape(x.shape), best
    step = max(1, _BLOCK // w.size)
    for s in range(0, flat.size, step):
        fac = 1.0 - flat[s : s + step, None] * w[None, :]
        best = min(best, float(np.min(np.abs(fac))))
        out[s : s + step] = np.prod(fac, axis=1)
    return out.reshape(x.shape), best


def _amp(x: np.ndarray) -> float:
    return float(np.max(np.abs(x))) if x.size else 0.0


# --------------------------------------------------------------------------
# first order


def _gamma_product(x: np.ndarray, p: complex, q: complex, opts: GammaEvalOptions) -> np.ndarray:
    tr = opts.truncation
    w_den = lattice((p, q), _amp(x), tr)
    den, dmin = _prod_and_min(x, w_den)
    if dmin < opts.pole_tol:
        raise PoleError(
            "argument within tolerance of a pole p^-j q^-k of the elliptic gamma function",
            family="pole-lattice",
        )
    y = (p * q) / x
    w_num = lattice((p, q), _amp(y), tr)
    num, _ = _prod_and_min(y, w_num)
    return num / den


def _gamma_log_series(x: np.ndarray, p: complex, q: complex, tr: Truncation) -> np.ndarray:
    """log Gamma via sum_n (x^n - (pq/x)^n) / (n (1-p^n)(1-q^n)), valid for |pq| < |x| < 1."""
    y = (p * q) / x
    rho = max(_amp(x), _amp(y))
    n_max = int(math.ceil(math.log(tr.tail_threshold) / math.log(rho))) + 2
    out = np.zeros(x.shape, dtype=complex)
    xn = np.ones_like(x)
    yn = np.ones_like(x)
    pn, qn = 1.0 + 0j, 1.0 + 0j
    for n in range(1, n_max + 1):
        xn = xn * x
        yn = yn * y
        pn *= p
        qn *= q
        out += (xn - yn) / (n * (1.0 - pn) * (1.0 - qn))
    return out


def elliptic_gamma(z, p, q, opts: GammaEvalOptions = DEFAULT_OPTIONS):
    """Gamma(z; p, q) = prod_{j,k>=0} (1 - z^{-1} p^{j+1} q^{k+1}) / (1 - z p^j q^k)."""
    p = _check_base(p, "p")
    q = _check_base(q, "q")
    x, scalar = _as_complex_array(z)
    if np.any(x == 0):
        raise ZeroArgumentError("elliptic gamma needs z != 0")
    if not opts.fast_path:
        return _finish(_gamma_product(x, p, q, opts), scalar)
    ax = np.abs(x)
    inside = (ax > abs(p * q) + FAST_PATH_MARGIN) & (ax < 1.0 - FAST_PATH_MARGIN)
    out = np.empty(x.shape, dtype=complex)
    if np.any(inside):
        out[inside] = np.exp(_gamma_log_series(x[inside], p, q, opts.truncation))
    if np.any(~inside):
        out[~inside] = _gamma_product(x[~inside], p, q, opts)
    return _finish(out, scalar)


def elliptic_gamma_product(args: Iterable, p, q, opts: GammaEvalOptions = DEFAULT_OPTIONS):
    """Product of elliptic gamma values over a sequence of arguments.

    A pole hit is re-raised with ``index`` set to the offending position.
    """
    out = 1.0 + 0.0j
    for i, a in enumerate(args):
        try:
            out = out * elliptic_gamma(a, p, q, opts)
        except PoleError as exc:
            raise PoleError(f"factor {i}: {exc}", family=exc.family, index=i) from exc
    return out


def elliptic_gamma_pm(t, z, p, q, k: int = 1, opts: GammaEvalOptions = DEFAULT_OPTIONS):
    """Gamma(t z^{+-k}; p, q) = Gamma(t z^k) Gamma(t z^{-k})."""
    z = np.asarray(z, dtype=complex)
    val = elliptic_gamma(t * z**k, p, q, opts) * elliptic_gamma(t * z ** (-k), p, q, opts)
    return val


# --------------------------------------------------------------------------
# second order


def elliptic_gamma2(z, p, q, t, opts: GammaEvalOptions = DEFAULT_OPTIONS):
    """Gamma(z; p, q, t) = prod_{j,k,l>=0} (1 - z p^j q^k t^l)(1 - z^{-1} p^{j+1} q^{k+1} t^{l+1}).

    The function is entire in z (it has zeros only), so no pole check applies.
    """
    p = _check_base(p, "p")
    q = _check_base(q, "q")
    t = _check_base(t, "t")
    x, scalar = _as_complex_array(z)
    if np.any(x == 0):
        raise ZeroArgumentError("second-order elliptic gamma needs z != 0")
    tr = opts.truncation
    a, _ = _prod_and_min(x, lattice((p, q, t), _amp(x), tr))
    y = (p * q * t) / x
    b, _ = _prod_and_min(y, lattice((p, q, t), _amp(y), tr))
    return _finish(a * b, scalar)


# --------------------------------------------------------------------------
# Euler gamma

# B_{2k} / (2k (2k-1)) for the Stirling tail
_STIRLING = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
]
_SHIFT_TO = 15.0
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _stirling(w: np.ndarray) -> np.ndarray:
    inv = 1.0 / w
    inv2 = inv * inv
    tail = np.zeros_like(w)
    for c in reversed(_STIRLING):
        tail = tail * inv2 + c
    return (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + tail * inv


def log_gamma_classical(z):
    """Principal branch of log Gamma(z) for complex z.

    Points with Re z below the Stirling threshold are shifted up by the
    recurrence, subtracting principal logs of the intermediate factors.  The
    sum of principal logs is the continuation of log Gamma along paths that
    avoid the negative real axis, so the result is the principal branch
    without a separate reflection step.
    """
    x, scalar = _as_complex_array(z)
    near_int = (np.abs(x.imag) < 1e-10) & (x.real < 0.5) & (np.abs(x.real - np.round(x.real)) < 1e-10)
    if np.any(near_int):
        raise PoleError("log-gamma evaluated at a nonpositive integer", family="euler-gamma")
    w = x.reshape(-1).copy()
    corr = np.zeros_like(w)
    shift = np.maximum(0, np.ceil(_SHIFT_TO - w.real)).astype(int)
    for k in range(int(shift.max()) if shift.size else 0):
        mask = shift > k
        corr[mask] += np.log(w[mask] + k)
    out = (_stirling(w + shift) - corr).reshape(x.shape)
    return _finish(out, scalar)


def residue_limit_check(p, q, h: float = 1e-6, opts: GammaEvalOptions = DEFAULT_OPTIONS) -> complex:
    """(1 - z) Gamma(z; p, q) at z = 1 - h minus 1/((p;p)(q;q)); O(h) in size."""
    z = 1.0 - h
    lhs = (1.0 - z) * elliptic_gamma(z, p, q, opts)
    return complex(lhs - 1.0 / (qpochhammer_inf(p, p) * qpochhammer_inf(q, q)))


__all__ = [
    "GammaEvalOptions",
    "DEFAULT_OPTIONS",
    "elliptic_gamma",
    "elliptic_gamma_product",
    "elliptic_gamma_pm",
    "elliptic_gamma2",
    "log_gamma_classical",
    "residue_limit_check",
    "lattice",
]
