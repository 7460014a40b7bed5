"""Sum-integrals, closed-form right-hand sides, the V-function and the operator layer.

A sum-integral is assembled as

    kappa * sum_m  mean over the torus grid of the kernel at (z, m),

where the grid mean realizes (2 pi i)^{-d} ∮ dz/z and kappa collects the
remaining constants ((p^r;p^r)(q^r;q^r))^d / (2^d d!) for C-type kernels and
((p^r;p^r)(q^r;q^r))^n / (n+1)! for the A_n kernel.

Kernels are evaluated by gathering: every factor depends on one monomial
z^e, and on the N-th roots of unity that monomial is again a root of unity,
so each factor is computed once on N points and indexed into the tensor grid.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .kernels import BalancedParams, Kind, kernel_factors, vandiejen_A
from .quadrature import GridSpec, SumIntegralResult, pairwise_sum, refine, roots_of_unity
from .qseries import Bases
from .rargamma import gamma_rarefied


@dataclass(frozen=True)
class SumIntegralSpec:
    """What to integrate: parameters, bases, grid and the window of each m-sum.

    ``m_offset`` shifts every summation window to offset..offset+r-1.  For
    A_n only the first n discrete variables are summed; the last is derived.
    """

    params: BalancedParams
    bases: Bases
    grid: GridSpec = field(default_factory=GridSpec)
    m_offset: tuple | None = None
    validate: bool = True

    def m_vectors(self):
        rank = self.params.rank
        off = self.m_offset or (0,) * rank
        if len(off) != rank:
            raise ValueError("m_offset length must equal the rank")
        ranges = [range(o, o + self.bases.r) for o in off]
        return list(itertools.product(*ranges))


# --------------------------------------------------------------------------
# grid machinery


def _circle(n: int, half: int) -> np.ndarray:
    """exp(2 pi i (s + half/2) / N) for s = 0..N-1."""
    if not half:
        return roots_of_unity(n)
    return np.exp(2j * np.pi * (np.arange(n) + 0.5) / n)


class GridCache:
    """Values of keyed factors on the (possibly half-step rotated) N-th roots of unity."""

    def __init__(self):
        self._store: dict = {}

    def values(self, factor, n: int, half: int = 0) -> np.ndarray:
        if factor.key is None:
            return np.asarray(factor.fn(_circle(n, half)), dtype=complex)
        key = (factor.key, n, half)
        hit = self._store.get(key)
        if hit is None:
            hit = np.asarray(factor.fn(_circle(n, half)), dtype=complex)
            self._store[key] = hit
        return hit


def _index_grids(rank: int, n: int):
    return [np.arange(n).reshape([n if j == i else 1 for j in range(rank)]) for i in range(rank)]


def factors_on_grid(factors, rank: int, n: int, cache: GridCache | None = None, rotated: bool = False) -> np.ndarray:
    """Product of the factors on the rank-dimensional grid of N-th roots of unity.

    With ``rotated`` every coordinate is shifted by half a step, z_j = w^{i_j + 1/2}.
    A monomial with exponent sum E then lands on the plain grid (E even) or
    the rotated one (E odd), shifted by floor(E/2) steps.
    """
    cache = cache or GridCache()
    idx = _index_grids(rank, n)
    out = np.ones((n,) * rank, dtype=complex)
    for f in factors:
        lin = sum(e * ix for e, ix in zip(f.exps, idx))
        half = 0
        if rotated:
            total = sum(f.exps)
            half = total % 2
            lin = lin + total // 2
        vals = cache.values(f, n, half)
        out = out * vals[np.broadcast_to(lin % n, out.shape)]
    return out


def torus_grid(rank: int, n: int, rotated: bool = False):
    w = _circle(n, int(rotated))
    if rank == 1:
        return (w,)
    return tuple(np.meshgrid(*([w] * rank), indexing="ij"))


def pochhammer_norm(b: Bases) -> complex:
    return b.qpoch_pr * b.qpoch_qr


def kappa(P: BalancedParams, b: Bases) -> complex:
    """Constant multiplying the grid mean of the m-summed kernel."""
    d = P.rank
    if P.kind is Kind.TYPEI_AN:
        return pochhammer_norm(b) ** d / math.factorial(d + 1)
    return pochhammer_norm(b) ** d / (2**d * math.factorial(d))


def summed_kernel_mean(
    P: BalancedParams, b: Bases, n: int, m_list, cache: GridCache | None = None, weight=None, rotated: bool = False
):
    """sum_m mean(kernel(z, m) * weight(z, m)) on the N^rank root-of-unity grid."""
    cache = cache or GridCache()
    total = 0j
    zgrid = None
    for m in m_list:
        vals = factors_on_grid(kernel_factors(P, m, b), P.rank, n, cache, rotated)
        if weight is not None:
            if zgrid is None:
                zgrid = torus_grid(P.rank, n, rotated)
            vals = vals * weight(zgrid, m)
        total += pairwise_sum(vals) / vals.size
    return total


# --------------------------------------------------------------------------
# left-hand sides


def eval_lhs(spec: SumIntegralSpec) -> SumIntegralResult:
    """kappa-normalized finite m-sum of torus integrals of the kernel of ``spec.params``."""
    P, b = spec.params, spec.bases
    if spec.validate:
        P.validate(b)
    t0 = time.perf_counter()
    m_list = spec.m_vectors()
    cache = GridCache()
    k = kappa(P, b)
    grid = spec.grid.with_rank(min(P.rank, 2)) if P.rank <= 2 else spec.grid
    res = refine(lambda n: k * summed_kernel_mean(P, b, n, m_list, cache), grid, len(m_list))
    res.wall_time = time.perf_counter() - t0
    return res


def eval_V(params: BalancedParams, b: Bases, grid: GridSpec = GridSpec(), validate: bool = True) -> SumIntegralResult:
    """The rarefied V-function (rank 1 with 8 parameters), or its type II C_d extension."""
    if params.kind not in (Kind.V8, Kind.TYPEII_CD_V, Kind.V8_SHIFTED):
        raise ValueError("eval_V needs V-type parameters")
    return eval_lhs(SumIntegralSpec(params, b, grid, validate=validate))


def m_coefficients(spec: SumIntegralSpec) -> list:
    """Per-m contributions c_m = kappa * mean(kernel(., m)) at fixed grid refinement (rank 1)."""
    P, b = spec.params, spec.bases
    if P.rank != 1:
        raise ValueError("per-m coefficients are exposed for rank 1")
    if spec.validate:
        P.validate(b)
    cache = GridCache()
    out = []
    k = kappa(P, b)
    for (m,) in spec.m_vectors():
        res = refine(lambda n: k * summed_kernel_mean(P, b, n, [(m,)], cache), spec.grid.with_rank(1))
        out.append(res.value)
    return out


def folded_sum(coeffs: Sequence[complex], eps: int) -> complex:
    """The m-sum rewritten with the reflection m -> eps - m - r (mod r) folded in.

    For eps = 0: c_0 + 2 sum_{0<m<r/2} c_m (+ c_{r/2} for even r).
    For eps = 1: 2 sum_{0<=m<(r-1)/2} c_m (+ c_{(r-1)/2} for odd r).
    """
    r = len(coeffs)
    c = list(coeffs)
    if eps == 0:
        if r % 2 == 0:
            return c[0] + c[r // 2] + 2 * sum(c[1 : r // 2])
        return c[0] + 2 * sum(c[1 : (r - 1) // 2 + 1])
    if eps == 1:
        if r % 2 == 0:
            return 2 * sum(c[0 : r // 2])
        return c[(r - 1) // 2] + 2 * sum(c[0 : (r - 1) // 2])
    raise ValueError("folding is defined for eps in {0, 1}")


# --------------------------------------------------------------------------
# right-hand sides


def eval_rhs(P: BalancedParams, b: Bases) -> complex:
    """Closed-form evaluations for the beta, type I C_n and type II C_n kinds."""
    e = P.eps
    if P.kind in (Kind.BETA6, Kind.TYPEI_CN):
        out = 1.0 + 0j
        for a, c in itertools.combinations(range(len(P.t)), 2):
            out *= gamma_rarefied(P.t[a] * P.t[c], P.n[a] + P.n[c] + e, b)
        return complex(out)
    if P.kind is Kind.TYPEII_CN:
        t, nn = P.tt, P.nn
        out = 1.0 + 0j
        for j in range(1, P.rank + 1):
            out *= gamma_rarefied(t**j, nn * j, b) / gamma_rarefied(t, nn, b)
            for a, c in itertools.combinations(range(6), 2):
                out *= gamma_rarefied(t ** (j - 1) * P.t[a] * P.t[c], nn * (j - 1) + P.n[a] + P.n[c] + e, b)
        return complex(out)
    raise ValueError(f"no closed-form evaluation for kind {P.kind.value}")


# --------------------------------------------------------------------------
# the operator layer


def apply_vandiejen(f: Callable, z: Sequence, m: Sequence[int], P: BalancedParams, b: Bases):
    """(D f)(z, m) for the type II C_d operator with the coefficients of :func:`vandiejen_A`.

    ``f(z, m)`` takes a tuple of (broadcastable) z_j and a tuple of integers.
    The shift T_{p,j} S_j^{-1} sends (z_j, m_j) to (p z_j, m_j - 1).
    """
    z = tuple(np.asarray(v, dtype=complex) for v in z)
    m = tuple(int(v) for v in m)
    base = f(z, m)
    total = 0
    for j in range(len(z)):
        zp = z[:j] + (b.p * z[j],) + z[j + 1 :]
        zm = z[:j] + (z[j] / b.p,) + z[j + 1 :]
        mp = m[:j] + (m[j] - 1,) + m[j + 1 :]
        mm = m[:j] + (m[j] + 1,) + m[j + 1 :]
        a1 = vandiejen_A(j, z, m, False, P, b)
        a2 = vandiejen_A(j, z, m, True, P, b)
        total = total + a1 * (f(zp, mp) - base) + a2 * (f(zm, mm) - base)
    if np.ndim(total) == 0:
        return complex(total)
    return total


def inner_product(f: Callable, g: Callable, P: BalancedParams, b: Bases, grid: GridSpec = GridSpec(), validate: bool = True) -> SumIntegralResult:
    """kappa_d sum_m ∮ Delta_0(z, m) f(z, m) g(z, m) over the torus (eps = 0).

    The grid is rotated by half a step so that no node sits at z_j = +-1 or
    z_j = z_k, where operator coefficients have poles cancelled by the weight.
    """
    if P.kind is not Kind.TYPEII_CD_V:
        raise ValueError("the inner product uses the type II V weight")
    if P.eps != 0:
        raise ValueError("the inner product is defined for eps = 0")
    if validate:
        P.validate(b)
    t0 = time.perf_counter()
    m_list = list(itertools.product(range(b.r), repeat=P.rank))
    cache = GridCache()
    k = kappa(P, b)

    def weight(zg, m):
        return np.asarray(f(zg, m)) * np.asarray(g(zg, m))

    res = refine(lambda n: k * summed_kernel_mean(P, b, n, m_list, cache, weight, rotated=True), grid.with_rank(P.rank), len(m_list))
    res.wall_time = time.perf_counter() - t0
    return res


__all__ = [
    "SumIntegralSpec",
    "GridCache",
    "factors_on_grid",
    "kappa",
    "summed_kernel_mean",
    "eval_lhs",
    "eval_V",
    "eval_rhs",
    "m_coefficients",
    "folded_sum",
    "apply_vandiejen",
    "inner_product",
]
