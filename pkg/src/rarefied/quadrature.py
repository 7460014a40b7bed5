"""Trapezoid quadrature on the unit torus and on the imaginary axis.

On |z| = 1 the equal-weight rule over the N-th roots of unity is spectrally
accurate for integrands analytic in an annulus, so refinement simply doubles
N.  The integrand always receives the whole grid at once.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, NonDecayError


@dataclass(frozen=True)
class GridSpec:
    """Starting grid size per dimension and the refinement budget."""

    points_per_dim: int = 32
    rank: int = 1
    refine_limit: int = 14
    target_rel: float = 1e-10

    def __post_init__(self):
        n = self.points_per_dim
        if n < 8 or n & (n - 1):
            raise ValueError("points_per_dim must be a power of two and at least 8")
        if self.rank not in (1, 2):
            raise ValueError("rank must be 1 or 2")
        if self.refine_limit < 1:
            raise ValueError("refine_limit must be positive")
        if not self.target_rel > 0:
            raise ValueError("target_rel must be positive")

    def with_rank(self, rank: int) -> "GridSpec":
        return GridSpec(self.points_per_dim, rank, self.refine_limit, self.target_rel)


@dataclass
class SumIntegralResult:
    value: complex
    est_rel_error: float
    grid_used: int
    m_terms: int = 1
    wall_time: float = 0.0
    history: tuple = ()


def roots_of_unity(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def pairwise_sum(values: np.ndarray) -> complex:
    """Fixed-order pairwise sum (deterministic at fixed size)."""
    v = np.asarray(values, dtype=complex).reshape(-1)
    while v.size > 1:
        if v.size % 2:
            v = np.concatenate([v, [0j]])
        v = v[0::2] + v[1::2]
    return complex(v[0]) if v.size else 0j


def _rel_change(new: complex, old: complex) -> float:
    scale = max(abs(new), abs(old))
    if scale == 0.0:
        return 0.0
    return abs(new - old) / scale


def _finite(value: complex, n: int) -> complex:
    if not np.isfinite(value):
        raise ConvergenceError(f"non-finite quadrature value at N={n}", value=value)
    return value


def refine(mean_at: Callable[[int], complex], spec: GridSpec, m_terms: int = 1) -> SumIntegralResult:
    """Double N from ``spec.points_per_dim`` until two successive values agree.

    ``mean_at(N)`` returns the equal-weight mean at N points per dimension.
    The relative change is measured against the larger magnitude; if an
    integral is exactly zero both values are roundoff and the comparison
    falls back to the absolute change.
    """
    t0 = time.perf_counter()
    n = spec.points_per_dim
    prev = _finite(mean_at(n), n)
    history = [(n, prev)]
    err = math.inf
    for _ in range(spec.refine_limit):
        n *= 2
        cur = _finite(mean_at(n), n)
        history.append((n, cur))
        err = _rel_change(cur, prev)
        if abs(cur) < 1e-15 and abs(cur - prev) < 1e-15:
            err = abs(cur - prev)
        prev = cur
        if err <= spec.target_rel:
            break
    res = SumIntegralResult(prev, err, n, m_terms, time.perf_counter() - t0, tuple(history))
    if err > 10 * spec.target_rel:
        raise ConvergenceError(
            f"quadrature did not settle: relative change {err:.3e} at N={n}", value=prev, est_rel_error=err
        )
    return res


def torus_integral(f: Callable[[np.ndarray], np.ndarray], spec: GridSpec = GridSpec()) -> SumIntegralResult:
    """(1/2 pi i) ∮ f(z) dz/z over |z| = 1; f is called on the whole array of roots."""
    return refine(lambda n: pairwise_sum(np.asarray(f(roots_of_unity(n)))) / n, spec.with_rank(1))


def torus_integral_2d(f: Callable[[np.ndarray, np.ndarray], np.ndarray], spec: GridSpec = GridSpec(rank=2)) -> SumIntegralResult:
    """Normalized integral over the 2-torus; f is called on meshgrid arrays (z1, z2)."""

    def mean(n):
        w = roots_of_unity(n)
        z1, z2 = np.meshgrid(w, w, indexing="ij")
        return pairwise_sum(np.asarray(f(z1, z2))) / (n * n)

    return refine(mean, spec.with_rank(2))


def vertical_line_integral(
    f: Callable[[np.ndarray], np.ndarray],
    height_cut: float = 40.0,
    step_count: int = 512,
    target_rel: float = 1e-12,
    refine_limit: int = 6,
    decay_tol: float = 1e-14,
) -> SumIntegralResult:
    """(1/2 pi i) ∫ f(x) dx along x = i y, i.e. (1/2 pi) ∫ f(i y) dy.

    The trapezoid rule on [-H, H] is refined by doubling the step count.
    Non-decay is reported when |f| at the cut exceeds ``decay_tol`` times its
    peak on the grid; the height is then doubled once before giving up.
    """
    t0 = time.perf_counter()

    def trap(h_cut, steps):
        y = np.linspace(-h_cut, h_cut, steps + 1)
        vals = np.asarray(f(1j * y), dtype=complex)
        peak = float(np.max(np.abs(vals)))
        edge = max(abs(vals[0]), abs(vals[-1]))
        w = np.full(y.size, 1.0)
        w[0] = w[-1] = 0.5
        return pairwise_sum(vals * w) * (y[1] - y[0]) / (2 * math.pi), edge, peak

    h = float(height_cut)
    val, edge, peak = trap(h, step_count)
    if edge > decay_tol * peak:
        h *= 2
        val, edge, peak = trap(h, 2 * step_count)
        step_count *= 2
        if edge > decay_tol * peak:
            raise NonDecayError(f"integrand at |Im x| = {h} is {edge / peak:.3e} of its peak", value=val)
    steps = step_count
    err = math.inf
    history = [(steps, val)]
    for _ in range(refine_limit):
        steps *= 2
        cur, _, _ = trap(h, steps)
        history.append((steps, cur))
        err = _rel_change(cur, val)
        val = cur
        if err <= target_rel:
            break
    if err > 10 * target_rel:
        raise ConvergenceError(f"vertical-line quadrature did not settle ({err:.3e})", value=val, est_rel_error=err)
    return SumIntegralResult(val, err, steps, 1, time.perf_counter() - t0, tuple(history))


__all__ = [
    "GridSpec",
    "SumIntegralResult",
    "roots_of_unity",
    "pairwise_sum",
    "refine",
    "torus_integral",
    "torus_integral_2d",
    "vertical_line_integral",
]
