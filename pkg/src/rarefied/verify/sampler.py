"""Seeded sampling of bases and balanced parameter sets.

Continuous parameters are drawn with uniform phases and log-uniform moduli
around the geometric mean the balancing product requires; the last one is
solved from the product constraint and the draw is rejected until every
modulus sits inside the admissible window.  Discrete parameters are uniform
integers with the last one fixed by the sum constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from ..errors import SamplerExhaustedError
from ..kernels import BalancedParams, Kind
from ..qseries import Bases


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 20240601
    p_mag_range: tuple = (0.05, 0.25)
    q_mag_range: tuple = (0.05, 0.25)
    t_mag_cap: float = 0.85
    n_abs_cap: int | None = None  # None means r - 1
    resample_limit: int = 1000
    spread: float = 0.25  # half-width of the log-modulus window around the mean

    def __post_init__(self):
        for name in ("p_mag_range", "q_mag_range"):
            lo, hi = getattr(self, name)
            if not 0.0 < lo <= hi < 1.0:
                raise ValueError(f"{name} must lie inside (0, 1)")
        if not 0.0 < self.t_mag_cap < 1.0:
            raise ValueError("t_mag_cap must lie in (0, 1)")
        if self.resample_limit < 1:
            raise ValueError("resample_limit must be positive")

    def n_cap(self, r: int) -> int:
        return r - 1 if self.n_abs_cap is None else int(self.n_abs_cap)

    def with_seed(self, seed: int) -> "SamplerConfig":
        return replace(self, seed=int(seed))


def make_rng(cfg: SamplerConfig, *stream) -> np.random.Generator:
    """Independent generator for the given stream labels (ints or strings)."""
    words = [cfg.seed] + [_word(s) for s in stream]
    return np.random.default_rng(np.random.SeedSequence(words))


def _word(s) -> int:
    if isinstance(s, int):
        return s & 0xFFFFFFFF
    h = 2166136261
    for ch in str(s).encode():
        h = ((h ^ ch) * 16777619) & 0xFFFFFFFF
    return h


def _phase(rng) -> complex:
    return complex(np.exp(2j * math.pi * rng.random()))


def sample_bases(r: int, cfg: SamplerConfig, rng: np.random.Generator, real: bool = False) -> Bases:
    pm = rng.uniform(*cfg.p_mag_range)
    qm = rng.uniform(*cfg.q_mag_range)
    if real:
        return Bases(pm, qm, r)
    return Bases(pm * _phase(rng), qm * _phase(rng), r)


def draw_moduli_solved(
    rng: np.random.Generator,
    count: int,
    target: complex,
    cfg: SamplerConfig,
    accept: Callable[[list], bool] | None = None,
    lo: float = 0.0,
    center: float | None = None,
) -> list:
    """``count`` complex numbers with product ``target``; the last one is solved for.

    All moduli must lie in (lo, t_mag_cap) and satisfy ``accept``.
    """
    if center is None:
        center = abs(target) ** (1.0 / count)
    for _ in range(cfg.resample_limit):
        free = [center * math.exp(rng.uniform(-cfg.spread, cfg.spread)) * _phase(rng) for _ in range(count - 1)]
        last = target / complex(np.prod(free)) if free else complex(target)
        vals = free + [last]
        if all(lo < abs(v) < cfg.t_mag_cap for v in vals) and (accept is None or accept(vals)):
            return vals
    raise SamplerExhaustedError(f"no admissible draw after {cfg.resample_limit} attempts")


def draw_integers_solved(rng: np.random.Generator, count: int, total: int, cap: int) -> list:
    free = [int(v) for v in rng.integers(-cap, cap + 1, count - 1)] if count > 1 else []
    return free + [int(total - sum(free))]


def sample_balanced(
    kind,
    rank: int,
    r: int,
    eps: int,
    cfg: SamplerConfig,
    b: Bases,
    rng: np.random.Generator | None = None,
    level: int = 0,
    accept: Callable[[BalancedParams], bool] | None = None,
) -> BalancedParams:
    """A parameter set of the given kind satisfying its balancing conditions exactly."""
    kind = Kind(kind)
    rng = rng if rng is not None else make_rng(cfg, kind.value, rank, r, eps)
    cap = cfg.n_cap(r)
    for _ in range(cfg.resample_limit):
        tt = nn = None
        s, k = (), ()
        if kind in (Kind.TYPEII_CN, Kind.TYPEII_CD_V):
            tt = rng.uniform(0.3, 0.6) * _phase(rng)
            nn = int(rng.integers(-cap, cap + 1))
        proto = BalancedParams(kind, (), (), eps, rank, level, tt, nn)
        count = proto.expected_count()
        prod_target, sum_target = proto.balance_targets(b)
        if kind is Kind.TYPEI_AN:
            vals = draw_moduli_solved(rng, 2 * count, prod_target, cfg)
            t, s = vals[:count], vals[count:]
            n = [int(v) for v in rng.integers(-cap, cap + 1, count)]
            k = draw_integers_solved(rng, count, -sum(n), cap)
        else:
            t = draw_moduli_solved(rng, count, prod_target, cfg)
            n = draw_integers_solved(rng, count, sum_target, cap)
        P = BalancedParams(kind, t, n, eps, rank, level, tt, nn, s, k)
        if accept is None or accept(P):
            return P.validate(b)
    raise SamplerExhaustedError(f"no admissible {kind.value} draw after {cfg.resample_limit} attempts")


__all__ = [
    "SamplerConfig",
    "make_rng",
    "sample_bases",
    "sample_balanced",
    "draw_moduli_solved",
    "draw_integers_solved",
]
