"""Samplers that draw parameters inside the windows each identity family needs.

A plain balanced draw is not enough for most transformations: the image
parameters must also lie inside the unit disc, and the difference equations
shift some parameters by p^{+-1} or q^{+-1}.  Every sampler here rejects until
those extra conditions hold.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ImageOutOfDomainError, SamplerExhaustedError
from ..kernels import BalancedParams, Kind
from ..qseries import Bases
from .checks import an_image, cdcm_image, e7_image, typeII_cd_image
from .sampler import SamplerConfig, _phase, draw_integers_solved, draw_moduli_solved, sample_balanced

IMAGE_CAP = 0.9


def _images_ok(fn, *args) -> bool:
    try:
        fn(*args)
    except ImageOutOfDomainError:
        return False
    return True


def _outs(image) -> list:
    return list(image.t) + list(image.s)


def sample_v8(b: Bases, eps: int, cfg: SamplerConfig, rng: np.random.Generator, spread: float = 0.3) -> BalancedParams:
    """V8 parameters around |pq|^{1/4}, with all three transformation images inside |s| < 0.9."""
    cap = cfg.n_cap(b.r)
    center = abs(b.pq) ** 0.25
    for _ in range(cfg.resample_limit):
        t = [center * math.exp(rng.uniform(-spread, spread)) * _phase(rng) for _ in range(7)]
        t.append(b.pq**2 / complex(np.prod(t)))
        if not 0.2 * center < abs(t[7]) < cfg.t_mag_cap:
            continue
        n = draw_integers_solved(rng, 8, -4 * eps, cap)
        P = BalancedParams(Kind.V8, t, n, eps)
        try:
            images = [e7_image(P, b, w)[0] for w in (1, 2, 3)]
        except ImageOutOfDomainError:
            continue
        if all(max(map(abs, _outs(im))) < IMAGE_CAP for im in images):
            return P.validate(b)
    raise SamplerExhaustedError("no V8 draw with all images inside the window")


def sample_v8_shifted(b: Bases, eps: int, cfg: SamplerConfig, rng: np.random.Generator) -> BalancedParams:
    """Parameters with prod t = p q^2 and sum n + 4 eps = 1, all moduli inside the disc."""
    cap = cfg.n_cap(b.r)
    target = b.p * b.q * b.q
    t = draw_moduli_solved(rng, 8, target, cfg, lo=0.05)
    n = draw_integers_solved(rng, 8, 1 - 4 * eps, cap)
    return BalancedParams(Kind.V8_SHIFTED, t, n, eps).validate(b)


def reheq_bases(r: int, rng: np.random.Generator, real: bool = False) -> Bases:
    """Bases large enough that t_1, t_2 can sit below min(|p|, |q|) without the last parameter leaving the disc."""
    pm, qm = rng.uniform(0.25, 0.35), rng.uniform(0.2, 0.3)
    if real:
        return Bases(pm, qm, r)
    return Bases(pm * _phase(rng), qm * _phase(rng), r)


def sample_reheq(b: Bases, eps: int, cfg: SamplerConfig, rng: np.random.Generator, even_pair: bool = False) -> BalancedParams:
    """V8 parameters with |t_1|, |t_2| < min(|p|, |q|) so every p- and q-shift stays admissible.

    ``even_pair`` forces n_1 + n_2 even (needed by the symmetric form).
    """
    cap = cfg.n_cap(b.r)
    small = min(abs(b.p), abs(b.q))
    for _ in range(cfg.resample_limit):
        pair = [small * rng.uniform(0.6, 0.9) * _phase(rng) for _ in range(2)]
        try:
            rest = draw_moduli_solved(rng, 6, b.pq**2 / complex(np.prod(pair)), cfg, lo=0.3)
        except SamplerExhaustedError:
            continue
        n = draw_integers_solved(rng, 8, -4 * eps, cap)
        if even_pair and (n[0] + n[1]) % 2:
            continue
        return BalancedParams(Kind.V8, pair + rest, n, eps).validate(b)
    raise SamplerExhaustedError("no difference-equation draw")


def sample_an(b: Bases, rank: int, level: int, eps: int, cfg: SamplerConfig, rng: np.random.Generator) -> BalancedParams:
    K = rank + level + 2
    cap = cfg.n_cap(b.r)
    target = b.pq ** (level + 1)
    center = abs(target) ** (1.0 / (2 * K))
    for _ in range(cfg.resample_limit):
        vals = draw_moduli_solved(rng, 2 * K, target, cfg, center=center)
        n = [int(v) for v in rng.integers(-cap, cap + 1, K)]
        k = draw_integers_solved(rng, K, -sum(n), cap)
        P = BalancedParams(Kind.TYPEI_AN, vals[:K], n, eps, rank=rank, level=level, s=vals[K:], k=k)
        if max(map(abs, P.t + P.s)) >= IMAGE_CAP or not _images_ok(an_image, P, b):
            continue
        if max(map(abs, _outs(an_image(P, b)[0]))) < IMAGE_CAP:
            return P.validate(b)
    raise SamplerExhaustedError("no A_n draw with its image inside the window")


def sample_cdcm(b: Bases, rank: int, level: int, eps: int, cfg: SamplerConfig, rng: np.random.Generator) -> BalancedParams:
    """General type I parameters with sqrt|pq| < |t_a| < 0.9, so that sqrt(pq)/t_a is inside too."""
    K = 2 * rank + 2 * level + 4
    cap = cfg.n_cap(b.r)
    lo = math.sqrt(abs(b.pq))
    for _ in range(cfg.resample_limit):
        try:
            t = draw_moduli_solved(rng, K, b.pq ** (level + 1), cfg, lo=lo)
        except SamplerExhaustedError:
            continue
        n = draw_integers_solved(rng, K, -(rank + level + 2) * eps, cap)
        P = BalancedParams(Kind.TYPEI_CD_GENERAL, t, n, eps, rank=rank, level=level)
        if max(map(abs, t)) < IMAGE_CAP and _images_ok(cdcm_image, P, b):
            return P.validate(b)
    raise SamplerExhaustedError("no C_d <-> C_m draw inside the window")


def sample_typeII_cd(b: Bases, rank: int, eps: int, cfg: SamplerConfig, rng: np.random.Generator) -> BalancedParams:
    cap = cfg.n_cap(b.r)
    for _ in range(cfg.resample_limit):
        tt = rng.uniform(0.3, 0.6) * _phase(rng)
        target = b.pq**2 / tt ** (2 * rank - 2)
        center = abs(target) ** 0.125
        t = [center * math.exp(rng.uniform(-0.25, 0.25)) * _phase(rng) for _ in range(7)]
        t.append(target / complex(np.prod(t)))
        nn = int(rng.integers(-cap, cap + 1))
        n = draw_integers_solved(rng, 8, -4 * eps - 2 * nn * (rank - 1), cap)
        P = BalancedParams(Kind.TYPEII_CD_V, t, n, eps, rank=rank, tt=tt, nn=nn)
        if max(map(abs, t)) >= IMAGE_CAP or not _images_ok(typeII_cd_image, P, b):
            continue
        if max(map(abs, typeII_cd_image(P, b)[0].t)) < IMAGE_CAP:
            return P.validate(b)
    raise SamplerExhaustedError("no type II C_d draw inside the window")


def operator_bases(r: int, rng: np.random.Generator) -> Bases:
    """Bases with |p| > |q|: the domain where the inner-product symmetry holds numerically.

    For |p| < |q| the poles of the operator coefficients sit on the wrong side
    of the shifted contours and the two inner products differ at O(1).
    """
    pm, qm = rng.uniform(0.25, 0.32), rng.uniform(0.1, 0.2)
    return Bases(pm * _phase(rng), qm * _phase(rng), r)


def sample_operator(b: Bases, cfg: SamplerConfig, rng: np.random.Generator, tt: complex = 0.5) -> BalancedParams:
    """Rank-one type II V weight (eps = 0, nn = 0) with every |t_a| < 0.7."""
    cap = cfg.n_cap(b.r)
    for _ in range(cfg.resample_limit):
        t = [rng.uniform(0.3, 0.7) * _phase(rng) for _ in range(7)]
        t.append(b.pq**2 / complex(np.prod(t)))
        if max(map(abs, t)) >= 0.7:
            continue
        n = draw_integers_solved(rng, 8, 0, cap)
        return BalancedParams(Kind.TYPEII_CD_V, t, n, 0, rank=1, tt=tt, nn=0).validate(b)
    raise SamplerExhaustedError("no operator draw")


def sample_family(kind: Kind, b: Bases, rank: int, eps: int, cfg: SamplerConfig, rng: np.random.Generator) -> BalancedParams:
    """Plain balanced draw for the closed-form evaluations."""
    return sample_balanced(kind, rank, b.r, eps, cfg, b, rng)


__all__ = [
    "sample_v8",
    "sample_v8_shifted",
    "reheq_bases",
    "sample_reheq",
    "sample_an",
    "sample_cdcm",
    "sample_typeII_cd",
    "operator_bases",
    "sample_operator",
    "sample_family",
]
