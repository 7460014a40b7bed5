"""Sum-integrands, their coefficient functions and difference-operator coefficients.

A kernel at fixed discrete variables is a product of factors.  Each factor
depends on one monomial z_1^{e_1} ... z_d^{e_d} of the integration variables.
Kernels are therefore represented as a list of :class:`Factor` objects: the
pointwise kernels below multiply them out directly, while the quadrature
layer evaluates each factor once on the roots of unity and gathers, which
turns a rank-2 product over N^2 points into O(N) special-function calls.

Denominators of the form Gamma^(r)(x, M) Gamma^(r)(1/x, -M) are always
evaluated through the theta-product closed form :func:`inverse_pair`, so
their zeros on the diagonal z_j = z_k or at z = +-1 come out as exact zeros
rather than as overflowing poles.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BalanceError
from .qseries import Bases, theta
from .rargamma import gamma_rarefied, inverse_pair


class Kind(str, enum.Enum):
    BETA6 = "Beta6"
    TYPEI_CN = "TypeI_Cn"
    TYPEII_CN = "TypeII_Cn"
    V8 = "V8"
    TYPEII_CD_V = "TypeII_Cd_V"
    TYPEI_CD_GENERAL = "TypeI_Cd_general"
    TYPEI_AN = "TypeI_An"
    # V-type data with the shifted balancing prod t = p q^2, sum n + 4 eps = 1
    V8_SHIFTED = "V8_shifted"


@dataclass(frozen=True)
class BalancedParams:
    """Continuous parameters ``t``, discrete ``n`` and ``eps`` of one kind.

    ``rank`` is the number of integration variables (n, d).  ``level`` is
    the second rank m for the general type I C_d and the A_n functions.
    Type II kinds carry the pair ``(tt, nn)``; A_n carries ``(s, k)``.
    """

    kind: Kind
    t: tuple
    n: tuple
    eps: int = 0
    rank: int = 1
    level: int = 0
    tt: complex | None = None
    nn: int | None = None
    s: tuple = ()
    k: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "t", tuple(complex(v) for v in self.t))
        object.__setattr__(self, "n", tuple(int(v) for v in self.n))
        object.__setattr__(self, "s", tuple(complex(v) for v in self.s))
        object.__setattr__(self, "k", tuple(int(v) for v in self.k))
        if self.tt is not None:
            object.__setattr__(self, "tt", complex(self.tt))
        if self.nn is not None:
            object.__setattr__(self, "nn", int(self.nn))

    # -- balancing -----------------------------------------------------

    def expected_count(self) -> int:
        d, m = self.rank, self.level
        return {
            Kind.BETA6: 6,
            Kind.TYPEI_CN: 2 * d + 4,
            Kind.TYPEII_CN: 6,
            Kind.V8: 8,
            Kind.TYPEII_CD_V: 8,
            Kind.TYPEI_CD_GENERAL: 2 * d + 2 * m + 4,
            Kind.TYPEI_AN: d + m + 2,
            Kind.V8_SHIFTED: 8,
        }[self.kind]

    def balance_targets(self, b: Bases):
        """(required continuous product, required discrete sum) for this kind."""
        d, m, e = self.rank, self.level, self.eps
        pq = b.pq
        if self.kind in (Kind.BETA6, Kind.TYPEI_CN):
            return pq, -(d + 2) * e if self.kind is Kind.TYPEI_CN else -3 * e
        if self.kind is Kind.TYPEII_CN:
            return pq / self.tt ** (2 * d - 2), -3 * e - 2 * self.nn * (d - 1)
        if self.kind is Kind.V8:
            return pq**2, -4 * e
        if self.kind is Kind.TYPEII_CD_V:
            return pq**2 / self.tt ** (2 * d - 2), -4 * e - 2 * self.nn * (d - 1)
        if self.kind is Kind.TYPEI_CD_GENERAL:
            return pq ** (m + 1), -(d + m + 2) * e
        if self.kind is Kind.TYPEI_AN:
            return pq ** (m + 1), 0
        if self.kind is Kind.V8_SHIFTED:
            return b.p * b.q**2, 1 - 4 * e
        raise AssertionError(self.kind)

    def validate(self, b: Bases, rel_tol: float = 1e-12, check_domain: bool = True) -> "BalancedParams":
        if len(self.t) != self.expected_count() or len(self.n) != len(self.t):
            raise BalanceError(f"{self.kind.value} needs {self.expected_count()} (t, n) pairs, got {len(self.t)}")
        if self.kind in (Kind.TYPEII_CN, Kind.TYPEII_CD_V) and (self.tt is None or self.nn is None):
            raise BalanceError("type II kinds need the pair (tt, nn)")
        if self.kind is Kind.TYPEI_AN:
            if len(self.s) != len(self.t) or len(self.k) != len(self.t):
                raise BalanceError("A_n kind needs s and k of the same length as t")
            if not 0 <= self.eps <= self.rank:
                raise BalanceError("A_n kind needs 0 <= eps <= rank")
        elif self.eps not in (0, 1):
            raise BalanceError("eps must be 0 or 1")
        prod_target, sum_target = self.balance_targets(b)
        prod = complex(np.prod(self.t))
        total = sum(self.n)
        if self.kind is Kind.TYPEI_AN:
            prod *= complex(np.prod(self.s))
            total += sum(self.k)
        if abs(prod / prod_target - 1.0) > rel_tol:
            raise BalanceError(f"continuous balancing violated: |prod/target - 1| = {abs(prod / prod_target - 1):.3e}")
        if total != sum_target:
            raise BalanceError(f"discrete balancing violated: sum = {total}, required {sum_target}")
        if check_domain:
            mags = [abs(v) for v in self.t + self.s] + ([abs(self.tt)] if self.tt is not None else [])
            if max(mags) >= 1.0:
                raise BalanceError(f"all continuous parameters need modulus < 1 (max {max(mags):.4f})")
        return self

    # -- helpers -------------------------------------------------------

    def replace(self, **kw) -> "BalancedParams":
        data = dict(
            kind=self.kind, t=self.t, n=self.n, eps=self.eps, rank=self.rank, level=self.level,
            tt=self.tt, nn=self.nn, s=self.s, k=self.k,
        )
        data.update(kw)
        return BalancedParams(**data)

    def with_shift(self, a: int, t_factor: complex, dn: int) -> "BalancedParams":
        t = list(self.t)
        n = list(self.n)
        t[a] = t[a] * t_factor
        n[a] = n[a] + dn
        return self.replace(t=tuple(t), n=tuple(n))

    def as_dict(self) -> dict:
        out = {
            "kind": self.kind.value,
            "t": [[v.real, v.imag] for v in self.t],
            "n": list(self.n),
            "eps": self.eps,
            "rank": self.rank,
        }
        if self.level:
            out["level"] = self.level
        if self.tt is not None:
            out["tt"] = [self.tt.real, self.tt.imag]
            out["nn"] = self.nn
        if self.s:
            out["s"] = [[v.real, v.imag] for v in self.s]
            out["k"] = list(self.k)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "BalancedParams":
        c = lambda v: complex(v[0], v[1])
        return cls(
            kind=d["kind"], t=[c(v) for v in d["t"]], n=d["n"], eps=d.get("eps", 0), rank=d.get("rank", 1),
            level=d.get("level", 0), tt=c(d["tt"]) if "tt" in d else None, nn=d.get("nn"),
            s=[c(v) for v in d.get("s", [])], k=d.get("k", []),
        )


@dataclass(frozen=True)
class LatticePoint:
    """Integration variables z_j together with the discrete variables m_j."""

    z: tuple
    m: tuple

    def __post_init__(self):
        if len(self.z) != len(self.m):
            raise ValueError("z and m must have the same length")
        object.__setattr__(self, "m", tuple(int(v) for v in self.m))


@dataclass(frozen=True)
class Factor:
    """One multiplicative piece f(z^e) of a kernel; ``exps`` is the monomial e."""

    exps: tuple
    fn: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    label: str = ""
    key: tuple | None = None  # cache key for values on a shared grid; None disables caching


def _unit(rank: int, j: int, sign: int = 1) -> tuple:
    e = [0] * rank
    e[j] = sign
    return tuple(e)


def _add(a: tuple, b: tuple, sb: int = 1) -> tuple:
    return tuple(x + sb * y for x, y in zip(a, b))


def evaluate_factors(factors: Sequence[Factor], z: Sequence) -> np.ndarray:
    """Multiply the factors at explicit (broadcastable) variable values z."""
    zs = [np.asarray(v, dtype=complex) for v in z]
    out = np.ones(np.broadcast(*zs).shape if len(zs) > 1 else zs[0].shape, dtype=complex)
    for f in factors:
        x = np.ones_like(out)
        for zj, e in zip(zs, f.exps):
            if e:
                x = x * zj**e
        out = out * f.fn(x)
    return out


# --------------------------------------------------------------------------
# building blocks


def _gamma_factor(exps: tuple, t: complex, n: int, b: Bases, label: str) -> Factor:
    """x -> Gamma^(r)(t x, n)."""
    def fn(x):
        return gamma_rarefied(t * np.asarray(x), n, b)

    return Factor(exps, fn, label, key=("gamma", t, n))


def _pair_factor(exps: tuple, M: int, b: Bases, label: str) -> Factor:
    """x -> 1 / (Gamma^(r)(x, M) Gamma^(r)(1/x, -M))."""

    def fn(x):
        return np.asarray(inverse_pair(np.asarray(x), M, b))

    return Factor(exps, fn, label, key=("pair", M))


def _check_int(*vals):
    for v in vals:
        if int(v) != v:
            raise ValueError("half-integer discrete argument reached a rarefied gamma")


def c_type_factors(
    t: Sequence[complex],
    n: Sequence[int],
    eps: int,
    m: Sequence[int],
    b: Bases,
    pair: tuple | None = None,
) -> list:
    """Factors of the C-type kernels (beta, type I, V, and type II when ``pair`` is given).

    Per variable: prod_a Gamma^(r)(t_a z_j, n_a + m_j + eps) Gamma^(r)(t_a / z_j, n_a - m_j)
    over Gamma^(r)(z_j^{+-2}, +-(2 m_j + eps)).  For each j < k the type I
    cross denominator uses the expansion

        Gamma(z_j^{+-1} z_k^{+-1}, +-a +-b) = Gamma(z_j z_k, a+b) Gamma(z_j/z_k, a-b)
                                             Gamma(z_k/z_j, b-a) Gamma(1/(z_j z_k), -a-b)

    with a = m_j + eps/2 and b = m_k + eps/2, so a+b and a-b are integers.
    ``pair = (t, n)`` multiplies in the type II numerator with the same signs.
    """
    rank = len(m)
    out = []
    for j, mj in enumerate(m):
        _check_int(mj)
        for a, (ta, na) in enumerate(zip(t, n)):
            out.append(_gamma_factor(_unit(rank, j, 1), ta, na + mj + eps, b, f"t{a}z{j}"))
            out.append(_gamma_factor(_unit(rank, j, -1), ta, na - mj, b, f"t{a}/z{j}"))
        out.append(_pair_factor(_unit(rank, j, 2), 2 * mj + eps, b, f"z{j}^2"))
    for j in range(rank):
        for k in range(j + 1, rank):
            s_exp = _add(_unit(rank, j), _unit(rank, k))
            d_exp = _add(_unit(rank, j), _unit(rank, k), -1)
            a_plus_b = m[j] + m[k] + eps
            a_minus_b = m[j] - m[k]
            out.append(_pair_factor(s_exp, a_plus_b, b, f"z{j}z{k}"))
            out.append(_pair_factor(d_exp, a_minus_b, b, f"z{j}/z{k}"))
            if pair is not None:
                tt, nn = pair
                neg = lambda e: tuple(-v for v in e)
                out.append(_gamma_factor(s_exp, tt, nn + a_plus_b, b, f"t z{j}z{k}"))
                out.append(_gamma_factor(neg(s_exp), tt, nn - a_plus_b, b, f"t/(z{j}z{k})"))
                out.append(_gamma_factor(d_exp, tt, nn + a_minus_b, b, f"t z{j}/z{k}"))
                out.append(_gamma_factor(neg(d_exp), tt, nn - a_minus_b, b, f"t z{k}/z{j}"))
    return out


def an_factors(P: BalancedParams, m_free: Sequence[int], b: Bases) -> list:
    """Factors of the A_n kernel; z_{n+1} = 1/(z_1...z_n) and m_{n+1} = eps - sum m_j."""
    rank = P.rank
    m_all = list(m_free) + [P.eps - sum(m_free)]
    exps = [_unit(rank, j) for j in range(rank)] + [tuple([-1] * rank)]
    out = []
    for j in range(rank + 1):
        mj = m_all[j]
        inv = tuple(-e for e in exps[j])
        for a, (ta, na) in enumerate(zip(P.t, P.n)):
            out.append(_gamma_factor(exps[j], ta, na + mj, b, f"t{a}z{j}"))
        for a, (sa, ka) in enumerate(zip(P.s, P.k)):
            out.append(_gamma_factor(inv, sa, ka - mj, b, f"s{a}/z{j}"))
    for i in range(rank + 1):
        for j in range(i + 1, rank + 1):
            out.append(_pair_factor(_add(exps[i], exps[j], -1), m_all[i] - m_all[j], b, f"z{i}/z{j}"))
    return out


def kernel_factors(P: BalancedParams, m: Sequence[int], b: Bases) -> list:
    """Factor list of the integrand of kind ``P.kind`` at discrete variables ``m``."""
    k = P.kind
    if k in (Kind.BETA6, Kind.V8, Kind.TYPEI_CN, Kind.TYPEI_CD_GENERAL, Kind.V8_SHIFTED):
        return c_type_factors(P.t, P.n, P.eps, m, b)
    if k in (Kind.TYPEII_CN, Kind.TYPEII_CD_V):
        return c_type_factors(P.t, P.n, P.eps, m, b, pair=(P.tt, P.nn))
    if k is Kind.TYPEI_AN:
        return an_factors(P, m, b)
    raise ValueError(f"no kernel for kind {k}")


def _point_value(P: BalancedParams, pt: LatticePoint, b: Bases):
    return evaluate_factors(kernel_factors(P, pt.m, b), pt.z)


def kernel_beta(pt: LatticePoint, P: BalancedParams, b: Bases, validate: bool = True):
    """The rank-1 kernel Delta_eps(z, m; t_a, n_a) (any number of t's; six for the beta integral)."""
    if len(pt.z) != 1:
        raise ValueError("kernel_beta is rank 1")
    if validate:
        P.validate(b)
    return _finish_point(_point_value(P, pt, b), pt)


def kernel_typeI_Cn(pt: LatticePoint, P: BalancedParams, b: Bases, validate: bool = True):
    """Type I C_n kernel with 2n+4 parameters (or 2d+2m+4 for the general kind)."""
    if P.kind not in (Kind.TYPEI_CN, Kind.TYPEI_CD_GENERAL, Kind.BETA6, Kind.V8):
        raise ValueError("kernel_typeI_Cn needs a type I C-kind")
    if validate:
        P.validate(b)
    return _finish_point(_point_value(P, pt, b), pt)


def kernel_typeII(pt: LatticePoint, P: BalancedParams, b: Bases, validate: bool = True):
    """Type II C_d kernel with 6 (evaluation) or 8 (V-function) parameters."""
    if P.kind not in (Kind.TYPEII_CN, Kind.TYPEII_CD_V):
        raise ValueError("kernel_typeII needs a type II kind")
    if validate:
        P.validate(b)
    return _finish_point(_point_value(P, pt, b), pt)


def kernel_An(pt: LatticePoint, P: BalancedParams, b: Bases, validate: bool = True):
    """A_n kernel at free variables z_1..z_n, m_1..m_n."""
    if P.kind is not Kind.TYPEI_AN:
        raise ValueError("kernel_An needs the A_n kind")
    if validate:
        P.validate(b)
    return _finish_point(_point_value(P, pt, b), pt)


def _finish_point(val, pt):
    if all(np.ndim(z) == 0 for z in pt.z):
        return complex(np.asarray(val).reshape(()))
    return val


# --------------------------------------------------------------------------
# coefficient functions of the beta kernel


def h_coefficients(z, m: int, P: BalancedParams, b: Bases):
    """(h1(z, m), h2(z, m)): the ratios of the kernel under (pz, m-1) and (qz, m+1)."""
    p, q = b.p, b.q
    e = P.eps
    S = sum(P.n) + len(P.t) // 2 * e
    z = np.asarray(z, dtype=complex)
    M = 2 * m + e
    h1 = (q ** (M + 1) / (p * z**2)) ** S * b.pq
    h2 = (p ** (M + 1) / (q * z**2)) ** S * b.pq
    for t, n in zip(P.t, P.n):
        h1 = h1 * theta(t * z * q ** (-n - m - e), b.qr) / theta(p * z * q ** (1 + n - m) / t, b.qr)
        h2 = h2 * theta(t * z * p ** (n + m + e), b.pr) / theta(q * z * p ** (1 - n + m) / t, b.pr)
    h1 = h1 * theta((b.pq * z) ** 2 * q ** (-M), b.qr) / theta(z**2 * q ** (-M), b.qr)
    h2 = h2 * theta((b.pq * z) ** 2 * p**M, b.pr) / theta(z**2 * p**M, b.pr)
    if z.ndim == 0:
        return complex(h1), complex(h2)
    return h1, h2


# --------------------------------------------------------------------------
# elliptic hypergeometric equation and operator coefficients


def A_coefficient(t: Sequence[complex], b: Bases):
    """The q^r-elliptic coefficient of the rarefied elliptic hypergeometric equation.

    The partner equation with permuted bases uses ``b.swapped()``.
    """
    if len(t) != 8:
        raise ValueError("A_coefficient takes 8 parameters")
    t1, t2, t3 = t[0], t[1], t[2]
    qr = b.qr
    c = b.p * b.q ** (1 - b.r)
    num = theta(t1 / (c * t3), qr) * theta(t3 * t1, qr) * theta(t3 / t1, qr)
    den = theta(t1 / t2, qr) * theta(t2 / (c * t1), qr) * theta(t1 * t2 / c, qr)
    val = num / den
    for ta in t[3:]:
        val = val * theta(t2 * ta / c, qr) / theta(t3 * ta, qr)
    return complex(val)


def vandiejen_A(j: int, z: Sequence, m: Sequence[int], shifted: bool, P: BalancedParams, b: Bases):
    """A_j evaluated at z_k q^{-m_k} (``shifted=False``) or at z_k^{-1} q^{m_k} (``shifted=True``)."""
    if P.kind is not Kind.TYPEII_CD_V:
        raise ValueError("operator coefficients need the type II V kind")
    qr = b.qr
    c = b.p * b.q ** (1 - b.r)
    zs = [np.asarray(v, dtype=complex) for v in z]
    if shifted:
        w = [1.0 / zk * b.q**mk for zk, mk in zip(zs, m)]
    else:
        w = [zk * b.q ** (-mk) for zk, mk in zip(zs, m)]
    wj = w[j]
    val = 1.0 / (theta(wj**2, qr) * theta(c * wj**2, qr))
    for ta, na in zip(P.t, P.n):
        val = val * theta(ta * b.q ** (-na) * wj, qr)
    tq = P.tt * b.q ** (-P.nn) if P.tt is not None else None
    for l, wl in enumerate(w):
        if l == j:
            continue
        val = val * theta(tq * wj * wl, qr) * theta(tq * wj / wl, qr) / (theta(wj * wl, qr) * theta(wj / wl, qr))
    if np.ndim(val) == 0:
        return complex(val)
    return val


def reheq_sym_potential(x, s: Sequence[complex], k: Sequence[int], b: Bases):
    """A(x) = prod_a theta(s_a x q^{-k_a}) / theta(x^2, p q^{1-r} x^2), base q^r."""
    qr = b.qr
    c = b.p * b.q ** (1 - b.r)
    x = np.asarray(x, dtype=complex)
    val = 1.0 / (theta(x**2, qr) * theta(c * x**2, qr))
    for sa, ka in zip(s, k):
        val = val * theta(sa * x * b.q ** (-ka), qr)
    return complex(val) if np.ndim(val) == 0 else val


# --------------------------------------------------------------------------
# the theta-function identity behind the type I difference equation


def typeI_theta_identity(z: Sequence[complex], m: Sequence[int], t: Sequence[complex], n: Sequence[int], eps: int, b: Bases):
    """Both sides of the elliptic-function identity behind the type I C_n equation.

    ``t`` and ``n`` hold the first 2n+3 parameters; the last one is eliminated
    through A = prod t_a and N = sum n_a + (n+2) eps.  Returns (lhs, rhs).
    """
    rank = len(z)
    if len(t) != 2 * rank + 3:
        raise ValueError("need 2n+3 parameters")
    qr, q = b.qr, b.q
    A = complex(np.prod(t))
    N = sum(n) + (rank + 2) * eps
    t1, n1 = t[0], n[0]

    def th(x):
        return theta(x, qr)

    lhs = 1.0 + 0j
    for zj, mj in zip(z, m):
        lhs *= th(t1 * zj * q ** (-n1 - mj - eps)) * th(t1 / zj * q ** (-n1 + mj))
        lhs /= th(A * zj * q ** (-N - mj)) * th(A / zj * q ** (-N + mj + eps))
    for ta, na in zip(t[1:], n[1:]):
        lhs *= th(A / ta * q ** (-N + na + eps)) / th(t1 * ta * q ** (-n1 - na - eps))
    lhs -= 1.0

    pref = t1 * q ** (-n1) * th(t1 * A * q ** (-n1 - N))
    for ta, na in zip(t[1:], n[1:]):
        pref /= th(t1 * ta * q ** (-n1 - na - eps))
    total = 0j
    for kk in range(rank):
        zk, mk = z[kk], m[kk]
        term = q**mk / (zk * th(zk**2 * q ** (-2 * mk - eps)))
        for jj in range(rank):
            if jj == kk:
                continue
            zj, mj = z[jj], m[jj]
            term *= th(t1 * zj * q ** (-n1 - mj - eps)) * th(t1 / zj * q ** (-n1 + mj))
            term /= th(zk * zj * q ** (-mk - mj - eps)) * th(zk / zj * q ** (-mk + mj))
        first = zk ** (2 * rank + 2) / (q ** ((rank + 1) * (2 * mk + eps)) * th(A / zk * q ** (-N + mk + eps)))
        second = 1.0 / th(A * zk * q ** (-N - mk))
        for ta, na in zip(t, n):
            first *= th(ta / zk * q ** (-na + mk))
            second *= th(ta * zk * q ** (-na - mk - eps))
        total += term * (first - second)
    return complex(lhs), complex(pref * total)


__all__ = [
    "Kind",
    "BalancedParams",
    "LatticePoint",
    "Factor",
    "kernel_factors",
    "evaluate_factors",
    "kernel_beta",
    "kernel_typeI_Cn",
    "kernel_typeII",
    "kernel_An",
    "h_coefficients",
    "A_coefficient",
    "vandiejen_A",
    "reheq_sym_potential",
    "typeI_theta_identity",
]
