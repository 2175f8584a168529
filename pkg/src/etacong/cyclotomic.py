"""Exact arithmetic in Q(zeta_M).

Elements are stored sparsely in the tensor-product power basis
Q(zeta_M) = (x) Q(zeta_{p^e}) over the prime powers p^e || M, where each
factor uses {zeta_{p^e}^i : 0 <= i < phi(p^e)}.  This basis is a genuine
basis, so an element is zero iff every stored coefficient is zero.  It keeps
conductors like lcm(32, 27, 25, 7) cheap, where a dense vector of length
phi(M) reduced modulo Phi_M would not be.
"""
from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .arith import euler_phi, factorize, lcm


@lru_cache(maxsize=256)
def _layout(M: int):
    """Prime-power components of M and the CRT multipliers for zeta_M."""
    comps = []
    for p, e in sorted(factorize(M).items()):
        pe = p**e
        u = pow(M // pe, -1, pe) if pe > 1 else 0
        comps.append((p, e, pe, u))
    return tuple(comps)


@lru_cache(maxsize=65536)
def _reduce_pp(p: int, e: int, u: int) -> tuple[tuple[int, int], ...]:
    """zeta_{p^e}^u in the power basis, as ((index, sign), ...)."""
    pe = p**e
    u %= pe
    phi = pe - pe // p
    if u < phi:
        return ((u, 1),)
    i = u - phi
    step = pe // p
    return tuple((i + k * step, -1) for k in range(p - 1))


@lru_cache(maxsize=65536)
def _reduce_power(M: int, t: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """zeta_M^t as a list of (basis key, sign)."""
    t %= M
    parts = [_reduce_pp(p, e, t * u) for p, e, _pe, u in _layout(M)]
    out = []
    for combo in product(*parts):
        key = tuple(ix for ix, _ in combo)
        sign = 1
        for _, s in combo:
            sign *= s
        out.append((key, sign))
    return tuple(out)


def _key_to_power(M: int, key: tuple[int, ...]) -> int:
    """Exponent t with zeta_M^t equal to the basis monomial `key`."""
    t = 0
    for (p, e, pe, _u), ix in zip(_layout(M), key):
        t += ix * (M // pe)
    return t % M


def cyclotomic_poly(n: int) -> list[int]:
    """Integer coefficients (low degree first) of the n-th cyclotomic polynomial."""
    # Phi_n = prod_{d | n} (x^d - 1)^{mu(n/d)}
    num = [1]
    den = [1]
    fac = factorize(n)
    primes = list(fac)
    for mask in range(1 << len(primes)):
        sq = 1
        bits = 0
        for i, p in enumerate(primes):
            if mask >> i & 1:
                sq *= p
                bits += 1
        d = n // sq
        poly = [-1] + [0] * (d - 1) + [1]
        if bits % 2 == 0:
            num = _pmul(num, poly)
        else:
            den = _pmul(den, poly)
    return _pdiv_exact(num, den)


def _pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pdiv_exact(a, b):
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        out[i] = c
        for j, y in enumerate(b):
            a[i + j] -= c * y
    assert not any(a), "inexact cyclotomic division"
    return out


class CyclotomicElement:
    """Immutable element of Q(zeta_M)."""

    __slots__ = ("M", "terms", "_hash")

    def __init__(self, M: int, terms: dict | None = None):
        if M < 1:
            raise ValueError("conductor must be positive")
        self.M = M
        self.terms = {k: v for k, v in (terms or {}).items() if v}
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, M: int) -> "CyclotomicElement":
        return cls(M)

    @classmethod
    def from_int(cls, M: int, c) -> "CyclotomicElement":
        return cls.from_powers(M, {0: c})

    @classmethod
    def zeta(cls, M: int, t: int = 1) -> "CyclotomicElement":
        return cls.from_powers(M, {t: 1})

    @classmethod
    def from_powers(cls, M: int, powers: dict[int, int | Fraction]) -> "CyclotomicElement":
        """sum c_t zeta_M^t, reduced to the basis."""
        acc: dict = {}
        for t, c in powers.items():
            if not c:
                continue
            for key, s in _reduce_power(M, t):
                acc[key] = acc.get(key, 0) + s * c
        return cls(M, acc)

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "CyclotomicElement"):
        if not isinstance(other, CyclotomicElement):
            raise TypeError("expected a CyclotomicElement")
        if other.M != self.M:
            raise ValueError(f"conductor mismatch: {self.M} vs {other.M}; embed first")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CyclotomicElement.from_int(self.M, other)
        self._check(other)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, 0) + v
        return CyclotomicElement(self.M, acc)

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicElement(self.M, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicElement(self.M, {k: v * other for k, v in self.terms.items()})
        self._check(other)
        powers: dict[int, int] = {}
        for k1, v1 in self.terms.items():
            t1 = _key_to_power(self.M, k1)
            for k2, v2 in other.terms.items():
                t = (t1 + _key_to_power(self.M, k2)) % self.M
                powers[t] = powers.get(t, 0) + v1 * v2
        return CyclotomicElement.from_powers(self.M, powers)

    __rmul__ = __mul__

    def times_zeta(self, t: int) -> "CyclotomicElement":
        powers: dict[int, int] = {}
        for k, v in self.terms.items():
            s = (_key_to_power(self.M, k) + t) % self.M
            powers[s] = powers.get(s, 0) + v
        return CyclotomicElement.from_powers(self.M, powers)

    def embed(self, M2: int) -> "CyclotomicElement":
        if M2 % self.M:
            raise ValueError(f"cannot embed conductor {self.M} into {M2}")
        r = M2 // self.M
        powers = {}
        for k, v in self.terms.items():
            t = _key_to_power(self.M, k) * r % M2
            powers[t] = powers.get(t, 0) + v
        return CyclotomicElement.from_powers(M2, powers)

    # queries ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CyclotomicElement.from_int(self.M, other)
        if not isinstance(other, CyclotomicElement):
            return NotImplemented
        if other.M != self.M:
            L = lcm(self.M, other.M)
            return self.embed(L).terms == other.embed(L).terms
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.M, frozenset(self.terms.items())))
        return self._hash

    def to_complex(self) -> complex:
        z = 0j
        for k, v in self.terms.items():
            z += float(v) * cmath.exp(2j * cmath.pi * _key_to_power(self.M, k) / self.M)
        return z

    def coefficient_vector(self) -> list:
        """Dense coordinates in the tensor power basis (length phi(M))."""
        dims = [pe - pe // p for p, _e, pe, _u in _layout(self.M)]
        out = [0] * euler_phi(self.M)
        for key, v in self.terms.items():
            ix = 0
            for d, i in zip(dims, key):
                ix = ix * d + i
            out[ix] = v
        return out

    def to_powers(self) -> list[tuple[int, Fraction]]:
        """Basis coordinates as (t, c) pairs meaning c * zeta_M^t, sorted by t."""
        return sorted((_key_to_power(self.M, k), Fraction(v)) for k, v in self.terms.items())

    def as_integer(self):
        """The rational value if the element lies in Q, else None."""
        if not self.terms:
            return 0
        zero_key = tuple(0 for _ in _layout(self.M))
        if set(self.terms) == {zero_key}:
            return self.terms[zero_key]
        return None

    def __repr__(self):
        if not self.terms:
            return f"0 (in Q(zeta_{self.M}))"
        parts = []
        for k, v in sorted(self.terms.items()):
            parts.append(f"{v}*z^{_key_to_power(self.M, k)}")
        return " + ".join(parts) + f" (zeta_{self.M})"
