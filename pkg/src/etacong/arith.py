"""Exact integer, modular and matrix arithmetic.

Everything here is a pure function on immutable values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


# --------------------------------------------------------------------------
# elementary number theory
# --------------------------------------------------------------------------

def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; fine for the levels and indices we meet."""
    n = abs(n)
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def lcm(*args: int) -> int:
    out = 1
    for a in args:
        out = out * a // math.gcd(out, a)
    return out


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel: n = sqf * square."""
    if n == 0:
        raise ValueError("zero has no squarefree part")
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in factorize(n).items():
        if e % 2:
            out *= p
    return sign * out


def square_class(x: Fraction | int) -> int:
    """Squarefree integer in the same square class as the nonzero rational x."""
    x = Fraction(x)
    return squarefree_part(x.numerator * x.denominator)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24 (so all of 64-bit)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError("jacobi symbol needs odd positive n")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(a: int | Fraction, n: int) -> int:
    """Extended Kronecker symbol (a/n).

    A rational a = u/v is replaced by u*v (same square class); this is only
    meaningful when gcd(v, n) = 1, which is the case for characters evaluated
    at integers coprime to the level.
    """
    if isinstance(a, Fraction):
        a = a.numerator * a.denominator
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * jacobi(a, n)


# --------------------------------------------------------------------------
# residues
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Residue:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus <= 1:
            raise ValueError("modulus must exceed 1")
        object.__setattr__(self, "value", self.value % self.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, Residue):
            if other.modulus != self.modulus:
                raise ValueError("residue moduli differ")
            return other.value
        return int(other)

    def __add__(self, other):
        return Residue(self.value + self._coerce(other), self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        return Residue(self.value - self._coerce(other), self.modulus)

    def __rsub__(self, other):
        return Residue(self._coerce(other) - self.value, self.modulus)

    def __mul__(self, other):
        return Residue(self.value * self._coerce(other), self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue(-self.value, self.modulus)

    def __pow__(self, e: int):
        return Residue(pow(self.value, e, self.modulus), self.modulus)

    def inverse(self) -> "Residue":
        return Residue(pow(self.value, -1, self.modulus), self.modulus)

    def is_zero(self) -> bool:
        return self.value == 0

    def __int__(self):
        return self.value


# --------------------------------------------------------------------------
# SL2(Z) and the eta multiplier
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Mat2:
    """Integer 2x2 matrix (a b; c d); SL2(Z) elements have det 1."""

    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                    self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def __neg__(self):
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def act(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)

    def inverse(self) -> "Mat2":
        if self.det != 1:
            raise ValueError("only SL2(Z) inverses are supported")
        return Mat2(self.d, -self.b, -self.c, self.a)


def unimodular(a: int, b: int, c: int, d: int) -> Mat2:
    m = Mat2(a, b, c, d)
    if m.det != 1:
        raise ValueError(f"{m} is not in SL2(Z)")
    return m


IDENTITY = Mat2(1, 0, 0, 1)
T_MATRIX = Mat2(1, 1, 0, 1)
S_MATRIX = Mat2(0, -1, 1, 0)


@lru_cache(maxsize=4096)
def dedekind_sum(h: int, k: int) -> Fraction:
    """s(h, k) for k > 0, via the reciprocity law."""
    if k <= 0:
        raise ValueError("k must be positive")
    sign = 1
    total = Fraction(0)
    h %= k
    while h:
        # s(h,k) = (h^2 + k^2 + 1)/(12hk) - 1/4 - s(k mod h, h)
        total += sign * (Fraction(h * h + k * k + 1, 12 * h * k) - Fraction(1, 4))
        sign = -sign
        h, k = k % h, h
    return total


def eta_multiplier(gamma: Mat2) -> int:
    """Exponent t (mod 24) with eta|_{1/2} gamma = exp(2 pi i t/24) eta.

    The slash uses the principal branch of (cz+d)^{1/2}.  For c > 0 this is
    Rademacher's closed form eta(gamma z) = exp(pi i((a+d)/(12c) - s(d,c)))
    (-i(cz+d))^{1/2} eta(z); the factor (-i)^{1/2} contributes -3.
    """
    a, b, c, d = gamma.a, gamma.b, gamma.c, gamma.d
    if gamma.det != 1:
        raise ValueError("gamma must lie in SL2(Z)")
    if c < 0 or (c == 0 and d < 0):
        t = eta_multiplier(-gamma)
        # principal branch: (-w)^{-1/2} = i w^{-1/2} for w in the upper half
        # plane, and (-1)^{-1/2} = -i
        return (t + 6) % 24 if c != 0 else (t - 6) % 24
    if c == 0:
        return b % 24
    t = Fraction(a + d, c) - 12 * dedekind_sum(d, c) - 3
    if t.denominator != 1:
        raise AssertionError(f"non-integral eta multiplier exponent for {gamma}")
    return int(t) % 24


def cusp_matrix(a: int, c: int) -> Mat2:
    """gamma_s in SL2(Z) with gamma_s(infinity) = a/c, small entries.

    c = 0 encodes infinity (identity matrix).
    """
    if c == 0:
        return IDENTITY
    if math.gcd(a, c) != 1:
        raise ValueError("cusp a/c must be in lowest terms")
    d = pow(a, -1, c) if c > 1 else 0
    if 2 * d > c:
        d -= c
    b = (a * d - 1) // c
    return unimodular(a, b, c, d)
