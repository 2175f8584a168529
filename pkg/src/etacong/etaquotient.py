"""Eta quotients: invariants, cusps, orders, and Fourier expansions.

An eta quotient is written "delta:r,delta:r,..." and stands for
prod eta(delta z)^r.  Expansions at a cusp a/c are computed by pushing the
cusp matrix through each eta(delta z) factor:

    (delta 0; 0 1) gamma = gamma' (A B; 0 D)

so that eta(delta z)|gamma = D^{-1/2} eps(gamma') eta((A z + B)/D), whose
product expansion is a pentagonal series in zeta_D^B q^{A/D}.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import (Mat2, cusp_matrix, divisors, eta_multiplier, euler_phi,
                    kronecker, lcm, square_class, unimodular)
from .cyclotomic import CyclotomicElement
from .qseries import (CyclotomicRing, IntegerRing, QSeries, euler_coeffs,
                      series_mul, series_pow)


class EtaQuotientError(ValueError):
    """Malformed or invalid eta-quotient text."""


class InternalConsistencyError(AssertionError):
    """A computed quantity disagrees with an independent formula."""


@dataclass(frozen=True)
class EtaQuotient:
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        fs = tuple(sorted((int(d), int(r)) for d, r in self.factors))
        object.__setattr__(self, "factors", fs)
        seen = set()
        for d, r in fs:
            if d <= 0:
                raise EtaQuotientError(f"delta must be positive, got {d}")
            if r == 0:
                raise EtaQuotientError(f"exponent for delta={d} is zero")
            if d in seen:
                raise EtaQuotientError(f"duplicate delta {d}")
            seen.add(d)

    @property
    def weight_numerator(self) -> int:
        return sum(r for _, r in self.factors)

    @property
    def is_valid(self) -> bool:
        return sum(d * r for d, r in self.factors) % 24 == 0

    @property
    def deltas(self) -> list[int]:
        return [d for d, _ in self.factors]

    def notation(self) -> str:
        return ",".join(f"{d}:{r}" for d, r in self.factors)

    def __str__(self):
        return self.notation()


_PAIR = re.compile(r"^\s*(\d+)\s*:\s*([+-]?\d+)\s*$")


def parse_eta_quotient(text: str, require_valid: bool = True) -> EtaQuotient:
    if not isinstance(text, str) or not text.strip():
        raise EtaQuotientError("empty eta-quotient text")
    pairs = []
    for chunk in text.split(","):
        m = _PAIR.match(chunk)
        if not m:
            raise EtaQuotientError(f"cannot parse {chunk!r}; expected delta:r")
        pairs.append((int(m.group(1)), int(m.group(2))))
    X = EtaQuotient(tuple(pairs))
    if require_valid and not X.is_valid:
        s = sum(d * r for d, r in X.factors)
        raise EtaQuotientError(f"sum of delta*r is {s}, not divisible by 24")
    return X


# --------------------------------------------------------------------------
# invariants
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EtaInvariants:
    weight_numerator: int          # weight is k/2
    level: int
    character_squareclass: int
    character_order: int

    @property
    def weight(self) -> Fraction:
        return Fraction(self.weight_numerator, 2)

    @property
    def half_integral(self) -> bool:
        return self.weight_numerator % 2 == 1

    @property
    def level4(self) -> int:
        """lcm(4, N): the level used for Sturm bounds in both weight parities."""
        return lcm(4, self.level)

    def character(self, d: int) -> int:
        return kronecker(self.character_squareclass, d)


def compute_level(X: EtaQuotient) -> int:
    """Smallest N divisible by every delta (and by 4 in odd weight) with
    N * sum(r/delta) = 0 mod 24."""
    base = lcm(*X.deltas)
    if X.weight_numerator % 2:
        base = lcm(base, 4)
    S = sum(Fraction(r, d) for d, r in X.factors)
    t = 1
    while True:
        val = base * t * S
        if val.denominator == 1 and val.numerator % 24 == 0:
            return base * t
        t += 1


def invariants(X: EtaQuotient) -> EtaInvariants:
    k = X.weight_numerator
    s = Fraction(1)
    for d, r in X.factors:
        s *= Fraction(d) ** r
    cls = square_class(2 * s if k % 2 else 4 * s)
    return EtaInvariants(k, compute_level(X), cls, 1 if cls == 1 else 2)


# --------------------------------------------------------------------------
# cusps
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Cusp:
    a: int
    c: int          # 0 encodes infinity
    N: int

    @property
    def width(self) -> int:
        return self.N // math.gcd(self.c * self.c, self.N)

    @property
    def is_infinity(self) -> bool:
        return self.c == 0

    @property
    def matrix(self) -> Mat2:
        return cusp_matrix(self.a, self.c)

    def label(self) -> str:
        return "oo" if self.c == 0 else f"{self.a}/{self.c}"

    def __str__(self):
        return self.label()


def cusp_representatives(N: int) -> list[Cusp]:
    """One a/c per Gamma0(N)-class; c | N, a mod gcd(c, N/c) coprime to it.

    The class with c = N is returned as infinity (c = 0).
    """
    out = []
    for c in divisors(N):
        if c == N:
            continue
        g = math.gcd(c, N // c)
        for a0 in range(g):
            if math.gcd(a0, g) != 1:
                continue
            a = a0
            while math.gcd(a, c) != 1:
                a += g
            out.append(Cusp(a, c, N))
    out.append(Cusp(1, 0, N))
    return out


def cusp_count(N: int) -> int:
    return sum(euler_phi(math.gcd(c, N // c)) for c in divisors(N))


def ord_at_cusp(X: EtaQuotient, s: Cusp) -> Fraction:
    """Order of vanishing in q_h at s = a/c (closed form, c = 0 for infinity)."""
    c = s.N if s.c == 0 else s.c
    h = Fraction(s.width)
    total = sum(Fraction(math.gcd(c, d) ** 2 * r, d) for d, r in X.factors)
    return h * total / 24


def total_order(X: EtaQuotient, N: int | None = None) -> Fraction:
    N = N or invariants(X).level
    return sum((ord_at_cusp(X, s) for s in cusp_representatives(N)), Fraction(0))


# --------------------------------------------------------------------------
# matrix decomposition
# --------------------------------------------------------------------------

def matrix_decompose(delta: int, gamma: Mat2) -> tuple[Mat2, int, int, int]:
    """gamma', A, B, D with (delta 0; 0 1) gamma = gamma' (A B; 0 D), 0 <= B < D."""
    a, b, c, d = gamma.a, gamma.b, gamma.c, gamma.d
    A = math.gcd(c, delta)
    D = delta // A
    c1 = c // A
    B = (d * pow(c1, -1, D)) % D if D > 1 else 0
    num = A * d - B * c
    if num % delta:
        raise InternalConsistencyError("decomposition congruence failed")
    gp = unimodular(a * D, b * A - a * B, c1, num // delta)
    lhs = Mat2(delta * a, delta * b, c, d)
    if gp @ Mat2(A, B, 0, D) != lhs:
        raise InternalConsistencyError("decomposition identity failed")
    return gp, A, B, D


# --------------------------------------------------------------------------
# expansion at infinity
# --------------------------------------------------------------------------

def expand_at_infinity(X: EtaQuotient, precision, ring=None) -> QSeries:
    """prod eta(delta z)^r in q, every exponent below `precision`."""
    ring = ring or IntegerRing()
    precision = Fraction(precision)
    offset = Fraction(sum(d * r for d, r in X.factors), 24)
    rel = precision - offset          # needed precision of the E-product
    acc = None
    for d, r in X.factors:
        n = max(1, math.ceil(rel / d))
        E = QSeries(ring, 0, 1, euler_coeffs(n, ring), n)
        part = series_pow(E, r).stretch(d)
        acc = part if acc is None else series_mul(acc, part)
    if rel <= 0:
        return QSeries(ring, offset, 1, ring.zeros(0), precision)
    return acc.truncate(rel).shifted(offset)


# --------------------------------------------------------------------------
# expansion at a cusp
# --------------------------------------------------------------------------

@dataclass
class FactorData:
    delta: int
    r: int
    gamma_prime: Mat2
    A: int
    B: int
    D: int
    multiplier: int          # eps(gamma') = zeta_24^multiplier


@dataclass
class CuspExpansion:
    cusp: Cusp
    series: QSeries          # in q_h, coefficients in Q(zeta_M)
    r_s: int | None
    order: Fraction
    scalar_squared: Fraction     # dropped positive scalar is its square root
    factors: list[FactorData] = field(default_factory=list)

    @property
    def width(self) -> int:
        return self.cusp.width

    @property
    def conductor(self) -> int:
        return self.series.ring.M

    def principal_part(self) -> dict:
        return {e: c for e, c in self.series.terms().items() if e < 0}

    def evaluate(self, z: complex) -> complex:
        """Numerical value of the truncated expansion times the dropped scalar."""
        import cmath
        h = self.width
        total = 0j
        for e, c in self.series.terms().items():
            total += c.to_complex() * cmath.exp(2j * cmath.pi * z * float(e) / h)
        return total * math.sqrt(self.scalar_squared)


def expand_at_cusp(X: EtaQuotient, s: Cusp, term_count: int) -> CuspExpansion:
    """First term_count terms (exponents order, order+1, ...) of X|gamma_s in q_h."""
    gamma = s.matrix
    h = s.width
    facs = []
    offset = Fraction(0)
    turn = Fraction(0)                 # root of unity scalar, in turns
    scalar_sq = Fraction(1)
    steps = []
    M = 1
    for d, r in X.factors:
        gp, A, B, D = matrix_decompose(d, gamma)
        t = eta_multiplier(gp)
        facs.append(FactorData(d, r, gp, A, B, D, t))
        offset += r * Fraction(h * A, 24 * D)
        turn += r * (Fraction(t, 24) + Fraction(B, 24 * D))
        scalar_sq *= Fraction(D) ** (-r)
        step = Fraction(h * A, D)
        if step.denominator != 1:
            raise InternalConsistencyError(f"non-integral step {step} at cusp {s}")
        steps.append(int(step))
        M = lcm(M, D)
    order = ord_at_cusp(X, s)
    if offset != order:
        raise InternalConsistencyError(f"expansion order {offset} != closed form {order} at {s}")
    r4 = (offset - math.floor(offset)) * 4
    if X.is_valid and r4.denominator != 1:
        raise InternalConsistencyError(f"exponent class {offset} mod 1 is not a multiple of 1/4")
    turn -= math.floor(turn)
    M = lcm(M, turn.denominator)

    # group-ring convolution: index -> {power of zeta_M: integer}
    acc: dict[int, dict[int, int]] = {0: {0: 1}}
    for f, step in zip(facs, steps):
        nterms = (term_count - 1) // step + 1
        E = QSeries(IntegerRing(), 0, 1, euler_coeffs(nterms, IntegerRing()), nterms)
        coeffs = series_pow(E, f.r).coeffs
        zpow = (M // f.D) * f.B           # zeta_D^B = zeta_M^zpow
        new: dict[int, dict[int, int]] = {}
        for i, ci in acc.items():
            for mm, cm in enumerate(coeffs):
                if not cm:
                    continue
                j = i + mm * step
                if j >= term_count:
                    break
                slot = new.setdefault(j, {})
                for t, v in ci.items():
                    key = (t + zpow * mm) % M
                    slot[key] = slot.get(key, 0) + v * cm
        acc = new

    shift_pow = int(turn * M)
    vals = []
    for i in range(term_count):
        powers = {(t + shift_pow) % M: v for t, v in acc.get(i, {}).items()}
        vals.append(CyclotomicElement.from_powers(M, powers))
    ring = CyclotomicRing(M)
    series = QSeries(ring, offset, 1, vals, offset + term_count)
    r_s = int(r4) if r4.denominator == 1 else None     # None only for invalid quotients
    return CuspExpansion(s, series, r_s, order, scalar_sq, facs)


def expansion_exponent_class(E: CuspExpansion) -> int:
    """r_s recomputed from the stored exponents; every term must agree."""
    classes = set()
    for e in E.series.terms():
        frac = (e - math.floor(e)) * 4
        if frac.denominator != 1:
            raise InternalConsistencyError(f"exponent {e} not in (1/4)Z")
        classes.add(int(frac))
    if len(classes) > 1:
        raise InternalConsistencyError(f"exponents fall into several classes {classes}")
    return classes.pop() if classes else E.r_s
