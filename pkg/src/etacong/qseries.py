"""Truncated q-series with rational exponents over a pluggable ring.

A series stores dense coefficients c[i] of q^(shift + i/den) together with a
truncation order `prec`: every exponent below prec is known exactly, nothing
at or above it is.  Operations track the attainable precision and refuse to
produce terms they cannot determine.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import fastconv
from .cyclotomic import CyclotomicElement


class PrecisionError(ValueError):
    """Requested terms are not determined by the inputs."""


class RingMismatch(TypeError):
    pass


class NonUnitError(ArithmeticError):
    """Leading coefficient is not invertible in the coefficient ring."""


# --------------------------------------------------------------------------
# coefficient rings
# --------------------------------------------------------------------------

class IntegerRing:
    tag = "integer"

    def __eq__(self, other):
        return isinstance(other, IntegerRing)

    def __hash__(self):
        return hash(self.tag)

    def __repr__(self):
        return "ZZ"

    def zeros(self, n):
        return [0] * n

    def coerce(self, values):
        return [int(v) for v in values]

    def from_int(self, c):
        return int(c)

    def is_zero(self, x):
        return x == 0

    def is_unit(self, x):
        return x in (1, -1)

    def inverse(self, x):
        if x not in (1, -1):
            raise NonUnitError(f"{x} is not a unit in ZZ")
        return x

    def mul_trunc(self, a, b, n):
        return fastconv.mul_integer(a, b, n)

    def add(self, a, b):
        n = max(len(a), len(b))
        return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]

    def scale(self, a, c):
        return [c * x for x in a]

    def sparse_mul(self, dense, idx, vals, n):
        out = [0] * n
        for s, c in zip(idx, vals):
            for k in range(min(len(dense), n - s)):
                if dense[k]:
                    out[s + k] += c * dense[k]
        return out

    def to_python(self, x):
        return int(x)


class ResidueRing:
    tag = "residue"

    def __init__(self, m: int):
        if m <= 1:
            raise ValueError("modulus must exceed 1")
        if m.bit_length() > 62:
            raise ValueError("residue rings are limited to moduli below 2^62")
        self.m = int(m)

    def __eq__(self, other):
        return isinstance(other, ResidueRing) and other.m == self.m

    def __hash__(self):
        return hash((self.tag, self.m))

    def __repr__(self):
        return f"ZZ/{self.m}"

    def zeros(self, n):
        return np.zeros(n, dtype=np.int64)

    def coerce(self, values):
        if isinstance(values, np.ndarray) and values.dtype != object:
            return values.astype(np.int64) % self.m
        return np.array([int(v) % self.m for v in values], dtype=np.int64)

    def from_int(self, c):
        return int(c) % self.m

    def is_zero(self, x):
        return int(x) % self.m == 0

    def is_unit(self, x):
        return math.gcd(int(x), self.m) == 1

    def inverse(self, x):
        if not self.is_unit(x):
            raise NonUnitError(f"{x} is not invertible mod {self.m}")
        return pow(int(x), -1, self.m)

    def mul_trunc(self, a, b, n):
        return fastconv.mulmod(a, b, n, self.m)

    def add(self, a, b):
        n = max(len(a), len(b))
        out = np.zeros(n, dtype=np.int64)
        out[:len(a)] += a
        out[:len(b)] += b
        return out % self.m

    def scale(self, a, c):
        return (np.asarray(a, dtype=np.int64) * (int(c) % self.m)) % self.m

    def sparse_mul(self, dense, idx, vals, n):
        return fastconv.sparse_dense_mul(np.asarray(dense, dtype=np.int64),
                                         np.asarray(idx, dtype=np.int64),
                                         np.asarray(vals, dtype=np.int64) % self.m, n, self.m)

    def to_python(self, x):
        return int(x)


class CyclotomicRing:
    tag = "cyclotomic"

    def __init__(self, M: int):
        self.M = int(M)

    def __eq__(self, other):
        return isinstance(other, CyclotomicRing) and other.M == self.M

    def __hash__(self):
        return hash((self.tag, self.M))

    def __repr__(self):
        return f"Q(zeta_{self.M})"

    def zeros(self, n):
        z = CyclotomicElement.zero(self.M)
        return [z] * n

    def coerce(self, values):
        out = []
        for v in values:
            if isinstance(v, CyclotomicElement):
                out.append(v if v.M == self.M else v.embed(self.M))
            else:
                out.append(CyclotomicElement.from_int(self.M, v))
        return out

    def from_int(self, c):
        return CyclotomicElement.from_int(self.M, c)

    def is_zero(self, x):
        return x.is_zero()

    def is_unit(self, x):
        return not x.is_zero() and self._unit_inverse(x) is not None

    def _unit_inverse(self, x):
        # only +-zeta^t are inverted; that is all the expansions ever need
        if len(x.terms) == 1:
            for t in range(self.M):
                y = CyclotomicElement.zeta(self.M, t)
                for s in (1, -1):
                    if (x * (y * s)) == 1:
                        return y * s
        v = x.as_integer()
        if v is not None and v != 0:
            return CyclotomicElement.from_int(self.M, Fraction(1) / v)
        return None

    def inverse(self, x):
        inv = self._unit_inverse(x)
        if inv is None:
            raise NonUnitError(f"cannot invert {x}")
        return inv

    def mul_trunc(self, a, b, n):
        out = self.zeros(n)
        nz_b = [(j, y) for j, y in enumerate(b[:n]) if not y.is_zero()]
        for i, x in enumerate(a[:n]):
            if x.is_zero():
                continue
            for j, y in nz_b:
                if i + j >= n:
                    break
                out[i + j] = out[i + j] + x * y
        return out

    def add(self, a, b):
        n = max(len(a), len(b))
        z = CyclotomicElement.zero(self.M)
        return [(a[i] if i < len(a) else z) + (b[i] if i < len(b) else z) for i in range(n)]

    def scale(self, a, c):
        return [x * c for x in a]

    def sparse_mul(self, dense, idx, vals, n):
        out = self.zeros(n)
        for s, c in zip(idx, vals):
            for k in range(min(len(dense), n - s)):
                if not dense[k].is_zero():
                    out[s + k] = out[s + k] + c * dense[k]
        return out

    def to_python(self, x):
        return x


def make_ring(tag: str, modulus: int | None = None):
    if tag in ("integer", "ZZ", "int"):
        return IntegerRing()
    if tag in ("residue", "mod"):
        return ResidueRing(modulus)
    if tag in ("cyclotomic",):
        return CyclotomicRing(modulus)
    raise ValueError(f"unknown ring tag {tag!r}")


# --------------------------------------------------------------------------
# the series type
# --------------------------------------------------------------------------

def _terms_below(shift: Fraction, den: int, prec: Fraction) -> int:
    """Number of indices i >= 0 with shift + i/den < prec."""
    x = (prec - shift) * den
    return max(0, math.ceil(x))


class QSeries:
    __slots__ = ("ring", "shift", "den", "coeffs", "prec")

    def __init__(self, ring, shift, den: int, coeffs, prec):
        self.ring = ring
        self.shift = Fraction(shift)
        self.den = int(den)
        self.prec = Fraction(prec)
        n = _terms_below(self.shift, self.den, self.prec)
        coeffs = ring.coerce(coeffs) if not _already(ring, coeffs) else coeffs
        if len(coeffs) < n:
            coeffs = _concat(ring, coeffs, ring.zeros(n - len(coeffs)))
        self.coeffs = coeffs[:n]

    # construction -------------------------------------------------------
    @classmethod
    def from_terms(cls, ring, terms: dict, prec, den: int | None = None):
        """Build from {exponent: coefficient}."""
        exps = [Fraction(e) for e in terms]
        if den is None:
            den = 1
            for e in exps:
                den = den * e.denominator // math.gcd(den, e.denominator)
        shift = min(exps) if exps else Fraction(prec)
        n = _terms_below(shift, den, Fraction(prec))
        vals = [0] * n
        for e, c in terms.items():
            i = (Fraction(e) - shift) * den
            if i.denominator != 1:
                raise ValueError("exponent incompatible with denominator")
            if int(i) < n:
                vals[int(i)] = c
        if ring.tag == "cyclotomic":
            vals = [v if isinstance(v, CyclotomicElement) else ring.from_int(v) for v in vals]
        return cls(ring, shift, den, vals, prec)

    @classmethod
    def one(cls, ring, prec):
        return cls.from_terms(ring, {0: 1}, prec)

    # basic queries ------------------------------------------------------
    def exponent(self, i: int) -> Fraction:
        return self.shift + Fraction(i, self.den)

    def __len__(self):
        return len(self.coeffs)

    def terms(self) -> dict:
        out = {}
        for i, c in enumerate(self.coeffs):
            if not self.ring.is_zero(c):
                out[self.exponent(i)] = self.ring.to_python(c)
        return out

    def coefficient(self, e) -> object:
        e = Fraction(e)
        if e >= self.prec:
            raise PrecisionError(f"exponent {e} is beyond the truncation order {self.prec}")
        i = (e - self.shift) * self.den
        if i < 0 or i.denominator != 1:
            return self.ring.to_python(self.ring.from_int(0))
        return self.ring.to_python(self.coeffs[int(i)])

    def first_index(self):
        for i, c in enumerate(self.coeffs):
            if not self.ring.is_zero(c):
                return i
        return None

    def valuation(self) -> Fraction | None:
        """Leading exponent, or None if no nonzero term is known."""
        i = self.first_index()
        return None if i is None else self.exponent(i)

    def density(self) -> float:
        if not len(self.coeffs):
            return 0.0
        nz = sum(1 for c in self.coeffs if not self.ring.is_zero(c)) \
            if self.ring.tag != "residue" else int(np.count_nonzero(self.coeffs))
        return nz / len(self.coeffs)

    # reshaping ----------------------------------------------------------
    def normalized(self) -> "QSeries":
        """Drop leading zeros so that coeffs[0] is the leading term."""
        i = self.first_index()
        if not i:
            return self
        return QSeries(self.ring, self.exponent(i), self.den, self.coeffs[i:], self.prec)

    def with_den(self, den: int) -> "QSeries":
        if den == self.den:
            return self
        if den % self.den:
            raise ValueError("new denominator must be a multiple")
        r = den // self.den
        n = _terms_below(self.shift, den, self.prec)
        vals = self.ring.zeros(n)
        if self.ring.tag == "residue":
            vals[::r] = self.coeffs[:len(vals[::r])]
        else:
            for i, c in enumerate(self.coeffs):
                if i * r < n:
                    vals[i * r] = c
        return QSeries(self.ring, self.shift, den, vals, self.prec)

    def stretch(self, k: int) -> "QSeries":
        """Substitute q -> q^k."""
        g = math.gcd(self.den, k)
        new_den = self.den // g
        step = k // g
        new = QSeries(self.ring, self.shift * k, new_den, self.ring.zeros(0), self.prec * k)
        vals = self.ring.zeros(len(new.coeffs))
        if self.ring.tag == "residue":
            src = self.coeffs[: -(-len(vals) // step)]
            vals[::step] = src
        else:
            for i, c in enumerate(self.coeffs):
                if i * step < len(vals):
                    vals[i * step] = c
        new.coeffs = vals
        return new

    def shifted(self, s) -> "QSeries":
        """Multiply by q^s."""
        s = Fraction(s)
        return QSeries(self.ring, self.shift + s, self.den, self.coeffs, self.prec + s)

    def truncate(self, prec) -> "QSeries":
        prec = Fraction(prec)
        if prec > self.prec:
            raise PrecisionError("cannot raise the truncation order")
        return QSeries(self.ring, self.shift, self.den, self.coeffs, prec)

    def reduce(self, m: int) -> "QSeries":
        if self.ring.tag != "integer":
            raise RingMismatch("only integer series can be reduced")
        R = ResidueRing(m)
        return QSeries(R, self.shift, self.den, R.coerce(self.coeffs), self.prec)

    def scale(self, c) -> "QSeries":
        return QSeries(self.ring, self.shift, self.den, self.ring.scale(self.coeffs, c), self.prec)

    def __add__(self, other: "QSeries") -> "QSeries":
        _check_ring(self, other)
        den = _lcm(self.den, other.den)
        a, b = self.with_den(den), other.with_den(den)
        shift = min(a.shift, b.shift)
        prec = min(a.prec, b.prec)
        n = _terms_below(shift, den, prec)

        def placed(s):
            off = int((s.shift - shift) * den)
            return _concat(s.ring, s.ring.zeros(off), s.coeffs)[:n]

        return QSeries(self.ring, shift, den, self.ring.add(placed(a), placed(b)), prec)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __repr__(self):
        items = list(self.terms().items())[:6]
        body = " + ".join(f"({c})q^{e}" for e, c in items)
        return f"QSeries[{self.ring}]({body} + O(q^{self.prec}))"

    def equal_terms(self, other: "QSeries") -> bool:
        return self.terms() == other.terms()


def _already(ring, coeffs) -> bool:
    if ring.tag == "residue":
        return isinstance(coeffs, np.ndarray) and coeffs.dtype == np.int64
    if ring.tag == "cyclotomic":
        return all(isinstance(c, CyclotomicElement) and c.M == ring.M for c in coeffs)
    return isinstance(coeffs, list) and all(type(c) is int for c in coeffs)


def _concat(ring, a, b):
    if ring.tag == "residue":
        return np.concatenate([np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)])
    return list(a) + list(b)


def _lcm(a, b):
    return a * b // math.gcd(a, b)


def _check_ring(f, g):
    if f.ring != g.ring:
        raise RingMismatch(f"ring mismatch: {f.ring} vs {g.ring}")


# --------------------------------------------------------------------------
# arithmetic
# --------------------------------------------------------------------------

def _lead_or_prec(f: QSeries) -> Fraction:
    v = f.valuation()
    return f.prec if v is None else v


def series_mul(f: QSeries, g: QSeries, prec=None) -> QSeries:
    """Truncated product; prec defaults to the largest attainable order."""
    _check_ring(f, g)
    attainable = min(f.prec + _lead_or_prec(g), g.prec + _lead_or_prec(f))
    if prec is None:
        prec = attainable
    prec = Fraction(prec)
    if prec > attainable:
        raise PrecisionError(f"product is only determined below q^{attainable}, asked {prec}")
    f, g = f.normalized(), g.normalized()
    den = _lcm(f.den, g.den)
    f, g = f.with_den(den), g.with_den(den)
    shift = f.shift + g.shift
    n = _terms_below(shift, den, prec)
    ring = f.ring
    if n == 0:
        return QSeries(ring, shift, den, ring.zeros(0), prec)
    a, b = f.coeffs[:n], g.coeffs[:n]
    # sparse operand: shift-and-add copies of the dense one
    da, db = f.density(), g.density()
    if min(da, db) < 0.125 and len(a) > 64 and len(b) > 64:
        sp, dn = (a, b) if da <= db else (b, a)
        if ring.tag == "residue":
            idx = np.nonzero(sp)[0]
            vals = sp[idx]
        else:
            idx = [i for i, c in enumerate(sp) if not ring.is_zero(c)]
            vals = [sp[i] for i in idx]
        out = ring.sparse_mul(dn, idx, vals, n)
    else:
        out = ring.mul_trunc(a, b, n)
    return QSeries(ring, shift, den, out, prec)


def _inverse_coeffs(ring, u, n):
    """Newton iteration for 1/u mod q^n, u[0] a unit."""
    c0 = ring.inverse(u[0])
    if ring.tag == "residue":
        g = np.array([c0], dtype=np.int64)
    else:
        g = [c0] if ring.tag == "integer" else [ring.coerce([c0])[0]]
    k = 1
    while k < n:
        k = min(2 * k, n)
        # g <- g + g (1 - u g)
        ug = ring.mul_trunc(u[:k], g, k)
        e = ring.scale(ug, -1)
        e = _set_first(ring, e, 1)
        corr = ring.mul_trunc(g, e, k)
        g = ring.add(_pad(ring, g, k), corr)[:k]
    return g[:n]


def _set_first(ring, e, delta):
    if ring.tag == "residue":
        e = e.copy()
        e[0] = (e[0] + delta) % ring.m
        return e
    e = list(e)
    e[0] = e[0] + delta if ring.tag == "integer" else e[0] + ring.from_int(delta)
    return e


def _pad(ring, a, n):
    if len(a) >= n:
        return a
    return _concat(ring, a, ring.zeros(n - len(a)))


def series_inv(f: QSeries, prec=None) -> QSeries:
    """1/f; f's leading coefficient must be a unit."""
    u = f.normalized()
    v = u.valuation()
    if v is None:
        raise NonUnitError("cannot invert a series with no known nonzero term")
    if not u.ring.is_unit(u.coeffs[0]):
        raise NonUnitError(f"leading coefficient {u.coeffs[0]} is not a unit in {u.ring}")
    attainable = f.prec - 2 * v
    if prec is None:
        prec = attainable
    prec = Fraction(prec)
    if prec > attainable:
        raise PrecisionError(f"inverse is only determined below q^{attainable}, asked {prec}")
    n = _terms_below(-v, u.den, prec)
    coeffs = _inverse_coeffs(u.ring, u.coeffs, n) if n else u.ring.zeros(0)
    return QSeries(u.ring, -v, u.den, coeffs, prec)


def series_pow(f: QSeries, r: int, prec=None) -> QSeries:
    """f^r by square-and-multiply; r < 0 goes through series_inv."""
    u = f.normalized()
    v = u.valuation()
    if r == 0:
        p = Fraction(prec) if prec is not None else None
        if p is None:
            raise PrecisionError("f^0 needs an explicit precision")
        return QSeries.one(f.ring, p)
    if v is None:
        raise PrecisionError("power of a series with no known nonzero term")
    attainable = r * v + (f.prec - v)
    if prec is None:
        prec = attainable
    prec = Fraction(prec)
    if prec > attainable:
        raise PrecisionError(f"power is only determined below q^{attainable}, asked {prec}")
    ring = u.ring
    shift = r * v
    n = _terms_below(shift, u.den, prec)
    base = u.coeffs[:n]
    if r < 0:
        if not ring.is_unit(base[0]):
            raise NonUnitError("negative power needs a unit leading coefficient")
        base = _inverse_coeffs(ring, base, n)
        r = -r
    result = None
    while r:
        if r & 1:
            result = base if result is None else ring.mul_trunc(result, base, n)
        r >>= 1
        if r:
            base = ring.mul_trunc(base, base, n)
    return QSeries(ring, shift, u.den, result, prec)


# --------------------------------------------------------------------------
# eta
# --------------------------------------------------------------------------

def euler_coeffs(n: int, ring) -> object:
    """prod_{k>=1} (1 - q^k) truncated to n terms, in ring form."""
    exps, signs = fastconv.pentagonal_terms(n)
    vals = [0] * n
    for e, s in zip(exps.tolist(), signs.tolist()):
        vals[e] = s
    return ring.coerce(vals)


def eta_series(prec, ring=None) -> QSeries:
    """q^{1/24} prod (1 - q^n), all exponents below prec."""
    ring = ring or IntegerRing()
    prec = Fraction(prec)
    shift = Fraction(1, 24)
    n = _terms_below(shift, 1, prec)
    return QSeries(ring, shift, 1, euler_coeffs(n, ring), prec)
