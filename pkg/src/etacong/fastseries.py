"""Eta products modulo a prime power, for very long expansions.

Write E(q) = prod (1 - q^n).  Modulo p^j,

    E(q)^(p^j) = E(q^p)^(p^(j-1)),

so an exponent r = p^j s + t splits prod E(q^d)^r into P(q) G(q^p) with
P = prod E(q^d)^t and G = prod E(q^d)^(p^(j-1) s).  When P is a product of
at most two sparse series (E via pentagonal numbers, E^3 via Jacobi's
identity) it is built by pair enumeration in O(n), and G is needed only to
length n/p.  G is expanded recursively the same way.

Two ways of reading coefficients off P(q) G(q^p):
  dense    every coefficient, by one convolution per residue class mod p
  sampled  individual coefficients as strided dot products, which is what a
           search needs when it only consults a(Q^2 n) for a few hundred n
"""
from __future__ import annotations

import logging

import numpy as np

from .arith import factorize
from .fastconv import (jacobi_terms, mulmod, pair_accumulate, pentagonal_terms,
                       strided_dot)

log = logging.getLogger(__name__)

GENERIC_CUTOFF = 1 << 16


def prime_power(m: int) -> tuple[int, int] | None:
    f = factorize(m)
    if len(f) != 1:
        return None
    (p, j), = f.items()
    return p, j


def _store_dtype(m: int):
    return np.int8 if m < 128 else (np.int32 if m < 2**31 else np.int64)


# --------------------------------------------------------------------------
# generic dense route
# --------------------------------------------------------------------------

def inverse_dense(a: np.ndarray, n: int, m: int) -> np.ndarray:
    """1/a mod (q^n, m) by Newton iteration; a[0] must be a unit."""
    g = np.array([pow(int(a[0]) % m, -1, m)], dtype=np.int64)
    k = 1
    while k < n:
        k = min(2 * k, n)
        e = (-mulmod(a[:k], g, k, m)) % m
        e[0] = (e[0] + 1) % m
        corr = mulmod(g, e, k, m)
        g2 = np.zeros(k, dtype=np.int64)
        g2[:g.size] = g
        g = (g2 + corr) % m
    return g[:n]


def euler_power_dense(r: int, n: int, m: int) -> np.ndarray:
    """E(q)^r mod m, n terms."""
    out = np.zeros(n, dtype=np.int64)
    if r == 0:
        out[:1] = 1 % m
        return out
    if r in (1, 3):
        e, c = pentagonal_terms(n) if r == 1 else jacobi_terms(n)
        out[e] = c % m
        return out
    base = euler_power_dense(1, n, m)
    if r < 0:
        base = inverse_dense(base, n, m)
        r = -r
    result = None
    while r:
        if r & 1:
            result = base if result is None else mulmod(result, base, n, m)
        r >>= 1
        if r:
            base = mulmod(base, base, n, m)
    return result


def stretch_dense(a: np.ndarray, d: int, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.int64)
    k = -(-n // d)
    out[::d] = a[:k]
    return out


def etaprod_generic(exps: dict[int, int], n: int, m: int) -> np.ndarray:
    acc = None
    for d, r in sorted(exps.items()):
        if r == 0:
            continue
        part = stretch_dense(euler_power_dense(r, -(-n // d), m), d, n)
        acc = part if acc is None else mulmod(acc, part, n, m)
    if acc is None:
        acc = np.zeros(n, dtype=np.int64)
        acc[:1] = 1 % m
    return acc


# --------------------------------------------------------------------------
# Frobenius split
# --------------------------------------------------------------------------

def split_exponents(exps: dict[int, int], p: int, j: int):
    """r = p^j s + t with 0 <= t < p^j; returns (t, exponents of G)."""
    m = p**j
    t, g = {}, {}
    for d, r in exps.items():
        s, tt = divmod(r, m)
        if tt:
            t[d] = tt
        if s:
            g[d] = p ** (j - 1) * s
    return t, g


def sparse_pieces(t: dict[int, int]):
    """Write prod E(q^d)^t as a list of sparse factors (kind, d), kind in {1, 3}."""
    pieces = []
    for d, e in sorted(t.items()):
        threes, ones = divmod(e, 3)
        pieces += [(3, d)] * threes + [(1, d)] * ones
    return pieces


def _piece_terms(kind: int, d: int, n: int, m: int):
    lim = -(-n // d)
    e, c = pentagonal_terms(lim) if kind == 1 else jacobi_terms(lim)
    return e * d, c % m


def build_sparse_product(pieces, n: int, m: int, dtype) -> np.ndarray:
    """Product of at most two sparse factors, densely, via pair enumeration."""
    out = np.zeros(n, dtype=dtype)
    if not pieces:
        out[0] = 1 % m
        return out
    if len(pieces) == 1:
        e, c = _piece_terms(*pieces[0], n, m)
        out[e] = c.astype(dtype)
        return out
    (k1, d1), (k2, d2) = pieces
    e1, c1 = _piece_terms(k1, d1, n, m)
    e2, c2 = _piece_terms(k2, d2, n, m)
    pair_accumulate(e1, c1, e2, c2, n, m, out)
    return out


def etaprod_mod(exps: dict[int, int], n: int, p: int, j: int, dtype=None) -> np.ndarray:
    """prod E(q^d)^r mod p^j, first n coefficients (no q^(sum d r/24) factor)."""
    m = p**j
    dtype = dtype or _store_dtype(m)
    exps = {d: r for d, r in exps.items() if r}
    t, g = split_exponents(exps, p, j)
    pieces = sparse_pieces(t)
    if n <= GENERIC_CUTOFF or len(pieces) > 2:
        return etaprod_generic(exps, n, m).astype(dtype)
    P = build_sparse_product(pieces, n, m, dtype)
    if not g:
        return P
    ng = -(-n // p)
    G = etaprod_mod(g, ng, p, j, dtype)
    out = np.zeros(n, dtype=dtype)
    for r in range(p):
        Pr = P[r::p]
        if Pr.size == 0:
            continue
        mulmod(Pr, G, Pr.size, m, out=out[r::p])
    return out


class FrobeniusSampler:
    """Coefficients of prod E(q^d)^r mod p^j at scattered indices below `reach`."""

    def __init__(self, exps: dict[int, int], p: int, j: int, reach: int):
        self.p, self.j, self.m = p, j, p**j
        t, g = split_exponents(exps, p, j)
        pieces = sparse_pieces(t)
        if len(pieces) > 2:
            raise ValueError("sampling needs a split with at most two sparse factors")
        dtype = _store_dtype(self.m)
        self.reach = reach
        self.P = build_sparse_product(pieces, reach + 1, self.m, dtype)
        if g:
            self.G = etaprod_mod(g, reach // p + 1, p, j, dtype)
        else:
            self.G = np.zeros(1, dtype=dtype)
            self.G[0] = 1

    @staticmethod
    def supports(exps: dict[int, int], m: int) -> bool:
        pp = prime_power(m)
        if pp is None:
            return False
        t, _ = split_exponents(exps, *pp)
        return len(sparse_pieces(t)) <= 2

    def __call__(self, n: int) -> int:
        if n < 0:
            return 0
        if n > self.reach:
            raise IndexError(n)
        return int(strided_dot(self.P, self.G, n, self.p, self.m))
