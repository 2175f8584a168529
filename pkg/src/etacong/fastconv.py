"""Low level kernels: exact modular convolution and a few numba loops.

Convolution works on balanced residues with float64 FFTs.  Inputs are split
into limbs so that every pointwise coefficient of a limb product stays below
2^44 in absolute value, which keeps rounding far away from 1/2.  Long inputs
are cut into blocks whose spectra are accumulated per output block, so peak
memory is a handful of block-sized buffers rather than the full transform.
"""
from __future__ import annotations

import numpy as np
from numba import njit

EXACT_BITS = 44
BLOCK = 1 << 23          # block length for long convolutions
SCHOOLBOOK_CUTOFF = 1 << 14
SPECTRUM_BUDGET = 1 << 29   # bytes of cached block spectra


# --------------------------------------------------------------------------
# sparse generators
# --------------------------------------------------------------------------

def pentagonal_terms(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Exponents < n and signs of prod (1 - q^k) = sum (-1)^k q^{k(3k-1)/2}."""
    exps, signs = [], []
    k = 0
    while True:
        e1 = k * (3 * k - 1) // 2
        if e1 >= n:
            break
        s = -1 if k % 2 else 1
        exps.append(e1)
        signs.append(s)
        if k:
            e2 = k * (3 * k + 1) // 2
            if e2 < n:
                exps.append(e2)
                signs.append(s)
        k += 1
    order = np.argsort(exps, kind="stable")
    return np.asarray(exps, dtype=np.int64)[order], np.asarray(signs, dtype=np.int64)[order]


def jacobi_terms(n: int) -> tuple[np.ndarray, np.ndarray]:
    """prod (1 - q^k)^3 = sum_{k >= 0} (-1)^k (2k+1) q^{k(k+1)/2}."""
    exps, coeffs = [], []
    k = 0
    while k * (k + 1) // 2 < n:
        exps.append(k * (k + 1) // 2)
        coeffs.append((-1) ** k * (2 * k + 1))
        k += 1
    return np.asarray(exps, dtype=np.int64), np.asarray(coeffs, dtype=np.int64)


# --------------------------------------------------------------------------
# numba kernels
# --------------------------------------------------------------------------

@njit(cache=True)
def pair_accumulate(e1, c1, e2, c2, n, m, out):
    """out[e1[i] + e2[j]] += c1[i]*c2[j] (mod m) for sums < n.

    e1, e2 sorted ascending; c1, c2 already reduced to [0, m).
    out may be any integer dtype able to hold [0, m).
    """
    for i in range(e1.shape[0]):
        a = e1[i]
        if a >= n:
            break
        ci = c1[i]
        if ci == 0:
            continue
        for j in range(e2.shape[0]):
            k = a + e2[j]
            if k >= n:
                break
            v = (np.int64(out[k]) + ci * c2[j]) % m
            out[k] = v
    return out


@njit(cache=True)
def sparse_dense_mul(dense, e, c, n, m):
    """(sum c_i q^{e_i}) * dense, truncated to n terms, mod m."""
    out = np.zeros(n, dtype=np.int64)
    L = dense.shape[0]
    for i in range(e.shape[0]):
        s = e[i]
        if s >= n:
            break
        ci = c[i] % m
        if ci == 0:
            continue
        top = min(L, n - s)
        for k in range(top):
            out[s + k] = (out[s + k] + ci * dense[k]) % m
    return out


@njit(cache=True)
def schoolbook_mod(a, b, n, m):
    out = np.zeros(n, dtype=np.int64)
    for i in range(min(a.shape[0], n)):
        ai = a[i]
        if ai == 0:
            continue
        top = min(b.shape[0], n - i)
        for j in range(top):
            out[i + j] = (out[i + j] + ai * b[j]) % m
    return out


@njit(cache=True)
def strided_dot(P, B, n, p, m):
    """sum_k P[n - p*k] * B[k] mod m (the q^n coefficient of P(q) B(q^p))."""
    acc = np.int64(0)
    kmax = n // p
    if kmax >= B.shape[0]:
        kmax = B.shape[0] - 1
    for k in range(kmax + 1):
        acc += np.int64(P[n - p * k]) * np.int64(B[k])
        if (k & 0xFFFFF) == 0xFFFFF:
            acc %= m
    return acc % m


@njit(cache=True)
def partition_mod_kernel(limit, m):
    """p(0..limit) mod m by the pentagonal recurrence, O(limit^1.5)."""
    p = np.zeros(limit + 1, dtype=np.int64)
    p[0] = 1 % m
    for n in range(1, limit + 1):
        s = np.int64(0)
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > n:
                break
            t = p[n - g1]
            g2 = g1 + k
            if g2 <= n:
                t += p[n - g2]
            if k % 2:
                s += t
            else:
                s -= t
            k += 1
        p[n] = s % m
    return p


# --------------------------------------------------------------------------
# exact FFT convolution mod m
# --------------------------------------------------------------------------

def _balanced(x: np.ndarray, m: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64) % m
    return np.where(x > m // 2, x - m, x)


def _limb_plan(m: int, length: int) -> tuple[int, int]:
    """(number of limbs, bits per limb) keeping limb products exact."""
    for k in range(1, 8):
        bits = max(1, -(-(m.bit_length()) // k))
        # balanced limbs are bounded by 2^(bits-1) + 1
        bound = (2 ** (bits - 1) + 1) ** 2 * max(length, 1)
        if bound < 2**EXACT_BITS:
            return k, bits
    raise ValueError("modulus too large for the float convolution path")


def _split_limbs(x: np.ndarray, k: int, bits: int) -> list[np.ndarray]:
    """Balanced limb decomposition x = sum x_i 2^{bits*i} with |x_i| <= 2^{bits-1}."""
    if k == 1:
        return [x.astype(np.float64)]
    limbs = []
    rest = x.copy()
    base = 1 << bits
    half = base >> 1
    for _ in range(k - 1):
        lo = ((rest + half) % base) - half
        limbs.append(lo.astype(np.float64))
        rest = (rest - lo) >> bits
    limbs.append(rest.astype(np.float64))
    return limbs


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def mulmod(a, b, n: int, m: int, out: np.ndarray | None = None) -> np.ndarray:
    """First n coefficients of a*b mod m in [0, m).

    The result is int64 unless `out` (any integer array of length n, possibly
    a strided view) is given; the FFT path then writes block by block and
    never holds an int64 copy of the whole product.
    """
    a = np.asarray(a)[:n]
    b = np.asarray(b)[:n]
    if n <= 0 or a.size == 0 or b.size == 0:
        res = np.zeros(max(n, 0), dtype=np.int64)
        if out is not None:
            out[:] = res
            return out
        return res
    if out is not None:
        if len(out) != n:
            raise ValueError("out has the wrong length")
        big = m.bit_length() > 31
        if not big and min(a.size, b.size) > 32 and \
                min(a.size, b.size) * max(a.size, b.size) > SCHOOLBOOK_CUTOFF * 64:
            k, bits = _limb_plan(m, min(a.size, b.size))
            return _mulmod_fft(a, b, n, m, k, bits, out)
        out[:] = mulmod(a, b, n, m)
        return out
    if m.bit_length() > 62:
        return _mulmod_bigint(a, b, n, m)
    if min(a.size, b.size) * max(a.size, b.size) <= SCHOOLBOOK_CUTOFF * 64 or min(a.size, b.size) <= 32:
        if m.bit_length() <= 31:
            return schoolbook_mod(np.asarray(a, dtype=np.int64) % m,
                                  np.asarray(b, dtype=np.int64) % m, n, m)
        return _mulmod_bigint(a, b, n, m)
    try:
        k, bits = _limb_plan(m, min(a.size, b.size))
    except ValueError:
        return _mulmod_bigint(a, b, n, m)
    if m.bit_length() > 31:
        return _mulmod_bigint(a, b, n, m)
    return _mulmod_fft(a, b, n, m, k, bits)


def _mulmod_fft(a, b, n, m, k, bits, out=None):
    la, lb = a.size, b.size
    if out is None:
        out = np.zeros(n, dtype=np.int64)
    else:
        out[:] = 0
    blk = min(BLOCK, _next_pow2(max(la, lb)))
    size = 2 * blk
    na = -(-la // blk)
    nb = -(-lb // blk)
    cache: dict = {}
    cache_bytes = 0

    def spectra(x, idx, side):
        nonlocal cache_bytes
        key = (side, idx)
        if key in cache:
            return cache[key]
        seg = _balanced(x[idx * blk:(idx + 1) * blk], m)
        sp = [np.fft.rfft(limb, size) for limb in _split_limbs(seg, k, bits)]
        nbytes = sum(s.nbytes for s in sp)
        if cache_bytes + nbytes <= SPECTRUM_BUDGET:
            cache[key] = sp
            cache_bytes += nbytes
        return sp

    shifts = [pow(2, bits * t, m) for t in range(2 * k - 1)]
    for s in range(na + nb - 1):
        lo = s * blk
        if lo >= n:
            break
        acc = [None] * (2 * k - 1)
        for i in range(max(0, s - nb + 1), min(na, s + 1)):
            j = s - i
            fa = spectra(a, i, 0)
            fb = spectra(b, j, 1)
            for u in range(k):
                for v in range(k):
                    prod = fa[u] * fb[v]
                    if acc[u + v] is None:
                        acc[u + v] = prod
                    else:
                        acc[u + v] += prod
        hi = min(n, lo + size)
        piece = np.zeros(hi - lo, dtype=np.int64)
        for t, spec in enumerate(acc):
            vals = np.rint(np.fft.irfft(spec, size)[:hi - lo]).astype(np.int64) % m
            piece = (piece + vals * shifts[t]) % m
        out[lo:hi] = (out[lo:hi].astype(np.int64) + piece) % m
    return out


def _mulmod_bigint(a, b, n, m):
    """Kronecker substitution through Python integers (any modulus)."""
    a = [int(x) % m for x in a]
    b = [int(x) % m for x in b]
    slot = (2 * m.bit_length() + max(len(a), len(b)).bit_length() + 8) // 8 + 1
    A = int.from_bytes(b"".join(x.to_bytes(slot, "little") for x in a), "little")
    B = int.from_bytes(b"".join(x.to_bytes(slot, "little") for x in b), "little")
    raw = (A * B).to_bytes(slot * (len(a) + len(b)), "little")
    out = [int.from_bytes(raw[i * slot:(i + 1) * slot], "little") % m for i in range(n)]
    return np.array(out, dtype=object if m.bit_length() > 62 else np.int64)


def mul_integer(a: list[int], b: list[int], n: int) -> list[int]:
    """Exact truncated product of integer coefficient lists (Kronecker substitution)."""
    a = list(a[:n])
    b = list(b[:n])
    if not a or not b:
        return [0] * n
    if min(len(a), len(b)) <= 16:
        out = [0] * n
        for i, x in enumerate(a):
            if x:
                for j in range(min(len(b), n - i)):
                    out[i + j] += x * b[j]
        return out
    bound = max(abs(x) for x in a) * max(abs(x) for x in b) * min(len(a), len(b))
    slot = (bound.bit_length() + 2 + 7) // 8
    half = 1 << (8 * slot - 1)

    def pack(v):
        pos = b"".join((x if x > 0 else 0).to_bytes(slot, "little") for x in v)
        neg = b"".join((-x if x < 0 else 0).to_bytes(slot, "little") for x in v)
        return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")

    # shift every slot by `half` so the signed product unpacks bytewise
    count = len(a) + len(b)
    offset = int.from_bytes(half.to_bytes(slot, "little") * count, "little")
    raw = (pack(a) * pack(b) + offset).to_bytes(slot * count + 1, "little")
    return [int.from_bytes(raw[i * slot:(i + 1) * slot], "little") - half for i in range(n)]
