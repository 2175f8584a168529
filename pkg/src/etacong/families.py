"""Coefficient oracles and the built-in example families.

An oracle serves a(n) mod m, where a(n) is the coefficient of q^n in the
expansion at infinity of an eta quotient.  Indices outside the support give 0.
"""
from __future__ import annotations

import logging
import threading
from dataclasses import dataclass

import numpy as np

from .etaquotient import EtaQuotient, parse_eta_quotient
from .fastconv import partition_mod_kernel
from .fastseries import FrobeniusSampler, etaprod_generic, etaprod_mod, prime_power

log = logging.getLogger(__name__)


class OracleError(RuntimeError):
    """An oracle could not produce a coefficient."""


class OracleShortfall(OracleError):
    def __init__(self, index, reach):
        super().__init__(f"index {index} is beyond the oracle reach {reach}")
        self.index = index
        self.reach = reach


class CoefficientOracle:
    modulus: int

    @property
    def max_index(self) -> int:
        raise NotImplementedError

    def fetch(self, n: int) -> int:
        return self.fetch_many([n])[0]

    def fetch_many(self, indices) -> list[int]:
        raise NotImplementedError

    def reserve(self, limit: int) -> None:
        """Hint: indices up to `limit` may be requested soon."""


class GrowableOracle(CoefficientOracle):
    """Rebuilds itself with a larger reach when asked beyond it.

    Growth doubles the reach, capped at the current reservation (but never
    below the index actually requested); once a doubling would get within a
    factor two of the reservation it goes straight there.  The values served do not depend on
    the reach, so results are deterministic regardless of growth history.
    Subclasses build an immutable state object; readers take a snapshot, so
    concurrent fetches are safe.
    """

    MIN_REACH = 1 << 12

    def __init__(self, modulus: int, reach: int = 0, limit: int | None = None):
        self.modulus = modulus
        self._reach = -1
        self._state = None
        self._reserved = reach
        self.limit = limit
        self._lock = threading.Lock()
        if reach > 0:
            self._grow(reach)

    @property
    def max_index(self) -> int:
        return self._reach

    def reserve(self, limit: int) -> None:
        self._reserved = max(self._reserved, limit)

    def _grow(self, reach: int) -> None:
        if self.limit is not None and reach > self.limit:
            raise OracleShortfall(reach, self.limit)
        log.info("%s: building to index %d", type(self).__name__, reach)
        state = self._build(reach)
        self._state, self._reach = state, reach

    def _ensure(self, top: int):
        with self._lock:
            if top > self._reach:
                cap = self._reserved if self._reserved >= top else 1 << 62
                grow = 2 * self._reach
                if 2 * grow >= cap:
                    grow = cap          # the next doubling would be most of the way there
                target = max(top, min(grow, cap), min(self.MIN_REACH, cap))
                if self.limit is not None:
                    target = max(top, min(target, self.limit))
                self._grow(target)
            return self._state

    def fetch_many(self, indices) -> list[int]:
        idx = [int(i) for i in indices]
        if not idx:
            return []
        state = self._ensure(max(max(idx), 0))
        return [self._value(state, i) for i in idx]

    def _build(self, reach: int):
        raise NotImplementedError

    def _value(self, state, n: int) -> int:
        raise NotImplementedError


class TableOracle(CoefficientOracle):
    """Fixed table: a(n) = table[n - start]."""

    def __init__(self, table, modulus: int, start: int = 0):
        self.table = np.asarray(table)
        self.modulus = modulus
        self.start = start

    @property
    def max_index(self) -> int:
        return self.start + len(self.table) - 1

    def fetch_many(self, indices) -> list[int]:
        out = []
        for n in indices:
            n = int(n)
            if n < self.start:
                out.append(0)
                continue
            if n > self.max_index:
                raise OracleShortfall(n, self.max_index)
            out.append(int(self.table[n - self.start]) % self.modulus)
        return out


def _offset(X: EtaQuotient) -> int:
    s = sum(d * r for d, r in X.factors)
    if s % 24:
        raise ValueError("eta quotient has a fractional q-power")
    return s // 24


class EtaSeriesOracle(GrowableOracle):
    """a(n) of an eta quotient mod m from the series engine.

    mode "dense" keeps the whole table; "sampled" evaluates single
    coefficients from the Frobenius split (only for prime-power moduli with a
    sparse split).  "auto" samples once the reach exceeds SAMPLE_FROM.
    """

    SAMPLE_FROM = 1 << 24

    def __init__(self, X: EtaQuotient, modulus: int, reach: int = 0, mode: str = "auto",
                 limit: int | None = None):
        self.X = X
        self.exps = dict(X.factors)
        self.offset = _offset(X)
        self.mode = mode
        self._pp = prime_power(modulus)
        if mode == "sampled" and not FrobeniusSampler.supports(self.exps, modulus):
            raise ValueError("sampled mode is not available for this quotient and modulus")
        super().__init__(modulus, reach, limit)

    def _use_sampler(self, reach: int) -> bool:
        if self.mode == "dense":
            return False
        if self.mode == "sampled":
            return True
        return reach >= self.SAMPLE_FROM and FrobeniusSampler.supports(self.exps, self.modulus)

    def _build(self, reach: int):
        n = reach - self.offset + 1
        if n <= 0:
            return None
        if self._use_sampler(reach):
            return FrobeniusSampler(self.exps, *self._pp, n - 1)
        if self._pp is not None:
            return etaprod_mod(self.exps, n, *self._pp)
        return etaprod_generic(self.exps, n, self.modulus)

    def _value(self, state, n: int) -> int:
        k = n - self.offset
        if k < 0 or state is None:
            return 0
        if isinstance(state, FrobeniusSampler):
            return state(k)
        return int(state[k])


def partition_table_mod(limit: int, m: int) -> np.ndarray:
    """p(0), ..., p(limit) mod m."""
    if limit < 0:
        return np.zeros(0, dtype=np.int64)
    pp = prime_power(m)
    if pp is not None and limit > 1 << 20:
        return etaprod_mod({1: -1}, limit + 1, *pp).astype(np.int64)
    if m.bit_length() > 40:
        raise ValueError("partition tables are limited to moduli below 2^40")
    return partition_mod_kernel(limit, m)


class PartitionOracle(GrowableOracle):
    """a(n) = p((n+1)/24) for n = -1 mod 24, else 0 (coefficients of 1/eta(24z))."""

    def _build(self, reach: int):
        return partition_table_mod((reach + 1) // 24, self.modulus)

    def _value(self, table, n: int) -> int:
        if n < -1 or (n + 1) % 24:
            return 0
        return int(table[(n + 1) // 24])


@dataclass(frozen=True)
class Family:
    name: str
    eta: str
    index_map: str
    integral_weight: bool

    @property
    def quotient(self) -> EtaQuotient:
        return parse_eta_quotient(self.eta)


FAMILIES = {
    "partition": Family("partition", "24:-1", "a(n) = p((n+1)/24), supported on n = -1 mod 24", False),
    "overpartition": Family("overpartition", "1:-2,2:1", "a(n) = overpartitions of n", False),
    "color24": Family("color24", "1:-24", "a(n) = p_24(n+1), 24-colored partitions", True),
    "core3": Family("core3", "1:-3,3:9", "a(n) = B_3(n-1), 3-core partitions", True),
}


def get_family(name: str) -> Family:
    try:
        return FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None


def family_oracle(family: Family | str, modulus: int, max_index: int = 0,
                  mode: str = "auto") -> CoefficientOracle:
    if isinstance(family, str):
        family = get_family(family)
    if family.name == "partition":
        return PartitionOracle(modulus, max_index)
    return EtaSeriesOracle(family.quotient, modulus, max_index, mode=mode)


def eta_oracle(X: EtaQuotient, modulus: int, max_index: int = 0, mode: str = "auto") -> CoefficientOracle:
    """Oracle for an arbitrary eta quotient (the partition quotient is routed
    through the partition table)."""
    if X.factors == ((24, -1),):
        return PartitionOracle(modulus, max_index)
    return EtaSeriesOracle(X, modulus, max_index, mode=mode)
