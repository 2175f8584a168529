"""Sign coherence of principal parts at all cusps (Condition C)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .arith import is_prime, kronecker
from .etaquotient import (Cusp, EtaQuotient, cusp_representatives,
                          expand_at_cusp, invariants, ord_at_cusp)


class ConditionCError(ValueError):
    pass


@dataclass
class ConditionCResult:
    ell: int
    epsilon: int
    holds: bool
    witness: dict | None = None
    constraints: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ell": self.ell, "epsilon": self.epsilon, "holds": self.holds,
                "witness": self.witness, "constraints": self.constraints}


def principal_terms(X: EtaQuotient, s: Cusp):
    """Nonzero (exponent, coefficient) pairs with exponent < 0 at cusp s."""
    order = ord_at_cusp(X, s)
    if order >= 0:
        return [], None
    E = expand_at_cusp(X, s, math.ceil(-order))
    terms = [(e, c) for e, c in sorted(E.series.terms().items()) if e < 0]
    return terms, E


def check_condition_c(X: EtaQuotient, ell: int, cusps: list[Cusp] | None = None) -> ConditionCResult:
    """Find the sign eps with ((4n + r_s)/ell) = eps (h_s/ell) on every principal term.

    Returns eps = 0 when no term constrains the sign.
    """
    if ell == 2 or not is_prime(ell):
        raise ConditionCError(f"ell must be an odd prime, got {ell}")
    N = invariants(X).level
    if cusps is None:
        cusps = cusp_representatives(N)
    if N % ell == 0:
        # (h_s/ell) can vanish, so only the vacuous (holomorphic) case is decidable
        if any(ord_at_cusp(X, s) < 0 for s in cusps):
            raise ConditionCError(f"ell={ell} divides the level {N}")
        return ConditionCResult(ell, 0, True, None, [])
    constraints = []
    for s in cusps:
        terms, E = principal_terms(X, s)
        h = s.width
        for e, _c in terms:
            val = 4 * e                 # = 4n + r_s
            if val.denominator != 1:
                raise ConditionCError(f"exponent {e} is not in (1/4)Z")
            val = int(val)
            if val % ell == 0:
                continue
            need = kronecker(val, ell) * kronecker(h, ell)
            n = (val - E.r_s) // 4
            constraints.append({"cusp": s.label(), "n": n, "r": E.r_s, "width": h,
                                "sign": need})
    signs = {c["sign"] for c in constraints}
    if not signs:
        return ConditionCResult(ell, 0, True, None, constraints)
    if len(signs) == 1:
        return ConditionCResult(ell, signs.pop(), True, None, constraints)
    first = constraints[0]["sign"]
    witness = next(c for c in constraints if c["sign"] != first)
    return ConditionCResult(ell, 0, False, witness, constraints)
