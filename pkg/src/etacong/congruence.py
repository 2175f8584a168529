"""Sturm bounds, the beta/kappa parameters, and the interesting-prime test.

A prime Q is a candidate when Q = -1 mod N*ell^j (N the level of the eta
quotient).  For half-integral weight kappa/2 the test is the Hecke relation

    a(Q^2 n) + ((-1)^((kappa-1)/2) n / Q) Q^((kappa-3)/2) a(n) + Q^(kappa-2) a(n/Q^2)

vanishing mod ell^j for 1 <= n <= n0, ell not dividing n and (n/ell) != eps.
In integral weight the relation is a(Qn) + Q^(kappa-1) a(n/Q).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .arith import factorize, is_prime, kronecker, lcm
from .conditionc import check_condition_c
from .etaquotient import EtaQuotient, cusp_representatives, invariants, ord_at_cusp

# exponent conventions for the integral-weight relation
INTEGRAL_EXPONENT_FULL = "full"            # Q^(kappa-1)
INTEGRAL_EXPONENT_CLASSICAL = "classical"  # chi(Q) Q^(kappa/2-1)


class CongruenceError(ValueError):
    pass


def index_mu(M: int) -> int:
    """[SL2(Z) : Gamma0(M)] = M prod_{p | M} (1 + 1/p)."""
    mu = Fraction(M)
    for p in factorize(M):
        mu *= Fraction(p + 1, p)
    assert mu.denominator == 1
    return int(mu)


def sturm_bound(kappa: int, M: int, m: int, plus_one: bool = False) -> int:
    """floor(kappa mu_M/24 - (mu_M - 1)/(4 m M)).

    The default matches the worked value 33119 for (23, 14400, 2).  With
    plus_one=True the bound gets the extra +1 of the typeset formula.
    """
    if kappa < 1:
        raise CongruenceError("kappa must be positive")
    mu = index_mu(M)
    x = Fraction(kappa * mu, 24) - Fraction(mu - 1, 4 * m * M)
    return math.floor(x) + (1 if plus_one else 0)


def k_ell(ell: int) -> int:
    return 24 if ell == 3 else ell * ell - 1


def f_ell_order(ell: int, N: int, c: int) -> Fraction:
    """Order of F_ell (the eta quotient eta(z)^{ell^2}/eta(ell^2 z), cubed-down
    variant for ell = 3) at a cusp with denominator c on Gamma0(N ell^2)."""
    if c % (ell * ell) == 0:
        raise CongruenceError("formula needs ell^2 not dividing c")
    h = Fraction(N, math.gcd(c * c, N))
    if ell == 3:
        return h * (1 if c % 3 == 0 else 10)
    if c % ell == 0:
        return h * Fraction(ell * ell - 1, 24)
    return h * Fraction(ell**4 - 1, 24)


def min_f_ell_order(ell: int, N: int) -> Fraction:
    """Minimum of f_ell_order over cusp denominators c | N ell^2 with ell^2 not dividing c."""
    M = N * ell * ell
    best = None
    for c in range(1, M + 1):
        if M % c or c % (ell * ell) == 0:
            continue
        v = f_ell_order(ell, N, c)
        best = v if best is None or v < best else best
    return best


def weight_level(X: EtaQuotient) -> int:
    """Level used for the Sturm bound and the cusp orders behind beta: lcm(4, N)."""
    return invariants(X).level4


def compute_beta_kappa(X: EtaQuotient, ell: int, j: int,
                       strict: bool = False) -> tuple[int, int, Fraction]:
    """Smallest beta >= j-1 with ell^beta * min ord(F_ell) >= -v0 and kappa > 0.

    strict=True asks for > instead of >=.
    """
    inv = invariants(X)
    N = weight_level(X)
    if N % ell == 0:
        raise CongruenceError(f"ell={ell} divides the level {N}")
    v0 = min(ord_at_cusp(X, s) for s in cusp_representatives(N))
    fmin = min_f_ell_order(ell, N)
    beta = max(0, j - 1)
    while True:
        kappa = inv.weight_numerator + ell**beta * k_ell(ell)
        bound = ell**beta * fmin
        if kappa > 0 and (bound > -v0 if strict else bound >= -v0):
            break
        beta += 1
    if inv.half_integral and kappa % 2 == 0:
        raise CongruenceError("kappa must be odd in half-integral weight")
    return beta, kappa, v0


@dataclass(frozen=True)
class SearchParameters:
    eta: str
    ell: int
    j: int
    epsilon: int
    beta: int
    kappa: int
    v0: Fraction
    sturm_n0: int
    level: int                 # N: candidates are Q = -1 mod N ell^j
    level_for_sturm: int       # lcm(4, N) ell^2
    character_squareclass: int
    character_order: int
    half_integral: bool
    integral_exponent: str = INTEGRAL_EXPONENT_FULL

    @property
    def modulus(self) -> int:
        return self.ell**self.j

    @property
    def candidate_modulus(self) -> int:
        return self.level * self.ell**self.j

    def to_json(self) -> dict:
        d = asdict(self)
        d["v0"] = str(self.v0)
        return d


def search_parameters(X: EtaQuotient, ell: int, j: int = 1, epsilon: int | None = None,
                      integral_exponent: str = INTEGRAL_EXPONENT_FULL,
                      plus_one: bool = False, strict_beta: bool = False) -> SearchParameters:
    inv = invariants(X)
    if epsilon is None:
        cc = check_condition_c(X, ell)
        if not cc.holds:
            raise CongruenceError(f"Condition C fails at ell={ell}: {cc.witness}")
        epsilon = cc.epsilon
    if epsilon not in (-1, 0, 1):
        raise CongruenceError("epsilon must be -1, 0 or 1")
    beta, kappa, v0 = compute_beta_kappa(X, ell, j, strict=strict_beta)
    M = weight_level(X) * ell * ell
    n0 = sturm_bound(kappa, M, inv.character_order, plus_one=plus_one)
    return SearchParameters(X.notation(), ell, j, epsilon, beta, kappa, v0, n0,
                            inv.level, M, inv.character_squareclass, inv.character_order,
                            inv.half_integral, integral_exponent)


def is_candidate(params: SearchParameters, Q: int) -> bool:
    return Q > 2 and (Q + 1) % params.candidate_modulus == 0 and is_prime(Q)


def candidates(params: SearchParameters, qmax: int, qmin: int = 2) -> list[int]:
    step = params.candidate_modulus
    out = []
    Q = step - 1
    while Q <= qmax:
        if Q >= qmin and is_prime(Q):
            out.append(Q)
        Q += step
    return out


def tested_ns(params: SearchParameters) -> list[int]:
    """1 <= n <= n0 with ell not dividing n and (n/ell) != eps."""
    ell, eps = params.ell, params.epsilon
    return [n for n in range(1, params.sturm_n0 + 1)
            if n % ell and kronecker(n, ell) != eps]


def required_indices(params: SearchParameters, Q: int, n: int) -> list[int]:
    """Coefficient indices consulted by the test at n (integral ones only)."""
    if params.half_integral:
        out = [Q * Q * n, n]
        if n % (Q * Q) == 0:
            out.append(n // (Q * Q))
    else:
        out = [Q * n]
        if n % Q == 0:
            out.append(n // Q)
    return out


@dataclass
class CandidateReport:
    eta: str
    Q: int
    verdict: str                    # interesting | failed | skipped-not-candidate
    params: SearchParameters
    failing_n: int | None = None
    failing_value: int | None = None
    coefficients_consulted: int = 0
    max_index: int = 0
    third_term_used: bool = False

    def to_json(self) -> dict:
        return {
            "eta": self.eta, "Q": self.Q, "verdict": self.verdict,
            "ell": self.params.ell, "j": self.params.j, "epsilon": self.params.epsilon,
            "beta": self.params.beta, "kappa": self.params.kappa, "n0": self.params.sturm_n0,
            "failing_n": self.failing_n, "failing_value": self.failing_value,
            "coefficients_consulted": self.coefficients_consulted,
            "max_index": self.max_index,
        }


class _Coeffs:
    """Small cache in front of an oracle, counting distinct lookups."""

    def __init__(self, oracle):
        self.oracle = oracle
        self.cache: dict[int, int] = {}

    def prefetch(self, indices):
        need = sorted({i for i in indices if i not in self.cache})
        if need:
            for i, v in zip(need, self.oracle.fetch_many(need)):
                self.cache[i] = int(v)

    def __call__(self, x) -> int:
        if isinstance(x, Fraction):
            if x.denominator != 1:
                return 0
            x = int(x)
        if x < 0:
            return 0
        if x not in self.cache:
            self.prefetch([x])
        return self.cache[x]


def _hecke_terms(params: SearchParameters, Q: int):
    """Constant factors in the relation, all reduced mod ell^j."""
    m = params.modulus
    k = params.kappa
    if params.half_integral:
        c_mid = pow(Q, (k - 3) // 2, m)
        c_last = pow(Q, k - 2, m)
        for v in (c_mid, c_last):
            assert v in (1, m - 1), "Q-power not +-1 mod ell^j"
        return c_mid, c_last
    if params.integral_exponent == INTEGRAL_EXPONENT_FULL:
        c_last = pow(Q, k - 1, m)
    else:
        if k % 2:
            raise CongruenceError("classical exponent needs even kappa")
        c_last = kronecker(params.character_squareclass, Q) * pow(Q, k // 2 - 1, m) % m
    return None, c_last


def relation_value(params: SearchParameters, Q: int, n: int, a) -> int:
    m = params.modulus
    c_mid, c_last = _hecke_terms(params, Q)
    if params.half_integral:
        sign = -1 if ((params.kappa - 1) // 2) % 2 else 1
        chi = kronecker(sign * n, Q)
        val = a(Q * Q * n) + chi * c_mid * a(n)
        if n % (Q * Q) == 0:
            val += c_last * a(n // (Q * Q))
    else:
        val = a(Q * n)
        if n % Q == 0:
            val += c_last * a(n // Q)
    return val % m


def is_interesting(oracle, params: SearchParameters, Q: int, chunk: int = 64) -> CandidateReport:
    """Run the relation test for every admissible n up to the Sturm bound."""
    if not is_candidate(params, Q):
        return CandidateReport(params.eta, Q, "skipped-not-candidate", params)
    if oracle.modulus % params.modulus:
        raise CongruenceError("oracle modulus must be a multiple of ell^j")
    a = _Coeffs(oracle)
    ns = tested_ns(params)
    third = any(n % (Q * Q) == 0 for n in ns) if params.half_integral else any(n % Q == 0 for n in ns)
    report = CandidateReport(params.eta, Q, "interesting", params, third_term_used=third)
    # blocks grow geometrically so an early failure never pulls in far indices
    start, size = 0, 4
    while start < len(ns):
        block = ns[start:start + size]
        start += size
        size = min(2 * size, chunk)
        idx = [i for n in block for i in required_indices(params, Q, n)]
        a.prefetch(idx)
        for n in block:
            v = relation_value(params, Q, n, a)
            if v:
                report.verdict = "failed"
                report.failing_n = n
                report.failing_value = v
                break
        if report.verdict == "failed":
            break
    report.coefficients_consulted = len(a.cache)
    report.max_index = max(a.cache) if a.cache else 0
    return report


@dataclass
class VerifyReport:
    eta: str
    Q: int
    ell: int
    j: int
    epsilon: int
    n_max: int
    checked: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"eta": self.eta, "Q": self.Q, "ell": self.ell, "j": self.j,
                "epsilon": self.epsilon, "n_max": self.n_max,
                "checked": self.checked, "violations": self.violations}


def verify_indices(half_integral: bool, ell: int, epsilon: int, Q: int, n_max: int):
    """(n, index) pairs covered by the congruence statement."""
    power = Q**3 if half_integral else Q
    out = []
    for n in range(1, n_max + 1):
        if math.gcd(n, ell * Q) != 1:
            continue
        if kronecker(-n, ell) == epsilon:
            continue
        out.append((n, power * n))
    return out


def verify_congruence(oracle, X: EtaQuotient, ell: int, j: int, epsilon: int, Q: int,
                      n_max: int) -> VerifyReport:
    """Directly check a(Q^3 n) (half-integral) or a(Qn) (integral) = 0 mod ell^j."""
    half = invariants(X).half_integral
    m = ell**j
    pairs = verify_indices(half, ell, epsilon, Q, n_max)
    vals = oracle.fetch_many([i for _, i in pairs]) if pairs else []
    rep = VerifyReport(X.notation(), Q, ell, j, epsilon, n_max)
    for (n, idx), v in zip(pairs, vals):
        rep.checked.append(n)
        if int(v) % m:
            rep.violations.append({"n": n, "index": idx, "residue": int(v) % m})
    return rep
