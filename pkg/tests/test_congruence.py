import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from etacong.arith import kronecker
from etacong.congruence import tested_ns as admissible_ns
from etacong.congruence import (CongruenceError, candidates, compute_beta_kappa,
                                f_ell_order, index_mu, is_candidate, is_interesting,
                                min_f_ell_order, relation_value, required_indices,
                                search_parameters, sturm_bound, verify_congruence,
                                verify_indices)
from etacong.etaquotient import parse_eta_quotient as P
from etacong.families import TableOracle, eta_oracle
from brute import gamma0_index_by_cosets

OVER = P("1:-2,2:1")


# index and Sturm bound ----------------------------------------------------

def test_index_mu_values():
    assert index_mu(14400) == 34560
    assert index_mu(1) == 1
    assert index_mu(144) == 288


@pytest.mark.parametrize("M", [1, 2, 3, 4, 6, 12, 16, 25, 36, 60, 144])
def test_index_mu_vs_cosets(M):
    assert index_mu(M) == gamma0_index_by_cosets(M)


def test_sturm_values():
    assert sturm_bound(23, 14400, 2) == 33119
    assert sturm_bound(12, 1, 1, plus_one=True) == 1
    assert sturm_bound(71, 144, 1, plus_one=True) == 852


def test_sturm_needs_positive_kappa():
    with pytest.raises(CongruenceError):
        sturm_bound(0, 4, 1)


@given(st.integers(1, 200), st.integers(1, 500), st.sampled_from([1, 2]))
def test_sturm_monotone_in_kappa(k, M, m):
    assert sturm_bound(k + 1, M, m) >= sturm_bound(k, M, m)


# F_ell orders, beta, kappa -------------------------------------------------

def test_f_ell_order_examples():
    assert f_ell_order(5, 576, 4) == 936
    assert f_ell_order(3, 16, 12) == 1
    assert f_ell_order(5, 1, 1) == 26


@pytest.mark.parametrize("ell,text", [(3, "1:27,9:-3"), (5, "1:25,25:-1"), (7, "1:49,49:-1")])
@pytest.mark.parametrize("N", [1, 4, 16, 22, 44])
def test_f_ell_order_vs_ligozat(ell, text, N):
    from etacong.etaquotient import Cusp, ord_at_cusp
    F = P(text)
    M = N * ell * ell
    for c in range(1, M + 1):
        if M % c == 0 and c % (ell * ell):
            assert f_ell_order(ell, N, c) == ord_at_cusp(F, Cusp(1, c, M))


def test_f_ell_order_rejects_ell_squared():
    with pytest.raises(CongruenceError):
        f_ell_order(5, 576, 25)


def test_min_f_ell_positive():
    for ell in (3, 5, 7):
        for N in (1, 4, 16, 576):
            assert min_f_ell_order(ell, N) > 0


def test_beta_partition():
    beta, kappa, v0 = compute_beta_kappa(P("24:-1"), 5, 1)
    assert (beta, kappa) == (0, 23) and v0 == -1


def test_beta_overpartition_strict():
    beta, kappa, _ = compute_beta_kappa(OVER, 3, 1, strict=True)
    assert (beta, kappa) == (1, 71)
    p = search_parameters(OVER, 3, strict_beta=True, plus_one=True)
    assert p.sturm_n0 == 852


def test_beta_at_least_j_minus_one():
    beta, _, _ = compute_beta_kappa(P("24:-1"), 5, 3)
    assert beta >= 2


def test_beta_rejects_ell_dividing_level():
    with pytest.raises(CongruenceError):
        compute_beta_kappa(P("24:-1"), 3, 1)


def test_kappa_odd_half_integral():
    for ell in (5, 7, 11, 13):
        _, kappa, _ = compute_beta_kappa(P("24:-1"), ell, 1)
        assert kappa % 2 == 1


# parameters and candidates ------------------------------------------------

def test_partition_parameters():
    p = search_parameters(P("24:-1"), 5)
    assert (p.epsilon, p.kappa, p.sturm_n0, p.level_for_sturm, p.candidate_modulus) == \
        (1, 23, 33119, 14400, 2880)


def test_overpartition_parameters():
    p3 = search_parameters(OVER, 3)
    p5 = search_parameters(OVER, 5)
    assert (p3.epsilon, p3.sturm_n0, p3.candidate_modulus) == (-1, 275, 48)
    assert (p5.epsilon, p5.sturm_n0, p5.candidate_modulus) == (1, 689, 80)


def test_candidates_list():
    p = search_parameters(OVER, 3)
    assert candidates(p, 500) == [47, 191, 239, 383, 431, 479]
    assert all(is_candidate(p, Q) for Q in candidates(p, 2000))
    assert not is_candidate(p, 95)   # 95 = -1 mod 48 but composite
    assert not is_candidate(p, 53)


def test_tested_ns_rules():
    p = search_parameters(OVER, 3)
    ns = admissible_ns(p)
    assert all(n % 3 and kronecker(n, 3) != -1 for n in ns)
    assert ns[:4] == [1, 4, 7, 10] and ns[-1] <= 275


def test_required_indices():
    p = search_parameters(OVER, 3)
    assert required_indices(p, 47, 5) == [47 * 47 * 5, 5]
    q = search_parameters(P("1:-3,3:9"), 5)
    assert required_indices(q, 29, 3) == [87]
    assert required_indices(q, 29, 58) == [29 * 58, 2]


# the relation test ----------------------------------------------------------

def test_overpartition_47_interesting():
    p = search_parameters(OVER, 3)
    o = eta_oracle(OVER, 3)
    rep = is_interesting(o, p, 47)
    assert rep.verdict == "interesting" and rep.failing_n is None
    assert rep.max_index <= 47 * 47 * 275
    assert not rep.third_term_used


def test_non_candidate_is_skipped():
    p = search_parameters(OVER, 3)
    rep = is_interesting(eta_oracle(OVER, 3), p, 53)
    assert rep.verdict == "skipped-not-candidate" and rep.coefficients_consulted == 0


def test_oracle_modulus_must_fit():
    p = search_parameters(OVER, 3)
    with pytest.raises(CongruenceError):
        is_interesting(eta_oracle(OVER, 5), p, 47)


def test_failure_reports_first_admissible_n():
    p = search_parameters(OVER, 3)
    rng = np.random.default_rng(1)
    table = rng.integers(0, 3, size=47 * 47 * 300)
    rep = is_interesting(TableOracle(table, 3), p, 47)
    assert rep.verdict == "failed"
    n = rep.failing_n
    assert n % 3 and kronecker(n, 3) != p.epsilon
    a = lambda x: int(table[x]) if 0 <= x < table.size and x == int(x) else 0
    assert relation_value(p, 47, n, a) == rep.failing_value != 0
    assert all(relation_value(p, 47, k, a) == 0 for k in admissible_ns(p) if k < n)


def test_zero_oracle_is_interesting():
    p = search_parameters(OVER, 5)
    rep = is_interesting(TableOracle(np.zeros(10, dtype=np.int64), 5, start=10**12), p, 79)
    assert rep.verdict == "interesting"


def test_core3_interesting_small():
    X = P("1:-3,3:9")
    p = search_parameters(X, 5)
    o = eta_oracle(X, 5)
    for Q in candidates(p, 200):
        assert is_interesting(o, p, Q).verdict == "interesting"


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([47, 191, 239, 383]), st.integers(1, 275))
def test_third_term_unused_below_q_squared(Q, n):
    p = search_parameters(OVER, 3)
    idx = required_indices(p, Q, n)
    assert len(idx) == 2


# verify -------------------------------------------------------------------

def test_verify_indices_rules():
    pairs = verify_indices(True, 3, -1, 47, 12)
    ns = [n for n, _ in pairs]
    assert all(n % 3 and kronecker(-n, 3) != -1 for n in ns)
    assert all(i == 47**3 * n for n, i in pairs)
    assert 2 in ns and 1 not in ns and 3 not in ns
    assert verify_indices(False, 5, 0, 29, 3) == [(1, 29), (2, 58), (3, 87)]


def test_verify_overpartition_47():
    o = eta_oracle(OVER, 3)
    rep = verify_congruence(o, OVER, 3, 1, -1, 47, 12)
    assert rep.checked and not rep.violations


def test_verify_detects_violation():
    table = np.ones(47**3 * 20, dtype=np.int64)
    rep = verify_congruence(TableOracle(table, 3), OVER, 3, 1, -1, 47, 5)
    assert [v["n"] for v in rep.violations] == rep.checked


def test_interesting_implies_verified_core3():
    X = P("1:-3,3:9")
    p = search_parameters(X, 7)
    o = eta_oracle(X, 7)
    for Q in candidates(p, 150):
        assert is_interesting(o, p, Q).verdict == "interesting"
        assert not verify_congruence(o, X, 7, 1, 0, Q, 300).violations


def test_integral_exponent_convention_matters():
    from etacong.congruence import INTEGRAL_EXPONENT_CLASSICAL
    X = P("1:-3,3:9")
    o = eta_oracle(X, 5)
    p = search_parameters(X, 5)
    c = search_parameters(X, 5, integral_exponent=INTEGRAL_EXPONENT_CLASSICAL)
    assert is_interesting(o, p, 59).verdict == "interesting"
    assert is_interesting(o, c, 59).verdict == "failed"
