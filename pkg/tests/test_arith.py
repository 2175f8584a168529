import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from etacong.arith import (IDENTITY, S_MATRIX, T_MATRIX, Mat2, Residue, cusp_matrix,
                           dedekind_sum, divisors, eta_multiplier, euler_phi, factorize,
                           is_prime, jacobi, kronecker, square_class, squarefree_part, xgcd)
from numeric_eta import eta


def small_primes(n):
    return [p for p in range(2, n) if all(p % q for q in range(2, int(p**0.5) + 1))]


# kronecker -------------------------------------------------------------

@pytest.mark.parametrize("a,n,want", [(-1, 5, 1), (2, 7, 1), (23, 5, -1)])
def test_kronecker_examples(a, n, want):
    assert kronecker(a, n) == want


def test_kronecker_matches_quadratic_residues():
    for p in small_primes(100)[1:]:
        squares = {x * x % p for x in range(1, p)}
        for a in range(-99, 100):
            want = 0 if a % p == 0 else (1 if a % p in squares else -1)
            assert kronecker(a, p) == want, (a, p)


def test_kronecker_at_two():
    for a in range(-50, 50):
        want = 0 if a % 2 == 0 else (1 if a % 8 in (1, 7) else -1)
        assert kronecker(a, 2) == want


@given(st.integers(-200, 200), st.integers(-200, 200), st.integers(1, 300))
def test_kronecker_multiplicative_in_top(a, b, n):
    assert kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n)


@given(st.integers(-200, 200), st.integers(1, 300), st.integers(1, 300))
def test_kronecker_multiplicative_in_bottom(a, m, n):
    assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


def test_kronecker_of_fraction_uses_square_class():
    assert kronecker(Fraction(2, 3), 5) == kronecker(6, 5)
    assert kronecker(Fraction(1, 4), 7) == 1


def test_jacobi_needs_odd_modulus():
    with pytest.raises(ValueError):
        jacobi(3, 4)


# primes and factoring ------------------------------------------------------

@pytest.mark.parametrize("n,want", [(2879, True), (1, False), (66239, True), (2, True),
                                    (0, False), (561, False), (2**61 - 1, True),
                                    (3215031751, False)])
def test_is_prime_examples(n, want):
    assert is_prime(n) is want


def test_is_prime_matches_sieve():
    ps = set(small_primes(5000))
    assert all(is_prime(n) == (n in ps) for n in range(5000))


@given(st.integers(1, 10**6))
def test_factorize_roundtrip(n):
    f = factorize(n)
    assert math.prod(p**e for p, e in f.items()) == n
    assert all(is_prime(p) for p in f)


def test_divisors_and_phi():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert euler_phi(576) == 192
    assert [euler_phi(n) for n in range(1, 11)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]


def test_squarefree_and_square_class():
    assert squarefree_part(72) == 2
    assert squarefree_part(-12) == -3
    assert square_class(Fraction(3, 4)) == 3
    assert square_class(Fraction(1, 2)) == 2


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_xgcd(a, b):
    g, x, y = xgcd(a, b)
    assert g == math.gcd(a, b) and a * x + b * y == g


def test_residue_arithmetic():
    a, b = Residue(3, 7), Residue(5, 7)
    assert (a + b).value == 1 and (a * b).value == 1 and (a - b).value == 5
    assert (a.inverse() * a).value == 1
    assert (a ** 6).value == 1


# dedekind sums and the eta multiplier -----------------------------------

def test_dedekind_sum_against_definition():
    def saw(x):
        return 0 if x == math.floor(x) else x - math.floor(x) - Fraction(1, 2)

    for k in range(1, 30):
        for h in range(-30, 30):
            if math.gcd(h, k) != 1:
                continue
            want = sum(saw(Fraction(r, k)) * saw(Fraction(h * r, k)) for r in range(1, k))
            assert dedekind_sum(h, k) == want


@pytest.mark.parametrize("g,want", [(T_MATRIX, 1), (S_MATRIX, 21), (IDENTITY, 0)])
def test_multiplier_examples(g, want):
    assert eta_multiplier(g) % 24 == want


def test_multiplier_of_S_numerically():
    # eta(-1/z) = sqrt(-iz) eta(z); against sqrt(z) this leaves exp(-pi i/4)
    z = 1j
    ratio = eta(-1 / z) / (cmath.sqrt(z) * eta(z))
    assert abs(ratio - cmath.exp(2j * cmath.pi * 21 / 24)) < 1e-12


def random_sl2(rng, bound=20):
    while True:
        a, c = rng.randint(-bound, bound), rng.randint(-bound, bound)
        if math.gcd(a, c) != 1:
            continue
        g, x, y = xgcd(a, c)
        d, b = x, -y          # a d - b c = 1
        k = rng.randint(-3, 3)
        return Mat2(a + k * 0, b + k * a, c, d + k * c)


def test_multiplier_transformation_law_numerically():
    """eta(g z) = eps_g (cz + d)^(1/2) eta(z), principal branch."""
    rng = random.Random(1)
    z = 0.3 + 1j
    for _ in range(150):
        g = random_sl2(rng)
        assert g.det == 1
        w = (g.a * z + g.b) / (g.c * z + g.d)
        lhs = eta(w) / (cmath.sqrt(g.c * z + g.d) * eta(z))
        eps = cmath.exp(2j * cmath.pi * eta_multiplier(g) / 24)
        assert abs(lhs - eps) < 1e-8, g


def test_multiplier_cocycle_numerically():
    """eps_{g1 g2} from eps_{g1}, eps_{g2} and the square-root correction."""
    rng = random.Random(2)
    z = 0.3 + 1j
    for _ in range(100):
        g1, g2 = random_sl2(rng), random_sl2(rng)
        g = g1 @ g2
        w = (g2.a * z + g2.b) / (g2.c * z + g2.d)
        j1 = cmath.sqrt(g1.c * w + g1.d)
        j2 = cmath.sqrt(g2.c * z + g2.d)
        j12 = cmath.sqrt(g.c * z + g.d)
        sigma = j1 * j2 / j12                  # +-1
        e = lambda m: cmath.exp(2j * cmath.pi * eta_multiplier(m) / 24)
        assert abs(e(g) - e(g1) * e(g2) * sigma) < 1e-8


def test_cusp_matrix_maps_infinity_to_cusp():
    for c in range(1, 30):
        for a in range(-10, 10):
            if math.gcd(a, c) != 1:
                continue
            g = cusp_matrix(a, c)
            assert g.det == 1 and (g.a, g.c) == (a, c)
            assert abs(2 * g.d) <= c
    assert cusp_matrix(1, 0) == IDENTITY
