import math
import random
from fractions import Fraction

import pytest

from maninlab import padic
from maninlab.heights import (
    INFINITE_PLACE,
    PicardParameter,
    RationalPoint,
    anticanonical_height_sq,
    archimedean_height_parts,
    finite_height_parts,
    global_height,
    height_decomposition,
    local_height,
    padic_sup_norm,
)
from maninlab.polynomial import primes_up_to


def test_point_canonicalization():
    x = RationalPoint.make([2, 4, 6], 8)
    assert (x.a, x.b) == ((1, 2, 3), 4)
    y = RationalPoint.make([1, 0, 0], -3)
    assert (y.a, y.b) == ((-1, 0, 0), 3)
    z = RationalPoint.from_fractions([Fraction(1, 3), 0, 0])
    assert (z.a, z.b) == ((1, 0, 0), 3)
    assert RationalPoint.make([0, 0, 0], 5) == RationalPoint.make([0, 0, 0], 1)


def test_sup_norm_examples():
    assert padic_sup_norm(RationalPoint.from_fractions([Fraction(1, 3), 0, 0]), 3) == 3
    assert padic_sup_norm(RationalPoint.make([1, 2, 2]), 5) == 1
    assert padic_sup_norm(RationalPoint.make([5, 10, 25], 1), 5) == Fraction(1, 5)
    assert padic_sup_norm(RationalPoint.make([0, 0, 0]), 7) == 0


def test_local_height_origin_all_places(conic):
    x = RationalPoint.make([0, 0, 0])
    for v in (2, 3, 5, INFINITE_PLACE):
        lh = local_height(conic, x, v)
        assert float(lh.h_d0) == 1 and float(lh.h_d1) == 1


def test_local_height_archimedean_example(conic):
    lh = local_height(conic, RationalPoint.make([1, 0, 0]), INFINITE_PLACE)
    assert lh.h_d1 == pytest.approx(2 / math.sqrt(3), rel=1e-12)
    assert lh.h_d0 == pytest.approx(math.sqrt(6) / 2, rel=1e-12)


def test_local_height_finite_example(conic):
    x = RationalPoint.from_fractions([Fraction(1, 3), 0, 0])
    lh = local_height(conic, x, 3)
    assert (lh.h_d0, lh.h_d1) == (Fraction(3), Fraction(1))
    assert padic.stratum_of(conic, x, 3) == padic.U_a(1)


def test_global_height_examples(conic):
    s = PicardParameter.anticanonical(3)
    assert global_height(conic, s, RationalPoint.make([0, 0, 0])) == 1.0
    h = global_height(conic, s, RationalPoint.make([1, 0, 0]))
    assert h == pytest.approx(2 * math.sqrt(3), rel=1e-12)
    x = RationalPoint.from_fractions([Fraction(1, 3), 0, 0])
    h10 = global_height(conic, PicardParameter(1, 0), x)
    lh_inf = local_height(conic, x, INFINITE_PLACE)
    assert h10 == pytest.approx(3 * lh_inf.h_d0, rel=1e-12)


def test_height_decomposition_examples(conic):
    m, h1 = height_decomposition(conic, RationalPoint.make([0, 0, 0]))
    assert (m, h1) == (1.0, 1.0)
    m, h1 = height_decomposition(conic, RationalPoint.make([1, 0, 0]))
    assert m == pytest.approx(math.sqrt(2), rel=1e-12)
    assert h1 == pytest.approx(2 / math.sqrt(3), rel=1e-12)
    x = RationalPoint.from_fractions([Fraction(1, 3), 0, 0])
    m, h1 = height_decomposition(conic, x)
    assert m == pytest.approx(math.sqrt(10), rel=1e-12)
    _, h1_inf = archimedean_height_parts(conic, x)
    assert h1 == pytest.approx(1 * h1_inf, rel=1e-12)  # gcd(3, f(a)=1) = 1


def test_decomposition_reconstructs_anticanonical(conic):
    rng = random.Random(3)
    s = PicardParameter.anticanonical(3)
    for _ in range(50):
        x = RationalPoint.make([rng.randint(-9, 9) for _ in range(3)], rng.randint(1, 9))
        if x.is_zero:
            continue
        m, h1 = height_decomposition(conic, x)
        assert global_height(conic, s, x) == pytest.approx(m**4 / h1, rel=1e-10)
        assert anticanonical_height_sq(conic, x) == pytest.approx(
            (m**4 / h1) ** 2, rel=1e-9
        )


def _random_primitive(rng, n):
    while True:
        a = [rng.randint(-60, 60) for _ in range(n)]
        b = rng.randint(1, 60)
        x = RationalPoint.make(a, b)
        if not x.is_zero:
            return x


def test_finite_part_product_is_denominator(conic):
    # prod_p max(1, |x|_p) has one factor per p | b and telescopes to b
    rng = random.Random(11)
    for _ in range(200):
        x = _random_primitive(rng, 3)
        prod = Fraction(1)
        nontrivial = 0
        for p in primes_up_to(70):
            m = max(Fraction(1), padic_sup_norm(x, p))
            if m != 1:
                nontrivial += 1
                assert x.b % p == 0
            prod *= m
        assert prod == x.b
        assert nontrivial == len([p for p in primes_up_to(70) if x.b % p == 0])


def test_local_factorization_h0_h1(conic):
    rng = random.Random(13)
    for _ in range(100):
        x = _random_primitive(rng, 3)
        for p in (2, 3, 5, 7):
            lh = local_height(conic, x, p)
            assert lh.h_d0 * lh.h_d1 == max(Fraction(1), padic_sup_norm(x, p))


def test_global_finite_parts(conic):
    rng = random.Random(17)
    for _ in range(100):
        x = _random_primitive(rng, 3)
        m_fin, h1_fin = finite_height_parts(conic, x)
        assert m_fin == x.b
        fa = conic.evaluate(x.a)
        assert h1_fin == (x.b if fa == 0 else math.gcd(x.b, abs(fa)))


def test_stratum_table_consistency(conic):
    # (h_d0, h_d1) must match the stratum of the point at every prime
    rng = random.Random(19)
    for _ in range(150):
        x = _random_primitive(rng, 3)
        for p in (2, 3, 5, 7, 11):
            st = padic.stratum_of(conic, x, p)
            e0, e1 = st.height_exponents()
            lh = local_height(conic, x, p)
            assert lh.h_d0 == Fraction(p) ** e0, (x, p, st)
            assert lh.h_d1 == Fraction(p) ** e1, (x, p, st)


def test_height_at_least_one_with_unique_minimum(conic):
    from maninlab.enumeration import points_with_heights

    pts = points_with_heights(conic, 100.0)
    minima = [x for x, h in pts if h <= 1.0 + 1e-12]
    assert len(minima) == 1 and minima[0].is_zero
    assert all(h >= 1.0 for _, h in pts)
