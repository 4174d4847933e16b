import random
from fractions import Fraction

import pytest

from maninlab import padic
from maninlab.finite_field import BadPrime
from maninlab.heights import RationalPoint
from maninlab.padic import (
    PoleAt,
    U0,
    U1_a,
    U1_ab,
    U_a,
    character_sum_I,
    fourier_char_closed,
    fourier_char_direct,
    fourier_trivial_closed,
    fourier_trivial_direct,
    incidence_volume,
    local_density_via_strata,
    mean_value_psi,
    stratum_of,
    stratum_volume_closed,
    stratum_volume_direct,
)
from maninlab.polynomial import BudgetExceeded

BAD = {2}


def test_stratum_descriptor_validation():
    with pytest.raises(ValueError):
        padic.StratumDescriptor("U1_ab", 2, 2)
    with pytest.raises(ValueError):
        padic.StratumDescriptor("U1_a")
    with pytest.raises(ValueError):
        padic.StratumDescriptor("bogus", 1)
    assert U1_ab(3, 1).height_exponents() == (2, 1)
    assert U1_a(2).height_exponents() == (0, 2)
    assert U_a(2).height_exponents() == (2, 0)


def test_volume_examples(conic):
    assert stratum_volume_direct(conic, 3, U0()) == 1
    assert stratum_volume_direct(conic, 3, U1_a(1)) == 8
    assert stratum_volume_direct(conic, 3, U_a(1)) == 18
    assert stratum_volume_direct(conic, 3, U1_ab(2, 1)) == 144
    assert stratum_volume_closed(conic, 3, U1_ab(2, 1), bad=BAD) == 144


def test_volumes_closed_equals_direct(conic):
    strata = [U0(), U1_a(1), U1_a(2), U_a(1), U_a(2), U1_ab(2, 1), U1_ab(3, 1), U1_ab(3, 2)]
    for p in (3, 5, 7):
        for st in strata:
            assert stratum_volume_direct(conic, p, st) == stratum_volume_closed(
                conic, p, st, bad=BAD
            ), (p, st)


def test_volume_partition_covers_balls(conic):
    # strata up to level k-1 fill the ball |x| <= p^(k-1) of volume p^(n(k-1))
    for p in (3, 5, 7):
        for k in (2, 3, 4):
            total = stratum_volume_direct(conic, p, U0())
            for alpha in range(1, k):
                total += stratum_volume_direct(conic, p, U_a(alpha))
                total += stratum_volume_direct(conic, p, U1_a(alpha))
                for beta in range(1, alpha):
                    total += stratum_volume_direct(conic, p, U1_ab(alpha, beta))
            assert total == Fraction(p) ** (conic.n * (k - 1)), (p, k)


def test_volume_closed_rejects_bad_prime(conic):
    with pytest.raises(BadPrime):
        stratum_volume_closed(conic, 2, U1_a(1), bad=BAD)
    with pytest.raises(BadPrime):
        stratum_volume_closed(conic, 2, U1_a(1))  # detected without the hint


def test_mean_value_psi_cases():
    for p in (2, 3, 5, 7, 11):
        assert mean_value_psi(2, p) == 1
        assert mean_value_psi(Fraction(1, p), p) == Fraction(-1, p - 1)
        assert mean_value_psi(Fraction(1, p * p), p) == 0
        # v_p(3/p^3) <= -2 for every p, including the cancellation at p = 3
        assert mean_value_psi(Fraction(3, p * p * p), p) == 0
        assert mean_value_psi(Fraction(3, p), p) == (1 if p == 3 else Fraction(-1, p - 1))
    assert mean_value_psi(Fraction(1, 5), 5) == Fraction(-1, 4)
    assert mean_value_psi(Fraction(1, 25), 5) == 0


def test_character_sum_examples(conic):
    assert character_sum_I(conic, 3, (1, 0, 0), 1, 0).exact == -1
    assert character_sum_I(conic, 3, (1, 0, 0), 2, 0).exact == 0
    assert character_sum_I(conic, 5, (1, 0, 0), 2, 1).exact == 0
    cs = character_sum_I(conic, 5, (1, 0, 0), 1, 1)
    assert cs.exact == 4 and abs(cs.value - 4) < 1e-9


def test_character_sum_vanishing_range(conic):
    for p in (3, 5):
        for a in ((1, 0, 0), (1, 1, 0), (1, 2, 3)):
            for alpha in (2, 3):
                for beta in range(1, alpha):
                    cs = character_sum_I(conic, p, a, alpha, beta)
                    assert cs.exact == 0, (p, a, alpha, beta)


def test_character_sum_preconditions(conic):
    with pytest.raises(BadPrime):
        character_sum_I(conic, 3, (3, 0, 3), 1, 0)
    with pytest.raises(ValueError):
        character_sum_I(conic, 3, (1, 0, 0), 1, 2)
    with pytest.raises(BudgetExceeded):
        character_sum_I(conic, 5, (1, 0, 0), 4, 0, budget=10**6)


def test_incidence_volume_examples(conic):
    assert incidence_volume(conic, 5, (1, 0, 0), 1, 1) == Fraction(8, 125)
    assert incidence_volume(conic, 5, (1, 0, 0), 2, 1) == Fraction(8, 625)
    assert incidence_volume(conic, 3, (1, 0, 0), 1, 1) == 0  # empty section


def test_incidence_volume_closed_equals_direct(conic):
    for p in (3, 5):
        for a in ((1, 0, 0), (1, 1, 0), (1, 2, 3)):
            for alpha in (1, 2):
                for beta in range(1, alpha + 1):
                    closed = incidence_volume(conic, p, a, alpha, beta, method="closed")
                    direct = incidence_volume(conic, p, a, alpha, beta, method="direct")
                    assert closed == direct, (p, a, alpha, beta)


def test_fourier_trivial_closed_values(conic):
    assert fourier_trivial_closed(conic, 3, (4, 3), bad=BAD).value == Fraction(52, 27)
    # the tau term vanishes when s0 - n = s1 - n
    assert fourier_trivial_closed(conic, 3, (4, 4), bad=BAD).value == Fraction(40, 27)
    assert fourier_trivial_closed(conic, 5, (4, 3), bad=BAD).value == Fraction(186, 125)


def test_fourier_trivial_equivalent_forms_random_complex(conic):
    rng = random.Random(23)
    for _ in range(20):
        s = (
            complex(3 + 0.2 + 2 * rng.random(), rng.uniform(-3, 3)),
            complex(2 + 0.2 + 2 * rng.random(), rng.uniform(-3, 3)),
        )
        v = fourier_trivial_closed(conic, 5, s, bad=BAD)  # asserts internally
        assert abs(complex(v.extras["equivalent_form"]) - v.as_complex()) <= 1e-9


def test_fourier_trivial_direct_truncations(conic):
    v0 = fourier_trivial_direct(conic, 3, (4, 3), truncation=0, bad=BAD)
    assert v0.value == 1
    v12 = fourier_trivial_direct(conic, 3, (4, 3), truncation=12, bad=BAD)
    diff = abs(float(v12.value) - 52 / 27)
    assert diff <= v12.error_bound <= 1e-4
    # geometric tail decay: one more level shrinks the bound by p^-min(...)
    v13 = fourier_trivial_direct(conic, 3, (4, 3), truncation=13, bad=BAD)
    assert v13.error_bound == pytest.approx(v12.error_bound / 3, rel=0.3)


def test_fourier_trivial_poles(conic):
    with pytest.raises(PoleAt):
        fourier_trivial_closed(conic, 3, (3, 3), bad=BAD)
    with pytest.raises(PoleAt):
        fourier_trivial_closed(conic, 3, (4, 2), bad=BAD)


def test_fourier_char_closed_values(conic):
    v5 = fourier_char_closed(conic, 5, (1, 0, 0), (4, 3), bad=BAD)
    assert v5.value == Fraction(640, 625)
    assert v5.extras["printed_variant"] == Fraction(628, 625)
    assert v5.extras["matches_printed_variant"] is False
    v3 = fourier_char_closed(conic, 3, (1, 0, 0), (4, 3), bad=BAD)
    assert v3.value == Fraction(8, 9)
    assert v3.extras["printed_variant"] == Fraction(76, 81)
    # vanishing factor at s0 = s1
    vss = fourier_char_closed(conic, 5, (1, 0, 0), (4, 4), bad=BAD)
    assert vss.value == 1 - Fraction(5) ** -4


def test_fourier_char_closed_equals_direct_exactly(conic):
    for p, a in [(3, (1, 0, 0)), (5, (1, 0, 0)), (5, (1, 2, 3)), (7, (1, 2, 3))]:
        closed = fourier_char_closed(conic, p, a, (4, 3), bad=BAD)
        direct = fourier_char_direct(conic, p, a, (4, 3), truncation=3, bad=BAD)
        # both routes are exact rationals here and the tails vanish
        assert closed.value == direct.value, (p, a)


def test_fourier_char_direct_small_truncation_structure(conic):
    # A=1: value = 1 + p^-s0 I(1,0) - (p^(s1-s0)-1) p^-s1 I(1,1)
    p, a, s = 5, (1, 0, 0), (4, 3)
    i10 = character_sum_I(conic, p, a, 1, 0).exact
    i11 = character_sum_I(conic, p, a, 1, 1).exact
    expected = (
        1
        + Fraction(p) ** -4 * i10
        - (Fraction(p) ** -1 - 1) * Fraction(p) ** -3 * i11
    )
    got = fourier_char_direct(conic, p, a, s, truncation=1, bad=BAD)
    assert got.value == expected


def test_fourier_char_trivial_consistency(conic):
    for p in (3, 5):
        t = fourier_trivial_direct(conic, p, (4, 3), truncation=3, bad=BAD)
        c = fourier_char_direct(conic, p, None, (4, 3), truncation=3, bad=BAD)
        assert t.value == c.value


def test_fourier_char_smooth_tower_matches_lift(conic):
    # smooth sections: the geometric series uses p^((alpha-1)(n-3)) * base
    from maninlab.finite_field import count_mod_prime_power, count_section

    sec = count_section(conic, (1, 0, 0), 5)
    assert sec.nontransverse == 0
    for alpha in (2, 3):
        assert count_mod_prime_power(conic, 5, alpha, (1, 0, 0), method="lift") == 5 ** (
            (alpha - 1) * (conic.n - 3)
        ) * sec.total


def test_fourier_char_bad_prime_rejected(conic):
    with pytest.raises(BadPrime):
        fourier_char_closed(conic, 2, (1, 0, 0), (4, 3), bad=BAD)
    with pytest.raises(BadPrime):
        fourier_char_closed(conic, 3, (3, 0, 3), (4, 3), bad=BAD)


def test_local_density_via_strata_dyadic(conic):
    value, tail, exact = local_density_via_strata(conic, 2, (4, 3))
    assert exact and tail == 0.0
    assert value == Fraction(9, 4)


def test_local_density_via_strata_good_prime_consistency(conic):
    # at a good prime the raw stratified value must match the closed form
    closed = fourier_trivial_closed(conic, 3, (4, 3), bad=BAD).value
    value, tail, exact = local_density_via_strata(conic, 3, (4, 3), valuation_cut=4)
    assert not exact
    assert abs(float(value) - float(closed)) <= 2 * tail + 1e-12


def test_stratum_of_points(conic):
    assert stratum_of(conic, RationalPoint.make([1, 2, 2]), 5) == U0()
    x = RationalPoint.from_fractions([Fraction(1, 3), 0, 0])
    assert stratum_of(conic, x, 3) == U_a(1)
    # f(a) = 50, b = 5: alpha = 1, beta = v_5(50) = 2 >= alpha
    y = RationalPoint.make([3, 4, 5], 5)
    assert stratum_of(conic, y, 5) == U1_a(1)
    # b = 9: alpha = 2; f(a) = 1+4+16 = 21, beta = v_3(21) = 1 < 2
    z = RationalPoint.make([1, 2, 4], 9)
    assert stratum_of(conic, z, 3) == U1_ab(2, 1)


def test_char_transform_dominated_by_trivial(conic):
    # |H-hat_p(s; psi_a)| <= H-hat_p(Re s; psi_0): the trivial character
    # integrates the same positive function without oscillation
    for p, a in [(3, (1, 0, 0)), (5, (1, 2, 3)), (7, (1, 1, 0))]:
        for s in [(4, 3), (4.5, 3.5), (complex(4, 1.3), complex(3, -0.7))]:
            triv = fourier_trivial_closed(conic, p, (s[0].real if isinstance(s[0], complex) else s[0],
                                                     s[1].real if isinstance(s[1], complex) else s[1]), bad=BAD)
            char = fourier_char_closed(conic, p, a, s, bad=BAD)
            assert abs(char.as_complex()) <= float(triv.value) + 1e-12, (p, a, s)
