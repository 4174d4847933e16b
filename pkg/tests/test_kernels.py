import numpy as np
import pytest

from maninlab import kernels
from maninlab.kernels import pykernels

try:
    from maninlab.kernels import _ckernels as ckernels
except ImportError:
    ckernels = None

needs_compiled = pytest.mark.skipif(ckernels is None, reason="compiled kernels not built")


def _args(f):
    c, e = f.exponent_matrix()
    return c, e


@needs_compiled
def test_backend_selected():
    assert kernels.BACKEND in ("c", "python")


@needs_compiled
@pytest.mark.parametrize("p", [3, 7, 13])
def test_parity_cone_count(conic, p):
    c, e = _args(conic)
    assert ckernels.cone_count_fp(c, e, 3, p) == pykernels.cone_count_fp(c, e, 3, p)


@needs_compiled
def test_parity_sections(conic, quadric4):
    for f, a in [(conic, (1, 2, 3)), (conic, (1, 0, 0)), (quadric4, (1, 1, 0, 2))]:
        c, e = _args(f)
        gc, ge, gv = kernels._grad_arrays(f)
        a64 = np.asarray(a, dtype=np.int64)
        for p in (3, 5, 7):
            assert ckernels.section_counts_fp(
                c, e, gc, ge, gv, a64, f.n, p
            ) == pykernels.section_counts_fp(c, e, gc, ge, gv, a64, f.n, p)


@needs_compiled
def test_parity_prime_power_and_profiles(conic, quadric4):
    for f, p, k in [(conic, 3, 3), (conic, 5, 2), (quadric4, 3, 2), (conic, 2, 4)]:
        c, e = _args(f)
        assert ckernels.prim_zero_count_pk(c, e, f.n, p, k, None) == pykernels.prim_zero_count_pk(
            c, e, f.n, p, k, None
        )
        assert np.array_equal(
            ckernels.f_valuation_profile(c, e, f.n, p, k),
            pykernels.f_valuation_profile(c, e, f.n, p, k),
        )


@needs_compiled
def test_parity_character_tables(conic):
    c, e = _args(conic)
    for a in [(1, 0, 0), (1, 2, 3), (0, 1, 1)]:
        a64 = np.asarray(a, dtype=np.int64)
        for p, alpha in [(3, 3), (5, 2), (7, 2)]:
            assert np.array_equal(
                ckernels.character_valuation_counts(c, e, a64, 3, p, alpha),
                pykernels.character_valuation_counts(c, e, a64, 3, p, alpha),
            )
            for beta in range(alpha + 1):
                assert np.array_equal(
                    ckernels.character_class_counts(c, e, a64, 3, p, alpha, beta),
                    pykernels.character_class_counts(c, e, a64, 3, p, alpha, beta),
                )


@needs_compiled
def test_parity_ball_candidates(conic, quadric4):
    for f, b, rad2 in [(conic, 1, 500), (conic, 3, 500), (quadric4, 2, 80)]:
        c, e = _args(f)
        ca, cq, cf = ckernels.ball_candidates(c, e, f.n, b, rad2)
        pa, pq, pf = pykernels.ball_candidates(c, e, f.n, b, rad2)
        assert np.array_equal(ca, pa)
        assert np.array_equal(cq, pq)
        assert np.array_equal(cf, pf)


def test_profile_totals(conic):
    # the profile partitions all primitive residues mod p^k
    for p, k in [(3, 2), (5, 2), (2, 3)]:
        prof = kernels.f_valuation_profile(conic, p, k)
        m = p**k
        assert prof.sum() == m**3 - (m // p) ** 3


def test_character_counts_unit_scaling_invariance(conic):
    # counts over {p^beta | f} are constant on valuation classes of <a, y>
    for p, alpha in [(3, 2), (5, 2)]:
        counts = kernels.character_valuation_counts(conic, (1, 2, 3), p, alpha)
        m = p**alpha
        for beta in range(alpha + 1):
            cge = counts[beta:].sum(axis=0)
            for j in range(alpha):
                cls = [c for c in range(1, m) if c % p**j == 0 and c % p ** (j + 1) != 0]
                vals = {int(cge[c]) for c in cls}
                assert len(vals) <= 1, (p, alpha, beta, j)


def test_gf_square_field_table_properties():
    # quadratic-extension multiplication: no zero divisors, so every
    # nonzero element permutes the nonzero elements
    for p in (2, 3, 5):
        mul = pykernels._gf2_mul_table(p)
        q = p * p
        nonzero = {v for v in range(q) if v != 0}
        for x in nonzero:
            row = {int(mul[x, y]) for y in nonzero}
            assert row == nonzero, (p, x)


def test_singular_detection(conic, fermat_cubic):
    assert kernels.singular_point_exists(conic, 2)
    assert not kernels.singular_point_exists(conic, 3)
    assert not kernels.singular_point_exists(conic, 5)
    assert kernels.singular_point_exists(fermat_cubic, 3)
    assert not kernels.singular_point_exists(fermat_cubic, 2)  # smooth over F_4 too
