"""Exact point counts for Z_f and its hyperplane sections over F_p and Z/p^alpha.

Projective counts are affine-cone counts divided by the number of unit
scalings: (p - 1) over F_p, (p - 1) p^(alpha - 1) over Z/p^alpha.
Exhaustive enumeration is the ground truth; Hensel-type formulas are
fast paths cross-validated against it on overlapping ranges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .polynomial import BudgetExceeded, HomogeneousPolynomial


class BadPrime(ValueError):
    """A precondition on the prime (good reduction, p coprime to a) failed."""


DEFAULT_BUDGET = 10**8


@dataclass(frozen=True)
class SectionCount:
    """#(Z_f cap H_a)(F_p) split by transversality of the intersection."""

    p: int
    total: int
    transverse: int
    nontransverse: int


@dataclass(frozen=True)
class CharacterVector:
    """Nonzero integer frequency vector a; primitive when content(a) = 1."""

    a: tuple[int, ...]

    @staticmethod
    def make(a: Sequence[int]) -> "CharacterVector":
        a = tuple(int(v) for v in a)
        if not a or all(v == 0 for v in a):
            raise ValueError("character vector must be nonzero")
        return CharacterVector(a=a)

    @property
    def content(self) -> int:
        return math.gcd(*(abs(v) for v in self.a))

    @property
    def primitive(self) -> bool:
        return self.content == 1

    def divides(self, p: int) -> bool:
        """True when a = 0 mod p (p belongs to S(a))."""
        return all(v % p == 0 for v in self.a)


def _as_vector(a) -> tuple[int, ...]:
    if isinstance(a, CharacterVector):
        return a.a
    return CharacterVector.make(a).a


def _check_budget(cost: int, budget: int, what: str) -> None:
    if cost > budget:
        raise BudgetExceeded(f"{what} needs {cost} evaluations (budget {budget})")


def _diagonal_projective_count(f: HomogeneousPolynomial, p: int) -> int:
    """#Z_f(F_p) for a diagonal form via exact value-distribution convolution.

    Each term c*x^e contributes the counting vector D[v] = #{x : c x^e = v};
    the vectors are convolved exactly (Kronecker substitution into a big
    integer) and folded mod p.  Cost ~ O(n p) + one big-int multiply.
    """
    if not f.is_diagonal():
        raise ValueError("diagonal fast path requires a diagonal form")
    xs = np.arange(p, dtype=np.int64)
    used = 0
    packed = None
    for e, c in f.terms:
        i = next(j for j, ei in enumerate(e) if ei)
        used += 1
        vals = np.ones(p, dtype=np.int64)
        for _ in range(e[i]):
            vals = (vals * xs) % p
        vals = (vals * (c % p)) % p
        dist = np.bincount(vals, minlength=p).astype(np.uint64)
        chunk = int.from_bytes(dist.astype("<u8").tobytes(), "little")
        packed = chunk if packed is None else packed * chunk
    # unpack the linear convolution and fold it mod p
    nbytes = (packed.bit_length() + 7) // 8
    pad = (-nbytes) % 8
    buf = packed.to_bytes(nbytes + pad, "little")
    lin = np.frombuffer(buf, dtype="<u8").astype(object)
    zero_count = int(sum(lin[0::p]))
    zero_count *= p ** (f.n - used)  # variables f does not involve are free
    return (zero_count - 1) // (p - 1)


def count_projective_hypersurface(
    f: HomogeneousPolynomial,
    p: int,
    budget: int = DEFAULT_BUDGET,
    method: str = "auto",
) -> int:
    """#Z_f(F_p), exactly."""
    if method == "auto":
        if f.is_diagonal() and p > 50:
            method = "diagonal"
        else:
            method = "exhaustive"
    if method == "diagonal":
        return _diagonal_projective_count(f, p)
    if method != "exhaustive":
        raise ValueError(f"unknown method {method!r}")
    _check_budget(p**f.n, budget, f"cone count at p={p}")
    cone = kernels.cone_count_fp(f, p)
    assert cone % (p - 1) == 0
    return cone // (p - 1)


def tau_p(f: HomogeneousPolynomial, p: int, budget: int = DEFAULT_BUDGET) -> Fraction:
    """(1 - 1/p) #Z_f(F_p) / p^(n-2), the normalized local point density."""
    count = count_projective_hypersurface(f, p, budget=budget)
    return Fraction((p - 1) * count, p ** (f.n - 1))


def count_section(
    f: HomogeneousPolynomial,
    a,
    p: int,
    bad: Iterable[int] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> SectionCount:
    """Exhaustive count of Z_f cap H_a over F_p with transversality split."""
    av = _as_vector(a)
    if all(v % p == 0 for v in av):
        raise BadPrime(f"a = 0 mod {p}; rescale the character vector")
    if bad is not None and p in set(bad):
        raise BadPrime(f"p={p} is a bad prime for this form")
    _check_budget(p**f.n, budget, f"section count at p={p}")
    total_cone, trans_cone = kernels.section_counts_fp(f, av, p)
    assert total_cone % (p - 1) == 0 and trans_cone % (p - 1) == 0
    total = total_cone // (p - 1)
    transverse = trans_cone // (p - 1)
    return SectionCount(p=p, total=total, transverse=transverse, nontransverse=total - transverse)


def _fp_cone_points(f: HomogeneousPolynomial, p: int, a=None) -> list[tuple[int, ...]]:
    """Nonzero x in F_p^n with f(x) = 0 (and <a,x> = 0)."""
    pts = []
    import itertools

    for x in itertools.product(range(p), repeat=f.n):
        if all(v == 0 for v in x):
            continue
        if f.evaluate(x, mod=p) != 0:
            continue
        if a is not None and sum(ai * xi for ai, xi in zip(a, x)) % p != 0:
            continue
        pts.append(x)
    return pts


def _solve_linear_mod_p(rows, rhs, p: int):
    """Solutions u of rows*u = rhs over F_p as (particular, kernel basis).

    Returns None when inconsistent.
    """
    m = [list(r) + [b % p] for r, b in zip(rows, rhs)]
    n = len(m[0]) - 1
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][c] % p), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [(v * inv) % p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] % p:
                fac = m[i][c]
                m[i] = [(v - fac * w) % p for v, w in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    for i in range(r, len(m)):
        if m[i][n] % p:
            return None
    part = [0] * n
    for i, c in enumerate(pivots):
        part[c] = m[i][n]
    basis = []
    free = [c for c in range(n) if c not in pivots]
    for fc in free:
        vec = [0] * n
        vec[fc] = 1
        for i, c in enumerate(pivots):
            vec[c] = (-m[i][fc]) % p
        basis.append(vec)
    return part, basis


def _lifted_cone_count(f: HomogeneousPolynomial, p: int, alpha: int, a=None) -> int:
    """# cone solutions mod p^alpha by layered lifting from the F_p set.

    Each solution x mod p^j lifts to x + p^j u where u solves the linear
    system <grad f(x), u> = -f(x)/p^j (and <a, u> = -<a,x>/p^j) mod p.
    """
    grads = f.gradient()
    reps = _fp_cone_points(f, p, a)
    pj = p
    for _ in range(1, alpha):
        new_reps = []
        for x in reps:
            rows = [[g.evaluate(x, mod=p) for g in grads]]
            rhs = [(-(f.evaluate(x) // pj)) % p]
            if a is not None:
                rows.append([ai % p for ai in a])
                rhs.append((-(sum(ai * xi for ai, xi in zip(a, x)) // pj)) % p)
            sol = _solve_linear_mod_p(rows, rhs, p)
            if sol is None:
                continue
            part, basis = sol
            import itertools

            for combo in itertools.product(range(p), repeat=len(basis)):
                u = list(part)
                for t, vec in zip(combo, basis):
                    if t:
                        u = [(ui + t * vi) % p for ui, vi in zip(u, vec)]
                new_reps.append(tuple(xi + pj * ui for xi, ui in zip(x, u)))
        reps = new_reps
        pj *= p
    return len(reps)


def count_mod_prime_power(
    f: HomogeneousPolynomial,
    p: int,
    alpha: int,
    a=None,
    method: str = "auto",
    bad: Iterable[int] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> int:
    """#Z_f(Z/p^alpha) or #Z_{f,a}(Z/p^alpha): primitive solutions up to units.

    ``method``: exhaustive (residue grid), lift (layered lifting from the
    F_p solutions; exact for any smooth-over-Z_p input), hensel (closed
    formula, smooth cases only), auto (exhaustive when affordable, else
    lift).
    """
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    av = None if a is None else _as_vector(a)
    if bad is not None and p in set(bad):
        raise BadPrime(f"p={p} is a bad prime for this form")
    if av is not None and all(v % p == 0 for v in av):
        raise BadPrime(f"a = 0 mod {p}")
    units = (p - 1) * p ** (alpha - 1)
    if method == "auto":
        method = "exhaustive" if p ** (alpha * f.n) <= budget else "lift"
    if method == "hensel":
        if av is None:
            base = count_projective_hypersurface(f, p, budget=budget)
            return p ** ((alpha - 1) * (f.n - 2)) * base
        sec = count_section(f, av, p, budget=budget)
        if sec.nontransverse:
            raise ValueError("closed Hensel formula needs a transverse section; use lift")
        return p ** ((alpha - 1) * (f.n - 3)) * sec.total
    if method == "lift":
        cone = _lifted_cone_count(f, p, alpha, av)
    elif method == "exhaustive":
        _check_budget(p ** (alpha * f.n), budget, f"residue count mod {p}^{alpha}")
        cone = kernels.prim_zero_count_pk(f, p, alpha, av)
    else:
        raise ValueError(f"unknown method {method!r}")
    assert cone % units == 0, "cone count not divisible by the unit-orbit size"
    return cone // units


def projective_space_count(d: int, q: int) -> int:
    """#P^d(F_q) = (q^(d+1) - 1)/(q - 1)."""
    return (q ** (d + 1) - 1) // (q - 1)


def weil_bound_check(point_count: int, dim: int, degree: int, q: int) -> bool:
    """point_count <= #P^dim(F_q) * degree."""
    return point_count <= projective_space_count(dim, q) * degree


def transversality_constant(f: HomogeneousPolynomial) -> int:
    """Degree bound d(d-1)^(n-1) for the non-transverse locus."""
    return f.d * (f.d - 1) ** (f.n - 1)
