"""Stratified p-adic volumes, additive character sums, and the local
Fourier transforms of the height function.

Q_p^n splits into level sets of (|x|_p, |f(x)|_p) on which both local
heights are constant:

    U(0)           x in Z_p^n                                 (1, 1)
    U1(a,b)        |x| = p^a, |f(x)| = p^(da-b), 1 <= b < a   (p^(a-b), p^b)
    U1(a)          |x| = p^a, |f(x)| <= p^((d-1)a)            (1, p^a)
    U(a)           |x| = p^a, |f(x)| = p^(da)                 (p^a, 1)

with the pair on the right giving (H_D0, H_D1).  Haar measure is
normalized by vol(Z_p^n) = 1 and the additive character is
psi(t) = exp(2 pi i {t}_p).

Every closed-form quantity here has an independent direct route
(residue counting or a definitional character sum); the direct route is
authoritative whenever the two disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .finite_field import (
    DEFAULT_BUDGET,
    BadPrime,
    CharacterVector,
    _as_vector,
    count_projective_hypersurface,
    count_section,
    tau_p,
    transversality_constant,
)
from .heights import RationalPoint, padic_sup_norm
from .polynomial import BudgetExceeded, HomogeneousPolynomial


class PoleAt(ValueError):
    """The requested parameter hits a pole of the local transform."""


# --------------------------------------------------------------------------
# parameter helpers


def _re(z) -> float:
    return z.real if isinstance(z, complex) else float(z)


def _is_integral(z) -> bool:
    if isinstance(z, int):
        return True
    if isinstance(z, Fraction):
        return z.denominator == 1
    if isinstance(z, float):
        return z.is_integer()
    return False


def _ppow(p: int, e):
    """p**e, exact Fraction for integral e, numeric otherwise."""
    if _is_integral(e):
        return Fraction(p) ** int(e)
    if isinstance(e, complex):
        return complex(p) ** e
    return float(p) ** float(e)


def _check_omega(p: int, n: int, s, need_s0_gt: float, need_s1_gt: float) -> None:
    s0, s1 = s
    if _re(s0) <= need_s0_gt or _re(s1) <= need_s1_gt:
        raise PoleAt(
            f"parameter s=({s0}, {s1}) outside the convergence region "
            f"Re(s0) > {need_s0_gt}, Re(s1) > {need_s1_gt}"
        )


@lru_cache(maxsize=4096)
def _is_bad_prime(f: HomogeneousPolynomial, p: int) -> bool:
    deg = 2 if p ** (2 * f.n) <= DEFAULT_BUDGET else 1
    return kernels.singular_point_exists(f, p, field_degree=deg)


def _assert_good(f: HomogeneousPolynomial, p: int, bad) -> None:
    if bad is not None:
        if p in set(int(q) for q in bad):
            raise BadPrime(f"p={p} is a bad prime for this form")
        return
    if _is_bad_prime(f, p):
        raise BadPrime(f"p={p} is a bad prime for this form")


# --------------------------------------------------------------------------
# strata


@dataclass(frozen=True)
class StratumDescriptor:
    kind: str  # "U0" | "U1_ab" | "U1_a" | "U_a"
    alpha: int | None = None
    beta: int | None = None

    def __post_init__(self):
        if self.kind == "U0":
            if self.alpha is not None or self.beta is not None:
                raise ValueError("U0 takes no parameters")
        elif self.kind in ("U1_a", "U_a"):
            if self.alpha is None or self.alpha < 1 or self.beta is not None:
                raise ValueError(f"{self.kind} needs alpha >= 1 only")
        elif self.kind == "U1_ab":
            if self.alpha is None or self.beta is None or not 1 <= self.beta < self.alpha:
                raise ValueError("U1_ab needs 1 <= beta < alpha")
        else:
            raise ValueError(f"unknown stratum kind {self.kind!r}")

    def height_exponents(self) -> tuple[int, int]:
        """(e0, e1) with H_D0 = p^e0, H_D1 = p^e1 on the stratum."""
        if self.kind == "U0":
            return 0, 0
        if self.kind == "U1_ab":
            return self.alpha - self.beta, self.beta
        if self.kind == "U1_a":
            return 0, self.alpha
        return self.alpha, 0


def U0() -> StratumDescriptor:
    return StratumDescriptor("U0")


def U1_ab(alpha: int, beta: int) -> StratumDescriptor:
    return StratumDescriptor("U1_ab", alpha, beta)


def U1_a(alpha: int) -> StratumDescriptor:
    return StratumDescriptor("U1_a", alpha)


def U_a(alpha: int) -> StratumDescriptor:
    return StratumDescriptor("U_a", alpha)


def stratum_of(f: HomogeneousPolynomial, x: RationalPoint, p: int) -> StratumDescriptor:
    """Stratum of a rational point viewed in Q_p^n."""
    norm = padic_sup_norm(x, p)
    if norm <= 1:
        return U0()
    alpha = 0
    num = norm.numerator
    while num > 1:
        num //= p
        alpha += 1
    F = f.evaluate(x.a)
    if F == 0:
        return U1_a(alpha)
    beta = 0
    while F % p == 0:
        F //= p
        beta += 1
    # for primitive a/b with p | b, v_p(f(x)) = v_p(f(a)) - d v_p(b), so
    # |f(x)|_p = p^(d alpha - beta) with beta = v_p(f(a))
    if beta == 0:
        return U_a(alpha)
    if beta < alpha:
        return U1_ab(alpha, beta)
    return U1_a(alpha)


# --------------------------------------------------------------------------
# volumes


@lru_cache(maxsize=4096)
def _profile_cached(f: HomogeneousPolynomial, p: int, k: int):
    prof = kernels.f_valuation_profile(f, p, k)
    prof.setflags(write=False)
    return prof


def stratum_volume_direct(
    f: HomogeneousPolynomial,
    p: int,
    stratum: StratumDescriptor,
    precision: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> Fraction:
    """Haar volume by residue counting after rescaling x = p^(-alpha) y.

    The rescaled conditions are determined mod p^k for k = beta + 1
    (U1_ab), k = alpha (U1_a) and k = 1 (U_a); any larger precision gives
    the same exact value.
    """
    if stratum.kind == "U0":
        return Fraction(1)
    alpha = stratum.alpha
    if stratum.kind == "U1_ab":
        kmin = stratum.beta + 1
    elif stratum.kind == "U1_a":
        kmin = alpha
    else:
        kmin = 1
    k = max(kmin, precision or 0)
    if p ** (k * f.n) > budget:
        raise BudgetExceeded(
            f"direct volume needs p^(k n) = {p**(k * f.n)} residues (budget {budget})"
        )
    prof = _profile_cached(f, p, k)
    scale = Fraction(p) ** (f.n * alpha) / Fraction(p) ** (f.n * k)
    if stratum.kind == "U1_ab":
        count = int(prof[stratum.beta])
    elif stratum.kind == "U1_a":
        count = int(prof[alpha:].sum())
    else:
        count = int(prof[0])
    return count * scale


def stratum_volume_closed(
    f: HomogeneousPolynomial,
    p: int,
    stratum: StratumDescriptor,
    bad=None,
    budget: int = DEFAULT_BUDGET,
) -> Fraction:
    """Closed-form volumes, valid at primes of smooth reduction."""
    _assert_good(f, p, bad)
    if stratum.kind == "U0":
        return Fraction(1)
    tau = tau_p(f, p, budget=budget)
    n, alpha = f.n, stratum.alpha
    if stratum.kind == "U1_ab":
        return Fraction(p - 1, p) * tau * Fraction(p) ** (n * alpha - stratum.beta)
    if stratum.kind == "U1_a":
        return tau * Fraction(p) ** ((n - 1) * alpha)
    return (1 - Fraction(p) ** (-n) - tau / p) * Fraction(p) ** (n * alpha)


def mean_value_psi(t, p: int) -> Fraction:
    """Average of psi(t u) over the units of Z_p."""
    t = Fraction(t)
    if t == 0:
        return Fraction(1)
    v = 0
    num, den = t.numerator, t.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    if v >= 0:
        return Fraction(1)
    if v == -1:
        return Fraction(-1, p - 1)
    return Fraction(0)


# --------------------------------------------------------------------------
# character sums


@lru_cache(maxsize=512)
def _char_profile(f: HomogeneousPolynomial, a: tuple, p: int, alpha: int):
    counts = kernels.character_valuation_counts(f, a, p, alpha)
    counts.setflags(write=False)
    return counts


@dataclass(frozen=True)
class CharacterSum:
    value: complex
    exact: Fraction
    error_bound: float


def character_sum_I(
    f: HomogeneousPolynomial,
    p: int,
    a,
    alpha: int,
    beta: int,
    budget: int = DEFAULT_BUDGET,
) -> CharacterSum:
    """I(alpha, beta): integral of psi_a over |x| = p^alpha, |f| <= p^(d alpha - beta).

    After x = p^(-alpha) y this is the plain sum of e(<a,y>/p^alpha) over
    primitive y mod p^alpha with p^beta | f(y).  The class-count table is
    invariant under unit scaling, so the sum collapses to the exact
    integer counts[0] - counts[p^(alpha-1)]; the complex evaluation is
    kept as the definitional cross-check.
    """
    av = _as_vector(a)
    if all(v % p == 0 for v in av):
        raise BadPrime(f"a = 0 mod {p}")
    return _character_sum_raw(f, p, av, alpha, beta, budget)


def _character_sum_raw(
    f: HomogeneousPolynomial,
    p: int,
    av: tuple,
    alpha: int,
    beta: int,
    budget: int,
) -> CharacterSum:
    """character_sum_I without the nonzero-character check (a = 0 gives the
    plain volume of the level set, used for the trivial-character route)."""
    if alpha < 1 or not 0 <= beta <= alpha:
        raise ValueError("need alpha >= 1 and 0 <= beta <= alpha")
    if p ** (alpha * f.n) > budget:
        raise BudgetExceeded(
            f"character sum at p^(n alpha) = {p**(alpha * f.n)} residues (budget {budget})"
        )
    counts = _char_profile(f, av, p, alpha)
    cge = counts[beta:].sum(axis=0)
    m = p**alpha
    exact = Fraction(int(cge[0]) - int(cge[m // p]))
    phases = np.exp(2j * np.pi * np.arange(m) / m)
    re = math.fsum((cge * phases.real).tolist())
    im = math.fsum((cge * phases.imag).tolist())
    value = complex(re, im)
    # phase rounding: each term carries ~2 ulp; counts are exact ints
    rounding = 4e-16 * float(cge.sum()) + 1e-12
    if abs(value - complex(exact)) > max(1e-9, rounding):
        raise AssertionError(
            f"character sum mismatch at p={p}, alpha={alpha}, beta={beta}: "
            f"{value} vs exact {exact}"
        )
    return CharacterSum(value=value, exact=exact, error_bound=min(rounding, 1e-9))


def incidence_volume(
    f: HomogeneousPolynomial,
    p: int,
    a,
    alpha: int,
    beta: int,
    method: str = "closed",
    budget: int = DEFAULT_BUDGET,
) -> Fraction:
    """vol(|x| = 1, p^beta | f(x), p^alpha | <a,x>) for 1 <= beta <= alpha.

    Closed form p^(-alpha) p^((2-n) beta) (1 - 1/p) #Z_{f,a}(Z/p^beta);
    the direct route counts residues mod p^alpha.
    """
    if not 1 <= beta <= alpha:
        raise ValueError("need 1 <= beta <= alpha")
    av = _as_vector(a)
    if all(v % p == 0 for v in av):
        raise BadPrime(f"a = 0 mod {p}")
    if method == "closed":
        from .finite_field import count_mod_prime_power

        count = count_mod_prime_power(f, p, beta, av, budget=budget)
        return (
            Fraction(p) ** (-alpha)
            * Fraction(p) ** ((2 - f.n) * beta)
            * Fraction(p - 1, p)
            * count
        )
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    if p ** (alpha * f.n) > budget:
        raise BudgetExceeded("direct incidence volume over budget")
    counts = _char_profile(f, av, p, alpha)
    cge0 = int(counts[beta:].sum(axis=0)[0])
    return Fraction(cge0, p ** (alpha * f.n))


# --------------------------------------------------------------------------
# local Fourier transforms


@dataclass(frozen=True)
class LocalFourierValue:
    value: object  # Fraction | float | complex
    p: int
    s: tuple
    character: tuple | None = None
    truncation: int | None = None
    error_bound: float = 0.0
    extras: dict = field(default_factory=dict, compare=False)

    def as_complex(self) -> complex:
        return complex(self.value)


def _close(u, v, tol: float) -> bool:
    return abs(complex(u) - complex(v)) <= tol * max(1.0, abs(complex(u)))


def fourier_trivial_closed(
    f: HomogeneousPolynomial,
    p: int,
    s,
    bad=None,
    budget: int = DEFAULT_BUDGET,
) -> LocalFourierValue:
    """H-hat_p(s; psi_0) at a prime of smooth reduction.

    Two algebraically-equal expressions are evaluated and compared:
    the sum of the projective-space transform and the tau_p correction,
    and the rearranged final form.
    """
    _assert_good(f, p, bad)
    n = f.n
    s0, s1 = s
    _check_omega(p, n, s, n, n - 1)
    x0 = _ppow(p, s0 - n)
    x1 = _ppow(p, s1 - n + 1)
    if abs(complex(x0) - 1) < 1e-12 or abs(complex(x1) - 1) < 1e-12:
        raise PoleAt(f"s=({s0},{s1}) hits a pole at p={p}")
    tau = tau_p(f, p, budget=budget)
    hpn = (1 - _ppow(p, -s0)) / (1 - _ppow(p, n - s0))
    value = hpn + tau * (x0 - _ppow(p, s1 - n)) / ((x0 - 1) * (x1 - 1))
    alt = hpn + tau * p ** (n - 1) * (_ppow(p, -s1) - _ppow(p, -s0)) / (
        (1 - _ppow(p, n - s0)) * (1 - _ppow(p, n - 1 - s1))
    )
    if isinstance(value, Fraction) and isinstance(alt, Fraction):
        assert value == alt, "equivalent closed forms disagree"
    else:
        assert _close(value, alt, 1e-10), "equivalent closed forms disagree"
    return LocalFourierValue(
        value=value, p=p, s=(s0, s1), character=None, extras={"equivalent_form": alt}
    )


def _geom_tail(x: float, from_exp: int) -> float:
    """sum_{a > from_exp} x^a for 0 < x < 1."""
    return x ** (from_exp + 1) / (1.0 - x)


def _double_tail(x: float, z: float, A: int, beta_to_alpha: bool) -> float:
    """sum_{a > A} sum_{b=1}^{a-1 or a} x^a z^b, for x < 1, xz < 1."""
    top_shift = 0 if beta_to_alpha else 1
    if abs(z - 1.0) < 1e-12:
        # sum of (a - top_shift) x^a beyond A
        s_a = x ** (A + 1) * ((A + 1) - A * x) / (1 - x) ** 2  # sum a x^a
        if top_shift == 0:
            return s_a
        return s_a - _geom_tail(x, A)
    inner_top = (lambda a: a) if beta_to_alpha else (lambda a: a - 1)
    # sum_b z^b up to inner_top(a): z (1 - z^top)/(1 - z)
    # split into two geometric pieces
    t1 = _geom_tail(x, A)
    xz = x * z
    if beta_to_alpha:
        t2 = _geom_tail(xz, A)
    else:
        t2 = _geom_tail(xz, A) / z
    return abs(z / (1 - z)) * abs(t1 - t2)


def _trivial_tail_bound(f, p, s, A: int, tau: Fraction) -> float:
    n = f.n
    s0, s1 = _re(s[0]), _re(s[1])
    x = p ** (-(s0 - n))
    y = p ** (-(s1 - n + 1))
    z = p ** (-(s1 + 1 - s0))
    c0 = float(1 - Fraction(p) ** (-n) - tau / p)
    tail = c0 * _geom_tail(x, A)
    tail += float(tau) * _geom_tail(y, A)
    tail += (p - 1) / p * float(tau) * _double_tail(x, z, A, beta_to_alpha=False)
    return tail


def fourier_trivial_direct(
    f: HomogeneousPolynomial,
    p: int,
    s,
    truncation: int = 12,
    bad=None,
    budget: int = DEFAULT_BUDGET,
) -> LocalFourierValue:
    """Stratified series for H-hat_p(s; psi_0), truncated at level alpha <= A.

    Per-stratum volumes are exact; the reported error bound is the exact
    sum of the three discarded geometric families at Re(s).
    """
    _assert_good(f, p, bad)
    n = f.n
    s0, s1 = s
    _check_omega(p, n, s, n, n - 1)
    A = truncation
    tau = tau_p(f, p, budget=budget)
    c_u = 1 - Fraction(p) ** (-n) - tau / p
    c_u1 = tau
    c_u1ab = Fraction(p - 1, p) * tau
    value = 1 + 0 * _ppow(p, -s0)  # promotes to the right arithmetic type
    for alpha in range(1, A + 1):
        value += c_u * Fraction(p) ** (n * alpha) * _ppow(p, -alpha * s0)
        value += c_u1 * Fraction(p) ** ((n - 1) * alpha) * _ppow(p, -alpha * s1)
        for beta in range(1, alpha):
            vol = c_u1ab * Fraction(p) ** (n * alpha - beta)
            value += vol * _ppow(p, -((alpha - beta) * s0 + beta * s1))
    tail = _trivial_tail_bound(f, p, s, A, tau)
    return LocalFourierValue(
        value=value, p=p, s=(s0, s1), character=None, truncation=A, error_bound=tail
    )


def _section_tower(
    f: HomogeneousPolynomial,
    a,
    p: int,
    max_alpha: int,
    rep_budget: int = 10**6,
):
    """#Z_{f,a}(Z/p^alpha) for alpha = 1..A by projective Hensel lifting.

    Representatives are normalized so the first unit coordinate is 1 and
    lifted through the pair of linear conditions; the tower is exact.
    Returns (counts, exhausted) where exhausted means the tower died out
    (all deeper counts are zero).
    """
    from .finite_field import _fp_cone_points, _solve_linear_mod_p

    grads = f.gradient()
    reps = {}
    for x in _fp_cone_points(f, p, a):
        i = next(j for j, v in enumerate(x) if v % p)
        inv = pow(x[i], -1, p)
        reps[tuple((v * inv) % p for v in x)] = i
    counts = [len(reps)]
    pj = p
    for _ in range(1, max_alpha):
        if not reps:
            counts.append(0)
            continue
        new_reps = {}
        for x, i in reps.items():
            rows = [[g.evaluate(x, mod=p) for g in grads], [ai % p for ai in a]]
            rhs = [(-(f.evaluate(x) // pj)) % p, (-(sum(ai * xi for ai, xi in zip(a, x)) // pj)) % p]
            # pivot coordinate stays fixed: drop variable i
            rows2 = [r[:i] + r[i + 1 :] for r in rows]
            sol = _solve_linear_mod_p(rows2, rhs, p)
            if sol is None:
                continue
            part, basis = sol
            import itertools

            for combo in itertools.product(range(p), repeat=len(basis)):
                u = list(part)
                for t, vec in zip(combo, basis):
                    if t:
                        u = [(ui + t * vi) % p for ui, vi in zip(u, vec)]
                u.insert(i, 0)
                new_reps[tuple(xi + pj * ui for xi, ui in zip(x, u))] = i
        reps = new_reps
        counts.append(len(reps))
        pj *= p
        if len(reps) > rep_budget:
            return counts, False
    return counts, not reps


def _char_series(
    f: HomogeneousPolynomial,
    p: int,
    a,
    s,
    cutoff: int,
    budget: int,
):
    """(S, tail, terms) with S = sum_{alpha>=1} p^(-alpha(s1-1)) #Z_{f,a}(Z/p^alpha)."""
    n = f.n
    s0, s1 = s
    sec = count_section(f, a, p, budget=budget)
    if sec.nontransverse == 0:
        # smooth section: #Z_{f,a}(Z/p^alpha) = p^((alpha-1)(n-3)) * base
        w = _ppow(p, n - 2 - s1)
        S = sec.total * _ppow(p, 3 - n) * w / (1 - w)
        return S, 0.0, None
    counts, exhausted = _section_tower(f, a, p, cutoff)
    S = 0 * _ppow(p, -s1)
    for alpha, c in enumerate(counts, start=1):
        S += c * _ppow(p, -alpha * (s1 - 1))
    if exhausted:
        return S, 0.0, counts
    C = transversality_constant(f)
    sig1 = _re(s1)
    u = p ** (n - 2 - sig1)
    v = p ** (n - 1 - sig1)
    tail = C * (_geom_tail(u, len(counts)) + p ** (2 - n) * _geom_tail(v, len(counts)))
    return S, tail, counts


def fourier_char_closed(
    f: HomogeneousPolynomial,
    p: int,
    a,
    s,
    series_cutoff: int = 40,
    bad=None,
    budget: int = DEFAULT_BUDGET,
) -> LocalFourierValue:
    """Closed form of H-hat_p(s; psi_a) for a nontrivial primitive character.

    The production expression is the one validated against the
    definitional character-sum series:

        1 - p^(-s0) + (p^(s1-s0) - 1) p^(-s1) #Z_f(F_p)
          - (p^(s1-s0) - 1) (1 - p^(n-s1-2)) S,
        S = sum_{alpha >= 1} p^(-alpha(s1-1)) #Z_{f,a}(Z/p^alpha).

    A variant carrying an extra 1/(p-1) on both #Z_f terms circulates in
    transcriptions; it is evaluated alongside and exposed in
    ``extras["printed_variant"]`` with a mismatch flag, never silently
    merged.
    """
    av = _as_vector(a)
    if all(v % p == 0 for v in av):
        raise BadPrime(f"a = 0 mod {p}; p lies in S(a)")
    _assert_good(f, p, bad)
    n = f.n
    s0, s1 = s
    _check_omega(p, n, s, n, n - 1)
    w = _ppow(p, s1 - s0)
    nf = count_projective_hypersurface(f, p, budget=budget)
    S, tail, tower = _char_series(f, p, av, s, series_cutoff, budget)
    head = 1 - _ppow(p, -s0) + (w - 1) * _ppow(p, -s1) * nf
    corr = (w - 1) * (1 - _ppow(p, n - s1 - 2))
    value = head - corr * S
    printed = 1 - _ppow(p, -s0) + (w - 1) * _ppow(p, -s1) * Fraction(nf, p - 1) - corr * S / (p - 1)
    err = abs(complex(corr)) * tail
    return LocalFourierValue(
        value=value,
        p=p,
        s=(s0, s1),
        character=tuple(av),
        truncation=None if tower is None else len(tower),
        error_bound=err,
        extras={
            "printed_variant": printed,
            "matches_printed_variant": _close(value, printed, 1e-12),
            "section_tower": tower,
        },
    )


def fourier_char_direct(
    f: HomogeneousPolynomial,
    p: int,
    a,
    s,
    truncation: int | None = None,
    bad=None,
    budget: int = DEFAULT_BUDGET,
) -> LocalFourierValue:
    """Definitional stratified character-sum series for H-hat_p(s; psi_a).

        1 + sum_a p^(-a s0) I(a, 0)
          - (p^(s1-s0) - 1) sum_a sum_{b=1}^{a} p^(-a s0) p^(-b(s1-s0)) I(a, b)

    truncated at the largest level the residue budget allows.  Passing
    ``a=None`` runs the same machinery with the trivial character; the
    result then matches ``fourier_trivial_direct`` at equal truncation.
    """
    if a is None:
        av = (0,) * f.n
    else:
        av = _as_vector(a)
        if all(v % p == 0 for v in av):
            raise BadPrime(f"a = 0 mod {p}; p lies in S(a)")
    _assert_good(f, p, bad)
    n = f.n
    s0, s1 = s
    _check_omega(p, n, s, n, n - 1)
    max_affordable = 1
    while p ** ((max_affordable + 1) * n) <= budget:
        max_affordable += 1
    if truncation is None:
        A = min(8, max_affordable)
    elif truncation > max_affordable:
        raise BudgetExceeded(
            f"truncation {truncation} needs p^(n alpha) = {p ** (truncation * n)} "
            f"residues (budget {budget}); affordable: {max_affordable}"
        )
    else:
        A = truncation
    w = _ppow(p, s1 - s0)
    value = 1 + 0 * _ppow(p, -s0)
    for alpha in range(1, A + 1):
        value += _ppow(p, -alpha * s0) * _character_sum_raw(f, p, av, alpha, 0, budget).exact
        for beta in range(1, alpha + 1):
            I = _character_sum_raw(f, p, av, alpha, beta, budget).exact
            if I:
                value -= (w - 1) * _ppow(p, -(alpha * s0)) * _ppow(p, -beta * (s1 - s0)) * I
    tau = tau_p(f, p, budget=budget)
    sig0, sig1 = _re(s0), _re(s1)
    x = p ** (-(sig0 - n))
    z = p ** (-(sig1 + 1 - sig0))
    tail = (1 - p ** (-n)) * _geom_tail(x, A)
    tail += abs(complex(w) - 1) * float(tau) * _double_tail(x, z, A, beta_to_alpha=True)
    return LocalFourierValue(
        value=value,
        p=p,
        s=(s0, s1),
        character=tuple(av),
        truncation=A,
        error_bound=tail,
    )


# --------------------------------------------------------------------------
# direct stratified evaluation at arbitrary primes (used for p in S)


def local_density_via_strata(
    f: HomogeneousPolynomial,
    p: int,
    s,
    valuation_cut: int | None = None,
    budget: int = DEFAULT_BUDGET,
):
    """H-hat_p(s; psi_0) by raw residue counting, no smoothness assumed.

    The f-valuation profile is resolved up to v < k; everything the
    profile determines is summed in closed geometric form over all
    levels.  When the residual mass vol(v >= k) is zero the value is
    exact; otherwise the unresolved part is estimated from the observed
    decay of vol(v >= j) and flagged.

    Returns (value, tail, exact_flag).
    """
    n = f.n
    s0, s1 = s
    _check_omega(p, n, s, n, n - 1)
    if valuation_cut is None:
        k = 1
        while p ** ((k + 1) * n) <= budget:
            k += 1
    else:
        k = valuation_cut
        if p ** (k * n) > budget:
            raise BudgetExceeded(f"profile mod p^{k} over budget")
    prof = _profile_cached(f, p, k)
    total = p ** (k * n)
    x = _ppow(p, n - s0)
    # exact-valuation classes beta < k, summed over all levels alpha > beta
    value = 1 + 0 * x
    for beta in range(k):
        m_beta = Fraction(int(prof[beta]), total)
        if m_beta:
            value += m_beta * _ppow(p, beta * (s0 - s1)) * x ** (beta + 1) / (1 - x)
    # U1(alpha)-type mass, levels alpha <= k, exact
    ge = [Fraction(int(prof[k]), total)]
    for beta in range(k - 1, -1, -1):
        ge.insert(0, ge[0] + Fraction(int(prof[beta]), total))
    for alpha in range(1, k + 1):
        value += ge[alpha] * _ppow(p, alpha * n) * _ppow(p, -alpha * s1)
    residual = ge[k]
    if residual == 0:
        return value, 0.0, True
    # Unresolved deep-valuation mass: model vol(v >= j) = Mk rho^(j-k) by
    # the last observed decay ratio.  The level-alpha contribution is
    #   Mk (1 - rho) G(alpha) + Mk rho^(-k) r2^alpha,
    #   G(alpha) = sum_{j=k}^{alpha-1} rho^(j-k) p^(alpha(n-sig0) + j(sig0-sig1)),
    # and G obeys G(alpha+1) = u G(alpha) + u rho^(-k) r2^alpha with
    # u = p^(n-sig0) < 1, r2 = rho p^(n-sig1); everything stays bounded.
    prev = ge[k - 1] if k >= 1 else Fraction(1)
    rho = float(residual / prev) if prev else 1.0 / p
    rho = min(max(rho, 1.0 / p**n), 0.999)
    sig0, sig1 = _re(s0), _re(s1)
    u = p ** (n - sig0)
    r2 = rho * p ** (n - sig1)
    Mk = float(residual)
    if r2 >= 1.0:
        return float(value), math.inf, False
    rk = rho ** (-k)
    est = 0.0
    G = 0.0
    r2a = r2**k
    for _ in range(k + 1, k + 500):
        r2a *= r2
        G = u * G + u * rk * (r2a / r2)
        term = Mk * (1 - rho) * G + Mk * rk * r2a
        est += term
        if term < 1e-18:
            break
    # the modeled part is added in; its full size is the uncertainty
    return float(value) + est, est, False
