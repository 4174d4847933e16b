"""Named verification checks with JSON-ready reports.

Each check records its inputs, the expected and actual values, the
tolerance used, and a pass flag; a report passes when every check does.
The same functions back the ``verify`` CLI subcommands and the
acceptance test suite.
"""

from __future__ import annotations

import cmath
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import padic
from .finite_field import (
    count_mod_prime_power,
    count_projective_hypersurface,
    count_section,
    projective_space_count,
    transversality_constant,
    weil_bound_check,
)
from .polynomial import HomogeneousPolynomial, primes_up_to


@dataclass
class CheckResult:
    name: str
    inputs: dict
    expected: object
    actual: object
    tolerance: object
    passed: bool

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "expected": self.expected,
            "actual": self.actual,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class VerificationReport:
    title: str
    checks: list = field(default_factory=list)

    def add(self, name, inputs, expected, actual, tolerance, passed) -> None:
        self.checks.append(
            CheckResult(
                name=name,
                inputs=inputs,
                expected=expected,
                actual=actual,
                tolerance=tolerance,
                passed=bool(passed),
            )
        )

    def add_exact(self, name, inputs, expected, actual) -> None:
        self.add(name, inputs, expected, actual, "exact", expected == actual)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def merged(self, other: "VerificationReport") -> "VerificationReport":
        rep = VerificationReport(title=self.title)
        rep.checks = self.checks + other.checks
        return rep

    def as_dict(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "n_pass": sum(c.passed for c in self.checks),
            "n_fail": sum(not c.passed for c in self.checks),
            "checks": [c.as_dict() for c in self.checks],
        }

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}")
        lines.append(
            f"{self.title}: {sum(c.passed for c in self.checks)}/{len(self.checks)} passed"
        )
        return lines


def verify_volumes(
    f: HomogeneousPolynomial,
    ps=(3, 5, 7),
    bad=None,
    strata=None,
    budget: int = 10**8,
) -> VerificationReport:
    """Closed-form stratum volumes against direct residue counts, exactly."""
    rep = VerificationReport("volume identities")
    if strata is None:
        strata = [padic.U0(), padic.U1_a(1), padic.U1_ab(2, 1), padic.U_a(1), padic.U_a(2)]
    for p in ps:
        for st in strata:
            direct = padic.stratum_volume_direct(f, p, st, budget=budget)
            closed = padic.stratum_volume_closed(f, p, st, bad=bad, budget=budget)
            rep.add_exact(
                f"vol {st.kind}(alpha={st.alpha},beta={st.beta}) p={p}",
                {"p": p, "stratum": st.kind, "alpha": st.alpha, "beta": st.beta},
                str(closed),
                str(direct),
            )
    return rep


def verify_hensel(f: HomogeneousPolynomial, ps=(3, 5, 7), budget: int = 10**8) -> VerificationReport:
    """#Z_f(Z/p^2) = p^(n-2) #Z_f(F_p) for primes of smooth reduction."""
    rep = VerificationReport("prime-power lifting counts")
    for p in ps:
        base = count_projective_hypersurface(f, p, budget=budget)
        expected = p ** (f.n - 2) * base
        actual = count_mod_prime_power(f, p, 2, method="exhaustive", budget=budget)
        rep.add_exact(
            f"#Z(Z/{p}^2) = {p}^(n-2) #Z(F_{p}), n={f.n}",
            {"p": p, "n": f.n, "base_count": base},
            expected,
            actual,
        )
    return rep


def _mean_value_direct(t: Fraction, p: int) -> complex:
    """Unit-average of psi(t u) by explicit summation."""
    v = 0
    num, den = t.numerator, t.denominator
    while num and num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    m = p ** max(1, -v)
    total = 0j
    count = 0
    for u in range(m):
        if u % p == 0:
            continue
        frac = (t * u) % 1
        total += cmath.exp(2j * cmath.pi * float(frac))
        count += 1
    return total / count


def verify_mean_value(ps=(2, 3, 5, 7, 11)) -> VerificationReport:
    """The three-case unit average against explicit character sums."""
    rep = VerificationReport("unit mean value of psi")
    for p in ps:
        cases = [
            (Fraction(2), Fraction(1)),
            (Fraction(p), Fraction(1)),
            (Fraction(1, p), Fraction(-1, p - 1)),
            (Fraction(3, p), Fraction(-1, p - 1) if p != 3 else Fraction(1)),
            (Fraction(1, p * p), Fraction(0)),
        ]
        for t, expected in cases:
            closed = padic.mean_value_psi(t, p)
            direct = _mean_value_direct(t, p)
            ok = closed == expected and abs(direct - complex(closed)) < 1e-12
            rep.add(
                f"mean psi(t u), t={t}, p={p}",
                {"t": str(t), "p": p},
                str(expected),
                str(closed),
                "exact + 1e-12 vs direct sum",
                ok,
            )
    return rep


def verify_character_sums(
    f: HomogeneousPolynomial,
    ps=(3, 5),
    vectors=((1, 0, 0), (1, 1, 0), (1, 2, 3)),
    max_alpha: int = 3,
    tol: float = 1e-9,
    budget: int = 10**8,
) -> VerificationReport:
    """Sphere integrals and the vanishing range of I(alpha, beta)."""
    rep = VerificationReport("character sum structure")
    for p, a in itertools.product(ps, vectors):
        a = a[: f.n] if len(a) >= f.n else tuple(a) + (0,) * (f.n - len(a))
        cs = padic.character_sum_I(f, p, a, 1, 0, budget=budget)
        rep.add(
            f"I(1,0) = -1 at p={p}, a={a}",
            {"p": p, "a": list(a)},
            -1.0,
            str(cs.exact),
            tol,
            abs(cs.value - (-1)) <= tol,
        )
        for alpha in range(2, max_alpha + 1):
            cs = padic.character_sum_I(f, p, a, alpha, 0, budget=budget)
            rep.add(
                f"I({alpha},0) = 0 at p={p}, a={a}",
                {"p": p, "a": list(a), "alpha": alpha},
                0.0,
                str(cs.exact),
                tol,
                abs(cs.value) <= tol,
            )
        for alpha in range(2, max_alpha + 1):
            for beta in range(1, alpha):
                cs = padic.character_sum_I(f, p, a, alpha, beta, budget=budget)
                rep.add(
                    f"I({alpha},{beta}) = 0 at p={p}, a={a}",
                    {"p": p, "a": list(a), "alpha": alpha, "beta": beta},
                    0.0,
                    str(cs.exact),
                    tol,
                    abs(cs.value) <= tol,
                )
    return rep


def _omega_sample(n: int, count: int, seed: int, eps: float = 0.1, with_complex: bool = True):
    rng = random.Random(seed)
    out = []
    for i in range(count):
        s0 = n + eps + 2.0 * rng.random()
        s1 = n - 1 + eps + 2.0 * rng.random()
        if with_complex and i % 2 == 1:
            out.append((complex(s0, rng.uniform(-2, 2)), complex(s1, rng.uniform(-2, 2))))
        else:
            out.append((round(s0, 3), round(s1, 3)))
    return out


def verify_fourier_trivial(
    f: HomogeneousPolynomial,
    ps=(3, 5, 7),
    ss=None,
    truncation: int = 12,
    bad=None,
    random_s: int = 0,
    seed: int = 0,
    budget: int = 10**8,
) -> VerificationReport:
    """Closed trivial-character transform against the truncated series."""
    rep = VerificationReport("trivial-character Fourier identity")
    n = f.n
    if ss is None:
        ss = ((n + 1, n), (n + 2, n + 1), (n + 1.5, n + 0.5))
    ss = list(ss) + _omega_sample(f.n, random_s, seed)
    for p in ps:
        for s in ss:
            closed = padic.fourier_trivial_closed(f, p, s, bad=bad, budget=budget)
            direct = padic.fourier_trivial_direct(
                f, p, s, truncation=truncation, bad=bad, budget=budget
            )
            diff = abs(closed.as_complex() - direct.as_complex())
            rep.add(
                f"trivial closed vs direct(A={truncation}) p={p}, s={s}",
                {"p": p, "s": [str(s[0]), str(s[1])], "truncation": truncation},
                f"|diff| <= {direct.error_bound:.3e}",
                f"|diff| = {diff:.3e}",
                direct.error_bound,
                diff <= direct.error_bound + 1e-15,
            )
    return rep


def verify_fourier_char(
    f: HomogeneousPolynomial,
    ps=(3, 5, 7),
    vectors=None,
    ss=None,
    random_s: int = 0,
    seed: int = 0,
    bad=None,
    truncation: int | None = None,
    budget: int = 10**8,
) -> VerificationReport:
    """Closed nontrivial-character transform against the definitional series.

    A constant-level discrepancy here is a failure; the as-printed
    variant with extra 1/(p-1) factors is reported for comparison.
    """
    rep = VerificationReport("nontrivial-character Fourier identity")
    if ss is None:
        ss = ((f.n + 1, f.n),)
    if vectors is None:
        e = [tuple(1 if j == i else 0 for j in range(f.n)) for i in range(f.n)]
        vectors = e + [tuple(-v for v in ei) for ei in e]
        vectors += [(1, 1) + (0,) * (f.n - 2), tuple(range(1, f.n + 1))]
    ss = list(ss) + _omega_sample(f.n, random_s, seed)
    for p in ps:
        for a in vectors:
            for s in ss:
                closed = padic.fourier_char_closed(f, p, a, s, bad=bad, budget=budget)
                direct = padic.fourier_char_direct(
                    f, p, a, s, truncation=truncation, bad=bad, budget=budget
                )
                diff = abs(closed.as_complex() - direct.as_complex())
                bound = closed.error_bound + direct.error_bound + 1e-15
                rep.add(
                    f"char closed vs direct(A={direct.truncation}) p={p}, a={a}, s={s}",
                    {
                        "p": p,
                        "a": list(a),
                        "s": [str(s[0]), str(s[1])],
                        "printed_variant_matches": closed.extras["matches_printed_variant"],
                    },
                    f"|diff| <= {bound:.3e}",
                    f"|diff| = {diff:.3e}",
                    bound,
                    diff <= bound,
                )
    return rep


def _primitive_vectors(n: int, norm_max: int) -> list[tuple[int, ...]]:
    """Primitive a with |a| <= norm_max, one per +-pair (first nonzero > 0)."""
    out = []
    rng = range(-norm_max, norm_max + 1)
    for a in itertools.product(rng, repeat=n):
        if all(v == 0 for v in a):
            continue
        if sum(v * v for v in a) > norm_max * norm_max:
            continue
        first = next(v for v in a if v != 0)
        if first < 0:
            continue
        if math.gcd(*(abs(v) for v in a)) != 1:
            continue
        out.append(a)
    return out


def verify_bounds(
    f: HomogeneousPolynomial,
    p_max: int | None = None,
    norm_max: int | None = None,
    bad=(),
    budget: int = 10**8,
) -> VerificationReport:
    """Lifting, degree and point-count bounds on exhaustive section counts.

    For every good prime p <= p_max and primitive |a| <= norm_max:
    the alpha = 2 count is bounded by transverse/nontransverse lifting
    multiplicities, the split obeys a single constant C = d(d-1)^(n-1),
    and every count obeys the projective-space degree bound.  Defaults
    shrink with n so the exhaustive mod-p^2 scans stay within budget.
    """
    rep = VerificationReport("lifting and degree bounds")
    C = transversality_constant(f)
    n, d = f.n, f.d
    if p_max is None:
        p_max = 13 if n <= 3 else 7
    while p_max > 3 and p_max ** (2 * n) > budget:
        p_max -= 1
    if norm_max is None:
        norm_max = 5 if n <= 3 else 2
    vectors = _primitive_vectors(n, norm_max)
    bad = set(bad)
    worst = {"lift": None, "tconst": None, "ntconst": None, "cor": None, "weil": None}
    fails = {k: 0 for k in worst}
    checked = 0
    for p in (q for q in primes_up_to(p_max) if q not in bad):
        nf = count_projective_hypersurface(f, p, budget=budget)
        ok_weil_f = weil_bound_check(nf, n - 2, d, p)
        rep.add(
            f"#Z_f(F_{p}) within degree bound",
            {"p": p, "count": nf},
            f"<= {projective_space_count(n - 2, p) * d}",
            nf,
            "exact",
            ok_weil_f,
        )
        for a in vectors:
            if all(v % p == 0 for v in a):
                continue
            checked += 1
            sec = count_section(f, a, p, budget=budget)
            n2 = count_mod_prime_power(f, p, 2, a, method="exhaustive", budget=budget)
            lift_bound = p ** (n - 3) * sec.transverse + p ** (n - 2) * sec.nontransverse
            if not n2 <= lift_bound:
                fails["lift"] += 1
                worst["lift"] = {"p": p, "a": list(a), "count": n2, "bound": lift_bound}
            if not sec.transverse <= C * p ** (n - 3):
                fails["tconst"] += 1
                worst["tconst"] = {"p": p, "a": list(a), "t": sec.transverse}
            if not sec.nontransverse <= C:
                fails["ntconst"] += 1
                worst["ntconst"] = {"p": p, "a": list(a), "nt": sec.nontransverse}
            for alpha, cnt in ((1, sec.total), (2, n2)):
                if not cnt <= C * p ** ((n - 3) * alpha) + C * p ** ((n - 2) * (alpha - 1)):
                    fails["cor"] += 1
                    worst["cor"] = {"p": p, "a": list(a), "alpha": alpha, "count": cnt}
            if not weil_bound_check(sec.total, n - 3, d, p):
                fails["weil"] += 1
                worst["weil"] = {"p": p, "a": list(a), "count": sec.total}
    names = {
        "lift": "alpha=2 counts within transverse/nontransverse lifting bound",
        "tconst": f"transverse counts <= C p^(n-3), C = {C}",
        "ntconst": f"nontransverse counts <= C = {C}",
        "cor": "prime-power counts within C p^((n-3)a) + C p^((n-2)(a-1))",
        "weil": "section counts within degree bound",
    }
    for k, label in names.items():
        rep.add(
            label,
            {"p_max": p_max, "norm_max": norm_max, "pairs_checked": checked},
            "0 violations",
            f"{fails[k]} violations" + (f", worst {worst[k]}" if worst[k] else ""),
            "exact",
            fails[k] == 0,
        )
    return rep


def verify_uniform_bound(
    f: HomogeneousPolynomial,
    p_max: int = 50,
    eps: float = 0.5,
    vectors=((1, 0, 0), (1, 2, 3)),
    s_grid=None,
    bad=(),
    budget: int = 10**8,
) -> VerificationReport:
    """|H-hat_p(s; psi_a) - 1| <= C p^(-1-eps) with one fitted constant.

    The fitted C is max over the grid of p^(1+eps) |H-hat_p - 1|; the
    decay is genuine when the maximum is attained at a small prime.
    """
    rep = VerificationReport("uniform nontrivial-character bound")
    n = f.n
    if s_grid is None:
        s_grid = [
            (n + eps + ds0, n - 1 + eps + ds1)
            for ds0 in (0.01, 0.5, 1.5)
            for ds1 in (0.01, 0.5, 1.5)
        ]
    bad = set(bad)
    fitted = 0.0
    argmax_p = None
    per_prime_max = {}
    for p in (q for q in primes_up_to(p_max) if q not in bad):
        m = 0.0
        for a in vectors:
            a = a[: f.n] if len(a) >= f.n else tuple(a) + (0,) * (f.n - len(a))
            if all(v % p == 0 for v in a):
                continue
            for s in s_grid:
                val = padic.fourier_char_closed(f, p, a, s, bad=bad, budget=budget)
                m = max(m, abs(val.as_complex() - 1.0) * p ** (1 + eps))
        per_prime_max[p] = m
        if m > fitted:
            fitted, argmax_p = m, p
    small = max(v for p, v in per_prime_max.items() if p <= 13)
    large = max((v for p, v in per_prime_max.items() if p > 13), default=0.0)
    rep.add(
        f"fitted C = max p^(1+eps) |H-hat_p - 1| is finite (eps={eps})",
        {"p_max": p_max, "eps": eps, "argmax_p": argmax_p},
        "finite",
        f"C = {fitted:.6g}",
        "existence",
        math.isfinite(fitted) and fitted > 0,
    )
    rep.add(
        "normalized deviations decay: max over p > 13 below max over p <= 13",
        {"small_max": f"{small:.6g}", "large_max": f"{large:.6g}"},
        "large <= small",
        f"{large:.6g} vs {small:.6g}",
        "ordering",
        large <= small,
    )
    return rep
