"""Sparse integer homogeneous forms, their gradients, and bad primes."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class PolynomialError(ValueError):
    """Base class for malformed form specifications."""


class NonHomogeneous(PolynomialError):
    pass


class DegreeTooSmall(PolynomialError):
    pass


class TooFewVariables(PolynomialError):
    pass


class ZeroPolynomial(PolynomialError):
    pass


class DimensionMismatch(PolynomialError):
    pass


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration would exceed the configured budget."""


_TERM_RE = re.compile(r"^([+-]?\d*)((?:x\d+(?:\^\d+)?)*)$")
_VAR_RE = re.compile(r"x(\d+)(?:\^(\d+))?")


@dataclass(frozen=True)
class HomogeneousPolynomial:
    """Integer form of degree d in n variables, stored sparsely.

    ``terms`` maps exponent vectors (tuples of length n summing to d) to
    nonzero integer coefficients.  Public constructors normalize the
    content to 1 and make the lexicographically-leading coefficient
    positive; ``_raw=True`` skips validation (used for gradients, whose
    entries may be zero or have content > 1).
    """

    n: int
    d: int
    terms: tuple[tuple[tuple[int, ...], int], ...]

    @staticmethod
    def from_terms(
        terms: Mapping[tuple[int, ...], int] | Iterable[tuple[Sequence[int], int]],
        n: int | None = None,
    ) -> "HomogeneousPolynomial":
        if isinstance(terms, Mapping):
            items = list(terms.items())
        else:
            items = [(tuple(e), c) for e, c in terms]
        merged: dict[tuple[int, ...], int] = {}
        for e, c in items:
            e = tuple(int(v) for v in e)
            merged[e] = merged.get(e, 0) + int(c)
        merged = {e: c for e, c in merged.items() if c != 0}
        if not merged:
            raise ZeroPolynomial("form has no nonzero terms")
        lengths = {len(e) for e in merged}
        if len(lengths) != 1:
            raise DimensionMismatch("exponent vectors have mixed lengths")
        n_seen = lengths.pop()
        if n is None:
            n = n_seen
        elif n < n_seen:
            raise DimensionMismatch(f"n={n} smaller than exponent vectors ({n_seen})")
        else:
            merged = {e + (0,) * (n - n_seen): c for e, c in merged.items()}
        if n < 3:
            raise TooFewVariables(f"need n >= 3 variables, got {n}")
        degrees = {sum(e) for e in merged}
        if len(degrees) != 1:
            raise NonHomogeneous(f"mixed term degrees {sorted(degrees)}")
        d = degrees.pop()
        if d < 2:
            raise DegreeTooSmall(f"need degree >= 2, got {d}")
        if any(v < 0 for e in merged for v in e):
            raise PolynomialError("negative exponent")
        content = math.gcd(*(abs(c) for c in merged.values()))
        lead = max(merged)
        sign = 1 if merged[lead] > 0 else -1
        norm = {e: (sign * c) // content for e, c in merged.items()}
        ordered = tuple(sorted(norm.items(), reverse=True))
        return HomogeneousPolynomial(n=n, d=d, terms=ordered)

    @staticmethod
    def _raw(n: int, d: int, terms: dict[tuple[int, ...], int]) -> "HomogeneousPolynomial":
        ordered = tuple(sorted(((e, c) for e, c in terms.items() if c != 0), reverse=True))
        return HomogeneousPolynomial(n=n, d=d, terms=ordered)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def content(self) -> int:
        if not self.terms:
            return 0
        return math.gcd(*(abs(c) for _, c in self.terms))

    def coefficient_height(self) -> int:
        """Sum of absolute coefficients; bounds |f(x)| <= H * ||x||^d."""
        return sum(abs(c) for _, c in self.terms)

    def evaluate(self, x: Sequence, mod: int | None = None):
        """Exact f(x) over a ring containing the entries of x.

        Works for ints, Fractions and floats; with ``mod`` the entries
        must be integers and the value is reduced mod ``mod``.
        """
        if len(x) != self.n:
            raise DimensionMismatch(f"point has {len(x)} entries, form has n={self.n}")
        if mod is not None:
            total = 0
            for e, c in self.terms:
                t = c % mod
                for xi, ei in zip(x, e):
                    if ei:
                        t = (t * pow(int(xi), ei, mod)) % mod
                total = (total + t) % mod
            return total
        total = 0
        for e, c in self.terms:
            t = c
            for xi, ei in zip(x, e):
                if ei:
                    t = t * xi**ei
            total = total + t
        return total

    def gradient(self) -> tuple["HomogeneousPolynomial", ...]:
        """Partial derivatives; entries may be the zero form."""
        parts = []
        for i in range(self.n):
            terms: dict[tuple[int, ...], int] = {}
            for e, c in self.terms:
                if e[i] == 0:
                    continue
                e2 = list(e)
                e2[i] -= 1
                terms[tuple(e2)] = terms.get(tuple(e2), 0) + c * e[i]
            parts.append(HomogeneousPolynomial._raw(self.n, self.d - 1, terms))
        return tuple(parts)

    def exponent_matrix(self):
        """(coeffs, exps) as numpy arrays for the counting kernels."""
        import numpy as np

        if not self.terms:
            return np.zeros(0, dtype=np.int64), np.zeros((0, self.n), dtype=np.int64)
        coeffs = np.array([c for _, c in self.terms], dtype=np.int64)
        exps = np.array([list(e) for e, _ in self.terms], dtype=np.int64)
        return coeffs, exps

    def is_diagonal(self) -> bool:
        """True when every term involves a single variable (Fermat-type)."""
        return all(sum(1 for v in e if v) == 1 for e, _ in self.terms)

    def __str__(self) -> str:
        parts = []
        for e, c in self.terms:
            mono = "".join(
                f"x{i + 1}" + (f"^{ei}" if ei > 1 else "")
                for i, ei in enumerate(e)
                if ei
            )
            if not mono:
                mono = "1"
            if c == 1:
                parts.append(f"+{mono}")
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c:+d}{mono}")
        s = "".join(parts)
        return s.lstrip("+") if s else "0"


def parse_polynomial(spec, n: int | None = None) -> HomogeneousPolynomial:
    """Parse a form from text like ``x1^2+x2^2+x3^2`` or ``2x1x2^3-x3^4``.

    Also accepts the structured list form used in config files:
    a list of ``[coefficient, [e1, .., en]]`` pairs.
    """
    if not isinstance(spec, str):
        return HomogeneousPolynomial.from_terms([(tuple(e), c) for c, e in spec], n=n)
    text = re.sub(r"\s+", "", spec)
    if not text:
        raise ZeroPolynomial("empty polynomial text")
    text = text.replace("-", "+-")
    if text.startswith("+"):
        text = text[1:]
    chunks = [t for t in text.split("+") if t]
    raw_terms: list[tuple[dict[int, int], int]] = []
    max_var = 0
    for chunk in chunks:
        m = _TERM_RE.match(chunk)
        if not m or (not m.group(1) and not m.group(2)):
            raise PolynomialError(f"cannot parse term {chunk!r}")
        coeff_s, mono = m.group(1), m.group(2)
        if coeff_s in ("", "+"):
            coeff = 1
        elif coeff_s == "-":
            coeff = -1
        else:
            coeff = int(coeff_s)
        exps: dict[int, int] = {}
        for vm in _VAR_RE.finditer(mono):
            i = int(vm.group(1))
            if i < 1:
                raise PolynomialError(f"variable index must be >= 1 in {chunk!r}")
            e = int(vm.group(2)) if vm.group(2) else 1
            exps[i] = exps.get(i, 0) + e
            max_var = max(max_var, i)
        if not exps:
            raise NonHomogeneous(f"constant term {chunk!r} in a form of degree >= 2")
        raw_terms.append((exps, coeff))
    n_eff = n if n is not None else max_var
    if max_var > n_eff:
        raise DimensionMismatch(f"variable x{max_var} exceeds n={n_eff}")
    items = []
    for exps, coeff in raw_terms:
        e = tuple(exps.get(i + 1, 0) for i in range(n_eff))
        items.append((e, coeff))
    return HomogeneousPolynomial.from_terms(items, n=n_eff)


@dataclass(frozen=True)
class BadPrimeSet:
    """Primes where the reduction of Z_f is (or may be) singular."""

    primes: frozenset[int]
    provenance: dict = field(compare=False, default_factory=dict)

    def __contains__(self, p: int) -> bool:
        return p in self.primes

    def sorted(self) -> list[int]:
        return sorted(self.primes)


def primes_up_to(n: int) -> list[int]:
    """Simple sieve, inclusive."""
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            start = p * p
            sieve[start :: p] = b"\x00" * ((n - start) // p + 1)
    return [i for i, v in enumerate(sieve) if v]


def bad_primes(
    f: HomogeneousPolynomial,
    search_bound: int = 100,
    extra: Iterable[int] = (),
    budget: int = 10**8,
) -> BadPrimeSet:
    """Detect primes p <= search_bound where Z_f mod p has a singular point.

    The check looks for a nonzero common zero of f and grad(f) over F_p
    and over F_{p^2}.  That catches every singular locus witnessed at
    degree <= 2 over the prime field; exotic cases can be declared via
    ``extra``.
    """
    from .kernels import singular_point_exists

    if search_bound < 2:
        raise ValueError("search_bound must be >= 2")
    prov: dict[int, str] = {}
    found: set[int] = set()
    for p in sorted(set(int(q) for q in extra)):
        found.add(p)
        prov[p] = "user-declared"
    for p in primes_up_to(search_bound):
        if p in found:
            continue
        if p ** (2 * f.n) <= budget:
            deg = 2
        elif p**f.n <= budget:
            deg = 1
        else:
            raise BudgetExceeded(
                f"smoothness scan at p={p} needs {p**f.n} evaluations; raise budget "
                f"or declare the prime via extra="
            )
        if singular_point_exists(f, p, field_degree=deg):
            found.add(p)
            prov[p] = "detected"
    return BadPrimeSet(primes=frozenset(found), provenance=prov)
