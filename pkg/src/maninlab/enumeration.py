"""Enumeration of rational points of bounded height and the B log B fit.

The anticanonical height of a primitive point a/b satisfies

    H((n+1, n); a/b)^2 = Q^(n+1) (b^2 Q^(d-1) + F^2) / (g^2 Q^d),

with Q = b^2 + |a|^2, F = f(a), g = gcd(b, F): an exact rational.  Since
H >= M^n with M = sqrt(Q), every point of height <= B lies in the ball
Q <= B^(2/n), which shrinks the search radius to B^(1/n).  Comparisons
against B are float-prefiltered with a guard band and resolved exactly
on the boundary, so counts are deterministic.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels
from .heights import PicardParameter, RationalPoint, global_height
from .polynomial import HomogeneousPolynomial


class BoundTooLarge(RuntimeError):
    """The candidate ball exceeds the configured budget."""


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class CountRecord:
    B: float
    N: int
    s: tuple
    wall_time: float = 0.0


@dataclass(frozen=True)
class FitResult:
    theta_hat: float
    c_hat: float
    residual: float
    grid: tuple


GUARD = 1e-9


def _as_s(f: HomogeneousPolynomial, s) -> tuple:
    if s is None:
        return (f.n + 1, f.n)
    if isinstance(s, PicardParameter):
        return (s.s0, s.s1)
    return (s[0], s[1])


def _is_anticanonical(f: HomogeneousPolynomial, s: tuple) -> bool:
    return float(s[0]) == f.n + 1 and float(s[1]) == f.n


def candidate_radius_sq(f: HomogeneousPolynomial, B: float, s=None) -> int:
    """Largest Q = b^2 + |a|^2 a point of height <= B can have.

    H(s; x) >= M^min(s0,s1) / kappa with kappa = (1 + C_f^2)^(max(0, s1-s0)/2)
    and C_f the coefficient height; anticanonically kappa = 1 and the
    exponent is n.
    """
    s = _as_s(f, s)
    if B < 1:
        return 0
    if _is_anticanonical(f, s):
        e, kappa = float(f.n), 1.0
    else:
        e = min(float(s[0]), float(s[1]))
        if e <= f.n:
            raise ValueError(
                f"s={s} outside the convergence region (need min(s) > n for the "
                "candidate bound; anticanonical (n+1, n) is handled exactly)"
            )
        cf = f.coefficient_height()
        kappa = (1.0 + cf * cf) ** (max(0.0, float(s[1]) - float(s[0])) / 2.0)
    return int(math.floor((B * kappa) ** (2.0 / e) * (1 + 1e-9) + 1e-9))


def estimated_candidates(f: HomogeneousPolynomial, rad2: int) -> float:
    """Volume heuristic for the number of (a, b) candidates, b >= 1."""
    n = f.n
    r = math.sqrt(max(rad2, 0))
    dim = n + 1
    vball = math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * r**dim
    return vball / 2.0


def _shard_counts(
    f: HomogeneousPolynomial,
    b: int,
    rad2: int,
    thresholds: Sequence[Fraction],
    s: tuple,
) -> np.ndarray:
    """Counts of points with denominator b and H <= sqrt(T) per threshold."""
    n, d = f.n, f.d
    A, Q, F = kernels.ball_candidates(f, b, rad2)
    out = np.zeros(len(thresholds), dtype=np.int64)
    if len(Q) == 0:
        return out
    g = np.gcd(np.abs(F), b)  # gcd(0, b) = b covers f(a) = 0
    if _is_anticanonical(f, s):
        cf = f.coefficient_height()
        n1d = n + 1 - d
        worst = rad2 ** max(n1d, 0) * (b * b * rad2 ** (d - 1) + cf * cf * rad2**d)
        if n1d >= 0 and worst < 2**62:
            lhs = Q**n1d * (b * b * Q ** (d - 1) + F * F)
            h_sq = lhs.astype(np.float64) / g.astype(np.float64) ** 2
        else:
            Qf = Q.astype(np.float64)
            Ff = F.astype(np.float64)
            h_sq = Qf ** (n + 1) * (b * b * Qf ** (d - 1) + Ff * Ff) / (
                g.astype(np.float64) ** 2 * Qf**d
            )
        for k, T in enumerate(thresholds):
            tf = float(T)
            sure = h_sq <= tf * (1 - GUARD)
            c = int(np.count_nonzero(sure))
            maybe = np.nonzero(~sure & (h_sq <= tf * (1 + GUARD)))[0]
            for idx in maybe:
                qq, ff, gg = int(Q[idx]), int(F[idx]), int(g[idx])
                lhs_x = Fraction(qq ** (n + 1) * (b * b * qq ** (d - 1) + ff * ff), qq**d)
                if lhs_x <= T * gg * gg:
                    c += 1
            out[k] = c
        return out
    # general parameter: log-height comparison (float, inclusive ties)
    s0, s1 = float(s[0]), float(s[1])
    Qf = Q.astype(np.float64)
    Ff = F.astype(np.float64)
    denom = b * b * Qf ** (d - 1) + Ff * Ff
    log_h = s0 * 0.5 * np.log(Qf) + (s1 - s0) * (
        np.log(g.astype(np.float64)) + 0.5 * (d * np.log(Qf) - np.log(denom))
    )
    for k, T in enumerate(thresholds):
        out[k] = int(np.count_nonzero(log_h <= 0.5 * math.log(float(T)) * (1 + GUARD)))
    return out


def _shard_worker(args):
    f, b, rad2, thresholds, s = args
    return b, _shard_counts(f, b, rad2, thresholds, s)


def _count_grid(
    f: HomogeneousPolynomial,
    bounds: Sequence[float],
    s=None,
    threads: int = 1,
    max_candidates: float = 5e7,
    force: bool = False,
) -> list[int]:
    """N(B) for each bound in one shared pass, sharded by denominator."""
    s = _as_s(f, s)
    bmax = max(bounds)
    rad2 = candidate_radius_sq(f, bmax, s)
    est = estimated_candidates(f, rad2)
    if est > max_candidates and not force:
        raise BoundTooLarge(
            f"~{est:.2e} candidates at B={bmax} exceeds max_candidates={max_candidates:.2e}; "
            "raise max_candidates (or force=True) to proceed"
        )
    thresholds = [Fraction(B) * Fraction(B) for B in bounds]
    bs = list(range(1, int(math.isqrt(rad2)) + 1)) if rad2 >= 1 else []
    totals = np.zeros(len(bounds), dtype=np.int64)
    if threads and threads > 1 and len(bs) > 1:
        jobs = [(f, b, rad2, thresholds, s) for b in bs]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = dict(pool.map(_shard_worker, jobs, chunksize=4))
        for b in bs:  # reduce in fixed order
            totals += results[b]
    else:
        for b in bs:
            totals += _shard_counts(f, b, rad2, thresholds, s)
    return [int(v) for v in totals]


def count_bounded(
    f: HomogeneousPolynomial,
    B: float,
    s=None,
    threads: int = 1,
    max_candidates: float = 5e7,
    record_time: bool = True,
) -> CountRecord:
    """N(B) = #{x in Q^n : H(s; x) <= B}, ties at B included."""
    s = _as_s(f, s)
    t0 = time.perf_counter()
    (n_points,) = _count_grid(f, [B], s, threads=threads, max_candidates=max_candidates)
    dt = time.perf_counter() - t0 if record_time else 0.0
    return CountRecord(B=float(B), N=n_points, s=s, wall_time=dt)


def scan(
    f: HomogeneousPolynomial,
    grid: Sequence[float],
    s=None,
    threads: int = 1,
    max_candidates: float = 5e7,
    record_time: bool = True,
) -> list[CountRecord]:
    """One CountRecord per grid point, from a single shared candidate pass."""
    grid = list(grid)
    if any(b2 <= b1 for b1, b2 in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    s = _as_s(f, s)
    t0 = time.perf_counter()
    ns = _count_grid(f, grid, s, threads=threads, max_candidates=max_candidates)
    dt = time.perf_counter() - t0 if record_time else 0.0
    return [CountRecord(B=float(b), N=n, s=s, wall_time=dt) for b, n in zip(grid, ns)]


def geometric_grid(start: float, stop: float, steps: int) -> list[float]:
    if steps < 1 or stop < start or start <= 0:
        raise ValueError("need 0 < start <= stop and steps >= 1")
    if steps == 1:
        return [float(stop)]
    ratio = (stop / start) ** (1.0 / (steps - 1))
    return [float(start * ratio**k) for k in range(steps)]


def enumerate_candidates(
    f: HomogeneousPolynomial,
    B: float,
    s=None,
    max_candidates: float = 5e7,
    force: bool = False,
) -> Iterator[RationalPoint]:
    """All primitive (a, b) inside the candidate ball, lexicographic in (b, a)."""
    s = _as_s(f, s)
    rad2 = candidate_radius_sq(f, B, s)
    est = estimated_candidates(f, rad2)
    if est > max_candidates and not force:
        raise BoundTooLarge(
            f"~{est:.2e} candidates exceeds max_candidates={max_candidates:.2e}"
        )
    for b in range(1, int(math.isqrt(rad2)) + 1 if rad2 >= 1 else 1):
        A, Q, F = kernels.ball_candidates(f, b, rad2)
        for row in A:
            yield RationalPoint(a=tuple(int(v) for v in row), b=b)


def points_with_heights(
    f: HomogeneousPolynomial,
    B: float,
    s=None,
    max_candidates: float = 5e7,
) -> list[tuple[RationalPoint, float]]:
    """Points of height <= B with their heights, lexicographic in (b, a)."""
    s = _as_s(f, s)
    sp = PicardParameter(float(s[0]), float(s[1]))
    out = []
    anti = _is_anticanonical(f, s)
    b_sq = Fraction(B) * Fraction(B)
    for x in enumerate_candidates(f, B, s, max_candidates=max_candidates):
        if anti:
            from .heights import anticanonical_height_sq

            h_sq = anticanonical_height_sq(f, x)
            if h_sq <= b_sq:
                out.append((x, math.sqrt(h_sq)))
        else:
            h = global_height(f, sp, x)
            if h <= B * (1 + GUARD):
                out.append((x, h))
    return out


def naive_count_bounded(f: HomogeneousPolynomial, B: float, s=None) -> int:
    """Independent oracle: cube enumeration filtered by the per-place height.

    The cube |a_i| <= B^(1/e), 1 <= b <= B^(1/e) (e the candidate-bound
    exponent) strictly contains the candidate ball; the height is taken
    from the place-by-place product, not the fast integer path.
    """
    import itertools

    s = _as_s(f, s)
    sp = PicardParameter(float(s[0]), float(s[1]))
    rad2 = candidate_radius_sq(f, B, s)
    r = int(math.isqrt(rad2)) + 1
    b_sq = Fraction(B) * Fraction(B)
    n_points = 0
    for b in range(1, r + 1):
        for a in itertools.product(range(-r, r + 1), repeat=f.n):
            if math.gcd(b, *(abs(v) for v in a)) != 1:
                continue
            x = RationalPoint(a=a, b=b)
            h = global_height(f, sp, x)
            if h <= B * (1 - GUARD):
                n_points += 1
            elif h <= B * (1 + GUARD):
                from .heights import anticanonical_height_sq

                if _is_anticanonical(f, s):
                    if anticanonical_height_sq(f, x) <= b_sq:
                        n_points += 1
                else:
                    n_points += 1
    return n_points


def fit_manin(records: Iterable[CountRecord]) -> FitResult:
    """Least squares of N(B)/B against theta log B + c."""
    recs = sorted({r.B: r for r in records}.values(), key=lambda r: r.B)
    if len(recs) < 4:
        raise InsufficientData("need at least 4 records with distinct B")
    if max(r.B for r in recs) < 10**3:
        raise InsufficientData("largest B must be at least 10^3")
    logb = np.array([math.log(r.B) for r in recs])
    y = np.array([r.N / r.B for r in recs])
    design = np.column_stack([logb, np.ones_like(logb)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.sqrt(np.mean((design @ coef - y) ** 2)))
    return FitResult(
        theta_hat=float(coef[0]),
        c_hat=float(coef[1]),
        residual=resid,
        grid=tuple(r.B for r in recs),
    )
