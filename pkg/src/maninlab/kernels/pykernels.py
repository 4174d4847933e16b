"""Pure numpy implementations of the counting kernels.

Every function here has a compiled twin in ``_ckernels``; the two must
return identical values (integers throughout, so equality is exact).
The grids are vectorized over the last two coordinates, with a Python
loop over the remaining ones; budget checks live in the callers.
"""

from __future__ import annotations

import itertools

import numpy as np

BACKEND_NAME = "python"


def _pow_table(m: int, mod: int, dmax: int) -> np.ndarray:
    """P[e, x] = x**e % mod for x in range(m)."""
    xs = np.arange(m, dtype=np.int64) % mod
    table = np.ones((dmax + 1, m), dtype=np.int64)
    for e in range(1, dmax + 1):
        table[e] = (table[e - 1] * xs) % mod
    return table


def _eval_grid(coeffs, exps, prefix, ptab, mod: int) -> np.ndarray:
    """f mod ``mod`` on the (x, y) grid for fixed leading coordinates, flat.

    ``exps`` has n columns; the last two index the grid axes.
    """
    m = ptab.shape[1]
    out = np.zeros((m, m), dtype=np.int64)
    for t in range(len(coeffs)):
        c = int(coeffs[t]) % mod
        for j, xi in enumerate(prefix):
            e = int(exps[t, j])
            if e:
                c = (c * int(ptab[e, xi])) % mod
        if c == 0:
            continue
        ex, ey = int(exps[t, -2]), int(exps[t, -1])
        out += np.outer(c * ptab[ex] % mod, ptab[ey]) % mod
    return (out % mod).ravel()


def _prim_mask(prefix, p: int, m: int) -> np.ndarray | None:
    """Grid mask making (prefix, x, y) primitive mod p; None = all primitive."""
    if any(v % p for v in prefix):
        return None
    xs = np.arange(m, dtype=np.int64)
    unit = (xs % p) != 0
    return np.logical_or.outer(unit, unit).ravel()


def cone_count_fp(coeffs, exps, n: int, p: int) -> int:
    """# nonzero x in F_p^n with f(x) = 0."""
    ptab = _pow_table(p, p, int(exps.max(initial=1)))
    total = 0
    for prefix in itertools.product(range(p), repeat=n - 2):
        vals = _eval_grid(coeffs, exps, prefix, ptab, p)
        total += int(np.count_nonzero(vals == 0))
    return total - 1  # f(0) = 0 always; drop x = 0


def section_counts_fp(coeffs, exps, gcoeffs, gexps, gvar, a, n: int, p: int):
    """Cone counts over f = <a,x> = 0: (total, transverse).

    A point is transverse when the 2 x n matrix with rows grad f(x), a
    has rank 2 mod p.  ``gvar[t]`` says which partial a gradient term
    belongs to.
    """
    dmax = int(max(exps.max(initial=1), gexps.max(initial=1)))
    ptab = _pow_table(p, p, dmax)
    a = [int(v) % p for v in a]
    xs = np.arange(p, dtype=np.int64)
    lin_tail = np.add.outer(a[-2] * xs, a[-1] * xs).ravel()
    total = 0
    transverse = 0
    for prefix in itertools.product(range(p), repeat=n - 2):
        fvals = _eval_grid(coeffs, exps, prefix, ptab, p)
        lin = (sum(ai * xi for ai, xi in zip(a, prefix)) + lin_tail) % p
        mask = (fvals == 0) & (lin == 0)
        pm = _prim_mask(prefix, p, p)
        if pm is not None:
            mask &= pm
        if not mask.any():
            continue
        total += int(np.count_nonzero(mask))
        grads = np.zeros((n, p * p), dtype=np.int64)
        for i in range(n):
            sel = gvar == i
            if sel.any():
                grads[i] = _eval_grid(gcoeffs[sel], gexps[sel], prefix, ptab, p)
        dep = np.ones(p * p, dtype=bool)
        for i in range(n):
            for j in range(i + 1, n):
                dep &= ((grads[i] * a[j] - grads[j] * a[i]) % p) == 0
        transverse += int(np.count_nonzero(mask & ~dep))
    return total, transverse


def prim_zero_count_pk(coeffs, exps, n: int, p: int, k: int, a=None) -> int:
    """# primitive y mod p^k with f(y) = 0 mod p^k (and <a,y> = 0 if given)."""
    m = p**k
    ptab = _pow_table(m, m, int(exps.max(initial=1)))
    xs = np.arange(m, dtype=np.int64)
    if a is not None:
        av = [int(v) % m for v in a]
        lin_tail = np.add.outer(av[-2] * xs, av[-1] * xs).ravel()
    total = 0
    for prefix in itertools.product(range(m), repeat=n - 2):
        vals = _eval_grid(coeffs, exps, prefix, ptab, m)
        mask = vals == 0
        if a is not None:
            lin = (sum(ai * xi for ai, xi in zip(av, prefix)) + lin_tail) % m
            mask &= lin == 0
        pm = _prim_mask(prefix, p, m)
        if pm is not None:
            mask &= pm
        total += int(np.count_nonzero(mask))
    return total


def f_valuation_profile(coeffs, exps, n: int, p: int, k: int) -> np.ndarray:
    """counts[j] = # primitive y mod p^k with v_p(f(y)) = j, j < k.

    The last entry counts v_p >= k (f = 0 mod p^k).
    """
    m = p**k
    ptab = _pow_table(m, m, int(exps.max(initial=1)))
    ge = np.zeros(k + 1, dtype=np.int64)  # ge[t] = # with v >= t
    for prefix in itertools.product(range(m), repeat=n - 2):
        vals = _eval_grid(coeffs, exps, prefix, ptab, m)
        pm = _prim_mask(prefix, p, m)
        nprim = m * m if pm is None else int(np.count_nonzero(pm))
        ge[0] += nprim
        q = 1
        for t in range(1, k + 1):
            q *= p
            mask = (vals % q) == 0
            if pm is not None:
                mask &= pm
            ge[t] += int(np.count_nonzero(mask))
    out = np.empty(k + 1, dtype=np.int64)
    out[:k] = ge[:k] - ge[1:]
    out[k] = ge[k]
    return out


def character_class_counts(coeffs, exps, a, n: int, p: int, alpha: int, beta: int) -> np.ndarray:
    """counts[c] = # primitive y mod p^alpha with p^beta | f(y), <a,y> = c.

    Exact integer table; additive character sums are weighted sums of it.
    """
    m = p**alpha
    pb = p**beta
    av = [int(v) % m for v in a]
    xs = np.arange(m, dtype=np.int64)
    lin_tail = np.add.outer(av[-2] * xs, av[-1] * xs).ravel()
    ptab = _pow_table(m, pb, int(exps.max(initial=1))) if beta else None
    counts = np.zeros(m, dtype=np.int64)
    full = np.ones(m * m, dtype=bool)
    for prefix in itertools.product(range(m), repeat=n - 2):
        if beta:
            mask = _eval_grid(coeffs, exps, prefix, ptab, pb) == 0
        else:
            mask = full.copy()
        pm = _prim_mask(prefix, p, m)
        if pm is not None:
            mask &= pm
        if not mask.any():
            continue
        lin = (sum(ai * xi for ai, xi in zip(av, prefix)) + lin_tail[mask]) % m
        counts += np.bincount(lin, minlength=m)
    return counts


def character_valuation_counts(coeffs, exps, a, n: int, p: int, alpha: int) -> np.ndarray:
    """counts[j, c] = # primitive y mod p^alpha with v_p(f(y)) = j, <a,y> = c.

    Rows j = 0..alpha-1 are exact valuations; the last row is v >= alpha.
    One grid pass serves every divisibility level p^beta | f, beta <= alpha.
    """
    m = p**alpha
    av = [int(v) % m for v in a]
    xs = np.arange(m, dtype=np.int64)
    lin_tail = np.add.outer(av[-2] * xs, av[-1] * xs).ravel()
    ptab = _pow_table(m, m, int(exps.max(initial=1)))
    counts = np.zeros((alpha + 1) * m, dtype=np.int64)
    for prefix in itertools.product(range(m), repeat=n - 2):
        vals = _eval_grid(coeffs, exps, prefix, ptab, m)
        vclass = np.zeros(m * m, dtype=np.int64)
        q = 1
        for t in range(1, alpha + 1):
            q *= p
            vclass += (vals % q) == 0
        lin = (sum(ai * xi for ai, xi in zip(av, prefix)) + lin_tail) % m
        flat = vclass * m + lin
        pm = _prim_mask(prefix, p, m)
        if pm is not None:
            flat = flat[pm]
        counts += np.bincount(flat, minlength=(alpha + 1) * m)
    return counts.reshape(alpha + 1, m)


def ball_candidates(coeffs, exps, n: int, b: int, rad2: int):
    """Primitive (a, b) with b^2 + |a|^2 <= rad2, in lexicographic a-order.

    Returns (A, Q, F): coordinate rows, squared lengths b^2 + |a|^2 and
    form values f(a), all int64.
    """
    r2 = rad2 - b * b
    if r2 < 0:
        z = np.zeros((0,), dtype=np.int64)
        return np.zeros((0, n), dtype=np.int64), z, z
    r = int(np.sqrt(max(r2, 0)))
    while (r + 1) * (r + 1) <= r2:
        r += 1
    while r > 0 and r * r > r2:
        r -= 1
    side = np.arange(-r, r + 1, dtype=np.int64)
    dmax = int(exps.max(initial=1))
    ptab = np.ones((dmax + 1, side.size), dtype=np.int64)
    for e in range(1, dmax + 1):
        ptab[e] = ptab[e - 1] * side
    sq = side * side
    absside = np.abs(side)
    rows_A, rows_Q, rows_F = [], [], []
    for prefix in itertools.product(side.tolist(), repeat=n - 2):
        pref_norm = b * b + sum(v * v for v in prefix)
        if pref_norm > rad2:
            continue
        Q = pref_norm + np.add.outer(sq, sq)
        mask = Q <= rad2
        if not mask.any():
            continue
        g = abs(int(b))
        for v in prefix:
            g = int(np.gcd(g, abs(int(v))))
        gg = np.gcd(np.gcd.outer(absside, absside), g)
        mask &= gg == 1
        if not mask.any():
            continue
        F = np.zeros((side.size, side.size), dtype=np.int64)
        for t in range(len(coeffs)):
            c = int(coeffs[t])
            for j, xi in enumerate(prefix):
                e = int(exps[t, j])
                if e:
                    c *= xi**e
            if c == 0:
                continue
            F += np.outer(c * ptab[int(exps[t, -2])], ptab[int(exps[t, -1])])
        idx = np.nonzero(mask)
        m = idx[0].size
        A = np.empty((m, n), dtype=np.int64)
        for j, v in enumerate(prefix):
            A[:, j] = v
        A[:, n - 2] = side[idx[0]]
        A[:, n - 1] = side[idx[1]]
        rows_A.append(A)
        rows_Q.append(Q[mask])
        rows_F.append(F[mask])
    if not rows_A:
        z = np.zeros((0,), dtype=np.int64)
        return np.zeros((0, n), dtype=np.int64), z, z
    return np.concatenate(rows_A), np.concatenate(rows_Q), np.concatenate(rows_F)


def _gf2_mul_table(p: int) -> np.ndarray:
    """Multiplication table of F_{p^2}, elements encoded as u*p + v.

    u + v*t with t^2 = r for a non-residue r (p odd); for p = 2 use
    t^2 = t + 1.
    """
    q = p * p
    enc = np.arange(q)
    u, v = enc // p, enc % p
    u1, v1 = u[:, None], v[:, None]
    u2, v2 = u[None, :], v[None, :]
    if p == 2:
        uu = (u1 * u2 + v1 * v2) % 2
        vv = (u1 * v2 + v1 * u2 + v1 * v2) % 2
    else:
        r = next(r for r in range(2, p) if pow(r, (p - 1) // 2, p) == p - 1)
        uu = (u1 * u2 + r * v1 * v2) % p
        vv = (u1 * v2 + v1 * u2) % p
    return (uu * p + vv).astype(np.int64)


def singular_exists(coeffs, exps, gcoeffs, gexps, gvar, n: int, p: int, field_degree: int) -> bool:
    """True when f and all partials share a nonzero root over F_{p^deg}."""
    if field_degree == 1:
        q = p
        mul = (np.arange(q)[:, None] * np.arange(q)[None, :] % p).astype(np.int64)
        add = ((np.arange(q)[:, None] + np.arange(q)[None, :]) % p).astype(np.int64)
        one = 1 % p

        def embed(c):
            return int(c) % p

    else:
        q = p * p
        mul = _gf2_mul_table(p)
        enc = np.arange(q)
        u, v = enc // p, enc % p
        add = (((u[:, None] + u[None, :]) % p) * p + (v[:, None] + v[None, :]) % p).astype(np.int64)
        one = p  # encoding of 1 + 0*t

        def embed(c):
            return (int(c) % p) * p

    dmax = int(max(exps.max(initial=1), gexps.max(initial=1)))
    ptab = np.zeros((dmax + 1, q), dtype=np.int64)
    ptab[0] = one
    xs = np.arange(q)
    for e in range(1, dmax + 1):
        ptab[e] = mul[ptab[e - 1], xs]
    gx = np.repeat(np.arange(q), q)
    gy = np.tile(np.arange(q), q)

    def eval_grid(cs, es, prefix):
        out = np.zeros(q * q, dtype=np.int64)
        for t in range(len(cs)):
            c0 = embed(cs[t])
            for j, xi in enumerate(prefix):
                e = int(es[t, j])
                if e:
                    c0 = int(mul[c0, int(ptab[e, xi])])
            val = np.full(q * q, c0, dtype=np.int64)
            ex, ey = int(es[t, -2]), int(es[t, -1])
            if ex:
                val = mul[val, ptab[ex, gx]]
            if ey:
                val = mul[val, ptab[ey, gy]]
            out = add[out, val]
        return out

    for prefix in itertools.product(range(q), repeat=n - 2):
        mask = eval_grid(coeffs, exps, prefix) == 0
        if not mask.any():
            continue
        for i in range(n):
            sel = gvar == i
            if sel.any():
                mask &= eval_grid(gcoeffs[sel], gexps[sel], prefix) == 0
            else:
                # zero partial vanishes identically; no constraint
                pass
            if not mask.any():
                break
        if mask.any():
            if any(prefix):
                return True
            mask[0] = False  # grid origin = zero vector
            if mask.any():
                return True
    return False
