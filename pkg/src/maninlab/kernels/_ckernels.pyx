# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the numpy kernels in ``pykernels``.

Same signatures, same exact integer outputs; plain odometer loops over
residue grids with per-variable power tables.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "c"

ctypedef cnp.int64_t i64


cdef i64 _gcd(i64 a, i64 b) noexcept nogil:
    cdef i64 t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef inline i64 _eval_terms(const i64[::1] coeffs, const i64[:, ::1] exps,
                            const i64* x, int n, const i64[:, ::1] ptab,
                            i64 mod) noexcept nogil:
    cdef i64 total = 0, t
    cdef Py_ssize_t ti, j
    cdef i64 e
    for ti in range(coeffs.shape[0]):
        t = coeffs[ti] % mod
        if t < 0:
            t += mod
        for j in range(n):
            e = exps[ti, j]
            if e:
                t = (t * ptab[e, x[j]]) % mod
        total += t
        if total >= mod:
            total -= mod
    return total


cdef object _make_ptab(i64 m, i64 mod, i64 dmax):
    xs = np.arange(m, dtype=np.int64) % mod
    table = np.ones((dmax + 1, m), dtype=np.int64)
    for e in range(1, dmax + 1):
        table[e] = (table[e - 1] * xs) % mod
    return table


cdef inline bint _advance(i64* x, int n, i64 m) noexcept nogil:
    """Odometer increment in lexicographic order (last digit fastest)."""
    cdef int j = n - 1
    while j >= 0:
        x[j] += 1
        if x[j] < m:
            return True
        x[j] = 0
        j -= 1
    return False


def cone_count_fp(coeffs, exps, int n, int p):
    cdef i64[::1] cs = np.ascontiguousarray(coeffs, dtype=np.int64)
    cdef i64[:, ::1] es = np.ascontiguousarray(exps, dtype=np.int64)
    cdef i64 dmax = max(1, int(np.asarray(exps).max(initial=1)))
    cdef i64[:, ::1] ptab = _make_ptab(p, p, dmax)
    cdef i64 x[16]
    cdef int j
    cdef i64 total = 0
    for j in range(n):
        x[j] = 0
    with nogil:
        while True:
            if _eval_terms(cs, es, x, n, ptab, p) == 0:
                total += 1
            if not _advance(x, n, p):
                break
    return int(total - 1)


def section_counts_fp(coeffs, exps, gcoeffs, gexps, gvar, a, int n, int p):
    cdef i64[::1] cs = np.ascontiguousarray(coeffs, dtype=np.int64)
    cdef i64[:, ::1] es = np.ascontiguousarray(exps, dtype=np.int64)
    cdef i64[::1] gcs = np.ascontiguousarray(gcoeffs, dtype=np.int64)
    cdef i64[:, ::1] ges = np.ascontiguousarray(gexps, dtype=np.int64).reshape(len(gcoeffs), n)
    cdef i64[::1] gvs = np.ascontiguousarray(gvar, dtype=np.int64)
    cdef i64[::1] av = np.ascontiguousarray(np.asarray(a, dtype=np.int64) % p, dtype=np.int64)
    cdef i64 dmax = max(1, int(np.asarray(exps).max(initial=1)), int(np.asarray(gexps).max(initial=1)) if len(gcoeffs) else 1)
    cdef i64[:, ::1] ptab = _make_ptab(p, p, dmax)
    cdef i64 x[16]
    cdef i64 grad[16]
    cdef int j, i, k
    cdef i64 total = 0, transverse = 0, lin, gval, t, e
    cdef Py_ssize_t ti
    cdef bint nonzero, dep
    for j in range(n):
        x[j] = 0
    with nogil:
        while True:
            nonzero = False
            for j in range(n):
                if x[j] != 0:
                    nonzero = True
                    break
            if nonzero and _eval_terms(cs, es, x, n, ptab, p) == 0:
                lin = 0
                for j in range(n):
                    lin = (lin + av[j] * x[j]) % p
                if lin == 0:
                    total += 1
                    for j in range(n):
                        grad[j] = 0
                    for ti in range(gcs.shape[0]):
                        t = gcs[ti] % p
                        if t < 0:
                            t += p
                        for j in range(n):
                            e = ges[ti, j]
                            if e:
                                t = (t * ptab[e, x[j]]) % p
                        i = <int> gvs[ti]
                        grad[i] = (grad[i] + t) % p
                    dep = True
                    for i in range(n):
                        if not dep:
                            break
                        for k in range(i + 1, n):
                            if (grad[i] * av[k] - grad[k] * av[i]) % p != 0:
                                dep = False
                                break
                    if not dep:
                        transverse += 1
            if not _advance(x, n, p):
                break
    return int(total), int(transverse)


def prim_zero_count_pk(coeffs, exps, int n, int p, int k, a=None):
    cdef i64[::1] cs = np.ascontiguousarray(coeffs, dtype=np.int64)
    cdef i64[:, ::1] es = np.ascontiguousarray(exps, dtype=np.int64)
    cdef i64 m = p**k
    cdef i64 dmax = max(1, int(np.asarray(exps).max(initial=1)))
    cdef i64[:, ::1] ptab = _make_ptab(m, m, dmax)
    cdef bint has_a = a is not None
    cdef i64[::1] av
    if has_a:
        av = np.ascontiguousarray(np.asarray(a, dtype=np.int64) % m, dtype=np.int64)
    else:
        av = np.zeros(n, dtype=np.int64)
    cdef i64 x[16]
    cdef int j
    cdef i64 total = 0, lin
    cdef bint prim
    for j in range(n):
        x[j] = 0
    with nogil:
        while True:
            prim = False
            for j in range(n):
                if x[j] % p != 0:
                    prim = True
                    break
            if prim and _eval_terms(cs, es, x, n, ptab, m) == 0:
                if has_a:
                    lin = 0
                    for j in range(n):
                        lin = (lin + av[j] * x[j]) % m
                    if lin == 0:
                        total += 1
                else:
                    total += 1
            if not _advance(x, n, m):
                break
    return int(total)


def f_valuation_profile(coeffs, exps, int n, int p, int k):
    cdef i64[::1] cs = np.ascontiguousarray(coeffs, dtype=np.int64)
    cdef i64[:, ::1] es = np.ascontiguousarray(exps, dtype=np.int64)
    cdef i64 m = p**k
    cdef i64 dmax = max(1, int(np.asarray(exps).max(initial=1)))
    cdef i64[:, ::1] ptab = _make_ptab(m, m, dmax)
    out_arr = np.zeros(k + 1, dtype=np.int64)
    cdef i64[::1] out = out_arr
    cdef i64 x[16]
    cdef int j, v
    cdef i64 val
    cdef bint prim
    for j in range(n):
        x[j] = 0
    with nogil:
        while True:
            prim = False
            for j in range(n):
                if x[j] % p != 0:
                    prim = True
                    break
            if prim:
                val = _eval_terms(cs, es, x, n, ptab, m)
                v = 0
                if val == 0:
                    v = k
                else:
                    while val % p == 0:
                        val //= p
                        v += 1
                out[v] += 1
            if not _advance(x, n, m):
                break
    return out_arr


def character_class_counts(coeffs, exps, a, int n, int p, int alpha, int beta):
    counts2d = character_valuation_counts(coeffs, exps, a, n, p, alpha)
    return counts2d[beta:].sum(axis=0)


def character_valuation_counts(coeffs, exps, a, int n, int p, int alpha):
    cdef i64[::1] cs = np.ascontiguousarray(coeffs, dtype=np.int64)
    cdef i64[:, ::1] es = np.ascontiguousarray(exps, dtype=np.int64)
    cdef i64 m = p**alpha
    cdef i64 dmax = max(1, int(np.asarray(exps).max(initial=1)))
    cdef i64[:, ::1] ptab = _make_ptab(m, m, dmax)
    cdef i64[::1] av = np.ascontiguousarray(np.asarray(a, dtype=np.int64) % m, dtype=np.int64)
    out_arr = np.zeros((alpha + 1) * m, dtype=np.int64)
    cdef i64[::1] out = out_arr
    cdef i64 x[16]
    cdef int j, v
    cdef i64 val, lin
    cdef bint prim
    for j in range(n):
        x[j] = 0
    with nogil:
        while True:
            prim = False
            for j in range(n):
                if x[j] % p != 0:
                    prim = True
                    break
            if prim:
                val = _eval_terms(cs, es, x, n, ptab, m)
                v = 0
                if val == 0:
                    v = alpha
                else:
                    while val % p == 0:
                        val //= p
                        v += 1
                lin = 0
                for j in range(n):
                    lin = (lin + av[j] * x[j]) % m
                out[v * m + lin] += 1
            if not _advance(x, n, m):
                break
    return out_arr.reshape(alpha + 1, m)


def ball_candidates(coeffs, exps, int n, i64 b, i64 rad2):
    cdef i64[::1] cs = np.ascontiguousarray(coeffs, dtype=np.int64)
    cdef i64[:, ::1] es = np.ascontiguousarray(exps, dtype=np.int64)
    cdef i64 r2 = rad2 - b * b
    if r2 < 0:
        z = np.zeros((0,), dtype=np.int64)
        return np.zeros((0, n), dtype=np.int64), z, z
    cdef i64 r = <i64> (r2**0.5)
    while (r + 1) * (r + 1) <= r2:
        r += 1
    while r > 0 and r * r > r2:
        r -= 1
    cdef i64 side = 2 * r + 1
    cdef i64 x[16]
    cdef int j
    cdef i64 q, g, fv, t, e, cnt
    cdef Py_ssize_t ti
    # pass 1: count rows
    for j in range(n):
        x[j] = -r
    cnt = 0
    with nogil:
        while True:
            q = b * b
            for j in range(n):
                q += x[j] * x[j]
            if q <= rad2:
                g = b
                for j in range(n):
                    g = _gcd(g, x[j])
                if g == 1:
                    cnt += 1
            # advance odometer over [-r, r]
            j = n - 1
            while j >= 0:
                x[j] += 1
                if x[j] <= r:
                    break
                x[j] = -r
                j -= 1
            if j < 0:
                break
    A_arr = np.empty((cnt, n), dtype=np.int64)
    Q_arr = np.empty(cnt, dtype=np.int64)
    F_arr = np.empty(cnt, dtype=np.int64)
    cdef i64[:, ::1] A = A_arr
    cdef i64[::1] Q = Q_arr
    cdef i64[::1] F = F_arr
    cdef i64 row = 0
    cdef i64 w
    cdef int ee
    for j in range(n):
        x[j] = -r
    with nogil:
        while True:
            q = b * b
            for j in range(n):
                q += x[j] * x[j]
            if q <= rad2:
                g = b
                for j in range(n):
                    g = _gcd(g, x[j])
                if g == 1:
                    fv = 0
                    for ti in range(cs.shape[0]):
                        t = cs[ti]
                        for j in range(n):
                            e = es[ti, j]
                            if e:
                                w = x[j]
                                for ee in range(e):
                                    t = t * w
                        fv += t
                    for j in range(n):
                        A[row, j] = x[j]
                    Q[row] = q
                    F[row] = fv
                    row += 1
            j = n - 1
            while j >= 0:
                x[j] += 1
                if x[j] <= r:
                    break
                x[j] = -r
                j -= 1
            if j < 0:
                break
    return A_arr, Q_arr, F_arr
