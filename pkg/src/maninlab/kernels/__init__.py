"""Kernel backend selection.

The hot loops (residue grids, character sums, ball enumeration) exist
twice: a Cython extension ``_ckernels`` and a numpy fallback
``pykernels``.  The compiled backend is picked when importable; set
``MANINLAB_KERNELS=python`` or ``=c`` to force one (the benchmark in
``benchmarks/bench_kernels.py`` compares them).
"""

from __future__ import annotations

import os

import numpy as np

from . import pykernels

_choice = os.environ.get("MANINLAB_KERNELS", "auto").lower()
if _choice not in ("auto", "c", "python"):
    raise RuntimeError(f"MANINLAB_KERNELS must be auto|c|python, got {_choice!r}")

_impl = None
if _choice in ("auto", "c"):
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _choice == "c":
            raise
        _impl = None
if _impl is None:
    _impl = pykernels

BACKEND = _impl.BACKEND_NAME


def _fn(name: str):
    """Backend function, falling back to numpy for the non-hot kernels."""
    return getattr(_impl, name, None) or getattr(pykernels, name)


def _poly_arrays(f):
    if f.n > 16:
        raise ValueError("kernels support at most 16 variables")
    return f.exponent_matrix()


def _grad_arrays(f):
    """Concatenated gradient terms with a per-term partial index."""
    gcs, ges, gvs = [], [], []
    for i, gi in enumerate(f.gradient()):
        c, e = gi.exponent_matrix()
        gcs.append(c)
        ges.append(e)
        gvs.append(np.full(len(c), i, dtype=np.int64))
    if gcs:
        return np.concatenate(gcs), np.concatenate(ges).reshape(-1, f.n), np.concatenate(gvs)
    z = np.zeros(0, dtype=np.int64)
    return z, np.zeros((0, f.n), dtype=np.int64), z


def cone_count_fp(f, p: int) -> int:
    c, e = _poly_arrays(f)
    return int(_fn("cone_count_fp")(c, e, f.n, p))


def section_counts_fp(f, a, p: int):
    c, e = _poly_arrays(f)
    gc, ge, gv = _grad_arrays(f)
    a64 = np.asarray(a, dtype=np.int64)
    total, transverse = _fn("section_counts_fp")(c, e, gc, ge, gv, a64, f.n, p)
    return int(total), int(transverse)


def prim_zero_count_pk(f, p: int, k: int, a=None) -> int:
    c, e = _poly_arrays(f)
    a64 = None if a is None else np.asarray(a, dtype=np.int64)
    return int(_fn("prim_zero_count_pk")(c, e, f.n, p, k, a64))


def f_valuation_profile(f, p: int, k: int):
    c, e = _poly_arrays(f)
    return np.asarray(_fn("f_valuation_profile")(c, e, f.n, p, k), dtype=np.int64)


def character_class_counts(f, a, p: int, alpha: int, beta: int):
    c, e = _poly_arrays(f)
    a64 = np.asarray(a, dtype=np.int64)
    return np.asarray(
        _fn("character_class_counts")(c, e, a64, f.n, p, alpha, beta), dtype=np.int64
    )


def character_valuation_counts(f, a, p: int, alpha: int):
    c, e = _poly_arrays(f)
    a64 = np.asarray(a, dtype=np.int64)
    return np.asarray(
        _fn("character_valuation_counts")(c, e, a64, f.n, p, alpha), dtype=np.int64
    )


def ball_candidates(f, b: int, rad2: int):
    c, e = _poly_arrays(f)
    A, Q, F = _fn("ball_candidates")(c, e, f.n, b, rad2)
    return np.asarray(A), np.asarray(Q), np.asarray(F)


def singular_point_exists(f, p: int, field_degree: int = 2) -> bool:
    c, e = _poly_arrays(f)
    gc, ge, gv = _grad_arrays(f)
    return bool(_fn("singular_exists")(c, e, gc, ge, gv, f.n, p, field_degree))
