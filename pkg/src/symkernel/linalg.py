"""Shared numerical utilities: sinh(x)/x evaluation, quadrature rules,
deterministic reductions and float formatting."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_hermitenorm

_SINHC_TAYLOR_CUT = 1e-4

# cached quadrature rules keyed by node count
_HERMITE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}
_LEGENDRE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def sinhc(z):
    """sinh(z)/z, elementwise, with a Taylor fallback near zero.

    Accepts real or complex scalars and arrays. The fallback keeps five
    series terms, enough for full double precision at |z| < 1e-4.
    """
    z = np.asarray(z)
    small = np.abs(z) < _SINHC_TAYLOR_CUT
    zs = np.where(small, 0.0, z)
    out = np.where(small, _sinhc_series(z), np.sinh(zs) / np.where(small, 1.0, zs))
    if out.ndim == 0:
        return out[()]
    return out


def _sinhc_series(z):
    z2 = z * z
    return 1.0 + z2 / 6.0 + z2**2 / 120.0 + z2**3 / 5040.0 + z2**4 / 362880.0


def sinhc_det_power(mat, power):
    """det(sinh(M/2) / (M/2)) ** power via eigenvalues.

    M is a square matrix (real or complex); the determinant of the
    entire function sinh(x)/x applied to M/2 is the product of sinhc
    over the eigenvalues of M/2. Returns a complex scalar.
    """
    mat = np.asarray(mat)
    if mat.shape[0] == 0:
        return 1.0 + 0.0j
    evals = np.linalg.eigvals(mat / 2.0)
    vals = sinhc(evals.astype(complex))
    det = np.prod(vals)
    return complex(det) ** power


def hermite_rule(n):
    """Nodes and weights for the weight exp(-w^2/4)/sqrt(4*pi) on R.

    Normalized so that the weights sum to 1 (the weight is a probability
    density with variance 2). Built from the probabilists' Hermite rule.
    """
    if n not in _HERMITE_CACHE:
        x, w = roots_hermitenorm(n)
        _HERMITE_CACHE[n] = (np.sqrt(2.0) * x, w / np.sqrt(2.0 * np.pi))
    return _HERMITE_CACHE[n]


def legendre_rule(n, lo, hi):
    """Gauss-Legendre nodes and weights mapped to [lo, hi]."""
    if n not in _LEGENDRE_CACHE:
        _LEGENDRE_CACHE[n] = leggauss(n)
    x, w = _LEGENDRE_CACHE[n]
    half = (hi - lo) / 2.0
    return lo + (x + 1.0) * half, w * half


def pairwise_sum(values):
    """Sum a sequence by fixed-order pairwise reduction.

    The reduction tree depends only on the length, so the result is
    bitwise reproducible regardless of how the values were produced.
    """
    vals = list(values)
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = []
        for i in range(0, len(vals) - 1, 2):
            nxt.append(vals[i] + vals[i + 1])
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def thread_count():
    """Worker cap from SYMKERNEL_THREADS (default 1)."""
    raw = os.environ.get("SYMKERNEL_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def ordered_map(fn, items):
    """Map fn over items, preserving order in the result list.

    Honors the SYMKERNEL_THREADS cap. Results are combined in input
    order, so the output is identical for any worker count.
    """
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def fmt_float(x):
    """Shortest 17-significant-digit form; round-trips float64 exactly."""
    return format(float(x), ".17g")


def antisymmetrize_pairs(tensor, pairs):
    """Antisymmetrize tensor over each listed axis pair (weight 1/2 each)."""
    out = tensor
    for a, b in pairs:
        out = 0.5 * (out - np.swapaxes(out, a, b))
    return out
