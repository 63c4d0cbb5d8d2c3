"""Vectorized univariate root finding on stacks of coefficient rows."""

import numpy as np


def batched_roots(coeffs, lead_tol=1e-13):
    """Roots of many polynomials at once.

    ``coeffs`` has shape (B, D+1) with ascending powers. Returns ``(roots,
    degenerate)`` where roots has shape (B, D); rows whose leading
    coefficient vanishes are solved individually and padded with NaN (roots
    at infinity), and ``degenerate`` flags identically zero rows.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    b, n = coeffs.shape
    deg = n - 1
    roots = np.full((b, deg), np.nan + 0j)
    scale = np.abs(coeffs).max(axis=1) if deg >= 0 else np.zeros(b)
    degenerate = scale == 0
    if deg <= 0:
        return roots, degenerate
    lead = coeffs[:, deg]
    good = np.abs(lead) > lead_tol * scale
    if deg == 1:
        roots[good, 0] = -coeffs[good, 0] / lead[good]
    elif good.any():
        monic = coeffs[good, :deg] / lead[good, None]
        comp = np.zeros((monic.shape[0], deg, deg), dtype=complex)
        comp[:, np.arange(1, deg), np.arange(deg - 1)] = 1.0
        comp[:, :, -1] = -monic
        roots[good] = np.linalg.eigvals(comp)
    for i in np.flatnonzero(~good & ~degenerate):
        r = np.roots(coeffs[i, ::-1])
        roots[i, :len(r)] = r
    return roots, degenerate


def horner(coeffs, y):
    """Evaluate ascending coefficient rows (B, D+1) at y (B, K); returns value and derivative."""
    val = np.zeros(y.shape, dtype=complex)
    der = np.zeros(y.shape, dtype=complex)
    for k in range(coeffs.shape[1] - 1, -1, -1):
        der = der * y + val
        val = val * y + coeffs[:, k, None]
    return val, der


def polish(coeffs, roots, iterations=2):
    """A few guarded Newton steps on every finite root."""
    roots = roots.copy()
    finite = np.isfinite(roots)
    safe = np.where(finite, roots, 0)
    for _ in range(iterations):
        val, der = horner(coeffs, safe)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(der != 0, val / der, 0)
        trial = safe - step
        newval, _ = horner(coeffs, trial)
        better = finite & np.isfinite(trial) & (np.abs(newval) <= np.abs(val))
        safe = np.where(better, trial, safe)
    return np.where(finite, safe, roots)


def min_gap(roots):
    """Smallest pairwise distance within each row of a (B, K) root array."""
    k = roots.shape[1]
    if k < 2:
        return np.full(roots.shape[0], np.inf)
    diff = np.abs(roots[:, :, None] - roots[:, None, :])
    diff[:, np.arange(k), np.arange(k)] = np.inf
    return np.nanmin(diff.reshape(roots.shape[0], -1), axis=1)
