"""Monodromy of the fiber roots of F(x, y) = 0 over a torus in the base.

Each generating loop turns one base coordinate once around its circle at
fixed moduli; following the k roots in y gives a permutation. The loops
commute, and the joint orbits are the connected components of the covering
over the chosen amoeba complement component.
"""

import logging
from dataclasses import dataclass, field
from math import lcm

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _roots

LOGGER = logging.getLogger(__name__)


class RootCollisionError(RuntimeError):
    pass


class ContinuationError(RuntimeError):
    pass


class MonodromyError(RuntimeError):
    pass


class FiberPolynomial:
    """F(x_1..x_N, y) compiled for evaluating its y-coefficients at many base points."""

    def __init__(self, F, var=-1):
        exps, coeffs = F.arrays()
        var %= F.nvars
        powers = exps[:, var]
        if powers.min() < 0:
            raise ValueError("the fiber variable must appear with nonnegative exponents")
        self.degree = int(powers.max())
        if self.degree < 1:
            raise ValueError("the polynomial is constant in the fiber variable")
        self.base_exps = np.delete(exps, var, axis=1)
        self.coeffs = coeffs
        self.nbase = F.nvars - 1
        self.onehot = np.zeros((len(coeffs), self.degree + 1))
        self.onehot[np.arange(len(coeffs)), powers] = 1.0
        self.scale = float(np.abs(coeffs).max())

    def coefficients(self, z):
        """Ascending y-coefficients at base points z of shape (B, N)."""
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        mon = self.coeffs * np.prod(z[:, None, :] ** self.base_exps[None], axis=2)
        return mon @ self.onehot

    def roots(self, z, polish=True):
        c = self.coefficients(z)
        r, degen = _roots.batched_roots(c)
        if degen.any():
            raise ContinuationError("fiber polynomial vanishes identically")
        return _roots.polish(c, r) if polish else r

    def evaluate(self, z, y):
        """F at base points z (B, N) and fiber values y (B,)."""
        val, _ = _roots.horner(self.coefficients(z), np.asarray(y, dtype=complex)[:, None])
        return val[:, 0]


def _canonical_order(roots):
    return np.lexsort((np.round(roots.imag, 10), np.round(roots.real, 10)))


@dataclass
class FiberBasepoint:
    log_radius: tuple
    base_angles: tuple
    roots: np.ndarray

    @property
    def radius(self):
        return tuple(float(np.exp(a)) for a in self.log_radius)

    def point(self):
        return np.exp(np.asarray(self.log_radius) + 1j * np.asarray(self.base_angles))


def fiber_basepoint(F, log_radius, base_angles=None, gap_tol=1e-8):
    """Roots of F over the base point exp(log_radius + i*base_angles), all simple."""
    fp = F if isinstance(F, FiberPolynomial) else FiberPolynomial(F)
    log_radius = tuple(float(a) for a in log_radius)
    if base_angles is None:
        base_angles = (0.0,) * len(log_radius)
    z = np.exp(np.asarray(log_radius) + 1j * np.asarray(base_angles, dtype=float))
    r = fp.roots(z[None])[0]
    if not np.all(np.isfinite(r)):
        raise RootCollisionError("a fiber root escapes to infinity at the basepoint")
    r = r[_canonical_order(r)]
    scale = max(1.0, float(np.abs(r).max()))
    gap = _roots.min_gap(r[None])[0]
    if gap < gap_tol * scale:
        raise RootCollisionError(f"fiber roots collide (gap {gap:.2e}); pick a deeper point")
    return FiberBasepoint(log_radius, tuple(float(a) for a in base_angles), r)


def track_path(fp, log_radius, angles_from, angles_to, start, steps=256, min_step=1e-7):
    """Continue the fiber values ``start`` along the straight path between two angle vectors.

    Moduli stay fixed. A step is accepted when every value moves to a distinct
    root closer than half the smallest root gap; otherwise it is halved.
    """
    log_radius = np.asarray(log_radius, dtype=float)
    a0 = np.asarray(angles_from, dtype=float)
    a1 = np.asarray(angles_to, dtype=float)
    y = np.asarray(start, dtype=complex).copy()
    s, h = 0.0, 1.0 / steps
    while s < 1.0:
        h = min(h, 1.0 - s)
        t = s + h
        z = np.exp(log_radius + 1j * (a0 + t * (a1 - a0)))
        r = fp.roots(z[None])[0]
        dist = np.abs(y[:, None] - r[None, :])
        rows, cols = linear_sum_assignment(dist)
        moved = dist[rows, cols]
        gap = _roots.min_gap(r[None])[0]
        if np.all(np.isfinite(r)) and moved.max() < 0.5 * gap:
            y = r[cols]
            s = t
            h = min(2 * h, 1.0 / steps)
        else:
            h /= 2
            if h < min_step:
                raise ContinuationError(f"continuation stalled at s={s:.6f}; path near discriminant")
    return y


def _permutation(start, end):
    dist = np.abs(end[:, None] - start[None, :])
    rows, cols = linear_sum_assignment(dist)
    perm = np.empty(len(start), dtype=int)
    perm[rows] = cols
    return tuple(int(a) for a in perm)


def track_loop(F, bp, axis, steps=256, verify=True):
    """Permutation of the basepoint roots induced by turning coordinate ``axis`` once.

    ``perm[i]`` is the index of the root where root i arrives.
    """
    fp = F if isinstance(F, FiberPolynomial) else FiberPolynomial(F)
    a0 = np.asarray(bp.base_angles, dtype=float)
    a1 = a0.copy()
    a1[axis] += 2 * np.pi
    end = track_path(fp, bp.log_radius, a0, a1, bp.roots, steps=steps)
    perm = _permutation(bp.roots, end)
    if verify:
        end2 = track_path(fp, bp.log_radius, a0, a1, bp.roots, steps=2 * steps)
        if _permutation(bp.roots, end2) != perm:
            raise ContinuationError(f"loop along axis {axis} is not stable under step doubling")
    return perm


def compose(p, q):
    """p after q."""
    return tuple(p[q[i]] for i in range(len(q)))


def orbits_of(perms, k):
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for p in perms:
        for i, j in enumerate(p):
            parent[find(i)] = find(j)
    groups = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def permutation_order_on(perm, orbit):
    """lcm of the cycle lengths of ``perm`` restricted to an invariant set."""
    seen = set()
    result = 1
    for i in orbit:
        if i in seen:
            continue
        n, j = 0, i
        while j not in seen:
            seen.add(j)
            j = perm[j]
            n += 1
        result = lcm(result, n)
    return result


@dataclass
class MonodromyResult:
    permutations: list
    orbits: list
    d_per_orbit: list
    basepoint: FiberBasepoint = None
    winding_orders: list = field(default_factory=list)

    def to_json(self):
        return {"permutations": [list(p) for p in self.permutations],
                "orbits": [list(o) for o in self.orbits],
                "d": list(self.d_per_orbit),
                "winding_orders": [list(w) for w in self.winding_orders],
                "log_radius": list(self.basepoint.log_radius) if self.basepoint else None,
                "roots": [[float(r.real), float(r.imag)] for r in self.basepoint.roots]
                if self.basepoint else None}


def monodromy(F, log_radius, base_angles=None, steps=256, verify=True):
    """Loop permutations, branch orbits and ramification indices over a base torus."""
    fp = FiberPolynomial(F)
    bp = fiber_basepoint(fp, log_radius, base_angles)
    perms = [track_loop(fp, bp, j, steps=steps, verify=verify) for j in range(fp.nbase)]
    for i, p in enumerate(perms):
        for q in perms[i + 1:]:
            if compose(p, q) != compose(q, p):
                raise MonodromyError("loop permutations do not commute; tracking failed")
    orbits = orbits_of(perms, fp.degree)
    d = [len(o) for o in orbits]
    winding = [[permutation_order_on(p, o) for p in perms] for o in orbits]
    LOGGER.debug("monodromy at %s: perms=%s orbits=%s", log_radius, perms, orbits)
    return MonodromyResult(perms, orbits, d, bp, winding)
