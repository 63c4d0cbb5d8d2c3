"""Numerical amoebas: membership, the order map, rasters and complement components.

A point x of R^N is a *log point*: the fiber over it is the real torus
|z_j| = exp(x_j). The order of a complement point is obtained by counting,
for each coordinate j, the roots of the univariate slice in z_j that lie
inside the circle of radius exp(x_j). By the argument principle this equals
the torus integral of z_j f_j / f, which :func:`order_integral` evaluates
independently as a cross-check.
"""

import logging
import warnings
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy import ndimage

from . import _roots
from .polyhedra import recession_cone_of_order, sigma_p

LOGGER = logging.getLogger(__name__)

TWO_PI = 2 * np.pi


class AmoebaProximityError(RuntimeError):
    """The requested point is too close to the amoeba to decide its order."""


class DegenerateSliceError(ValueError):
    pass


class NumericalFailure(RuntimeError):
    pass


class ScheduleExhausted(RuntimeError):
    pass


class _Slicer:
    """f viewed as a polynomial in z_axis with coefficients in the other variables."""

    def __init__(self, f, axis):
        exps, coeffs = f.arrays()
        powers = exps[:, axis]
        self.shift = int(powers.min())
        powers = powers - self.shift
        self.degree = int(powers.max())
        self.other = np.delete(exps, axis, axis=1)
        self.coeffs = coeffs
        self.onehot = np.zeros((len(coeffs), self.degree + 1))
        self.onehot[np.arange(len(coeffs)), powers] = 1.0

    def coefficients(self, zother):
        mon = self.coeffs * np.prod(zother[:, None, :] ** self.other[None], axis=2)
        return mon @ self.onehot


def _other_values(x, angles, axis):
    x = np.delete(np.atleast_2d(x), axis, axis=1)
    angles = np.delete(np.atleast_2d(angles), axis, axis=1)
    return np.exp(x + 1j * angles)


def fiber_roots_slice(f, x, axis, angles):
    """Roots in z_axis of f with the other coordinates at exp(x_i + i*theta_i).

    ``angles`` lists the arguments of the other coordinates, in order.
    """
    x = np.asarray(x, dtype=float)
    full = np.insert(np.asarray(angles, dtype=float), axis, 0.0)
    sl = _Slicer(f, axis)
    coeffs = sl.coefficients(_other_values(x, full, axis))
    roots, degenerate = _roots.batched_roots(coeffs)
    if degenerate[0]:
        raise DegenerateSliceError(f"slice along axis {axis} vanishes identically")
    roots = _roots.polish(coeffs, roots)[0]
    return roots[np.isfinite(roots)]


def _counts(f, X, angles):
    """Slice root counts for log points X (B, N) at torus angles (B, N).

    Returns (counts (B, N), margin (B, N), degenerate (B, N)) where margin is
    the smallest |log|root| - x_j| seen on each slice.
    """
    X = np.asarray(X, dtype=float)
    b, n = X.shape
    counts = np.zeros((b, n), dtype=int)
    margin = np.full((b, n), np.inf)
    degenerate = np.zeros((b, n), dtype=bool)
    for j in range(n):
        sl = _Slicer(f, j)
        coeffs = sl.coefficients(_other_values(X, angles, j))
        roots, degen = _roots.batched_roots(coeffs)
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.log(np.abs(roots))
        inside = np.nan_to_num(logs, nan=np.inf) < X[:, j, None]
        counts[:, j] = inside.sum(axis=1) + sl.shift
        gap = np.abs(logs - X[:, j, None])
        if gap.shape[1]:
            margin[:, j] = np.min(np.nan_to_num(gap, nan=np.inf), axis=1)
        degenerate[:, j] = degen
    return counts, margin, degenerate


def orders_batch(f, X, samples=8, rng=None, tol=0.05, angles=None):
    """Order labels for many log points; returns (orders (B, N), ok (B,)).

    A point is ``ok`` when all samples agree and no slice root comes within
    ``tol`` (in log scale) of the torus.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    b, n = X.shape
    if angles is None:
        rng = np.random.default_rng(rng)
        angles = rng.uniform(0, TWO_PI, size=(b, samples, n))
    s = angles.shape[1]
    counts, margin, degen = _counts(f, np.repeat(X, s, axis=0), angles.reshape(b * s, n))
    counts = counts.reshape(b, s, n)
    ok = (margin.reshape(b, s, n) >= tol).all(axis=(1, 2))
    ok &= ~degen.reshape(b, s, n).any(axis=(1, 2))
    ok &= (counts == counts[:, :1]).all(axis=(1, 2))
    return counts[:, 0], ok


def order_at(f, x, samples=8, seed=0, tol=0.05):
    """Order of the complement component containing the log point ``x``."""
    x = np.asarray(x, dtype=float)
    orders, ok = orders_batch(f, x[None], samples=samples, rng=seed, tol=tol)
    if not ok[0]:
        raise AmoebaProximityError(f"point {tuple(float(a) for a in x)} is too close to the amoeba")
    return tuple(int(a) for a in orders[0])


def order_integral(f, x, quadrature=64, max_deviation=0.25):
    """Trapezoidal evaluation of the torus integral of z_j f_j / f over mu^{-1}(x)."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    theta = TWO_PI * np.arange(quadrature) / quadrature
    grid = np.stack(np.meshgrid(*([theta] * n), indexing="ij"), axis=-1).reshape(-1, n)
    z = np.exp(x + 1j * grid)
    exps, coeffs = f.arrays()
    mon = coeffs * np.prod(z[:, None, :] ** exps[None], axis=2)
    val = mon.sum(axis=1)
    if np.any(np.abs(val) == 0):
        raise AmoebaProximityError("f vanishes on the quadrature grid")
    result = np.array([(mon @ exps[:, j] / val).mean().real for j in range(n)])
    dev = np.abs(result - np.round(result))
    if dev.max() > max_deviation:
        raise AmoebaProximityError(
            f"order integral not converged (deviation {dev.max():.3f}); "
            "raise the quadrature or move away from the amoeba")
    return tuple(result)


def _angle_grid(n, count):
    theta = TWO_PI * np.arange(count) / count
    if n == 0:
        return np.zeros((1, 0))
    return np.array(list(product(theta, repeat=n)))


def is_in_amoeba(f, x, angles=64, tol=0.05):
    """Whether some slice root lands within ``tol`` of the torus over x.

    A True answer certifies proximity to the amoeba at this resolution; a
    False answer depends on the angle resolution.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    grid = _angle_grid(n - 1, angles)
    for j in range(n):
        sl = _Slicer(f, j)
        xo = np.delete(x, j)
        coeffs = sl.coefficients(np.exp(xo + 1j * grid))
        roots, degen = _roots.batched_roots(coeffs)
        if degen.any():
            warnings.warn(f"skipping {int(degen.sum())} degenerate slices along axis {j}")
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.log(np.abs(roots[~degen]))
        if np.any(np.abs(logs - x[j]) < tol):
            return True
    return False


AMOEBA, COMPLEMENT, UNKNOWN = 0, 1, 2


@dataclass
class AmoebaRaster:
    """Cell-centred sampling of a box in log space.

    ``status`` holds AMOEBA / COMPLEMENT / UNKNOWN per cell and ``labels``
    the order vector of every complement cell (zeros elsewhere).
    """

    box: tuple
    resolution: tuple
    centers: list
    status: np.ndarray
    labels: np.ndarray
    tol: float
    meta: dict = field(default_factory=dict)

    @property
    def dim(self):
        return len(self.box)

    def label_set(self):
        cells = self.labels[self.status == COMPLEMENT]
        return sorted({tuple(int(a) for a in row) for row in cells})

    def cell_center(self, index):
        return np.array([c[i] for c, i in zip(self.centers, index)])

    def consistency_conflicts(self):
        """Connected complement regions that carry more than one order label."""
        regions, count = ndimage.label(self.status == COMPLEMENT)
        conflicts = []
        for r in range(1, count + 1):
            found = {tuple(row) for row in self.labels[regions == r]}
            if len(found) > 1:
                conflicts.append(sorted(found))
        return conflicts


def raster(f, box, resolution=200, angles=64, tol=None, samples=4, seed=0, order_tol=None,
           chunk=4096):
    """Rasterize the amoeba of f over ``box`` and label complement cells by order."""
    n = f.nvars
    box = tuple((float(a), float(b)) for a, b in box)
    if len(box) != n:
        raise ValueError(f"box has {len(box)} axes, polynomial has {n} variables")
    res = (resolution,) * n if np.isscalar(resolution) else tuple(resolution)
    widths = [(b - a) / r for (a, b), r in zip(box, res)]
    centers = [a + (np.arange(r) + 0.5) * w for (a, _), r, w in zip(box, res, widths)]
    if tol is None:
        tol = 2 * max(widths)
    if order_tol is None:
        order_tol = tol / 2

    member = np.zeros(res, dtype=bool)
    grid = _angle_grid(n - 1, angles)
    for j in range(n):
        sl = _Slicer(f, j)
        others = [centers[i] for i in range(n) if i != j]
        pts = np.array(list(product(*others))) if others else np.zeros((1, 0))
        hits = np.zeros((len(pts), res[j]), dtype=bool)
        lo, w = box[j][0], widths[j]
        step = max(1, chunk // max(1, len(grid)))
        for s in range(0, len(pts), step):
            block = pts[s:s + step]
            z = np.exp(block[:, None, :] + 1j * grid[None]).reshape(len(block) * len(grid), n - 1)
            roots, degen = _roots.batched_roots(sl.coefficients(z))
            roots[degen] = np.nan
            with np.errstate(divide="ignore", invalid="ignore"):
                logs = np.log(np.abs(roots)).reshape(len(block), -1)
            first = np.ceil((logs - tol - lo) / w - 0.5)
            last = np.floor((logs + tol - lo) / w - 0.5)
            valid = np.isfinite(logs) & (last >= 0) & (first <= res[j] - 1)
            first = np.clip(np.nan_to_num(first), 0, res[j] - 1).astype(int)
            last = np.clip(np.nan_to_num(last), 0, res[j] - 1).astype(int)
            valid &= first <= last
            diff = np.zeros((len(block), res[j] + 1), dtype=int)
            rows = np.broadcast_to(np.arange(len(block))[:, None], logs.shape)
            np.add.at(diff, (rows[valid], first[valid]), 1)
            np.add.at(diff, (rows[valid], last[valid] + 1), -1)
            hits[s:s + step] = np.cumsum(diff[:, :-1], axis=1) > 0
        other_shape = tuple(res[i] for i in range(n) if i != j)
        member |= np.moveaxis(hits.reshape(other_shape + (res[j],)), -1, j)

    rng = np.random.default_rng(seed)
    all_angles = rng.uniform(0, TWO_PI, size=res + (samples, n))
    status = np.full(res, AMOEBA, dtype=np.int8)
    labels = np.zeros(res + (n,), dtype=int)
    idx = np.argwhere(~member)
    for s in range(0, len(idx), chunk):
        block = idx[s:s + chunk]
        X = np.stack([centers[i][block[:, i]] for i in range(n)], axis=1)
        ang = all_angles[tuple(block.T)]
        orders, ok = orders_batch(f, X, angles=ang, tol=order_tol)
        status[tuple(block.T)] = np.where(ok, COMPLEMENT, UNKNOWN)
        labels[tuple(block.T)] = np.where(ok[:, None], orders, 0)
    LOGGER.debug("raster: %d amoeba, %d complement, %d unknown cells",
                 (status == AMOEBA).sum(), (status == COMPLEMENT).sum(), (status == UNKNOWN).sum())
    return AmoebaRaster(box, res, centers, status, labels, tol,
                        meta={"angles": angles, "samples": samples, "seed": seed})


@dataclass
class ComplementComponent:
    order: tuple
    representative: tuple
    recession_cone: object
    support_cone: object
    bounded: bool
    cells: int = 0

    def to_json(self):
        return {"order": list(self.order),
                "representative": [float(a) for a in self.representative],
                "bounded": self.bounded,
                "support_cone": self.support_cone.to_json(),
                "recession_cone": self.recession_cone.to_json(),
                "cells": self.cells}


def make_component(np_, order, representative, cells=0):
    sup = sigma_p(np_, order)
    rec = recession_cone_of_order(np_, order)
    return ComplementComponent(tuple(int(a) for a in order),
                               tuple(float(a) for a in representative),
                               rec, sup, bounded=rec.is_zero, cells=cells)


def components(ras, np_, min_cells=1):
    """One component per order label, represented by its deepest cell."""
    points = set(np_.lattice_points())
    out = []
    for lab in ras.label_set():
        if lab not in points:
            raise NumericalFailure(f"order label {lab} lies outside the Newton polytope")
        mask = (ras.status == COMPLEMENT) & np.all(ras.labels == np.array(lab), axis=-1)
        count = int(mask.sum())
        if count < min_cells:
            continue
        # pad so the box edge counts as boundary and representatives stay inside
        depth = ndimage.distance_transform_edt(np.pad(mask, 1))[(slice(1, -1),) * mask.ndim]
        best = np.unravel_index(np.argmax(depth), depth.shape)
        out.append(make_component(np_, lab, ras.cell_center(best), cells=count))
    return out


def representative_for_vertex(f, np_, p, schedule=(0.25, 0.5, 1, 2, 4, 8, 16, 32), samples=8,
                              seed=0, tol=0.05):
    """A log point of order p found by marching along an interior recession direction."""
    p = tuple(p)
    if not np_.is_vertex(p):
        raise ValueError(f"{p} is not a vertex of the Newton polytope")
    direction = np.array(recession_cone_of_order(np_, p).interior_direction(), dtype=float)
    if not direction.any():
        raise ValueError(f"vertex {p} has a trivial recession cone")
    direction /= np.abs(direction).max()
    for t in schedule:
        x = t * direction
        try:
            if order_at(f, x, samples=samples, seed=seed, tol=tol) == p:
                return x
        except AmoebaProximityError:
            continue
    raise ScheduleExhausted(f"no point of order {p} found along {tuple(direction)}")
