"""Cone-supported Puiseux parametrizations of hypersurfaces F(x, y) = 0.

Over a complement component of the discriminant amoeba, a branch orbit of
size d becomes single valued after the substitution x_i = t_i^d. The branch
is followed continuously over a torus grid in t and its Laurent coefficients
are read off by a discrete Cauchy integral (an N-dimensional FFT). A Newton
(Hensel) lift on graded truncated series gives exact coefficients when the
branch is unramified and has a simple limit root.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from . import _roots
from .laurent import GaussianRational
from .monodromy import ContinuationError, FiberPolynomial, fiber_basepoint, monodromy
from .polyhedra import Cone

LOGGER = logging.getLogger(__name__)


class SeamMismatchError(RuntimeError):
    """The tracked branch does not close up on the grid: wrong d or wrong orbit."""


class HenselUnavailable(ValueError):
    pass


def weight_vector(cone):
    """Sum of the dual generators; strictly positive on a strongly convex cone minus 0."""
    s = [0] * cone.dim
    for g in cone.dual_generators:
        s = [a + b for a, b in zip(s, g)]
    return tuple(s)


@dataclass
class PuiseuxExpansion:
    """Truncated branch y = sum a_I t^I with x_i = t_i^d.

    Exponents I are integers in t; the corresponding x-exponent is I/d.
    """

    d: int
    coefficients: dict
    support_cone: Cone
    component_order: tuple = None
    branch_id: int = 0
    max_weight: float = None
    weight: tuple = None
    log_radius: tuple = None
    variables: tuple = None
    exact: dict = None
    stats: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.support_cone.dim

    def weight_of(self, exponent):
        return sum(a * b for a, b in zip(self.weight, exponent))

    def arrays(self):
        keys = sorted(self.coefficients)
        exps = np.array(keys, dtype=int).reshape(len(keys), self.dim)
        return exps, np.array([self.coefficients[k] for k in keys], dtype=complex)

    def evaluate(self, t):
        """Value of the truncated series at points t of shape (P, N)."""
        t = np.atleast_2d(np.asarray(t, dtype=complex))
        exps, coeffs = self.arrays()
        return np.prod(t[:, None, :] ** exps[None], axis=2) @ coeffs

    def recession_direction(self):
        """Unit-max-norm interior direction of the recession cone of the component."""
        w = np.array(self.weight if self.weight is not None else weight_vector(self.support_cone),
                     dtype=float)
        if not w.any():
            return np.zeros(self.dim)
        return -w / np.abs(w).max()

    def to_json(self):
        coeffs = []
        for key in sorted(self.coefficients):
            c = complex(self.coefficients[key])
            coeffs.append({"t_exp": list(key),
                           "x_exp": [str(Fraction(a, self.d)) for a in key],
                           "re": c.real, "im": c.imag})
        out = {"d": self.d,
               "order": list(self.component_order) if self.component_order is not None else None,
               "support_cone": self.support_cone.to_json(),
               "coefficients": coeffs,
               "residual": self.stats.get("residual"),
               "support_leak": self.stats.get("support_leak"),
               "branch_id": self.branch_id,
               "max_weight": self.max_weight,
               "weight": list(self.weight) if self.weight is not None else None,
               "log_radius": list(self.log_radius) if self.log_radius is not None else None,
               "vars": list(self.variables) if self.variables is not None else None}
        extra = {k: v for k, v in self.stats.items() if k not in ("residual", "support_leak")}
        if extra:
            out["stats"] = extra
        return out

    @classmethod
    def from_json(cls, data):
        cone = Cone.from_json(data["support_cone"])
        coeffs = {tuple(c["t_exp"]): complex(c["re"], c["im"]) for c in data["coefficients"]}
        stats = dict(data.get("stats", {}))
        stats["residual"] = data.get("residual")
        stats["support_leak"] = data.get("support_leak")
        return cls(d=int(data["d"]), coefficients=coeffs, support_cone=cone,
                   component_order=tuple(data["order"]) if data.get("order") is not None else None,
                   branch_id=data.get("branch_id", 0), max_weight=data.get("max_weight"),
                   weight=tuple(data["weight"]) if data.get("weight") is not None
                   else weight_vector(cone),
                   log_radius=tuple(data["log_radius"]) if data.get("log_radius") else None,
                   variables=tuple(data["vars"]) if data.get("vars") else None,
                   stats=stats)


# -- branch tracking on the t-torus -------------------------------------------

def _track_step(fp, log_radius, ang_from, ang_to, y, max_doublings=14):
    """Continue values y (B,) from base angles ang_from (B, N) to ang_to (B, N)."""
    for level in range(max_doublings + 1):
        n = 1 << level
        cur = y
        ok = True
        for s in range(1, n + 1):
            ang = ang_from + (s / n) * (ang_to - ang_from)
            z = np.exp(log_radius + 1j * ang)
            r = fp.roots(z, polish=False)
            dist = np.abs(r - cur[:, None])
            dist = np.where(np.isfinite(dist), dist, np.inf)
            idx = np.argmin(dist, axis=1)
            best = dist[np.arange(len(cur)), idx]
            gap = _roots.min_gap(np.where(np.isfinite(r), r, 1e300))
            if not np.all(best < 0.5 * gap):
                ok = False
                break
            cur = r[np.arange(len(cur)), idx]
        if ok:
            return cur
    raise ContinuationError("branch tracking failed: roots too close along the grid path")


def track_branch_grid(F, log_radius, d, grid, start):
    """Values of the branch through ``start`` on the t-grid exp(log_radius/d + 2 pi i k/G).

    Returns (values of shape (G,)*N, seam error relative to the branch scale).
    """
    fp = F if isinstance(F, FiberPolynomial) else FiberPolynomial(F)
    n = fp.nbase
    log_radius = np.asarray(log_radius, dtype=float)
    step = 2 * np.pi * d / grid
    values = np.array([complex(start)])
    seam = 0.0
    for m in range(n):
        b = values.size
        base = np.zeros((b, n))
        if m:
            idx = np.array(list(product(range(grid), repeat=m)))
            base[:, :m] = idx * step
        out = np.empty((b, grid), dtype=complex)
        y = values.reshape(-1)
        out[:, 0] = y
        for k in range(grid):
            a0 = base.copy()
            a0[:, m] = k * step
            a1 = base.copy()
            a1[:, m] = (k + 1) * step
            y = _track_step(fp, log_radius, a0, a1, y)
            if k + 1 < grid:
                out[:, k + 1] = y
        scale = max(1.0, float(np.abs(out).max()))
        seam = max(seam, float(np.abs(y - out[:, 0]).max()) / scale)
        values = out.reshape((grid,) * (m + 1))
    # polish every node against F itself
    nodes = np.array(list(product(range(grid), repeat=n))) * step
    z = np.exp(log_radius + 1j * nodes)
    coeffs = fp.coefficients(z)
    flat = _roots.polish(coeffs, values.reshape(-1, 1), iterations=2)[:, 0]
    return flat.reshape((grid,) * n), seam


def default_window(grid, n):
    half = (grid - 1) // 2
    return list(product(range(-half, half + 1), repeat=n))


def extract_expansion(F, support_cone, d, log_radius, start, grid=128, window=None,
                      max_weight=None, drop_tol=1e-10, seam_tol=1e-8, component_order=None,
                      branch_id=0, variables=None):
    """Laurent coefficients of the branch through ``start`` over exp(log_radius).

    ``start`` is the branch value at the base point exp(log_radius) (angles 0).
    Coefficients are kept on ``window`` (default: the Nyquist box of the grid)
    intersected with weight <= max_weight in the grading dual to the support cone.
    """
    fp = F if isinstance(F, FiberPolynomial) else FiberPolynomial(F)
    n = fp.nbase
    log_radius = np.asarray(log_radius, dtype=float)
    rho = log_radius / d
    values, seam = track_branch_grid(fp, log_radius, d, grid, start)
    if seam > seam_tol:
        raise SeamMismatchError(f"branch does not close on the grid (seam error {seam:.2e}); "
                                f"d={d} does not match the orbit")
    spectrum = np.fft.fftn(values) / grid ** n
    w = weight_vector(support_cone)
    if window is None:
        window = default_window(grid, n)
    window = [tuple(int(a) for a in I) for I in window]
    if max(max(abs(a) for a in I) for I in window) * 2 + 1 > grid:
        raise ValueError("window violates the Nyquist bound for this grid")
    if max_weight is not None:
        if any(w):
            window = [I for I in window if np.dot(w, I) <= max_weight]
        else:
            window = [I for I in window if max(abs(a) for a in I) <= max_weight]
    idx = np.array(window) % grid
    scaled = spectrum[tuple(idx.T)]
    raw = scaled * np.exp(-np.array(window) @ rho)
    inside = np.array([support_cone.contains_float(I, tol=0.0) for I in window])
    top = np.abs(raw).max()
    leak = float(np.abs(raw[~inside]).max() / top) if (~inside).any() else 0.0
    keep = np.abs(raw) > drop_tol * top
    coeffs = {I: complex(a) for I, a, k in zip(window, raw, keep) if k}

    z = np.exp(log_radius + 1j * np.array(list(product(range(grid), repeat=n))) * 2 * np.pi * d / grid)
    node_residual = float(np.abs(fp.evaluate(z, values.reshape(-1))).max() / fp.scale)
    stats = {"seam_error": seam, "support_leak": leak, "node_residual": node_residual,
             "grid": grid, "window_size": len(window)}
    return PuiseuxExpansion(d=d, coefficients=coeffs, support_cone=support_cone,
                            component_order=component_order, branch_id=branch_id,
                            max_weight=max_weight, weight=w,
                            log_radius=tuple(float(a) for a in log_radius),
                            variables=variables, stats=stats)


@dataclass
class SupportReport:
    max_outside: float
    offending: list
    passed: bool
    apex: tuple = None


def apex_of(e, tol=1e-8):
    """Lowest-weight exponent among coefficients above tol relative to the largest."""
    top = max(abs(c) for c in e.coefficients.values())
    sig = [I for I, c in e.coefficients.items() if abs(c) > tol * top]
    w = e.weight if e.weight is not None else weight_vector(e.support_cone)
    return min(sig, key=lambda I: (sum(a * b for a, b in zip(w, I)), I))


def check_support(e, tol=1e-8, cone=None, translate=False):
    """Largest coefficient outside the cone relative to the largest coefficient overall.

    With ``translate`` the cone is moved to the lowest-weight significant
    exponent first, testing containment in apex + cone.
    """
    cone = cone if cone is not None else e.support_cone
    if not e.coefficients:
        return SupportReport(0.0, [], True)
    apex = apex_of(e, tol) if translate else (0,) * cone.dim
    top = max(abs(c) for c in e.coefficients.values())
    outside = []
    for I, c in e.coefficients.items():
        shifted = tuple(a - b for a, b in zip(I, apex))
        if not cone.contains_float(shifted, tol=0.0):
            outside.append((I, abs(c) / top))
    worst = max((r for _, r in outside), default=0.0)
    offending = sorted([I for I, r in outside if r > tol])
    return SupportReport(float(worst), offending, worst <= tol, tuple(apex))


def sample_points(e, count=64, depth=0.0, seed=0):
    """Random t-points on the torus over log_radius + depth * (interior recession direction)."""
    rng = np.random.default_rng(seed)
    x = np.asarray(e.log_radius, dtype=float) + depth * e.recession_direction()
    angles = rng.uniform(0, 2 * np.pi, size=(count, e.dim))
    return np.exp(x / e.d + 1j * angles)


def verify_residual(F, e, t):
    """max |F(t^d, y(t))| over the sample points, relative to F's coefficient scale."""
    fp = F if isinstance(F, FiberPolynomial) else FiberPolynomial(F)
    t = np.atleast_2d(np.asarray(t, dtype=complex))
    y = e.evaluate(t)
    return float(np.abs(fp.evaluate(t ** e.d, y)).max() / fp.scale)


def twist(e, root_exponents):
    """Coefficients of the branch t -> y(zeta t) with zeta_i = exp(2 pi i k_i / d)."""
    k = np.asarray(root_exponents)
    return {I: c * np.exp(2j * np.pi * float(np.dot(k, I)) / e.d) for I, c in e.coefficients.items()}


def extract_orbits(F, component, mono, grid=128, max_weight=None, **kwargs):
    """One expansion per branch orbit of a monodromy computation."""
    bp = mono.basepoint
    out = []
    for b, (orbit, d) in enumerate(zip(mono.orbits, mono.d_per_orbit)):
        e = extract_expansion(F, component.support_cone, d, bp.log_radius, bp.roots[orbit[0]],
                              grid=grid, max_weight=max_weight,
                              component_order=component.order, branch_id=b, **kwargs)
        out.append(e)
    return out


def _coefficient_change(e1, e2):
    top = max(abs(c) for c in e1.coefficients.values())
    keys = set(e1.coefficients) | set(e2.coefficients)
    return max(abs(e1.coefficients.get(k, 0) - e2.coefficients.get(k, 0)) for k in keys) / top


def solve_component(F, component, support_cone=None, grid=128, max_weight=None,
                    depths=(0.0, 0.5, 1.0, 2.0, -0.2, -0.4), steps=256, agree_tol=1e-9,
                    residual_depth=2.0, residual_samples=64, seed=0, variables=None):
    """Monodromy plus extraction, marching deeper until the grid-doubling test passes.

    Returns (monodromy result, expansions, log radius used).
    """
    cone = support_cone if support_cone is not None else component.support_cone
    rep = np.asarray(component.representative, dtype=float)
    w = np.array(weight_vector(cone), dtype=float)
    direction = -w / np.abs(w).max() if w.any() else np.zeros_like(rep)
    if not direction.any():
        depths = depths[:1]
    last_error = None
    best = None
    for depth in depths:
        x = rep + depth * direction
        try:
            mono = monodromy(F, x, steps=steps)
            exps, change = [], 0.0
            for b, (orbit, d) in enumerate(zip(mono.orbits, mono.d_per_orbit)):
                start = mono.basepoint.roots[orbit[0]]
                kw = dict(component_order=component.order, branch_id=b, variables=variables)
                e = extract_expansion(F, cone, d, x, start, grid=grid, max_weight=max_weight, **kw)
                e2 = extract_expansion(F, cone, d, x, start, grid=2 * grid, max_weight=max_weight,
                                       window=default_window(grid, len(x)), **kw)
                c = _coefficient_change(e, e2)
                e.stats["grid_refinement_change"] = c
                change = max(change, c)
                exps.append(e)
        except (ContinuationError, SeamMismatchError, RuntimeError) as exc:
            last_error = exc
            LOGGER.info("depth %.2f rejected: %s", depth, exc)
            continue
        if best is None or change < best[3]:
            best = (mono, exps, x, change)
        if change <= agree_tol:
            break
    if best is None:
        raise RuntimeError(f"no usable radius found: {last_error}")
    mono, exps, x, change = best
    for e in exps:
        shifted = check_support(e, cone=cone, translate=True)
        e.stats["support_leak_translated"] = shifted.max_outside
        e.stats["apex"] = list(shifted.apex)
        pts = sample_points(e, residual_samples, depth=residual_depth if direction.any() else 0.0,
                            seed=seed)
        e.stats["residual"] = verify_residual(F, e, pts)
        e.stats["residual_depth"] = residual_depth if direction.any() else 0.0
        # empirical boundedness: |y| should not grow as we move deeper into the component
        sizes = [float(np.abs(e.evaluate(sample_points(e, residual_samples, depth=s, seed=seed))).max())
                 for s in (0.0, residual_depth, 2 * residual_depth)]
        e.stats["max_abs_by_depth"] = sizes
        e.stats["bounded_on_samples"] = bool(sizes[-1] <= sizes[0] * (1 + 1e-6))
    return mono, exps, tuple(float(a) for a in x)


# -- exact Newton lifting on graded series ----------------------------------------

class _GradedSeries:
    """Truncated multivariate series arithmetic keyed by integer exponents."""

    def __init__(self, weight, bound):
        self.w = weight
        self.bound = bound

    def wt(self, I):
        return sum(a * b for a, b in zip(self.w, I))

    def add(self, a, b, sign=1):
        out = dict(a)
        for k, v in b.items():
            s = out.get(k, 0) + sign * v
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        return out

    def mul(self, a, b):
        out = {}
        bw = sorted(((self.wt(k), k, v) for k, v in b.items()), key=lambda t: t[0])
        for k1, v1 in a.items():
            w1 = self.wt(k1)
            for w2, k2, v2 in bw:
                if w1 + w2 > self.bound:
                    break
                k = tuple(x + y for x, y in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return {k: v for k, v in out.items() if v != 0}

    def inverse(self, s):
        c0 = s.get(tuple(0 for _ in self.w))
        if not c0:
            raise HenselUnavailable("series has no invertible constant term")
        zero = tuple(0 for _ in self.w)
        rest = [(k, v) for k, v in s.items() if k != zero]
        inv0 = 1 / c0 if not isinstance(c0, int) else Fraction(1, c0)
        # exponents reachable from the support of s within the weight bound
        reach = {zero}
        frontier = [zero]
        while frontier:
            nxt = []
            for a in frontier:
                for k, _ in rest:
                    b = tuple(x + y for x, y in zip(a, k))
                    if b not in reach and self.wt(b) <= self.bound:
                        reach.add(b)
                        nxt.append(b)
            frontier = nxt
        inv = {zero: inv0}
        for I in sorted(reach, key=self.wt):
            if I == zero:
                continue
            acc = 0
            for k, v in rest:
                J = tuple(x - y for x, y in zip(I, k))
                if J in inv:
                    acc = acc + v * inv[J]
            if acc != 0:
                inv[I] = -inv0 * acc
        return inv

    def horner(self, coeffs, y):
        acc = dict(coeffs[-1])
        for c in reversed(coeffs[:-1]):
            acc = self.add(self.mul(acc, y), c)
        return acc


def hensel_lift(F, y0, weight, order, support_cone=None, component_order=None, var=-1,
                max_iterations=64):
    """Exact series root y(x) with y(0) = y0 via Newton iteration on graded truncations.

    ``weight`` grades the base exponents; every nonconstant base exponent of F
    must have positive weight so each weight level is finite. Terms up to
    weight ``order`` are returned exactly.
    """
    n = F.nvars - 1
    var %= F.nvars
    parts = F.coefficients_in(var)
    k = max(parts)
    if min(parts) < 0 or k < 1:
        raise HenselUnavailable("F must be a polynomial of positive degree in the fiber variable")
    zero = (0,) * n
    weight = tuple(int(a) for a in weight)
    coeffs = [dict(parts[i].terms) if i in parts else {} for i in range(k + 1)]
    for c in coeffs:
        for a in c:
            wa = sum(p * q for p, q in zip(weight, a))
            if wa < 0 or (wa == 0 and a != zero):
                raise HenselUnavailable(f"base exponent {a} is not positively graded by {weight}")
    f0 = [c.get(zero, 0) for c in coeffs]
    val = sum(f0[i] * y0 ** i for i in range(k + 1))
    der = sum(i * f0[i] * y0 ** (i - 1) for i in range(1, k + 1))
    if val != 0:
        raise HenselUnavailable(f"{y0} is not a root of the limit polynomial")
    if der == 0:
        raise HenselUnavailable("limit root is not simple; use numeric extraction")
    ring = _GradedSeries(weight, order)
    dcoeffs = [{a: v * i for a, v in coeffs[i].items()} for i in range(1, k + 1)]
    y = {zero: y0}
    for _ in range(max_iterations):
        fy = ring.horner(coeffs, y)
        if not fy:
            break
        dfy = ring.horner(dcoeffs, y)
        y = ring.add(y, ring.mul(fy, ring.inverse(dfy)), sign=-1)
    else:
        raise HenselUnavailable("Newton iteration did not terminate")
    y = {I: c for I, c in y.items() if c != 0}
    cone = support_cone if support_cone is not None else Cone.orthant(n)
    return PuiseuxExpansion(d=1, coefficients={I: complex(c) for I, c in y.items()},
                            support_cone=cone, component_order=component_order,
                            max_weight=order, weight=weight, exact=y,
                            variables=F.variables[:var] + F.variables[var + 1:])


# -- closed-form oracle for the square root of x + y - 1 ---------------------------

def binom(a, k):
    """Generalized binomial coefficient a choose k for rational a."""
    a = Fraction(a)
    out = Fraction(1)
    for i in range(k):
        out = out * (a - i) / (i + 1)
    return out


def binomial_oracle(k_max, j_max, variant):
    """Exact coefficients of the three square-root expansions of x + y - 1.

    Returns {x-exponent (tuple of Fractions): coefficient}. ``variant`` is
    "phi1" (|x| large), "phi2" (|y| large) or "phi3" (|x|, |y| small).
    """
    half = Fraction(1, 2)
    out = {}
    if variant in ("phi1", "phi2"):
        for k in range(k_max + 1):
            for j in range(j_max + 1):
                c = binom(half, k) * binom(half - k, j) * (-1) ** j
                e = (half - k - j, Fraction(k))
                out[e if variant == "phi1" else e[::-1]] = c
    elif variant == "phi3":
        for k in range(k_max + 1):
            # (-1)^(1/2 - k) = i * (-1)^k on the principal branch
            lead = GaussianRational(0, binom(half, k) * (-1) ** k)
            for j in range(min(k, j_max) + 1):
                c = lead * binom(k, j)
                e = (Fraction(j), Fraction(k - j))
                out[e] = out.get(e, 0) + c
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return out


def oracle_in_t(table, d):
    """Re-key an oracle table by integer t-exponents d * (x-exponent)."""
    out = {}
    for e, c in table.items():
        key = tuple(int(a * d) for a in e)
        if any(a * d != int(a * d) for a in e):
            raise ValueError(f"exponent {e} is not in (1/{d})Z")
        out[key] = complex(c)
    return out
