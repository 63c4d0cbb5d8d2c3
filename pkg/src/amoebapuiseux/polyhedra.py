"""Rational polyhedral cones and lattice polytopes with exact arithmetic.

Cones are stored by primitive integer generators. Duals are computed by
enumerating active sets of the inequality description {x : g.x >= 0}, which is
exact and fast for the small dimensions (N <= 4) this package works in.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product

from . import _exact

MAX_DIM = 4


class DimensionError(ValueError):
    pass


class NotRegularError(ValueError):
    pass


def _canonical(generators, dim):
    gens = set()
    for g in generators:
        g = tuple(g)
        if len(g) != dim:
            raise DimensionError(f"generator {g} does not have length {dim}")
        if any(g):
            gens.add(_exact.primitive(g))
    return tuple(sorted(gens))


@dataclass(frozen=True)
class Cone:
    """Finitely generated rational polyhedral cone in R^dim.

    An empty generator list denotes the zero cone {0}.
    """

    generators: tuple
    dim: int

    def __init__(self, generators, dim=None):
        generators = [tuple(g) for g in generators]
        if dim is None:
            if not generators:
                raise DimensionError("dim is required for the zero cone")
            dim = len(generators[0])
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "generators", _canonical(generators, dim))

    @classmethod
    def orthant(cls, dim, sign=1):
        return cls([tuple(sign * int(i == j) for j in range(dim)) for i in range(dim)], dim)

    @classmethod
    def whole_space(cls, dim):
        gens = []
        for i in range(dim):
            e = tuple(int(i == j) for j in range(dim))
            gens += [e, tuple(-a for a in e)]
        return cls(gens, dim)

    @cached_property
    def dual_generators(self):
        return dual_cone(self, max_dim=max(MAX_DIM, self.dim)).generators

    @cached_property
    def is_strongly_convex(self):
        return _exact.rank(list(self.dual_generators), self.dim) == self.dim

    @property
    def is_zero(self):
        return not self.generators

    def __neg__(self):
        return Cone([tuple(-a for a in g) for g in self.generators], self.dim)

    def __contains__(self, x):
        return cone_contains(self, x)

    def contains_float(self, x, tol=1e-9):
        """Floating-point membership with slack ``tol`` on each dual inequality."""
        return all(sum(w_i * x_i for w_i, x_i in zip(w, x)) >= -tol for w in self.dual_generators)

    def is_subset(self, other):
        return all(g in other for g in self.generators)

    def equivalent(self, other):
        """Set equality, independent of the generating sets used."""
        return self.dim == other.dim and self.is_subset(other) and other.is_subset(self)

    def interior_direction(self):
        """Sum of the generators; lies in the relative interior."""
        s = [0] * self.dim
        for g in self.generators:
            s = [a + b for a, b in zip(s, g)]
        return tuple(s)

    def linear_image(self, matrix):
        """Image of the cone under x -> matrix @ x."""
        return Cone([tuple(_exact.dot(row, g) for row in matrix) for g in self.generators], len(matrix))

    def lattice_points(self, bound):
        return [x for x in product(range(-bound, bound + 1), repeat=self.dim) if x in self]

    def to_json(self):
        return {"generators": [list(g) for g in self.generators], "dim": self.dim}

    @classmethod
    def from_json(cls, data):
        gens = [tuple(g) for g in data["generators"]]
        return cls(gens, data.get("dim", len(gens[0]) if gens else None))


def dual_cone(c, max_dim=MAX_DIM):
    """Generators of {x : x.u >= 0 for every generator u of ``c``}.

    The lineality part is returned as plus/minus a Z-basis of the orthogonal
    complement lattice, the pointed part as its extreme rays.
    """
    n = c.dim
    if n > max_dim:
        raise DimensionError(f"dual cone computation limited to N <= {max_dim}, got {n}")
    rows = list(c.generators)
    if not rows:
        return Cone.whole_space(n)
    lineality = _exact.integer_kernel(rows, n)
    r = n - len(lineality)
    rays = set()
    for active in combinations(rows, r - 1):
        ns = _exact.nullspace(list(active) + list(lineality), n)
        if len(ns) != 1:
            continue
        v = _exact.primitive(ns[0])
        vals = [_exact.dot(g, v) for g in rows]
        if all(a >= 0 for a in vals):
            rays.add(v)
        elif all(a <= 0 for a in vals):
            rays.add(tuple(-a for a in v))
    gens = list(rays)
    for l in lineality:
        gens += [tuple(l), tuple(-a for a in l)]
    return Cone(gens, n)


def dual_cone_with_lineality(c):
    """Dual of a regular cone of dimension s <= N, with the lineality given by a lattice basis."""
    if not is_regular(c):
        raise NotRegularError(f"cone {c.generators} is not regular; subdivide it first")
    return dual_cone(c)


def cone_contains(c, x):
    if len(x) != c.dim:
        raise DimensionError(f"point of length {len(x)} tested against cone in R^{c.dim}")
    x = [Fraction(a) for a in x]
    return all(_exact.dot(w, x) >= 0 for w in c.dual_generators)


def is_regular(c):
    """True iff the generators are part of a Z-basis of Z^N."""
    gens = list(c.generators)
    if not gens:
        return True
    if _exact.rank(gens, c.dim) < len(gens):
        return False
    return _exact.maximal_minor_gcd(gens) == 1


def extreme_rays(c):
    """Extreme rays of a strongly convex cone."""
    if not c.is_strongly_convex:
        raise ValueError("extreme rays requested for a cone with lineality")
    return dual_cone(Cone(c.dual_generators, c.dim), max_dim=max(MAX_DIM, c.dim)).generators


def subdivide_regular_2d(c):
    """Split a strongly convex cone in R^2 into regular cones."""
    if c.dim != 2:
        raise DimensionError("regular subdivision is only implemented in dimension 2")
    if not c.is_strongly_convex:
        raise ValueError("cannot subdivide a cone that contains a line")
    rays = extreme_rays(c)
    if len(rays) < 2:
        return [c]
    u, v = rays
    if u[0] * v[1] - u[1] * v[0] < 0:
        u, v = v, u
    pieces = []
    while True:
        n = u[0] * v[1] - u[1] * v[0]
        if n == 1:
            pieces.append(Cone([u, v]))
            return pieces
        # w0 with det(u, w0) = 1, then slide along u to the first lattice point inside
        _, s, t = _exact.ext_gcd(u[0], u[1])
        w0 = (-t, s)
        d0 = w0[0] * v[1] - w0[1] * v[0]
        k = -(d0 // n)
        w = (w0[0] + k * u[0], w0[1] + k * u[1])
        pieces.append(Cone([u, w]))
        u = w


@dataclass(frozen=True)
class LatticePolytope:
    """Convex hull of finitely many lattice points, described by its vertices."""

    vertices: tuple
    dim: int
    _facets: tuple = field(repr=False, compare=False)

    @classmethod
    def hull(cls, points):
        points = sorted({tuple(int(a) for a in p) for p in points})
        if not points:
            raise ValueError("empty point set")
        n = len(points[0])
        lifted = Cone([p + (1,) for p in points], n + 1)
        facets = dual_cone(lifted, max_dim=n + 1).generators
        verts = []
        for p in points:
            q = p + (1,)
            active = [w for w in facets if _exact.dot(w, q) == 0]
            if _exact.rank(active, n + 1) == n:
                verts.append(p)
        return cls(tuple(verts), n, facets)

    def __contains__(self, p):
        q = tuple(Fraction(a) for a in p) + (1,)
        return all(_exact.dot(w, q) >= 0 for w in self._facets)

    def lattice_points(self):
        lo = [min(v[i] for v in self.vertices) for i in range(self.dim)]
        hi = [max(v[i] for v in self.vertices) for i in range(self.dim)]
        return [p for p in product(*(range(a, b + 1) for a, b in zip(lo, hi))) if p in self]

    def is_vertex(self, p):
        return tuple(p) in self.vertices

    def to_json(self):
        return {"vertices": [list(v) for v in self.vertices]}

    @classmethod
    def from_json(cls, data):
        return cls.hull(data["vertices"])


def sigma_p(np_, p):
    """The cone R_+(NP - p) spanned by the polytope as seen from the lattice point p."""
    p = tuple(p)
    if p not in np_:
        raise ValueError(f"point {p} lies outside the polytope")
    gens = [tuple(v_i - p_i for v_i, p_i in zip(v, p)) for v in np_.vertices if tuple(v) != p]
    return Cone(gens, np_.dim)


def recession_cone_of_order(np_, p):
    """Recession cone of the amoeba complement component whose order is p."""
    return -dual_cone(sigma_p(np_, p), max_dim=max(MAX_DIM, np_.dim))
