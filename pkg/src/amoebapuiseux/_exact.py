"""Exact integer and rational linear algebra on tuples of small dimension."""

from fractions import Fraction
from itertools import combinations
from math import gcd


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def primitive(v):
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    v = [Fraction(a) for a in v]
    den = 1
    for a in v:
        den = den * a.denominator // gcd(den, a.denominator)
    ints = [int(a * den) for a in v]
    g = 0
    for a in ints:
        g = gcd(g, a)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(a // g for a in ints)


def rref(rows, ncols):
    """Reduced row echelon form over the rationals. Returns (rows, pivot columns)."""
    m = [[Fraction(a) for a in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [a / p for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows, ncols):
    if not rows:
        return 0
    return len(rref(rows, ncols)[1])


def nullspace(rows, ncols):
    """Rational basis of {x : r . x = 0 for r in rows}."""
    red, pivots = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def det(matrix):
    """Determinant of a square rational matrix by Gaussian elimination."""
    m = [[Fraction(a) for a in r] for r in matrix]
    n = len(m)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        result *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return sign * result


def maximal_minor_gcd(rows):
    """gcd of all k x k minors of a k x n integer matrix (product of its invariant factors)."""
    k = len(rows)
    n = len(rows[0])
    g = 0
    for cols in combinations(range(n), k):
        g = gcd(g, int(det([[r[c] for c in cols] for r in rows])))
        if g == 1:
            break
    return g


def integer_kernel(rows, ncols):
    """Z-basis of the lattice {x in Z^n : A x = 0} for an integer matrix A.

    Unimodular column reduction: A U is brought to column echelon form and the
    columns of U facing zero columns span the kernel lattice.
    """
    a = [list(map(int, r)) for r in rows]
    u = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def colop(dst, src, q):
        for r in a:
            r[dst] -= q * r[src]
        for r in u:
            r[dst] -= q * r[src]

    def swap(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in u:
            r[i], r[j] = r[j], r[i]

    pc = 0
    for row in range(len(a)):
        if pc == ncols:
            break
        while True:
            nz = [c for c in range(pc, ncols) if a[row][c] != 0]
            if not nz:
                break
            best = min(nz, key=lambda c: abs(a[row][c]))
            for c in nz:
                if c != best:
                    colop(c, best, a[row][c] // a[row][best])
            if all(a[row][c] == 0 for c in nz if c != best):
                swap(pc, best)
                pc += 1
                break
    return [tuple(u[i][c] for i in range(ncols)) for c in range(pc, ncols)]


def ext_gcd(a, b):
    """Return (g, s, t) with a*s + b*t = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0
