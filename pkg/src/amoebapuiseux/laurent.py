"""Sparse Laurent polynomials: parsing, printing, monomial maps and resultants."""

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from . import _exact
from .polyhedra import LatticePolytope


class GaussianRational:
    """Exact element of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _lift(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Rational)):
            return GaussianRational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return complex(self) + other
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return complex(self) * other
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return complex(self) / other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, k):
        result = GaussianRational(1)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            result = result * base
        return result

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return complex(self) == other
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash(self.re) if self.im == 0 else hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"


I = GaussianRational(0, 1)


class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class LaurentPolynomial:
    """Finite sum of coefficient * monomial with integer (possibly negative) exponents.

    ``terms`` maps exponent tuples to nonzero coefficients. Coefficients may be
    ints/Fractions, :class:`GaussianRational` or Python complex floats.
    """

    terms: dict
    variables: tuple

    def __init__(self, terms, variables):
        variables = tuple(variables)
        clean = {}
        for e, c in terms.items():
            e = tuple(int(a) for a in e)
            if len(e) != len(variables):
                raise ValueError(f"exponent {e} does not match variables {variables}")
            if c != 0:
                clean[e] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "variables", variables)

    @classmethod
    def constant(cls, c, variables):
        return cls({(0,) * len(variables): c}, variables)

    @classmethod
    def monomial(cls, exponent, variables, coeff=1):
        return cls({tuple(exponent): coeff}, variables)

    @property
    def nvars(self):
        return len(self.variables)

    @property
    def support(self):
        return set(self.terms)

    def is_zero(self):
        return not self.terms

    def is_monomial(self):
        return len(self.terms) == 1

    def __eq__(self, other):
        return isinstance(other, LaurentPolynomial) and self.variables == other.variables \
            and self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    def _coerce(self, other):
        if isinstance(other, LaurentPolynomial):
            if other.variables != self.variables:
                raise ValueError("polynomials over different variables")
            return other
        return LaurentPolynomial.constant(other, self.variables)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return LaurentPolynomial(t, self.variables)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial({e: -c for e, c in self.terms.items()}, self.variables)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return LaurentPolynomial(t, self.variables)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            if not self.is_monomial():
                raise ValueError("negative power of a non-monomial")
            (e, c), = self.terms.items()
            inv = Fraction(1) / c if isinstance(c, (int, Rational)) else 1 / c
            return LaurentPolynomial({tuple(k * a for a in e): inv ** -k}, self.variables)
        result = LaurentPolynomial.constant(1, self.variables)
        for _ in range(k):
            result = result * self
        return result

    def derivative(self, i):
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                t[tuple(e2)] = c * e[i]
        return LaurentPolynomial(t, self.variables)

    def degree_range(self, i):
        powers = [e[i] for e in self.terms]
        return min(powers), max(powers)

    def coefficients_in(self, i):
        """Split into {power of variable i: polynomial in the remaining variables}."""
        rest = self.variables[:i] + self.variables[i + 1:]
        out = {}
        for e, c in self.terms.items():
            out.setdefault(e[i], {})[e[:i] + e[i + 1:]] = c
        return {k: LaurentPolynomial(v, rest) for k, v in out.items()}

    def coefficient_scale(self):
        return max((abs(complex(c)) for c in self.terms.values()), default=0.0)

    def map_coefficients(self, fn):
        return LaurentPolynomial({e: fn(c) for e, c in self.terms.items()}, self.variables)

    def to_complex(self):
        return self.map_coefficients(complex)

    def arrays(self):
        """(exponents int array (m, N), coefficients complex array (m,))."""
        exps = np.array(sorted(self.terms), dtype=int).reshape(len(self.terms), self.nvars)
        coeffs = np.array([complex(self.terms[tuple(e)]) for e in exps], dtype=complex)
        return exps, coeffs

    def __str__(self):
        return format_polynomial(self)

    def to_json(self):
        return {"vars": list(self.variables),
                "terms": [{"exp": list(e), "coeff": _coeff_to_json(self.terms[e])}
                          for e in sorted(self.terms)]}

    @classmethod
    def from_json(cls, data):
        return cls({tuple(t["exp"]): _coeff_from_json(t["coeff"]) for t in data["terms"]},
                   data["vars"])


def _frac_json(q):
    q = Fraction(q)
    return {"num": q.numerator, "den": q.denominator}


def _coeff_to_json(c):
    if isinstance(c, (int, Rational)):
        return _frac_json(c)
    if isinstance(c, GaussianRational):
        return {"re": _frac_json(c.re), "im": _frac_json(c.im)}
    c = complex(c)
    return {"re": c.real, "im": c.imag}


def _coeff_from_json(d):
    if "num" in d:
        return Fraction(d["num"], d["den"])
    if isinstance(d["re"], dict):
        return GaussianRational(Fraction(d["re"]["num"], d["re"]["den"]),
                                Fraction(d["im"]["num"], d["im"]["den"]))
    return complex(d["re"], d["im"])


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text[pos:]) - len(text[pos:].lstrip()) + pos
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            tokens.append(("op", op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, variables):
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = tuple(variables)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, op):
        kind, val, _ = self.peek()
        if kind == "op" and val == op:
            self.i += 1
            return True
        return False

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty polynomial", 0)
        f = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", pos)
        return f

    def expr(self):
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        f = self.term() * sign
        while True:
            if self.accept("+"):
                f = f + self.term()
            elif self.accept("-"):
                f = f - self.term()
            else:
                return f

    def term(self):
        f = self.factor()
        while True:
            if self.accept("*"):
                f = f * self.factor()
            elif self.accept("/"):
                kind, val, pos = self.take()
                if kind != "num":
                    raise ParseError("only numeric divisors are supported", pos)
                f = f * (Fraction(1) / Fraction(val))
            else:
                return f

    def factor(self):
        base = self.atom()
        if self.accept("^"):
            k = self.exponent()
            try:
                return base ** k
            except ValueError as exc:
                raise ParseError(str(exc), self.tokens[self.i - 1][2]) from None
        return base

    def exponent(self):
        paren = self.accept("(")
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        kind, val, pos = self.take()
        if kind != "num" or not val.isdigit():
            raise ParseError(f"non-integer exponent {val!r}", pos)
        if paren and not self.accept(")"):
            raise ParseError("missing ')'", self.peek()[2])
        return sign * int(val)

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return LaurentPolynomial.constant(Fraction(val), self.variables)
        if kind == "name":
            if val not in self.variables:
                raise ParseError(f"unknown variable {val!r}", pos)
            e = [0] * len(self.variables)
            e[self.variables.index(val)] = 1
            return LaurentPolynomial.monomial(e, self.variables)
        if kind == "op" and val == "(":
            f = self.expr()
            if not self.accept(")"):
                raise ParseError("missing ')'", self.peek()[2])
            return f
        raise ParseError(f"unexpected {val!r}" if val else "unexpected end of input", pos)


def _natural_key(name):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", name)]


def infer_variables(text):
    """Variable names in natural sort order (x1 < x2 < x10 < y)."""
    names = {tok[1] for tok in _tokenize(text) if tok[0] == "name"}
    return tuple(sorted(names, key=_natural_key))


def parse_polynomial(text, variables=None):
    if variables is None:
        variables = infer_variables(text)
    return _Parser(text, variables).parse()


def _format_coeff(c):
    if isinstance(c, (int, Rational)):
        return str(Fraction(c))
    if isinstance(c, GaussianRational):
        return f"({c.re}+{c.im}*I)"
    return f"({complex(c)!r})"


def format_polynomial(f):
    """Text form accepted by :func:`parse_polynomial` (for rational coefficients)."""
    if f.is_zero():
        return "0"
    parts = []
    for e in sorted(f.terms, key=lambda e: (-sum(e), tuple(-a for a in e))):
        c = f.terms[e]
        mono = "*".join(v if a == 1 else f"{v}^{a}" for v, a in zip(f.variables, e) if a)
        negative = isinstance(c, (int, Rational)) and c < 0
        mag = -c if negative else c
        if mono and mag == 1:
            body = mono
        else:
            body = _format_coeff(mag) + ("*" + mono if mono else "")
        if not parts:
            parts.append(("-" if negative else "") + body)
        else:
            parts.append(("- " if negative else "+ ") + body)
    return " ".join(parts)


def newton_polytope(f):
    if f.is_zero():
        raise ValueError("the zero polynomial has no Newton polytope")
    return LatticePolytope.hull(f.terms)


# -- monomial maps -------------------------------------------------------------

@dataclass(frozen=True)
class MonomialMap:
    """z -> (z^{u1}, ..., z^{uN}) where u_i are the columns of ``matrix``."""

    matrix: tuple
    determinant: int

    def __init__(self, matrix):
        matrix = tuple(tuple(int(a) for a in row) for row in matrix)
        d = int(_exact.det(matrix))
        if d == 0:
            raise ValueError("monomial map needs a nonsingular matrix")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "determinant", d)

    def apply_exponent(self, alpha):
        return tuple(_exact.dot(row, alpha) for row in self.matrix)

    def __call__(self, z):
        """Evaluate the map on complex points z of shape (..., N)."""
        z = np.asarray(z, dtype=complex)
        cols = np.array(self.matrix).T
        return np.stack([np.prod(z ** col, axis=-1) for col in cols], axis=-1)

    def compose(self, other):
        """Matrix of self after other, i.e. self.matrix @ other.matrix."""
        a, b = self.matrix, other.matrix
        n = len(a)
        return MonomialMap([[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
                            for i in range(n)])


@dataclass(frozen=True)
class RamificationMap:
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("ramification index must be positive")


def substitute_monomial(f, m):
    """f composed with the monomial map: exponent alpha becomes M alpha."""
    t = {}
    for e, c in f.terms.items():
        e2 = m.apply_exponent(e)
        t[e2] = t.get(e2, 0) + c
    return LaurentPolynomial(t, f.variables)


def ramify(f, r):
    d = r.d if isinstance(r, RamificationMap) else int(r)
    return LaurentPolynomial({tuple(d * a for a in e): c for e, c in f.terms.items()}, f.variables)


# -- resultants ----------------------------------------------------------------

def _determinant(matrix, zero):
    """Determinant of a square matrix over a commutative ring (Laplace by column subsets)."""
    n = len(matrix)
    layer = {0: zero + 1}
    for i in range(n):
        nxt = {}
        for mask, val in layer.items():
            for c in range(n):
                if mask >> c & 1:
                    continue
                entry = matrix[i][c]
                if entry == 0 or (isinstance(entry, LaurentPolynomial) and entry.is_zero()):
                    continue
                above = bin(mask >> (c + 1)).count("1")
                term = val * entry
                if above % 2:
                    term = -term
                key = mask | 1 << c
                nxt[key] = nxt[key] + term if key in nxt else term
        layer = nxt
    return layer.get((1 << n) - 1, zero)


def sylvester_matrix(p, q):
    """Sylvester matrix of two univariate coefficient lists given in descending order."""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + list(p) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(q) + [0] * (size - n - 1 - i))
    return rows


def discriminant_y(F, var=-1):
    """Res_y(F, dF/dy) as a Laurent polynomial in the remaining variables."""
    n = F.nvars
    var %= n
    rest = F.variables[:var] + F.variables[var + 1:]
    if F.is_zero():
        raise ValueError("zero polynomial")
    lo, k = F.degree_range(var)
    if lo < 0:
        raise ValueError(f"{F.variables[var]} appears with a negative exponent")
    if k == 0:
        raise ValueError(f"polynomial is constant in {F.variables[var]}")
    zero = LaurentPolynomial({}, rest)
    parts = F.coefficients_in(var)
    a = [parts.get(i, zero) for i in range(k + 1)]
    da = [a[i + 1] * (i + 1) for i in range(k)]
    mat = sylvester_matrix(a[::-1], da[::-1])
    mat = [[zero + e if not isinstance(e, LaurentPolynomial) else e for e in row] for row in mat]
    return _determinant(mat, zero)


def evaluate(f, z):
    """Evaluate f at complex points z of shape (..., N)."""
    z = np.asarray(z, dtype=complex)
    exps, coeffs = f.arrays()
    if z.shape[-1] != f.nvars:
        raise ValueError(f"expected points with {f.nvars} coordinates")
    neg = (exps < 0).any(axis=0)
    if np.any((z == 0) & neg):
        raise ValueError("zero coordinate where f has a negative exponent")
    mon = np.prod(z[..., None, :] ** exps, axis=-1)
    return mon @ coeffs
