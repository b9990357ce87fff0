"""Sparse multivariate polynomials over an exact field.

A :class:`Poly` is an immutable map from exponent tuples to nonzero
coefficients, tied to a :class:`PolyRing` (variable names plus a field
descriptor).  Terms print in graded reverse lexicographic order with
``x0 > x1 > ... > xN``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import comb
from typing import Iterable, Iterator, Sequence

from .exactnum import QQ, CycNum, ModP, field_of, rat, rat_str
from . import linalg

ExpVec = tuple  # tuple of non-negative ints, one per variable


def grevlex_key(e: ExpVec):
    """Sort key; a larger key is a larger monomial."""
    return (sum(e), tuple(-v for v in reversed(e)))


def monomials(nvars: int, degree: int) -> list[ExpVec]:
    """All exponent vectors of the given total degree, in descending grevlex order."""
    out: list[ExpVec] = []

    def rec(prefix, left, k):
        if k == nvars - 1:
            out.append(prefix + (left,))
            return
        for v in range(left, -1, -1):
            rec(prefix + (v,), left - v, k + 1)

    if nvars == 0:
        return [()] if degree == 0 else []
    rec((), degree, 0)
    out.sort(key=grevlex_key, reverse=True)
    return out


class PolyRing:
    """Variable names and coefficient field for a family of polynomials."""

    def __init__(self, names: Sequence[str], field=QQ):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.names = names
        self.field = field
        self._index = {v: i for i, v in enumerate(names)}

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown variable {name!r}") from None

    def gens(self) -> tuple[Poly, ...]:
        return tuple(self.var(i) for i in range(self.nvars))

    def var(self, i: int | str) -> Poly:
        if isinstance(i, str):
            i = self.index(i)
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): self.field.one})

    def const(self, c) -> Poly:
        c = self.field(c)
        return Poly(self, {(0,) * self.nvars: c} if c else {})

    def zero(self) -> Poly:
        return Poly(self, {})

    def monomial(self, e: ExpVec, c=1) -> Poly:
        c = self.field(c)
        return Poly(self, {tuple(e): c} if c else {})

    def parse(self, text: str) -> Poly:
        return parse_poly(text, self)

    def with_field(self, field) -> PolyRing:
        return PolyRing(self.names, field)

    def __eq__(self, other):
        return (isinstance(other, PolyRing) and self.names == other.names
                and self.field == other.field)

    def __hash__(self):
        return hash((self.names, self.field))

    def __repr__(self):
        return f"PolyRing({','.join(self.names)} over {self.field!r})"


def default_names(N: int) -> tuple[str, ...]:
    """x, y, z (P^2) and x, y, z, w (P^3); x0..xN otherwise."""
    if N == 2:
        return ("x", "y", "z")
    if N == 3:
        return ("x", "y", "z", "w")
    return tuple(f"x{i}" for i in range(N + 1))


class Poly:
    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict | None = None):
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", {e: c for e, c in (terms or {}).items() if c})

    @classmethod
    def _raw(cls, ring, terms):
        p = object.__new__(cls)
        object.__setattr__(p, "ring", ring)
        object.__setattr__(p, "terms", terms)
        return p

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    def __reduce__(self):
        return (Poly, (self.ring, self.terms))

    # structure
    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def sorted_terms(self) -> list[tuple[ExpVec, object]]:
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def coefficient_of(self, m: ExpVec):
        return self.terms.get(tuple(m), self.ring.field.zero)

    def _check(self, other: Poly):
        if other.ring.names != self.ring.names:
            raise ValueError("ring mismatch")

    def _lift(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, CycNum, ModP)):
            return self.ring.const(other)
        return None

    # arithmetic
    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in o.terms.items():
            v = terms.get(e)
            v = c if v is None else v + c
            if v:
                terms[e] = v
            else:
                terms.pop(e, None)
        return Poly._raw(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycNum, ModP)):
            return self.scale(other)
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = terms.get(e)
                terms[e] = c1 * c2 if v is None else v + c1 * c2
        return Poly(self.ring, terms)

    __rmul__ = __mul__

    def scale(self, c) -> Poly:
        if not c:
            return Poly._raw(self.ring, {})
        return Poly(self.ring, {e: v * c for e, v in self.terms.items()})

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise ValueError("negative polynomial power")
        result = self.ring.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring.names == other.ring.names and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ring.names, frozenset(self.terms.items())))

    # calculus and restriction
    def partial_derivative(self, var: int) -> Poly:
        if not 0 <= var < self.ring.nvars:
            raise IndexError("variable index out of range")
        terms = {}
        for e, c in self.terms.items():
            k = e[var]
            if k:
                ne = e[:var] + (k - 1,) + e[var + 1:]
                terms[ne] = c * k
        return Poly(self.ring, terms)

    def set_var_zero(self, var: int) -> Poly:
        """Image modulo the ideal (x_var)."""
        return Poly._raw(self.ring, {e: c for e, c in self.terms.items() if not e[var]})

    def evaluate(self, point: Sequence):
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x ** k
            total = total + t
        return total

    def substitute_linear(self, points: Sequence[Sequence], names: Sequence[str] | None = None) -> Poly:
        return substitute_linear(self, points, names)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)})"


# -- printing -------------------------------------------------------------------

def _format_coeff(c) -> str:
    if isinstance(c, (int, Fraction)):
        return rat_str(c)
    return f"({c})"


def format_poly(p: Poly) -> str:
    """Canonical text: grevlex order, integer or p/q coefficients, explicit ``*``."""
    if not p.terms:
        return "0"
    pieces = []
    for e, c in p.sorted_terms():
        mono = "*".join(
            (name if k == 1 else f"{name}^{k}")
            for name, k in zip(p.ring.names, e) if k)
        negative = isinstance(c, (int, Fraction)) and c < 0
        mag = -c if negative else c
        if not mono:
            body = _format_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_coeff(mag)}*{mono}"
        pieces.append(("-" if negative else "+", body))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


# -- parsing --------------------------------------------------------------------

class PolySyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1):
            toks.append(("int", m.group(1), m.start(1)))
        elif m.group(2):
            toks.append(("name", m.group(2), m.start(2)))
        elif m.group(3):
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise PolySyntaxError(f"unexpected character {ch!r}", m.start(3))
            toks.append(("op", ch, m.start(3)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ring: PolyRing):
        self.toks = _tokenize(text)
        self.i = 0
        self.ring = ring

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise PolySyntaxError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def expr(self) -> Poly:
        acc = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> Poly:
        acc = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                acc = acc * rhs
                continue
            if rhs.degree() != 0:
                raise PolySyntaxError("division only by a nonzero constant", pos)
            c = rhs.terms[(0,) * self.ring.nvars]
            inv = rat(Fraction(1) / c) if isinstance(c, (int, Fraction)) else c.inverse()
            acc = acc.scale(inv)
        return acc

    def unary(self) -> Poly:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("-", "+"):
            self.take()
            inner = self.unary()
            return -inner if tok[1] == "-" else inner
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.peek()
            if tok[0] != "int":
                raise PolySyntaxError("exponent must be a non-negative integer", tok[2])
            self.take()
            base = base ** int(tok[1])
        return base

    def atom(self) -> Poly:
        kind, value, pos = self.peek()
        if kind == "int":
            self.take()
            return self.ring.const(int(value))
        if kind == "name":
            self.take()
            if value not in self.ring.names:
                raise PolySyntaxError(f"unknown variable {value!r}", pos)
            return self.ring.var(value)
        if value == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        raise PolySyntaxError(f"unexpected {value or 'end of input'!r}", pos)


def parse_poly(text: str, ring: PolyRing) -> Poly:
    """Parse ``text`` (integers, variables, ``+ - * / ^``, parentheses) and expand.

    ``/`` is accepted only with a constant divisor so canonical ``p/q``
    coefficients round-trip.
    """
    parser = _Parser(text, ring)
    p = parser.expr()
    kind, value, pos = parser.peek()
    if kind != "end":
        raise PolySyntaxError(f"unexpected {value!r}", pos)
    return p


# -- substitution -----------------------------------------------------------------

def substitute_linear(p: Poly, points: Sequence[Sequence], names: Sequence[str] | None = None) -> Poly:
    """Evaluate ``p`` at ``s1*P1 + ... + sk*Pk`` and expand in the parameters.

    The result lives in a ring with variables ``s1..sk`` over the field of
    the point coordinates.
    """
    return Substitution(points, p.ring, names)(p)


class Substitution:
    """Restriction map to the parametrised flat ``s1*P1 + ... + sk*Pk``.

    Powers of the coordinate linear forms are cached, so applying one
    instance to many polynomials is cheap.
    """

    def __init__(self, points: Sequence[Sequence], source: PolyRing | int,
                 names: Sequence[str] | None = None):
        nv = source if isinstance(source, int) else source.nvars
        k = len(points)
        if k < 1:
            raise ValueError("need at least one point")
        if any(len(pt) != nv for pt in points):
            raise ValueError("point dimension does not match ring")
        if linalg.rank([list(pt) for pt in points]) < k:
            raise ValueError("dependent points")
        field = field_of(v for pt in points for v in pt)
        if field == QQ and not isinstance(source, int):
            field = source.field
        self.k = k
        self.ring = PolyRing(tuple(names) if names else tuple(f"s{i + 1}" for i in range(k)), field)
        self.forms = []
        for i in range(nv):
            form = {}
            for j in range(k):
                c = points[j][i]
                if c:
                    e = [0] * k
                    e[j] = 1
                    form[tuple(e)] = c
            self.forms.append(form)
        self._cache: dict = {}

    def power(self, i: int, e: int) -> dict:
        key = (i, e)
        res = self._cache.get(key)
        if res is not None:
            return res
        form, k = self.forms[i], self.k
        if e == 0:
            res = {(0,) * k: 1}
        elif len(form) == 1:
            (m, c), = form.items()
            res = {tuple(v * e for v in m): c ** e}
        elif len(form) == 2:
            (m1, c1), (m2, c2) = form.items()
            res = {}
            for a in range(e + 1):
                mono = tuple(x * a + y * (e - a) for x, y in zip(m1, m2))
                res[mono] = comb(e, a) * (c1 ** a) * (c2 ** (e - a))
        else:
            res = _mul(self.power(i, e - 1), form)
        self._cache[key] = res
        return res

    def monomial(self, e: ExpVec) -> dict:
        """Image of a monomial as a raw {param exponent: coefficient} map."""
        acc = {(0,) * self.k: 1}
        for i, ei in enumerate(e):
            if ei:
                if not self.forms[i]:
                    return {}
                acc = _mul(acc, self.power(i, ei))
        return acc

    def __call__(self, p: Poly) -> Poly:
        out: dict = {}
        for e, c in p.terms.items():
            for m, v in self.monomial(e).items():
                v = v * c
                cur = out.get(m)
                out[m] = v if cur is None else cur + v
        field = self.ring.field
        if field != QQ:
            out = {m: v if not isinstance(v, (int, Fraction)) else field(v) for m, v in out.items()}
        return Poly(self.ring, out)

    def is_zero_on(self, p: Poly) -> bool:
        return not self(p)


def _mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            v = c1 * c2
            cur = out.get(m)
            out[m] = v if cur is None else cur + v
    return out


def derivative(p: Poly, multi_index: Sequence[int]) -> Poly:
    """Iterated partial derivative, ``multi_index[i]`` times in variable i."""
    for var, times in enumerate(multi_index):
        for _ in range(times):
            p = p.partial_derivative(var)
    return p


def multi_indices(nvars: int, order: int) -> Iterator[tuple[int, ...]]:
    """Multi-indices of the given total order, descending grevlex."""
    yield from monomials(nvars, order)


def product(polys: Iterable[Poly], ring: PolyRing | None = None) -> Poly:
    out = None
    for q in polys:
        out = q if out is None else out * q
    if out is None:
        if ring is None:
            raise ValueError("empty product needs a ring")
        return ring.const(1)
    return out


def to_vector(p: Poly, basis: Sequence[ExpVec]) -> list:
    index = {m: i for i, m in enumerate(basis)}
    v = [0] * len(basis)
    for e, c in p.terms.items():
        v[index[e]] = c
    return v


def number_of_monomials(nvars: int, degree: int) -> int:
    return comb(degree + nvars - 1, nvars - 1)


def rational_coefficients(p: Poly) -> Poly:
    """Coerce cyclotomic coefficients that happen to be rational back to QQ."""
    terms = {}
    for e, c in p.terms.items():
        if isinstance(c, CycNum):
            c = c.to_rational()
        terms[e] = rat(c)
    return Poly(p.ring.with_field(QQ), terms)
