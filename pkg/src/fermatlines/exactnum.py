"""Exact scalars: rationals, cyclotomic fields and prime fields.

Rationals are :class:`fractions.Fraction` values, normalised to ``int`` when
integral so that integer-coefficient polynomials stay cheap.  Cyclotomic
numbers live in the power basis ``1, z, ..., z^(phi(n)-1)`` modulo the n-th
cyclotomic polynomial, which makes ``Q(z)`` a field with exact inversion.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational
from typing import Iterable, Sequence


def rat(x) -> int | Fraction:
    """Normalise an int/Fraction, returning an ``int`` when integral."""
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, Rational):
        return rat(Fraction(x.numerator, x.denominator))
    if isinstance(x, str):
        return rat(Fraction(x))
    raise TypeError(f"not a rational: {x!r}")


def rat_str(x) -> str:
    x = rat(x)
    if isinstance(x, int):
        return str(x)
    return f"{x.numerator}/{x.denominator}"


# -- cyclotomic polynomials -------------------------------------------------

def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials, coefficients low degree first."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        q, r = divmod(num[i + len(den) - 1], lead)
        if r:
            raise ArithmeticError("inexact polynomial division")
        out[i] = q
        if q:
            for j, c in enumerate(den):
                num[i + j] -= q * c
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, constant term first.

    >>> cyclotomic_poly(6)
    (1, -1, 1)
    """
    if n < 1:
        raise ValueError("cyclotomic_poly needs n >= 1")
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _poly_divexact(num, list(cyclotomic_poly(d)))
    return tuple(num)


def euler_phi(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Power-basis coordinates of z^k for 0 <= k < max(n, 2*phi - 1)."""
    phi_poly = cyclotomic_poly(n)
    phi = len(phi_poly) - 1
    rows = []
    cur = [1] + [0] * (phi - 1) if phi else []
    for _ in range(max(n, 2 * phi - 1)):
        rows.append(tuple(cur))
        # multiply by z and reduce with the monic relation
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * p for c, p in zip(cur, phi_poly[:-1])]
    return tuple(rows)


class CycNum:
    """Element of the n-th cyclotomic field in the power basis.

    Instances are immutable.  ``CycNum(n, (c,))`` with ``phi(n) == 1`` or
    coordinates ``(c, 0, ..., 0)`` compare and hash equal to the rational c.
    """

    __slots__ = ("order", "coords")

    def __init__(self, order: int, coords: Iterable = ()):
        phi = euler_phi(order)
        cs = [rat(c) for c in coords]
        if len(cs) > phi:
            raise ValueError("too many coordinates for the power basis")
        cs += [0] * (phi - len(cs))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coords", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("CycNum is immutable")

    def __reduce__(self):
        return (CycNum, (self.order, self.coords))

    # constructors
    @classmethod
    def zeta(cls, n: int, k: int = 1) -> CycNum:
        """The power z^k of the primitive root z = exp(2*pi*i/n)."""
        return cls(n, _power_table(n)[k % n])

    @classmethod
    def from_rational(cls, n: int, c) -> CycNum:
        return cls(n, (c,))

    # helpers
    def _coerce(self, other) -> CycNum | None:
        if isinstance(other, CycNum):
            if other.order != self.order:
                raise ValueError(
                    f"cyclotomic order mismatch: {self.order} vs {other.order}")
            return other
        if isinstance(other, (int, Fraction)):
            return CycNum(self.order, (other,))
        return None

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def to_rational(self):
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coords[0]

    def __bool__(self) -> bool:
        return any(self.coords)

    def __eq__(self, other) -> bool:
        if isinstance(other, CycNum):
            return self.order == other.order and self.coords == other.coords
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coords[0] == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.coords[0])
        return hash((self.order, self.coords))

    # arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycNum(self.order, [a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.order, [-a for a in self.coords])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycNum(self.order, [a - b for a, b in zip(self.coords, o.coords)])

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycNum(self.order, [a * other for a in self.coords])
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        phi = len(self.coords)
        prod = [0] * (2 * phi - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o.coords):
                    if b:
                        prod[i + j] += a * b
        table = _power_table(self.order)
        out = list(prod[:phi])
        for k in range(phi, len(prod)):
            c = prod[k]
            if c:
                for i, t in enumerate(table[k]):
                    if t:
                        out[i] += c * t
        return CycNum(self.order, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = CycNum(self.order, (1,))
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> CycNum:
        if not self:
            raise ZeroDivisionError("inverse of zero in cyclotomic field")
        phi = len(self.coords)
        # multiplication-by-self matrix: column j is self * z^j
        cols = []
        cur = self
        z = CycNum.zeta(self.order, 1)
        for _ in range(phi):
            cols.append(cur.coords)
            cur = cur * z
        aug = [[Fraction(cols[j][i]) for j in range(phi)] + [Fraction(int(i == 0))]
               for i in range(phi)]
        for c in range(phi):
            p = next(r for r in range(c, phi) if aug[r][c])
            aug[c], aug[p] = aug[p], aug[c]
            pv = aug[c][c]
            aug[c] = [v / pv for v in aug[c]]
            for r in range(phi):
                if r != c and aug[r][c]:
                    f = aug[r][c]
                    aug[r] = [a - f * b for a, b in zip(aug[r], aug[c])]
        return CycNum(self.order, [row[-1] for row in aug])

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __str__(self) -> str:
        parts = []
        for k, c in enumerate(self.coords):
            if not c:
                continue
            base = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            if not base:
                parts.append(rat_str(c))
            elif c == 1:
                parts.append(base)
            elif c == -1:
                parts.append("-" + base)
            else:
                parts.append(f"{rat_str(c)}*{base}")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        return f"CycNum({self.order}, {self})"


# -- prime fields -------------------------------------------------------------

class ModP:
    """Element of the prime field F_p."""

    __slots__ = ("p", "v")

    def __init__(self, p: int, v: int):
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "v", v % p)

    def __setattr__(self, name, value):
        raise AttributeError("ModP is immutable")

    def __reduce__(self):
        return (ModP, (self.p, self.v))

    def _coerce(self, other):
        if isinstance(other, ModP):
            if other.p != self.p:
                raise ValueError("prime mismatch")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return None

    def __bool__(self):
        return self.v != 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.v - o) % self.p == 0

    def __hash__(self):
        return hash((self.p, self.v))

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else ModP(self.p, self.v + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else ModP(self.p, self.v - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else ModP(self.p, o - self.v)

    def __neg__(self):
        return ModP(self.p, -self.v)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else ModP(self.p, self.v * o)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return ModP(self.p, pow(self.v, e, self.p))

    def inverse(self) -> ModP:
        if not self.v:
            raise ZeroDivisionError("inverse of zero in prime field")
        return ModP(self.p, pow(self.v, -1, self.p))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * ModP(self.p, o).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ModP(self.p, o) * self.inverse()

    def __str__(self):
        return str(self.v)

    def __repr__(self):
        return f"ModP({self.p}, {self.v})"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


# -- field descriptors --------------------------------------------------------

class RationalField:
    name = "QQ"
    zero = 0
    one = 1

    def __call__(self, x):
        return rat(x)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


QQ = RationalField()


class CyclotomicField:
    """The field Q(z) with z a primitive n-th root of unity."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("cyclotomic order must be >= 1")
        self.n = n
        self.zero = CycNum(n, ())
        self.one = CycNum(n, (1,))

    @property
    def name(self) -> str:
        return f"QQ(zeta_{self.n})"

    def __call__(self, x) -> CycNum:
        if isinstance(x, CycNum):
            if x.order != self.n:
                raise ValueError("cyclotomic order mismatch")
            return x
        return CycNum(self.n, (x,))

    def root_of_unity(self, k: int = 1) -> CycNum:
        return CycNum.zeta(self.n, k)

    def __eq__(self, other):
        return isinstance(other, CyclotomicField) and other.n == self.n

    def __hash__(self):
        return hash(("cyc", self.n))

    def __repr__(self):
        return self.name


class PrimeField:
    """F_p; used as a fast pre-pass, never for emitted certificates."""

    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.zero = ModP(p, 0)
        self.one = ModP(p, 1)

    @property
    def name(self) -> str:
        return f"GF({self.p})"

    def __call__(self, x) -> ModP:
        if isinstance(x, ModP):
            return x
        return ModP(self.p, 0) + x

    def root_of_unity(self, n: int, k: int = 1) -> ModP:
        """A fixed element of exact multiplicative order n, raised to k."""
        p = self.p
        if (p - 1) % n:
            raise ValueError(f"F_{p} has no primitive {n}-th root of unity (need p = 1 mod n)")
        factors = {q for q in range(2, n + 1) if n % q == 0 and _is_prime(q)}
        for g in range(2, p):
            cand = pow(g, (p - 1) // n, p)
            if all(pow(cand, n // q, p) != 1 for q in factors):
                return ModP(p, pow(cand, k % n, p))
        raise ArithmeticError("no root of unity found")

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("gf", self.p))

    def __repr__(self):
        return self.name


def field_of(values: Iterable):
    """Infer the smallest descriptor covering a collection of scalars."""
    field = QQ
    for v in values:
        if isinstance(v, CycNum):
            return CyclotomicField(v.order)
        if isinstance(v, ModP):
            field = PrimeField(v.p)
    return field


# -- restriction of scalars ---------------------------------------------------

def restrict_scalars(condition: dict | Sequence, order: int | None = None) -> list:
    """Split a Q(z)-linear condition on rational unknowns into phi(n) rational ones.

    ``condition`` maps unknown -> coefficient (a dict) or is a coefficient
    vector.  Coefficient k of the output is the k-th power-basis coordinate,
    so a rational vector solves the input iff it solves every output.
    """
    items = condition.items() if isinstance(condition, dict) else enumerate(condition)
    items = list(items)
    if order is None:
        orders = {c.order for _, c in items if isinstance(c, CycNum)}
        if len(orders) > 1:
            raise ValueError("mixed cyclotomic orders in one condition")
        order = orders.pop() if orders else 1
    phi = euler_phi(order)
    out = [dict() for _ in range(phi)]
    for key, c in items:
        coords = c.coords if isinstance(c, CycNum) else (rat(c),) + (0,) * (phi - 1)
        if isinstance(c, CycNum) and c.order != order:
            raise ValueError("mixed cyclotomic orders in one condition")
        for k, v in enumerate(coords):
            if v:
                out[k][key] = v
    if isinstance(condition, dict):
        return out
    size = len(condition)
    return [[row.get(i, 0) for i in range(size)] for row in out]


def lcm_denominator(values: Iterable) -> int:
    out = 1
    for v in values:
        if isinstance(v, Fraction):
            d = v.denominator
            out = out * d // gcd(out, d)
    return out
