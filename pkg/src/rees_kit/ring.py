"""Exact sparse multivariate polynomials over QQ and prime fields.

Polynomials are immutable term maps ``{exponent tuple: coefficient}`` attached
to a :class:`RingContext`.  The Rees-algebra ring used throughout the package is
``k[x, y, z, w0, ..., w_{n-1}]`` with the variables ranked
``x < y < z < w0 < ... < w_{n-1}``; exponent vectors are stored in that order,
so index 0 is always the smallest variable.

Polynomial text grammar (whitespace is ignored)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = { "+" | "-" } power ;
    power   = atom [ ("^" | "**") integer ] ;
    atom    = integer | name | "(" expr ")" ;

Division is only allowed by nonzero constants, so rational coefficients are
written ``3/2*x`` or ``x/2``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from operator import add
from typing import Iterable, Sequence

try:
    from gmpy2 import mpq as _rational
except ImportError:  # pragma: no cover
    _rational = Fraction


class RingError(ValueError):
    """Raised for context mismatches and malformed ring data."""


class ParseError(ValueError):
    """Raised when polynomial text cannot be parsed."""


class NotBihomogeneous(ValueError):
    pass


# --------------------------------------------------------------------------
# coefficient fields
# --------------------------------------------------------------------------

def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Field:
    """QQ when ``characteristic == 0``, otherwise the prime field GF(p)."""

    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p and not _is_prime(p):
            raise RingError(f"characteristic {p} is not prime")

    @classmethod
    def parse(cls, text: str) -> "Field":
        """Accepts ``q``/``QQ`` or ``gf:p``/``GF(p)``."""
        t = text.strip().lower()
        if t in ("q", "qq", "rationals"):
            return cls(0)
        m = re.fullmatch(r"gf[:(]?(\d+)\)?", t)
        if m:
            return cls(int(m.group(1)))
        raise RingError(f"unknown field descriptor {text!r}")

    @property
    def is_prime_field(self) -> bool:
        return self.characteristic != 0

    def __call__(self, value):
        p = self.characteristic
        if p:
            if isinstance(value, int):
                return value % p
            num, den = _num_den(value)
            if den % p == 0:
                raise ZeroDivisionError(f"denominator {den} vanishes in GF({p})")
            return num * pow(den, -1, p) % p
        if isinstance(value, int):
            return _rational(value)
        num, den = _num_den(value)
        return _rational(num, den)

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def inv(self, a):
        p = self.characteristic
        if p:
            return pow(int(a), -1, p)
        return 1 / a

    def normal(self, a):
        """Reduce the result of raw ``+ - *`` arithmetic to canonical form."""
        p = self.characteristic
        return a % p if p else a

    def to_str(self, a) -> str:
        p = self.characteristic
        if p:
            a = int(a)
            return str(a - p if a > p // 2 else a)
        return str(a)

    def to_fraction(self, a) -> Fraction:
        p = self.characteristic
        if p:
            a = int(a)
            return Fraction(a - p if a > p // 2 else a)
        return Fraction(int(a.numerator), int(a.denominator))

    def __str__(self):
        return f"GF({self.characteristic})" if self.characteristic else "QQ"


def _num_den(value):
    if isinstance(value, Fraction):
        return value.numerator, value.denominator
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return int(value.numerator), int(value.denominator)
    f = Fraction(value)
    return f.numerator, f.denominator


QQ = Field(0)


# --------------------------------------------------------------------------
# monomial orders
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MonomialOrder:
    """Degrevlex or lex on ``nvars`` variables, optionally with an elimination block.

    The variable ranking is the exponent-vector index: index 0 is the smallest
    variable.  ``eliminate`` lists variable indices forming a lex block that
    dominates the remaining variables, which keep ``kind``.

    Orders are realized as linear sort keys: ``encode(a) < encode(b)`` iff
    ``a < b`` and ``encode(a + b) == encode(a) + encode(b)`` componentwise.
    """

    kind: str
    nvars: int
    eliminate: tuple = ()

    def __post_init__(self):
        if self.kind not in ("degrevlex", "lex"):
            raise RingError(f"unknown monomial order {self.kind!r}")
        elim = tuple(sorted(set(self.eliminate), reverse=True))
        object.__setattr__(self, "eliminate", elim)
        rest = [i for i in range(self.nvars) if i not in elim]
        slots = [None] * self.nvars
        for pos, i in enumerate(elim):
            slots[i] = (pos, 1)
        base = len(elim)
        if self.kind == "degrevlex":
            for j, i in enumerate(rest):
                slots[i] = (base + 1 + j, -1)
        else:
            for j, i in enumerate(rest):
                slots[i] = (base + len(rest) - 1 - j, 1)
        object.__setattr__(self, "_rest", tuple(rest))
        object.__setattr__(self, "_slots", tuple(slots))

    def encode(self, e: tuple) -> tuple:
        head = tuple(e[i] for i in self.eliminate)
        rest = self._rest
        if self.kind == "degrevlex":
            if not head and len(rest) == len(e):
                return (sum(e), *[-v for v in e])
            return head + (sum(e[i] for i in rest),) + tuple(-e[i] for i in rest)
        return head + tuple(e[i] for i in reversed(rest))

    def decode(self, key: tuple) -> tuple:
        return tuple(s * key[p] for p, s in self._slots)

    def descriptor(self) -> dict:
        d = {"kind": self.kind, "nvars": self.nvars}
        if self.eliminate:
            d["eliminate"] = list(self.eliminate)
        return d

    def __str__(self):
        return self.kind if not self.eliminate else f"{self.kind}/elim{list(self.eliminate)}"


# --------------------------------------------------------------------------
# rings
# --------------------------------------------------------------------------

_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class RingContext:
    """A polynomial ring with named variables listed from smallest to largest.

    ``RingContext.rees(n)`` builds ``k[x, y, z, w0, ..., w_{n-1}]``; generic
    rings (used for pencils, elimination and tests) take any name list.
    """

    def __init__(self, names: Sequence[str], field: Field = QQ, order: str = "degrevlex",
                 n: int | None = None):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise RingError(f"duplicate variable names in {names}")
        for nm in names:
            if not _NAME.fullmatch(nm):
                raise RingError(f"bad variable name {nm!r}")
        self.names = names
        self.field = field
        self.n = n
        self.order = MonomialOrder(order, len(names))
        self._index = {nm: i for i, nm in enumerate(names)}

    @classmethod
    def rees(cls, n: int, field: Field = QQ, order: str = "degrevlex") -> "RingContext":
        if n < 1:
            raise RingError("need at least one generator")
        if field.characteristic and field.characteristic <= n:
            raise RingError(f"prime field characteristic must exceed n={n}")
        names = ("x", "y", "z") + tuple(f"w{i}" for i in range(n))
        return cls(names, field, order, n=n)

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def base_vars(self) -> tuple:
        return self.names[:3] if self.n is not None else ()

    @property
    def dual_vars(self) -> tuple:
        return self.names[3:3 + self.n] if self.n is not None else ()

    def __eq__(self, other):
        return (isinstance(other, RingContext) and self.names == other.names
                and self.field == other.field and self.order == other.order)

    def __hash__(self):
        return hash((self.names, self.field, self.order))

    def __repr__(self):
        return f"RingContext({', '.join(self.names)}; {self.field}; {self.order.kind})"

    def with_order(self, order: str) -> "RingContext":
        return RingContext(self.names, self.field, order, n=self.n)

    def with_field(self, field: Field) -> "RingContext":
        return RingContext(self.names, field, self.order.kind, n=self.n)

    def extend(self, extra: Sequence[str]) -> "RingContext":
        """Ring with ``extra`` variables appended as the largest ones."""
        return RingContext(self.names + tuple(extra), self.field, self.order.kind, n=self.n)

    def fresh_name(self, stem: str = "t") -> str:
        name, k = stem, 0
        while name in self._index:
            k += 1
            name = f"{stem}{k}"
        return name

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ParseError(f"unknown variable {name!r}") from None

    # constructors ---------------------------------------------------------

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c) -> "Polynomial":
        c = self.field(c)
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def monomial(self, exps: Sequence[int], c=1) -> "Polynomial":
        c = self.field(c)
        return Polynomial(self, {tuple(exps): c} if c else {})

    def var(self, name: str) -> "Polynomial":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Polynomial(self, {tuple(e): self.field.one})

    def gens(self) -> list:
        return [self.var(nm) for nm in self.names]

    def __getitem__(self, name: str) -> "Polynomial":
        return self.var(name)

    def w(self, i: int) -> "Polynomial":
        return self.var(f"w{i}")

    def parse(self, text: str) -> "Polynomial":
        return parse_poly(text, self)

    def embed(self, f: "Polynomial") -> "Polynomial":
        """Map ``f`` from a ring whose names are a prefix of ours."""
        if f.ring == self:
            return f
        src = f.ring.names
        if self.names[:len(src)] != src:
            raise RingError(f"cannot embed {f.ring} into {self}")
        pad = (0,) * (self.nvars - len(src))
        return Polynomial(self, {e + pad: self.field(f.ring.field.to_fraction(c))
                                 if f.ring.field != self.field else c
                                 for e, c in f.terms.items()})

    def restrict(self, f: "Polynomial") -> "Polynomial":
        """Inverse of :meth:`embed` for polynomials free of the trailing variables."""
        if f.ring == self:
            return f
        k = self.nvars
        terms = {}
        for e, c in f.terms.items():
            if any(e[k:]):
                raise RingError(f"{f} involves variables outside {self}")
            terms[e[:k]] = c
        return Polynomial(self, terms)


# --------------------------------------------------------------------------
# polynomials
# --------------------------------------------------------------------------

class Polynomial:
    """Immutable sparse polynomial.  Terms never store zero coefficients."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: RingContext, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # basic protocol -------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring.names, frozenset(self.terms.items())))
        return self._hash

    def _check(self, other: "Polynomial"):
        if other.ring != self.ring:
            raise RingError(f"context mismatch: {self.ring} vs {other.ring}")

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)) or hasattr(other, "denominator"):
            return self.ring.const(other)
        return NotImplemented

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        norm = self.ring.field.normal
        terms = dict(self.terms)
        for e, c in other.terms.items():
            v = norm(terms.get(e, 0) + c)
            if v:
                terms[e] = v
            else:
                terms.pop(e, None)
        return Polynomial(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        norm = self.ring.field.normal
        return Polynomial(self.ring, {e: norm(-c) for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            if isinstance(other, (int, Fraction)) or hasattr(other, "denominator"):
                return self.scale(other)
            return NotImplemented
        self._check(other)
        norm = self.ring.field.normal
        terms: dict = {}
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                e = tuple(map(add, e1, e2))
                v = norm(terms.get(e, 0) + c1 * c2)
                if v:
                    terms[e] = v
                else:
                    terms.pop(e, None)
        return Polynomial(self.ring, terms)

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        fld = self.ring.field
        c = fld(c) if not (fld.is_prime_field and isinstance(c, int)) else c % fld.characteristic
        if not c:
            return self.ring.zero()
        return Polynomial(self.ring, {e: fld.normal(v * c) for e, v in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_monomial(self, exps: tuple, c=None) -> "Polynomial":
        fld = self.ring.field
        if c is None:
            return Polynomial(self.ring, {tuple(map(add, e, exps)): v for e, v in self.terms.items()})
        return Polynomial(self.ring, {tuple(map(add, e, exps)): fld.normal(v * c)
                                      for e, v in self.terms.items()})

    # inspection -----------------------------------------------------------

    def sorted_terms(self, order: MonomialOrder | None = None) -> list:
        """Terms in descending monomial order."""
        order = order or self.ring.order
        return sorted(self.terms.items(), key=lambda t: order.encode(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder | None = None) -> tuple:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        order = order or self.ring.order
        e = max(self.terms, key=order.encode)
        return e, self.terms[e]

    def leading_monomial(self, order: MonomialOrder | None = None) -> tuple:
        return self.leading_term(order)[0]

    def monic(self, order: MonomialOrder | None = None) -> "Polynomial":
        if not self.terms:
            return self
        return self.scale(self.ring.field.inv(self.leading_term(order)[1]))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def variables(self) -> set:
        used = set()
        for e in self.terms:
            used.update(i for i, v in enumerate(e) if v)
        return {self.ring.names[i] for i in used}

    def degree_in(self, name: str) -> int:
        i = self.ring.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def coefficient(self, exps: Sequence[int]):
        return self.terms.get(tuple(exps), self.ring.field.zero)

    def substitute(self, values: dict) -> "Polynomial":
        """Substitute polynomials (or constants) for named variables."""
        ring = self.ring
        images = {}
        for name, v in values.items():
            images[ring.index(name)] = v if isinstance(v, Polynomial) else ring.const(v)
        result = ring.zero()
        for e, c in self.terms.items():
            keep = list(e)
            term = None
            for i, img in images.items():
                if e[i]:
                    keep[i] = 0
                    p = img ** e[i]
                    term = p if term is None else term * p
            mono = ring.monomial(keep, c)
            result = result + (mono if term is None else mono * term)
        return result

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Polynomial({format_poly(self)!r})"

    def to_json(self) -> str:
        return format_poly(self)


def format_poly(f: Polynomial, order: MonomialOrder | None = None) -> str:
    if not f.terms:
        return "0"
    names = f.ring.names
    fld = f.ring.field
    pieces = []
    for e, c in f.sorted_terms(order):
        mono = "*".join(names[i] if v == 1 else f"{names[i]}^{v}" for i, v in enumerate(e) if v)
        cs = fld.to_str(c)
        neg = cs.startswith("-")
        if neg:
            cs = cs[1:]
        if mono:
            body = mono if cs == "1" else f"{cs}*{mono}"
        else:
            body = cs
        if not pieces:
            pieces.append(("-" if neg else "") + body)
        else:
            pieces.append((" - " if neg else " + ") + body)
    return "".join(pieces)


@dataclass(frozen=True)
class Bidegree:
    x_degree: int
    w_degree: int

    def __iter__(self):
        return iter((self.x_degree, self.w_degree))


def bidegree_of(f: Polynomial) -> Bidegree:
    """The (x-degree, w-degree) of a bihomogeneous polynomial."""
    ring = f.ring
    if ring.n is None:
        raise RingError("bidegrees need a Rees ring")
    if not f.terms:
        raise NotBihomogeneous("zero polynomial has no bidegree")
    found = set()
    for e in f.terms:
        found.add((sum(e[:3]), sum(e[3:3 + ring.n])))
    if len(found) != 1:
        raise NotBihomogeneous(f"{f} is not bihomogeneous: bidegrees {sorted(found)}")
    return Bidegree(*found.pop())


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r} at {pos}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, ring: RingContext):
        self.toks = _tokenize(text)
        self.i = 0
        self.ring = ring

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, op=None):
        tok = self.peek()
        if tok[0] is None:
            raise ParseError("unexpected end of input")
        if op is not None and tok != ("op", op):
            raise ParseError(f"expected {op!r}, found {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        if not self.toks:
            raise ParseError("empty expression")
        f = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input at token {self.peek()[1]!r}")
        return f

    def expr(self):
        f = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            g = self.term()
            f = f + g if op == "+" else f - g
        return f

    def term(self):
        f = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            g = self.unary()
            if op == "*":
                f = f * g
            else:
                if not g.is_constant():
                    raise ParseError("division by a non-constant")
                if g.is_zero():
                    raise ParseError("denominator zero")
                f = f.scale(self.ring.field.inv(next(iter(g.terms.values()))))
        return f

    def unary(self):
        sign = 1
        while self.peek() in (("op", "+"), ("op", "-")):
            if self.take()[1] == "-":
                sign = -sign
        f = self.power()
        return -f if sign < 0 else f

    def power(self):
        f = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ParseError("exponent must be a non-negative integer")
            f = f ** val
        return f

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.ring.const(val)
        if kind == "name":
            return self.ring.var(val)
        if val == "(":
            f = self.expr()
            self.take(")")
            return f
        raise ParseError(f"unexpected token {val!r}")


def parse_poly(text: str, ctx: RingContext) -> Polynomial:
    """Parse ``text`` into a canonical polynomial of ``ctx``."""
    try:
        return _Parser(str(text), ctx).parse()
    except ZeroDivisionError as exc:
        raise ParseError(f"denominator zero: {exc}") from None


# --------------------------------------------------------------------------
# matrices
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyMatrix:
    rows: int
    cols: int
    entries: tuple
    ring: RingContext = field(compare=False)

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise RingError(f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, "
                            f"got {len(self.entries)}")
        for f in self.entries:
            if f.ring != self.ring:
                raise RingError("matrix entry from a different ring")

    @classmethod
    def from_rows(cls, ring: RingContext, rows: Sequence[Sequence]) -> "PolyMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise RingError("ragged matrix rows")
        entries = []
        for r in rows:
            for v in r:
                if isinstance(v, Polynomial):
                    entries.append(v)
                elif isinstance(v, str):
                    entries.append(parse_poly(v, ring))
                else:
                    entries.append(ring.const(v))
        return cls(len(rows), ncols, tuple(entries), ring)

    @classmethod
    def zeros(cls, ring: RingContext, rows: int, cols: int) -> "PolyMatrix":
        return cls(rows, cols, tuple(ring.zero() for _ in range(rows * cols)), ring)

    def __getitem__(self, ij) -> Polynomial:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def column(self, j: int) -> list:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def to_rows(self) -> list:
        return [self.row(i) for i in range(self.rows)]

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "PolyMatrix":
        rows, cols = list(rows), list(cols)
        return PolyMatrix(len(rows), len(cols),
                          tuple(self[i, j] for i in rows for j in cols), self.ring)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.cols, self.rows,
                          tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)),
                          self.ring)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise RingError("matrix shapes do not compose")
        ring = self.ring
        out = []
        for i in range(self.rows):
            for j in range(other.cols):
                acc = ring.zero()
                for k in range(self.cols):
                    a, b = self[i, k], other[k, j]
                    if a and b:
                        acc = acc + a * b
                out.append(acc)
        return PolyMatrix(self.rows, other.cols, tuple(out), ring)

    def scalar_transform(self, left=None, right=None) -> "PolyMatrix":
        """``left @ self @ right`` for scalar matrices given as nested lists."""
        m = self
        if left is not None:
            m = PolyMatrix.from_rows(self.ring, left) @ m
        if right is not None:
            m = m @ PolyMatrix.from_rows(self.ring, right)
        return m

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix(self.rows, self.cols, tuple(fn(f) for f in self.entries), self.ring)

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.entries)

    def to_dict(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "entries": [str(f) for f in self.entries]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict, ring: RingContext) -> "PolyMatrix":
        rows, cols = int(data["rows"]), int(data["cols"])
        entries = tuple(parse_poly(s, ring) for s in data["entries"])
        return cls(rows, cols, entries, ring)

    def __str__(self):
        cells = [[str(f) for f in r] for r in self.to_rows()]
        widths = [max((len(r[j]) for r in cells), default=0) for j in range(self.cols)]
        return "\n".join("[ " + "  ".join(c.rjust(w) for c, w in zip(r, widths)) + " ]" for r in cells)


def determinant(M: PolyMatrix) -> Polynomial:
    if M.rows != M.cols:
        raise RingError("determinant of a non-square matrix")
    memo: dict = {}
    return _minor(M, tuple(range(M.rows)), tuple(range(M.cols)), memo)


def _minor(M: PolyMatrix, rows: tuple, cols: tuple, memo: dict) -> Polynomial:
    key = (rows, cols)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if not rows:
        result = M.ring.one()
    elif len(rows) == 1:
        result = M[rows[0], cols[0]]
    else:
        result = M.ring.zero()
        r0, rest = rows[0], rows[1:]
        for j, c in enumerate(cols):
            a = M[r0, c]
            if not a:
                continue
            sub = _minor(M, rest, cols[:j] + cols[j + 1:], memo)
            if sub:
                result = result + a * sub if j % 2 == 0 else result - a * sub
    memo[key] = result
    return result


def matrix_minors(M: PolyMatrix, k: int, *, nonzero: bool = False) -> list:
    """All ``k x k`` minors, ordered lexicographically by (row set, column set).

    Subdeterminants are shared across the whole enumeration.  ``k == 0``
    gives ``[1]`` by convention.
    """
    if k < 0 or k > min(M.rows, M.cols):
        raise RingError(f"minor size {k} out of range for a {M.rows}x{M.cols} matrix")
    if k == 0:
        return [M.ring.one()]
    memo: dict = {}
    out = []
    for rows in combinations(range(M.rows), k):
        for cols in combinations(range(M.cols), k):
            d = _minor(M, rows, cols, memo)
            if d or not nonzero:
                out.append(d)
    return out
