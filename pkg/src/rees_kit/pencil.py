"""Linear pencils xA + yB over k[x, y]: invariant factors and block summary.

Binary forms are handled dehomogenized at y = 1 together with the power of y
they carry, so gcds and exact quotients reduce to univariate arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd as igcd
from typing import Sequence

from .ring import Field, PolyMatrix, Polynomial, RingContext, matrix_minors


class InvalidSetting(ValueError):
    pass


class NeedsFieldExtension(ValueError):
    pass


class NotAPencil(ValueError):
    pass


# --------------------------------------------------------------------------
# univariate helpers (coefficient lists, constant term first)
# --------------------------------------------------------------------------

def _trim(a: list) -> list:
    while a and not a[-1]:
        a.pop()
    return a


def _divmod(a: list, b: list, fld: Field):
    a = list(a)
    q = [fld.zero] * max(len(a) - len(b) + 1, 0)
    inv = fld.inv(b[-1])
    while len(a) >= len(b) and a:
        c = fld.normal(a[-1] * inv)
        k = len(a) - len(b)
        q[k] = c
        for i, bv in enumerate(b):
            a[k + i] = fld.normal(a[k + i] - c * bv)
        _trim(a)
    return _trim(q), a


def _monic(a: list, fld: Field) -> list:
    if not a:
        return a
    inv = fld.inv(a[-1])
    return [fld.normal(c * inv) for c in a]


def _ugcd(a: list, b: list, fld: Field) -> list:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _divmod(a, b, fld)
        a, b = b, r
    return _monic(a, fld)


def _eval(a: list, r, fld: Field):
    acc = fld.zero
    for c in reversed(a):
        acc = fld.normal(acc * r + c)
    return acc


@dataclass(frozen=True)
class BinaryForm:
    """y^ypow * g(x, y) with g the homogenization of the univariate ``coeffs``."""

    ypow: int
    coeffs: tuple  # of g(x, 1), constant term first; () means the zero form

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return self.ypow + len(self.coeffs) - 1

    @property
    def is_constant(self) -> bool:
        return not self.is_zero and self.degree == 0


def _to_form(f: Polynomial, ix: int, iy: int, fld: Field) -> BinaryForm:
    if f.is_zero():
        return BinaryForm(0, ())
    deg = f.total_degree()
    coeffs = [fld.zero] * (deg + 1)
    for e, c in f.terms.items():
        coeffs[e[ix]] = c
    _trim(coeffs)
    # g(x,1) has x-degree len-1; the rest of the degree is a pure y power.
    ypow = deg - (len(coeffs) - 1)
    return BinaryForm(ypow, tuple(coeffs))


def _form_gcd(a: BinaryForm, b: BinaryForm, fld: Field) -> BinaryForm:
    if a.is_zero:
        return BinaryForm(b.ypow, tuple(_monic(list(b.coeffs), fld)))
    if b.is_zero:
        return BinaryForm(a.ypow, tuple(_monic(list(a.coeffs), fld)))
    g = _ugcd(list(a.coeffs), list(b.coeffs), fld)
    return BinaryForm(min(a.ypow, b.ypow), tuple(g))


def _form_div(a: BinaryForm, b: BinaryForm, fld: Field) -> BinaryForm:
    q, r = _divmod(list(a.coeffs), list(b.coeffs), fld)
    if r or a.ypow < b.ypow:
        raise ArithmeticError("binary form does not divide")
    return BinaryForm(a.ypow - b.ypow, tuple(_monic(q, fld)))


def _form_to_poly(f: BinaryForm, ring: RingContext) -> Polynomial:
    if f.is_zero:
        return ring.zero()
    ix, iy = ring.index("x"), ring.index("y")
    deg = f.degree
    terms = {}
    for k, c in enumerate(f.coeffs):
        if c:
            e = [0] * ring.nvars
            e[ix] = k
            e[iy] = deg - k
            terms[tuple(e)] = c
    return Polynomial(ring, terms)


def _roots(coeffs: list, fld: Field) -> list:
    """Roots in the base field, with multiplicity, of a univariate polynomial."""
    found = []
    poly = _monic(_trim(list(coeffs)), fld)
    for r in _candidates(poly, fld):
        while len(poly) > 1 and not _eval(poly, r, fld):
            found.append(r)
            poly, _ = _divmod(poly, [fld.normal(-r), fld.one], fld)
        if len(poly) <= 1:
            break
    if len(poly) > 1:
        raise NeedsFieldExtension(f"factor of degree {len(poly) - 1} has no roots in {fld}")
    return found


def _candidates(poly: list, fld: Field):
    p = fld.characteristic
    if p:
        return range(p)
    fr = [fld.to_fraction(c) for c in poly]
    den = 1
    for c in fr:
        den = den * c.denominator // igcd(den, c.denominator)
    ints = [int(c * den) for c in fr]
    shift = 0
    while ints[shift] == 0:
        shift += 1
    out = [fld(0)] if shift else []
    a0, an = abs(ints[shift]), abs(ints[-1])
    for pnum in _divisors(a0):
        for q in _divisors(an):
            for s in (1, -1):
                out.append(fld(Fraction(s * pnum, q)))
    seen, uniq = set(), []
    for c in out:
        if c not in seen:
            seen.add(c)
            uniq.append(c)
    return uniq


def _divisors(m: int) -> list:
    small, large = [], []
    d = 1
    while d * d <= m:
        if m % d == 0:
            small.append(d)
            if d * d != m:
                large.append(m // d)
        d += 1
    return small + large[::-1]


# --------------------------------------------------------------------------
# pencils
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Pencil:
    """xA + yB with scalar matrices A, B (row-major tuples of tuples)."""

    rows: int
    cols: int
    A: tuple
    B: tuple
    field: Field = field(default_factory=Field)

    def ring(self) -> RingContext:
        return RingContext(("x", "y"), self.field)

    def to_matrix(self, ring: RingContext | None = None) -> PolyMatrix:
        ring = ring or self.ring()
        x, y = ring.var("x"), ring.var("y")
        rows = [[x.scale(self.A[i][j]) + y.scale(self.B[i][j]) if (self.A[i][j] or self.B[i][j])
                 else ring.zero() for j in range(self.cols)] for i in range(self.rows)]
        return PolyMatrix.from_rows(ring, rows) if self.rows else PolyMatrix(0, self.cols, (), ring)

    def transform(self, C: Sequence[Sequence], D: Sequence[Sequence]) -> "Pencil":
        """Strict equivalence C (xA + yB) D with scalar C, D."""
        fld = self.field

        def mul(P, Q):
            return tuple(tuple(fld.normal(sum((P[i][k] * Q[k][j] for k in range(len(Q))), fld.zero))
                               for j in range(len(Q[0]))) for i in range(len(P)))

        C = [[fld(v) for v in r] for r in C]
        D = [[fld(v) for v in r] for r in D]
        return Pencil(self.rows, self.cols, mul(mul(C, self.A), D), mul(mul(C, self.B), D), fld)


def pencil_from_matrix(M: PolyMatrix) -> Pencil:
    """Split a matrix of linear forms in x, y into xA + yB."""
    ring = M.ring
    fld = ring.field
    ix, iy = ring.index("x"), ring.index("y")
    A = [[fld.zero] * M.cols for _ in range(M.rows)]
    B = [[fld.zero] * M.cols for _ in range(M.rows)]
    for i in range(M.rows):
        for j in range(M.cols):
            for e, c in M[i, j].terms.items():
                if sum(e) != 1 or not (e[ix] or e[iy]):
                    raise NotAPencil(f"entry ({i},{j}) = {M[i, j]} is not a linear form in x, y")
                if e[ix]:
                    A[i][j] = c
                else:
                    B[i][j] = c
    return Pencil(M.rows, M.cols, tuple(map(tuple, A)), tuple(map(tuple, B)), fld)


@dataclass
class PencilSummary:
    kind: str                  # "SingleLPrime" or "LPrimeWithM"
    m_sizes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "m_sizes": list(self.m_sizes)}

    def __str__(self):
        return self.kind if self.kind == "SingleLPrime" else f"LPrimeWithM({self.m_sizes})"


@dataclass
class PencilInvariants:
    normal_rank: int
    determinantal_divisors: list   # d_0 .. d_rank as polynomials in x, y
    invariant_factors: list        # s_1 .. s_rank
    elementary_divisors: list      # (a, b, power): (a x + b y)^power
    has_zero_block: bool
    summary: PencilSummary
    l_prime_size: int | None = None

    @property
    def elementary_divisor_degrees(self) -> list:
        return [(a, b, k) for a, b, k in self.elementary_divisors]

    def m1_form(self):
        """(a, b) of the single degree-one elementary divisor a x + b y."""
        if self.summary.m_sizes != [1]:
            raise InvalidSetting(f"pencil is {self.summary}, not a single M_1 block")
        a, b, _ = self.elementary_divisors[0]
        return a, b

    def to_dict(self, fld: Field | None = None) -> dict:
        fmt = (lambda c: fld.to_str(c)) if fld else str
        return {
            "normal_rank": self.normal_rank,
            "invariant_factors": [str(f) for f in self.invariant_factors],
            "elementary_divisors": [{"form": [fmt(a), fmt(b)], "power": k}
                                    for a, b, k in self.elementary_divisors],
            "has_zero_block": self.has_zero_block,
            "summary": self.summary.to_dict(),
            "l_prime_size": self.l_prime_size,
        }


def determinantal_divisors(P: Pencil) -> list:
    """d_0 = 1, d_i = gcd of i x i minors (monic at y = 1), up to the normal rank."""
    fld = P.field
    ring = P.ring()
    M = P.to_matrix(ring)
    ix, iy = 0, 1
    forms = [BinaryForm(0, (fld.one,))]
    for k in range(1, min(P.rows, P.cols) + 1):
        g = BinaryForm(0, ())
        for d in matrix_minors(M, k, nonzero=True):
            g = _form_gcd(g, _to_form(d, ix, iy, fld), fld)
            if g.is_constant:
                break
        if g.is_zero:
            break
        forms.append(g)
    return forms


def invariant_factors(P: Pencil) -> list:
    """s_i = d_i / d_(i-1) as binary forms in k[x, y]."""
    ring = P.ring()
    return [_form_to_poly(f, ring) for f in _invariant_forms(P)]


def _invariant_forms(P: Pencil) -> list:
    d = determinantal_divisors(P)
    return [_form_div(d[i], d[i - 1], P.field) for i in range(1, len(d))]


def _linear_factors(f: BinaryForm, fld: Field) -> list:
    """(a, b, power) list with f = prod (a x + b y)^power, up to a scalar."""
    out = []
    if f.ypow:
        out.append((fld.zero, fld.one, f.ypow))
    counts: dict = {}
    for r in _roots(list(f.coeffs), fld):
        counts[r] = counts.get(r, 0) + 1
    for r, k in counts.items():
        out.append((fld.one, fld.normal(-r), k))
    return out


def pencil_invariants(P: Pencil) -> PencilInvariants:
    fld = P.field
    ring = P.ring()
    d = determinantal_divisors(P)
    rank = len(d) - 1
    s = [_form_div(d[i], d[i - 1], fld) for i in range(1, len(d))]
    elem = []
    for f in s:
        if not f.is_constant:
            elem.extend(_linear_factors(f, fld))
    sizes = sorted((k for _, _, k in elem), reverse=True)
    summary = PencilSummary("SingleLPrime") if not elem else PencilSummary("LPrimeWithM", sizes)
    return PencilInvariants(
        normal_rank=rank,
        determinantal_divisors=[_form_to_poly(f, ring) for f in d],
        invariant_factors=[_form_to_poly(f, ring) for f in s],
        elementary_divisors=elem,
        has_zero_block=rank < P.cols,
        summary=summary,
        l_prime_size=P.cols - sum(sizes),
    )


def classify_phi_prime(P: Pencil) -> PencilInvariants:
    """Block summary of an (n-1) x (n-2) pencil: one L' block plus M blocks."""
    if P.rows != P.cols + 1:
        raise InvalidSetting(f"expected an (m+1) x m pencil, got {P.rows} x {P.cols}")
    inv = pencil_invariants(P)
    if inv.has_zero_block:
        raise InvalidSetting(f"pencil has normal rank {inv.normal_rank} < {P.cols}")
    if inv.l_prime_size is None or inv.l_prime_size < 1:
        raise InvalidSetting("elementary divisors leave no room for an L' block")
    return inv
