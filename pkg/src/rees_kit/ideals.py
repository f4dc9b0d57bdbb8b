"""Colon, saturation, intersection, radical membership, dimension and Fitting ideals."""

from __future__ import annotations

from dataclasses import dataclass, field

from .groebner import GroebnerBasis, Ideal, eliminate
from .ring import PolyMatrix, Polynomial, RingContext, RingError, matrix_minors


class PreconditionError(ValueError):
    pass


# --------------------------------------------------------------------------
# intersection and colon
# --------------------------------------------------------------------------

def intersect(I: Ideal, J: Ideal) -> Ideal:
    """I ∩ J from t*I + (1-t)*J by eliminating t."""
    ring = I.ring
    if J.ring != ring:
        raise RingError("context mismatch")
    if I.is_zero() or J.is_zero():
        return Ideal(ring)
    if I.is_unit():
        return J.reduced()
    if J.is_unit():
        return I.reduced()
    t_name = ring.fresh_name("t")
    big = ring.extend([t_name])
    t = big.var(t_name)
    one_minus_t = big.one() - t
    gens = [t * big.embed(f) for f in I.generators]
    gens += [one_minus_t * big.embed(g) for g in J.generators]
    return eliminate(Ideal(big, gens), [t_name], target=ring)


def exact_divide(f: Polynomial, g: Polynomial) -> Polynomial:
    """f / g, raising if g does not divide f."""
    from .groebner import reduce
    (q,), r = reduce(f, [g])
    if not r.is_zero():
        raise ArithmeticError(f"{g} does not divide {f}")
    return q


def colon_element(I: Ideal, g: Polynomial) -> Ideal:
    """I : g computed as (I ∩ (g)) / g."""
    ring = I.ring
    if g.is_zero():
        raise ValueError("colon by zero")
    if I.is_zero():
        return Ideal(ring)
    meet = intersect(I, Ideal(ring, [g]))
    quotients = [exact_divide(h, g) for h in meet.gb().elements]
    # Dividing a Groebner basis of I ∩ (g) by g gives a Groebner basis of I : g.
    gb = GroebnerBasis.from_reduced(ring, ring.order, quotients)
    return Ideal(ring, gb.elements).seed_gb(gb)


def colon(I: Ideal, J: Ideal) -> Ideal:
    """I : J as the intersection of I : g over the generators g of J."""
    if J.is_zero():
        raise ValueError("colon by the zero ideal")
    result = None
    for g in J.generators:
        piece = colon_element(I, g)
        if piece.is_unit():
            continue
        result = piece if result is None else intersect(result, piece)
    if result is None:
        return Ideal(I.ring, [I.ring.one()]).reduced()
    return result.reduced()


@dataclass
class SaturationResult:
    ideal: Ideal
    exponent: int
    chain_sizes: list = field(default_factory=list)


def saturate(I: Ideal, J: Ideal, max_steps: int = 64) -> SaturationResult:
    """Iterate I <- I : J until it stabilizes.

    ``exponent`` is the first m with I : J^m = I : J^(m+1); it counts the colon
    steps that changed the ideal.
    """
    current = I.reduced()
    sizes = [len(current)]
    for m in range(max_steps + 1):
        nxt = colon(current, J)
        if nxt.equals(current):
            return SaturationResult(current, m, sizes)
        current = nxt
        sizes.append(len(current))
    raise RuntimeError(f"saturation did not stabilize within {max_steps} steps")


# --------------------------------------------------------------------------
# radical membership and dimension
# --------------------------------------------------------------------------

def radical_member(f: Polynomial, I: Ideal) -> bool:
    """True iff 1 ∈ I + (1 - t*f) in the ring with one extra variable."""
    ring = I.ring
    if f.is_zero():
        return True
    t_name = ring.fresh_name("t")
    big = ring.extend([t_name])
    t = big.var(t_name)
    gens = [big.embed(g) for g in I.generators] + [big.one() - t * big.embed(f)]
    return Ideal(big, gens).is_unit()


def independent_dimension(leads: list, nvars: int) -> int:
    """Largest size of a variable set U with no leading monomial supported in U."""
    supports = [frozenset(i for i, v in enumerate(e) if v) for e in leads]
    if any(not s for s in supports):
        raise ValueError("unit ideal has no dimension")
    supports = [s for s in supports if not any(o < s for o in supports)]
    best = 0

    def search(i: int, chosen: frozenset):
        nonlocal best
        if len(chosen) + (nvars - i) <= best:
            return
        if i == nvars:
            best = len(chosen)
            return
        extended = chosen | {i}
        if not any(s <= extended for s in supports):
            search(i + 1, extended)
        search(i + 1, chosen)

    search(0, frozenset())
    return best


def dimension(I: Ideal) -> int:
    """Krull dimension of S/I from the initial ideal."""
    ring = I.ring
    if I.is_zero():
        return ring.nvars
    gb = I.gb()
    if gb.is_unit():
        raise ValueError("the unit ideal has no dimension")
    return independent_dimension(gb.leading_monomials(), ring.nvars)


def height(I: Ideal) -> int:
    return I.ring.nvars - dimension(I)


# --------------------------------------------------------------------------
# Fitting ideals and G_s
# --------------------------------------------------------------------------

def minor_ideal(M: PolyMatrix, k: int) -> Ideal:
    """I_k(M) with the convention I_k = (1) for k <= 0 and (0) beyond the size."""
    if k <= 0:
        return Ideal(M.ring, [M.ring.one()])
    if k > min(M.rows, M.cols):
        return Ideal(M.ring)
    seen, gens = set(), []
    for d in matrix_minors(M, k, nonzero=True):
        key = d.monic()
        if key not in seen:
            seen.add(key)
            gens.append(d)
    return Ideal(M.ring, gens)


def fitting_ideal(phi: PolyMatrix, i: int) -> Ideal:
    """Fitt_i = I_{n-i}(phi) for an n x (n-1) presentation matrix."""
    n = phi.rows
    if not 0 <= i <= n:
        raise ValueError(f"Fitting index {i} outside 0..{n}")
    return minor_ideal(phi, n - i)


def _quotient_ring_height(I: Ideal) -> int:
    if I.is_zero():
        return 0
    if I.is_unit():
        return I.ring.nvars + 1  # conventionally infinite
    return height(I)


def _base_ring_ideal(phi: PolyMatrix, I: Ideal) -> Ideal:
    """View a minor ideal in k[x,y,z] when the matrix only involves those variables."""
    ring = phi.ring
    used = set()
    for f in phi.entries:
        used |= f.variables()
    if ring.n is None or not used <= {"x", "y", "z"}:
        return I
    base = RingContext(("x", "y", "z"), ring.field, ring.order.kind)
    gens = [base.restrict(g) for g in I.generators]
    return Ideal(base, gens)


def height_in_base(phi: PolyMatrix, I: Ideal) -> int:
    """Height of an ideal of minors, computed in k[x,y,z] when possible."""
    return _quotient_ring_height(_base_ring_ideal(phi, I))


def gs_profile(phi: PolyMatrix, s: int) -> list:
    """Per-index rows (i, height of Fitt_i, required i+1, vacuous flag) for i = 1..s-1."""
    ht_I = height_in_base(phi, fitting_ideal(phi, 1))
    rows = []
    for i in range(1, s):
        h = height_in_base(phi, fitting_ideal(phi, i))
        rows.append({"i": i, "height": h, "required": i + 1, "vacuous": i < ht_I,
                     "holds": h >= i + 1})
    return rows


def gs_check(phi: PolyMatrix, s: int) -> bool:
    """G_s via ht Fitt_i(I) >= i+1 for height(I) <= i <= s-1."""
    n = phi.rows
    if phi.cols != n - 1:
        raise PreconditionError("presentation matrix must be n x (n-1)")
    ht_I = height_in_base(phi, fitting_ideal(phi, 1))
    if ht_I != 2:
        raise PreconditionError(f"maximal minors have height {ht_I}, expected 2")
    for row in gs_profile(phi, s):
        if not row["vacuous"] and not row["holds"]:
            return False
    return True


def min_prime_check(phi: PolyMatrix) -> bool:
    """True iff (x, y) is the only minimal prime of I_{n-2}(phi)."""
    I = _base_ring_ideal(phi, minor_ideal(phi, phi.rows - 2))
    ring = I.ring
    if I.is_zero():
        return False
    x, y = ring.var("x"), ring.var("y")
    xy = Ideal(ring, [x, y])
    if not all(xy.contains(g) for g in I.generators):
        return False
    return radical_member(x, I) and radical_member(y, I)
