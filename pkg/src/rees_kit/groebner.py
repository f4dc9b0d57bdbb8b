"""Buchberger engine: division, S-polynomials, reduced Groebner bases, elimination.

Internally every polynomial is a list of ``(key, coefficient)`` pairs, leading
term first.  A key is the *negated* linear sort key of the monomial under the
active order, so ``min`` picks the leading term and multiplying by a monomial
is componentwise key addition.  Normal forms are computed with a heap over the
live keys, which makes each reduction step logarithmic in the term count.
"""

from __future__ import annotations

import heapq
import json
from contextlib import contextmanager
from itertools import combinations
from operator import add, le, sub
from typing import Iterable, Sequence

from .ring import MonomialOrder, Polynomial, RingContext, RingError


class GroebnerError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# internal representation
# --------------------------------------------------------------------------

class _Codec:
    """Translate exponent vectors to negated order keys and back."""

    def __init__(self, order: MonomialOrder):
        self.order = order
        self.plain = order.kind == "degrevlex" and not order.eliminate
        n = order.nvars
        weights = [1] * n
        for i in order.eliminate:
            weights[i] = 0
        self.weights = tuple(weights)
        self.unweighted = not order.eliminate

    def enc(self, e: tuple) -> tuple:
        if self.plain:
            return (-sum(e),) + e
        return tuple(-v for v in self.order.encode(e))

    def dec(self, k: tuple) -> tuple:
        if self.plain:
            return k[1:]
        return self.order.decode(tuple(-v for v in k))

    def wdeg(self, e: tuple) -> int:
        if self.unweighted:
            return sum(e)
        return sum(a * w for a, w in zip(e, self.weights))


def _mask(e: tuple) -> int:
    m = 0
    for i, v in enumerate(e):
        if v:
            m |= 1 << i
    return m


class _Term:
    """A polynomial in engine form: keys/coeffs leading term first."""

    __slots__ = ("keys", "coeffs", "lead", "mask", "inv")

    def __init__(self, keys, coeffs, lead, inv):
        self.keys = keys
        self.coeffs = coeffs
        self.lead = lead
        self.mask = _mask(lead)
        self.inv = inv


class _Engine:
    def __init__(self, ring: RingContext, order: MonomialOrder):
        if order.nvars != ring.nvars:
            raise RingError("order and ring disagree on the number of variables")
        self.ring = ring
        self.order = order
        self.codec = _Codec(order)
        self.field = ring.field
        self.p = ring.field.characteristic

    # conversions ----------------------------------------------------------

    def load(self, f: Polynomial) -> _Term:
        if f.ring != self.ring:
            raise RingError(f"context mismatch: {f.ring} vs {self.ring}")
        enc = self.codec.enc
        items = sorted((enc(e), c) for e, c in f.terms.items())
        return self._make([k for k, _ in items], [c for _, c in items])

    def _make(self, keys, coeffs) -> _Term:
        lead = self.codec.dec(keys[0])
        return _Term(keys, coeffs, lead, self.field.inv(coeffs[0]))

    def dump(self, t: _Term) -> Polynomial:
        dec = self.codec.dec
        return Polynomial(self.ring, {dec(k): c for k, c in zip(t.keys, t.coeffs)})

    def monic(self, keys, coeffs) -> _Term:
        inv = self.field.inv(coeffs[0])
        p = self.p
        if p:
            coeffs = [c * inv % p for c in coeffs]
        else:
            coeffs = [c * inv for c in coeffs]
        t = _Term(keys, coeffs, self.codec.dec(keys[0]), self.field.one)
        return t

    # normal form ----------------------------------------------------------

    def normal_form(self, terms: dict, reducers: Sequence[_Term], quotients=None):
        """Fully reduce ``terms`` (consumed) by ``reducers``.

        Returns the remainder as ``(keys, coeffs)`` in descending order.  When
        ``quotients`` is a list of dicts, the multiplier applied to each
        reducer is accumulated there keyed by shift key.
        """
        heap = list(terms)
        heapq.heapify(heap)
        p = self.p
        dec = self.codec.dec
        rkeys, rcoeffs = [], []
        pop, push = heapq.heappop, heapq.heappush
        get = terms.get
        while heap:
            k = pop(heap)
            c = terms.pop(k, None)
            if c is None:
                continue
            e = dec(k)
            m = _mask(e)
            hit = None
            for idx, g in enumerate(reducers):
                if g.mask & ~m:
                    continue
                if all(map(le, g.lead, e)):
                    hit = idx
                    break
            if hit is None:
                rkeys.append(k)
                rcoeffs.append(c)
                continue
            g = reducers[hit]
            q = c * g.inv
            if p:
                q %= p
            shift = tuple(map(sub, k, g.keys[0]))
            if quotients is not None:
                qd = quotients[hit]
                old = qd.get(shift)
                v = q if old is None else old + q
                if p:
                    v %= p
                if v:
                    qd[shift] = v
                else:
                    qd.pop(shift, None)
            gk, gc = g.keys, g.coeffs
            for i in range(1, len(gk)):
                nk = tuple(map(add, gk[i], shift))
                old = get(nk)
                if old is None:
                    v = -q * gc[i]
                    if p:
                        v %= p
                    terms[nk] = v
                    push(heap, nk)
                else:
                    v = old - q * gc[i]
                    if p:
                        v %= p
                    if v:
                        terms[nk] = v
                    else:
                        del terms[nk]
        return rkeys, rcoeffs

    def reduce_term(self, t: _Term, reducers: Sequence[_Term]) -> _Term | None:
        rk, rc = self.normal_form(dict(zip(t.keys, t.coeffs)), reducers)
        if not rk:
            return None
        return self.monic(rk, rc)

    # S-polynomials --------------------------------------------------------

    def spoly_terms(self, f: _Term, g: _Term, lcm: tuple) -> dict:
        """Terms of lcm/lt(f)*f - lcm/lt(g)*g with the leading terms cancelled."""
        p = self.p
        lk = self.codec.enc(lcm)
        sf = tuple(map(sub, lk, f.keys[0]))
        sg = tuple(map(sub, lk, g.keys[0]))
        cf, cg = f.inv, g.inv
        terms: dict = {}
        for k, c in zip(f.keys[1:], f.coeffs[1:]):
            v = c * cf
            terms[tuple(map(add, k, sf))] = v % p if p else v
        for k, c in zip(g.keys[1:], g.coeffs[1:]):
            nk = tuple(map(add, k, sg))
            v = terms.get(nk, 0) - c * cg
            if p:
                v %= p
            if v:
                terms[nk] = v
            else:
                terms.pop(nk, None)
        return terms

    # Buchberger -----------------------------------------------------------

    def buchberger(self, inputs: Sequence[_Term], criteria: bool = True) -> list:
        basis: list = []      # every polynomial ever added
        current: list = []    # indices forming the running basis
        pairs: list = []      # (selection key, i, j, lcm)
        wdeg = self.codec.wdeg
        enc = self.codec.enc

        def make_pair(i, j):
            lcm = tuple(map(max, basis[i].lead, basis[j].lead))
            return (wdeg(lcm), _rev(enc(lcm)), i, j, lcm)

        def add_poly(h: _Term):
            nonlocal current, pairs
            basis.append(h)
            ih = len(basis) - 1
            if not criteria:
                pairs.extend(make_pair(ig, ih) for ig in current)
                current.append(ih)
                return
            current, pairs = self._update(basis, current, pairs, ih, make_pair)

        for t in inputs:
            h = self.reduce_term(t, [basis[i] for i in current])
            if h is not None:
                add_poly(h)

        while pairs:
            best = min(range(len(pairs)), key=lambda a: pairs[a][:4])
            _, _, i, j, lcm = pairs[best]
            pairs[best] = pairs[-1]
            pairs.pop()
            terms = self.spoly_terms(basis[i], basis[j], lcm)
            if not terms:
                continue
            rk, rc = self.normal_form(terms, [basis[a] for a in current])
            if rk:
                add_poly(self.monic(rk, rc))

        return self.finalize([basis[i] for i in current])

    @staticmethod
    def _update(basis, current, pairs, ih, make_pair):
        """Gebauer-Moeller installation of basis[ih]."""
        h = basis[ih]
        mh = h.lead

        def lcm_of(a, b):
            return tuple(map(max, a, b))

        def divides(a, b):
            return all(map(le, a, b))

        def coprime(a, b):
            return not any(x and y for x, y in zip(a, b))

        cand = list(current)
        kept = []
        while cand:
            ig = cand.pop(0)
            mg = basis[ig].lead
            lhg = lcm_of(mh, mg)
            if coprime(mh, mg):
                kept.append(ig)
                continue
            dominated = any(divides(lcm_of(mh, basis[o].lead), lhg) for o in cand) or \
                any(divides(lcm_of(mh, basis[o].lead), lhg) for o in kept)
            if not dominated:
                kept.append(ig)
        new_pairs = [make_pair(ig, ih) for ig in kept if not coprime(mh, basis[ig].lead)]

        survivors = []
        for pr in pairs:
            _, _, i1, i2, l12 = pr
            if (not divides(mh, l12)
                    or lcm_of(basis[i1].lead, mh) == l12
                    or lcm_of(basis[i2].lead, mh) == l12):
                survivors.append(pr)
        survivors.extend(new_pairs)

        keep = [ig for ig in current if not divides(mh, basis[ig].lead)]
        keep.append(ih)
        return keep, survivors

    def finalize(self, polys: Sequence[_Term]) -> list:
        """Minimalize and interreduce a Groebner basis; leading term descending."""
        polys = list(polys)
        minimal = []
        for a, t in enumerate(polys):
            redundant = False
            for b, s in enumerate(polys):
                if a == b:
                    continue
                if all(map(le, s.lead, t.lead)) and (s.lead != t.lead or b < a):
                    redundant = True
                    break
            if not redundant:
                minimal.append(t)
        minimal.sort(key=lambda t: t.keys[0])
        out = []
        for a, t in enumerate(minimal):
            others = minimal[:a] + minimal[a + 1:]
            tail = dict(zip(t.keys[1:], t.coeffs[1:]))
            rk, rc = self.normal_form(tail, others)
            keys = [t.keys[0]] + rk
            coeffs = [t.coeffs[0]] + rc
            out.append(self.monic(keys, coeffs))
        return out


def _rev(k: tuple) -> tuple:
    """Undo the key negation: ascending in the monomial order."""
    return tuple(-v for v in k)


# --------------------------------------------------------------------------
# public API
# --------------------------------------------------------------------------

def _resolve_order(ring: RingContext, order) -> MonomialOrder:
    if order is None:
        return ring.order
    if isinstance(order, MonomialOrder):
        return order
    return MonomialOrder(str(order), ring.nvars)


def reduce(f: Polynomial, G: Sequence[Polynomial], order=None):
    """Multivariate division of ``f`` by ``G``.

    Returns ``(quotients, remainder)`` with ``f == sum(q*g) + remainder`` and no
    term of the remainder divisible by a leading monomial of ``G``.  The first
    divisor in list order whose leading monomial divides the current term is
    used.
    """
    G = list(G)
    if not G:
        raise ValueError("need at least one divisor")
    ring = f.ring
    order = _resolve_order(ring, order)
    eng = _Engine(ring, order)
    loaded = []
    for g in G:
        if g.is_zero():
            raise ValueError("zero divisor in reduce")
        loaded.append(eng.load(g))
    terms = {eng.codec.enc(e): c for e, c in f.terms.items()}
    quot = [{} for _ in G]
    rk, rc = eng.normal_form(terms, loaded, quot)
    dec = eng.codec.dec
    quotients = [Polynomial(ring, {dec(k): c for k, c in q.items()}) for q in quot]
    remainder = Polynomial(ring, {dec(k): c for k, c in zip(rk, rc)})
    return quotients, remainder


def s_polynomial(f: Polynomial, g: Polynomial, order=None) -> Polynomial:
    """lcm/lt(f)*f - lcm/lt(g)*g."""
    if f.is_zero() or g.is_zero():
        raise ValueError("S-polynomial of a zero polynomial")
    if f.ring != g.ring:
        raise RingError("context mismatch")
    order = _resolve_order(f.ring, order)
    eng = _Engine(f.ring, order)
    tf, tg = eng.load(f), eng.load(g)
    lcm = tuple(map(max, tf.lead, tg.lead))
    terms = eng.spoly_terms(tf, tg, lcm)
    dec = eng.codec.dec
    return Polynomial(f.ring, {dec(k): c for k, c in terms.items()})


class GroebnerBasis:
    """A reduced Groebner basis: monic, autoreduced, sorted by leading term (descending)."""

    def __init__(self, ring: RingContext, order: MonomialOrder, terms: list, engine: _Engine):
        self.ring = ring
        self.order = order
        self._engine = engine
        self._terms = terms
        self.elements = [engine.dump(t) for t in terms]

    @classmethod
    def from_reduced(cls, ring: RingContext, order: MonomialOrder, polys: Iterable[Polynomial],
                     *, finalize: bool = True) -> "GroebnerBasis":
        """Wrap polynomials already known to form a Groebner basis."""
        eng = _Engine(ring, order)
        terms = [eng.load(f) for f in polys if not f.is_zero()]
        if finalize:
            terms = eng.finalize(terms)
        return cls(ring, order, terms, eng)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other):
        if not isinstance(other, GroebnerBasis):
            return NotImplemented
        return self.ring == other.ring and self.order == other.order and self.elements == other.elements

    def __hash__(self):
        return hash((self.ring, self.order, tuple(self.elements)))

    def leading_monomials(self) -> list:
        return [t.lead for t in self._terms]

    def is_unit(self) -> bool:
        return len(self._terms) == 1 and not any(self._terms[0].lead)

    def normal_form(self, f: Polynomial) -> Polynomial:
        if f.ring != self.ring:
            raise RingError(f"context mismatch: {f.ring} vs {self.ring}")
        eng = self._engine
        terms = {eng.codec.enc(e): c for e, c in f.terms.items()}
        rk, rc = eng.normal_form(terms, self._terms)
        dec = eng.codec.dec
        return Polynomial(self.ring, {dec(k): c for k, c in zip(rk, rc)})

    def contains(self, f: Polynomial) -> bool:
        if f.is_zero():
            return True
        eng = self._engine
        terms = {eng.codec.enc(e): c for e, c in f.terms.items()}
        rk, _ = eng.normal_form(terms, self._terms)
        return not rk

    def spoly_residues(self, limit: int | None = None, rng=None) -> list:
        """Normal forms of S-polynomials over the basis (all pairs, or a random sample)."""
        eng = self._engine
        idx = list(combinations(range(len(self._terms)), 2))
        if limit is not None and len(idx) > limit:
            rng = rng or __import__("random").Random(0)
            idx = rng.sample(idx, limit)
        out = []
        for i, j in idx:
            a, b = self._terms[i], self._terms[j]
            lcm = tuple(map(max, a.lead, b.lead))
            terms = eng.spoly_terms(a, b, lcm)
            rk, rc = eng.normal_form(terms, self._terms)
            if rk:
                dec = eng.codec.dec
                out.append(Polynomial(self.ring, {dec(k): c for k, c in zip(rk, rc)}))
        return out

    def is_groebner(self, limit: int | None = None) -> bool:
        return not self.spoly_residues(limit)

    def is_reduced(self) -> bool:
        eng = self._engine
        dec = eng.codec.dec
        for a, t in enumerate(self._terms):
            if t.coeffs[0] != eng.field.one:
                return False
            for b, s in enumerate(self._terms):
                if a == b:
                    continue
                for k in t.keys:
                    if all(map(le, s.lead, dec(k))):
                        return False
        return True

    def to_dict(self) -> dict:
        return {"order": self.order.descriptor(), "elements": [str(f) for f in self.elements]}

    def __repr__(self):
        return f"GroebnerBasis({[str(f) for f in self.elements]})"


_recorders: list = []


@contextmanager
def record_bases():
    """Collect ``(generators, order, basis)`` for every Buchberger run inside the block."""
    log: list = []
    _recorders.append(log)
    try:
        yield log
    finally:
        # By identity: nested logs can compare equal.
        del _recorders[next(i for i, r in enumerate(_recorders) if r is log)]


def buchberger(gens: Iterable[Polynomial], order=None, *, criteria: bool = True,
               ring: RingContext | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of ``gens`` by Buchberger's algorithm.

    With ``criteria`` the Gebauer-Moeller installation discards pairs by the
    coprime-leading-monomial and chain criteria; without it every pair is
    reduced, which serves as a slow reference oracle.
    """
    gens = list(gens)
    if ring is None:
        if not gens:
            raise ValueError("cannot infer the ring of an empty generator list")
        ring = gens[0].ring
    order = _resolve_order(ring, order)
    eng = _Engine(ring, order)
    loaded = [eng.load(g) for g in gens if not g.is_zero()]
    # Sort by selection degree so low-degree generators reduce later ones.
    loaded.sort(key=lambda t: (eng.codec.wdeg(t.lead), _rev(t.keys[0])))
    terms = eng.buchberger(loaded, criteria=criteria)
    basis = GroebnerBasis(ring, order, terms, eng)
    for log in _recorders:
        log.append((gens, order, basis))
    return basis


class Ideal:
    """Generators in a ring together with cached reduced Groebner bases."""

    def __init__(self, ring: RingContext, generators: Iterable[Polynomial] = (), name: str | None = None):
        gens = []
        for g in generators:
            if g.ring != ring:
                raise RingError(f"generator from {g.ring} in ideal of {ring}")
            if not g.is_zero():
                gens.append(g)
        self.ring = ring
        self.generators = gens
        self.name = name
        self._gb: dict = {}

    @property
    def ctx(self) -> RingContext:
        return self.ring

    @property
    def cached_gb(self):
        return self._gb.get(self.ring.order)

    def gb(self, order=None) -> GroebnerBasis:
        order = _resolve_order(self.ring, order)
        hit = self._gb.get(order)
        if hit is None:
            hit = buchberger(self.generators, order, ring=self.ring)
            self._gb[order] = hit
        return hit

    def seed_gb(self, basis: GroebnerBasis) -> "Ideal":
        self._gb[basis.order] = basis
        return self

    def reduced(self) -> "Ideal":
        """The same ideal generated by its reduced Groebner basis."""
        gb = self.gb()
        return Ideal(self.ring, gb.elements, self.name).seed_gb(gb)

    def contains(self, f: Polynomial) -> bool:
        return self.gb().contains(f)

    __contains__ = contains

    def normal_form(self, f: Polynomial) -> Polynomial:
        return self.gb().normal_form(f)

    def is_zero(self) -> bool:
        return not self.generators

    def is_unit(self) -> bool:
        return bool(self.generators) and self.gb().is_unit()

    def issubset(self, other: "Ideal") -> bool:
        return all(other.contains(g) for g in self.generators)

    def equals(self, other: "Ideal") -> bool:
        """Ideal equality via reduced Groebner bases."""
        if other.ring != self.ring:
            raise RingError("context mismatch")
        return self.gb().elements == other.gb().elements

    def witness_difference(self, other: "Ideal"):
        """A generator in one ideal but not the other, or None."""
        for g in self.gb().elements:
            if not other.contains(g):
                return g
        for g in other.gb().elements:
            if not self.contains(g):
                return g
        return None

    def __add__(self, other: "Ideal") -> "Ideal":
        if other.ring != self.ring:
            raise RingError("context mismatch")
        return Ideal(self.ring, self.generators + other.generators)

    def __mul__(self, other: "Ideal") -> "Ideal":
        if other.ring != self.ring:
            raise RingError("context mismatch")
        return Ideal(self.ring, _dedupe(a * b for a in self.generators for b in other.generators))

    def power(self, k: int) -> "Ideal":
        result = Ideal(self.ring, [self.ring.one()])
        for _ in range(k):
            result = result * self
        return result

    def scaled(self, f: Polynomial) -> "Ideal":
        return Ideal(self.ring, [f * g for g in self.generators])

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def to_list(self) -> list:
        return [str(g) for g in self.generators]

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    @classmethod
    def from_json(cls, text: str, ring: RingContext) -> "Ideal":
        from .ring import parse_poly
        return cls(ring, [parse_poly(s, ring) for s in json.loads(text)])

    def __repr__(self):
        label = f"{self.name}=" if self.name else ""
        return f"Ideal({label}{self.to_list()})"


def _dedupe(polys) -> list:
    seen, out = set(), []
    for f in polys:
        if f and f not in seen:
            seen.add(f)
            out.append(f)
    return out


def ideal_member(f: Polynomial, I: Ideal) -> bool:
    return I.contains(f)


def eliminate(I: Ideal, drop_vars: Iterable[str], target: RingContext | None = None) -> Ideal:
    """``I`` intersected with the subring omitting ``drop_vars``.

    Uses a lex block on the dropped variables over the ring's order on the
    rest.  When ``target`` is given (a ring whose names are the kept
    variables, as a prefix of ``I.ring``) the result lives there and comes
    with its reduced Groebner basis already cached.
    """
    ring = I.ring
    drop = {ring.index(v) for v in drop_vars}
    if not drop:
        return Ideal(ring, I.generators)
    order = MonomialOrder(ring.order.kind, ring.nvars, tuple(drop))
    gb = I.gb(order)
    kept = [f for f in gb.elements if not any(e[i] for e in f.terms for i in drop)]
    if target is None:
        return Ideal(ring, kept)
    if ring.order.kind != target.order.kind:
        raise RingError("target ring must share the order kind")
    restricted = [target.restrict(f) for f in kept]
    out = Ideal(target, restricted)
    keep_idx = [i for i in range(ring.nvars) if i not in drop]
    if keep_idx == list(range(target.nvars)):
        out.seed_gb(GroebnerBasis.from_reduced(target, target.order, restricted, finalize=False))
    return out
