"""Defining ideals of Rees algebras of almost linearly presented ideals.

The input is an ``n x (n-1)`` matrix ``phi`` over ``k[x, y, z]`` whose first
``n-2`` columns are linear and whose last column is quadratic.  Everything
happens in ``S = k[x, y, z, w0, ..., w_{n-1}]``:

* ``L`` is the symmetric-algebra ideal generated by ``[w0 .. w_{n-1}] * phi``.
* The defining ideal ``A`` is computed twice: by saturating ``L`` at
  ``(x, y)`` and by the closed-form constructions, which are then compared.

Quotient-ring ideals of ``B = S / J`` are represented by their preimages in
``S`` (``J`` is always added), and division by a nonzerodivisor of ``B`` is
realized as a colon.

Branch labels used throughout:

===============  =============================================================
``I.L.reg``      Case I, pencil a single L' block, w0 not in I2(B(phi''))
``I.L.zd``       Case I, pencil a single L' block, w0 in I2(B(phi''))
``I.M2``         Case I, L' block plus one M block of size >= 2
``I.M1.reg``     Case I, L' block plus M1, w0 not in I2(B(phi''))
``I.M1.zd``      Case I, L' block plus M1, w0 in I2(B(phi''))
``II.*``         the same five splits for Case II
``III``          Case III (z^2 in the last column)
===============  =============================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from .groebner import Ideal
from .ideals import (PreconditionError, colon, colon_element, gs_check, gs_profile, height,
                     height_in_base, min_prime_check, minor_ideal, radical_member, saturate)
from .pencil import PencilInvariants, classify_phi_prime, pencil_from_matrix
from .ring import PolyMatrix, Polynomial, RingContext


class ReesError(ValueError):
    pass


class ValidationError(ReesError):
    pass


class NotNormalized(ReesError):
    pass


class NormalizationFailed(ReesError):
    pass


class FrameMismatch(ReesError):
    pass


class UnsupportedSubcase(ReesError):
    pass


class MethodMismatch(ReesError):
    def __init__(self, message: str, witness: Polynomial | None = None):
        super().__init__(message if witness is None else f"{message}; witness {witness}")
        self.witness = witness


BRANCHES = ("I.L.reg", "I.L.zd", "I.M2", "I.M1.reg", "I.M1.zd",
            "II.L.reg", "II.L.zd", "II.M2", "II.M1.reg", "II.M1.zd", "III")


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------

@dataclass
class SettingReport:
    checks: dict
    witness: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failures(self) -> list:
        return [k for k, v in self.checks.items() if not v]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": dict(self.checks), "witness": dict(self.witness),
                "info": dict(self.info)}


@dataclass
class CaseLabel:
    case: str
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"case": self.case, "evidence": dict(self.evidence)}


@dataclass
class JacobianDual:
    frame: tuple          # frame generators as polynomials
    frame_names: tuple    # their printed names
    matrix: PolyMatrix
    source: str

    def to_dict(self) -> dict:
        return {"frame": list(self.frame_names), "source": self.source,
                "matrix": self.matrix.to_dict()}


@dataclass
class AlphaSystem:
    A: PolyMatrix
    g1: Polynomial
    g2: Polynomial
    alphas: list          # alphas[i] is alpha_{i+1}
    cijs: dict            # (i, j) 1-based -> c_ij
    alpha_x: list
    alpha_y: list

    def alpha(self, i: int) -> Polynomial:
        """1-based access, raising UnsupportedSubcase past the end."""
        if not 1 <= i <= len(self.alphas):
            raise UnsupportedSubcase(f"alpha_{i} needed but only {len(self.alphas)} exist")
        return self.alphas[i - 1]


@dataclass
class ColonCheck:
    holds: bool
    exponent: int
    exponent_ok: bool
    frame: str

    def to_dict(self) -> dict:
        return {"holds": self.holds, "exponent": self.exponent, "exponent_ok": self.exponent_ok,
                "frame": self.frame}


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _base_ring(ring: RingContext) -> RingContext:
    return RingContext(("x", "y", "z"), ring.field, ring.order.kind)


def _is_form(f: Polynomial, deg: int, base_idx: int = 3) -> bool:
    return all(sum(e) == deg and not any(e[base_idx:]) for e in f.terms)


def _coeff(f: Polynomial, name_exps: dict):
    e = [0] * f.ring.nvars
    for nm, k in name_exps.items():
        e[f.ring.index(nm)] = k
    return f.coefficient(e)


def _scalar_rank(rows: list, fld) -> int:
    m = [list(r) for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = fld.inv(m[rank][col])
        for i in range(len(m)):
            if i != rank and m[i][col]:
                f = fld.normal(m[i][col] * inv)
                m[i] = [fld.normal(a - f * b) for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def _scalar_inverse(P: list, fld) -> list:
    """Inverse of an invertible scalar matrix by Gauss-Jordan elimination."""
    n = len(P)
    M = [list(r) + [fld.one if i == j else fld.zero for j in range(n)] for i, r in enumerate(P)]
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c])
        M[c], M[piv] = M[piv], M[c]
        inv = fld.inv(M[c][c])
        M[c] = [fld.normal(v * inv) for v in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [fld.normal(a - f * b) for a, b in zip(M[r], M[c])]
    return [r[n:] for r in M]


def _dedupe(polys) -> list:
    seen, out = set(), []
    for f in polys:
        if f.is_zero():
            continue
        key = f.monic()
        if key not in seen:
            seen.add(key)
            out.append(f)
    return out


def _require_equal(left: Ideal, right: Ideal, what: str):
    if not left.equals(right):
        raise MethodMismatch(f"{what}: the two computations disagree",
                             left.witness_difference(right))


# --------------------------------------------------------------------------
# validation, shape and case
# --------------------------------------------------------------------------

def validate_setting(phi: PolyMatrix) -> SettingReport:
    """Check the standing hypotheses on ``phi``; failures are report entries."""
    ring = phi.ring
    fld = ring.field
    n = phi.rows
    checks, witness, info = {}, {}, {}

    checks["mu_gt_4"] = n > 4
    if not checks["mu_gt_4"]:
        witness["mu_gt_4"] = f"n = {n}"
    shape_ok = phi.cols == n - 1 and n >= 3
    if not shape_ok:
        witness["almost_linear"] = f"matrix is {phi.rows} x {phi.cols}, expected n x (n-1)"

    bad = None
    if shape_ok:
        for i in range(n):
            for j in range(phi.cols):
                f = phi[i, j]
                deg = 2 if j == phi.cols - 1 else 1
                if not f.is_zero() and not _is_form(f, deg):
                    bad = (i, j, f)
                    break
            if bad:
                break
    checks["almost_linear"] = shape_ok and bad is None
    if bad:
        witness["almost_linear"] = f"entry ({bad[0] + 1},{bad[1] + 1}) = {bad[2]}"

    if not checks["almost_linear"]:
        for key in ("height_two_perfect", "i1_is_m", "rank_mod_xy_le_1", "g2_not_g3"):
            checks[key] = False
            witness.setdefault(key, "skipped: matrix is not almost linear")
        return SettingReport(checks, witness, info)

    base = _base_ring(ring)
    ht = height_in_base(phi, minor_ideal(phi, n - 1))
    checks["height_two_perfect"] = ht == 2
    info["height_max_minors"] = ht
    if ht != 2:
        witness["height_two_perfect"] = f"height of maximal minors is {ht}"

    entries = [base.restrict(f) for f in phi.entries if not f.is_zero()]
    i1 = Ideal(base, entries)
    primary = bool(entries) and all(radical_member(v, i1) for v in base.gens())
    checks["i1_is_m"] = primary
    info["i1_equals_m"] = primary and i1.equals(Ideal(base, base.gens()))
    if not primary:
        witness["i1_is_m"] = "I1(phi) is not primary to (x, y, z)"

    z_only = []
    for i in range(n):
        row = []
        for j in range(phi.cols):
            f = phi[i, j]
            deg = 2 if j == phi.cols - 1 else 1
            row.append(_coeff(f, {"z": deg}))
        z_only.append(row)
    rank = _scalar_rank(z_only, fld)
    checks["rank_mod_xy_le_1"] = rank <= 1
    info["rank_mod_xy"] = rank
    if rank > 1:
        witness["rank_mod_xy_le_1"] = f"rank {rank} modulo (x, y)"

    try:
        g2 = gs_check(phi, 2)
        g3 = gs_check(phi, 3)
        checks["g2_not_g3"] = g2 and not g3
        info["gs_profile"] = gs_profile(phi, 3)
        if not checks["g2_not_g3"]:
            witness["g2_not_g3"] = f"G2 = {g2}, G3 = {g3}"
    except PreconditionError as exc:
        checks["g2_not_g3"] = False
        witness["g2_not_g3"] = str(exc)
    info["min_prime_xy"] = min_prime_check(phi) if checks["height_two_perfect"] else False
    return SettingReport(checks, witness, info)


def _z_matrix(phi: PolyMatrix) -> list:
    """Coefficient of z in each linear column entry."""
    return [[_coeff(phi[i, j], {"z": 1}) for j in range(phi.cols - 1)] for i in range(phi.rows)]


def _z2_column(phi: PolyMatrix) -> list:
    last = phi.cols - 1
    return [_coeff(phi[i, last], {"z": 2}) for i in range(phi.rows)]


def normalize_shape(phi: PolyMatrix) -> PolyMatrix:
    """Move phi into one of the three normal shapes by scalar row/column moves.

    The z entry of the linear columns is moved to the top of the last linear
    column; z^2 in the last column is cleared against it when both are
    present, and otherwise isolated in the top row.  Coordinate changes of
    k[x, y, z] are not attempted.
    """
    return normalize_with_transform(phi)[0]


def normalize_with_transform(phi: PolyMatrix):
    """``(psi, P)`` with ``psi`` the normalized matrix and ``psi = P * phi * (column moves)``.

    Only the scalar row transform ``P`` changes the symmetric ideal (by the
    substitution ``w -> w P``); column moves leave it fixed.
    """
    ring = phi.ring
    fld = ring.field
    rows = phi.to_rows()
    n, m = phi.rows, phi.cols
    P = [[fld.one if i == j else fld.zero for j in range(n)] for i in range(n)]
    lin = m - 1
    z = ring.var("z")

    def zmat():
        return [[_coeff(rows[i][j], {"z": 1}) for j in range(lin)] for i in range(n)]

    def z2col():
        return [_coeff(rows[i][lin], {"z": 2}) for i in range(n)]

    def row_clear(vec):
        piv = next(i for i, v in enumerate(vec) if v)
        rows[0], rows[piv] = rows[piv], rows[0]
        P[0], P[piv] = P[piv], P[0]
        vec = list(vec)
        vec[0], vec[piv] = vec[piv], vec[0]
        inv = fld.inv(vec[0])
        for i in range(1, n):
            if vec[i]:
                c = fld.normal(vec[i] * inv)
                rows[i] = [a - b.scale(c) for a, b in zip(rows[i], rows[0])]
                P[i] = [fld.normal(a - c * b) for a, b in zip(P[i], P[0])]

    Z = zmat()
    if _scalar_rank(Z, fld) > 1:
        raise NormalizationFailed("z appears with rank > 1 in the linear columns")
    if any(any(r) for r in Z):
        col_vec = next(r for r in Z if any(r))
        # row coefficients of the rank-one z pattern
        ref_j = next(j for j, v in enumerate(col_vec) if v)
        u = [Z[i][ref_j] for i in range(n)]
        row_clear(u)
        Z = zmat()
        v = Z[0]
        piv = next(j for j, c in enumerate(v) if c)
        for r in rows:
            r[piv], r[lin - 1] = r[lin - 1], r[piv]
        v[piv], v[lin - 1] = v[lin - 1], v[piv]
        inv = fld.inv(v[lin - 1])
        for j in range(lin - 1):
            if v[j]:
                c = fld.normal(v[j] * inv)
                for r in rows:
                    r[j] = r[j] - r[lin - 1].scale(c)
        for r in rows:
            r[lin - 1] = r[lin - 1].scale(inv)
        if any(any(r) for r in zmat()[1:]) or any(zmat()[0][:lin - 1]):
            raise NormalizationFailed("could not isolate the z entry")
        v2 = z2col()
        if any(v2[1:]):
            raise NormalizationFailed("z^2 outside the top row of the last column")
        if v2[0]:
            c = v2[0]
            for r in rows:
                r[lin] = r[lin] - (z * r[lin - 1]).scale(c)
            if any(z2col()):
                raise NormalizationFailed("third-form reduction left a z^2 term")
    else:
        v2 = z2col()
        if not any(v2):
            raise NormalizationFailed("neither z in a linear column nor z^2 in the last column")
        row_clear(v2)
        v2 = z2col()
        inv = fld.inv(v2[0])
        for r in rows:
            r[lin] = r[lin].scale(inv)
    return PolyMatrix.from_rows(ring, rows), P


def _shape(phi: PolyMatrix) -> str:
    """'III', 'z-column' or '' (not normalized)."""
    n, lin = phi.rows, phi.cols - 1
    Z = _z_matrix(phi)
    v2 = _z2_column(phi)
    if not any(any(r) for r in Z):
        if v2[0] and not any(v2[1:]):
            return "III"
        return ""
    nz = [(i, j) for i in range(n) for j in range(lin) if Z[i][j]]
    if nz == [(0, lin - 1)] and not any(v2):
        return "z-column"
    return ""


def symmetric_ideal(phi: PolyMatrix) -> Ideal:
    """L = I1([w0 .. w_{n-1}] * phi)."""
    return Ideal(phi.ring, _symmetric_forms(phi), name="L")


def _symmetric_forms(phi: PolyMatrix) -> list:
    ring = phi.ring
    w = [ring.w(i) for i in range(phi.rows)]
    out = []
    for j in range(phi.cols):
        l = ring.zero()
        for i in range(phi.rows):
            if phi[i, j]:
                l = l + w[i] * phi[i, j]
        if l.is_zero():
            raise ValidationError(f"column {j + 1} is zero; the presentation is not minimal")
        out.append(l)
    return out


def classify_case(phi: PolyMatrix) -> CaseLabel:
    shape = _shape(phi)
    if not shape:
        raise NotNormalized("matrix is not in a normal shape; run normalize_shape first")
    if shape == "III":
        return CaseLabel("III", {"z2_row": 1, "z_free_linear_columns": True})
    ring = phi.ring
    l_last = _symmetric_forms(phi)[-1]
    x, y, z = ring.var("x"), ring.var("y"), ring.var("z")
    U = Ideal(ring, [x, y, z * ring.w(0)])
    member = U.power(2).contains(l_last)
    return CaseLabel("I" if member else "II",
                     {"l_last_in_U_squared": member, "l_last": str(l_last)})


# --------------------------------------------------------------------------
# Jacobian duals
# --------------------------------------------------------------------------

FRAMES = {"zw0": ("x", "y", "z*w0"), "z2w0": ("x", "y", "z^2*w0"), "xy": ("x", "y")}


def _frame_key(frame) -> str:
    if isinstance(frame, str):
        key = frame.replace(" ", "").replace("(", "").replace(")", "").replace(",", "")
        aliases = {"xyzw0": "zw0", "zw0": "zw0", "xyz*w0": "zw0", "xyz2w0": "z2w0",
                   "z2w0": "z2w0", "xyz^2*w0": "z2w0", "xy": "xy"}
        if key in aliases:
            return aliases[key]
    raise FrameMismatch(f"unknown frame {frame!r}")


def jacobian_dual(phi: PolyMatrix, frame="zw0", source: str = "phi") -> JacobianDual:
    """B with [w] * phi = frame * B, extracted term by term.

    Terms divisible by the third frame generator go to the last row; the rest
    go to the y row when divisible by y, else to the x row.
    """
    key = _frame_key(frame)
    names = FRAMES[key]
    ring = phi.ring
    ix, iy, iz, iw0 = (ring.index(v) for v in ("x", "y", "z", "w0"))
    zpow = {"zw0": 1, "z2w0": 2, "xy": None}[key]
    forms = _symmetric_forms(phi)
    nrows = len(names)
    cols = [[{} for _ in range(nrows)] for _ in forms]
    for j, l in enumerate(forms):
        for e, c in l.terms.items():
            e = list(e)
            if zpow is not None and e[iz] >= zpow and e[iw0] >= 1:
                e[iz] -= zpow
                e[iw0] -= 1
                r = 2
            elif e[iy]:
                e[iy] -= 1
                r = 1
            elif e[ix]:
                e[ix] -= 1
                r = 0
            else:
                raise FrameMismatch(f"l_{j + 1} = {l} is not in the ideal {names}")
            cols[j][r][tuple(e)] = c
    entries = [Polynomial(ring, cols[j][r]) for r in range(nrows) for j in range(len(forms))]
    B = PolyMatrix(nrows, len(forms), tuple(entries), ring)
    frame_polys = tuple(ring.parse(s) for s in names)
    for j, l in enumerate(forms):
        total = ring.zero()
        for r in range(nrows):
            total = total + frame_polys[r] * B[r, j]
        if total != l:
            raise FrameMismatch(f"Jacobian dual identity fails in column {j + 1}")
    return JacobianDual(frame_polys, names, B, source)


def alpha_system(Bpp: JacobianDual) -> AlphaSystem:
    """alpha_i, c_ij and the alpha_x / alpha_y linear forms from B(phi'')."""
    B = Bpp.matrix
    m = B.cols
    last = m - 1
    if B.rows != 3:
        raise FrameMismatch("alpha system needs the (x, y, z*w0) frame")
    for j in range(m):
        expect = B.ring.one() if j == last else B.ring.zero()
        if B[2, j] != expect:
            raise FrameMismatch("last row of B(phi'') must be [0 ... 0 1]")
    A = B.submatrix([0, 1], range(m))
    g1, g2 = A[0, last], A[1, last]
    alphas = [A[0, i] * g2 - A[1, i] * g1 for i in range(last)]
    cijs = {}
    for i in range(last):
        for j in range(i + 1, last):
            cijs[(i + 1, j + 1)] = A[0, i] * A[1, j] - A[1, i] * A[0, j]
    # x * alpha_i = z*w0 * A[1][i] and y * alpha_i = -z*w0 * A[0][i] modulo (l_i, l_{n-2}).
    alpha_x = [A[1, i] for i in range(last)]
    alpha_y = [-A[0, i] for i in range(last)]
    return AlphaSystem(A, g1, g2, alphas, cijs, alpha_x, alpha_y)


# --------------------------------------------------------------------------
# the problem object
# --------------------------------------------------------------------------

class ReesProblem:
    """All derived objects of one normalized instance, computed lazily."""

    def __init__(self, phi: PolyMatrix, *, normalize: bool = True):
        self.original = phi
        self.row_transform = None
        self.phi = phi
        if normalize and not _shape(phi):
            self.phi, self.row_transform = normalize_with_transform(phi)
        self.ring = phi.ring
        self.n = phi.rows
        self.flags: list = []

    def to_input_coordinates(self, I: Ideal) -> Ideal:
        """Rewrite an ideal in the w-coordinates of the matrix as given.

        Normalization replaced phi by P * phi, which turns L(w) into L(w P);
        the inverse substitution w_i -> sum_j (P^-1)_{ji} w_j undoes it.
        """
        if self.row_transform is None:
            return I
        ring = self.ring
        Q = _scalar_inverse(self.row_transform, ring.field)
        images = {}
        for i in range(self.n):
            img = ring.zero()
            for j in range(self.n):
                if Q[j][i]:
                    img = img + ring.w(j).scale(Q[j][i])
            images[f"w{i}"] = img
        return Ideal(ring, [g.substitute(images) for g in I.generators]).reduced()

    # basic pieces ---------------------------------------------------------

    @cached_property
    def setting(self) -> SettingReport:
        return validate_setting(self.phi)

    @cached_property
    def case(self) -> CaseLabel:
        return classify_case(self.phi)

    @cached_property
    def forms(self) -> list:
        return _symmetric_forms(self.phi)

    @cached_property
    def L(self) -> Ideal:
        return Ideal(self.ring, self.forms, name="L")

    @cached_property
    def phi2(self) -> PolyMatrix:
        """phi'' : phi without its last column."""
        return self.phi.submatrix(range(self.n), range(self.n - 2))

    @cached_property
    def phi_prime(self) -> PolyMatrix:
        return self.phi.submatrix(range(1, self.n), range(self.n - 2))

    @cached_property
    def frame(self) -> str:
        return "z2w0" if self.case.case == "III" else "zw0"

    @cached_property
    def B(self) -> JacobianDual:
        return jacobian_dual(self.phi, self.frame)

    @cached_property
    def Bpp(self) -> JacobianDual:
        return jacobian_dual(self.phi2, "xy" if self.case.case == "III" else "zw0", source="phi''")

    @cached_property
    def alpha(self) -> AlphaSystem:
        self._need_case("I", "II")
        return alpha_system(self.Bpp)

    @cached_property
    def pencil(self) -> PencilInvariants:
        return classify_phi_prime(pencil_from_matrix(self.phi_prime))

    @cached_property
    def I2_Bpp(self) -> Ideal:
        return minor_ideal(self.Bpp.matrix, 2)

    @cached_property
    def w0_in_I2(self) -> bool:
        return self.I2_Bpp.contains(self.ring.w(0))

    @cached_property
    def branch(self) -> str:
        case = self.case.case
        if case == "III":
            return "III"
        summary = self.pencil.summary
        if summary.kind == "SingleLPrime":
            block = "L"
        elif len(summary.m_sizes) > 1:
            block = "multiM"
        elif summary.m_sizes[0] >= 2:
            block = "M2"
        else:
            block = "M1"
        if block == "M2":
            return f"{case}.M2"
        if block == "multiM":
            return f"{case}.multiM"
        return f"{case}.{block}.{'zd' if self.w0_in_I2 else 'reg'}"

    def _need_case(self, *cases):
        if self.case.case not in cases:
            raise ReesError(f"operation needs Case {' or '.join(cases)}, instance is Case {self.case.case}")

    # J, K and their relatives -------------------------------------------

    @cached_property
    def U(self) -> Ideal:
        x, y, z = (self.ring.var(v) for v in "xyz")
        return Ideal(self.ring, [x, y, z * self.ring.w(0)])

    @cached_property
    def J(self) -> Ideal:
        """The prime J: (l_1..l_{n-2}) : (x, y, z*w0), or : (x, y) in Case III."""
        ring = self.ring
        base = Ideal(ring, self.forms[:-1])
        if self.case.case == "III":
            x, y = ring.var("x"), ring.var("y")
            result = colon(base, Ideal(ring, [x, y]))
            self.J_identity = result.equals(base + self.I2_Bpp)
            if not self.J_identity:
                self.flags.append("J differs from (l_1..l_{n-2}) + I2(B(phi''))")
            return result.reduced()
        return colon(base, self.U).reduced()

    @cached_property
    def K_extra(self) -> list:
        """I2(A) + (z*w0) generators (the part of K beyond J)."""
        a = self.alpha
        return _dedupe(a.alphas + list(a.cijs.values()) + [self.ring.var("z") * self.ring.w(0)])

    @cached_property
    def K(self) -> Ideal:
        return Ideal(self.ring, self.J.generators + self.K_extra, name="K")

    @cached_property
    def K_height_in_B(self) -> int:
        return height(self.K) - height(self.J)

    @cached_property
    def K_squared(self) -> Ideal:
        extra = self.K_extra
        prods = _dedupe(extra[i] * extra[j] for i in range(len(extra)) for j in range(i, len(extra)))
        return Ideal(self.ring, self.J.generators + prods)

    # the N families -----------------------------------------------------

    def build_N(self, kind: int, variant: str = "weighted") -> list:
        """Generator list of N_kind (without J)."""
        return build_N(kind, self.alpha, self.pencil, self.n, self.ring, variant=variant)

    # symbolic square and K' ---------------------------------------------

    @cached_property
    def alpha_families(self) -> tuple:
        """Solved generator families for an M block of size >= 2.

        Candidates are f = sum_i beta_i * alpha_i with beta_i in span(g1, g2).
        Modulo J, x * alpha_i = z*w0 * A[1][i], so x * f = z*w0 * h with
        h = sum_i beta_i * A[1][i].  f is kept when h lies in the degree
        (0, 2) part of K; z * f is kept when h lies in that part plus
        w0 * (linear forms).  Returns (w-family, families to multiply by z).
        """
        a = self.alpha
        ring = self.ring
        _check_m_block(self.pencil)
        cands, hs = [], []
        for i in range(len(a.alphas)):
            for g in (a.g1, a.g2):
                cands.append(g * a.alphas[i])
                hs.append(g * a.A[1, i])
        quad = [g for g in self.J.generators if _is_w_form(g, 2)]
        quad += a.alphas + list(a.cijs.values())
        w0 = ring.w(0)
        shifted = quad + [w0 * ring.w(j) for j in range(self.n)]
        w_fam = _combine(cands, _span_solve(hs, quad, ring.field), ring)
        z_fam = _combine(cands, _span_solve(hs, shifted, ring.field), ring)
        return _dedupe(w_fam), _dedupe(z_fam)

    @cached_property
    def x_regular_mod_K(self) -> bool:
        """K : x = K, the property that makes K^2 : x^infinity the symbolic square."""
        K = self.K.reduced()
        return colon_element(K, self.ring.var("x")).equals(K)

    @cached_property
    def K2_oracle(self) -> Ideal:
        self._need_case("I")
        x = self.ring.var("x")
        sat = saturate(self.K_squared, Ideal(self.ring, [x]))
        self.K2_oracle_exponent = sat.exponent
        return sat.ideal

    def K2_formula_generators(self) -> list:
        self._need_case("I")
        ring = self.ring
        z, w0 = ring.var("z"), ring.w(0)
        zw = z * z * w0 * w0
        branch = self.branch
        if branch == "I.L.reg":
            return [zw] + self.build_N(1)
        if branch == "I.L.zd":
            return self.K_squared.generators + self.build_N(2)
        if branch == "I.M2":
            w_fam, z_fam = self.alpha_families
            return self.K_squared.generators + [z * f for f in z_fam] + w_fam
        if branch == "I.M1.reg":
            return self.build_N(3)
        if branch == "I.M1.zd":
            return self.K_squared.generators + self.build_N(4)
        raise UnsupportedSubcase(f"no closed form for branch {branch}")

    @cached_property
    def K2_formula(self) -> Ideal:
        gens = self.J.generators + self.K2_formula_generators()
        return Ideal(self.ring, _dedupe(gens)).reduced()

    def symbolic_square_K(self, method: str = "formula") -> Ideal:
        if method == "oracle":
            return self.K2_oracle
        if method != "formula":
            raise ValueError(f"unknown method {method!r}")
        if not self.x_regular_mod_K:
            raise UnsupportedSubcase("x is a zero divisor modulo K, so K^2 : x^infinity need not "
                                     "be the symbolic square")
        _require_equal(self.K2_formula, self.K2_oracle, "symbolic square of K")
        return self.K2_formula

    @cached_property
    def Kprime_oracle(self) -> Ideal:
        self._need_case("II")
        ring = self.ring
        z, w0 = ring.var("z"), ring.w(0)
        start = Ideal(ring, self.J.generators + [z * z * w0])
        return colon(colon(start, self.U), self.U)

    def Kprime_formula_generators(self) -> list:
        self._need_case("II")
        ring = self.ring
        a = self.alpha
        z, w0 = ring.var("z"), ring.w(0)
        head = [z * z * w0] + [z * al for al in a.alphas]
        products = [a.alphas[i] * a.alphas[j] for i in range(len(a.alphas))
                    for j in range(i, len(a.alphas))]
        branch = self.branch
        if branch in ("II.L.reg", "II.M1.reg"):
            if branch == "II.M1.reg":
                _check_m1(a, self.pencil)
            return head + _n1_list(a)
        if branch in ("II.L.zd", "II.M1.zd"):
            if branch == "II.M1.zd":
                _check_m1(a, self.pencil)
            return head + products + _defect_list(a)
        if branch == "II.M2":
            return head + products + self.alpha_families[0]
        raise UnsupportedSubcase(f"no closed form for branch {branch}")

    @cached_property
    def Kprime_formula(self) -> Ideal:
        gens = self.J.generators + self.Kprime_formula_generators()
        return Ideal(self.ring, _dedupe(gens)).reduced()

    def ideal_Kprime(self, method: str = "formula") -> Ideal:
        if method == "oracle":
            return self.Kprime_oracle
        if method != "formula":
            raise ValueError(f"unknown method {method!r}")
        _require_equal(self.Kprime_formula, self.Kprime_oracle, "K'")
        return self.Kprime_formula

    @cached_property
    def Kdoubleprime(self) -> Ideal:
        self._need_case("III")
        ring = self.ring
        z, w0 = ring.var("z"), ring.w(0)
        K2 = Ideal(ring, self.J.generators + [z * z * w0]).reduced()
        frame = Ideal(ring, [ring.var("x"), ring.var("y"), z * z * w0])
        check = colon(K2, frame)
        if not check.equals(K2):
            raise ValidationError("(z^2 w0) is not closed under the colon by (x, y, z^2 w0)")
        return K2

    # defining ideal -----------------------------------------------------

    @cached_property
    def A_saturation(self) -> Ideal:
        x, y = self.ring.var("x"), self.ring.var("y")
        sat = saturate(self.L, Ideal(self.ring, [x, y]))
        self.saturation_exponent = sat.exponent
        return sat.ideal

    @cached_property
    def I3_B(self) -> Ideal:
        return minor_ideal(self.B.matrix, 3)

    @cached_property
    def A_formula(self) -> Ideal:
        ring = self.ring
        z, w0 = ring.var("z"), ring.w(0)
        l_last = self.forms[-1]
        case = self.case.case
        if case == "I":
            K2 = self.symbolic_square_K("formula")
            num = Ideal(ring, self.J.generators + [l_last * g for g in K2.generators])
            return colon_element(num, z * z * w0 * w0).reduced()
        if case == "II":
            Kp = self.ideal_Kprime("formula")
            num = Ideal(ring, self.J.generators + [l_last * g for g in Kp.generators])
            return colon_element(num, z * w0 * z).reduced()
        direct = (self.L + self.I3_B).reduced()
        Kpp = self.Kdoubleprime
        num = Ideal(ring, self.J.generators + [l_last * g for g in Kpp.generators])
        via_colon = colon_element(num, z * z * w0).reduced()
        _require_equal(direct, via_colon, "L + I3(B(phi)) against the K'' quotient")
        return direct

    def defining_ideal(self, method: str = "saturation") -> Ideal:
        if method == "saturation":
            return self.A_saturation
        if method == "formula":
            return self.A_formula
        if method == "both":
            _require_equal(self.A_formula, self.A_saturation, "defining ideal")
            return self.A_saturation
        raise ValueError(f"unknown method {method!r}")

    # colon observation --------------------------------------------------

    def verify_obs_colon(self) -> ColonCheck:
        case = self.case.case
        ring = self.ring
        if case == "III":
            x, y = ring.var("x"), ring.var("y")
            frame_ideal = Ideal(ring, [x, y])
            label = "(x, y)"
        else:
            frame_ideal = self.U
            label = "(x, y, z*w0)"
        left = colon(self.L, frame_ideal)
        right = (self.L + self.I3_B).reduced()
        holds = left.equals(right)
        sat = saturate(self.L, frame_ideal)
        exponent_ok = sat.exponent >= 2 if case in ("I", "II") else sat.exponent == 1
        return ColonCheck(holds, sat.exponent, exponent_ok, label)


# --------------------------------------------------------------------------
# generator families
# --------------------------------------------------------------------------

def _n1_list(a: AlphaSystem) -> list:
    """g2*alpha_i - g1*alpha_{i+1} for 1 <= i <= n-4."""
    m = len(a.alphas)
    return [a.g2 * a.alpha(i) - a.g1 * a.alpha(i + 1) for i in range(1, m)]


def _difference_list(a: AlphaSystem) -> list:
    """g2*(alpha_{i+1} - alpha_i) - g1*(alpha_{i+2} - alpha_{i+1}) for 1 <= i <= n-5."""
    m = len(a.alphas)
    out = []
    for i in range(1, m - 1):
        d1 = a.alpha(i + 1) - a.alpha(i)
        d2 = a.alpha(i + 2) - a.alpha(i + 1)
        out.append(a.g2 * d1 - a.g1 * d2)
    return out


def staircase_defects(a: AlphaSystem) -> list:
    """d_2 .. d_{n-3} with A[0][i] - A[1][i-1] = d_i * w0 along the L' staircase.

    In the staircase normal form the columns of A are (a_i w0 + w_i,
    b_i w0 + w_{i+1}), so d_i = a_i - b_{i-1}; row moves fixing w0 leave the
    d_i unchanged.  w0 lies in I2(B(phi'')) as soon as some d_i is nonzero.
    """
    A = a.A
    ring = A.ring
    w0 = ring.w(0)
    e0 = [0] * ring.nvars
    e0[ring.index("w0")] = 1
    out = []
    for j in range(1, len(a.alphas)):
        diff = A[0, j] - A[1, j - 1]
        q = diff.coefficient(e0)
        if diff != w0.scale(q):
            raise UnsupportedSubcase("columns of phi' are not in staircase order")
        out.append(q)
    return out


def _defect_list(a: AlphaSystem) -> list:
    """Combinations sum c_i (g2*alpha_i - g1*alpha_{i+1}) with sum c_i d_{i+1} = 0.

    With every d_i equal this spans the displayed difference family; with a
    single nonzero d_2 it is g2*alpha_i - g1*alpha_{i+1} for 2 <= i <= n-4.
    """
    n1 = _n1_list(a)
    d = staircase_defects(a)
    piv = next((i for i, v in enumerate(d) if v), None)
    if piv is None:
        return n1
    return [n1[i].scale(d[piv]) - n1[piv].scale(d[i]) for i in range(len(n1)) if i != piv]


def _check_m1(a: AlphaSystem, inv: PencilInvariants):
    """The M_1 = [a x + b y] block must feed the last linear column."""
    ea, eb = inv.m1_form()
    if not (a.g1.scale(eb) - a.g2.scale(ea)).is_zero():
        raise UnsupportedSubcase("the M_1 block is not in the last linear column")


def _is_w_form(f: Polynomial, deg: int) -> bool:
    return all(not any(e[:3]) and sum(e) == deg for e in f.terms)


def _check_m_block(inv: PencilInvariants):
    sizes = inv.summary.m_sizes
    if len(sizes) != 1 or sizes[0] < 2:
        raise UnsupportedSubcase(f"expected one M block of size >= 2, got {inv.summary}")


def _span_solve(targets: list, basis: list, fld) -> list:
    """A basis of {c : sum c_k targets_k lies in span(basis)} over the field."""
    monos = sorted({e for f in targets + basis for e in f.terms})
    ncols = len(targets) + len(basis)
    rows = [[f.terms.get(e, fld.zero) for f in targets + basis] for e in monos]
    # reduced row echelon form
    pivots, r = [], 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = fld.inv(rows[r][c])
        rows[r] = [fld.normal(v * inv) for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [fld.normal(u - f * v) for u, v in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    kernel = []
    for fc in free:
        v = [fld.zero] * ncols
        v[fc] = fld.one
        for i, pc in enumerate(pivots):
            v[pc] = fld.normal(-rows[i][fc])
        kernel.append(v[:len(targets)])
    # independent projections
    out = []
    for v in kernel:
        w = list(v)
        for u, lead in out:
            if w[lead]:
                f = w[lead]
                w = [fld.normal(a - f * b) for a, b in zip(w, u)]
        lead = next((i for i, x in enumerate(w) if x), None)
        if lead is None:
            continue
        inv = fld.inv(w[lead])
        w = [fld.normal(x * inv) for x in w]
        out = [([fld.normal(a - u_[lead] * b) for a, b in zip(u_, w)], l_) for u_, l_ in out]
        out.append((w, lead))
    return [w for w, _ in out]


def _combine(cands: list, vectors: list, ring: RingContext) -> list:
    out = []
    for v in vectors:
        f = ring.zero()
        for c, g in zip(v, cands):
            if c:
                f = f + g.scale(c)
        if not f.is_zero():
            out.append(f)
    return out


def displayed_m_block_list(a: AlphaSystem, inv: PencilInvariants, ring: RingContext,
                           with_z: bool) -> list:
    """The closed list printed for an M block of size >= 2 (kept for comparison).

    It disagrees with the x-saturation oracle already for n = 6; the formula
    route uses :attr:`ReesProblem.alpha_families` instead.
    """
    sizes = inv.summary.m_sizes
    if len(sizes) != 1 or sizes[0] < 2:
        raise UnsupportedSubcase(f"expected one M block of size >= 2, got {sizes}")
    m = len(a.alphas)
    if m < 3:
        raise UnsupportedSubcase("the closed form uses alpha_3, which needs n >= 6")
    g1, g2 = a.g1, a.g2
    out = []
    if with_z:
        ea, eb, _ = inv.elementary_divisors[0]
        z = ring.var("z")
        out.append(z * (g1.scale(eb) - g2.scale(ea)) * a.alpha(m))
    out.append(g2 * a.alpha(1) - g1 * a.alpha(2))
    out.append(g1 * a.alpha(3) - g2 * a.alpha(2) + g1 * a.alpha(1))
    for i in range(3, m - 1):
        out.append(g2 * a.alpha(i + 1) - g1 * a.alpha(i))
    return out


def build_N(kind: int, data: AlphaSystem, block_info: PencilInvariants, n: int | None = None,
            ring: RingContext | None = None, variant: str = "weighted") -> list:
    """The N_1 .. N_4 generator lists (lifted to S, without J or K^2).

    For kinds 2 and 4, ``variant="displayed"`` uses the plain difference
    family g2*(alpha_{i+1} - alpha_i) - g1*(alpha_{i+2} - alpha_{i+1}).  That
    family is only right when all staircase defects d_i agree; the default
    ``"weighted"`` variant uses the defect-weighted family instead, which
    reduces to it in that situation (and for n = 5, where both are empty).
    """
    if variant not in ("weighted", "displayed"):
        raise ValueError(f"unknown variant {variant!r}")
    ring = ring or data.g1.ring
    z, w0 = ring.var("z"), ring.w(0)
    if kind in (3, 4):
        if block_info.summary.m_sizes != [1]:
            raise UnsupportedSubcase(f"N_{kind} needs a single M_1 block, got {block_info.summary}")
        _check_m1(data, block_info)
    elif kind in (1, 2):
        if block_info.summary.kind != "SingleLPrime":
            raise UnsupportedSubcase(f"N_{kind} needs a single L' block, got {block_info.summary}")
    else:
        raise ValueError(f"unknown N kind {kind}")
    base = _n1_list(data)
    if kind == 1:
        return base
    if kind == 3:
        return [z * z * w0 * w0] + base
    zfam = [z * f for f in base]
    tail = _difference_list(data) if variant == "displayed" else _defect_list(data)
    if kind == 2:
        return zfam + tail
    return [z * z * w0 * w0] + zfam + tail


# --------------------------------------------------------------------------
# functional interface
# --------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _problem(phi: PolyMatrix, ring: RingContext) -> ReesProblem:
    return ReesProblem(phi)


def problem(phi: PolyMatrix) -> ReesProblem:
    return _problem(phi, phi.ring)


def ideal_J(phi: PolyMatrix, case: CaseLabel | None = None) -> Ideal:
    p = problem(phi)
    if case is not None and case.case != p.case.case:
        raise ReesError(f"case label {case.case} does not match the instance ({p.case.case})")
    return p.J


def ideal_K(phi: PolyMatrix) -> Ideal:
    return problem(phi).K


def symbolic_square_K(phi: PolyMatrix, method: str = "formula") -> Ideal:
    return problem(phi).symbolic_square_K(method)


def ideal_Kprime(phi: PolyMatrix, method: str = "formula") -> Ideal:
    return problem(phi).ideal_Kprime(method)


def ideal_Kdoubleprime(phi: PolyMatrix) -> Ideal:
    return problem(phi).Kdoubleprime


def defining_ideal(phi: PolyMatrix, method: str = "saturation") -> Ideal:
    return problem(phi).defining_ideal(method)


def verify_obs_colon(phi: PolyMatrix) -> ColonCheck:
    return problem(phi).verify_obs_colon()
