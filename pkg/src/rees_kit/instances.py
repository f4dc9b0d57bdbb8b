"""Instance files, the bundled corpus and the seeded random generator.

An instance file is JSON::

    {"id": "ex71", "field": "q", "matrix": {"rows": 5, "cols": 4, "entries": [...]},
     "expected": {"J": [...], "K2": [...], ...}}

``expected`` is optional; its ideals are lists of polynomial strings.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .ring import Field, PolyMatrix, Polynomial, RingContext


@dataclass
class Instance:
    id: str
    phi: PolyMatrix
    expected: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)
    displayed: dict = field(default_factory=dict)   # reference values kept verbatim

    @property
    def ring(self) -> RingContext:
        return self.phi.ring

    @property
    def n(self) -> int:
        return self.phi.rows

    def to_dict(self) -> dict:
        out = {"id": self.id, "field": str(self.ring.field), "matrix": self.phi.to_dict()}
        if self.expected:
            out["expected"] = self.expected
        if self.meta:
            out["meta"] = self.meta
        if self.displayed:
            out["displayed"] = self.displayed
        return out

    def with_field(self, fld: Field | None = None, order: str | None = None) -> "Instance":
        """The same matrix read into another coefficient field and/or monomial order."""
        ring = RingContext.rees(self.n, fld or self.ring.field, order or self.ring.order.kind)
        return Instance(self.id, PolyMatrix.from_dict(self.phi.to_dict(), ring), self.expected,
                        dict(self.meta), self.displayed)


def instance_from_dict(data: dict, fld: Field | None = None, order: str = "degrevlex") -> Instance:
    matrix = data["matrix"]
    fld = fld or Field.parse(data.get("field", "q"))
    ring = RingContext.rees(int(matrix["rows"]), fld, order)
    phi = PolyMatrix.from_dict(matrix, ring)
    return Instance(str(data.get("id", "instance")), phi, dict(data.get("expected", {})),
                    dict(data.get("meta", {})), dict(data.get("displayed", {})))


def load_instance(path, fld: Field | None = None, order: str = "degrevlex") -> Instance:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    inst = instance_from_dict(data, fld, order)
    if inst.id == "instance":
        inst.id = Path(path).stem
    return inst


def save_instance(inst: Instance, path):
    Path(path).write_text(json.dumps(inst.to_dict(), indent=2) + "\n", encoding="utf-8")


def bundled_names() -> list:
    return ["ex71", "ex72", "ex73"]


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("rees_kit") / "data" / f"{name}.json"))


def bundled(name: str, fld: Field | None = None, order: str = "degrevlex") -> Instance:
    return load_instance(bundled_path(name), fld, order)


def bundled_corpus(fld: Field | None = None) -> list:
    return [bundled(name, fld) for name in bundled_names()]


# --------------------------------------------------------------------------
# random instances
# --------------------------------------------------------------------------

class GeneratorExhausted(RuntimeError):
    pass


def _branch_parts(branch: str):
    case, _, rest = branch.partition(".")
    return case, rest


def _small(rng: random.Random, lo: int = -2, hi: int = 2, nonzero: bool = False) -> int:
    while True:
        v = rng.randint(lo, hi)
        if v or not nonzero:
            return v


def _linear_block(ring: RingContext, n: int, m_size: int, rng: random.Random) -> list:
    """phi' rows (n-1 of them) as [L'_r, M_{m_size}] with r = n - 2 - m_size."""
    x, y = ring.var("x"), ring.var("y")
    cols = n - 2
    r = cols - m_size
    rows = [[ring.zero() for _ in range(cols)] for _ in range(n - 1)]
    for j in range(r):
        rows[j][j] = x
        rows[j + 1][j] = y
    if m_size:
        while True:
            a, b = _small(rng), _small(rng)
            c, d = _small(rng), _small(rng)
            if (a or b) and a * d - b * c:
                break
        diag = x.scale(a) + y.scale(b)
        sup = x.scale(c) + y.scale(d)
        for k in range(m_size):
            rows[r + 1 + k][r + k] = diag
            if k:
                rows[r + k][r + k] = sup
    return rows


def _top_row(ring: RingContext, n: int, m_size: int, regular: bool, case: str,
             rng: random.Random) -> list:
    """Top entries of the linear columns."""
    x, y, z = ring.var("x"), ring.var("y"), ring.var("z")
    cols = n - 2
    r = cols - m_size
    a = [_small(rng) for _ in range(cols)]
    b = [_small(rng) for _ in range(cols)]
    if regular:
        # a_i = b_{i-1} along the L' staircase makes w0 avoid I2(B(phi'')).
        for i in range(1, r):
            a[i] = b[i - 1]
    top = [x.scale(a[i]) + y.scale(b[i]) for i in range(cols)]
    if case in ("I", "II"):
        top[cols - 1] = z
    return top


_XY2 = ("x^2", "x*y", "y^2")
_MIXED = ("x*z", "y*z")


def _quadric(ring: RingContext, rng: random.Random, monomials, density: float = 0.6) -> Polynomial:
    f = ring.zero()
    for mono in monomials:
        if rng.random() < density:
            f = f + ring.parse(mono).scale(_small(rng, nonzero=True))
    return f


def _last_column(ring: RingContext, n: int, case: str, rng: random.Random) -> list:
    col = []
    for i in range(n):
        if i == 0:
            f = _quadric(ring, rng, _XY2 + _MIXED)
            if case == "III":
                f = f + ring.parse("z^2")
        elif case == "I":
            f = _quadric(ring, rng, _XY2)
        else:
            f = _quadric(ring, rng, _XY2 + _MIXED, density=0.4)
        col.append(f)
    if case == "II" and not any(g.degree_in("z") for g in col[1:]):
        k = rng.randrange(1, n)
        col[k] = col[k] + ring.parse(rng.choice(_MIXED))
    return col


def _row_mix(rows: list, rng: random.Random, ring: RingContext) -> list:
    """Left multiplication by [[1, c], [0, Q]] with sparse c and unipotent Q."""
    n = len(rows)
    rows = [list(r) for r in rows]
    for _ in range(rng.randint(0, 2)):
        i, k = rng.randrange(1, n), rng.randrange(1, n)
        if i != k:
            c = _small(rng, -1, 1, nonzero=True)
            rows[i] = [u + v.scale(c) for u, v in zip(rows[i], rows[k])]
    if rng.random() < 0.5:
        k = rng.randrange(1, n)
        c = _small(rng, -1, 1, nonzero=True)
        rows[0] = [u + v.scale(c) for u, v in zip(rows[0], rows[k])]
    return rows


def _draw(branch: str, n: int, fld: Field, rng: random.Random, mix: bool) -> PolyMatrix:
    case, rest = _branch_parts(branch)
    ring = RingContext.rees(n, fld)
    if case == "III":
        m_size, regular = 0, rng.random() < 0.5
    elif rest.startswith("L"):
        m_size, regular = 0, rest.endswith("reg")
    elif rest == "M2":
        m_size, regular = 2 if n < 7 else rng.randint(2, n - 4), False
    else:
        m_size, regular = 1, rest.endswith("reg")
    lin = _linear_block(ring, n, m_size, rng)
    top = _top_row(ring, n, m_size, regular, case, rng)
    last = _last_column(ring, n, case, rng)
    rows = [top + [last[0]]] + [lin[i] + [last[i + 1]] for i in range(n - 1)]
    if mix:
        rows = _row_mix(rows, rng, ring)
    return PolyMatrix.from_rows(ring, rows)


def random_instance(branch: str, n: int = 5, seed: int = 0, fld: Field | None = None,
                    mix: bool = True, max_tries: int = 200) -> Instance:
    """A seeded Setting-valid instance whose computed branch equals ``branch``.

    Draws are rejected until validation passes and the instance classifies
    into the requested branch, so the label is certified, not assumed.
    """
    from .rees import BRANCHES, ReesError, ReesProblem
    from .pencil import InvalidSetting, NeedsFieldExtension

    if branch not in BRANCHES:
        raise ValueError(f"unknown branch {branch!r}; choose from {BRANCHES}")
    fld = fld or Field.parse("q")
    rng = random.Random(f"{branch}/{n}/{seed}/{fld}")
    for attempt in range(max_tries):
        phi = _draw(branch, n, fld, rng, mix)
        try:
            prob = ReesProblem(phi, normalize=False)
            if not prob.setting.ok:
                continue
            if prob.branch != branch:
                continue
            if branch.startswith("I.") and not prob.x_regular_mod_K:
                # outside the hypothesis behind the x-saturation oracle
                continue
        except (ReesError, InvalidSetting, NeedsFieldExtension):
            continue
        meta = {"branch": branch, "seed": seed, "attempts": attempt + 1}
        return Instance(f"rand-{branch}-n{n}-s{seed}", phi, {}, meta)
    raise GeneratorExhausted(f"no {branch} instance after {max_tries} draws")


def random_suite_specs(k: int, seed: int) -> list:
    """(branch, n, seed) triples cycling through all branches, alternating n = 5 and n = 6."""
    from .rees import BRANCHES

    out = []
    for i in range(k):
        branch = BRANCHES[i % len(BRANCHES)]
        n = 5 + (i // len(BRANCHES)) % 2
        out.append((branch, n, seed * 1000 + i))
    return out


def random_suite(k: int, seed: int, fld: Field | None = None) -> list:
    return [random_instance(b, n, s, fld) for b, n, s in random_suite_specs(k, seed)]
