import os

import pytest
from hypothesis import HealthCheck, settings

from rees_kit.instances import bundled
from rees_kit.rees import ReesProblem
from rees_kit.ring import PolyMatrix, RingContext

settings.register_profile(
    "default", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.register_profile("ci", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def ex71():
    return bundled("ex71")


@pytest.fixture(scope="session")
def ex72():
    return bundled("ex72")


@pytest.fixture(scope="session")
def ex73():
    return bundled("ex73")


@pytest.fixture(scope="session")
def p71(ex71):
    return ReesProblem(ex71.phi)


@pytest.fixture(scope="session")
def p72(ex72):
    return ReesProblem(ex72.phi)


@pytest.fixture(scope="session")
def p73(ex73):
    return ReesProblem(ex73.phi)


@pytest.fixture(scope="session")
def R5():
    return RingContext.rees(5)


def matrix(ring, rows):
    """PolyMatrix from nested lists of polynomial strings."""
    return PolyMatrix.from_rows(ring, [[ring.parse(s) for s in r] for r in rows])


def staircase_family(n: int, last_column=None):
    """The normal form with a single L' block used in the Case I Groebner-basis argument.

    Top row x, 0, ..., 0, y, z so that l_1 = x(w0 + w1) + y w2,
    l_{n-3} = x w_{n-3} + y (w0 + w_{n-2}) and l_{n-2} = x w_{n-2} + y w_{n-1} + z w0.
    """
    ring = RingContext.rees(n)
    cols = n - 2
    top = ["0"] * cols
    top[0] = "x"
    top[cols - 2] = "y" if cols - 2 > 0 else "x + y"
    top[cols - 1] = "z"
    rows = [top]
    for i in range(n - 1):
        r = ["0"] * cols
        if i < cols:
            r[i] = "x"
        if 0 <= i - 1 < cols:
            r[i - 1] = "y"
        rows.append(r)
    last = last_column or (["x*z", "x^2", "y^2", "x*y", "y^2"] + ["x^2", "x*y", "y^2"] * n)[:n]
    rows = [r + [c] for r, c in zip(rows, last)]
    return matrix(ring, rows)


def signed_minors(phi):
    """f_i = (-1)^i det(phi without row i), so that f * phi = 0."""
    from rees_kit.ring import determinant
    n = phi.rows
    out = []
    for i in range(n):
        rows = [r for r in range(n) if r != i]
        out.append(determinant(phi.submatrix(rows, range(n - 1))).scale((-1) ** i))
    return out


def kernel_oracle(phi):
    """The defining ideal as the kernel of w_i -> f_i t, by eliminating t."""
    from rees_kit.groebner import Ideal, eliminate
    S = phi.ring
    big = S.extend(["t"])
    t = big.var("t")
    gens = [big.embed(S.w(i)) - t * big.embed(f) for i, f in enumerate(signed_minors(phi))]
    return eliminate(Ideal(big, gens), ["t"], target=S)


ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
