import pytest
from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from witnessforge.matrix import Matrix, Scalar

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=50)
scalars = st.builds(Scalar, rationals, rationals)


@st.composite
def matrices(draw, rows, cols=None, real=False):
    cols = rows if cols is None else cols
    cell = st.builds(Scalar, rationals) if real else scalars
    data = draw(st.lists(st.lists(cell, min_size=cols, max_size=cols), min_size=rows, max_size=rows))
    return Matrix.from_rows(data)


@st.composite
def hermitian_matrices(draw, n):
    X = draw(matrices(n))
    return (X + X.H) / 2


@pytest.fixture(scope="session")
def witnesses():
    from witnessforge.maps import Psi, choi

    return {k: choi(Psi(k)) for k in (2, 3, 4)}


@pytest.fixture(scope="session")
def rho_states():
    from witnessforge.states import ppt_witness_state

    return {k: ppt_witness_state(k) for k in (2, 3, 4)}


@pytest.fixture(scope="session")
def d_states():
    from witnessforge.states import atomic_state

    return {k: atomic_state(k) for k in (2, 3, 4)}


def frac(x) -> Fraction:
    return Fraction(x)


# -- acceptance summary ------------------------------------------------------

ACCEPTANCE = {}


def record(criterion: int, part: str, ok: bool, detail: str = "") -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(ok), detail))
    print(f"criterion {criterion} [{part}]: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        ok = all(p[1] for p in parts)
        failed = [f"{name}: {detail}" if detail else name for name, good, detail in parts if not good]
        tail = "" if ok else " <- " + "; ".join(failed)
        tr.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} ({sum(p[1] for p in parts)}/{len(parts)} parts){tail}")
