from fractions import Fraction

from hypothesis import settings
from hypothesis import strategies as st

from sphesusy.symtrig import AlphaSeries, CosPoly, TrigForm

settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")

small_fractions = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


@st.composite
def cos_polys(draw, max_degree=3):
    return CosPoly(draw(st.lists(small_fractions, max_size=max_degree + 1)))


@st.composite
def trigforms(draw, order=1, residue=None):
    """Random forms in one exponent family (twice_exponent = residue mod 4)."""
    if residue is None:
        residue = draw(st.integers(0, 3))
    te = residue + 4 * draw(st.integers(-1, 1))
    polys = [draw(cos_polys()) for _ in range(order + 1)]
    return TrigForm(te, AlphaSeries(polys, order))


# one PASS/FAIL line per acceptance criterion, shown after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
