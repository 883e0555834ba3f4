from fractions import Fraction

from hypothesis import settings
from hypothesis import strategies as st

from vfieldlab.linops import monomials
from vfieldlab.polyalg import Poly, VectorField2

settings.register_profile("default", deadline=None)
settings.load_profile("default")

small_rats = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 5))


@st.composite
def polys(draw, max_degree=3, nvars=2, coeffs=small_rats, max_terms=6):
    if nvars == 2:
        exps = monomials(max_degree)
    else:
        exps = [e for e in _exponents(nvars, max_degree)]
    chosen = draw(st.lists(st.sampled_from(exps), max_size=max_terms, unique=True))
    return Poly({e: draw(coeffs) for e in chosen}, nvars=nvars)


def _exponents(nvars, d):
    if nvars == 0:
        yield ()
        return
    for k in range(d + 1):
        for rest in _exponents(nvars - 1, d - k):
            yield (k,) + rest


@st.composite
def fields(draw, max_degree=3):
    return VectorField2(draw(polys(max_degree)), draw(polys(max_degree)))


# -- acceptance summary ----------------------------------------------------------

_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_A" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1][len("test_"):]
        detail = dict(report.user_properties).get("detail", "")
        if hasattr(report, "wasxfail"):
            verdict = "FAIL (expected, see decisions ledger)"
        else:
            verdict = "PASS" if report.outcome == "passed" else "FAIL"
        _ACCEPTANCE.append(f"{name}: {verdict}  {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
