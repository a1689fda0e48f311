import pytest
from hypothesis import HealthCheck, settings, strategies as st

from iquantum.qfield import LaurentPolynomial, RationalFunction
from iquantum.rootdata import rank_one_datum

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# (family, n) for every rank-one catalog shape exercised by the tests
CATALOG = [("AI", 1), ("AIII", 2), ("AII", 3), ("AIV", 2), ("BII", 2), ("CII", 3), ("DII", 3), ("FII", 4)]


def laurent(max_terms=4, lo=-4, hi=4, coeff=5):
    return st.dictionaries(st.integers(lo, hi), st.integers(-coeff, coeff), max_size=max_terms).map(LaurentPolynomial)


def nonzero_laurent(**kw):
    return laurent(**kw).filter(lambda p: not p.is_zero())


@st.composite
def rationals(draw, nonzero=False):
    num = draw(nonzero_laurent() if nonzero else laurent())
    den = draw(nonzero_laurent(max_terms=3))
    return RationalFunction(num, den)


@pytest.fixture(scope="session")
def catalog():
    return {f"{f}{n}": rank_one_datum(f, n) for f, n in CATALOG}


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
