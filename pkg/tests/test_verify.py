import json

import pytest

from iquantum import verify as vf
from iquantum.iqp import ParameterSet, default_parameters
from iquantum.qfield import Q, ZERO
from iquantum.rootdata import catalog_weight, rank_one_datum

from conftest import CATALOG


@pytest.fixture(scope="module")
def ai1():
    return rank_one_datum("AI", 1)


def test_zero_weight_is_trivially_true(ai1):
    rep = vf.verify_strong(ai1, default_parameters(ai1), (0,))
    assert rep.status == vf.OK and rep.dimension == 1 and rep.kernel_dim == 1
    assert rep.constant == "1"


def test_ai1_even_weight(ai1):
    rep = vf.verify_strong(ai1, default_parameters(ai1), (2,))
    assert rep.status == vf.OK and rep.verdict and rep.route_agreement
    assert rep.dimension == 3 and rep.lam_class_zero


def test_ai1_odd_weight_has_no_trivial_vector(ai1):
    rep = vf.verify_strong(ai1, default_parameters(ai1), (3,))
    assert rep.status == vf.NO_TRIVIAL and not rep.lam_class_zero and rep.trivial_found is False


def test_invalid_parameters_short_circuit(ai1):
    rep = vf.verify_strong(ai1, ParameterSet({0: Q}, {0: ZERO}), (2,))
    assert rep.status == vf.INVALID and rep.dimension is None
    assert any(f.startswith("bar-twist") for f in rep.failures)


def test_cap_exceeded(ai1):
    rep = vf.verify_strong(ai1, default_parameters(ai1), (10,), cap_dim=5)
    assert rep.status == vf.CAP and rep.dimension == 11


def test_aiii2_swap_example():
    s = rank_one_datum("AIII", 2)
    p = default_parameters(s)
    lam = catalog_weight(s, "AIII", s.white[0])
    rep = vf.verify_strong(s, p, lam)
    assert rep.status == vf.OK and rep.kernel_dim == 1


@pytest.mark.parametrize("fam,n", CATALOG)
def test_sufficient_lambda_has_zero_class(fam, n):
    s = rank_one_datum(fam, n)
    for i in range(s.n):
        nu = s.fundamental_weight(i)
        lam = vf.sufficient_lambda(s, nu)
        assert s.derived.is_zero_class(lam)
        assert s.root.is_dominant(lam)


def test_sufficient_condition_ai1(ai1):
    rep = vf.verify_sufficient_condition(ai1, default_parameters(ai1), (1,))
    assert rep.nu == (1,) and rep.lam == (2,) and rep.status == vf.OK


@pytest.mark.parametrize("fam,n", [("AI", 1), ("AII", 3), ("AIV", 2), ("BII", 2)])
def test_route_agreement(fam, n):
    s = rank_one_datum(fam, n)
    p = default_parameters(s)
    lam = catalog_weight(s, fam, s.white[0])
    rep = vf.verify_strong(s, p, lam)
    other = vf.locally_finite_reduction_check(s, p, lam, rep.w0)
    assert other.verdict == rep.verdict is True
    assert other.exact_bullet and other.tilde_white


def test_route_check_rejects_bad_vector(ai1):
    from iquantum.repmod import build_irreducible
    V = build_irreducible(ai1, (2,))
    v = V.basis_vector(1)  # the zero-weight vector is not trivial
    other = vf.locally_finite_reduction_check(ai1, default_parameters(ai1), (2,), v)
    assert not other.verdict


def test_report_is_deterministic(ai1):
    a = vf.verify_strong(ai1, default_parameters(ai1), (4,)).to_text()
    b = vf.verify_strong(ai1, default_parameters(ai1), (4,)).to_text()
    assert a == b
    data = json.loads(a)
    assert "timings" not in data and data["status"] == vf.OK


def test_small_suite_parallel_matches_serial():
    caps = (("AI", 1, 2), ("AII", 3, 1))
    one = vf.rank1_catalog_suite(caps, jobs=1)
    two = vf.rank1_catalog_suite(caps, jobs=2)
    assert one.all_ok and one.to_text() == two.to_text()
    assert len(one.entries) == 3


def test_negative_control():
    assert vf.negative_control() == ["bar-twist"]


def test_negative_existence_sweep_ai1(ai1):
    sweep = vf.negative_existence_sweep(ai1, default_parameters(ai1), 12)
    assert [lam for lam, _ in sweep] == [(1,), (3,), (5,), (7,), (9,), (11,)]
    assert all(absent for _, absent in sweep)
