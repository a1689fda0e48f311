import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from iquantum.rootdata import (CartanDatum, DatumError, build_simply_connected, cartan_type, doubled_rho,
                               integer_kernel, longest_element, mat_mul, mat_vec, rank_one_components,
                               rank_one_datum, satake_of_type, smith_normal_form)

from conftest import CATALOG


def axioms(violations):
    return {v.axiom for v in violations}


def test_cartan_validation():
    assert CartanDatum(("1",), ((2,),), (1,)).validate() == []
    bad = CartanDatum(("1", "2"), ((2, -1), (0, 2)), (1, 1))
    assert "zero-pattern" in axioms(bad.validate())
    asym = CartanDatum(("1", "2"), ((2, -1), (-2, 2)), (1, 1))
    assert "symmetrizability" in axioms(asym.validate())
    assert CartanDatum(("1", "2"), ((2, -1), (-2, 2)), (2, 1)).validate() == []


def test_finite_type_detection():
    assert cartan_type("F", 4).is_finite_type()
    affine = CartanDatum(("a", "b"), ((2, -2), (-2, 2)), (1, 1))
    assert not affine.is_finite_type()


def test_simply_connected_lattices():
    s = build_simply_connected(cartan_type("A", 1))
    assert s.root.roots == ((2,),)
    s = satake_of_type("A", 2, tau=(1, 0))
    assert s.root.roots[0] == (2, -1)
    assert s.validate() == []
    assert rank_one_datum("FII", 4).validate() == []
    with pytest.raises(DatumError):
        build_simply_connected(cartan_type("B", 2), (1, 0))


def test_longest_element_examples():
    assert longest_element(cartan_type("A", 2), []) == ()
    assert len(longest_element(cartan_type("A", 2), [0, 1])) == 3
    assert len(longest_element(cartan_type("B", 2), [0, 1])) == 4
    for fam, n in [("A", 3), ("B", 3), ("C", 3), ("D", 4), ("G", 2), ("F", 4)]:
        c = cartan_type(fam, n)
        assert len(longest_element(c, range(n))) == len(c.positive_roots())


def test_longest_element_sends_positive_to_negative():
    c = cartan_type("D", 4)
    w = longest_element(c, range(4))
    for r in c.positive_roots():
        assert all(x <= 0 for x in c.apply_word_root(w, r))


def test_doubled_rho():
    root = satake_of_type("A", 2).root
    assert doubled_rho(root, []) == ((0, 0), (0, 0))
    # one positive coroot h_2, so rho^v = h_2 / 2
    assert doubled_rho(root, [1]) == ((0, 1), (-1, 2))
    assert doubled_rho(root, [0, 1])[0] == (2, 2)


@pytest.mark.parametrize("fam,n", CATALOG)
def test_reduced_words_give_same_lattice_map(fam, n):
    s = rank_one_datum(fam, n)
    der = s.derived
    bullet = sorted(s.bullet)
    other = longest_element(s.cartan, bullet, prefer=list(reversed(bullet)))
    assert s.root.word_matrix_X(other) == der.wX
    assert s.root.word_matrix_Y(other) == der.wY
    ident = tuple(tuple(int(a == b) for b in range(s.n)) for a in range(s.n))
    assert mat_mul(der.wX, der.wX) == ident and mat_mul(der.wY, der.wY) == ident


@pytest.mark.parametrize("fam,n", CATALOG)
def test_white_fixed_characterizations_agree(fam, n):
    s = rank_one_datum(fam, n)
    der = s.derived
    other = {i for i in s.white
             if s.tau[i] == i and all(s.cartan.a(j, i) == 0 for j in s.bullet)}
    assert set(der.white_fixed) == other


@pytest.mark.parametrize("fam,n", CATALOG)
def test_components_contain_orbit_and_adjacent_bullets(fam, n):
    s = rank_one_datum(fam, n)
    comps, lf = rank_one_components(s)
    assert lf
    for i in s.white:
        nodes = set(s.derived.components[i])
        assert {i, s.tau[i]} <= nodes
        assert nodes - {i, s.tau[i]} <= set(s.bullet)
        # D3 = A3, and the DII3 diagram is the AII3 diagram
        assert comps[i].label == ("AII3" if (fam, n) == ("DII", 3) else f"{fam}{n}")


def test_classification_examples():
    s = satake_of_type("A", 3, bullet=[0, 2])
    assert rank_one_components(s)[0][1].label == "AII3"
    # A2 with the swap is the n = 2 member of the AIV series
    assert rank_one_components(satake_of_type("A", 2, tau=(1, 0)))[0][0].label == "AIV2"
    assert rank_one_components(satake_of_type("D", 3, bullet=[1, 2]))[0][0].label == "AII3"
    affine = CartanDatum(("a", "b", "c"), ((2, -1, -1), (-1, 2, -1), (-1, -1, 2)), (1, 1, 1))
    comps, lf = rank_one_components(build_simply_connected(affine, None, [1, 2]))
    assert not lf and comps[0].label == "not rank-1-finite"


def test_quasi_split_quotient_is_mod_two():
    s = satake_of_type("A", 3)
    der = s.derived
    assert set(der.white_fixed) == {0, 1, 2}
    assert der.snf.diagonal == (2, 2, 2)
    for x in itertools.product(range(-2, 3), repeat=3):
        assert der.is_zero_class(x) == all(v % 2 == 0 for v in x)


def test_aiii_has_no_fixed_white_nodes():
    assert rank_one_datum("AIII", 2).derived.white_fixed == ()


@pytest.mark.parametrize("fam,n", CATALOG)
@given(data=st.data())
def test_class_of_theta_is_zero(fam, n, data):
    s = rank_one_datum(fam, n)
    der = s.derived
    nu = data.draw(st.lists(st.integers(-5, 5), min_size=s.n, max_size=s.n))
    mu = data.draw(st.lists(st.integers(-5, 5), min_size=s.n, max_size=s.n))
    assert der.is_zero_class(der.theta(nu))
    lam = [a + b for a, b in zip(nu, der.w_tau_X(nu))]
    assert der.is_zero_class(lam)
    diff = [a - b for a, b in zip(nu, mu)]
    assert der.same_class(nu, mu) == der.is_zero_class(diff)


@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=3, max_size=3))
def test_smith_normal_form(a):
    f = smith_normal_form(a)
    d = mat_mul(mat_mul(f.U, a), f.V)
    for i in range(3):
        for j in range(3):
            expect = f.diagonal[i] if i == j and i < len(f.diagonal) else 0
            assert d[i][j] == expect
    nz = [x for x in f.diagonal if x]
    assert all(b % a_ == 0 for a_, b in zip(nz, nz[1:]))
    entries = [x for row in a for x in row]
    if any(entries):
        g = 0
        for x in entries:
            g = math.gcd(g, x)
        assert nz[0] == g


@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=2, max_size=2))
def test_integer_kernel(a):
    basis = integer_kernel(a, 3)
    for v in basis:
        assert all(x == 0 for x in mat_vec(a, v))


def test_weyl_dimension():
    assert cartan_type("A", 1).weyl_dimension((3,)) == 4
    assert cartan_type("A", 2).weyl_dimension((1, 1)) == 8
    assert cartan_type("F", 4).weyl_dimension((0, 0, 0, 1)) == 26
    assert cartan_type("G", 2).weyl_dimension((1, 0)) in (7, 14)
