import itertools

import pytest
from hypothesis import given, settings, strategies as st

from iquantum.linalg import SparseMatrix, determinant, vadd, vscale
from iquantum.qfield import ONE, Q, ZERO, RationalFunction, qint, qpow
from iquantum.repmod import (CapExceeded, WeightModuleRealization, act, braid, braid_matrix, build_crystal_lattice,
                             build_irreducible, congruent_at_infinity, conjugated_raising, contragredient_form,
                             extremal_vector, highest_at_infinity, kashiwara, parse_realization,
                             render_realization, rho_image, tensor, tensor_vectors, verify_relations, word_matrix)
from iquantum.rootdata import longest_element, rank_one_datum, satake_of_type

from conftest import CATALOG


@pytest.fixture(scope="module")
def a1():
    return rank_one_datum("AI", 1)


@pytest.fixture(scope="module")
def a2():
    return satake_of_type("A", 2)


def test_trivial_module(a1):
    V = build_irreducible(a1, (0,))
    assert V.dim == 1 and not V.E[0].apply({0: ONE}) and not V.F[0].apply({0: ONE})
    lat = build_crystal_lattice(V)
    assert lat.vectors == [{0: ONE}]


@pytest.mark.parametrize("n", range(6))
def test_a1_dimension(a1, n):
    V = build_irreducible(a1, (n,))
    assert V.dim == n + 1
    assert len(build_crystal_lattice(V)) == n + 1


def test_a2_fundamental(a2):
    V = build_irreducible(a2, a2.weight((1, 0)))
    assert V.dim == 3
    assert verify_relations(build_irreducible(a2, a2.weight((1, 1)))).ok


def test_cap_and_dominance(a2):
    with pytest.raises(CapExceeded):
        build_irreducible(a2, a2.weight((2, 2)), cap_dim=10)
    with pytest.raises(ValueError):
        build_irreducible(a2, a2.weight((-1, 0)))


def test_highest_weight_vector(a2):
    lam = a2.weight((2, 1))
    V = build_irreducible(a2, lam)
    v = {0: ONE}
    for i in range(2):
        assert not act(V, "E", i, v)
    for h in [(1, 0), (0, 1), (2, -3)]:
        assert act(V, "K", h, v) == vscale(v, qpow(a2.root.pair(h, lam)))


def test_commutator_on_string(a1):
    V = build_irreducible(a1, (2,))
    v = {0: ONE}
    F2v = act(V, "F", 0, act(V, "F", 0, v))
    lhs = act(V, "E", 0, F2v)
    # E F^2 v = F^2 E v + ([0] + [2]) F v with [E, F] = [h] on each weight
    Fv = act(V, "F", 0, v)
    rhs = vscale(Fv, qint(2) + qint(0))
    assert lhs == rhs


def test_perturbed_matrix_fails_relations(a1):
    V = build_irreducible(a1, (2,))
    cols = [dict(c) for c in V.E[0].cols]
    r = next(iter(cols[1]))
    cols[1][r] = cols[1][r] + ONE
    bad = WeightModuleRealization(V.root, V.weights, [SparseMatrix(3, 3, cols)], V.F, highest=V.highest)
    rep = verify_relations(bad)
    assert not rep.ok and "commutator" in rep.failure


def form_oracle(n, k):
    """(F^k v, F^k v) on the A1 module of highest weight n, by the rho recursion."""
    val = ONE
    for j in range(k):
        # (F b_j, F b_j) = (b_j, q K^-1 E F b_j) and E F b_j = [j+1][n-j] b_j
        val = val * qpow(1 - (n - 2 * j)) * qint(j + 1) * qint(n - j)
    return val


@pytest.mark.parametrize("n", range(1, 5))
def test_form_values(a1, n):
    V = build_irreducible(a1, (n,))
    v = {0: ONE}
    assert contragredient_form(V, v, v) == ONE
    u = v
    for k in range(1, n + 1):
        u = act(V, "F", 0, u)
        assert contragredient_form(V, u, u) == form_oracle(n, k)
    assert form_oracle(1, 1) == ONE


def catalog_modules():
    out = []
    for fam, n in CATALOG:
        s = rank_one_datum(fam, n)
        from iquantum.rootdata import catalog_weight
        base = catalog_weight(s, fam, s.white[0])
        out.append((f"{fam}{n}", s, base))
    return out


@pytest.mark.parametrize("name,s,lam", catalog_modules(), ids=[c[0] for c in catalog_modules()])
def test_contragredience(name, s, lam):
    V = build_irreducible(s, lam)
    for i in range(V.n):
        for kind, mat in (("E", V.E[i]), ("F", V.F[i])):
            rho = rho_image(V, kind, i)
            for a in range(V.dim):
                xa = mat.apply({a: ONE})
                for b in range(V.dim):
                    if V.weights[b] != tuple(x - y if kind == "F" else x + y
                                             for x, y in zip(V.weights[a], s.root.roots[i])):
                        continue
                    assert contragredient_form(V, xa, {b: ONE}) == contragredient_form(V, {a: ONE}, rho.apply({b: ONE}))


@pytest.mark.parametrize("name,s,lam", catalog_modules(), ids=[c[0] for c in catalog_modules()])
def test_weight_orthogonality_and_symmetry(name, s, lam):
    V = build_irreducible(s, lam)
    for a, b in itertools.product(range(V.dim), repeat=2):
        f = contragredient_form(V, {a: ONE}, {b: ONE})
        if V.weights[a] != V.weights[b]:
            assert f == ZERO
        assert f == contragredient_form(V, {b: ONE}, {a: ONE})


def test_kashiwara_single_string(a1):
    V = build_irreducible(a1, (2,))
    v = {0: ONE}
    assert not kashiwara(V, 0, "E", v)
    assert kashiwara(V, 0, "F", kashiwara(V, 0, "F", v)) == act(V, "F", 0, v, n=2)


@pytest.mark.parametrize("name,s,lam", catalog_modules(), ids=[c[0] for c in catalog_modules()])
def test_crystal_lattice_stable(name, s, lam):
    V = build_irreducible(s, lam)
    lat = build_crystal_lattice(V)
    assert len(lat) == V.dim == s.cartan.weyl_dimension(s.root.h_coords(lam))
    for i in range(V.n):
        assert not kashiwara(V, i, "E", {0: ONE})
        for b in lat.vectors:
            for d in "EF":
                assert lat.in_lattice(kashiwara(V, i, d, b))
            f = kashiwara(V, i, "F", b)
            if not congruent_at_infinity(lat, f, {}):
                assert congruent_at_infinity(lat, kashiwara(V, i, "E", f), b)


@given(st.data())
@settings(max_examples=25)
def test_e_tilde_inverts_f_tilde_on_strings(data):
    s = satake_of_type("A", 2)
    V = build_irreducible(s, s.weight((2, 1)))
    i = data.draw(st.integers(0, 1))
    k = data.draw(st.integers(0, V.dim - 1))
    c = data.draw(st.sampled_from([ONE, Q, Q.inverse() + 2, (Q + 1) / (Q - 3)]))
    # u = c F_i^(m) x with x the i-highest part of a basis vector: a single i-string
    x = {k: c}
    while V.E[i].apply(x):
        x = V.E[i].apply(x)
    m = data.draw(st.integers(0, 3))
    u = act(V, "F", i, x, n=m)
    f = kashiwara(V, i, "F", u)
    if u and f:
        assert kashiwara(V, i, "E", f) == u
        assert f == act(V, "F", i, x, n=m + 1)


def test_congruence_examples(a2):
    V = build_irreducible(a2, a2.weight((1, 1)))
    lat = build_crystal_lattice(V)
    v = {0: ONE}
    b = kashiwara(V, 0, "F", v)
    assert congruent_at_infinity(lat, v, v)
    assert congruent_at_infinity(lat, vadd(v, vscale(b, Q.inverse())), v)
    assert not congruent_at_infinity(lat, vadd(v, vscale(b, Q / (Q + 1))), v)


@given(st.data())
@settings(max_examples=30)
def test_congruence_equivalence(data):
    s = rank_one_datum("AI", 1)
    V = build_irreducible(s, (3,))
    lat = build_crystal_lattice(V)
    coeff = st.sampled_from([ZERO, ONE, Q.inverse(), 2 * Q.inverse() ** 2, Q / (Q + 1), Q, ONE / (Q + 1)])
    vecs = [{p: data.draw(coeff) for p in range(4)} for _ in range(3)]
    vecs = [{k: c for k, c in u.items() if c} for u in vecs]
    u = sum_vectors([vscale(lat.vectors[p], c) for p, c in vecs[0].items()])
    v = sum_vectors([vscale(lat.vectors[p], c) for p, c in vecs[1].items()])
    w = sum_vectors([vscale(lat.vectors[p], c) for p, c in vecs[2].items()])
    cong = lambda x, y: congruent_at_infinity(lat, x, y)
    assert cong(u, u)
    assert cong(u, v) == cong(v, u)
    if cong(u, v) and cong(v, w):
        assert cong(u, w)
    diff = vadd(u, vscale(v, -ONE))
    assert cong(u, v) == cong(diff, {})


def sum_vectors(vs):
    out = {}
    for v in vs:
        out = vadd(out, v)
    return out


def test_highest_at_infinity_examples(a2):
    V = build_irreducible(a2, a2.weight((1, 1)))
    lat = build_crystal_lattice(V)
    v = {0: ONE}
    h = highest_at_infinity(lat, v)
    assert h.holds and h.constant == 1
    b = kashiwara(V, 0, "F", v)
    assert not highest_at_infinity(lat, b).holds
    h = highest_at_infinity(lat, vadd(v, vscale(b, Q.inverse())))
    assert h.holds and h.constant == 1


def test_braid_relation_a2(a2):
    for coords in [(1, 0), (1, 1)]:
        V = build_irreducible(a2, a2.weight(coords))
        assert word_matrix(V, (0, 1, 0)) == word_matrix(V, (1, 0, 1))
        for i in range(2):
            T, Tinv = braid_matrix(V, i), braid_matrix(V, i, inverse=True)
            assert T @ Tinv == SparseMatrix.identity(V.dim)
            assert determinant(T) != ZERO


def test_braid_a1_invertible(a1):
    V = build_irreducible(a1, (1,))
    assert determinant(braid_matrix(V, 0)) != ZERO


@pytest.mark.parametrize("name,s,lam", catalog_modules(), ids=[c[0] for c in catalog_modules()])
def test_braid_weight_conjugation(name, s, lam):
    V = build_irreducible(s, lam)
    for i in range(V.n):
        for k in range(V.dim):
            out = braid(V, i, {k: ONE})
            target = s.root.reflect_X(i, V.weights[k])
            assert out and all(V.weights[r] == target for r in out)


@pytest.mark.parametrize("name,s,lam", catalog_modules(), ids=[c[0] for c in catalog_modules()])
def test_longest_bullet_word_independent(name, s, lam):
    bullet = sorted(s.bullet)
    if len(bullet) < 2:
        pytest.skip("a single reduced word")
    V = build_irreducible(s, lam)
    w1 = longest_element(s.cartan, bullet)
    w2 = longest_element(s.cartan, bullet, prefer=list(reversed(bullet)))
    assert w1 != w2
    assert word_matrix(V, w1) == word_matrix(V, w2)


def test_conjugated_raising(a2):
    V = build_irreducible(a2, a2.weight((1, 1)))
    for k in range(V.dim):
        v = {k: ONE}
        assert conjugated_raising(V, (), 0, v) == V.E[0].apply(v)
    # s_1(alpha_2) = alpha_1 + alpha_2 is positive, so T_1(E_2) kills v_lambda
    assert not conjugated_raising(V, (0,), 1, {0: ONE})
    # s_1(alpha_1) is negative: T_1(E_1) = -F_1 K_1 does not kill v_lambda
    assert conjugated_raising(V, (0,), 0, {0: ONE}) == vscale(V.F[0].apply({0: ONE}), -Q)


@pytest.mark.parametrize("name,s,lam", catalog_modules(), ids=[c[0] for c in catalog_modules()])
def test_braid_conjugates_generators(name, s, lam):
    V = build_irreducible(s, lam)
    for i in range(V.n):
        T, Ti = braid_matrix(V, i), braid_matrix(V, i, inverse=True)
        assert T @ V.E[i] @ Ti == (V.F[i] @ V.K_node(i, 1)).scale(-ONE)
        assert T @ V.F[i] @ Ti == (V.K_node(i, -1) @ V.E[i]).scale(-ONE)
        for h in [tuple(int(a == b) for b in range(s.root.rank_Y)) for a in range(s.root.rank_Y)]:
            assert T @ V.K(h) @ Ti == V.K(s.root.reflect_Y(i, h))


@pytest.mark.parametrize("name,s,lam", catalog_modules(), ids=[c[0] for c in catalog_modules()])
def test_extremal_vectors(name, s, lam):
    V = build_irreducible(s, lam)
    assert extremal_vector(V, ()) == {0: ONE}
    for w in [s.derived.w_bullet, longest_element(s.cartan, range(s.n))]:
        v = extremal_vector(V, w)
        target = s.root.word_X(w, lam)
        assert v and all(V.weights[k] == target for k in v)
        assert contragredient_form(V, v, v).value_at_infinity() == 1


def test_extremal_one_step(a1):
    V = build_irreducible(a1, (3,))
    assert extremal_vector(V, (0,)) == act(V, "F", 0, {0: ONE}, n=3)


def test_tensor_products(a1, a2):
    V1 = build_irreducible(a1, (1,))
    T = tensor(V1, V1)
    assert T.dim == 4 and verify_relations(T).ok
    assert not T.E[0].apply(tensor_vectors({0: ONE}, {0: ONE}, V1.dim))
    V0 = build_irreducible(a2, (0, 0))
    M = build_irreducible(a2, a2.weight((1, 1)))
    T = tensor(V0, M)
    assert T.E == M.E and T.F == M.F and T.weights == M.weights


@pytest.mark.parametrize("name,s,lam", catalog_modules(), ids=[c[0] for c in catalog_modules()])
def test_serialization_roundtrip(name, s, lam):
    V = build_irreducible(s, lam)
    text = render_realization(V, s.digest())
    W = parse_realization(text, s.root)
    assert W.E == V.E and W.F == V.F and W.weights == V.weights and W.highest == V.highest
    assert render_realization(W, s.digest()) == text
