"""Acceptance gate: one test per criterion, one PASS/FAIL line per criterion.

Every check is exact: equality of rational functions in Q(q), exact kernel
dimensions and exact verdicts.  No numeric tolerance is involved anywhere.
"""

import os
import time

import pytest

from iquantum import verify as vf
from iquantum.cache import RealizationCache
from iquantum.formats import parse_datum, parse_parameters, render_datum, render_parameters
from iquantum.iqp import (build_coideal_action, default_parameters, find_trivial_vector, pi_imath, projection_hom,
                          validate_parameters, vi_module)
from iquantum.linalg import SparseMatrix, determinant, nullspace
from iquantum.qfield import ONE, ZERO, parse, render
from iquantum.repmod import (build_crystal_lattice, build_irreducible, congruent_at_infinity, gram_matrix,
                             kashiwara, parse_realization, render_realization, rho_image, verify_relations,
                             word_matrix)
from iquantum.rootdata import dominant_weights, longest_element, rank_one_datum, satake_of_type

from conftest import ACCEPTANCE, CATALOG

CAP_DIM = 400
# negative existence sweep bound; IQUANTUM_SWEEP_DIM=400 reaches the full dimension cap (about 9 minutes)
SWEEP_DIM = int(os.environ.get("IQUANTUM_SWEEP_DIM", "100"))
RELATION_DATA = [c for c in CATALOG if c[0] != "FII"]


def record(n, failures, detail=""):
    ok = not failures
    ACCEPTANCE[n] = (ok, detail if ok else "; ".join(failures[:5]))
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}")
    assert ok, failures


def smallest_nonzero(s, count=2):
    return [lam for lam in dominant_weights(s, CAP_DIM) if any(lam)][:count]


@pytest.fixture(scope="module")
def suite():
    t = time.perf_counter()
    rep = vf.rank1_catalog_suite(vf.DEFAULT_SUITE, CAP_DIM)
    return rep, time.perf_counter() - t


def suite_modules():
    out = []
    for fam, n, k, lam in vf.suite_jobs():
        s = rank_one_datum(fam, n)
        out.append((f"{fam}{n} k={k}", s, lam))
    return out


def test_criterion_1_relations():
    fails, t = [], time.perf_counter()
    count = 0
    for fam, n in RELATION_DATA:
        s = rank_one_datum(fam, n)
        for lam in smallest_nonzero(s):
            rep = verify_relations(build_irreducible(s, lam, CAP_DIM))
            count += 1
            if not rep.ok:
                fails.append(f"{fam}{n} {lam}: {rep.failure}")
    record(1, fails, f"{count} modules, {time.perf_counter() - t:.1f}s")


def test_criterion_2_form_and_lattice():
    fails = []
    for name, s, lam in suite_modules():
        V = build_irreducible(s, lam, CAP_DIM)
        G = gram_matrix(V)
        if G.entry(0, 0) != ONE:
            fails.append(f"{name}: (v_lambda, v_lambda) != 1")
        for i in range(V.n):
            for kind, X in (("E", V.E[i]), ("F", V.F[i])):
                if X.transpose() @ G != G @ rho_image(V, kind, i):
                    fails.append(f"{name}: contragredience fails for {kind}_{i}")
        lat = build_crystal_lattice(V)
        if len(lat) != s.cartan.weyl_dimension(s.root.h_coords(lam)) or len(lat) != V.dim:
            fails.append(f"{name}: lattice size {len(lat)}")
        for i in range(V.n):
            if kashiwara(V, i, "E", {0: ONE}):
                fails.append(f"{name}: E~_{i} v_lambda != 0")
            for b in lat.vectors:
                e, f = kashiwara(V, i, "E", b), kashiwara(V, i, "F", b)
                if not (lat.in_lattice(e) and lat.in_lattice(f)):
                    fails.append(f"{name}: lattice not stable under node {i}")
                elif not congruent_at_infinity(lat, f, {}) and \
                        not congruent_at_infinity(lat, kashiwara(V, i, "E", f), b):
                    fails.append(f"{name}: E~F~ b != b mod q^-1 L at node {i}")
    record(2, fails, f"{len(suite_modules())} modules")


def test_criterion_3_braid():
    fails = []
    a2 = satake_of_type("A", 2)
    for coords in [(1, 0), (1, 1)]:
        V = build_irreducible(a2, a2.weight(coords))
        if word_matrix(V, (0, 1, 0)) != word_matrix(V, (1, 0, 1)):
            fails.append(f"A2 {coords}: T1T2T1 != T2T1T2")
    words = 0
    for fam, n in CATALOG:
        s = rank_one_datum(fam, n)
        V = build_irreducible(s, smallest_nonzero(s, 1)[0], CAP_DIM)
        bullet = sorted(s.bullet)
        if bullet:
            w1 = longest_element(s.cartan, bullet)
            w2 = longest_element(s.cartan, bullet, prefer=list(reversed(bullet)))
            words += w1 != w2
            if word_matrix(V, w1) != word_matrix(V, w2):
                fails.append(f"{fam}{n}: T_w depends on the reduced word")
        for i in range(V.n):
            from iquantum.repmod import braid_matrix
            T, Ti = braid_matrix(V, i), braid_matrix(V, i, inverse=True)
            if T @ Ti != SparseMatrix.identity(V.dim) or determinant(T) == ZERO:
                fails.append(f"{fam}{n}: T_{i} not invertible")
    record(3, fails, f"{words} catalog data with distinct reduced words")


def test_criterion_4_parameters():
    fails = []
    for fam, n in CATALOG:
        s = rank_one_datum(fam, n)
        rep = validate_parameters(default_parameters(s), s)
        if not rep.ok:
            fails.append(f"{fam}{n}: {rep.failed_constraints()}")
    if vf.negative_control() != ["bar-twist"]:
        fails.append(f"negative control: {vf.negative_control()}")
    record(4, fails, "8 types valid, varsigma = q fails bar-twist only")


def test_criterion_5_suite(suite):
    rep, secs = suite
    fails = [e.summary_row() for e in rep.entries
             if not (e.status == vf.OK and e.trivial_found and e.kernel_dim == 1 and e.congruence)]
    if not rep.all_ok:
        fails.append("suite not all ok")
    record(5, fails, f"{len(rep.entries)} entries, {secs:.1f}s")


def test_criterion_6_negative_existence():
    fails, total = [], 0
    for fam, n in CATALOG:
        s = rank_one_datum(fam, n)
        for lam, absent in vf.negative_existence_sweep(s, default_parameters(s), SWEEP_DIM):
            total += 1
            if not absent:
                fails.append(f"{fam}{n} {lam}: trivial vector found")
    record(6, fails, f"{total} weights with nonzero class, dim <= {SWEEP_DIM}")


def test_criterion_7_route_agreement(suite):
    rep, _ = suite
    fails = [e.summary_row() for e in rep.entries if e.route_agreement is not True]
    a2 = satake_of_type("A", 2)
    p = default_parameters(a2)
    for coords, dim in [((2, 0), 6), ((2, 2), 27)]:
        r = vf.verify_strong(a2, p, a2.weight(coords), CAP_DIM)
        if r.dimension != dim or r.route_agreement is not True or not r.verdict:
            fails.append(r.summary_row())
    record(7, fails, f"{len(rep.entries) + 2} entries")


def test_criterion_8_projection():
    fails = []
    s = rank_one_datum("AI", 1)
    p = default_parameters(s)
    A4 = build_coideal_action(build_irreducible(s, (4,)), s, p)
    A2 = build_coideal_action(build_irreducible(s, (2,)), s, p)
    pr = projection_hom(A4, A2)
    if not (pr.exists and pr.unique):
        fails.append(f"projection exists={pr.exists} unique={pr.unique}")
    else:
        if pr.matrix.apply({0: ONE}) != {0: ONE}:
            fails.append("v_lambda is not sent to v_mu")
        w4 = find_trivial_vector(A4).vector
        w2 = find_trivial_vector(A2).vector
        img = pr.matrix.apply(w4)
        # img and w2 proportional and nonzero: the 2x(dim) minors vanish
        k = next(iter(w2))
        if not img or any(img.get(j, ZERO) * w2[k] != w2.get(j, ZERO) * img.get(k, ZERO)
                          for j in set(img) | set(w2)):
            fails.append("trivial line not mapped onto trivial line")
    record(8, fails, "(4w, 2w)")


def test_criterion_9_vi_module():
    fails = []
    s = rank_one_datum("AI", 1)
    p = default_parameters(s)
    M = vi_module(s, p, (0,), (0,), (1,))
    T = vi_module(s, p, (0,), (0,), (0,))
    res = pi_imath(M, T)
    it = res.intertwiner
    if not (it.exists and it.unique):
        fails.append(f"pi exists={it.exists} unique={it.unique}")
    else:
        if it.matrix.apply(M.coordinates(M.generator)) != T.coordinates(T.generator):
            fails.append("generator not sent to generator")
        if not res.kernel_invariant:
            fails.append("kernel not coideal-invariant")
        if len(res.kernel) != M.dim - T.dim or not res.surjective:
            fails.append(f"kernel dim {len(res.kernel)} for {M.dim} -> {T.dim}")
    record(9, fails, f"dim V^i(0,0;w) = {M.dim}")


def test_criterion_10_determinism(tmp_path):
    fails = []
    jobs = [j for j in vf.suite_jobs() if j[2] == 1]
    for job in jobs:
        a, b = vf.run_suite_job(job).to_text(), vf.run_suite_job(job).to_text()
        if a != b:
            fails.append(f"report differs for {job[:3]}")
    for fam, n in CATALOG:
        s = rank_one_datum(fam, n)
        lam = smallest_nonzero(s, 1)[0]
        e1 = RealizationCache(tmp_path / "one").build(s, lam)
        e2 = RealizationCache(tmp_path / "two").build(s, lam)
        if e1.path.read_bytes() != e2.path.read_bytes():
            fails.append(f"{fam}{n}: cache entries differ")
        text = render_datum(s)
        if render_datum(parse_datum(text)) != text:
            fails.append(f"{fam}{n}: datum round trip")
        ptext = render_parameters(default_parameters(s), s)
        if render_parameters(parse_parameters(ptext, s), s) != ptext:
            fails.append(f"{fam}{n}: parameter round trip")
        rtext = render_realization(build_irreducible(s, lam), s.digest())
        if render_realization(parse_realization(rtext, s.root), s.digest()) != rtext:
            fails.append(f"{fam}{n}: realization round trip")
    for e in (vf.run_suite_job(j) for j in jobs):
        if e.constant is not None and render(parse(e.constant)) != e.constant:
            fails.append(f"constant {e.constant} does not round trip")
    record(10, fails, f"{len(jobs)} reports, {len(CATALOG)} cache entries")
