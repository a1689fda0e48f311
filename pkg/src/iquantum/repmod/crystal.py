"""Kashiwara operators, the crystal lattice and congruence at q = oo."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ..linalg import Echelon, SparseMatrix, Vec, axpy, nullspace, vsub
from ..qfield import ONE, RationalFunction
from .module import InternalInconsistency, Weight, WeightModuleRealization, divided_power_chain


class NotInLattice(ValueError):
    """A vector has a lattice coordinate with a pole at q = oo."""


def _kernel_of_E(real: WeightModuleRealization, i: int, idx: Sequence[int]) -> List[Vec]:
    rows: Dict[int, Vec] = {}
    for k in idx:
        for r, c in real.E[i].cols[k].items():
            rows.setdefault(r, {})[k] = c
    return nullspace([rows[r] for r in sorted(rows)], list(idx))


def kashiwara_matrices(real: WeightModuleRealization, i: int) -> Tuple[SparseMatrix, SparseMatrix]:
    """(E~_i, F~_i) as linear maps, from the i-string decomposition of every block."""
    key = ("kashiwara", i)
    if key in real.cache:
        return real.cache[key]
    d = real.q_i(i)
    # every string is F^(m) u with E_i u = 0; group its members by block
    members: Dict[Weight, List[Tuple[List[Vec], int]]] = {}
    for mu in real.block_order:
        for u in _kernel_of_E(real, i, real.block(mu)):
            chain = divided_power_chain(real.F[i], d, u)
            for m, vec in enumerate(chain):
                members.setdefault(real.weights[next(iter(vec))], []).append((chain, m))
    Ecols: List[Vec] = [dict() for _ in range(real.dim)]
    Fcols: List[Vec] = [dict() for _ in range(real.dim)]
    for mu in real.block_order:
        idx = real.block(mu)
        mem = members.get(mu, [])
        if len(mem) != len(idx):
            raise InternalInconsistency(f"string decomposition of block {mu} has {len(mem)} members, expected {len(idx)}")
        ech = Echelon(track=True)
        for chain, m in mem:
            if not ech.add(chain[m]):
                raise InternalInconsistency("string basis is dependent")
        for k in idx:
            combo = ech.express({k: ONE})
            e: Vec = {}
            f: Vec = {}
            for pos, c in combo.items():
                chain, m = mem[pos]
                if m >= 1:
                    axpy(e, c, chain[m - 1])
                if m + 1 < len(chain):
                    axpy(f, c, chain[m + 1])
            Ecols[k] = e
            Fcols[k] = f
    out = (SparseMatrix(real.dim, real.dim, Ecols), SparseMatrix(real.dim, real.dim, Fcols))
    real.cache[key] = out
    return out


def kashiwara(real: WeightModuleRealization, i: int, direction: str, v: Vec) -> Vec:
    Et, Ft = kashiwara_matrices(real, i)
    if direction in ("E", "e", "raise"):
        return Et.apply(v)
    if direction in ("F", "f", "lower"):
        return Ft.apply(v)
    raise ValueError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# A_oo-lattice helpers


def _val(x: RationalFunction):
    return x.valuation_at_infinity()


def a_infinity_basis(vectors: Sequence[Vec]) -> List[Tuple[object, Vec]]:
    """(pivot, vector) pairs forming a basis over A_oo of the A_oo-span of ``vectors``.

    Each step pivots on the entry of largest valuation at oo, so the
    elimination multipliers stay regular at oo.
    """
    work = [dict(v) for v in vectors if v]
    basis: List[Tuple[object, Vec]] = []
    while work:
        best = None
        for n, v in enumerate(work):
            for k, x in v.items():
                key = (_val(x), -n, _order_key(k))
                if best is None or key > best[0]:
                    best = (key, n, k)
        _, n, p = best
        g = work.pop(n)
        inv = g[p].inverse()
        nxt = []
        for v in work:
            c = v.get(p)
            if c:
                axpy(v, -(c * inv), g)
            if v:
                nxt.append(v)
        work = nxt
        basis.append((p, g))
    return basis


def _order_key(k):
    # deterministic tie-break; larger key wins so negate to prefer small indices
    return tuple(-x for x in k) if isinstance(k, tuple) else -k


def coordinates_in_basis(basis: Sequence[Tuple[object, Vec]], v: Vec) -> Optional[List[RationalFunction]]:
    """Coordinates of v in a triangular basis from ``a_infinity_basis``; None if outside."""
    r = dict(v)
    out = []
    for p, g in basis:
        c = r.get(p)
        if c:
            c = c * g[p].inverse()
            axpy(r, -c, g)
            out.append(c)
        else:
            out.append(RationalFunction(0))
    return None if r else out


# ---------------------------------------------------------------------------
# the crystal lattice


@dataclass
class CrystalLattice:
    """A_oo-basis of L(lambda) made of F~-monomials applied to v_lambda.

    ``vectors[p]`` is basis element p, ``words[p]`` its F~-monomial (leftmost
    letter applied last) and ``residues`` records, per block, the residue at
    q = oo of every candidate in the block's A_oo-basis.
    """

    real: WeightModuleRealization
    vectors: List[Vec]
    words: List[Tuple[int, ...]]
    weights: List[Weight]
    block_positions: Dict[Weight, Tuple[int, ...]]
    solvers: Dict[Weight, Echelon]

    def __len__(self):
        return len(self.vectors)

    def coordinates(self, v: Vec) -> Dict[int, RationalFunction]:
        out: Dict[int, RationalFunction] = {}
        for mu, comp in self.real.weight_components(v).items():
            pos = self.block_positions[mu]
            combo = self.solvers[mu].express(comp)
            if combo is None:
                raise InternalInconsistency("lattice basis does not span a block")
            for k, c in combo.items():
                out[pos[k]] = c
        return out

    def in_lattice(self, v: Vec) -> bool:
        return all(_val(c) <= 0 for c in self.coordinates(v).values())


def build_crystal_lattice(real: WeightModuleRealization) -> CrystalLattice:
    key = "crystal-lattice"
    if key in real.cache:
        return real.cache[key]
    if real.highest is None:
        raise ValueError("crystal lattices need a highest weight module")
    n = real.n
    Ft = [kashiwara_matrices(real, i)[1] for i in range(n)]
    vectors: List[Vec] = [{0: ONE}]
    words: List[Tuple[int, ...]] = [()]
    weights: List[Weight] = [real.weights[0]]
    positions: Dict[Weight, Tuple[int, ...]] = {real.weights[0]: (0,)}
    e0 = Echelon(track=True)
    e0.add({0: ONE})
    solvers: Dict[Weight, Echelon] = {real.weights[0]: e0}
    alphas = real.root.roots
    for mu in real.block_order[1:]:
        cands: List[Tuple[Tuple[int, ...], Vec]] = []
        for i in range(n):
            src = tuple(a + b for a, b in zip(mu, alphas[i]))
            for p in positions.get(src, ()):
                v = Ft[i].apply(vectors[p])
                if v:
                    cands.append(((i,) + words[p], v))
        basis = a_infinity_basis([v for _, v in cands])
        resid = Echelon(track=False)
        ech = Echelon(track=True)
        chosen = []
        for w, v in cands:
            coords = coordinates_in_basis(basis, v)
            if coords is None or any(_val(c) > 0 for c in coords):
                raise InternalInconsistency("candidate outside the A_oo-span it generates")
            res = {k: RationalFunction(c.value_at_infinity()) for k, c in enumerate(coords) if _val(c) == 0}
            if res and resid.add(res):
                ech.add(v)
                chosen.append((w, v))
        if len(chosen) != len(real.block(mu)):
            raise InternalInconsistency(f"crystal lattice has rank {len(chosen)} at weight {mu}, "
                                        f"expected {len(real.block(mu))}")
        start = len(vectors)
        for w, v in chosen:
            vectors.append(v)
            words.append(w)
            weights.append(mu)
        positions[mu] = tuple(range(start, len(vectors)))
        solvers[mu] = ech
    lat = CrystalLattice(real, vectors, words, weights, positions, solvers)
    real.cache[key] = lat
    return lat


def congruent_at_infinity(lattice: CrystalLattice, u: Vec, v: Vec) -> bool:
    """u = v modulo q^-1 L: every lattice coordinate of u - v has valuation <= -1."""
    return all(_val(c) <= -1 for c in lattice.coordinates(vsub(u, v)).values())


@dataclass(frozen=True)
class HighestVerdict:
    holds: bool
    constant: Optional[Fraction]
    witness: Optional[str] = None


def highest_at_infinity(lattice: CrystalLattice, v: Vec) -> HighestVerdict:
    """Whether E~_i v = 0 mod q^-1 L for all i, and the c with v = c v_lambda mod q^-1 L."""
    coords = lattice.coordinates(v)
    bad = [p for p, c in coords.items() if _val(c) > 0]
    if bad:
        raise NotInLattice(f"lattice coordinate {bad[0]} has a pole at q = oo")
    real = lattice.real
    for i in range(real.n):
        e = kashiwara(real, i, "E", v)
        for p, c in lattice.coordinates(e).items():
            if _val(c) > -1:
                return HighestVerdict(False, None, f"E~_{real.root.cartan.labels[i]} v has coordinate {p} of valuation {_val(c)}")
    c0 = coords.get(0)
    return HighestVerdict(True, c0.value_at_infinity() if c0 else Fraction(0))
