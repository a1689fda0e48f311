"""Weight-module realizations and the construction of V(lambda).

A realization stores one column-sparse matrix per E_i and F_i; K_h acts
diagonally through the weight table.  V(lambda) is grown one depth at a time:
a candidate F_i b is identified by its E-images, which is the same as working
modulo the radical of the contragredient form because a vector strictly below
the top weight of V(lambda) vanishes exactly when every E_j kills it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ..linalg import Echelon, SparseMatrix, Vec, axpy
from ..qfield import ONE, ZERO, RationalFunction, qint, qpow
from ..rootdata import DatumError, RootDatum, SatakeDatum

Weight = Tuple[int, ...]


class InternalInconsistency(RuntimeError):
    """A computed object contradicts a guaranteed identity."""


class CapExceeded(RuntimeError):
    """The requested module is larger than the configured dimension cap."""

    def __init__(self, dim: int, cap: int):
        super().__init__(f"dim V = {dim} exceeds the cap {cap}")
        self.dim = dim
        self.cap = cap


def root_of(datum) -> RootDatum:
    if isinstance(datum, SatakeDatum):
        return datum.root
    if isinstance(datum, RootDatum):
        return datum
    raise TypeError(f"expected a root or Satake datum, got {type(datum).__name__}")


def _wadd(a: Sequence[int], b: Sequence[int], s: int = 1) -> Weight:
    return tuple(x + s * y for x, y in zip(a, b))


class WeightModuleRealization:
    """Finite-dimensional weight module with explicit E_i, F_i matrices.

    ``parents[k] = (i, p)`` records that basis vector k is F_i applied to basis
    vector p; ``provenance[k]`` is the full F-monomial word (leftmost letter
    applied last).  Both are ``None`` for modules not built from a highest
    weight vector, such as tensor products.
    """

    def __init__(self, root: RootDatum, weights: Sequence[Weight], E: Sequence[SparseMatrix],
                 F: Sequence[SparseMatrix], highest: Optional[Weight] = None,
                 parents: Optional[Sequence[Optional[Tuple[int, int]]]] = None,
                 provenance: Optional[Sequence[Tuple[int, ...]]] = None, label: str = ""):
        self.root = root
        self.weights: Tuple[Weight, ...] = tuple(tuple(w) for w in weights)
        self.E = tuple(E)
        self.F = tuple(F)
        self.highest = tuple(highest) if highest is not None else None
        self.parents = tuple(parents) if parents is not None else None
        self.provenance = tuple(provenance) if provenance is not None else None
        self.label = label
        blocks: Dict[Weight, List[int]] = {}
        for k, w in enumerate(self.weights):
            blocks.setdefault(w, []).append(k)
        self.blocks: Dict[Weight, Tuple[int, ...]] = {w: tuple(ix) for w, ix in blocks.items()}
        self.block_order: Tuple[Weight, ...] = tuple(blocks)
        n = root.cartan.n
        self._hv = tuple(tuple(root.hx(i, w) for w in self.weights) for i in range(n))
        self.cache: Dict[object, object] = {}

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def n(self) -> int:
        return self.root.cartan.n

    def q_i(self, i: int) -> int:
        return self.root.cartan.d[i]

    def h_value(self, i: int, k: int) -> int:
        """<h_i, weight of basis vector k>."""
        return self._hv[i][k]

    def block(self, mu: Sequence[int]) -> Tuple[int, ...]:
        return self.blocks.get(tuple(mu), ())

    def basis_vector(self, k: int) -> Vec:
        return {k: ONE}

    def K(self, h: Sequence[int]) -> SparseMatrix:
        """Diagonal matrix of K_h."""
        ent = [qpow(self.root.pair(h, w)) for w in self.weights]
        return SparseMatrix.diagonal(ent)

    def K_node(self, i: int, power: int = 1) -> SparseMatrix:
        """Diagonal matrix of K_i^power, where K_i = K_{d_i h_i}."""
        d = self.q_i(i)
        return SparseMatrix.diagonal([qpow(power * d * v) for v in self._hv[i]])

    def apply_K_node(self, i: int, power: int, v: Vec) -> Vec:
        d = self.q_i(i) * power
        return {k: c * qpow(d * self._hv[i][k]) for k, c in v.items()}

    def weight_components(self, v: Vec) -> Dict[Weight, Vec]:
        out: Dict[Weight, Vec] = {}
        for k, c in v.items():
            out.setdefault(self.weights[k], {})[k] = c
        return out

    def __repr__(self):
        return f"WeightModuleRealization({self.label or 'module'}, dim={self.dim})"


# ---------------------------------------------------------------------------
# generator actions


def divided_power_chain(mat: SparseMatrix, d: int, v: Vec, limit: Optional[int] = None) -> List[Vec]:
    """[v, X v, X^(2) v, ...] stopping before the first zero (or after ``limit`` steps)."""
    out = [v]
    cur = v
    k = 0
    while cur and (limit is None or k < limit):
        k += 1
        cur = mat.apply(cur)
        if not cur:
            break
        inv = qint(k, d).inverse()
        cur = {key: c * inv for key, c in cur.items()}
        out.append(cur)
    return out


def divided_power(mat: SparseMatrix, d: int, n: int, v: Vec) -> Vec:
    if n < 0:
        raise ValueError("negative divided power")
    ch = divided_power_chain(mat, d, v, limit=n)
    return ch[n] if len(ch) > n else {}


def act(real: WeightModuleRealization, kind: str, index, v: Vec, n: int = 1) -> Vec:
    """Apply E_i^(n), F_i^(n) (kind 'E'/'F', index = node) or K_h (kind 'K', index = h)."""
    if kind == "K":
        h = tuple(index)
        if len(h) != real.root.rank_Y:
            raise DatumError("K_h needs h in Y")
        return {k: c * qpow(real.root.pair(h, real.weights[k])) for k, c in v.items()}
    if not (0 <= index < real.n):
        raise IndexError(f"node {index} out of range")
    mats = {"E": real.E, "F": real.F}.get(kind)
    if mats is None:
        raise ValueError(f"unknown generator kind {kind!r}")
    return divided_power(mats[index], real.q_i(index), n, v)


# ---------------------------------------------------------------------------
# construction of V(lambda)


def build_irreducible(datum, lam: Sequence[int], cap_dim: Optional[int] = None, label: str = "") -> WeightModuleRealization:
    root = root_of(datum)
    cart = root.cartan
    lam = tuple(lam)
    if len(lam) != root.rank_X:
        raise DatumError(f"weight needs {root.rank_X} coordinates")
    hl = root.h_coords(lam)
    if any(x < 0 for x in hl):
        raise DatumError(f"weight {lam} is not dominant (<h_i, lambda> = {hl})")
    if not cart.is_finite_type():
        raise DatumError("V(lambda) is only built for finite-type Cartan data")
    expected = cart.weyl_dimension(hl)
    if cap_dim is not None and expected > cap_dim:
        raise CapExceeded(expected, cap_dim)
    n = cart.n
    d = cart.d
    alphas = [tuple(a) for a in root.roots]

    weights: List[Weight] = [lam]
    parents: List[Optional[Tuple[int, int]]] = [None]
    prov: List[Tuple[int, ...]] = [()]
    Ecols: List[List[Vec]] = [[{}] for _ in range(n)]
    Fcols: List[List[Vec]] = [[{}] for _ in range(n)]
    blocks: Dict[Weight, List[int]] = {lam: [0]}

    layer = [lam] if any(hl) else []
    while layer:
        targets: Dict[Weight, None] = {}
        for mu in layer:
            for i in range(n):
                targets[_wadd(mu, alphas[i], -1)] = None
        new_layer = []
        for mu in targets:
            ech = Echelon(track=True)
            chosen: List[int] = []
            pending = []
            for i in range(n):
                src = _wadd(mu, alphas[i])
                for b in blocks.get(src, ()):
                    sig = _signature(root, d, alphas, Ecols, Fcols, i, b, mu)
                    if ech.add(sig):
                        k = len(weights)
                        weights.append(mu)
                        parents.append((i, b))
                        prov.append((i,) + prov[b])
                        for j in range(n):
                            Ecols[j].append({key[1]: c for key, c in sig.items() if key[0] == j})
                            Fcols[j].append({})
                        Fcols[i][b] = {k: ONE}
                        chosen.append(k)
                    else:
                        pending.append((i, b, sig))
            for i, b, sig in pending:
                combo = ech.express(sig)
                Fcols[i][b] = {chosen[pos]: c for pos, c in combo.items()}
            if chosen:
                blocks[mu] = chosen
                new_layer.append(mu)
        layer = new_layer

    dim = len(weights)
    if dim != expected:
        raise InternalInconsistency(f"built dimension {dim} != Weyl dimension {expected}")
    E = [SparseMatrix(dim, dim, Ecols[i]) for i in range(n)]
    F = [SparseMatrix(dim, dim, Fcols[i]) for i in range(n)]
    return WeightModuleRealization(root, weights, E, F, highest=lam, parents=parents, provenance=prov,
                                   label=label or f"V{hl}")


def _signature(root, d, alphas, Ecols, Fcols, i, b, mu) -> Dict[Tuple[int, int], RationalFunction]:
    """The family (E_j F_i b)_j, keyed by (j, basis index)."""
    sig: Dict[Tuple[int, int], RationalFunction] = {}
    Fi = Fcols[i]
    for j in range(len(alphas)):
        part: Vec = {}
        for k, c in Ecols[j][b].items():
            axpy(part, c, Fi[k])
        if i == j:
            m = root.hx(i, _wadd(mu, alphas[i]))
            if m:
                axpy(part, qint(m, d[i]), {b: ONE})
        for k, c in part.items():
            sig[(j, k)] = c
    return sig


# ---------------------------------------------------------------------------
# relations


@dataclass(frozen=True)
class RelationReport:
    ok: bool
    failure: Optional[str] = None
    checked: int = 0

    def __bool__(self):
        return self.ok


def _mat_power_divided(mat: SparseMatrix, d: int, r: int) -> SparseMatrix:
    out = SparseMatrix.identity(mat.nrows)
    for k in range(1, r + 1):
        out = (mat @ out).scale(qint(k, d).inverse())
    return out


def verify_relations(real: WeightModuleRealization) -> RelationReport:
    """Check weight grading, [E_i, F_j] and both q-Serre relations exactly."""
    root = real.root
    cart = root.cartan
    n = cart.n
    checked = 0
    for i in range(n):
        a = root.roots[i]
        for name, mat, s in (("E", real.E[i], 1), ("F", real.F[i], -1)):
            for k, col in enumerate(mat.cols):
                want = _wadd(real.weights[k], a, s)
                for r in col:
                    if real.weights[r] != want:
                        return RelationReport(False, f"{name}_{cart.labels[i]} breaks the weight grading at column {k}", checked)
        checked += 1
    for i in range(n):
        for j in range(n):
            lhs = real.E[i] @ real.F[j] - real.F[j] @ real.E[i]
            if i == j:
                rhs = SparseMatrix.diagonal([qint(real.h_value(i, k), cart.d[i]) for k in range(real.dim)])
            else:
                rhs = SparseMatrix.zero(real.dim, real.dim)
            checked += 1
            if lhs != rhs:
                return RelationReport(False, f"EF-commutator fails for (i, j) = ({cart.labels[i]}, {cart.labels[j]})", checked)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            top = 1 - cart.gcm[i][j]
            for name, mats in (("E", real.E), ("F", real.F)):
                powers = [_mat_power_divided(mats[i], cart.d[i], r) for r in range(top + 1)]
                total = SparseMatrix.zero(real.dim, real.dim)
                for r in range(top + 1):
                    s = top - r
                    term = powers[r] @ mats[j] @ powers[s]
                    total = total + term if s % 2 == 0 else total - term
                checked += 1
                if not total.is_zero():
                    return RelationReport(False, f"q-Serre relation for {name} fails at (i, j) = ({cart.labels[i]}, {cart.labels[j]})", checked)
    return RelationReport(True, None, checked)


# ---------------------------------------------------------------------------
# contragredient form


def gram_blocks(real: WeightModuleRealization) -> Dict[Weight, Dict[Tuple[int, int], RationalFunction]]:
    """Gram matrix of the contragredient form, one block per weight.

    Uses (F_i b', c) = q_i^(1 - <h_i, wt b'>) (b', E_i c), read off the
    construction parents.
    """
    key = "gram"
    if key in real.cache:
        return real.cache[key]
    if real.parents is None:
        raise ValueError("the form is only available on modules built from a highest weight vector")
    d = real.root.cartan.d
    G: Dict[Weight, Dict[Tuple[int, int], RationalFunction]] = {}
    top = real.weights[0]
    G[top] = {(0, 0): ONE}
    for mu in real.block_order[1:]:
        idx = real.block(mu)
        blk: Dict[Tuple[int, int], RationalFunction] = {}
        for b in idx:
            i, p = real.parents[b]
            src = G[real.weights[p]]
            scale = qpow(d[i] * (1 - real.h_value(i, p)))
            for c in idx:
                acc = ZERO
                for k, e in real.E[i].cols[c].items():
                    g = src.get((p, k))
                    if g:
                        acc = acc + e * g
                blk[(b, c)] = acc * scale if acc else ZERO
        G[mu] = blk
    real.cache[key] = G
    return G


def gram_matrix(real: WeightModuleRealization) -> SparseMatrix:
    G = gram_blocks(real)
    cols: List[Vec] = [dict() for _ in range(real.dim)]
    for blk in G.values():
        for (r, c), v in blk.items():
            if v:
                cols[c][r] = v
    return SparseMatrix(real.dim, real.dim, cols)


def contragredient_form(real: WeightModuleRealization, u: Vec, v: Vec) -> RationalFunction:
    G = gram_blocks(real)
    acc = ZERO
    for b, cu in u.items():
        blk = G[real.weights[b]]
        for c, cv in v.items():
            if real.weights[c] != real.weights[b]:
                continue
            g = blk.get((b, c))
            if g:
                acc = acc + cu * g * cv
    return acc


def rho_image(real: WeightModuleRealization, kind: str, i: int) -> SparseMatrix:
    """Matrix of rho(E_i) = q_i K_i F_i or rho(F_i) = q_i K_i^-1 E_i."""
    qi = qpow(real.q_i(i))
    if kind == "E":
        return (real.K_node(i, 1) @ real.F[i]).scale(qi)
    if kind == "F":
        return (real.K_node(i, -1) @ real.E[i]).scale(qi)
    raise ValueError(kind)


# ---------------------------------------------------------------------------
# tensor products


def tensor(M: WeightModuleRealization, N: WeightModuleRealization, label: str = "") -> WeightModuleRealization:
    """M (x) N with E_i = E_i (x) 1 + K_i (x) E_i and F_i = 1 (x) F_i + F_i (x) K_i^-1."""
    if M.root is not N.root and M.root != N.root:
        raise DatumError("tensor factors must share the root datum")
    root = M.root
    n = root.cartan.n
    dn = N.dim
    weights = [_wadd(a, b) for a in M.weights for b in N.weights]
    E, F = [], []
    for i in range(n):
        di = root.cartan.d[i]
        ecols: List[Vec] = []
        fcols: List[Vec] = []
        for a in range(M.dim):
            ka = qpow(di * M.h_value(i, a))
            for b in range(N.dim):
                e: Vec = {}
                for r, c in M.E[i].cols[a].items():
                    e[r * dn + b] = c
                for r, c in N.E[i].cols[b].items():
                    axpy(e, ka, {a * dn + r: c})
                f: Vec = {}
                for r, c in N.F[i].cols[b].items():
                    f[a * dn + r] = c
                kb = qpow(-di * N.h_value(i, b))
                for r, c in M.F[i].cols[a].items():
                    axpy(f, kb, {r * dn + b: c})
                ecols.append(e)
                fcols.append(f)
        E.append(SparseMatrix(len(weights), len(weights), ecols))
        F.append(SparseMatrix(len(weights), len(weights), fcols))
    return WeightModuleRealization(root, weights, E, F, label=label or f"{M.label}(x){N.label}")


def pair_index(M: WeightModuleRealization, N: WeightModuleRealization, a: int, b: int) -> int:
    return a * N.dim + b


def tensor_vectors(u: Vec, v: Vec, dn: int) -> Vec:
    out: Vec = {}
    for a, x in u.items():
        for b, y in v.items():
            out[a * dn + b] = x * y
    return out


# ---------------------------------------------------------------------------
# extremal vectors


def extremal_vector(real: WeightModuleRealization, word: Sequence[int]) -> Vec:
    """v_{w lambda} by iterated divided powers along a reduced word."""
    if real.highest is None:
        raise ValueError("extremal vectors need a highest weight module")
    v: Vec = {0: ONE}
    mu = real.highest
    for i in reversed(tuple(word)):
        m = real.root.hx(i, mu)
        if m >= 0:
            v = divided_power(real.F[i], real.q_i(i), m, v)
        else:
            v = divided_power(real.E[i], real.q_i(i), -m, v)
        mu = real.root.reflect_X(i, mu)
    return v
