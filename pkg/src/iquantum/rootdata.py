"""Cartan data, root data, Satake data and the lattices X^i, Y^i.

Nodes are addressed internally by position ``0..n-1``; ``CartanDatum.labels`` keeps
the user-facing names.  Lattice elements are integer tuples in a fixed basis of
Y (coweights) or X (weights); the pairing matrix P gives <y, x> = y^T P x.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

IntVec = Tuple[int, ...]
IntMat = Tuple[Tuple[int, ...], ...]

STRICT = "strict"
GENERALIZED = "generalized"


class DatumError(ValueError):
    """Malformed or inadmissible datum."""


class InfiniteTypeError(DatumError):
    """A Weyl-group computation was requested on a non-finite subdatum."""


# ---------------------------------------------------------------------------
# small integer matrix helpers


def mat_vec(m: Sequence[Sequence[int]], v: Sequence[int]) -> IntVec:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m)


def mat_mul(a, b) -> IntMat:
    bt = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def identity(n: int) -> IntMat:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(m) -> IntMat:
    return tuple(zip(*m)) if m else ()


def _det_fraction(m: Sequence[Sequence[int]]) -> Fraction:
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return det


def is_positive_definite(m: Sequence[Sequence[Fraction]]) -> bool:
    """Sylvester's criterion with exact arithmetic."""
    n = len(m)
    for k in range(1, n + 1):
        if _det_fraction([row[:k] for row in m[:k]]) <= 0:
            return False
    return True


@dataclass(frozen=True)
class SmithForm:
    """U A V = diag(d) with U, V unimodular; ``Vinv`` is V^-1."""

    diagonal: IntVec
    U: IntMat
    V: IntMat
    Vinv: IntMat

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(a: Sequence[Sequence[int]]) -> SmithForm:
    m = len(a)
    n = len(a[0]) if m else 0
    A = [list(row) for row in a]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def add_row(dst, src, c):  # row_dst += c*row_src
        A[dst] = [x + c * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def swap_cols(i, j):
        for M in (A, V):
            for row in M:
                row[i], row[j] = row[j], row[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_col(dst, src, c):  # col_dst += c*col_src
        for M in (A, V):
            for row in M:
                row[dst] += c * row[src]
        Vi[src] = [x - c * y for x, y in zip(Vi[src], Vi[dst])]

    def neg_row(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]

    t = 0
    while t < min(m, n):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j] != 0]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    qt = A[i][t] // A[t][t]
                    add_row(i, t, -qt)
                    if A[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    qt = A[t][j] // A[t][t]
                    add_col(j, t, -qt)
                    if A[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if A[i][j] % A[t][t]), None)
                if bad is None:
                    break
                add_row(t, bad[0], 1)
        if A[t][t] < 0:
            neg_row(t)
        t += 1
    diag = tuple(A[k][k] for k in range(min(m, n)))
    return SmithForm(diag, tuple(map(tuple, U)), tuple(map(tuple, V)), tuple(map(tuple, Vi)))


def integer_kernel(a: Sequence[Sequence[int]], ncols: int) -> List[IntVec]:
    """Z-basis of {x in Z^ncols : a x = 0}."""
    if not a:
        return [tuple(int(i == j) for i in range(ncols)) for j in range(ncols)]
    snf = smith_normal_form(a)
    r = snf.rank
    return [tuple(snf.V[i][k] for i in range(ncols)) for k in range(r, ncols)]


# ---------------------------------------------------------------------------
# Cartan data


@dataclass(frozen=True)
class Violation:
    axiom: str
    detail: str

    def __str__(self):
        return f"{self.axiom}: {self.detail}"


@dataclass(frozen=True)
class CartanDatum:
    labels: Tuple[str, ...]
    gcm: IntMat
    d: IntVec

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self.labels.index(str(label))

    def a(self, i: int, j: int) -> int:
        return self.gcm[i][j]

    def symmetrized(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(self.d[i] * self.gcm[i][j] for j in range(self.n)) for i in range(self.n))

    def neighbours(self, i: int) -> List[int]:
        return [j for j in range(self.n) if j != i and self.gcm[i][j] != 0]

    def connected_components(self, nodes: Optional[Sequence[int]] = None) -> List[List[int]]:
        nodes = list(range(self.n)) if nodes is None else list(nodes)
        left = set(nodes)
        comps = []
        for s in nodes:
            if s not in left:
                continue
            comp, stack = [], [s]
            left.discard(s)
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in self.neighbours(x):
                    if y in left:
                        left.discard(y)
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_finite_type(self, nodes: Optional[Sequence[int]] = None) -> bool:
        nodes = list(range(self.n)) if nodes is None else sorted(nodes)
        if not nodes:
            return True
        sym = [[Fraction(self.d[i] * self.gcm[i][j]) for j in nodes] for i in nodes]
        return is_positive_definite(sym)

    def restrict(self, nodes: Sequence[int]) -> "CartanDatum":
        nodes = list(nodes)
        return CartanDatum(tuple(self.labels[i] for i in nodes),
                           tuple(tuple(self.gcm[i][j] for j in nodes) for i in nodes),
                           tuple(self.d[i] for i in nodes))

    def validate(self) -> List[Violation]:
        out = []
        n = self.n
        if len(self.gcm) != n or any(len(r) != n for r in self.gcm):
            return [Violation("shape", f"GCM must be {n}x{n}")]
        if len(self.d) != n:
            return [Violation("shape", f"d must have {n} entries")]
        if len(set(self.labels)) != n:
            out.append(Violation("labels", "node labels must be distinct"))
        for i in range(n):
            if self.d[i] <= 0:
                out.append(Violation("symmetrizer", f"d_{self.labels[i]} = {self.d[i]} is not positive"))
            if self.gcm[i][i] != 2:
                out.append(Violation("diagonal", f"a_{self.labels[i]}{self.labels[i]} = {self.gcm[i][i]} != 2"))
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                li, lj = self.labels[i], self.labels[j]
                if self.gcm[i][j] > 0:
                    out.append(Violation("off-diagonal", f"a_{li}{lj} = {self.gcm[i][j]} > 0"))
                if i < j and (self.gcm[i][j] == 0) != (self.gcm[j][i] == 0):
                    out.append(Violation("zero-pattern", f"a_{li}{lj} = {self.gcm[i][j]} but a_{lj}{li} = {self.gcm[j][i]}"))
                if i < j and self.d[i] * self.gcm[i][j] != self.d[j] * self.gcm[j][i]:
                    out.append(Violation("symmetrizability",
                                         f"d_{li} a_{li}{lj} = {self.d[i] * self.gcm[i][j]} != "
                                         f"d_{lj} a_{lj}{li} = {self.d[j] * self.gcm[j][i]}"))
        return out

    def is_automorphism(self, tau: Sequence[int]) -> bool:
        n = self.n
        if sorted(tau) != list(range(n)):
            return False
        return all(self.gcm[tau[i]][tau[j]] == self.gcm[i][j] for i in range(n) for j in range(n)) and \
            all(self.d[tau[i]] == self.d[i] for i in range(n))

    # -- root combinatorics (root coordinates over the simple roots) ----------

    def reflect_root(self, j: int, c: Sequence[int]) -> IntVec:
        pj = sum(c[i] * self.gcm[j][i] for i in range(self.n))
        out = list(c)
        out[j] -= pj
        return tuple(out)

    def positive_roots(self, nodes: Optional[Sequence[int]] = None, limit: int = 20000) -> List[IntVec]:
        """Positive roots supported on ``nodes`` (root coordinates over all of I)."""
        nodes = list(range(self.n)) if nodes is None else sorted(nodes)
        if not self.is_finite_type(nodes):
            raise InfiniteTypeError(f"subdatum {[self.labels[i] for i in nodes]} is not of finite type")
        simple = [tuple(int(k == j) for k in range(self.n)) for j in nodes]
        seen = set(simple)
        order = list(simple)
        frontier = list(simple)
        while frontier:
            nxt = []
            for r in frontier:
                for j in nodes:
                    s = self.reflect_root(j, r)
                    if all(x >= 0 for x in s) and s not in seen:
                        seen.add(s)
                        order.append(s)
                        nxt.append(s)
                        if len(seen) > limit:
                            raise InfiniteTypeError("root enumeration exceeded limit")
            frontier = nxt
        return sorted(order, key=lambda r: (sum(r), tuple(-x for x in r)))

    def root_norm(self, c: Sequence[int]) -> int:
        """(beta, beta)/2 in the normalisation (alpha_i, alpha_i) = 2 d_i."""
        tot = sum(c[i] * c[j] * self.d[i] * self.gcm[i][j] for i in range(self.n) for j in range(self.n))
        return tot // 2

    def coroot(self, c: Sequence[int]) -> IntVec:
        """Coroot of the root with coordinates c, in the basis {h_i}."""
        nb = self.root_norm(c)
        out = []
        for i in range(self.n):
            num = c[i] * self.d[i]
            if num % nb:
                raise DatumError("non-integral coroot")
            out.append(num // nb)
        return tuple(out)

    def apply_word_root(self, word: Sequence[int], c: Sequence[int]) -> IntVec:
        c = tuple(c)
        for j in reversed(word):
            c = self.reflect_root(j, c)
        return c

    def weyl_dimension(self, lam_coords: Sequence[int]) -> int:
        """dim V(lambda) from <h_i, lambda> via the Weyl dimension formula."""
        num = Fraction(1)
        for beta in self.positive_roots():
            a = sum(beta[i] * self.d[i] * (lam_coords[i] + 1) for i in range(self.n))
            b = sum(beta[i] * self.d[i] for i in range(self.n))
            num *= Fraction(a, b)
        if num.denominator != 1:
            raise ArithmeticError("Weyl dimension formula gave a non-integer")
        return int(num)


def longest_element(cartan: CartanDatum, nodes: Sequence[int], prefer: Optional[Sequence[int]] = None) -> Tuple[int, ...]:
    """A reduced word for the longest element of W(nodes), built by greedy ascent.

    ``prefer`` fixes the order in which generators are tried, which lets callers
    produce different reduced words of the same element.
    """
    nodes = sorted(nodes)
    if not nodes:
        return ()
    npos = len(cartan.positive_roots(nodes))
    order = list(prefer) if prefer is not None else nodes
    word: List[int] = []
    simple = {j: tuple(int(k == j) for k in range(cartan.n)) for j in nodes}
    while True:
        for j in order:
            img = cartan.apply_word_root(word, simple[j])
            if all(x >= 0 for x in img):
                word.append(j)
                break
        else:
            break
        if len(word) > npos:
            raise InfiniteTypeError("greedy ascent did not terminate")
    if len(word) != npos:
        raise DatumError("longest element length mismatch")
    return tuple(word)


# ---------------------------------------------------------------------------
# root data


@dataclass(frozen=True)
class RootDatum:
    cartan: CartanDatum
    pairing: IntMat      # rank Y x rank X
    coroots: IntMat      # h_i in Y coordinates
    roots: IntMat        # alpha_i in X coordinates

    @property
    def rank_Y(self) -> int:
        return len(self.pairing)

    @property
    def rank_X(self) -> int:
        return len(self.pairing[0]) if self.pairing else 0

    @cached_property
    def _hfun(self) -> IntMat:
        # row i is the functional x -> <h_i, x>
        return tuple(tuple(sum(h[a] * self.pairing[a][b] for a in range(self.rank_Y))
                           for b in range(self.rank_X)) for h in self.coroots)

    @cached_property
    def _afun(self) -> IntMat:
        # row j is the functional y -> <y, alpha_j>
        return tuple(tuple(sum(self.pairing[a][b] * al[b] for b in range(self.rank_X))
                           for a in range(self.rank_Y)) for al in self.roots)

    def pair(self, y: Sequence[int], x: Sequence[int]) -> int:
        return sum(y[a] * self.pairing[a][b] * x[b] for a in range(self.rank_Y) for b in range(self.rank_X)
                   if y[a] and x[b])

    def hx(self, i: int, x: Sequence[int]) -> int:
        return sum(c * v for c, v in zip(self._hfun[i], x))

    def h_coords(self, x: Sequence[int]) -> IntVec:
        return tuple(self.hx(i, x) for i in range(self.cartan.n))

    def reflect_X(self, j: int, x: Sequence[int]) -> IntVec:
        p = self.hx(j, x)
        return tuple(a - p * b for a, b in zip(x, self.roots[j]))

    def reflect_Y(self, j: int, y: Sequence[int]) -> IntVec:
        p = sum(c * v for c, v in zip(self._afun[j], y))
        return tuple(a - p * b for a, b in zip(y, self.coroots[j]))

    def word_X(self, word: Sequence[int], x: Sequence[int]) -> IntVec:
        x = tuple(x)
        for j in reversed(word):
            x = self.reflect_X(j, x)
        return x

    def word_Y(self, word: Sequence[int], y: Sequence[int]) -> IntVec:
        y = tuple(y)
        for j in reversed(word):
            y = self.reflect_Y(j, y)
        return y

    def word_matrix_X(self, word: Sequence[int]) -> IntMat:
        cols = [self.word_X(word, tuple(int(k == j) for k in range(self.rank_X))) for j in range(self.rank_X)]
        return transpose(cols)

    def word_matrix_Y(self, word: Sequence[int]) -> IntMat:
        cols = [self.word_Y(word, tuple(int(k == j) for k in range(self.rank_Y))) for j in range(self.rank_Y)]
        return transpose(cols)

    def root_to_X(self, c: Sequence[int]) -> IntVec:
        out = [0] * self.rank_X
        for i, ci in enumerate(c):
            if ci:
                for b in range(self.rank_X):
                    out[b] += ci * self.roots[i][b]
        return tuple(out)

    def coroot_to_Y(self, c: Sequence[int]) -> IntVec:
        out = [0] * self.rank_Y
        for i, ci in enumerate(c):
            if ci:
                for a in range(self.rank_Y):
                    out[a] += ci * self.coroots[i][a]
        return tuple(out)

    def is_dominant(self, x: Sequence[int]) -> bool:
        return all(self.hx(i, x) >= 0 for i in range(self.cartan.n))

    def validate(self) -> List[Violation]:
        out = self.cartan.validate()
        if out:
            return out
        n = self.cartan.n
        rY, rX = self.rank_Y, self.rank_X
        if any(len(r) != rX for r in self.pairing):
            return out + [Violation("pairing", "pairing matrix rows have unequal lengths")]
        if len(self.coroots) != n or any(len(h) != rY for h in self.coroots):
            return out + [Violation("coroots", f"need {n} coroots of length {rY}")]
        if len(self.roots) != n or any(len(a) != rX for a in self.roots):
            return out + [Violation("roots", f"need {n} roots of length {rX}")]
        if rY != rX or abs(_det_fraction(self.pairing)) != 1:
            out.append(Violation("perfect pairing", "pairing matrix is not unimodular"))
        for i in range(n):
            for j in range(n):
                v = self.pair(self.coroots[i], self.roots[j])
                if v != self.cartan.gcm[i][j]:
                    li, lj = self.cartan.labels[i], self.cartan.labels[j]
                    out.append(Violation("root pairing", f"<h_{li}, alpha_{lj}> = {v} != a_{li}{lj} = {self.cartan.gcm[i][j]}"))
        if _rank_int(self.coroots) < n:
            out.append(Violation("Y-regular", "coroots are linearly dependent"))
        if _rank_int(self.roots) < n:
            out.append(Violation("X-regular", "roots are linearly dependent"))
        return out


def _rank_int(rows) -> int:
    if not rows:
        return 0
    return smith_normal_form(rows).rank


# ---------------------------------------------------------------------------
# Satake data


@dataclass(frozen=True)
class SatakeDatum:
    root: RootDatum
    bullet: FrozenSet[int]
    tau: Tuple[int, ...]
    tau_Y: IntMat
    tau_X: IntMat
    mode: str = STRICT
    name: str = ""

    @property
    def cartan(self) -> CartanDatum:
        return self.root.cartan

    @property
    def n(self) -> int:
        return self.cartan.n

    @property
    def white(self) -> List[int]:
        return [i for i in range(self.n) if i not in self.bullet]

    def validate(self) -> List[Violation]:
        out = self.root.validate()
        if out:
            return out
        cart = self.cartan
        n = cart.n
        L = cart.labels
        if sorted(self.tau) != list(range(n)):
            return [Violation("tau", "tau is not a permutation of the nodes")]
        if any(self.tau[self.tau[i]] != i for i in range(n)):
            out.append(Violation("tau involution", "tau has order > 2"))
        if not cart.is_automorphism(self.tau):
            out.append(Violation("tau automorphism", "tau does not preserve the GCM and d"))
        if mat_mul(self.tau_Y, self.tau_Y) != identity(self.root.rank_Y):
            out.append(Violation("tau_Y involution", "tau_Y^2 != 1"))
        if mat_mul(self.tau_X, self.tau_X) != identity(self.root.rank_X):
            out.append(Violation("tau_X involution", "tau_X^2 != 1"))
        for i in range(n):
            if mat_vec(self.tau_Y, self.root.coroots[i]) != tuple(self.root.coroots[self.tau[i]]):
                out.append(Violation("tau(h_i) = h_tau(i)", f"fails at i = {L[i]}"))
            if mat_vec(self.tau_X, self.root.roots[i]) != tuple(self.root.roots[self.tau[i]]):
                out.append(Violation("tau(alpha_i) = alpha_tau(i)", f"fails at i = {L[i]}"))
        P = self.root.pairing
        if mat_mul(mat_mul(transpose(self.tau_Y), P), self.tau_X) != tuple(map(tuple, P)):
            out.append(Violation("tau-invariant pairing", "<tau h, tau x> != <h, x>"))
        if any(self.tau[j] not in self.bullet for j in self.bullet):
            out.append(Violation("tau(I_bullet) = I_bullet", "tau does not preserve I_bullet"))
        if not cart.is_finite_type(sorted(self.bullet)):
            out.append(Violation("I_bullet finite type", "I_bullet is not of finite type"))
            return out
        wb = longest_element(cart, sorted(self.bullet))
        for j in sorted(self.bullet):
            img = cart.apply_word_root(wb, tuple(int(k == j) for k in range(n)))
            want = tuple(-int(k == self.tau[j]) for k in range(n))
            if img != want:
                out.append(Violation("-w_bullet = tau on I_bullet", f"w_bullet(alpha_{L[j]}) != -alpha_{L[self.tau[j]]}"))
        if self.mode == STRICT:
            two_rho_v = doubled_rho(self.root, sorted(self.bullet))[0]
            for j in self.white:
                if self.tau[j] == j:
                    v = sum(two_rho_v[a] * self.root._afun[j][a] for a in range(self.root.rank_Y))
                    if v % 2:
                        out.append(Violation("integrality", f"<rho_bullet^v, alpha_{L[j]}> = {Fraction(v, 2)} is not an integer"))
        elif self.mode != GENERALIZED:
            out.append(Violation("mode", f"unknown mode {self.mode!r}"))
        return out

    @cached_property
    def derived(self) -> "DerivedSets":
        return derive_sets(self)

    def canonical_text(self) -> str:
        from .formats import render_datum
        return render_datum(self)

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()

    def weight(self, coords: Sequence[int]) -> IntVec:
        """Weight with the given <h_i, .> values (simply connected data only)."""
        if self.root.rank_X != self.n or self.root.pairing != identity(self.n) or \
                self.root.coroots != identity(self.n):
            raise DatumError("fundamental-weight coordinates need a simply connected datum")
        return tuple(coords)

    def fundamental_weight(self, i: int) -> IntVec:
        return self.weight(tuple(int(k == i) for k in range(self.n)))


def validate(datum) -> List[Violation]:
    """Every violated axiom; empty list means valid."""
    return datum.validate()


def build_simply_connected(cartan: CartanDatum, tau: Optional[Sequence[int]] = None,
                           bullet: Sequence[int] = (), mode: str = STRICT, name: str = "") -> SatakeDatum:
    """Y = Z^I on {h_i}, X = its dual on the fundamental weights, alpha_j = GCM column."""
    n = cartan.n
    tau = tuple(range(n)) if tau is None else tuple(tau)
    if not cartan.is_automorphism(tau):
        raise DatumError("tau is not an automorphism of the Cartan datum")
    ident = identity(n)
    roots = tuple(tuple(cartan.gcm[i][j] for i in range(n)) for j in range(n))
    perm = tuple(tuple(int(tau[j] == i) for j in range(n)) for i in range(n))
    root = RootDatum(cartan, ident, ident, roots)
    return SatakeDatum(root, frozenset(bullet), tau, perm, perm, mode, name)


def doubled_rho(root: RootDatum, nodes: Sequence[int]) -> Tuple[IntVec, IntVec]:
    """(2 rho^v, 2 rho) of the subdatum ``nodes`` as elements of Y and X."""
    cart = root.cartan
    ry = [0] * root.rank_Y
    rx = [0] * root.rank_X
    if not nodes:
        return tuple(ry), tuple(rx)
    for beta in cart.positive_roots(nodes):
        cv = cart.coroot(beta)
        for a, v in enumerate(root.coroot_to_Y(cv)):
            ry[a] += v
        for b, v in enumerate(root.root_to_X(beta)):
            rx[b] += v
    return tuple(ry), tuple(rx)


# ---------------------------------------------------------------------------
# derived sets


@dataclass(frozen=True)
class DerivedSets:
    satake: SatakeDatum = field(repr=False)
    white: Tuple[int, ...]
    white_fixed: Tuple[int, ...]          # I_circ^{tau, bullet}
    components: Dict[int, Tuple[int, ...]]
    two_rho_vee: IntVec
    two_rho: IntVec
    w_bullet: Tuple[int, ...]
    wX: IntMat
    wY: IntMat
    theta_X: IntMat                       # 1 + w_bullet tau on X
    snf: SmithForm
    Yi_basis: Tuple[IntVec, ...]

    def xi_key(self, x: Sequence[int]) -> Tuple[int, ...]:
        """Canonical representative of the class of x in X^i."""
        ux = mat_vec(self.snf.U, x)
        key = []
        for k, v in enumerate(ux):
            d = self.snf.diagonal[k] if k < len(self.snf.diagonal) else 0
            key.append(v % d if d else v)
        return tuple(key)

    def is_zero_class(self, x: Sequence[int]) -> bool:
        return all(v == 0 for v in self.xi_key(x))

    def same_class(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return self.xi_key(x) == self.xi_key(y)

    def theta(self, x: Sequence[int]) -> IntVec:
        """x + w_bullet tau(x)."""
        return mat_vec(self.theta_X, x)

    def w_tau_X(self, x: Sequence[int]) -> IntVec:
        return mat_vec(self.wX, mat_vec(self.satake.tau_X, x))


def derive_sets(satake: SatakeDatum) -> DerivedSets:
    root = satake.root
    cart = satake.cartan
    n = cart.n
    bullet = sorted(satake.bullet)
    white = tuple(i for i in range(n) if i not in satake.bullet)
    wb = longest_element(cart, bullet)
    wX = root.word_matrix_X(wb)
    wY = root.word_matrix_Y(wb)
    fixed = []
    for i in range(n):
        img = mat_vec(wY, root.coroots[satake.tau[i]])
        if tuple(root.coroots[i]) == img:
            fixed.append(i)
    comps = {}
    for i in white:
        comps[i] = rank_one_component_nodes(satake, i)
    two_rho_v, two_rho = doubled_rho(root, bullet)
    theta_X = tuple(tuple(int(a == b) + v for b, v in enumerate(row))
                    for a, row in enumerate(mat_mul(wX, satake.tau_X)))
    theta_Y = tuple(tuple(int(a == b) + v for b, v in enumerate(row))
                    for a, row in enumerate(mat_mul(wY, satake.tau_Y)))
    snf = smith_normal_form(theta_X)
    Yi = tuple(integer_kernel(theta_Y, root.rank_Y))
    return DerivedSets(satake, white, tuple(fixed), comps, two_rho_v, two_rho, wb, wX, wY,
                       theta_X, snf, Yi)


def rank_one_component_nodes(satake: SatakeDatum, i: int) -> Tuple[int, ...]:
    """i, tau(i) and the bullet nodes reachable from them through bullet nodes."""
    cart = satake.cartan
    start = {i, satake.tau[i]}
    seen = set(start)
    stack = list(start)
    while stack:
        x = stack.pop()
        for y in cart.neighbours(x):
            if y in satake.bullet and y not in seen:
                seen.add(y)
                stack.append(y)
    return tuple(sorted(seen))


# ---------------------------------------------------------------------------
# finite-type Cartan data and the rank-one catalog


def _from_gram(gram: Sequence[Sequence[int]], labels=None) -> CartanDatum:
    n = len(gram)
    gcm = tuple(tuple(2 * gram[i][j] // gram[i][i] for j in range(n)) for i in range(n))
    for i in range(n):
        for j in range(n):
            if 2 * gram[i][j] % gram[i][i]:
                raise DatumError("Gram matrix does not give an integral Cartan matrix")
    half = [gram[i][i] // 2 for i in range(n)]
    g = 0
    for h in half:
        g = _gcd(g, h)
    d = tuple(h // g for h in half)
    labels = tuple(str(k + 1) for k in range(n)) if labels is None else tuple(map(str, labels))
    return CartanDatum(labels, gcm, d)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def cartan_type(family: str, n: int) -> CartanDatum:
    """Finite-type Cartan datum in Bourbaki labelling (nodes '1'..'n')."""
    g = [[0] * n for _ in range(n)]

    def link(i, j, v):
        g[i][j] = g[j][i] = v

    if family == "A" and n >= 1:
        for i in range(n):
            g[i][i] = 2
        for i in range(n - 1):
            link(i, i + 1, -1)
    elif family == "B" and n >= 2:
        for i in range(n):
            g[i][i] = 4
        g[n - 1][n - 1] = 2
        for i in range(n - 1):
            link(i, i + 1, -2)
    elif family == "C" and n >= 2:
        for i in range(n):
            g[i][i] = 2
        g[n - 1][n - 1] = 4
        for i in range(n - 2):
            link(i, i + 1, -1)
        link(n - 2, n - 1, -2)
    elif family == "D" and n >= 3:
        for i in range(n):
            g[i][i] = 2
        for i in range(n - 2):
            link(i, i + 1, -1)
        link(n - 3, n - 1, -1)
    elif family == "E" and n in (6, 7, 8):
        for i in range(n):
            g[i][i] = 2
        link(0, 2, -1)
        link(1, 3, -1)
        for i in range(2, n - 1):
            link(i, i + 1, -1)
    elif family == "F" and n == 4:
        g = [[4, -2, 0, 0], [-2, 4, -2, 0], [0, -2, 2, -1], [0, 0, -1, 2]]
    elif family == "G" and n == 2:
        g = [[2, -3], [-3, 6]]
    else:
        raise DatumError(f"unknown finite type {family}{n}")
    return _from_gram(g)


def product_cartan(*data: CartanDatum) -> CartanDatum:
    n = sum(c.n for c in data)
    gcm = [[0] * n for _ in range(n)]
    d = []
    off = 0
    for c in data:
        for i in range(c.n):
            for j in range(c.n):
                gcm[off + i][off + j] = c.gcm[i][j]
        d.extend(c.d)
        off += c.n
    g = 0
    for x in d:
        g = _gcd(g, x)
    return CartanDatum(tuple(str(k + 1) for k in range(n)), tuple(map(tuple, gcm)), tuple(x // g for x in d))


RANK_ONE_FAMILIES = ("AI", "AII", "AIII", "AIV", "BII", "CII", "DII", "FII")


def rank_one_shape(family: str, n: int) -> Tuple[CartanDatum, FrozenSet[int], Tuple[int, ...]]:
    """(Cartan datum, I_bullet, tau) of an irreducible real-rank-one type."""
    if family == "AI" and n == 1:
        return cartan_type("A", 1), frozenset(), (0,)
    if family == "AII" and n == 3:
        return cartan_type("A", 3), frozenset({0, 2}), (0, 1, 2)
    if family == "AIII" and n == 2:
        # A1 x A1 with the two nodes swapped
        return product_cartan(cartan_type("A", 1), cartan_type("A", 1)), frozenset(), (1, 0)
    if family == "AIV" and n >= 2:
        return cartan_type("A", n), frozenset(range(1, n - 1)), tuple(n - 1 - i for i in range(n))
    if family == "BII" and n >= 2:
        return cartan_type("B", n), frozenset(range(1, n)), tuple(range(n))
    if family == "CII" and n >= 3:
        return cartan_type("C", n), frozenset({0} | set(range(2, n))), tuple(range(n))
    if family == "DII" and n >= 3:
        tau = list(range(n))
        if n % 2 == 0:
            tau[n - 2], tau[n - 1] = n - 1, n - 2
        return cartan_type("D", n), frozenset(range(1, n)), tuple(tau)
    if family == "FII" and n == 4:
        return cartan_type("F", 4), frozenset({0, 1, 2}), (0, 1, 2, 3)
    raise DatumError(f"no real-rank-one type {family}{n}")


def rank_one_datum(family: str, n: int, mode: str = STRICT) -> SatakeDatum:
    cart, bullet, tau = rank_one_shape(family, n)
    return build_simply_connected(cart, tau, sorted(bullet), mode, name=f"{family}{n}")


def satake_of_type(family: str, n: int, bullet: Sequence[int] = (), tau: Optional[Sequence[int]] = None,
                   mode: str = STRICT, name: str = "") -> SatakeDatum:
    return build_simply_connected(cartan_type(family, n), tau, bullet, mode, name or f"{family}{n}")


def _candidate_shapes(m: int):
    out = []
    if m == 1:
        out.append(("AI", 1))
    if m == 3:
        out.append(("AII", 3))
    if m == 2:
        out.append(("AIII", 2))
    if m >= 2:
        out.append(("AIV", m))
        out.append(("BII", m))
    if m >= 3:
        out.append(("CII", m))
    if m >= 4:
        out.append(("DII", m))
    if m == 4:
        out.append(("FII", 4))
    return out


def _isomorphic(c1: CartanDatum, b1, t1, c2: CartanDatum, b2, t2) -> bool:
    """Backtracking search for a relabelling matching GCM, bullets and tau."""
    n = c1.n
    if n != c2.n:
        return False
    sig1 = [(i in b1, t1[i] == i, sorted(c1.gcm[i][j] for j in range(n))) for i in range(n)]
    sig2 = [(i in b2, t2[i] == i, sorted(c2.gcm[i][j] for j in range(n))) for i in range(n)]
    perm = [-1] * n
    used = [False] * n

    def ok(i, k):
        if sig1[i] != sig2[k]:
            return False
        for j in range(i):
            pj = perm[j]
            if c1.gcm[i][j] != c2.gcm[k][pj] or c1.gcm[j][i] != c2.gcm[pj][k]:
                return False
        ti = t1[i]
        if ti < i and perm[ti] != t2[k]:
            return False
        if ti == i and t2[k] != k:
            return False
        return True

    def rec(i):
        if i == n:
            return all(perm[t1[j]] == t2[perm[j]] for j in range(n))
        for k in range(n):
            if not used[k] and ok(i, k):
                perm[i] = k
                used[k] = True
                if rec(i + 1):
                    return True
                used[k] = False
        perm[i] = -1
        return False

    return rec(0)


@dataclass(frozen=True)
class RankOneComponent:
    node: int
    nodes: Tuple[int, ...]
    finite: bool
    family: Optional[str]
    size: Optional[int]

    @property
    def label(self) -> str:
        if self.family is None:
            return "not rank-1-finite" if not self.finite else "unclassified"
        return f"{self.family}{self.size}"


def classify_component(satake: SatakeDatum, nodes: Sequence[int]) -> Optional[Tuple[str, int]]:
    nodes = list(nodes)
    sub = satake.cartan.restrict(nodes)
    pos = {x: k for k, x in enumerate(nodes)}
    b1 = frozenset(pos[x] for x in nodes if x in satake.bullet)
    t1 = tuple(pos[satake.tau[x]] for x in nodes)
    for fam, m in _candidate_shapes(len(nodes)):
        c2, b2, t2 = rank_one_shape(fam, m)
        if _isomorphic(sub, b1, t1, c2, b2, t2):
            return fam, m
    return None


def rank_one_components(satake: SatakeDatum) -> Tuple[Dict[int, RankOneComponent], bool]:
    """Per tau-orbit in I_circ: its real-rank-one component and label.

    Returns the map (keyed by both nodes of each orbit) and the locally-finite verdict.
    """
    out: Dict[int, RankOneComponent] = {}
    locally_finite = True
    for i in satake.white:
        if i in out:
            continue
        nodes = rank_one_component_nodes(satake, i)
        finite = satake.cartan.is_finite_type(nodes)
        locally_finite &= finite
        cls = classify_component(satake, nodes) if finite else None
        comp = RankOneComponent(i, nodes, finite, cls[0] if cls else None, cls[1] if cls else None)
        out[i] = comp
        out[satake.tau[i]] = comp
    return out, locally_finite


def catalog_weight(satake: SatakeDatum, family: str, i: int) -> IntVec:
    """The generator of {lambda dominant : class of lambda = 0} for a rank-one type."""
    n = satake.n
    coords = [0] * n
    if family == "AI":
        coords[i] = 2
    elif family in ("AIII", "AIV"):
        coords[i] += 1
        coords[satake.tau[i]] += 1
    else:
        coords[i] = 1
    return satake.weight(coords)


def dominant_weights(satake: SatakeDatum, max_dim: int, max_total: int = 12) -> List[IntVec]:
    """Dominant weights (simply connected coordinates) with dim V(lambda) <= max_dim."""
    n = satake.n
    out = []
    for total in range(0, max_total + 1):
        for comp in _compositions(total, n):
            dim = satake.cartan.weyl_dimension(comp)
            if dim <= max_dim:
                out.append((dim, comp))
    out.sort()
    return [satake.weight(c) for _, c in out]


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for c in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for x in c:
            out.append(x - prev - 1)
            prev = x
        out.append(total + parts - 2 - prev)
        yield tuple(out)
