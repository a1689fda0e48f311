"""Sparse exact linear algebra over Q(q).

Vectors are plain dicts ``{index: RationalFunction}`` holding nonzero entries only.
Matrices are stored by columns (``SparseMatrix.cols[j]`` is the image of the j-th
basis vector), which is the natural layout for module operators.
"""

from __future__ import annotations

from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .qfield import ONE, ZERO, RationalFunction

Vec = Dict[Hashable, RationalFunction]


class InconsistentSystem(ArithmeticError):
    """A linear system has no solution."""


def axpy(y: Vec, a: RationalFunction, x: Vec) -> None:
    """y += a*x in place, dropping cancelled entries."""
    if not a:
        return
    for k, v in x.items():
        t = y.get(k)
        if t is None:
            y[k] = a * v
        else:
            t = t + a * v
            if t:
                y[k] = t
            else:
                del y[k]


def vadd(x: Vec, y: Vec) -> Vec:
    out = dict(x)
    axpy(out, ONE, y)
    return out


def vsub(x: Vec, y: Vec) -> Vec:
    out = dict(x)
    axpy(out, -ONE, y)
    return out


def vscale(x: Vec, a) -> Vec:
    if not a:
        return {}
    return {k: a * v for k, v in x.items()}


def vlincomb(terms: Iterable[Tuple[RationalFunction, Vec]]) -> Vec:
    out: Vec = {}
    for a, x in terms:
        axpy(out, a, x)
    return out


class SparseMatrix:
    """Column-sparse matrix over Q(q) with shape (nrows, ncols)."""

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows: int, ncols: int, cols: Optional[List[Vec]] = None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols = cols if cols is not None else [dict() for _ in range(ncols)]

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, [{j: ONE} for j in range(n)])

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(nrows, ncols)

    @classmethod
    def diagonal(cls, entries: Sequence[RationalFunction]) -> "SparseMatrix":
        return cls(len(entries), len(entries), [({j: e} if e else {}) for j, e in enumerate(entries)])

    def apply(self, v: Vec) -> Vec:
        out: Vec = {}
        cols = self.cols
        for j, a in v.items():
            axpy(out, a, cols[j])
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        return SparseMatrix(self.nrows, other.ncols, [self.apply(c) for c in other.cols])

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        return SparseMatrix(self.nrows, self.ncols, [vadd(a, b) for a, b in zip(self.cols, other.cols)])

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        return SparseMatrix(self.nrows, self.ncols, [vsub(a, b) for a, b in zip(self.cols, other.cols)])

    def scale(self, a) -> "SparseMatrix":
        return SparseMatrix(self.nrows, self.ncols, [vscale(c, a) for c in self.cols])

    def __neg__(self):
        return self.scale(-ONE)

    def transpose(self) -> "SparseMatrix":
        cols: List[Vec] = [dict() for _ in range(self.nrows)]
        for j, c in enumerate(self.cols):
            for i, v in c.items():
                cols[i][j] = v
        return SparseMatrix(self.ncols, self.nrows, cols)

    def rows(self) -> List[Vec]:
        return self.transpose().cols

    def entry(self, i: int, j: int) -> RationalFunction:
        return self.cols[j].get(i, ZERO)

    def is_zero(self) -> bool:
        return all(not c for c in self.cols)

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and self.cols == other.cols

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def _pick_pivot(r: Vec):
    # smallest coefficient first keeps expression swell down; ties by key
    best = None
    best_key = None
    for k, v in r.items():
        key = (v.complexity(), k)
        if best_key is None or key < best_key:
            best, best_key = k, key
    return best


class Echelon:
    """Incremental row echelon form with optional coordinate tracking.

    ``add(v)`` inserts a vector if it is independent of those already inserted.
    ``express(v)`` writes v as a combination of the inserted vectors (by insertion
    position) or returns ``None`` when v is outside their span.
    """

    def __init__(self, track: bool = True):
        self.track = track
        self._rows: List[Tuple[Hashable, Vec, Vec]] = []  # (pivot, row, combo)
        self._pivots = set()
        self.count = 0

    def __len__(self):
        return self.count

    def _reduce(self, v: Vec):
        r = dict(v)
        combo: Vec = {}
        for p, row, rc in self._rows:
            c = r.get(p)
            if c is None:
                continue
            axpy(r, -c, row)
            if self.track:
                axpy(combo, c, rc)
        return r, combo

    def add(self, v: Vec) -> bool:
        r, combo = self._reduce(v)
        if not r:
            return False
        p = _pick_pivot(r)
        inv = r[p].inverse()
        row = {k: x * inv for k, x in r.items()}
        rc: Vec = {}
        if self.track:
            rc = {k: -x * inv for k, x in combo.items()}
            rc[self.count] = inv
        self._rows.append((p, row, rc))
        self._pivots.add(p)
        self.count += 1
        return True

    def contains(self, v: Vec) -> bool:
        r, _ = self._reduce(v)
        return not r

    def express(self, v: Vec) -> Optional[Vec]:
        if not self.track:
            raise ValueError("coordinate tracking disabled")
        r, combo = self._reduce(v)
        if r:
            return None
        return combo


def rref(rows: Iterable[Vec]) -> Dict[Hashable, Vec]:
    """Fully reduced row echelon form: {pivot column: row with 1 at pivot}."""
    piv: Dict[Hashable, Vec] = {}
    for r0 in rows:
        r = dict(r0)
        for p in [p for p in r if p in piv]:
            c = r.get(p)
            if c:
                axpy(r, -c, piv[p])
        if not r:
            continue
        p = _pick_pivot(r)
        inv = r[p].inverse()
        new = {k: x * inv for k, x in r.items()}
        for row in piv.values():
            c = row.get(p)
            if c is not None:
                axpy(row, -c, new)
        piv[p] = new
    return piv


def rank(rows: Iterable[Vec]) -> int:
    e = Echelon(track=False)
    n = 0
    for r in rows:
        if e.add(r):
            n += 1
    return n


def nullspace(rows: Iterable[Vec], unknowns: Sequence[Hashable]) -> List[Vec]:
    """Basis of {x : row.x = 0 for all rows}, x indexed by ``unknowns``."""
    piv = rref(rows)
    free = [u for u in unknowns if u not in piv]
    basis = []
    for f in free:
        x: Vec = {f: ONE}
        for p, row in piv.items():
            c = row.get(f)
            if c:
                x[p] = -c
        basis.append(x)
    return basis


_RHS = ("__rhs__",)


def solve(rows: Sequence[Vec], rhs: Sequence[RationalFunction], unknowns: Sequence[Hashable]):
    """Particular solution and nullspace basis of ``rows . x = rhs``.

    Raises InconsistentSystem when no solution exists.
    """
    aug = []
    for r, b in zip(rows, rhs):
        a = dict(r)
        if b:
            a[_RHS] = b
        aug.append(a)
    # pivot search must never land on the rhs column
    piv: Dict[Hashable, Vec] = {}
    for r0 in aug:
        r = dict(r0)
        for p in [p for p in r if p in piv]:
            c = r.get(p)
            if c:
                axpy(r, -c, piv[p])
        if not r:
            continue
        cand = {k: v for k, v in r.items() if k != _RHS}
        if not cand:
            raise InconsistentSystem("system is inconsistent")
        p = _pick_pivot(cand)
        inv = r[p].inverse()
        new = {k: x * inv for k, x in r.items()}
        for row in piv.values():
            c = row.get(p)
            if c is not None:
                axpy(row, -c, new)
        piv[p] = new
    x: Vec = {}
    for p, row in piv.items():
        b = row.get(_RHS)
        if b:
            x[p] = b
    free = [u for u in unknowns if u not in piv]
    basis = []
    for f in free:
        y: Vec = {f: ONE}
        for p, row in piv.items():
            c = row.get(f)
            if c:
                y[p] = -c
        basis.append(y)
    return x, basis


def determinant(m: SparseMatrix) -> RationalFunction:
    """Exact determinant by elimination (small matrices only)."""
    if m.nrows != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    n = m.nrows
    rows = [dict(r) for r in m.rows()]
    det = ONE
    for col in range(n):
        pr = None
        for i in range(col, n):
            if rows[i].get(col):
                pr = i
                break
        if pr is None:
            return ZERO
        if pr != col:
            rows[col], rows[pr] = rows[pr], rows[col]
            det = -det
        pv = rows[col][col]
        det = det * pv
        inv = pv.inverse()
        for i in range(col + 1, n):
            c = rows[i].get(col)
            if c:
                axpy(rows[i], -c * inv, rows[col])
    return det
