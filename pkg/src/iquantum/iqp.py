"""Parameters, coideal generators and the trivial-submodule machinery.

The coideal subalgebra is generated by E_j, F_j (j bullet), B_i (i white) and
K_h (h in Y^i).  Every solver here works on explicit matrices of a
``WeightModuleRealization``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import Echelon, InconsistentSystem, SparseMatrix, Vec, axpy, nullspace, solve, vscale
from .qfield import ONE, ZERO, RationalFunction, qfact, qint, qpow, render
from .repmod import (CrystalLattice, InternalInconsistency, WeightModuleRealization, build_irreducible,
                     conjugated_raising_matrix, extremal_vector, tensor, tensor_vectors)
from .rootdata import DatumError, SatakeDatum, mat_vec, rank_one_components


class ParameterError(ValueError):
    """Parameters cannot be produced or are structurally unusable."""


@dataclass
class ParameterSet:
    """varsigma_i and kappa_i for the white nodes (keys are node positions).

    ``shifts`` selects the kappa_i = [s_i]_i variant, ``order`` is the total
    order on the white nodes used by the AIV rows, and ``provenance`` says
    where the values came from.
    """

    varsigma: Dict[int, RationalFunction]
    kappa: Dict[int, RationalFunction]
    shifts: Optional[Dict[int, int]] = None
    order: Optional[Tuple[int, ...]] = None
    provenance: str = "user"
    _reports: Dict[str, "ParameterReport"] = field(default_factory=dict, repr=False, compare=False)

    def kappa_is_zero(self) -> bool:
        return all(not k for k in self.kappa.values())

    def with_kappa_shifts(self, satake: SatakeDatum, shifts: Dict[int, int]) -> "ParameterSet":
        d = satake.cartan.d
        kappa = dict(self.kappa)
        for i, s in shifts.items():
            kappa[i] = qint(s, d[i])
        return ParameterSet(dict(self.varsigma), kappa, dict(shifts), self.order, self.provenance + "+shifts")

    def as_text_map(self, satake: SatakeDatum) -> Dict[str, str]:
        L = satake.cartan.labels
        out = {}
        for i in sorted(self.varsigma):
            out[f"varsigma_{L[i]}"] = render(self.varsigma[i])
        for i in sorted(self.kappa):
            out[f"kappa_{L[i]}"] = render(self.kappa[i])
        if self.shifts:
            for i in sorted(self.shifts):
                out[f"shift_{L[i]}"] = str(self.shifts[i])
        return out


@dataclass(frozen=True)
class ConstraintCheck:
    constraint: str
    node: Optional[str]
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class ParameterReport:
    checks: Tuple[ConstraintCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> List[ConstraintCheck]:
        return [c for c in self.checks if not c.ok]

    def failed_constraints(self) -> List[str]:
        return sorted({c.constraint for c in self.failures()})

    def __bool__(self):
        return self.ok


# constraint names, in the order they are checked
INTEGRALITY = "integrality"              # varsigma_i, kappa_i Laurent with integer coefficients
TAU_SYMMETRY = "tau-symmetry"            # varsigma_tau(i) = varsigma_i when <h_i, w alpha_tau(i)> = 0
BAR_TWIST = "bar-twist"                  # varsigma_i = sign * q_i^(...) * bar(varsigma_tau(i))
UNITARITY = "unitarity"                  # bar(varsigma_i) = varsigma_i^-1
KAPPA_SUPPORT = "kappa-support"          # kappa_i = 0 off the fixed white nodes with even pairings
KAPPA_BAR = "kappa-bar-invariance"       # bar(kappa_i) = kappa_i
CONSTRAINTS = (INTEGRALITY, TAU_SYMMETRY, BAR_TWIST, UNITARITY, KAPPA_SUPPORT, KAPPA_BAR)


def _integral(f: RationalFunction) -> bool:
    return f.is_laurent() and f.numerator.has_integer_coefficients()


def bar_twist_rhs(satake: SatakeDatum, varsigma: Dict[int, RationalFunction], i: int) -> RationalFunction:
    der = satake.derived
    root = satake.root
    t = satake.tau[i]
    sign_exp = sum(a * b for a, b in zip(der.two_rho_vee, root._afun[i]))
    w_alpha = mat_vec(der.wX, root.roots[t])
    q_exp = -root.hx(i, tuple(a + b for a, b in zip(der.two_rho, w_alpha)))
    sign = -ONE if sign_exp % 2 else ONE
    return sign * qpow(satake.cartan.d[i] * q_exp) * varsigma[t].bar()


def validate_parameters(params: ParameterSet, satake: SatakeDatum) -> ParameterReport:
    key = satake.digest()
    if key in params._reports:
        return params._reports[key]
    der = satake.derived
    root = satake.root
    L = satake.cartan.labels
    checks: List[ConstraintCheck] = []
    white = list(der.white)
    for name, m in (("varsigma", params.varsigma), ("kappa", params.kappa)):
        extra = sorted(set(m) - set(white))
        missing = sorted(set(white) - set(m))
        if extra or missing:
            checks.append(ConstraintCheck("coverage", None, False,
                                          f"{name} must be given exactly on the white nodes "
                                          f"(missing {[L[i] for i in missing]}, extra {[L[i] for i in extra]})"))
    if any(c.constraint == "coverage" for c in checks):
        return ParameterReport(tuple(checks))
    for i in white:
        if not params.varsigma[i]:
            checks.append(ConstraintCheck("nonzero", L[i], False, "varsigma must be nonzero"))
    if checks:
        return ParameterReport(tuple(checks))
    fixed = set(der.white_fixed)
    for i in white:
        s, k = params.varsigma[i], params.kappa[i]
        t = satake.tau[i]
        ok = _integral(s) and _integral(k)
        checks.append(ConstraintCheck(INTEGRALITY, L[i], ok, "" if ok else
                                      f"varsigma = {render(s)}, kappa = {render(k)} must lie in Z[q, q^-1]"))
        pair = root.hx(i, mat_vec(der.wX, root.roots[t]))
        ok = pair != 0 or params.varsigma[t] == s
        checks.append(ConstraintCheck(TAU_SYMMETRY, L[i], ok, "" if ok else
                                      f"varsigma_{L[t]} = {render(params.varsigma[t])} differs from {render(s)}"))
        rhs = bar_twist_rhs(satake, params.varsigma, i)
        ok = rhs == s
        checks.append(ConstraintCheck(BAR_TWIST, L[i], ok, "" if ok else
                                      f"varsigma = {render(s)} but the twisted bar of varsigma_{L[t]} is {render(rhs)}"))
        ok = s.bar() * s == ONE
        checks.append(ConstraintCheck(UNITARITY, L[i], ok, "" if ok else f"bar(varsigma) * varsigma = {render(s.bar() * s)}"))
        if k:
            even = all(root.hx(kk, root.roots[i]) % 2 == 0 for kk in fixed)
            ok = i in fixed and even
            detail = "" if ok else ("node is not fixed by tau with h_i = w h_tau(i)" if i not in fixed
                                    else "some <h_k, alpha_i> with k fixed is odd")
        else:
            ok, detail = True, ""
        checks.append(ConstraintCheck(KAPPA_SUPPORT, L[i], ok, detail))
        ok = k.bar() == k
        checks.append(ConstraintCheck(KAPPA_BAR, L[i], ok, "" if ok else f"kappa = {render(k)} is not bar-invariant"))
    rep = ParameterReport(tuple(checks))
    params._reports[key] = rep
    return rep


def _table_value(family: str, n: int, before: bool) -> Tuple[int, int]:
    """(sign, exponent of q) of the standard rank-one parameter."""
    if family == "AI":
        return 1, -1
    if family == "AII":
        return 1, 1
    if family == "AIII":
        return 1, 0
    if family == "AIV":
        return (1, 0) if before else ((-1) ** n, n - 1)
    if family == "BII":
        return 1, 2 * n - 3
    if family == "CII":
        return 1, n - 1
    if family == "DII":
        return 1, n - 2
    if family == "FII":
        return 1, 5
    raise ParameterError(f"no table entry for {family}{n}")


def default_parameters(satake: SatakeDatum, order: Optional[Sequence[int]] = None) -> ParameterSet:
    """kappa = 0 and the standard varsigma of each real-rank-one component.

    Inside a larger datum the table value is read with q replaced by q^g,
    where g is the gcd of the symmetrizers on the component, so that it agrees
    with the standalone normalisation.
    """
    comps, _ = rank_one_components(satake)
    white = list(satake.white)
    order = tuple(order) if order is not None else tuple(white)
    if sorted(order) != sorted(white):
        raise ParameterError("the order must list every white node exactly once")
    rank = {v: k for k, v in enumerate(order)}
    d = satake.cartan.d
    vs: Dict[int, RationalFunction] = {}
    for i in white:
        comp = comps[i]
        if comp.family is None:
            raise ParameterError(f"component of node {satake.cartan.labels[i]} is {comp.label}")
        g = 0
        for k in comp.nodes:
            g = _gcd(g, d[k])
        sign, e = _table_value(comp.family, comp.size, rank[i] < rank[satake.tau[i]])
        vs[i] = (ONE if sign > 0 else -ONE) * qpow(g * e)
    return ParameterSet(vs, {i: ZERO for i in white}, None, order, "rank-one table")


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


# ---------------------------------------------------------------------------
# coideal action


class CoidealAction:
    """Matrices of the coideal generators on a realization."""

    def __init__(self, real: WeightModuleRealization, satake: SatakeDatum, params: ParameterSet):
        self.real = real
        self.satake = satake
        self.params = params
        der = satake.derived
        self.derived = der
        n = satake.n
        B: List[SparseMatrix] = []
        for i in range(n):
            if i in satake.bullet:
                B.append(real.F[i])
                continue
            kinv = real.K_node(i, -1)
            m = real.F[i] + (conjugated_raising_matrix(real, der.w_bullet, satake.tau[i]) @ kinv).scale(params.varsigma[i])
            k = params.kappa.get(i, ZERO)
            if k:
                m = m + kinv.scale(k)
            B.append(m)
        self.B = tuple(B)
        self.Yi = der.Yi_basis
        self._class = tuple(der.xi_key(w) for w in real.weights)

    def K(self, h: Sequence[int]) -> SparseMatrix:
        return self.real.K(h)

    def xi_class(self, k: int) -> Tuple[int, ...]:
        return self._class[k]

    def generators(self) -> List[Tuple[str, SparseMatrix]]:
        """Named matrices of a generating set of the coideal subalgebra."""
        L = self.satake.cartan.labels
        out: List[Tuple[str, SparseMatrix]] = []
        for j in sorted(self.satake.bullet):
            out.append((f"E_{L[j]}", self.real.E[j]))
        for i in range(self.satake.n):
            out.append((f"B_{L[i]}", self.B[i]))
        for k, h in enumerate(self.Yi):
            out.append((f"K_{k}", self.real.K(h)))
        return out

    def trivial_scalars(self) -> List[Tuple[str, SparseMatrix, RationalFunction]]:
        """(name, matrix, scalar) with which each generator acts on V(0)."""
        L = self.satake.cartan.labels
        out = []
        for j in sorted(self.satake.bullet):
            out.append((f"E_{L[j]}", self.real.E[j], ZERO))
            out.append((f"F_{L[j]}", self.real.F[j], ZERO))
        for i in self.satake.white:
            out.append((f"B_{L[i]}", self.B[i], self.params.kappa.get(i, ZERO)))
        return out


def build_coideal_action(real: WeightModuleRealization, satake: SatakeDatum, params: ParameterSet) -> CoidealAction:
    if real.root is not satake.root and real.root != satake.root:
        raise DatumError("realization and Satake datum have different root data")
    return CoidealAction(real, satake, params)


def i_divided_power(action: CoidealAction, i: int, lam_i: int, v: Vec, zeta: Optional[Tuple[int, ...]] = None) -> Vec:
    """B_{i, zeta}^(lam_i + 1) applied to v, with v required to lie in the class zeta."""
    if lam_i < 0:
        raise ValueError("lam_i must be nonnegative")
    if zeta is not None:
        for k in v:
            if action.xi_class(k) != tuple(zeta):
                raise ValueError("vector does not lie in the requested X^i block")
    satake = action.satake
    d = satake.cartan.d[i]
    B = action.B[i]
    if i in action.derived.white_fixed:
        shift = (action.params.shifts or {}).get(i, 0)
        for k in range(lam_i + 1):
            c = qint(shift - lam_i + 2 * k, d)
            w = B.apply(v)
            if c:
                axpy(w, -c, v)
            v = w
    else:
        for _ in range(lam_i + 1):
            v = B.apply(v)
    return vscale(v, qfact(lam_i + 1, d).inverse())


# ---------------------------------------------------------------------------
# trivial vectors


@dataclass(frozen=True)
class TrivialResult:
    vector: Optional[Vec]
    kernel_dim: int
    unknowns: int


def find_trivial_vector(action: CoidealAction) -> TrivialResult:
    """Joint kernel of E_j, F_j (j bullet), B_i - kappa_i (i white) and K_h - 1 (h in Y^i)."""
    real = action.real
    root = real.root
    unknowns = [k for k in range(real.dim)
                if all(root.pair(h, real.weights[k]) == 0 for h in action.Yi)]
    if not unknowns:
        return TrivialResult(None, 0, 0)
    allowed = set(unknowns)
    rows: Dict[Tuple[str, int], Vec] = {}
    for name, mat, scalar in action.trivial_scalars():
        for k in unknowns:
            for r, c in mat.cols[k].items():
                rows.setdefault((name, r), {})[k] = c
            if scalar:
                row = rows.setdefault((name, k), {})
                t = row.get(k, ZERO) - scalar
                if t:
                    row[k] = t
                else:
                    row.pop(k, None)
    ordered = [rows[key] for key in sorted(rows, key=lambda x: (x[0], x[1])) if rows[key]]
    basis = nullspace(ordered, unknowns)
    if len(basis) > 1:
        raise InternalInconsistency(f"trivial-vector kernel has dimension {len(basis)} > 1")
    if not basis:
        return TrivialResult(None, 0, len(allowed))
    return TrivialResult(basis[0], 1, len(allowed))


@dataclass(frozen=True)
class Normalization:
    constant: Optional[RationalFunction]
    verdict: bool
    witness: Optional[str] = None


def infinity_normalize(lattice: CrystalLattice, w0: Vec) -> Normalization:
    """c = 1/a_0 where a_0 is the v_lambda coordinate; verdict is c w0 = v_lambda mod q^-1 L."""
    if not w0:
        raise ValueError("w0 must be nonzero")
    coords = lattice.coordinates(w0)
    a0 = coords.get(0)
    if not a0:
        p = max(coords, key=lambda k: (coords[k].valuation_at_infinity(), -k))
        return Normalization(None, False, f"v_lambda coordinate vanishes; coordinate {p} dominates")
    c = a0.inverse()
    for p in sorted(coords):
        if p == 0:
            continue
        x = coords[p] * c
        if x.valuation_at_infinity() > -1:
            return Normalization(c, False, f"coordinate {p} of c w0 is {render(x)}")
    return Normalization(c, True, None)


# ---------------------------------------------------------------------------
# intertwiners


@dataclass(frozen=True)
class Intertwiner:
    matrix: Optional[SparseMatrix]
    unique: bool
    reason: str = ""

    @property
    def exists(self) -> bool:
        return self.matrix is not None


def _intertwiner_system(src_gens: Sequence[SparseMatrix], tgt_gens: Sequence[SparseMatrix],
                        src_class: Sequence, tgt_class: Sequence):
    by_class: Dict[object, List[int]] = {}
    for r, z in enumerate(tgt_class):
        by_class.setdefault(z, []).append(r)
    unknowns = [(r, c) for c, z in enumerate(src_class) for r in by_class.get(z, ())]
    rows: Dict[Tuple[int, int, int], Vec] = {}
    for g, (gs, gt) in enumerate(zip(src_gens, tgt_gens)):
        # (T gs - gt T)[r, c] = 0
        for c in range(len(src_class)):
            for k, x in gs.cols[c].items():
                for r in by_class.get(src_class[k], ()):
                    row = rows.setdefault((g, r, c), {})
                    axpy(row, x, {(r, k): ONE})
            for k in by_class.get(src_class[c], ()):
                for r, y in gt.cols[k].items():
                    row = rows.setdefault((g, r, c), {})
                    axpy(row, -y, {(k, c): ONE})
    eqs = [rows[key] for key in sorted(rows) if rows[key]]
    return unknowns, eqs


def _solve_intertwiner(src_gens, tgt_gens, src_class, tgt_class, src_vec: int, tgt_vec: int,
                       nrows: int, ncols: int) -> Intertwiner:
    unknowns, eqs = _intertwiner_system(src_gens, tgt_gens, src_class, tgt_class)
    if (tgt_vec, src_vec) not in set(unknowns):
        return Intertwiner(None, False, "generator classes differ")
    rhs = [ZERO] * len(eqs)
    # the generator goes to the generator
    for r, c in unknowns:
        if c == src_vec:
            eqs.append({(r, c): ONE})
            rhs.append(ONE if r == tgt_vec else ZERO)
    try:
        x, kernel = solve(eqs, rhs, unknowns)
    except InconsistentSystem:
        return Intertwiner(None, False, "no map")
    cols: List[Vec] = [dict() for _ in range(ncols)]
    for (r, c), v in x.items():
        cols[c][r] = v
    return Intertwiner(SparseMatrix(nrows, ncols, cols), not kernel, "" if not kernel else f"{len(kernel)}-dimensional family")


def projection_hom(act_lam: CoidealAction, act_mu: CoidealAction) -> Intertwiner:
    """The coideal map V(lambda) -> V(mu) with v_lambda -> v_mu, solved class by class."""
    if not (act_lam.params.kappa_is_zero() and act_mu.params.kappa_is_zero()):
        raise ParameterError("projections are defined for kappa = 0")
    src = [m for name, m in act_lam.generators() if not name.startswith("K_")]
    tgt = [m for name, m in act_mu.generators() if not name.startswith("K_")]
    return _solve_intertwiner(src, tgt, act_lam._class, act_mu._class, 0, 0, act_mu.real.dim, act_lam.real.dim)


# ---------------------------------------------------------------------------
# the modules V^i(lambda, mu; nu)


@dataclass
class ViModule:
    """Coideal submodule of V(lambda + tau nu) (x) V(mu + nu) generated by v^i."""

    ambient: WeightModuleRealization
    action: CoidealAction
    generator: Vec
    basis: List[Vec]
    words: List[Tuple[str, ...]]
    echelon: Echelon

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinates(self, v: Vec) -> Optional[Vec]:
        return self.echelon.express(v)

    def generator_matrices(self) -> List[Tuple[str, SparseMatrix]]:
        """Coideal generators restricted to the submodule, in the closure basis."""
        out = []
        for name, mat in self.action.generators():
            cols = []
            for b in self.basis:
                c = self.coordinates(mat.apply(b))
                if c is None:
                    raise InternalInconsistency(f"closure is not stable under {name}")
                cols.append(c)
            out.append((name, SparseMatrix(self.dim, self.dim, cols)))
        return out

    def evaluate(self, word: Sequence[str]) -> Vec:
        """x v^i for the product x of the named generators (rightmost acts first)."""
        gens = dict(self.action.generators())
        v = self.generator
        for name in reversed(tuple(word)):
            v = gens[name].apply(v)
        return v


def closure(action: CoidealAction, start: Sequence[Vec]) -> Tuple[List[Vec], List[Tuple[str, ...]], Echelon]:
    gens = action.generators()
    ech = Echelon(track=True)
    basis: List[Vec] = []
    words: List[Tuple[str, ...]] = []
    for v in start:
        if ech.add(v):
            basis.append(v)
            words.append(())
    k = 0
    while k < len(basis):
        for name, mat in gens:
            w = mat.apply(basis[k])
            if w and ech.add(w):
                basis.append(w)
                words.append((name,) + words[k])
        k += 1
    return basis, words, ech


def vi_module(satake: SatakeDatum, params: ParameterSet, lam: Sequence[int], mu: Sequence[int],
              nu: Sequence[int], cap_dim: Optional[int] = None) -> ViModule:
    tau_nu = mat_vec(satake.tau_X, nu)
    left = tuple(a + b for a, b in zip(lam, tau_nu))
    right = tuple(a + b for a, b in zip(mu, nu))
    A = build_irreducible(satake, left, cap_dim)
    Bm = build_irreducible(satake, right, cap_dim)
    T = tensor(A, Bm)
    gen = tensor_vectors(extremal_vector(A, satake.derived.w_bullet), {0: ONE}, Bm.dim)
    action = build_coideal_action(T, satake, params)
    basis, words, ech = closure(action, [gen])
    return ViModule(T, action, gen, basis, words, ech)


@dataclass(frozen=True)
class PiResult:
    intertwiner: Intertwiner
    kernel: List[Vec]          # ambient vectors spanning the kernel
    kernel_invariant: bool
    surjective: bool


def pi_imath(source: ViModule, target: ViModule) -> PiResult:
    """The coideal map V^i(lambda, mu; nu) -> V^i(lambda, mu) sending generator to generator."""
    src = [m for name, m in source.generator_matrices() if not name.startswith("K_")]
    tgt = [m for name, m in target.generator_matrices() if not name.startswith("K_")]
    z = [0] * source.dim
    zt = [0] * target.dim
    res = _solve_intertwiner(src, tgt, z, zt, 0, 0, target.dim, source.dim)
    if not res.exists:
        return PiResult(res, [], False, False)
    M = res.matrix
    rows: Dict[int, Vec] = {}
    for c, col in enumerate(M.cols):
        for r, x in col.items():
            rows.setdefault(r, {})[c] = x
    ker_coords = nullspace([rows[r] for r in sorted(rows)], list(range(source.dim)))
    ker = []
    for kc in ker_coords:
        v: Vec = {}
        for pos, x in kc.items():
            axpy(v, x, source.basis[pos])
        ker.append(v)
    kech = Echelon(track=False)
    for v in ker:
        kech.add(v)
    invariant = True
    for _, mat in source.action.generators():
        for v in ker:
            w = mat.apply(v)
            if w and not kech.contains(w):
                invariant = False
    surjective = source.dim - len(ker) == target.dim
    return PiResult(res, ker, invariant, surjective)


__all__ = [
    "BAR_TWIST", "CONSTRAINTS", "CoidealAction", "ConstraintCheck", "INTEGRALITY", "Intertwiner",
    "KAPPA_BAR", "KAPPA_SUPPORT", "Normalization", "ParameterError", "ParameterReport", "ParameterSet",
    "PiResult", "TAU_SYMMETRY", "TrivialResult", "UNITARITY", "ViModule", "bar_twist_rhs",
    "build_coideal_action", "closure", "default_parameters", "find_trivial_vector", "i_divided_power",
    "infinity_normalize", "pi_imath", "projection_hom", "validate_parameters", "vi_module",
]

