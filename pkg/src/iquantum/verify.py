"""Verification pipelines and their reports."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .iqp import (ParameterSet, build_coideal_action, default_parameters, find_trivial_vector,
                  infinity_normalize, validate_parameters)
from .linalg import Vec, vscale
from .qfield import render
from .repmod import (CapExceeded, InternalInconsistency, build_crystal_lattice, build_irreducible,
                     highest_at_infinity, kashiwara)
from .rootdata import SatakeDatum, catalog_weight, rank_one_datum

DEFAULT_CAP = 400

# report status values; the cli maps each to one exit code
OK = "ok"
INVALID = "invalid-parameters"
FALSE = "verdict-false"
NO_TRIVIAL = "no-trivial-submodule"
CAP = "cap-exceeded"
INCONSISTENT = "internal-inconsistency"


@dataclass
class VerificationReport:
    datum_hash: str
    datum_name: str
    lam: Tuple[int, ...]
    nu: Optional[Tuple[int, ...]] = None
    parameters: Dict[str, str] = field(default_factory=dict)
    provenance: str = ""
    order: Optional[Tuple[str, ...]] = None
    parameters_valid: bool = False
    lam_class_zero: bool = False
    dimension: Optional[int] = None
    trivial_found: bool = False
    kernel_dim: Optional[int] = None
    constant: Optional[str] = None
    congruence: Optional[bool] = None
    route_agreement: Optional[bool] = None
    status: str = OK
    failures: List[str] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    w0: Optional[Vec] = field(default=None, repr=False)

    @property
    def verdict(self) -> bool:
        return bool(self.trivial_found and self.kernel_dim == 1 and self.congruence)

    def canonical(self) -> Dict[str, object]:
        """Everything except timings, with stable types."""
        return {
            "congruence": self.congruence,
            "constant": self.constant,
            "datum": self.datum_hash,
            "datum_name": self.datum_name,
            "dimension": self.dimension,
            "failures": list(self.failures),
            "kernel_dim": self.kernel_dim,
            "lambda": list(self.lam),
            "lambda_class_zero": self.lam_class_zero,
            "nu": list(self.nu) if self.nu is not None else None,
            "order": list(self.order) if self.order is not None else None,
            "parameters": dict(sorted(self.parameters.items())),
            "parameters_valid": self.parameters_valid,
            "provenance": self.provenance,
            "route_agreement": self.route_agreement,
            "status": self.status,
            "trivial_found": self.trivial_found,
            "verdict": self.verdict,
        }

    def to_text(self) -> str:
        return render_report(self.canonical())

    def summary_row(self) -> str:
        lam = ",".join(map(str, self.lam))
        return (f"{self.datum_name or self.datum_hash[:12]:<8} lambda=({lam}) dim={self.dimension} "
                f"kernel={self.kernel_dim} c={self.constant} verdict={self.verdict} status={self.status}")


def render_report(obj) -> str:
    """Sorted-key JSON text."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _lam_class_zero(satake: SatakeDatum, lam) -> bool:
    return satake.derived.is_zero_class(lam)


def verify_strong(satake: SatakeDatum, params: ParameterSet, lam: Sequence[int], cap_dim: Optional[int] = DEFAULT_CAP,
                  route_check: bool = True, real=None) -> VerificationReport:
    """V(lambda) -> lattice -> coideal action -> trivial vector -> normalization."""
    lam = tuple(lam)
    L = satake.cartan.labels
    rep = VerificationReport(satake.digest(), satake.name, lam, parameters=params.as_text_map(satake),
                             provenance=params.provenance,
                             order=tuple(L[i] for i in params.order) if params.order else None)
    t0 = time.perf_counter()
    prep = validate_parameters(params, satake)
    rep.parameters_valid = prep.ok
    rep.lam_class_zero = _lam_class_zero(satake, lam)
    rep.timings["validate"] = time.perf_counter() - t0
    if not prep.ok:
        rep.status = INVALID
        rep.failures += [f"{c.constraint} at node {c.node}: {c.detail}" for c in prep.failures()]
        return rep
    try:
        t = time.perf_counter()
        V = real if real is not None else build_irreducible(satake, lam, cap_dim)
        rep.dimension = V.dim
        rep.timings["module"] = time.perf_counter() - t
        t = time.perf_counter()
        lat = build_crystal_lattice(V)
        rep.timings["lattice"] = time.perf_counter() - t
        t = time.perf_counter()
        act = build_coideal_action(V, satake, params)
        tr = find_trivial_vector(act)
        rep.timings["trivial"] = time.perf_counter() - t
    except CapExceeded as e:
        rep.status = CAP
        rep.dimension = e.dim
        rep.failures.append(str(e))
        return rep
    except InternalInconsistency as e:
        rep.status = INCONSISTENT
        rep.failures.append(str(e))
        return rep
    rep.kernel_dim = tr.kernel_dim
    if tr.vector is None:
        rep.trivial_found = False
        rep.status = NO_TRIVIAL
        if rep.lam_class_zero:
            rep.failures.append("no trivial vector although the class of lambda is zero")
        else:
            rep.failures.append("the class of lambda in X^i is nonzero, so V(lambda) has no trivial submodule")
        return rep
    rep.trivial_found = True
    rep.w0 = tr.vector
    t = time.perf_counter()
    nm = infinity_normalize(lat, tr.vector)
    rep.timings["normalize"] = time.perf_counter() - t
    rep.constant = render(nm.constant) if nm.constant is not None else None
    rep.congruence = nm.verdict
    if not nm.verdict:
        rep.failures.append(nm.witness or "congruence fails")
    if route_check:
        t = time.perf_counter()
        other = locally_finite_reduction_check(satake, params, lam, tr.vector, lat)
        rep.timings["route"] = time.perf_counter() - t
        rep.route_agreement = other.verdict == rep.verdict
        if not rep.route_agreement:
            rep.failures.append("the component-wise route disagrees: " + "; ".join(other.failures))
    if rep.route_agreement is False:
        rep.status = INCONSISTENT
    elif not rep.verdict:
        rep.status = FALSE
    rep.timings["total"] = time.perf_counter() - t0
    return rep


@dataclass
class RouteReport:
    verdict: bool
    exact_bullet: bool
    tilde_white: bool
    constant: Optional[str]
    failures: List[str] = field(default_factory=list)


def locally_finite_reduction_check(satake: SatakeDatum, params: ParameterSet, lam, w0: Vec, lattice=None) -> RouteReport:
    """Re-derive the congruence verdict node by node.

    w0 is first scaled into L minus q^-1 L by its dominant coordinate; then bullet
    nodes must kill it exactly under E_j and F_j, white nodes must satisfy
    E~_i m = 0 mod q^-1 L, and the highest-at-oo test gives the constant.
    """
    if lattice is None:
        lattice = build_crystal_lattice(build_irreducible(satake, lam))
    real = lattice.real
    L = satake.cartan.labels
    coords = lattice.coordinates(w0)
    top = max(coords, key=lambda k: (coords[k].valuation_at_infinity(), -k))
    m = vscale(w0, coords[top].inverse())
    fails = []
    exact = True
    for j in sorted(satake.bullet):
        if real.E[j].apply(m) or real.F[j].apply(m):
            exact = False
            fails.append(f"E_{L[j]} or F_{L[j]} does not kill w0")
    tilde = True
    for i in satake.white:
        e = kashiwara(real, i, "E", m)
        if any(c.valuation_at_infinity() > -1 for c in lattice.coordinates(e).values()):
            tilde = False
            fails.append(f"E~_{L[i]} w0 is not 0 mod q^-1 L")
    hv = highest_at_infinity(lattice, m)
    ok = exact and tilde and hv.holds and bool(hv.constant)
    if hv.holds and not hv.constant:
        fails.append("w0 is congruent to 0 times v_lambda")
    return RouteReport(ok, exact, tilde, str(hv.constant) if hv.constant is not None else None, fails)


def sufficient_lambda(satake: SatakeDatum, nu: Sequence[int]) -> Tuple[int, ...]:
    """nu + w_bullet tau(nu), whose class in X^i is always zero."""
    return tuple(a + b for a, b in zip(nu, satake.derived.w_tau_X(nu)))


def verify_sufficient_condition(satake: SatakeDatum, params: ParameterSet, nu: Sequence[int],
                                cap_dim: Optional[int] = DEFAULT_CAP, real=None) -> VerificationReport:
    """verify_strong at lambda = nu + w_bullet tau(nu)."""
    nu = tuple(nu)
    rep = verify_strong(satake, params, sufficient_lambda(satake, nu), cap_dim, real=real)
    rep.nu = nu
    return rep


# ---------------------------------------------------------------------------
# catalog suite


DEFAULT_SUITE: Tuple[Tuple[str, int, int], ...] = (
    ("AI", 1, 3), ("AIII", 2, 2), ("AII", 3, 2), ("AIV", 2, 2),
    ("BII", 2, 1), ("CII", 3, 1), ("DII", 3, 1), ("FII", 4, 1),
)


@dataclass
class SuiteReport:
    entries: List[VerificationReport]
    negative_control: Optional[List[str]] = None

    @property
    def all_ok(self) -> bool:
        return bool(self.entries) and all(e.verdict and e.route_agreement for e in self.entries) and \
            self.negative_control is not None and "bar-twist" in self.negative_control

    def canonical(self):
        return {"all_ok": self.all_ok,
                "entries": [e.canonical() for e in self.entries],
                "negative_control": self.negative_control}

    def to_text(self) -> str:
        return render_report(self.canonical())

    def summary(self) -> str:
        lines = [e.summary_row() for e in self.entries]
        lines.append(f"negative control (AI1, varsigma = q) fails: {self.negative_control}")
        lines.append(f"all ok: {self.all_ok}")
        return "\n".join(lines)


def suite_jobs(caps: Sequence[Tuple[str, int, int]] = DEFAULT_SUITE):
    """(family, n, k, lambda) for every suite entry."""
    jobs = []
    for fam, n, kmax in caps:
        s = rank_one_datum(fam, n)
        base = catalog_weight(s, fam, s.white[0])
        for k in range(1, kmax + 1):
            jobs.append((fam, n, k, tuple(k * x for x in base)))
    return jobs


def run_suite_job(job, cap_dim: Optional[int] = DEFAULT_CAP) -> VerificationReport:
    fam, n, _, lam = job
    s = rank_one_datum(fam, n)
    rep = verify_strong(s, default_parameters(s), lam, cap_dim)
    rep.w0 = None  # flint values do not pickle across worker processes
    return rep


def negative_control() -> List[str]:
    from .iqp import ParameterSet as PS
    from .qfield import Q, ZERO
    s = rank_one_datum("AI", 1)
    return validate_parameters(PS({0: Q}, {0: ZERO}), s).failed_constraints()


def rank1_catalog_suite(caps: Sequence[Tuple[str, int, int]] = DEFAULT_SUITE, cap_dim: Optional[int] = DEFAULT_CAP,
                        jobs: int = 1) -> SuiteReport:
    todo = suite_jobs(caps)
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            entries = list(ex.map(run_suite_job, todo, [cap_dim] * len(todo)))
    else:
        entries = [run_suite_job(j, cap_dim) for j in todo]
    return SuiteReport(entries, negative_control())


def negative_existence_sweep(satake: SatakeDatum, params: ParameterSet, max_dim: int) -> List[Tuple[Tuple[int, ...], bool]]:
    """(lambda, trivial vector absent) for each dominant lambda with nonzero class and dim <= max_dim."""
    from .rootdata import dominant_weights
    out = []
    der = satake.derived
    for lam in dominant_weights(satake, max_dim):
        if der.is_zero_class(lam):
            continue
        V = build_irreducible(satake, lam, max_dim)
        tr = find_trivial_vector(build_coideal_action(V, satake, params))
        out.append((lam, tr.vector is None))
    return out


__all__ = [
    "CAP", "DEFAULT_CAP", "DEFAULT_SUITE", "FALSE", "INCONSISTENT", "INVALID", "NO_TRIVIAL", "OK",
    "RouteReport", "SuiteReport", "VerificationReport", "locally_finite_reduction_check",
    "negative_control", "negative_existence_sweep", "rank1_catalog_suite", "render_report",
    "sufficient_lambda", "verify_strong", "verify_sufficient_condition",
]
