"""Command-line entry point: ``iquantum <command> [flags]``.

Exit codes::

    0  success (valid datum, true verdict, suite all true)
    1  invalid datum or parameters
    2  parse or usage error
    3  verdict false
    4  no trivial submodule
    5  module dimension cap exceeded
    6  internal inconsistency
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

from . import verify as vf
from .cache import RealizationCache
from .formats import parse_datum, parse_parameters, parse_weight
from .iqp import ParameterError, ParameterSet, build_coideal_action, default_parameters, find_trivial_vector, validate_parameters
from .qfield import ParseError, render
from .repmod import CapExceeded, InternalInconsistency, verify_relations
from .rootdata import GENERALIZED, STRICT, SatakeDatum

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_FALSE = 3
EXIT_NO_TRIVIAL = 4
EXIT_CAP = 5
EXIT_INCONSISTENT = 6

STATUS_EXIT = {
    vf.OK: EXIT_OK,
    vf.INVALID: EXIT_INVALID,
    vf.FALSE: EXIT_FALSE,
    vf.NO_TRIVIAL: EXIT_NO_TRIVIAL,
    vf.CAP: EXIT_CAP,
    vf.INCONSISTENT: EXIT_INCONSISTENT,
}

COMMANDS = ("validate", "module", "trivial", "verify", "suite", "cache")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class JobSpec:
    command: str
    datum: Optional[Path] = None
    params: Optional[Path] = None  # None means the default table
    lam: Optional[str] = None
    nu: Optional[str] = None
    order: Optional[str] = None
    cap_dim: Optional[int] = vf.DEFAULT_CAP
    kappa_shifts: Optional[str] = None
    mode: Optional[str] = None
    cache_dir: Optional[Path] = None
    out: Optional[Path] = None
    jobs: int = 1
    action: Optional[str] = None

    @classmethod
    def from_mapping(cls, data: Dict[str, object]) -> "JobSpec":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise UsageError(f"unknown job keys: {', '.join(unknown)}")
        if data.get("command") not in COMMANDS:
            raise UsageError(f"unknown command {data.get('command')!r}")
        vals = dict(data)
        for key in ("datum", "params", "cache_dir", "out"):
            if vals.get(key) is not None:
                vals[key] = Path(vals[key]).expanduser().resolve()
        return cls(**vals)


# ---------------------------------------------------------------------------
# input assembly


def _load_datum(spec: JobSpec) -> SatakeDatum:
    if spec.datum is None:
        raise UsageError("--datum is required")
    s = parse_datum(spec.datum.read_text(encoding="utf-8"))
    if spec.mode is not None:
        s = dataclasses.replace(s, mode=spec.mode)
    return s


def _label_index(satake: SatakeDatum, label: str) -> int:
    try:
        return satake.cartan.labels.index(label)
    except ValueError:
        raise ParseError(f"unknown node {label!r}", label, 0, 1) from None


def _load_params(spec: JobSpec, satake: SatakeDatum) -> ParameterSet:
    order = None
    if spec.order:
        order = tuple(_label_index(satake, t) for t in spec.order.replace(",", " ").split())
    if spec.params is None:
        params = default_parameters(satake, order)
    else:
        params = parse_parameters(spec.params.read_text(encoding="utf-8"), satake)
        if order is not None:
            params = dataclasses.replace(params, order=order, _reports={})
    if spec.kappa_shifts:
        shifts = {}
        for item in spec.kappa_shifts.replace(",", " ").split():
            lab, eq, val = item.partition("=")
            if not eq:
                raise ParseError("expected label=integer", item, len(item), 1)
            try:
                shifts[_label_index(satake, lab)] = int(val)
            except ValueError:
                raise ParseError(f"bad shift {val!r}", item, len(lab) + 1, 1) from None
        params = params.with_kappa_shifts(satake, shifts)
    return params


def _weight(spec: JobSpec, satake: SatakeDatum, which: str = "lam") -> Tuple[int, ...]:
    text = getattr(spec, which)
    if text is None:
        raise UsageError(f"--{'lambda' if which == 'lam' else which} is required")
    w = parse_weight(text, satake)
    if not satake.root.is_dominant(w):
        raise UsageError(f"weight {w} is not dominant")
    return w


def _emit(spec: JobSpec, text: str) -> None:
    if spec.out is None:
        return
    spec.out.parent.mkdir(parents=True, exist_ok=True)
    spec.out.write_text(text, encoding="utf-8")


def _realization(spec: JobSpec, satake: SatakeDatum, lam):
    if spec.cache_dir is None:
        return None
    real, _ = RealizationCache(spec.cache_dir).load(satake, lam, spec.cap_dim)
    return real


# ---------------------------------------------------------------------------
# commands


def cmd_validate(spec: JobSpec) -> int:
    s = _load_datum(spec)
    violations = s.validate()
    failed = {v.axiom for v in violations}
    for v in violations:
        print(f"FAIL {v.axiom}: {v.detail}")
    ok = not violations
    if ok:
        print(f"ok   datum {s.name or '-'} ({s.digest()[:16]})")
    lines = [f"datum {'valid' if ok else 'invalid'}: {', '.join(sorted(failed)) or 'all axioms hold'}"]
    if ok:
        params = _load_params(spec, s)
        rep = validate_parameters(params, s)
        for c in rep.checks:
            node = f" {c.node}" if c.node is not None else ""
            print(f"{'ok  ' if c.ok else 'FAIL'} {c.constraint}{node}" + (f": {c.detail}" if not c.ok else ""))
        ok = rep.ok
        lines.append(f"parameters {'valid' if rep.ok else 'invalid'}: "
                     f"{', '.join(rep.failed_constraints()) or 'all constraints hold'}")
    print("\n".join(lines))
    _emit(spec, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_INVALID


def _require_valid(s: SatakeDatum) -> Optional[int]:
    bad = s.validate()
    if bad:
        for v in bad:
            print(f"FAIL {v.axiom}: {v.detail}", file=sys.stderr)
        return EXIT_INVALID
    return None


def cmd_module(spec: JobSpec) -> int:
    from .repmod import build_irreducible, render_realization
    s = _load_datum(spec)
    if (rc := _require_valid(s)) is not None:
        return rc
    lam = _weight(spec, s)
    real = _realization(spec, s, lam) or build_irreducible(s, lam, spec.cap_dim)
    rel = verify_relations(real)
    print(f"V({', '.join(map(str, lam))}): dim {real.dim}, weights {len(real.blocks)}, "
          f"relations {'ok' if rel.ok else 'FAIL: ' + str(rel.failure)}")
    _emit(spec, render_realization(real, s.digest()))
    return EXIT_OK if rel.ok else EXIT_INCONSISTENT


def cmd_trivial(spec: JobSpec) -> int:
    from .repmod import build_irreducible
    s = _load_datum(spec)
    if (rc := _require_valid(s)) is not None:
        return rc
    params = _load_params(spec, s)
    lam = _weight(spec, s)
    real = _realization(spec, s, lam) or build_irreducible(s, lam, spec.cap_dim)
    res = find_trivial_vector(build_coideal_action(real, s, params))
    if res.vector is None:
        print(f"no trivial vector in V(lambda) (dim {real.dim}, {res.unknowns} candidate coordinates)")
        return EXIT_NO_TRIVIAL
    lines = [f"trivial vector, kernel dimension {res.kernel_dim}:"]
    lines += [f"  [{k}] wt {real.weights[k]}  {render(c)}" for k, c in sorted(res.vector.items())]
    print("\n".join(lines))
    _emit(spec, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(spec: JobSpec) -> int:
    s = _load_datum(spec)
    if (rc := _require_valid(s)) is not None:
        return rc
    params = _load_params(spec, s)
    if spec.nu is not None:
        nu = _weight(spec, s, "nu")
        real = _realization(spec, s, vf.sufficient_lambda(s, nu))
        rep = vf.verify_sufficient_condition(s, params, nu, spec.cap_dim, real=real)
    else:
        lam = _weight(spec, s)
        rep = vf.verify_strong(s, params, lam, spec.cap_dim, real=_realization(spec, s, lam))
    print(rep.summary_row())
    for f in rep.failures:
        print(f"  {f}")
    _emit(spec, rep.to_text())
    return STATUS_EXIT[rep.status]


def cmd_suite(spec: JobSpec) -> int:
    rep = vf.rank1_catalog_suite(cap_dim=spec.cap_dim, jobs=spec.jobs)
    print(rep.summary())
    _emit(spec, rep.to_text())
    if rep.all_ok:
        return EXIT_OK
    statuses = {e.status for e in rep.entries} - {vf.OK}
    for st in (vf.INCONSISTENT, vf.CAP, vf.NO_TRIVIAL, vf.FALSE, vf.INVALID):
        if st in statuses:
            return STATUS_EXIT[st]
    return EXIT_INCONSISTENT


def cmd_cache(spec: JobSpec) -> int:
    cache = RealizationCache(spec.cache_dir)
    if spec.action == "purge" and spec.datum is None:
        print(f"purged {cache.purge()} entries from {cache.dir}")
        return EXIT_OK
    s = _load_datum(spec)
    if (rc := _require_valid(s)) is not None:
        return rc
    lam = _weight(spec, s)
    if spec.action == "build":
        e = cache.build(s, lam, spec.cap_dim)
    elif spec.action == "inspect":
        e = cache.inspect(s, lam)
        if e is None:
            print("no intact entry")
            return EXIT_INVALID
    else:
        print(f"purged {cache.purge(s, lam)} entries")
        return EXIT_OK
    print(f"key {e.key}\nsha256 {e.checksum}\ndim {e.dim}\npath {e.path}")
    return EXIT_OK


HANDLERS = {
    "validate": cmd_validate, "module": cmd_module, "trivial": cmd_trivial,
    "verify": cmd_verify, "suite": cmd_suite, "cache": cmd_cache,
}


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="iquantum", description="Exact checks for quantum symmetric pairs.")
    p.add_argument("--log-level", default="WARNING")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, params=True, weights=True):
        sp.add_argument("--datum", type=Path)
        sp.add_argument("--mode", choices=(STRICT, GENERALIZED))
        sp.add_argument("--out", type=Path)
        sp.add_argument("--cap-dim", type=int, default=vf.DEFAULT_CAP)
        sp.add_argument("--cache-dir", type=Path)
        if params:
            g = sp.add_mutually_exclusive_group()
            g.add_argument("--params", type=Path)
            g.add_argument("--default-params", action="store_true")
            sp.add_argument("--order", help="white-node order for the AIV rows")
            sp.add_argument("--kappa-shifts", help="label=int pairs selecting kappa_i = [s]_i")
        if weights:
            sp.add_argument("--lambda", dest="lam")

    common(sub.add_parser("validate", help="check datum axioms and parameter constraints"), weights=False)
    common(sub.add_parser("module", help="build V(lambda) and check its relations"), params=False)
    common(sub.add_parser("trivial", help="solve for the trivial vector"))
    sp = sub.add_parser("verify", help="run the full pipeline")
    common(sp)
    sp.add_argument("--nu")
    sp = sub.add_parser("suite", help="rank-one catalog suite")
    sp.add_argument("--out", type=Path)
    sp.add_argument("--cap-dim", type=int, default=vf.DEFAULT_CAP)
    sp.add_argument("--jobs", type=int, default=1)
    sp = sub.add_parser("cache", help="build, inspect or purge cached realizations")
    sp.add_argument("action", choices=("build", "inspect", "purge"))
    common(sp, params=False)
    return p


def spec_from_args(ns: argparse.Namespace) -> JobSpec:
    data = {k: v for k, v in vars(ns).items() if k not in ("log_level", "default_params")}
    return JobSpec.from_mapping(data)


def main(argv: Optional[Sequence[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(ns.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = spec_from_args(ns)
        return HANDLERS[spec.command](spec)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as e:
        print(f"invalid parameters: {e}", file=sys.stderr)
        return EXIT_INVALID
    except CapExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except InternalInconsistency as e:
        print(f"internal inconsistency: {e}", file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    raise SystemExit(main())


__all__ = ["JobSpec", "UsageError", "build_parser", "main", "STATUS_EXIT"]
