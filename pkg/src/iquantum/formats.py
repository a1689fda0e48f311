"""Text formats for Satake data and parameter files.

Datum files are line oriented with ``[section]`` headers; ``#`` starts a
comment.  Sections, in canonical order::

    [name]      optional free-form label
    [nodes]     node labels separated by spaces
    [gcm]       one row of integers per node
    [d]         symmetrizers
    [bullet]    labels of the bullet nodes (may be empty)
    [tau]       tau(node) for each node, as labels in node order
    [mode]      strict | generalized
    [lattices]  optional; lines ``pairing``/``coroot``/``root``/``tau_y``/``tau_x``
                followed by integers, one line per matrix row

Without ``[lattices]`` the simply connected datum is built.  Parameter files
have ``[varsigma]`` and ``[kappa]`` sections of ``label = expression`` lines and
optional ``[shifts]`` (``label = integer``) and ``[order]`` (labels) sections.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .qfield import ParseError, parse, render
from .rootdata import (GENERALIZED, STRICT, CartanDatum, DatumError, RootDatum, SatakeDatum,
                       build_simply_connected, identity)

DATUM_SECTIONS = ("name", "nodes", "gcm", "d", "bullet", "tau", "mode", "lattices")
PARAM_SECTIONS = ("varsigma", "kappa", "shifts", "order")


def _sections(text: str, allowed) -> Dict[str, List[Tuple[int, str]]]:
    out: Dict[str, List[Tuple[int, str]]] = {}
    cur: Optional[str] = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError("unterminated section header", raw, len(raw), no)
            cur = line[1:-1].strip()
            if cur not in allowed:
                raise ParseError(f"unknown section [{cur}]", raw, raw.index("[") + 1, no)
            if cur in out:
                raise ParseError(f"duplicate section [{cur}]", raw, raw.index("[") + 1, no)
            out[cur] = []
            continue
        if cur is None:
            raise ParseError("content before the first section header", raw, 0, no)
        out[cur].append((no, line))
    return out


def _ints(no: int, line: str) -> Tuple[int, ...]:
    vals = []
    pos = 0
    for tok in line.split():
        pos = line.index(tok, pos)
        try:
            vals.append(int(tok))
        except ValueError:
            raise ParseError(f"expected an integer, got {tok!r}", line, pos, no) from None
        pos += len(tok)
    return tuple(vals)


def _need(secs, name, text):
    if name not in secs:
        raise ParseError(f"missing section [{name}]", text.splitlines()[0] if text else "", 0, 1)
    return secs[name]


def parse_datum(text: str) -> SatakeDatum:
    secs = _sections(text, DATUM_SECTIONS)
    nodes_lines = _need(secs, "nodes", text)
    labels: List[str] = []
    for _, line in nodes_lines:
        labels.extend(line.split())
    if len(set(labels)) != len(labels):
        no, line = nodes_lines[0]
        raise ParseError("node labels must be distinct", line, 0, no)
    n = len(labels)
    pos = {lab: k for k, lab in enumerate(labels)}

    def label_list(no, line):
        out = []
        p = 0
        for tok in line.split():
            p = line.index(tok, p)
            if tok not in pos:
                raise ParseError(f"unknown node {tok!r}", line, p, no)
            out.append(pos[tok])
            p += len(tok)
        return out

    gcm_lines = _need(secs, "gcm", text)
    gcm = tuple(_ints(no, line) for no, line in gcm_lines)
    if len(gcm) != n or any(len(r) != n for r in gcm):
        no, line = gcm_lines[0] if gcm_lines else (1, "")
        raise ParseError(f"[gcm] must have {n} rows of {n} integers", line, 0, no)
    d_lines = _need(secs, "d", text)
    d = tuple(x for no, line in d_lines for x in _ints(no, line))
    if len(d) != n:
        no, line = d_lines[0] if d_lines else (1, "")
        raise ParseError(f"[d] must have {n} entries", line, 0, no)
    bullet = []
    for no, line in secs.get("bullet", []):
        bullet.extend(label_list(no, line))
    tau_lines = secs.get("tau")
    if tau_lines:
        tau = []
        for no, line in tau_lines:
            tau.extend(label_list(no, line))
        if len(tau) != n:
            no, line = tau_lines[0]
            raise ParseError(f"[tau] must list {n} images", line, 0, no)
    else:
        tau = list(range(n))
    mode = STRICT
    for no, line in secs.get("mode", []):
        if line not in (STRICT, GENERALIZED):
            raise ParseError(f"mode must be {STRICT} or {GENERALIZED}", line, 0, no)
        mode = line
    name = " ".join(line for _, line in secs.get("name", []))
    cartan = CartanDatum(tuple(labels), gcm, d)
    if "lattices" not in secs:
        try:
            return build_simply_connected(cartan, tau, bullet, mode, name)
        except DatumError:
            # keep the inadmissible tau so that validation can report it
            ident = identity(n)
            roots = tuple(tuple(gcm[i][j] for i in range(n)) for j in range(n))
            perm = tuple(tuple(int(tau[j] == i) for j in range(n)) for i in range(n))
            return SatakeDatum(RootDatum(cartan, ident, ident, roots), frozenset(bullet), tuple(tau),
                               perm, perm, mode, name)
    blocks: Dict[str, List[Tuple[int, ...]]] = {k: [] for k in ("pairing", "coroot", "root", "tau_y", "tau_x")}
    for no, line in secs["lattices"]:
        key, _, rest = line.partition(" ")
        if key not in blocks:
            raise ParseError(f"unknown lattice line {key!r}", line, 0, no)
        blocks[key].append(_ints(no, rest))
    root = RootDatum(cartan, tuple(blocks["pairing"]), tuple(blocks["coroot"]), tuple(blocks["root"]))
    return SatakeDatum(root, frozenset(bullet), tuple(tau), tuple(blocks["tau_y"]), tuple(blocks["tau_x"]),
                       mode, name)


def _is_default_lattice(s: SatakeDatum) -> bool:
    n = s.n
    ident = identity(n)
    r = s.root
    roots = tuple(tuple(s.cartan.gcm[i][j] for i in range(n)) for j in range(n))
    perm = tuple(tuple(int(s.tau[j] == i) for j in range(n)) for i in range(n))
    return (r.pairing == ident and r.coroots == ident and r.roots == roots
            and s.tau_Y == perm and s.tau_X == perm)


def render_datum(s: SatakeDatum) -> str:
    L = s.cartan.labels
    out = []
    if s.name:
        out += ["[name]", s.name]
    out += ["[nodes]", " ".join(L), "[gcm]"]
    out += [" ".join(str(x) for x in row) for row in s.cartan.gcm]
    out += ["[d]", " ".join(str(x) for x in s.cartan.d)]
    out += ["[bullet]"]
    if s.bullet:
        out.append(" ".join(L[i] for i in sorted(s.bullet)))
    out += ["[tau]", " ".join(L[s.tau[i]] for i in range(s.n))]
    out += ["[mode]", s.mode]
    if not _is_default_lattice(s):
        out.append("[lattices]")
        for key, rows in (("pairing", s.root.pairing), ("coroot", s.root.coroots), ("root", s.root.roots),
                          ("tau_y", s.tau_Y), ("tau_x", s.tau_X)):
            out += [f"{key} " + " ".join(str(x) for x in row) for row in rows]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# parameter files


def parse_parameters(text: str, satake: SatakeDatum):
    from .iqp import ParameterSet
    secs = _sections(text, PARAM_SECTIONS)
    pos = {lab: k for k, lab in enumerate(satake.cartan.labels)}

    def assignments(name, conv):
        out = {}
        for no, line in secs.get(name, []):
            lab, eq, expr = line.partition("=")
            lab = lab.strip()
            if not eq:
                raise ParseError("expected 'label = value'", line, len(line), no)
            if lab not in pos:
                raise ParseError(f"unknown node {lab!r}", line, 0, no)
            if pos[lab] in out:
                raise ParseError(f"node {lab!r} assigned twice", line, 0, no)
            col = line.index("=") + 1
            try:
                out[pos[lab]] = conv(expr.strip())
            except ParseError as e:
                raise ParseError(str(e).split(" (line")[0], line, col + e.pos, no) from None
            except ValueError:
                raise ParseError(f"bad value {expr.strip()!r}", line, col, no) from None
        return out

    vs = assignments("varsigma", parse)
    kp = assignments("kappa", parse)
    shifts = assignments("shifts", int) if "shifts" in secs else None
    order = None
    if "order" in secs:
        order = []
        for no, line in secs["order"]:
            for tok in line.split():
                if tok not in pos:
                    raise ParseError(f"unknown node {tok!r}", line, line.index(tok), no)
                order.append(pos[tok])
        order = tuple(order)
    return ParameterSet(vs, kp, shifts, order, "file")


def render_parameters(params, satake: SatakeDatum) -> str:
    L = satake.cartan.labels
    out = ["[varsigma]"]
    out += [f"{L[i]} = {render(params.varsigma[i])}" for i in sorted(params.varsigma)]
    out += ["[kappa]"]
    out += [f"{L[i]} = {render(params.kappa[i])}" for i in sorted(params.kappa)]
    if params.shifts:
        out += ["[shifts]"] + [f"{L[i]} = {params.shifts[i]}" for i in sorted(params.shifts)]
    if params.order:
        out += ["[order]", " ".join(L[i] for i in params.order)]
    return "\n".join(out) + "\n"


def parse_weight(text: str, satake: SatakeDatum) -> Tuple[int, ...]:
    """Comma- or space-separated integers in X coordinates."""
    toks = text.replace(",", " ").split()
    try:
        vals = tuple(int(t) for t in toks)
    except ValueError:
        raise ParseError("weights are integer lists", text, 0, 1) from None
    if len(vals) != satake.root.rank_X:
        raise ParseError(f"weight needs {satake.root.rank_X} coordinates", text, 0, 1)
    return vals
